import itertools
import math

import numpy as np
import pytest

from netgen import random_evidence, random_network
from oracle import (
    full_joint,
    oracle_evidence_probability,
    oracle_joint_probability,
    oracle_posterior,
)
from staleobs.inference import (
    ImpossibleEvidenceError,
    InferenceError,
    evidence_probability,
    joint_probability,
    posterior,
    prob_of,
)
from staleobs.network import Cpt, Network, Variable


def test_joint_probability_direct_product(two_node_net):
    assert joint_probability(two_node_net, {"A": "1", "B": "1"}) == pytest.approx(0.15)


def test_joint_probability_uniform_symmetry():
    n = 5
    variables = [Variable(f"v{i}", ("0", "1")) for i in range(n)]
    edges = [(f"v{i}", f"v{i+1}") for i in range(n - 1)]
    cpts = {"v0": Cpt("v0", (), np.array([[0.5, 0.5]]))}
    for i in range(1, n):
        cpts[f"v{i}"] = Cpt(f"v{i}", (f"v{i-1}",), np.array([[0.5, 0.5], [0.5, 0.5]]))
    net = Network.from_parts(variables, edges, cpts)
    for assignment in itertools.product("01", repeat=n):
        full = {f"v{i}": assignment[i] for i in range(n)}
        assert joint_probability(net, full) == pytest.approx(2.0 **-n)


def test_joint_probabilities_sum_to_one(rng):
    net = random_network(rng, 4, cards=(2, 3))
    total = 0.0
    for assignment in itertools.product(*(net.states(n) for n in net.names)):
        total += joint_probability(net, dict(zip(net.names, assignment)))
    assert total == pytest.approx(1.0, abs=1e-9)


def test_joint_probability_requires_full_assignment(two_node_net):
    with pytest.raises(InferenceError, match="missing"):
        joint_probability(two_node_net, {"A": "1"})
    with pytest.raises(Exception):
        joint_probability(two_node_net, {"A": "1", "B": "1", "Z": "1"})


def test_posterior_empty_evidence_is_prior(two_node_net):
    dist = posterior(two_node_net, {}, "A")
    assert dist == pytest.approx({"0": 0.7, "1": 0.3})
    # B's prior marginal: 0.7*0.2 + 0.3*0.5 = 0.29
    dist_b = posterior(two_node_net, {}, "B")
    assert dist_b["1"] == pytest.approx(0.29)


def test_posterior_collider_explaining_away(collider_net):
    # frozen from the enumeration oracle:
    # P(A=1 | C=1) = 0.3*(0.4*0.4+0.6*0.9) / (that + 0.7*(0.4*0.1+0.6*0.5))
    dist = posterior(collider_net, {"C": "1"}, "A")
    assert dist["1"] == pytest.approx(0.46875, abs=1e-9)
    joint = full_joint(collider_net)
    expected = oracle_posterior(collider_net, joint, {"C": "1"}, "A")
    assert dist["1"] == pytest.approx(expected["1"], abs=1e-9)
    # conditioning on the collider makes A and B dependent
    given_b = posterior(collider_net, {"C": "1", "B": "1"}, "A")
    assert given_b["1"] != pytest.approx(dist["1"], abs=1e-3)


def test_posterior_rejects_observed_target(two_node_net):
    with pytest.raises(InferenceError, match="observed"):
        posterior(two_node_net, {"A": "1"}, "A")


def test_posterior_impossible_evidence_raises():
    # built unchecked: a hard zero row is deliberately invalid input
    variables = [Variable("A", ("0", "1")), Variable("B", ("0", "1"))]
    cpts = {
        "A": Cpt("A", (), np.array([[1.0, 0.0]])),
        "B": Cpt("B", ("A",), np.array([[1.0, 0.0], [0.0, 1.0]])),
    }
    net = Network(variables, [("A", "B")], cpts)
    with pytest.raises(ImpossibleEvidenceError):
        posterior(net, {"A": "1"}, "B")


def test_prob_of_matches_posterior_entry(collider_net):
    p = prob_of(collider_net, {"C": "1"}, ("A", "1"))
    assert p == pytest.approx(posterior(collider_net, {"C": "1"}, "A")["1"])


def test_prob_of_deterministic_row():
    variables = [Variable("A", ("0", "1")), Variable("B", ("0", "1"))]
    cpts = {
        "A": Cpt("A", (), np.array([[0.5, 0.5]])),
        "B": Cpt("B", ("A",), np.array([[1.0, 0.0], [0.0, 1.0]])),
    }
    net = Network(variables, [("A", "B")], cpts)
    assert prob_of(net, {"A": "1"}, ("B", "1")) == pytest.approx(1.0)


def test_prob_of_empty_evidence_is_prior(two_node_net):
    assert prob_of(two_node_net, {}, ("B", "1")) == pytest.approx(0.29)


def test_posterior_sums_to_one(rng):
    for _ in range(20):
        net = random_network(rng, int(rng.integers(3, 9)), cards=(2, 3, 4))
        evidence = random_evidence(rng, net)
        target = next(n for n in net.names if n not in evidence)
        dist = posterior(net, evidence, target)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)


def test_posterior_matches_enumeration_oracle(rng):
    for _ in range(25):
        net = random_network(rng, int(rng.integers(3, 10)), cards=(2, 3))
        joint = full_joint(net)
        for _ in range(10):
            evidence = random_evidence(rng, net, max_vars=5)
            target = next(n for n in net.names if n not in evidence)
            expected = oracle_posterior(net, joint, evidence, target)
            got = posterior(net, evidence, target)
            for state in net.states(target):
                assert got[state] == pytest.approx(expected[state], abs=1e-9)


def test_evidence_probability_matches_oracle(rng):
    for _ in range(10):
        net = random_network(rng, 6, cards=(2, 3))
        joint = full_joint(net)
        evidence = random_evidence(rng, net, max_vars=4)
        assert evidence_probability(net, evidence) == pytest.approx(
            oracle_evidence_probability(net, joint, evidence), rel=1e-9
        )
    assert evidence_probability(net, {}) == 1.0


def test_joint_probability_matches_oracle(rng):
    net = random_network(rng, 7, cards=(2, 3))
    for _ in range(20):
        assignment = {
            name: net.states(name)[int(rng.integers(len(net.states(name))))]
            for name in net.names
        }
        assert joint_probability(net, assignment) == pytest.approx(
            oracle_joint_probability(net, assignment), rel=1e-12
        )


def test_long_chain_underflow_resistance():
    # 60 variables with 1e-4-scale conditionals: linear-space products would
    # underflow badly; log-space keeps the result finite and exact
    n = 60
    variables = [Variable(f"v{i}", ("0", "1")) for i in range(n)]
    edges = [(f"v{i}", f"v{i+1}") for i in range(n - 1)]
    cpts = {"v0": Cpt("v0", (), np.array([[0.9999, 0.0001]]))}
    for i in range(1, n):
        cpts[f"v{i}"] = Cpt(
            f"v{i}", (f"v{i-1}",), np.array([[0.9999, 0.0001], [0.0001, 0.9999]])
        )
    net = Network.from_parts(variables, edges, cpts)
    everything_one = {f"v{i}": "1" for i in range(n)}
    p = joint_probability(net, everything_one)
    assert p == pytest.approx(0.0001 * 0.9999 ** (n - 1), rel=1e-9)
    assert math.isfinite(p) and p > 0
    # posterior of the last node given the first stays exact
    dist = posterior(net, {"v0": "1"}, f"v{n-1}")
    assert sum(dist.values()) == pytest.approx(1.0)
    assert dist["1"] > 0.99
