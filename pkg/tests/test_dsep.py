import networkx as nx
import numpy as np
import pytest

from netgen import random_network
from staleobs.inference import InferenceError, d_separated, posterior


def nx_d_separated(net, a, b, given):
    g = nx.DiGraph()
    g.add_nodes_from(net.names)
    g.add_edges_from(net.edges)
    if hasattr(nx, "is_d_separator"):
        return nx.is_d_separator(g, {a}, {b}, set(given))
    return nx.d_separated(g, {a}, {b}, set(given))


def test_chain_blocked_by_middle(chain_net):
    assert d_separated(chain_net, "A", "C", {"B"}) is True
    assert d_separated(chain_net, "A", "C", set()) is False


def test_collider_activation(collider_net):
    assert d_separated(collider_net, "A", "B", set()) is True
    assert d_separated(collider_net, "A", "B", {"C"}) is False


def test_collider_descendant_activates():
    from staleobs.network import Cpt, Network, Variable

    variables = [Variable(n, ("0", "1")) for n in "ABCD"]
    edges = [("A", "C"), ("B", "C"), ("C", "D")]
    cpts = {
        "A": Cpt("A", (), np.array([[0.5, 0.5]])),
        "B": Cpt("B", (), np.array([[0.5, 0.5]])),
        "C": Cpt("C", ("A", "B"), np.tile([0.4, 0.6], (4, 1))),
        "D": Cpt("D", ("C",), np.array([[0.9, 0.1], [0.2, 0.8]])),
    }
    net = Network.from_parts(variables, edges, cpts)
    assert d_separated(net, "A", "B", set()) is True
    assert d_separated(net, "A", "B", {"D"}) is False


def test_rejects_bad_queries(chain_net):
    with pytest.raises(InferenceError):
        d_separated(chain_net, "A", "A", set())
    with pytest.raises(InferenceError):
        d_separated(chain_net, "A", "C", {"A"})
    with pytest.raises(Exception):
        d_separated(chain_net, "A", "nope", set())


def test_symmetry_and_networkx_agreement(rng):
    for _ in range(30):
        net = random_network(rng, int(rng.integers(4, 11)))
        names = list(net.names)
        a, b = (names[i] for i in rng.choice(len(names), size=2, replace=False))
        others = [n for n in names if n not in (a, b)]
        k = int(rng.integers(0, len(others) + 1))
        given = set(
            others[i] for i in rng.choice(len(others), size=k, replace=False)
        )
        ours = d_separated(net, a, b, given)
        assert ours == d_separated(net, b, a, given)
        assert ours == nx_d_separated(net, a, b, given)


def test_d_separation_implies_posterior_invariance(rng):
    # numerical counterpart: conditioning on a d-separated variable must not
    # move the posterior
    checked = 0
    for _ in range(60):
        net = random_network(rng, 6)
        names = list(net.names)
        a, b = (names[i] for i in rng.choice(len(names), size=2, replace=False))
        others = [n for n in names if n not in (a, b)]
        k = int(rng.integers(0, len(others) + 1))
        given = [others[i] for i in rng.choice(len(others), size=k, replace=False)]
        if not d_separated(net, a, b, set(given)):
            continue
        z_assignment = {
            g: net.states(g)[int(rng.integers(len(net.states(g))))] for g in given
        }
        base = posterior(net, z_assignment, a)
        for state in net.states(b):
            with_b = posterior(net, {**z_assignment, b: state}, a)
            for s, p in base.items():
                assert with_b[s] == pytest.approx(p, abs=1e-9)
        checked += 1
    assert checked >= 5
