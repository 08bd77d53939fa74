import itertools

import numpy as np
import pytest

from staleobs.modeltools import (
    DiscretizationError,
    IntervalScheme,
    dump_scheme,
    equal_frequency_discretize,
    load_scheme,
    validate_network,
)
from staleobs.models import load_autonomy_fragment, load_core_model, load_extended_model
from staleobs.network import Cpt, Network, Variable


def brute_force_best_imbalance(values, bins):
    """Enumerate every cut placement between distinct values and return the
    minimal squared count deviation (independent oracle for the DP)."""
    ordered = sorted(values)
    distinct = sorted(set(ordered))
    counts = [ordered.count(d) for d in distinct]
    ideal = len(values) / bins
    best = None
    positions = range(1, len(distinct))
    for cuts in itertools.combinations(positions, bins - 1):
        bounds = (0, *cuts, len(distinct))
        segment_counts = [
            sum(counts[a:b]) for a, b in zip(bounds, bounds[1:])
        ]
        cost = sum((c - ideal) ** 2 for c in segment_counts)
        if best is None or cost < best:
            best = cost
    return best


def scheme_counts(scheme, values):
    counts = [0] * len(scheme.labels)
    for v in values:
        counts[scheme.interval_index(v)] += 1
    return counts


def test_equal_counts_for_distinct_values():
    scheme = equal_frequency_discretize(list(range(1, 10)), 3)
    assert scheme.boundaries == (3.5, 6.5)
    assert scheme_counts(scheme, range(1, 10)) == [3, 3, 3]


def test_all_equal_values_rejected():
    with pytest.raises(DiscretizationError, match="too few distinct"):
        equal_frequency_discretize([7, 7, 7, 7], 2)


def test_duplicates_never_split():
    values = [1, 1, 1, 1, 2, 3]
    scheme = equal_frequency_discretize(values, 2)
    # the run of 1s stays whole: counts 4/2 beat 5/1
    assert scheme_counts(scheme, values) == [4, 2]
    assert scheme.boundaries == (1.5,)


@pytest.mark.parametrize(
    "values,bins",
    [
        ([1, 1, 1, 1, 2, 3], 2),
        ([1, 2, 2, 2, 2, 2, 3, 4, 5], 3),
        (list(range(20)), 4),
        ([1, 1, 2, 2, 3, 3, 4, 4], 2),
        ([5, 1, 3, 3, 3, 9, 9, 2, 8, 7], 3),
    ],
)
def test_matches_brute_force_imbalance(values, bins):
    scheme = equal_frequency_discretize(values, bins)
    counts = scheme_counts(scheme, values)
    ideal = len(values) / bins
    cost = sum((c - ideal) ** 2 for c in counts)
    assert cost == pytest.approx(brute_force_best_imbalance(values, bins))


def test_distinct_values_counts_differ_by_at_most_one():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(6, 40))
        bins = int(rng.integers(2, min(6, n)))
        values = list(rng.permutation(n * 3)[:n])
        scheme = equal_frequency_discretize(values, bins)
        counts = scheme_counts(scheme, values)
        assert max(counts) - min(counts) <= 1


def test_discretization_preserves_order():
    rng = np.random.default_rng(11)
    values = list(rng.normal(size=60))
    scheme = equal_frequency_discretize(values, 4)
    pairs = sorted(rng.choice(values, size=30, replace=False))
    for a, b in zip(pairs, pairs[1:]):
        assert scheme.interval_index(a) <= scheme.interval_index(b)


def test_bad_inputs_rejected():
    with pytest.raises(DiscretizationError):
        equal_frequency_discretize([1, 2, 3], 1)
    with pytest.raises(DiscretizationError):
        equal_frequency_discretize([1, 2], 3)
    with pytest.raises(DiscretizationError):
        IntervalScheme("x", (2.0, 1.0), ("a", "b", "c"))
    with pytest.raises(DiscretizationError):
        IntervalScheme("x", (1.0,), ("a", "a"))


def test_scheme_round_trip():
    scheme = equal_frequency_discretize(
        [62, 70, 75, 81, 84, 90], 3, variable="age", labels=("young", "mid", "old")
    )
    again = load_scheme(dump_scheme(scheme))
    assert again == scheme
    assert again.encode(66) == "young"
    assert again.encode(95) == "old"


# ---------------------------------------------------------------- validate_network


def test_wellformed_two_node_net_clean(two_node_net):
    assert validate_network(two_node_net).ok


def test_row_sum_drift_finding():
    variables = [Variable("A", ("0", "1"))]
    cpts = {"A": Cpt("A", (), np.array([[0.499999, 0.5]]))}
    net = Network(variables, [], cpts)
    report = validate_network(net)
    findings = report.by_kind("row-sum")
    assert len(findings) == 1 and findings[0].variable == "A"


def test_clamped_entry_finding():
    doc = """
bn 1
var A no yes
var B no yes
edge A B
cpt A
0.5 0.5
cpt B | A
0.99999 0.00001
0.5 0.5
"""
    from staleobs.network import load_network

    net = load_network(doc)
    report = validate_network(net)
    assert len(report.by_kind("clamped")) >= 1
    assert report.by_kind("clamped")[0].variable == "B"


def test_cycle_finding():
    variables = [Variable("A", ("0", "1")), Variable("B", ("0", "1"))]
    cpts = {
        "A": Cpt("A", ("B",), np.array([[0.5, 0.5], [0.5, 0.5]])),
        "B": Cpt("B", ("A",), np.array([[0.5, 0.5], [0.5, 0.5]])),
    }
    net = Network(variables, [("A", "B"), ("B", "A")], cpts)
    report = validate_network(net)
    assert report.by_kind("cycle")


def test_disconnected_finding():
    variables = [Variable("A", ("0", "1")), Variable("B", ("0", "1")), Variable("C", ("0", "1"))]
    cpts = {
        "A": Cpt("A", (), np.array([[0.5, 0.5]])),
        "B": Cpt("B", ("A",), np.array([[0.5, 0.5], [0.5, 0.5]])),
        "C": Cpt("C", (), np.array([[0.5, 0.5]])),
    }
    net = Network(variables, [("A", "B")], cpts)
    report = validate_network(net)
    assert [f.variable for f in report.by_kind("disconnected")] == ["C"]


def test_unreachable_config_finding():
    variables = [Variable("A", ("0", "1")), Variable("B", ("0", "1"))]
    cpts = {
        "A": Cpt("A", (), np.array([[1.0, 0.0]])),
        "B": Cpt("B", ("A",), np.array([[0.5, 0.5], [0.5, 0.5]])),
    }
    net = Network(variables, [("A", "B")], cpts)
    report = validate_network(net)
    assert report.by_kind("unreachable-config")


# ---------------------------------------------------------------- shipped models


def test_shipped_models_validate_clean():
    for loader in (load_core_model, load_extended_model, load_autonomy_fragment):
        report = validate_network(loader())
        assert report.ok, report.findings


def test_core_model_edge_set_pinned():
    net = load_core_model()
    pinned = {
        ("cardiovascularDrugs", "hypotension"),
        ("drugsNb", "hypotension"),
        ("hypotension", "fallsNb"),
        ("parkinson", "fallsNb"),
        ("psychotropicDrugs", "difficultyBalance"),
        ("psychotropicDrugs", "drugsNb"),
    }
    assert pinned <= set(net.edges)
    assert len(net.variables) == 13


def test_extended_model_contains_required_edges():
    net = load_extended_model()
    core = set(load_core_model().edges)
    additions = {
        ("hearingPb", "difficultyBalance"),
        ("difficultyBalance", "fallsNb"),
        ("parkinson", "difficultyWalking"),
        ("diabetes", "difficultyBalance"),
        ("strokeTIA", "fallsNb"),
        ("strokeTIA", "difficultyBalance"),
        ("strokeTIA", "difficultyWalking"),
        ("strokeTIA", "muscleImpairment"),
        ("strokeTIA", "autonomyLoss"),
        ("muscleImpairment", "autonomyLoss"),
        ("age", "strokeTIA"),
        ("diabetes", "strokeTIA"),
        ("heartDisease", "strokeTIA"),
        ("fallsNb", "fracture"),
    }
    edges = set(net.edges)
    missing_core = {e for e in core if e not in edges and e[0] in net.names}
    assert core <= edges, core - edges
    assert additions <= edges, additions - edges
    assert not missing_core


def test_extended_model_cardinalities():
    net = load_extended_model()
    cards = sorted(len(v.states) for v in net.variables)
    assert len(net.variables) == 41
    assert cards.count(2) == 32
    assert cards.count(7) == 1
    assert cards.count(10) == 1
    assert sum(1 for c in cards if c in (3, 4)) == 7
