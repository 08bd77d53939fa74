"""Model construction tooling: discretization schemes and network linting."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .inference import evidence_probability
from .network import Network, NetworkError, ROW_SUM_TOLERANCE


class DiscretizationError(NetworkError):
    """The requested interval scheme cannot be built from the data."""


@dataclass(frozen=True)
class IntervalScheme:
    """Cut points mapping a continuous variable onto ordered interval labels.

    ``boundaries`` are strictly ascending; the first interval is everything
    up to and including the first boundary, the last interval is open-ended,
    so there is always one more label than boundary.
    """

    variable: str
    boundaries: tuple[float, ...]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if any(b >= c for b, c in zip(self.boundaries, self.boundaries[1:])):
            raise DiscretizationError("boundaries must be strictly ascending")
        if len(self.labels) != len(self.boundaries) + 1:
            raise DiscretizationError("need exactly one label per interval")
        if len(set(self.labels)) != len(self.labels):
            raise DiscretizationError("labels must be unique")

    def interval_index(self, value: float) -> int:
        for i, boundary in enumerate(self.boundaries):
            if value <= boundary:
                return i
        return len(self.boundaries)

    def encode(self, value: float) -> str:
        return self.labels[self.interval_index(value)]


def equal_frequency_discretize(
    values: list[float] | tuple[float, ...],
    bins: int,
    variable: str = "",
    labels: tuple[str, ...] | None = None,
) -> IntervalScheme:
    """Split values into ``bins`` intervals holding as equal counts as
    possible.

    Runs of duplicated values are never split across intervals: candidate cut
    points sit only between distinct values (at their midpoint), and among
    those the placement minimising the squared deviation of interval counts
    from the ideal ``len(values) / bins`` is chosen.  With all-distinct
    values the counts differ by at most one.
    """
    if bins < 2:
        raise DiscretizationError(f"bins must be at least 2, got {bins}")
    if len(values) < bins:
        raise DiscretizationError(f"need at least {bins} values for {bins} bins")
    ordered = sorted(float(v) for v in values)
    distinct: list[float] = []
    counts: list[int] = []
    for v in ordered:
        if distinct and v == distinct[-1]:
            counts[-1] += 1
        else:
            distinct.append(v)
            counts.append(1)
    if len(distinct) < bins:
        raise DiscretizationError(
            f"too few distinct values ({len(distinct)}) for {bins} bins"
        )

    # dynamic programme over cut positions between distinct values,
    # minimising sum((count - n/bins)^2) over the resulting intervals
    n = len(values)
    ideal = n / bins
    prefix = [0]
    for c in counts:
        prefix.append(prefix[-1] + c)

    def segment_cost(i: int, j: int) -> float:
        return (prefix[j] - prefix[i] - ideal) ** 2

    INF = float("inf")
    m = len(distinct)
    cost = [[INF] * (m + 1) for _ in range(bins + 1)]
    back: list[list[int]] = [[-1] * (m + 1) for _ in range(bins + 1)]
    cost[0][0] = 0.0
    for k in range(1, bins + 1):
        for j in range(k, m + 1):
            for i in range(k - 1, j):
                if cost[k - 1][i] == INF:
                    continue
                c = cost[k - 1][i] + segment_cost(i, j)
                if c < cost[k][j]:
                    cost[k][j] = c
                    back[k][j] = i
    if cost[bins][m] == INF:
        raise DiscretizationError("no feasible cut placement")
    cuts_idx: list[int] = []
    j = m
    for k in range(bins, 0, -1):
        i = back[k][j]
        if k > 1:
            cuts_idx.append(i)
        j = i
    cuts_idx.reverse()
    boundaries = tuple((distinct[i - 1] + distinct[i]) / 2.0 for i in cuts_idx)
    if labels is None:
        labels = tuple(f"bin{i + 1}" for i in range(bins))
    return IntervalScheme(variable=variable, boundaries=boundaries, labels=labels)


def dump_scheme(scheme: IntervalScheme) -> str:
    """Sidecar text format: variable, cut points, labels."""
    lines = [
        f"scheme {scheme.variable}",
        "cuts " + " ".join(f"{b:.10g}" for b in scheme.boundaries),
        "labels " + " ".join(scheme.labels),
    ]
    return "\n".join(lines) + "\n"


def load_scheme(text: str) -> IntervalScheme:
    variable = ""
    boundaries: tuple[float, ...] = ()
    labels: tuple[str, ...] = ()
    for line in text.splitlines():
        tokens = line.split()
        if not tokens:
            continue
        if tokens[0] == "scheme":
            variable = tokens[1] if len(tokens) > 1 else ""
        elif tokens[0] == "cuts":
            boundaries = tuple(float(t) for t in tokens[1:])
        elif tokens[0] == "labels":
            labels = tuple(tokens[1:])
    return IntervalScheme(variable=variable, boundaries=boundaries, labels=labels)


@dataclass(frozen=True)
class Finding:
    kind: str
    variable: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.findings

    def by_kind(self, kind: str) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.kind == kind)


def validate_network(net: Network) -> ValidationReport:
    """Collect findings instead of raising; never mutates the network.

    Per variable: row-sum drift beyond the strict tolerance, entries clamped
    at load time, parent configurations with zero probability of occurring.
    Graph level: cycles and variables disconnected from every edge.
    """
    findings: list[Finding] = []
    cyclic = False
    try:
        net.topological_order()
    except NetworkError as exc:
        findings.append(Finding("cycle", "", str(exc)))
        cyclic = True

    touched = {name for edge in net.edges for name in edge}
    if len(net.variables) > 1:
        for var in net.variables:
            if var.name not in touched:
                findings.append(Finding("disconnected", var.name, "no incident edges"))

    for var in net.variables:
        cpt = net.cpts.get(var.name)
        if cpt is None:
            findings.append(Finding("missing-cpt", var.name, "no CPT"))
            continue
        drift = np.abs(cpt.rows.sum(axis=1) - 1.0)
        worst = float(drift.max(initial=0.0))
        if worst > ROW_SUM_TOLERANCE:
            findings.append(
                Finding("row-sum", var.name, f"worst row drift {worst:.3g}")
            )
        if cpt.clamped_entries:
            findings.append(
                Finding("clamped", var.name, f"{cpt.clamped_entries} entries clamped")
            )
        if not cyclic and cpt.parents:
            for config in _unreachable_configs(net, var.name):
                findings.append(
                    Finding("unreachable-config", var.name, f"parents {config}")
                )
    return ValidationReport(findings=tuple(findings))


def _unreachable_configs(net: Network, name: str) -> list[dict[str, str]]:
    """Parent configurations with exactly zero probability; only possible on
    unclamped tables that contain hard zeros."""
    parents = net.parents(name)
    if all(net.cpts[a].rows.min() > 0.0 for a in net.ancestors(parents)):
        return []
    out: list[dict[str, str]] = []
    for states in itertools.product(*(net.states(p) for p in parents)):
        config = dict(zip(parents, states))
        try:
            if evidence_probability(net, config) == 0.0:
                out.append(config)
        except NetworkError:
            continue
    return out
