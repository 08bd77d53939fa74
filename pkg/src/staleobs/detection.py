"""Detection of obsolete observations that contradict a new certain one.

A stored observation set is epsilon-contradictory to a new observation when
the conditional probability of the new value given the stored values falls at
or below epsilon.  When that happens, the pipeline narrows the stored set to
the variables that still depend on the new one (``restrict``), splits them
into dependency groups and, per group, into members that are certainly
obsolete versus jointly implicated (``decompose``), and assembles the result
into an AND-OR tree (``build_tree``).  ``detect`` runs the whole pipeline.

Group semantics in the tree: every group must be resolved (conjunction over
groups); within a group, all AND leaves are obsolete and at least one OR leaf
is obsolete.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .inference import d_separated, prob_of
from .network import Network, NetworkError

DEFAULT_EPSILON = 1e-2

# decompose enumerates subsets of a group remainder to find the minimal
# jointly-contradictory ones; beyond this size fall back to the coarse
# whole-remainder test to keep runtime bounded.
MAX_CONFLICT_SEARCH = 12


class DetectionError(NetworkError):
    """Invalid input to the detection pipeline."""


@dataclass(frozen=True, order=True)
class Observation:
    variable: str
    state: str
    timestamp: float


@dataclass(frozen=True)
class NewObservation:
    variable: str
    state: str
    timestamp: float


class ObservationSet:
    """Timestamped (variable, state) pairs for one person; at most one entry
    per variable."""

    def __init__(self, entries: Iterable[Observation] | Mapping[str, tuple[str, float]] = ()):
        self._entries: dict[str, Observation] = {}
        if isinstance(entries, Mapping):
            entries = [Observation(v, s, t) for v, (s, t) in entries.items()]
        for obs in entries:
            if obs.variable in self._entries:
                raise DetectionError(f"duplicate observation for variable {obs.variable!r}")
            self._entries[obs.variable] = obs

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[Observation]:
        return iter(sorted(self._entries.values()))

    def __contains__(self, variable: str) -> bool:
        return variable in self._entries

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ObservationSet):
            return NotImplemented
        return self._entries == other._entries

    def __repr__(self) -> str:
        body = ", ".join(f"{o.variable}={o.state}" for o in self)
        return f"ObservationSet({body})"

    def get(self, variable: str) -> Observation | None:
        return self._entries.get(variable)

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(self._entries)

    def evidence(self) -> dict[str, str]:
        """The plain variable -> state view used by inference."""
        return {o.variable: o.state for o in self}

    def with_observation(self, obs: Observation) -> "ObservationSet":
        merged = dict(self._entries)
        merged[obs.variable] = obs
        return ObservationSet(merged.values())

    def without(self, *variables: str) -> "ObservationSet":
        dropped = set(variables)
        return ObservationSet(o for o in self if o.variable not in dropped)

    def subset(self, variables: Iterable[str]) -> "ObservationSet":
        wanted = set(variables)
        return ObservationSet(o for o in self if o.variable in wanted)


@dataclass(frozen=True)
class DependencyGroup:
    """One dependency group: AND members are each individually contradictory
    to the new observation, OR members are implicated only jointly."""

    and_set: tuple[Observation, ...]
    or_set: tuple[Observation, ...]

    def __post_init__(self) -> None:
        if not self.and_set and not self.or_set:
            raise DetectionError("dependency group must not be empty")
        if {o.variable for o in self.and_set} & {o.variable for o in self.or_set}:
            raise DetectionError("AND and OR sets must be disjoint")

    @property
    def leaves(self) -> tuple[Observation, ...]:
        return self.and_set + self.or_set

    def sort_key(self) -> tuple[str, ...]:
        return tuple(sorted(o.variable for o in self.leaves))


@dataclass(frozen=True)
class AndOrTree:
    """AND root over dependency-group nodes, each holding an optional AND
    child and an optional OR child whose leaves are stored observations."""

    groups: tuple[DependencyGroup, ...]

    def __post_init__(self) -> None:
        if not self.groups:
            raise DetectionError("AND-OR tree needs at least one group")
        seen: set[str] = set()
        for group in self.groups:
            for obs in group.leaves:
                if obs.variable in seen:
                    raise DetectionError(
                        f"observation {obs.variable!r} appears under two groups"
                    )
                seen.add(obs.variable)

    @property
    def leaves(self) -> tuple[Observation, ...]:
        return tuple(obs for group in self.groups for obs in group.leaves)

    def leaf_variables(self) -> frozenset[str]:
        return frozenset(o.variable for o in self.leaves)


def _check_new_observation(net: Network, obs_prime: ObservationSet, new_obs: NewObservation) -> None:
    net.check_assignment({new_obs.variable: new_obs.state})
    net.check_assignment(obs_prime.evidence())
    if new_obs.variable in obs_prime:
        raise DetectionError(
            f"new observation variable {new_obs.variable!r} still present in the stored set"
        )


def is_contradictory(
    net: Network,
    obs_prime: ObservationSet,
    new_obs: NewObservation,
    epsilon: float = DEFAULT_EPSILON,
) -> bool:
    """True when P(new observation | stored observations) <= epsilon."""
    if not 0.0 <= epsilon <= 1.0:
        raise DetectionError(f"epsilon must be in [0, 1], got {epsilon}")
    _check_new_observation(net, obs_prime, new_obs)
    p = prob_of(net, obs_prime.evidence(), (new_obs.variable, new_obs.state))
    return p <= epsilon


def restrict(net: Network, obs_prime: ObservationSet, new_obs: NewObservation) -> ObservationSet:
    """Keep exactly the stored observations whose variables are not
    d-separated from the new variable given the remaining stored ones."""
    _check_new_observation(net, obs_prime, new_obs)
    names = obs_prime.variables
    kept = [
        obs
        for obs in obs_prime
        if not d_separated(net, obs.variable, new_obs.variable, names - {obs.variable})
    ]
    return ObservationSet(kept)


def _dependence_cliques(
    net: Network, restricted: ObservationSet, new_obs: NewObservation
) -> list[tuple[str, ...]]:
    """Maximal sets of restricted variables that are pairwise dependent given
    the new observation and the rest of the restricted set.  Overlap between
    groups is allowed (maximal cliques, not components)."""
    names = sorted(restricted.variables)
    if not names:
        return []
    adjacency: dict[str, set[str]] = {n: set() for n in names}
    base = set(names) | {new_obs.variable}
    for x, y in itertools.combinations(names, 2):
        conditioning = base - {x, y}
        if not d_separated(net, x, y, conditioning):
            adjacency[x].add(y)
            adjacency[y].add(x)

    cliques: list[tuple[str, ...]] = []

    def bron_kerbosch(r: set[str], p: set[str], x: set[str]) -> None:
        if not p and not x:
            cliques.append(tuple(sorted(r)))
            return
        pivot_pool = p | x
        pivot = max(pivot_pool, key=lambda v: len(adjacency[v] & p))
        for v in sorted(p - adjacency[pivot]):
            bron_kerbosch(r | {v}, p & adjacency[v], x & adjacency[v])
            p = p - {v}
            x = x | {v}

    bron_kerbosch(set(), set(names), set())
    return sorted(cliques)


def _minimal_conflicts(
    net: Network,
    members: list[Observation],
    new_obs: NewObservation,
    epsilon: float,
) -> list[tuple[Observation, ...]]:
    """Subset-minimal jointly-contradictory subsets of ``members``.

    Members are individually non-contradictory here (the AND test already
    extracted the others), so conflicts have at least two elements.
    """
    if len(members) > MAX_CONFLICT_SEARCH:
        whole = ObservationSet(members)
        if is_contradictory(net, whole, new_obs, epsilon):
            return [tuple(members)]
        return []
    conflicts: list[tuple[Observation, ...]] = []
    for size in range(2, len(members) + 1):
        for combo in itertools.combinations(members, size):
            chosen = set(combo)
            if any(set(found) <= chosen for found in conflicts):
                continue
            if is_contradictory(net, ObservationSet(combo), new_obs, epsilon):
                conflicts.append(combo)
    return conflicts


def decompose(
    net: Network,
    restricted: ObservationSet,
    new_obs: NewObservation,
    epsilon: float = DEFAULT_EPSILON,
) -> list[DependencyGroup]:
    """Split the restricted set into dependency groups with AND/OR members.

    Per group: the AND set holds each member that is individually
    epsilon-contradictory to the new observation; of the remaining members,
    those participating in some minimal jointly-contradictory subset form the
    OR set.  Groups contributing neither are omitted.  A variable shared by
    two groups is emitted as a leaf only once, by the first group in
    deterministic order.
    """
    _check_new_observation(net, restricted, new_obs)
    groups: list[DependencyGroup] = []
    claimed: set[str] = set()
    query = (new_obs.variable, new_obs.state)
    individually: dict[str, bool] = {}
    for obs in restricted:
        p = prob_of(net, {obs.variable: obs.state}, query)
        individually[obs.variable] = p <= epsilon

    for clique in _dependence_cliques(net, restricted, new_obs):
        candidates = [restricted.get(v) for v in clique if v not in claimed]
        candidates = [obs for obs in candidates if obs is not None]
        if not candidates:
            continue
        and_set = tuple(obs for obs in candidates if individually[obs.variable])
        remainder = [obs for obs in candidates if not individually[obs.variable]]
        or_members: set[Observation] = set()
        for conflict in _minimal_conflicts(net, remainder, new_obs, epsilon):
            or_members.update(conflict)
        or_set = tuple(sorted(or_members))
        if not and_set and not or_set:
            continue
        groups.append(DependencyGroup(and_set=tuple(sorted(and_set)), or_set=or_set))
        claimed.update(obs.variable for obs in and_set)
        claimed.update(obs.variable for obs in or_set)
    return groups


def build_tree(groups: Iterable[DependencyGroup]) -> AndOrTree:
    """Assemble groups into the AND-OR tree, ordering groups lexicographically
    by their sorted member variable names."""
    ordered = sorted(groups, key=DependencyGroup.sort_key)
    if not ordered:
        raise DetectionError("cannot build a tree from an empty group list")
    return AndOrTree(groups=tuple(ordered))


def detect(
    net: Network,
    obs: ObservationSet,
    new_obs: NewObservation,
    epsilon: float = DEFAULT_EPSILON,
) -> AndOrTree | None:
    """Full detection pipeline; None when the stored set is consistent.

    After the first restrict/decompose pass the residual stored set (leaves
    removed) is re-checked; while it stays contradictory the pipeline runs
    again on the residual and folds the new groups in.  This enforces the
    completeness contract: observations outside the tree never carry a
    contradiction on their own.
    """
    stored = obs.get(new_obs.variable)
    if stored is not None and stored.state == new_obs.state:
        raise DetectionError(
            f"observation {new_obs.variable!r}={new_obs.state!r} is already stored"
        )
    obs_prime = obs.without(new_obs.variable)
    if not is_contradictory(net, obs_prime, new_obs, epsilon):
        return None

    groups = decompose(net, restrict(net, obs_prime, new_obs), new_obs, epsilon)
    claimed = {o.variable for g in groups for o in g.leaves}
    while True:
        residual = obs_prime.without(*claimed)
        if not len(residual) or not is_contradictory(net, residual, new_obs, epsilon):
            break
        restricted = restrict(net, residual, new_obs)
        extra = decompose(net, restricted, new_obs, epsilon)
        if not extra:
            # Jointly contradictory across group borders with no individually
            # contradictory member: fold the whole dependent residual into
            # one OR group (at least one of them must be obsolete).
            if not len(restricted):
                break
            extra = [DependencyGroup(and_set=(), or_set=tuple(sorted(restricted)))]
        groups.extend(extra)
        claimed.update(o.variable for g in extra for o in g.leaves)

    if not groups:
        return None
    return build_tree(groups)


# The short names the surrounding literature uses for the pipeline.
oida = detect


def render_tree(tree: AndOrTree) -> str:
    """Stable nested text serialisation of an AND-OR tree."""
    lines = ["AND"]
    for group in tree.groups:
        lines.append("  GROUP")
        if group.and_set:
            lines.append("    AND")
            for obs in group.and_set:
                lines.append(f"      leaf {obs.variable} {obs.state} {_ts(obs.timestamp)}")
        if group.or_set:
            lines.append("    OR")
            for obs in group.or_set:
                lines.append(f"      leaf {obs.variable} {obs.state} {_ts(obs.timestamp)}")
    return "\n".join(lines) + "\n"


def _ts(timestamp: float) -> str:
    if float(timestamp).is_integer():
        return str(int(timestamp))
    return f"{timestamp:.6f}"
