"""Recommendations for resolving a detected contradiction.

Annotates the AND-OR tree produced by detection: every leaf receives the most
likely replacement value for its variable given only the new observation, OR
leaves additionally receive their posterior probability given the new
observation and are ordered ascending by it, so the least plausible stored
values are examined first.  Also provides on-demand prediction of missing
attributes from a full stored record.
"""

from __future__ import annotations

from dataclasses import dataclass

from .detection import AndOrTree, DetectionError, NewObservation, ObservationSet
from .inference import posterior
from .network import Network


@dataclass(frozen=True)
class RecommendationLeaf:
    """One annotated tree leaf.

    ``posterior`` is P(old value | new observation) and present for OR leaves
    only; ``proposed_state`` maximises P(state | new observation) with
    probability ``proposed_prob``; ``timestamp`` is the acquisition time of
    the stored observation.
    """

    variable: str
    old_state: str
    proposed_state: str
    proposed_prob: float
    posterior: float | None = None
    timestamp: float = 0.0


@dataclass(frozen=True)
class RecommendationGroup:
    and_set: tuple[RecommendationLeaf, ...]
    or_set: tuple[RecommendationLeaf, ...]

    @property
    def leaves(self) -> tuple[RecommendationLeaf, ...]:
        return self.and_set + self.or_set


@dataclass(frozen=True)
class RecommendationTree:
    """Same shape as the detection tree; OR children sorted ascending by
    posterior, ties broken by older timestamp then variable name."""

    groups: tuple[RecommendationGroup, ...]

    @property
    def leaves(self) -> tuple[RecommendationLeaf, ...]:
        return tuple(leaf for group in self.groups for leaf in group.leaves)


@dataclass(frozen=True)
class Prediction:
    variable: str
    state: str
    confidence: float


def posterior_proba(net: Network, x: tuple[str, str], new_obs: NewObservation) -> float:
    """P(x | new observation): the posterior of one stored value given only
    the newly acquired one."""
    variable, state = x
    if net.variable(variable).name == new_obs.variable:
        raise DetectionError("cannot score the new observation against itself")
    dist = posterior(net, {new_obs.variable: new_obs.state}, variable)
    return dist[state]


def most_likely_value(target: str, net: Network, new_obs: NewObservation) -> tuple[str, float]:
    """The state of ``target`` maximising P(state | new observation), with its
    probability.  Ties resolve to the lowest state index.  Cost is linear in
    the number of states of ``target``."""
    if net.variable(target).name == new_obs.variable:
        raise DetectionError("cannot propose a replacement for the new observation itself")
    dist = posterior(net, {new_obs.variable: new_obs.state}, target)
    best_state = None
    best_p = -1.0
    for state in net.states(target):
        if dist[state] > best_p:
            best_state, best_p = state, dist[state]
    assert best_state is not None
    return best_state, best_p


def recommend(net: Network, tree: AndOrTree, new_obs: NewObservation) -> RecommendationTree:
    """Annotate and order a detection tree.

    Runtime is linear in the number of groups times members times states:
    one posterior per OR leaf and one replacement query per leaf.
    """
    for obs in tree.leaves:
        if obs.variable == new_obs.variable:
            raise DetectionError(
                f"tree leaf {obs.variable!r} clashes with the new observation variable"
            )
    groups: list[RecommendationGroup] = []
    for group in tree.groups:
        and_leaves = []
        for obs in group.and_set:
            proposed, p_proposed = most_likely_value(obs.variable, net, new_obs)
            and_leaves.append(
                RecommendationLeaf(
                    variable=obs.variable,
                    old_state=obs.state,
                    proposed_state=proposed,
                    proposed_prob=p_proposed,
                    timestamp=obs.timestamp,
                )
            )
        or_leaves = []
        for obs in group.or_set:
            p_x = posterior_proba(net, (obs.variable, obs.state), new_obs)
            proposed, p_proposed = most_likely_value(obs.variable, net, new_obs)
            or_leaves.append(
                RecommendationLeaf(
                    variable=obs.variable,
                    old_state=obs.state,
                    proposed_state=proposed,
                    proposed_prob=p_proposed,
                    posterior=p_x,
                    timestamp=obs.timestamp,
                )
            )
        or_leaves.sort(key=lambda leaf: (leaf.posterior, leaf.timestamp, leaf.variable))
        groups.append(RecommendationGroup(and_set=tuple(and_leaves), or_set=tuple(or_leaves)))
    return RecommendationTree(groups=tuple(groups))


# Established short name for the recommendation algorithm.
oora = recommend


def predict(net: Network, obs: ObservationSet, target: str) -> Prediction:
    """Most likely value of an unobserved attribute given the whole stored
    record, with the posterior probability as confidence."""
    target_name = net.variable(target).name
    if target_name in obs:
        raise DetectionError(f"target {target!r} is already observed")
    dist = posterior(net, obs.evidence(), target_name)
    best_state = None
    best_p = -1.0
    for state in net.states(target_name):
        if dist[state] > best_p:
            best_state, best_p = state, dist[state]
    assert best_state is not None
    return Prediction(variable=target_name, state=best_state, confidence=best_p)


def render_recommendation_tree(tree: RecommendationTree) -> str:
    """Detection-tree text format extended with per-leaf annotations; decimal
    values carry four significant digits."""
    lines = ["AND"]
    for group in tree.groups:
        lines.append("  GROUP")
        if group.and_set:
            lines.append("    AND")
            for leaf in group.and_set:
                lines.append(
                    f"      leaf {leaf.variable} {leaf.old_state} {_ts(leaf.timestamp)}"
                    f" -> {leaf.proposed_state} {leaf.proposed_prob:.4g}"
                )
        if group.or_set:
            lines.append("    OR")
            for leaf in group.or_set:
                lines.append(
                    f"      leaf {leaf.variable} {leaf.old_state} {_ts(leaf.timestamp)}"
                    f" p_x={leaf.posterior:.4g}"
                    f" -> {leaf.proposed_state} {leaf.proposed_prob:.4g}"
                )
    return "\n".join(lines) + "\n"


def _ts(timestamp: float) -> str:
    if float(timestamp).is_integer():
        return str(int(timestamp))
    return f"{timestamp:.6f}"
