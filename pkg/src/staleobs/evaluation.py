"""Detector evaluation: threshold calibration, contingency counting,
formula translation with two-level comparison, and rank correlation.

AND-OR trees translate into a conjunction of groups, each group holding a
conjunction part (certainly obsolete) and a disjunction part (at least one
obsolete).  Comparison happens in two levels: group counts first, then the
literal sets of each aligned group.  OR-set priorities are compared with
Spearman's rank correlation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from .detection import AndOrTree, is_contradictory
from .network import Network, NetworkError

if TYPE_CHECKING:  # pragma: no cover
    from .recommend import RecommendationTree
    from .scenarios import LabeledScenario


class EvaluationError(NetworkError):
    """Invalid evaluation input."""


Literal = tuple[str, str]


@dataclass(frozen=True)
class FormulaGroup:
    """One group: conjunction literals and disjunction literals."""

    conj: frozenset[Literal] = frozenset()
    disj: frozenset[Literal] = frozenset()

    def __post_init__(self) -> None:
        if not self.conj and not self.disj:
            raise EvaluationError("formula group must not be empty")

    @property
    def literals(self) -> frozenset[Literal]:
        return self.conj | self.disj


@dataclass(frozen=True)
class Formula:
    groups: tuple[FormulaGroup, ...]

    def __post_init__(self) -> None:
        if not self.groups:
            raise EvaluationError("formula needs at least one group")


def tree_to_formula(tree: AndOrTree) -> Formula:
    """One formula group per dependency group: AND child becomes the
    conjunction, OR child the disjunction."""
    groups = []
    for group in tree.groups:
        groups.append(
            FormulaGroup(
                conj=frozenset((o.variable, o.state) for o in group.and_set),
                disj=frozenset((o.variable, o.state) for o in group.or_set),
            )
        )
    return Formula(groups=tuple(groups))


# -- formula text grammar ---------------------------------------------------

_GROUP_RE = re.compile(r"\{([^{}]*)\}")


def dump_formula(formula: Formula) -> str:
    parts = []
    for group in formula.groups:
        bits = []
        if group.conj:
            bits.append("and: " + ", ".join(f"{v}={s}" for v, s in sorted(group.conj)))
        if group.disj:
            bits.append("or: " + ", ".join(f"{v}={s}" for v, s in sorted(group.disj)))
        parts.append("{" + " | ".join(bits) + "}")
    return " ".join(parts)


def parse_formula(text: str) -> Formula:
    groups = []
    chunks = _GROUP_RE.findall(text)
    if not chunks and text.strip():
        raise EvaluationError(f"no groups found in formula {text!r}")
    for chunk in chunks:
        conj: set[Literal] = set()
        disj: set[Literal] = set()
        for part in chunk.split("|"):
            part = part.strip()
            if not part:
                continue
            key, _, body = part.partition(":")
            bucket = {"and": conj, "or": disj}.get(key.strip())
            if bucket is None:
                raise EvaluationError(f"bad formula clause {part!r}")
            for token in body.split(","):
                token = token.strip()
                if not token:
                    continue
                if "=" not in token:
                    raise EvaluationError(f"bad literal {token!r}")
                variable, state = token.split("=", 1)
                bucket.add((variable.strip(), state.strip()))
        groups.append(FormulaGroup(conj=frozenset(conj), disj=frozenset(disj)))
    return Formula(groups=tuple(groups))


# -- two-level comparison ---------------------------------------------------


@dataclass(frozen=True)
class GroupDiff:
    candidate_index: int
    reference_index: int | None
    missing_conj: frozenset[Literal]
    extra_conj: frozenset[Literal]
    missing_disj: frozenset[Literal]
    extra_disj: frozenset[Literal]

    @property
    def clean(self) -> bool:
        return (
            self.reference_index is not None
            and not self.missing_conj
            and not self.extra_conj
            and not self.missing_disj
            and not self.extra_disj
        )


@dataclass(frozen=True)
class FormulaMatchReport:
    candidate_count: int
    reference_count: int
    diffs: tuple[GroupDiff, ...]
    unmatched_reference: tuple[int, ...]

    @property
    def group_count_match(self) -> bool:
        return self.candidate_count == self.reference_count

    @property
    def matches(self) -> bool:
        return (
            self.group_count_match
            and all(diff.clean for diff in self.diffs)
            and not self.unmatched_reference
        )

    def describe(self) -> str:
        if self.matches:
            return "match"
        lines = []
        if not self.group_count_match:
            lines.append(
                f"group count differs: {self.candidate_count} vs {self.reference_count}"
            )
        for diff in self.diffs:
            if diff.reference_index is None:
                lines.append(f"group {diff.candidate_index}: no counterpart")
                continue
            for name, literals in (
                ("missing conj", diff.missing_conj),
                ("extra conj", diff.extra_conj),
                ("missing disj", diff.missing_disj),
                ("extra disj", diff.extra_disj),
            ):
                if literals:
                    body = ", ".join(f"{v}={s}" for v, s in sorted(literals))
                    lines.append(f"group {diff.candidate_index}: {name}: {body}")
        for ref in self.unmatched_reference:
            lines.append(f"reference group {ref}: unmatched")
        return "; ".join(lines)


def compare_formulas(candidate: Formula, reference: Formula) -> FormulaMatchReport:
    """Level 1 compares group counts; level 2 the literal sets of aligned
    groups.  Alignment greedily maximises literal overlap; everything is
    order-insensitive."""
    available = set(range(len(reference.groups)))
    pairs: list[tuple[int, int | None]] = []
    for ci, cg in enumerate(candidate.groups):
        best = None
        best_score = -1
        for ri in sorted(available):
            rg = reference.groups[ri]
            score = len(cg.literals & rg.literals)
            if score > best_score:
                best, best_score = ri, score
        if best is not None and best_score > 0:
            available.discard(best)
            pairs.append((ci, best))
        else:
            pairs.append((ci, None))
    # second pass: if unmatched candidates remain and unmatched references
    # exist, pair them arbitrarily (still reported as diffs)
    leftovers = sorted(available)
    for i, (ci, ri) in enumerate(pairs):
        if ri is None and leftovers:
            pairs[i] = (ci, leftovers.pop(0))
    diffs = []
    for ci, ri in pairs:
        cg = candidate.groups[ci]
        if ri is None:
            diffs.append(
                GroupDiff(ci, None, frozenset(), cg.conj, frozenset(), cg.disj)
            )
            continue
        rg = reference.groups[ri]
        diffs.append(
            GroupDiff(
                candidate_index=ci,
                reference_index=ri,
                missing_conj=rg.conj - cg.conj,
                extra_conj=cg.conj - rg.conj,
                missing_disj=rg.disj - cg.disj,
                extra_disj=cg.disj - rg.disj,
            )
        )
    return FormulaMatchReport(
        candidate_count=len(candidate.groups),
        reference_count=len(reference.groups),
        diffs=tuple(diffs),
        unmatched_reference=tuple(sorted(leftovers)),
    )


# -- contingency and calibration ---------------------------------------------


@dataclass(frozen=True)
class ContingencyTable:
    tp: int = 0
    fn: int = 0
    fp: int = 0
    tn: int = 0

    def __post_init__(self) -> None:
        if min(self.tp, self.fn, self.fp, self.tn) < 0:
            raise EvaluationError("contingency counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    @property
    def tp_rate(self) -> float:
        positives = self.tp + self.fn
        return self.tp / positives if positives else 0.0

    @property
    def fp_rate(self) -> float:
        negatives = self.fp + self.tn
        return self.fp / negatives if negatives else 0.0

    @property
    def youden(self) -> float:
        return self.tp_rate - self.fp_rate

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0


def evaluate(
    net: Network, labeled: Sequence["LabeledScenario"], epsilon: float
) -> ContingencyTable:
    """Contingency of the detector's verdict against the stored labels."""
    if not labeled:
        raise EvaluationError("need at least one labeled scenario")
    tp = fn = fp = tn = 0
    for item in labeled:
        predicted = is_contradictory(
            net,
            item.scenario.prior_observations,
            item.scenario.new_observation,
            epsilon,
        )
        if item.label == 1:
            if predicted:
                tp += 1
            else:
                fn += 1
        else:
            if predicted:
                fp += 1
            else:
                tn += 1
    return ContingencyTable(tp=tp, fn=fn, fp=fp, tn=tn)


def calibrate_threshold(
    net: Network,
    labeled: Sequence["LabeledScenario"],
    grid: Iterable[float],
) -> tuple[float, ContingencyTable]:
    """Pick the grid threshold maximising Youden's index (TP rate minus FP
    rate); ties resolve toward the smaller threshold."""
    candidates = sorted(set(grid), reverse=True)
    if not candidates:
        raise EvaluationError("threshold grid must not be empty")
    labels = {item.label for item in labeled}
    if labels != {0, 1}:
        raise EvaluationError("calibration needs both classes present")
    best: tuple[float, ContingencyTable] | None = None
    for eps in candidates:
        tab = evaluate(net, labeled, eps)
        if best is None or tab.youden >= best[1].youden:
            # >= prefers later (smaller) thresholds on ties
            best = (eps, tab)
    assert best is not None
    return best


# -- rank correlation ---------------------------------------------------------


@dataclass(frozen=True)
class RankAssignment:
    """Ordering labels 1..k over the variables of one OR-set."""

    ranks: Mapping[str, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ranks", dict(self.ranks))
        k = len(self.ranks)
        if sorted(self.ranks.values()) != list(range(1, k + 1)):
            raise EvaluationError(f"ranks must be a permutation of 1..{k}")

    @property
    def k(self) -> int:
        return len(self.ranks)


def spearman(r: RankAssignment, s: RankAssignment) -> float:
    """rho = 1 - 6 * sum(d_j^2) / (k (k^2 - 1)) over the shared variables."""
    if set(r.ranks) != set(s.ranks):
        raise EvaluationError("rank assignments cover different variables")
    k = r.k
    if k < 2:
        raise EvaluationError("need at least two ranked variables")
    d2 = sum((r.ranks[v] - s.ranks[v]) ** 2 for v in r.ranks)
    return 1.0 - (6.0 * d2) / (k * (k * k - 1))


def rank_or_sets(rec_tree: "RecommendationTree") -> list[RankAssignment]:
    """One assignment per OR child; rank 1 is the leftmost (lowest
    posterior) leaf."""
    out = []
    for group in rec_tree.groups:
        if group.or_set:
            out.append(
                RankAssignment(
                    ranks={leaf.variable: i + 1 for i, leaf in enumerate(group.or_set)}
                )
            )
    return out
