"""Discrete causal Bayesian networks: domain types, validation and text format.

A network couples a directed acyclic graph over named discrete variables with
one conditional probability table (CPT) per variable.  CPT rows are stored
row-major over parent-state configurations in parent-list order, i.e. the
last parent in the list varies fastest (C order, as in
``numpy.ravel_multi_index``).

The on-disk representation is a line-oriented UTF-8 document::

    bn 1
    # comment
    var sex female male | biological sex
    var fallsNb none one_two three_four five_plus
    edge sex fallsNb
    cpt sex
    0.725 0.275
    cpt fallsNb | sex
    0.20 0.39 0.20 0.21
    0.19 0.40 0.20 0.21

Probabilities are written with at least six significant digits.  Rows whose
sum drifts from 1 by more than ``PARSE_ROW_SUM_TOLERANCE`` are rejected;
smaller drift (e.g. from rounding on write) is renormalised on load.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

FORMAT_NAME = "bn"
FORMAT_VERSION = 1

DEFAULT_CLAMP_FLOOR = 1e-4
ROW_SUM_TOLERANCE = 1e-9
PARSE_ROW_SUM_TOLERANCE = 1e-6


class NetworkError(Exception):
    """Base class for all network construction and query errors."""


class NetworkFormatError(NetworkError):
    """The document does not conform to the network text format."""


class NetworkValidationError(NetworkError):
    """A structural or numerical invariant of the network is violated."""


class UnknownVariableError(NetworkError):
    """A query referenced a variable name absent from the network."""


class UnknownStateError(NetworkError):
    """A query referenced a state label absent from its variable's domain."""


@dataclass(frozen=True)
class Variable:
    """A discrete random variable with an ordered domain of state labels."""

    name: str
    states: tuple[str, ...]
    description: str = ""

    def __post_init__(self) -> None:
        if len(self.states) < 2:
            raise NetworkValidationError(
                f"variable {self.name!r} needs at least 2 states, got {len(self.states)}"
            )
        if len(set(self.states)) != len(self.states):
            raise NetworkValidationError(f"variable {self.name!r} has duplicate state labels")

    def state_index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise UnknownStateError(
                f"variable {self.name!r} has no state {state!r} (states: {list(self.states)})"
            ) from None


@dataclass(frozen=True)
class Cpt:
    """Conditional probability table: one row per parent configuration.

    ``rows`` has shape ``(prod(parent cardinalities), |owner states|)``.
    ``clamped_entries`` records how many entries were raised to the clamp
    floor when the table was loaded (0 for tables built directly).
    """

    owner: str
    parents: tuple[str, ...]
    rows: np.ndarray
    clamped_entries: int = 0

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=float)
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        if rows.ndim != 2:
            raise NetworkValidationError(f"CPT for {self.owner!r} must be 2-dimensional")


# Evidence: a partial assignment, at most one state per variable.
Evidence = Mapping[str, str]


class Network:
    """An immutable causal Bayesian network over discrete variables.

    Build instances with :func:`Network.from_parts` (validating, optionally
    clamping) or :func:`load_network`.  The raw constructor performs no
    checks so that tooling such as :func:`staleobs.modeltools.validate_network`
    can inspect deliberately broken instances.
    """

    def __init__(
        self,
        variables: Sequence[Variable],
        edges: Sequence[tuple[str, str]],
        cpts: Mapping[str, Cpt],
    ) -> None:
        self.variables: tuple[Variable, ...] = tuple(variables)
        self.edges: tuple[tuple[str, str], ...] = tuple((p, c) for p, c in edges)
        self.cpts: dict[str, Cpt] = dict(cpts)
        self._by_name: dict[str, Variable] = {v.name: v for v in self.variables}
        self._parents: dict[str, tuple[str, ...]] = {
            name: cpt.parents for name, cpt in self.cpts.items()
        }
        children: dict[str, list[str]] = {v.name: [] for v in self.variables}
        for parent, child in self.edges:
            if parent in children:
                children[parent].append(child)
        self._children: dict[str, tuple[str, ...]] = {
            name: tuple(kids) for name, kids in children.items()
        }

    # -- lookups ---------------------------------------------------------

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def variable(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {name!r}") from None

    def states(self, name: str) -> tuple[str, ...]:
        return self.variable(name).states

    def cardinality(self, name: str) -> int:
        return len(self.variable(name).states)

    def parents(self, name: str) -> tuple[str, ...]:
        self.variable(name)
        return self._parents.get(name, ())

    def children(self, name: str) -> tuple[str, ...]:
        self.variable(name)
        return self._children.get(name, ())

    def state_index(self, name: str, state: str) -> int:
        return self.variable(name).state_index(state)

    def check_assignment(self, evidence: Evidence) -> None:
        """Raise if any (variable, state) pair is not part of this network."""
        for name, state in evidence.items():
            self.variable(name).state_index(state)

    # -- structure -------------------------------------------------------

    def topological_order(self) -> tuple[str, ...]:
        """Kahn's algorithm; raises naming a variable on any cycle."""
        indegree = {v.name: 0 for v in self.variables}
        for _, child in self.edges:
            if child in indegree:
                indegree[child] += 1
        ready = sorted(name for name, deg in indegree.items() if deg == 0)
        order: list[str] = []
        while ready:
            name = ready.pop(0)
            order.append(name)
            for child in self._children.get(name, ()):
                indegree[child] -= 1
                if indegree[child] == 0:
                    # sorted insertion keeps the order deterministic
                    bisect.insort(ready, child)
        if len(order) != len(self.variables):
            stuck = sorted(name for name, deg in indegree.items() if deg > 0)
            raise NetworkValidationError(f"cycle involving variable {stuck[0]!r}")
        return tuple(order)

    def ancestors(self, names: Iterable[str]) -> set[str]:
        """All ancestors of ``names``, including the names themselves."""
        seen: set[str] = set()
        stack = [self.variable(n).name for n in names]
        while stack:
            name = stack.pop()
            if name in seen:
                continue
            seen.add(name)
            stack.extend(self.parents(name))
        return seen

    # -- validation ------------------------------------------------------

    def validate(self) -> None:
        """Enforce every structural and numerical invariant, raising on the
        first violation with the offending variable named."""
        if len({v.name for v in self.variables}) != len(self.variables):
            raise NetworkValidationError("duplicate variable names")
        for parent, child in self.edges:
            self.variable(parent)
            self.variable(child)
        if set(self.cpts) != {v.name for v in self.variables}:
            missing = {v.name for v in self.variables} - set(self.cpts)
            extra = set(self.cpts) - {v.name for v in self.variables}
            problem = (missing or extra).pop()
            raise NetworkValidationError(f"exactly one CPT per variable required; check {problem!r}")
        incoming: dict[str, set[str]] = {v.name: set() for v in self.variables}
        for parent, child in self.edges:
            if parent in incoming[child]:
                raise NetworkValidationError(f"duplicate edge {parent!r} -> {child!r}")
            incoming[child].add(parent)
        for var in self.variables:
            cpt = self.cpts[var.name]
            if cpt.owner != var.name:
                raise NetworkValidationError(f"CPT owner mismatch for {var.name!r}")
            if set(cpt.parents) != incoming[var.name] or len(cpt.parents) != len(incoming[var.name]):
                raise NetworkValidationError(
                    f"CPT parents for {var.name!r} do not match incoming edges"
                )
            expected_rows = 1
            for parent in cpt.parents:
                expected_rows *= self.cardinality(parent)
            if cpt.rows.shape != (expected_rows, len(var.states)):
                raise NetworkValidationError(
                    f"CPT for {var.name!r} has shape {cpt.rows.shape}, "
                    f"expected {(expected_rows, len(var.states))}"
                )
            if not np.all(cpt.rows > 0.0):
                raise NetworkValidationError(f"CPT for {var.name!r} has a non-positive entry")
            drift = np.abs(cpt.rows.sum(axis=1) - 1.0)
            if drift.max(initial=0.0) > ROW_SUM_TOLERANCE:
                raise NetworkValidationError(
                    f"row sum violation in CPT for {var.name!r} "
                    f"(worst drift {drift.max():.3g})"
                )
        self.topological_order()

    @staticmethod
    def from_parts(
        variables: Sequence[Variable],
        edges: Sequence[tuple[str, str]],
        cpts: Mapping[str, Cpt],
        clamp_floor: float | None = None,
    ) -> "Network":
        """Validating constructor; applies zero-probability clamping first
        when ``clamp_floor`` is given."""
        if clamp_floor is not None:
            cpts = {name: clamp_cpt(cpt, clamp_floor) for name, cpt in cpts.items()}
        net = Network(variables, edges, cpts)
        net.validate()
        return net

    def parent_config_index(self, name: str, assignment: Mapping[str, int]) -> int:
        """Row index for ``name``'s CPT given parent state indices."""
        parents = self.parents(name)
        if not parents:
            return 0
        idx = tuple(assignment[p] for p in parents)
        cards = tuple(self.cardinality(p) for p in parents)
        return int(np.ravel_multi_index(idx, cards))


def clamp_cpt(cpt: Cpt, floor: float = DEFAULT_CLAMP_FLOOR) -> Cpt:
    """Raise every entry below ``floor`` to ``floor`` and renormalise rows.

    Reflects the position that almost no probability in an uncertain world
    is exactly zero; keeps every full assignment strictly possible.
    """
    if floor <= 0 or floor >= 0.5:
        raise ValueError(f"clamp floor must be in (0, 0.5), got {floor}")
    rows = np.array(cpt.rows, dtype=float)
    below = rows < floor
    count = int(below.sum())
    if count:
        rows[below] = floor
    rows /= rows.sum(axis=1, keepdims=True)
    return Cpt(cpt.owner, cpt.parents, rows, clamped_entries=cpt.clamped_entries + count)


# -- text format -----------------------------------------------------------


def load_network(document: str, clamp_floor: float = DEFAULT_CLAMP_FLOOR) -> Network:
    """Parse the text format into a validated, clamped :class:`Network`.

    Raises :class:`NetworkFormatError` for malformed documents and
    :class:`NetworkValidationError` for cycles, row-sum violations and
    cardinality mismatches; messages name the offending variable.
    """
    variables: list[Variable] = []
    edges: list[tuple[str, str]] = []
    cpt_specs: list[tuple[str, tuple[str, ...], list[list[float]]]] = []
    current: tuple[str, tuple[str, ...], list[list[float]]] | None = None
    header_seen = False

    for lineno, raw in enumerate(document.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if not header_seen:
            if tokens[0] != FORMAT_NAME or len(tokens) != 2:
                raise NetworkFormatError(f"line {lineno}: expected header '{FORMAT_NAME} <version>'")
            if tokens[1] != str(FORMAT_VERSION):
                raise NetworkFormatError(f"line {lineno}: unsupported format version {tokens[1]!r}")
            header_seen = True
            continue
        if tokens[0] == "var":
            body = line[len("var") :].strip()
            description = ""
            if "|" in body:
                body, description = (part.strip() for part in body.split("|", 1))
            parts = body.split()
            if len(parts) < 3:
                raise NetworkFormatError(f"line {lineno}: var needs a name and at least 2 states")
            variables.append(Variable(parts[0], tuple(parts[1:]), description))
            current = None
        elif tokens[0] == "edge":
            if len(tokens) != 3:
                raise NetworkFormatError(f"line {lineno}: edge needs exactly 2 names")
            edges.append((tokens[1], tokens[2]))
            current = None
        elif tokens[0] == "cpt":
            body = line[len("cpt") :].strip()
            if "|" in body:
                owner_part, parent_part = body.split("|", 1)
                owner = owner_part.strip()
                parents = tuple(parent_part.split())
            else:
                owner = body
                parents = ()
            if not owner:
                raise NetworkFormatError(f"line {lineno}: cpt needs an owner variable")
            current = (owner, parents, [])
            cpt_specs.append(current)
        else:
            if current is None:
                raise NetworkFormatError(f"line {lineno}: unexpected content {line!r}")
            try:
                row = [float(tok) for tok in tokens]
            except ValueError:
                raise NetworkFormatError(f"line {lineno}: bad probability in CPT row") from None
            current[2].append(row)

    if not header_seen:
        raise NetworkFormatError("empty document: missing header")

    by_name = {v.name: v for v in variables}
    cpts: dict[str, Cpt] = {}
    for owner, parents, rows in cpt_specs:
        if owner not in by_name:
            raise NetworkFormatError(f"CPT for unknown variable {owner!r}")
        if owner in cpts:
            raise NetworkFormatError(f"duplicate CPT for {owner!r}")
        if not rows:
            raise NetworkFormatError(f"CPT for {owner!r} has no rows")
        width = len(by_name[owner].states)
        table = np.zeros((len(rows), width), dtype=float)
        for i, row in enumerate(rows):
            if len(row) != width:
                raise NetworkValidationError(
                    f"CPT row for {owner!r} has {len(row)} entries, expected {width}"
                )
            total = sum(row)
            if abs(total - 1.0) > PARSE_ROW_SUM_TOLERANCE:
                raise NetworkValidationError(
                    f"row sum violation in CPT for {owner!r}: row {i} sums to {total:.6g}"
                )
            if min(row) < 0.0:
                raise NetworkValidationError(f"negative probability in CPT for {owner!r}")
            table[i] = np.asarray(row) / total
        cpts[owner] = Cpt(owner, parents, table)

    return Network.from_parts(variables, edges, cpts, clamp_floor=clamp_floor)


def dump_network(net: Network, header_comment: str = "") -> str:
    """Serialise a network to the text format (round-trips via
    :func:`load_network` up to clamping)."""
    lines: list[str] = []
    if header_comment:
        for comment_line in header_comment.splitlines():
            lines.append(f"# {comment_line}".rstrip())
    lines.append(f"{FORMAT_NAME} {FORMAT_VERSION}")
    lines.append("")
    for var in net.variables:
        decl = f"var {var.name} " + " ".join(var.states)
        if var.description:
            decl += f" | {var.description}"
        lines.append(decl)
    lines.append("")
    for parent, child in net.edges:
        lines.append(f"edge {parent} {child}")
    lines.append("")
    for var in net.variables:
        cpt = net.cpts[var.name]
        if cpt.parents:
            lines.append(f"cpt {var.name} | " + " ".join(cpt.parents))
        else:
            lines.append(f"cpt {var.name}")
        for row in cpt.rows:
            lines.append(" ".join(f"{p:.10g}" for p in row))
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"
