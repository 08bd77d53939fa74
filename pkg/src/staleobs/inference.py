"""Exact inference on discrete Bayesian networks.

Queries run variable elimination with a min-fill elimination ordering over
the relevant subgraph (ancestors of query and evidence variables).  This is
exact, no sampling is involved anywhere.  Intermediate factors are rescaled
by their maximum and the scale accumulated in log space, so long products of
small conditionals do not underflow; public results are linear-space
probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .network import Evidence, Network, NetworkError, UnknownVariableError


class InferenceError(NetworkError):
    """Base class for query-time failures."""


class ImpossibleEvidenceError(InferenceError):
    """The supplied evidence has probability zero under the network.

    On a clamped network this cannot occur and usually signals a model bug
    (for example a CPT built with exact zeros and no clamping applied).
    """


@dataclass
class _Factor:
    """A nonnegative table over a tuple of variable names, one axis each,
    plus a log-space scale so values can stay near 1."""

    names: tuple[str, ...]
    table: np.ndarray
    log_scale: float = 0.0

    def rescaled(self) -> "_Factor":
        peak = float(self.table.max(initial=0.0))
        if peak <= 0.0:
            return self
        return _Factor(self.names, self.table / peak, self.log_scale + math.log(peak))


def _cpt_factor(net: Network, name: str, evidence: dict[str, int]) -> _Factor:
    """The CPT of ``name`` as a factor, with evidence axes sliced away."""
    cpt = net.cpts[name]
    scope = cpt.parents + (name,)
    shape = tuple(net.cardinality(v) for v in scope)
    table = cpt.rows.reshape(shape)
    keep: list[str] = []
    index: list[object] = []
    for var in scope:
        if var in evidence:
            index.append(evidence[var])
        else:
            index.append(slice(None))
            keep.append(var)
    selected = np.asarray(table[tuple(index)], dtype=float)
    return _Factor(tuple(keep), selected)


def _multiply(a: _Factor, b: _Factor) -> _Factor:
    names = a.names + tuple(n for n in b.names if n not in a.names)
    a_shape = a.table.shape + (1,) * (len(names) - len(a.names))
    b_axes = tuple(b.names.index(n) if n in b.names else None for n in names)
    b_view = np.moveaxis(
        b.table.reshape(b.table.shape + (1,) * (len(names) - len(b.names))),
        [b.names.index(n) for n in names if n in b.names],
        [i for i, n in enumerate(names) if n in b.names],
    )
    del b_axes
    return _Factor(names, a.table.reshape(a_shape) * b_view, a.log_scale + b.log_scale)


def _sum_out(factor: _Factor, name: str) -> _Factor:
    axis = factor.names.index(name)
    names = factor.names[:axis] + factor.names[axis + 1 :]
    return _Factor(names, factor.table.sum(axis=axis), factor.log_scale)


def _min_fill_order(scopes: list[tuple[str, ...]], eliminate: set[str]) -> list[str]:
    """Greedy min-fill ordering on the interaction graph of the scopes."""
    neighbours: dict[str, set[str]] = {}
    for scope in scopes:
        for v in scope:
            neighbours.setdefault(v, set()).update(u for u in scope if u != v)
    order: list[str] = []
    remaining = {v for v in eliminate if v in neighbours}
    while remaining:
        best = None
        best_fill = None
        for v in sorted(remaining):
            around = [u for u in neighbours[v] if u != v]
            fill = 0
            for i, u in enumerate(around):
                for w in around[i + 1 :]:
                    if w not in neighbours[u]:
                        fill += 1
            if best_fill is None or fill < best_fill:
                best, best_fill = v, fill
        assert best is not None
        order.append(best)
        around = [u for u in neighbours[best] if u != best]
        for i, u in enumerate(around):
            for w in around[i + 1 :]:
                neighbours[u].add(w)
                neighbours[w].add(u)
        for u in around:
            neighbours[u].discard(best)
        del neighbours[best]
        remaining.discard(best)
    order.extend(sorted(v for v in eliminate if v not in order))
    return order


def _eliminate(
    net: Network, evidence: dict[str, int], keep: tuple[str, ...]
) -> _Factor:
    """Run variable elimination keeping ``keep`` uneliminated; the result is
    proportional to P(keep, evidence) with the constant in ``log_scale``."""
    relevant = net.ancestors(set(keep) | set(evidence))
    factors = [_cpt_factor(net, name, evidence) for name in sorted(relevant)]
    factors = [f for f in factors if f.names or f.table.size]
    scopes = [f.names for f in factors]
    eliminate = {n for scope in scopes for n in scope} - set(keep)
    for name in _min_fill_order(scopes, eliminate):
        bucket = [f for f in factors if name in f.names]
        rest = [f for f in factors if name not in f.names]
        if not bucket:
            continue
        product = bucket[0]
        for other in bucket[1:]:
            product = _multiply(product, other)
        factors = rest + [_sum_out(product, name).rescaled()]
    result = _Factor((), np.ones(()))
    for f in factors:
        result = _multiply(result, f)
    # axis order must match the requested keep order
    if result.names != tuple(keep):
        missing = [n for n in keep if n not in result.names]
        for n in missing:
            result = _multiply(result, _Factor((n,), np.ones(net.cardinality(n))))
        perm = [result.names.index(n) for n in keep]
        result = _Factor(tuple(keep), np.transpose(result.table, perm), result.log_scale)
    return result


def _index_evidence(net: Network, evidence: Evidence) -> dict[str, int]:
    indexed: dict[str, int] = {}
    for name, state in evidence.items():
        indexed[net.variable(name).name] = net.state_index(name, state)
    return indexed


def joint_probability(net: Network, assignment: Evidence) -> float:
    """Probability of a full assignment, the product of one CPT entry per
    variable; computed in log space."""
    indexed = _index_evidence(net, assignment)
    if len(indexed) != len(net.variables):
        missing = sorted(set(net.names) - set(indexed))
        raise InferenceError(f"assignment must cover every variable; missing {missing}")
    log_p = 0.0
    for var in net.variables:
        row = net.cpts[var.name].rows[net.parent_config_index(var.name, indexed)]
        p = float(row[indexed[var.name]])
        if p <= 0.0:
            return 0.0
        log_p += math.log(p)
    return math.exp(log_p)


def posterior(net: Network, evidence: Evidence, target: str) -> dict[str, float]:
    """Exact posterior distribution P(target | evidence), normalised.

    Raises :class:`ImpossibleEvidenceError` when the evidence has zero
    probability and :class:`InferenceError` when the target is observed.
    """
    target_var = net.variable(target)
    indexed = _index_evidence(net, evidence)
    if target_var.name in indexed:
        raise InferenceError(f"target {target!r} is already observed")
    factor = _eliminate(net, indexed, (target_var.name,))
    mass = float(factor.table.sum())
    if mass <= 0.0:
        raise ImpossibleEvidenceError(f"evidence has zero probability: {dict(evidence)!r}")
    dist = factor.table / mass
    return {state: float(dist[i]) for i, state in enumerate(target_var.states)}


def prob_of(net: Network, evidence: Evidence, query: tuple[str, str]) -> float:
    """Scalar P(query variable = query state | evidence)."""
    variable, state = query
    return posterior(net, evidence, variable)[state]


def evidence_probability(net: Network, evidence: Evidence) -> float:
    """Marginal probability of an evidence assignment, P(evidence)."""
    indexed = _index_evidence(net, evidence)
    if not indexed:
        return 1.0
    factor = _eliminate(net, indexed, ())
    return float(factor.table.reshape(())) * math.exp(factor.log_scale)


def d_separated(net: Network, a: str, b: str, given: set[str] | frozenset[str] | Evidence = ()) -> bool:
    """Whether ``a`` and ``b`` are d-separated given the conditioning set.

    Standard semantics: every undirected path between ``a`` and ``b`` must be
    blocked, where chains and forks block on observed middles and colliders
    block unless the collider or one of its descendants is observed.
    Implemented as reachability over directed traversal states.
    """
    a_name = net.variable(a).name
    b_name = net.variable(b).name
    given_names = {net.variable(g).name for g in given}
    if a_name == b_name:
        raise InferenceError("d-separation needs two distinct variables")
    if a_name in given_names or b_name in given_names:
        raise InferenceError("query variables must not be in the conditioning set")

    observed_or_above = net.ancestors(given_names) if given_names else set()

    # states: (node, arrived_from_child?)  True when the previous hop moved
    # against an edge (child -> parent), False when it moved parent -> child.
    start = [(a_name, False), (a_name, True)]
    seen: set[tuple[str, bool]] = set()
    stack = list(start)
    while stack:
        node, from_child = stack.pop()
        if (node, from_child) in seen:
            continue
        seen.add((node, from_child))
        if node == b_name and node not in given_names:
            return False
        if from_child:
            # trail arrives from a child: may continue to parents and children
            if node not in given_names:
                for parent in net.parents(node):
                    stack.append((parent, True))
                for child in net.children(node):
                    stack.append((child, False))
        else:
            # trail arrives from a parent: chain to children unless observed,
            # bounce to parents only if the collider is (an ancestor of) evidence
            if node not in given_names:
                for child in net.children(node):
                    stack.append((child, False))
            if node in observed_or_above:
                for parent in net.parents(node):
                    stack.append((parent, True))
    return True
