"""Independent brute-force oracles used to check the inference engine.

Everything here works on the dense full joint (chain-rule product expanded
over the whole state grid) and never touches the package's elimination code,
so the two routes stay independent.
"""

from __future__ import annotations

import numpy as np


def full_joint(net) -> np.ndarray:
    """Dense joint tensor with one axis per variable, in declaration order."""
    names = [v.name for v in net.variables]
    cards = [len(v.states) for v in net.variables]
    joint = np.ones([1] * len(names))
    for var in net.variables:
        cpt = net.cpts[var.name]
        scope = list(cpt.parents) + [var.name]
        table = cpt.rows.reshape([cards[names.index(s)] for s in scope])
        missing = [n for n in names if n not in scope]
        expanded = table.reshape(table.shape + (1,) * len(missing))
        order = scope + missing
        perm = [order.index(n) for n in names]
        joint = joint * np.transpose(expanded, perm)
    return joint


def oracle_posterior(net, joint: np.ndarray, evidence: dict[str, str], target: str) -> dict[str, float]:
    names = [v.name for v in net.variables]
    index: list[object] = [slice(None)] * len(names)
    for var, state in evidence.items():
        index[names.index(var)] = net.state_index(var, state)
    sub = joint[tuple(index)]
    remaining = [n for n in names if n not in evidence]
    axis = remaining.index(target)
    dist = sub.sum(axis=tuple(i for i in range(sub.ndim) if i != axis))
    total = dist.sum()
    if total <= 0:
        raise ZeroDivisionError("evidence has zero probability")
    dist = dist / total
    return {state: float(dist[i]) for i, state in enumerate(net.states(target))}


def oracle_evidence_probability(net, joint: np.ndarray, evidence: dict[str, str]) -> float:
    names = [v.name for v in net.variables]
    index: list[object] = [slice(None)] * len(names)
    for var, state in evidence.items():
        index[names.index(var)] = net.state_index(var, state)
    return float(np.sum(joint[tuple(index)]))


def oracle_joint_probability(net, assignment: dict[str, str]) -> float:
    """Chain-rule product computed entry by entry with plain dict lookups."""
    indices = {var: net.state_index(var, state) for var, state in assignment.items()}
    p = 1.0
    for var in net.variables:
        cpt = net.cpts[var.name]
        row = 0
        stride = 1
        for parent in reversed(cpt.parents):
            row += indices[parent] * stride
            stride *= len(net.states(parent))
        p *= float(cpt.rows[row, indices[var.name]])
    return p
