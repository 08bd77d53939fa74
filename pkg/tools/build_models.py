#!/usr/bin/env python3
"""Regenerate the shipped fall-prevention network files.

Builds the three example models, checks every behaviour the test suite pins
(restriction drops, group splits, AND/OR memberships, recommendation order,
formula shapes, probability ceilings), and writes them under
src/staleobs/models/data/.  Parameters are illustrative, tuned to make the
worked examples behave as documented; they are not clinical estimates.
"""

from __future__ import annotations

import itertools
import sys
from pathlib import Path

import numpy as np

from staleobs.detection import NewObservation, Observation, ObservationSet, decompose, detect, is_contradictory, restrict
from staleobs.inference import posterior, prob_of
from staleobs.network import Cpt, Network, Variable, dump_network
from staleobs.recommend import recommend

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "staleobs" / "models" / "data"

EPS = 1e-2

YN = ("no", "yes")
FREQ = ("never", "under_weekly", "weekly")


def configs(net_states: list[tuple[str, ...]]):
    return itertools.product(*(range(len(s)) for s in net_states))


def noisy_or_rows(parent_states: list[tuple[str, ...]], leak: float, strengths: list[list[float]]):
    """P(yes | config) = 1 - (1-leak) * prod(1 - strength[parent][state])."""
    rows = []
    for combo in configs(parent_states):
        q = 1.0 - leak
        for pi, si in enumerate(combo):
            q *= 1.0 - strengths[pi][si]
        rows.append([q, 1.0 - q])
    return np.array(rows)


def mixture_rows(parent_states: list[tuple[str, ...]], benign, risky, weights: list[list[float]]):
    """Rows interpolate benign -> risky with noisy-OR-combined activation."""
    benign = np.asarray(benign, dtype=float)
    risky = np.asarray(risky, dtype=float)
    rows = []
    for combo in configs(parent_states):
        q = 1.0
        for pi, si in enumerate(combo):
            q *= 1.0 - weights[pi][si]
        t = 1.0 - q
        rows.append((1.0 - t) * benign + t * risky)
    return np.array(rows)


def table(*rows):
    return np.array(rows, dtype=float)


class Builder:
    def __init__(self) -> None:
        self.variables: list[Variable] = []
        self.edges: list[tuple[str, str]] = []
        self.cpts: dict[str, Cpt] = {}
        self._states: dict[str, tuple[str, ...]] = {}

    def var(self, name: str, states: tuple[str, ...], description: str = "") -> None:
        self.variables.append(Variable(name, states, description))
        self._states[name] = states

    def cpt(self, name: str, parents: tuple[str, ...], rows) -> None:
        parents = tuple(sorted(parents))
        for p in parents:
            self.edges.append((p, name))
        self.cpts[name] = Cpt(name, parents, np.asarray(rows, dtype=float))

    def parent_states(self, parents) -> list[tuple[str, ...]]:
        return [self._states[p] for p in sorted(parents)]

    def build(self) -> Network:
        return Network.from_parts(self.variables, self.edges, self.cpts, clamp_floor=1e-4)


# ---------------------------------------------------------------- fragment


def build_autonomy_fragment() -> Network:
    """13-variable fragment around autonomy loss used by the worked update
    example: a healthy, active profile stored, then 'autonomy lost' arrives."""
    b = Builder()
    b.var("sex", ("female", "male"))
    b.var("diabetes", YN)
    b.var("dementia", YN)
    b.var("strokeTIA", YN, "stroke or transient ischemic attack")
    b.var("muscleImpairment", YN)
    b.var("parkinson", YN)
    b.var("visionPb", YN, "vision problem")
    b.var("autonomyLoss", ("kept", "lost"))
    b.var("livesAlone", YN)
    b.var("getUpAlone", YN, "can get up without help")
    b.var("driveCar", FREQ)
    b.var("doShopping", FREQ)
    b.var("leaveHome", FREQ)

    b.cpt("sex", (), table([0.725, 0.275]))
    b.cpt("diabetes", (), table([0.85, 0.15]))
    b.cpt("parkinson", (), table([0.94, 0.06]))
    b.cpt("visionPb", (), table([0.80, 0.20]))
    b.cpt("dementia", ("sex",), table([0.89, 0.11], [0.91, 0.09]))
    b.cpt("strokeTIA", ("diabetes",), table([0.92, 0.08], [0.80, 0.20]))
    b.cpt("muscleImpairment", ("strokeTIA",), table([0.87, 0.13], [0.45, 0.55]))
    # parents sorted: dementia, muscleImpairment, parkinson, strokeTIA
    b.cpt(
        "autonomyLoss",
        ("dementia", "strokeTIA", "muscleImpairment", "parkinson"),
        noisy_or_rows(
            b.parent_states(("dementia", "muscleImpairment", "parkinson", "strokeTIA")),
            leak=0.008,
            strengths=[
                [0.0, 0.145],  # dementia
                [0.0, 0.496],  # muscleImpairment
                [0.0, 0.295],  # parkinson
                [0.0, 0.395],  # strokeTIA
            ],
        ),
    )
    # parents sorted: autonomyLoss, dementia
    b.cpt(
        "livesAlone",
        ("dementia", "autonomyLoss"),
        table(
            [0.45, 0.55],   # kept, no dementia
            [0.85, 0.15],   # kept, dementia
            [0.975, 0.025], # lost, no dementia
            [0.992, 0.008], # lost, dementia
        ),
    )
    b.cpt("getUpAlone", ("autonomyLoss",), table([0.07, 0.93], [0.985, 0.015]))
    # parents sorted: autonomyLoss, visionPb
    b.cpt(
        "driveCar",
        ("autonomyLoss", "visionPb"),
        table(
            [0.25, 0.20, 0.55],
            [0.55, 0.25, 0.20],
            [0.975, 0.020, 0.005],
            [0.991, 0.006, 0.003],
        ),
    )
    # parents sorted: autonomyLoss, driveCar, visionPb
    rows = []
    for a in (0, 1):
        for dc in (0, 1, 2):
            for v in (0, 1):
                if a == 0:
                    base = {
                        0: [0.30, 0.30, 0.40],
                        1: [0.18, 0.32, 0.50],
                        2: [0.06, 0.16, 0.78],
                    }[dc]
                    if v:
                        base = [base[0] + 0.12, base[1] + 0.02, base[2] - 0.14]
                else:
                    base = {
                        0: [0.93, 0.06, 0.01],
                        1: [0.90, 0.08, 0.02],
                        2: [0.85, 0.10, 0.05],
                    }[dc]
                    if v:
                        base = [base[0] + 0.02, base[1] - 0.014, base[2] - 0.006]
                rows.append(base)
    b.cpt("doShopping", ("autonomyLoss", "visionPb", "driveCar"), np.array(rows))
    # parents sorted: doShopping, driveCar
    b.cpt(
        "leaveHome",
        ("doShopping", "driveCar"),
        table(
            [0.50, 0.35, 0.15],
            [0.25, 0.45, 0.30],
            [0.10, 0.30, 0.60],
            [0.20, 0.50, 0.30],
            [0.10, 0.45, 0.45],
            [0.05, 0.25, 0.70],
            [0.05, 0.25, 0.70],
            [0.03, 0.17, 0.80],
            [0.01, 0.09, 0.90],
        ),
    )
    return b.build()


from staleobs.models import AUTONOMY_CASE_OBSERVATIONS as AUTONOMY_OBSERVATIONS
from staleobs.models import autonomy_case


def check_autonomy_fragment(net: Network) -> None:
    obs, new = autonomy_case()
    ev = obs.evidence()

    p_full = prob_of(net, ev, ("autonomyLoss", "lost"))
    assert p_full <= EPS, f"full case not contradictory: {p_full:.4g}"

    restricted = restrict(net, obs, new)
    dropped = obs.variables - restricted.variables
    assert dropped == {"sex", "diabetes", "leaveHome"}, f"dropped {sorted(dropped)}"

    groups = decompose(net, restricted, new, EPS)
    split = {
        tuple(sorted(o.variable for o in g.and_set + g.or_set)): (
            tuple(sorted(o.variable for o in g.and_set)),
            tuple(sorted(o.variable for o in g.or_set)),
        )
        for g in groups
    }
    expected = {
        ("dementia", "muscleImpairment", "parkinson", "strokeTIA"): (
            (),
            ("dementia", "muscleImpairment", "parkinson", "strokeTIA"),
        ),
        ("livesAlone",): (("livesAlone",), ()),
        ("getUpAlone",): (("getUpAlone",), ()),
        ("doShopping", "driveCar"): (("doShopping", "driveCar"), ()),
    }
    assert split == expected, f"groups differ:\n{split}"

    tree = detect(net, obs, new, EPS)
    assert tree is not None and len(tree.groups) == 4, "single pass must yield 4 groups"

    rec = recommend(net, tree, new)
    or_groups = [g for g in rec.groups if g.or_set]
    assert len(or_groups) == 1
    order = [leaf.variable for leaf in or_groups[0].or_set]
    assert order[0] == "muscleImpairment", f"OR order {order}"

    residual = obs.without(*(o.variable for o in tree.leaves))
    p_resid = prob_of(net, residual.evidence(), ("autonomyLoss", "lost"))
    assert p_resid > EPS, f"residual still contradictory: {p_resid:.4g}"

    # the stored profile must be reachable by inserting one observation at a
    # time without tripping the detector (used to seed demo patients)
    partial = ObservationSet()
    for o in obs:
        pass
    for i, (v, s) in enumerate(AUTONOMY_OBSERVATIONS):
        new_i = NewObservation(v, s, 1_700_000_000 + 3600 * i)
        assert not is_contradictory(net, partial, new_i, EPS), f"seeding trips at {v}"
        partial = partial.with_observation(Observation(v, s, new_i.timestamp))

    # every single-state prior must stay above epsilon so a lone new
    # observation can never be contradictory on an empty record
    for name in net.names:
        prior = posterior(net, {}, name)
        assert min(prior.values()) > EPS * 1.2, f"prior too small: {name} {prior}"

    print(f"  autonomy fragment OK (P(lost|case)={p_full:.3g}, OR order {order})")


# ---------------------------------------------------------------- core 13


CORE_EDGES = {
    ("cardiovascularDrugs", "hypotension"),
    ("drugsNb", "hypotension"),
    ("hypotension", "fallsNb"),
    ("parkinson", "fallsNb"),
    ("psychotropicDrugs", "difficultyBalance"),
    ("psychotropicDrugs", "drugsNb"),
    # the remaining edges are assumed from the model sketch, not
    # literature-pinned
    ("age", "dementia"),
    ("age", "muscleImpairment"),
    ("dementia", "difficultyWalking"),
    ("muscleImpairment", "difficultyWalking"),
    ("difficultyWalking", "fallsNb"),
    ("difficultyWalking", "walkingStick"),
    ("visionPb", "fallsNb"),
}

AGE_STATES = ("a55_63", "a64_72", "a73_81", "a82_plus")
FALLS_STATES = ("none", "one_two", "three_four", "five_plus")
DRUGS_STATES = ("none", "one_three", "four_plus")
WALK_STATES = ("none", "mild", "serious")

FALLS_BENIGN = [0.662, 0.295, 0.040, 0.003]
FALLS_RISKY = [0.05, 0.25, 0.38, 0.32]


def core_common(b: Builder, extended: bool) -> None:
    """CPTs shared between the core and extended models (where the parent
    sets coincide)."""
    b.var("age", AGE_STATES)
    b.cpt("age", (), table([0.016, 0.101, 0.395, 0.488]))

    b.var("dementia", YN)
    b.cpt("dementia", ("age",), table([0.98, 0.02], [0.95, 0.05], [0.90, 0.10], [0.82, 0.18]))

    b.var("parkinson", YN)
    b.cpt("parkinson", (), table([0.94, 0.06]))

    b.var("visionPb", YN, "vision problem")
    b.cpt("visionPb", (), table([0.78, 0.22]))

    b.var("drugsNb", DRUGS_STATES, "number of medications taken")
    if extended:
        b.cpt(
            "drugsNb",
            ("cardiovascularDrugs", "psychotropicDrugs"),
            table(
                [0.58, 0.38, 0.04],
                [0.10, 0.62, 0.28],
                [0.06, 0.60, 0.34],
                [0.02, 0.38, 0.60],
            ),
        )
    else:
        b.cpt(
            "drugsNb",
            ("psychotropicDrugs",),
            table([0.52, 0.42, 0.06], [0.08, 0.58, 0.34]),
        )

    b.var("hypotension", YN)
    b.cpt(
        "hypotension",
        ("cardiovascularDrugs", "drugsNb"),
        table(
            [0.95, 0.05],
            [0.92, 0.08],
            [0.82, 0.18],
            [0.88, 0.12],
            [0.84, 0.16],
            [0.72, 0.28],
        ),
    )

    b.var("walkingStick", YN)
    b.cpt("walkingStick", ("difficultyWalking",), table([0.97, 0.03], [0.55, 0.45], [0.12, 0.88]))


def build_core() -> Network:
    """First 13-variable model around drug-related fall risk."""
    b = Builder()
    core_common(b, extended=False)

    b.var("cardiovascularDrugs", YN)
    b.cpt("cardiovascularDrugs", (), table([0.85, 0.15]))

    b.var("psychotropicDrugs", YN)
    b.cpt("psychotropicDrugs", (), table([0.875, 0.125]))

    b.var("muscleImpairment", YN)
    b.cpt(
        "muscleImpairment",
        ("age",),
        noisy_or_rows([AGE_STATES], leak=0.09, strengths=[[0.0, 0.02, 0.06, 0.10]]),
    )

    b.var("difficultyBalance", YN)
    b.cpt("difficultyBalance", ("psychotropicDrugs",), table([0.88, 0.12], [0.62, 0.38]))

    b.var("difficultyWalking", WALK_STATES)
    b.cpt(
        "difficultyWalking",
        ("dementia", "muscleImpairment"),
        mixture_rows(
            b.parent_states(("dementia", "muscleImpairment")),
            benign=[0.85, 0.12, 0.03],
            risky=[0.10, 0.38, 0.52],
            weights=[[0.0, 0.15], [0.0, 0.40]],
        ),
    )

    b.var("fallsNb", FALLS_STATES, "falls in the last year")
    b.cpt(
        "fallsNb",
        ("difficultyWalking", "hypotension", "parkinson", "visionPb"),
        mixture_rows(
            b.parent_states(("difficultyWalking", "hypotension", "parkinson", "visionPb")),
            benign=FALLS_BENIGN,
            risky=FALLS_RISKY,
            weights=[
                [0.0, 0.10, 0.25],  # difficultyWalking
                [0.0, 0.15],        # hypotension
                [0.0, 0.08],        # parkinson
                [0.0, 0.02],        # visionPb
            ],
        ),
    )
    return b.build()


def check_core(net: Network) -> None:
    assert set(net.edges) == CORE_EDGES, set(net.edges) ^ CORE_EDGES
    assert len(net.variables) == 13
    for name in net.names:
        prior = posterior(net, {}, name)
        assert min(prior.values()) > EPS * 1.2, f"prior too small: {name} {prior}"
    print("  core model OK (13 variables, pinned edge set)")


# ---------------------------------------------------------------- extended


SECTION_32_EDGES = {
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


def peaked_row(n: int, center: float, spread: float = 1.6, floor: float = 0.02):
    xs = np.arange(n, dtype=float)
    row = np.exp(-((xs - center) ** 2) / (2 * spread**2))
    row = row / row.sum()
    row = np.maximum(row, floor)
    return row / row.sum()


def build_extended() -> Network:
    """41-variable model: the core plus stroke/autonomy cluster, daily-living
    activities and general geriatric context."""
    b = Builder()
    core_common(b, extended=True)

    b.var("sex", ("female", "male"))
    b.cpt("sex", (), table([0.725, 0.275]))

    b.var("height", tuple(f"h{i}" for i in range(7)))
    b.cpt("height", (), table([0.04, 0.10, 0.20, 0.30, 0.20, 0.11, 0.05]))

    b.var("weight", tuple(f"w{i}" for i in range(10)))
    b.cpt("weight", ("height",), np.array([peaked_row(10, 1.5 + 0.8 * h) for h in range(7)]))

    b.var("diabetes", YN)
    b.cpt(
        "diabetes",
        ("weight",),
        table(*([[1 - p, p] for p in (0.08, 0.08, 0.09, 0.10, 0.11, 0.12, 0.14, 0.18, 0.24, 0.30)])),
    )

    b.var("heartDisease", YN)
    b.cpt("heartDisease", (), table([0.80, 0.20]))

    b.var("strokeTIA", YN, "stroke or transient ischemic attack")
    b.cpt(
        "strokeTIA",
        ("age", "diabetes", "heartDisease"),
        noisy_or_rows(
            b.parent_states(("age", "diabetes", "heartDisease")),
            leak=0.015,
            strengths=[[0.0, 0.02, 0.05, 0.08], [0.0, 0.12], [0.0, 0.15]],
        ),
    )

    b.var("muscleImpairment", YN)
    b.cpt(
        "muscleImpairment",
        ("age", "strokeTIA"),
        noisy_or_rows(
            b.parent_states(("age", "strokeTIA")),
            leak=0.08,
            strengths=[[0.0, 0.02, 0.06, 0.10], [0.0, 0.45]],
        ),
    )

    b.var("autonomyLoss", ("kept", "lost"))
    b.cpt(
        "autonomyLoss",
        ("dementia", "muscleImpairment", "parkinson", "strokeTIA"),
        noisy_or_rows(
            b.parent_states(("dementia", "muscleImpairment", "parkinson", "strokeTIA")),
            leak=0.005,
            strengths=[[0.0, 0.0251], [0.0, 0.48], [0.0, 0.28], [0.0, 0.38]],
        ),
    )

    b.var("depression", YN)
    b.cpt("depression", (), table([0.85, 0.15]))

    b.var("psychotropicDrugs", YN)
    b.cpt("psychotropicDrugs", ("depression",), table([0.95, 0.05], [0.45, 0.55]))

    b.var("cardiovascularDrugs", YN)
    b.cpt("cardiovascularDrugs", ("heartDisease",), table([0.996, 0.004], [0.28, 0.72]))

    b.var("hearingPb", YN, "hearing problem")
    b.cpt("hearingPb", ("age",), table([0.90, 0.10], [0.85, 0.15], [0.78, 0.22], [0.68, 0.32]))

    b.var("difficultyBalance", YN)
    b.cpt(
        "difficultyBalance",
        ("diabetes", "hearingPb", "psychotropicDrugs", "strokeTIA"),
        noisy_or_rows(
            b.parent_states(("diabetes", "hearingPb", "psychotropicDrugs", "strokeTIA")),
            leak=0.04,
            strengths=[[0.0, 0.18], [0.0, 0.20], [0.0, 0.28], [0.0, 0.35]],
        ),
    )

    b.var("difficultyWalking", WALK_STATES)
    b.cpt(
        "difficultyWalking",
        ("dementia", "muscleImpairment", "parkinson", "strokeTIA"),
        mixture_rows(
            b.parent_states(("dementia", "muscleImpairment", "parkinson", "strokeTIA")),
            benign=[0.85, 0.12, 0.03],
            risky=[0.10, 0.38, 0.52],
            weights=[[0.0, 0.15], [0.0, 0.40], [0.0, 0.45], [0.0, 0.35]],
        ),
    )

    b.var("homeHazards", YN)
    b.cpt("homeHazards", (), table([0.75, 0.25]))

    b.var("fallsNb", FALLS_STATES, "falls in the last year")
    b.cpt(
        "fallsNb",
        (
            "difficultyBalance",
            "difficultyWalking",
            "homeHazards",
            "hypotension",
            "parkinson",
            "strokeTIA",
            "visionPb",
        ),
        mixture_rows(
            b.parent_states(
                (
                    "difficultyBalance",
                    "difficultyWalking",
                    "homeHazards",
                    "hypotension",
                    "parkinson",
                    "strokeTIA",
                    "visionPb",
                )
            ),
            benign=FALLS_BENIGN,
            risky=FALLS_RISKY,
            weights=[
                [0.0, 0.22],        # difficultyBalance
                [0.0, 0.10, 0.25],  # difficultyWalking
                [0.0, 0.03],        # homeHazards
                [0.0, 0.18],        # hypotension
                [0.0, 0.08],        # parkinson
                [0.0, 0.30],        # strokeTIA
                [0.0, 0.02],        # visionPb
            ],
        ),
    )

    b.var("osteoporosis", YN)
    b.cpt(
        "osteoporosis",
        ("age", "sex"),
        table(
            [0.92, 0.08], [0.97, 0.03],
            [0.85, 0.15], [0.95, 0.05],
            [0.75, 0.25], [0.92, 0.08],
            [0.65, 0.35], [0.88, 0.12],
        ),
    )

    b.var("fracture", YN)
    b.cpt(
        "fracture",
        ("fallsNb", "osteoporosis"),
        table(
            [0.97, 0.03], [0.90, 0.10],
            [0.88, 0.12], [0.70, 0.30],
            [0.75, 0.25], [0.50, 0.50],
            [0.60, 0.40], [0.35, 0.65],
        ),
    )

    b.var("fearFalling", YN)
    b.cpt(
        "fearFalling",
        ("fallsNb",),
        table([0.92, 0.08], [0.60, 0.40], [0.35, 0.65], [0.20, 0.80]),
    )

    b.var("getUpAlone", YN, "can get up without help")
    b.cpt("getUpAlone", ("autonomyLoss",), table([0.07, 0.93], [0.985, 0.015]))

    b.var("telealarm", YN, "wears a telealarm device")
    b.cpt(
        "telealarm",
        ("fallsNb", "getUpAlone"),
        table(
            [0.70, 0.30], [0.97, 0.03],
            [0.45, 0.55], [0.90, 0.10],
            [0.12, 0.88], [0.70, 0.30],
            [0.03, 0.97], [0.60, 0.40],
        ),
    )

    b.var("livesAlone", YN)
    b.cpt("livesAlone", ("autonomyLoss",), table([0.45, 0.55], [0.985, 0.015]))

    b.var("driveCar", FREQ)
    b.cpt(
        "driveCar",
        ("autonomyLoss",),
        table([0.38, 0.22, 0.40], [0.975, 0.020, 0.005]),
    )

    b.var("doShopping", FREQ)
    b.cpt(
        "doShopping",
        ("autonomyLoss", "driveCar"),
        table(
            [0.35, 0.33, 0.32],
            [0.15, 0.40, 0.45],
            [0.05, 0.17, 0.78],
            [0.94, 0.05, 0.01],
            [0.88, 0.10, 0.02],
            [0.80, 0.14, 0.06],
        ),
    )

    b.var("leaveHome", FREQ)
    b.cpt(
        "leaveHome",
        ("doShopping", "driveCar"),
        table(
            [0.50, 0.35, 0.15],
            [0.25, 0.45, 0.30],
            [0.10, 0.30, 0.60],
            [0.20, 0.50, 0.30],
            [0.10, 0.45, 0.45],
            [0.05, 0.25, 0.70],
            [0.05, 0.25, 0.70],
            [0.03, 0.17, 0.80],
            [0.01, 0.09, 0.90],
        ),
    )

    b.var("akinesia", YN)
    b.cpt(
        "akinesia",
        ("parkinson", "psychotropicDrugs"),
        table([0.996, 0.004], [0.94, 0.06], [0.60, 0.40], [0.45, 0.55]),
    )

    b.var("physiotherapy", YN)
    b.cpt("physiotherapy", ("difficultyWalking",), table([0.94, 0.06], [0.60, 0.40], [0.25, 0.75]))

    b.var("arthritis", YN)
    b.cpt("arthritis", ("age",), table([0.88, 0.12], [0.80, 0.20], [0.70, 0.30], [0.60, 0.40]))

    b.var("chronicPain", YN)
    b.cpt("chronicPain", ("arthritis",), table([0.88, 0.12], [0.45, 0.55]))

    b.var("sleepDisorder", YN)
    b.cpt(
        "sleepDisorder",
        ("chronicPain", "depression"),
        table([0.85, 0.15], [0.55, 0.45], [0.60, 0.40], [0.35, 0.65]),
    )

    b.var("incontinence", YN)
    b.cpt("incontinence", ("age",), table([0.95, 0.05], [0.90, 0.10], [0.82, 0.18], [0.72, 0.28]))

    b.var("anemia", YN)
    b.cpt("anemia", (), table([0.88, 0.12]))

    b.var("alcoholUse", YN)
    b.cpt("alcoholUse", (), table([0.82, 0.18]))

    b.var("dizziness", YN)
    b.cpt(
        "dizziness",
        ("alcoholUse", "anemia", "hypotension"),
        noisy_or_rows(
            b.parent_states(("alcoholUse", "anemia", "hypotension")),
            leak=0.05,
            strengths=[[0.0, 0.25], [0.0, 0.30], [0.0, 0.35]],
        ),
    )
    return b.build()


SCENARIO_3_OBS = [
    ("parkinson", "no"),
    ("strokeTIA", "no"),
    ("hypotension", "no"),
    ("diabetes", "yes"),
    ("difficultyWalking", "none"),
    ("difficultyBalance", "no"),
    ("osteoporosis", "yes"),
    ("muscleImpairment", "no"),
    ("getUpAlone", "no"),
    ("telealarm", "no"),
]
SCENARIO_3_NEW = ("fallsNb", "five_plus")
SCENARIO_3_FORMULA = [
    ((), ("difficultyBalance", "difficultyWalking", "hypotension", "strokeTIA")),
    ((), ("getUpAlone", "telealarm")),
]

SCENARIO_4_OBS = [
    ("livesAlone", "yes"),
    ("driveCar", "weekly"),
    ("parkinson", "no"),
    ("fearFalling", "no"),
    ("strokeTIA", "no"),
    ("difficultyWalking", "none"),
    ("muscleImpairment", "no"),
]
SCENARIO_4_NEW = ("autonomyLoss", "lost")
SCENARIO_4_FORMULA = [
    ((), ("muscleImpairment", "parkinson", "strokeTIA")),
    (("driveCar",), ()),
    (("livesAlone",), ()),
]

SCENARIO_1_OBS = [
    ("heartDisease", "no"),
    ("drugsNb", "one_three"),
    ("akinesia", "no"),
    ("parkinson", "no"),
    ("diabetes", "no"),
    ("psychotropicDrugs", "no"),
]
SCENARIO_1_NEW = ("cardiovascularDrugs", "yes")

SCENARIO_2_OBS = [
    ("depression", "no"),
    ("psychotropicDrugs", "no"),
    ("parkinson", "no"),
    ("physiotherapy", "no"),
    ("driveCar", "weekly"),
]
SCENARIO_2_NEW = ("akinesia", "yes")


def scenario_set(pairs):
    return ObservationSet(
        Observation(v, s, 1_700_000_000 + 60 * i) for i, (v, s) in enumerate(pairs)
    )


def tree_shape(tree):
    shape = []
    for g in tree.groups:
        shape.append(
            (
                tuple(sorted(o.variable for o in g.and_set)),
                tuple(sorted(o.variable for o in g.or_set)),
            )
        )
    return sorted(shape)


def check_extended(net: Network) -> None:
    edges = set(net.edges)
    assert CORE_EDGES <= edges, CORE_EDGES - edges
    assert SECTION_32_EDGES <= edges, SECTION_32_EDGES - edges
    assert len(net.variables) == 41
    cards = sorted(len(v.states) for v in net.variables)
    assert cards.count(2) == 32 and cards[-1] == 10 and cards[-2] == 7, cards

    for name in net.names:
        prior = posterior(net, {}, name)
        assert min(prior.values()) > EPS * 1.2, f"prior too small: {name} {prior}"

    # scenarios 1 and 2: pinned conditional-probability ceilings
    p1 = prob_of(net, scenario_set(SCENARIO_1_OBS).evidence(), SCENARIO_1_NEW)
    assert p1 <= EPS, f"scenario 1: {p1:.4g}"
    p2 = prob_of(net, scenario_set(SCENARIO_2_OBS).evidence(), SCENARIO_2_NEW)
    assert p2 <= EPS, f"scenario 2: {p2:.4g}"

    # scenarios 3 and 4: pinned result formulas
    for pairs, (var, state), expected, label in (
        (SCENARIO_3_OBS, SCENARIO_3_NEW, SCENARIO_3_FORMULA, "scenario 3"),
        (SCENARIO_4_OBS, SCENARIO_4_NEW, SCENARIO_4_FORMULA, "scenario 4"),
    ):
        obs = scenario_set(pairs)
        new = NewObservation(var, state, 1_700_100_000)
        p = prob_of(net, obs.evidence(), (var, state))
        assert p <= EPS, f"{label} not contradictory: {p:.4g}"
        tree = detect(net, obs, new, EPS)
        assert tree is not None, label
        shape = tree_shape(tree)
        assert shape == sorted(expected), f"{label} shape:\n{shape}\nexpected {sorted(expected)}"
        residual = obs.without(*(o.variable for o in tree.leaves))
        p_resid = prob_of(net, residual.evidence(), (var, state))
        assert p_resid > EPS, f"{label} residual contradictory: {p_resid:.4g}"
        print(f"  {label}: P={p:.3g}, formula OK, residual P={p_resid:.3g}")

    print("  extended model OK (41 variables)")


def main() -> int:
    out = OUT_DIR
    out.mkdir(parents=True, exist_ok=True)

    frag = build_autonomy_fragment()
    check_autonomy_fragment(frag)
    (out / "autonomy_fragment.bn").write_text(
        dump_network(
            frag,
            header_comment=(
                "Autonomy-loss fragment of the fall-prevention model (13 variables).\n"
                "Illustrative parameters, not clinical estimates."
            ),
        )
    )

    core = build_core()
    check_core(core)
    (out / "fall_core.bn").write_text(
        dump_network(
            core,
            header_comment=(
                "First fall-prevention model (13 variables).\n"
                "Edges beyond the six drug/balance ones are assumed, not literature-pinned.\n"
                "Illustrative parameters, not clinical estimates."
            ),
        )
    )

    extended = build_extended()
    check_extended(extended)
    (out / "fall_extended.bn").write_text(
        dump_network(
            extended,
            header_comment=(
                "Extended fall-prevention model (41 variables: 32 binary, height 7 states,\n"
                "weight 10 states, seven variables with 3-4 states).\n"
                "Illustrative parameters, not clinical estimates."
            ),
        )
    )
    print(f"wrote models to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
