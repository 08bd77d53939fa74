"""Synthetic scenario generation and the line-oriented scenario file format.

A scenario pairs a stored observation set with one newly acquired
observation.  Labeled scenarios additionally carry a contradictory/consistent
label and, optionally, a reference formula and reference OR-set rankings to
compare detector output against.

File format: one scenario per line, fields separated by ``;``::

    s0001; obs: sex=female@1700000000, dementia=no@1700003600; \
        new: autonomyLoss=lost@1700100000; label: 1; \
        formula: {or: dementia=no, parkinson=no} {and: livesAlone=yes}
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detection import NewObservation, Observation, ObservationSet
from .evaluation import Formula, dump_formula, parse_formula
from .inference import evidence_probability, posterior
from .network import DEFAULT_CLAMP_FLOOR, Network, NetworkError


class ScenarioError(NetworkError):
    """Malformed scenario input or file."""


# generation bounds from the evaluation protocol: 3..12 stored observations
MIN_OBSERVED = 3
MAX_OBSERVED = 12
RESAMPLE_ATTEMPTS = 100


@dataclass(frozen=True)
class Scenario:
    id: str
    prior_observations: ObservationSet
    new_observation: NewObservation

    def __post_init__(self) -> None:
        if self.new_observation.variable in self.prior_observations:
            raise ScenarioError(
                f"scenario {self.id}: new observation variable already stored"
            )


@dataclass(frozen=True)
class LabeledScenario:
    scenario: Scenario
    label: int
    expert_formula: Formula | None = None

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise ScenarioError(f"label must be 0 or 1, got {self.label}")
        if self.expert_formula is not None and self.label != 1:
            raise ScenarioError("reference formula only makes sense for label 1")


def _sample_topological(net: Network, rng: np.random.Generator) -> dict[str, str]:
    """One ancestral sample from the joint distribution."""
    sample: dict[str, int] = {}
    for name in net.topological_order():
        row = net.cpts[name].rows[net.parent_config_index(name, sample)]
        sample[name] = int(rng.choice(len(row), p=row / row.sum()))
    return {name: net.states(name)[idx] for name, idx in sample.items()}


def _observation_set(net: Network, assignment: dict[str, str], chosen: list[str], base_ts: float) -> ObservationSet:
    return ObservationSet(
        Observation(v, assignment[v], base_ts + 60.0 * i) for i, v in enumerate(chosen)
    )


def generate_scenarios(
    net: Network,
    count: int,
    seed: int,
    clamp_floor: float = DEFAULT_CLAMP_FLOOR,
) -> list[Scenario]:
    """Deterministic random scenarios: a subset of 3..12 variables with
    random valid states, plus one extra pair as the new observation.

    Stored sets whose joint probability falls below the clamp floor are
    resampled so the stored profile itself is internally consistent.
    """
    if count < 1:
        raise ScenarioError(f"count must be positive, got {count}")
    rng = np.random.default_rng(seed)
    names = list(net.names)
    upper = min(MAX_OBSERVED, len(names) - 1)
    lower = min(MIN_OBSERVED, upper)
    scenarios: list[Scenario] = []
    for i in range(count):
        for _ in range(RESAMPLE_ATTEMPTS):
            k = int(rng.integers(lower, upper + 1))
            idx = rng.choice(len(names), size=k + 1, replace=False)
            chosen = [names[j] for j in idx[:k]]
            new_var = names[idx[k]]
            assignment = {
                v: net.states(v)[int(rng.integers(len(net.states(v))))]
                for v in chosen + [new_var]
            }
            obs = _observation_set(net, assignment, chosen, 1_700_000_000 + 86_400.0 * i)
            if evidence_probability(net, obs.evidence()) >= clamp_floor:
                break
        else:
            raise ScenarioError("could not sample a consistent stored set")
        scenarios.append(
            Scenario(
                id=f"s{i:04d}",
                prior_observations=obs,
                new_observation=NewObservation(
                    new_var, assignment[new_var], 1_700_000_000 + 86_400.0 * i + 3_600.0
                ),
            )
        )
    return scenarios


def generate_labeled_scenarios(
    net: Network,
    count: int,
    seed: int,
    contradiction_margin: float = 1e-3,
    consistency_margin: float = 5e-2,
) -> list[LabeledScenario]:
    """Balanced scenarios with construction-planted ground truth.

    Consistent cases (label 0) take the new observation straight from an
    ancestral sample of the joint and keep only draws whose conditional
    probability stays at or above ``consistency_margin``.  Contradictory
    cases (label 1) overwrite the new variable with its least likely state
    given the stored set, kept only when that posterior falls at or below
    ``contradiction_margin``.  The margins straddle the working threshold, so
    the labels stand in for expert judgment.
    """
    if count < 1:
        raise ScenarioError(f"count must be positive, got {count}")
    rng = np.random.default_rng(seed)
    names = list(net.names)
    upper = min(MAX_OBSERVED, len(names) - 1)
    lower = min(MIN_OBSERVED, upper)
    out: list[LabeledScenario] = []
    i = 0
    while len(out) < count:
        label = 1 if len(out) % 2 else 0
        planted = None
        for _ in range(RESAMPLE_ATTEMPTS):
            sample = _sample_topological(net, rng)
            k = int(rng.integers(lower, upper + 1))
            order = rng.permutation(len(names))
            chosen = [names[j] for j in order[:k]]
            obs = _observation_set(net, sample, chosen, 1_700_000_000 + 86_400.0 * i)
            # scan the unobserved variables for one admitting the wanted label
            for j in order[k:]:
                new_var = names[j]
                dist = posterior(net, obs.evidence(), new_var)
                if label == 0:
                    state = sample[new_var]
                    if dist[state] < consistency_margin:
                        continue
                else:
                    state = min(dist, key=dist.get)
                    if dist[state] > contradiction_margin:
                        continue
                planted = (obs, new_var, state)
                break
            if planted:
                break
        if planted is None:
            raise ScenarioError(f"could not plant a label-{label} scenario")
        obs, new_var, state = planted
        out.append(
            LabeledScenario(
                scenario=Scenario(
                    id=f"s{i:04d}",
                    prior_observations=obs,
                    new_observation=NewObservation(
                        new_var, state, 1_700_000_000 + 86_400.0 * i + 3_600.0
                    ),
                ),
                label=label,
            )
        )
        i += 1
    return out


# ---------------------------------------------------------------- file format


def _dump_obs(obs: Observation) -> str:
    ts = int(obs.timestamp) if float(obs.timestamp).is_integer() else obs.timestamp
    return f"{obs.variable}={obs.state}@{ts}"


def dump_scenarios(scenarios: list[Scenario] | list[LabeledScenario]) -> str:
    lines = []
    for item in scenarios:
        labeled = isinstance(item, LabeledScenario)
        scenario = item.scenario if labeled else item
        fields = [scenario.id]
        fields.append(
            "obs: " + ", ".join(_dump_obs(o) for o in scenario.prior_observations)
        )
        new = scenario.new_observation
        fields.append(f"new: {_dump_obs(Observation(new.variable, new.state, new.timestamp))}")
        if labeled:
            fields.append(f"label: {item.label}")
            if item.expert_formula is not None:
                fields.append(f"formula: {dump_formula(item.expert_formula)}")
        lines.append("; ".join(fields))
    return "\n".join(lines) + "\n"


def _parse_obs(token: str) -> Observation:
    try:
        pair, ts = token.rsplit("@", 1)
        variable, state = pair.split("=", 1)
        return Observation(variable.strip(), state.strip(), float(ts))
    except ValueError:
        raise ScenarioError(f"bad observation token {token!r}") from None


def load_scenarios(text: str) -> list[LabeledScenario]:
    """Parse a scenario file; unlabeled lines come back with label 0 and no
    formula is required anywhere."""
    out: list[LabeledScenario] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(";")]
        if len(fields) < 3:
            raise ScenarioError(f"line {lineno}: need id, obs and new fields")
        sid = fields[0]
        obs: ObservationSet | None = None
        new: NewObservation | None = None
        label = 0
        formula: Formula | None = None
        for field in fields[1:]:
            key, _, value = field.partition(":")
            key = key.strip()
            value = value.strip()
            if key == "obs":
                tokens = [t.strip() for t in value.split(",") if t.strip()]
                obs = ObservationSet(_parse_obs(t) for t in tokens)
            elif key == "new":
                parsed = _parse_obs(value)
                new = NewObservation(parsed.variable, parsed.state, parsed.timestamp)
            elif key == "label":
                label = int(value)
            elif key == "formula":
                formula = parse_formula(value)
            else:
                raise ScenarioError(f"line {lineno}: unknown field {key!r}")
        if obs is None or new is None:
            raise ScenarioError(f"line {lineno}: missing obs or new field")
        out.append(
            LabeledScenario(
                scenario=Scenario(id=sid, prior_observations=obs, new_observation=new),
                label=label,
                expert_formula=formula,
            )
        )
    return out
