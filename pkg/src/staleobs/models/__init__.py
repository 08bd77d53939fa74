"""Shipped example fall-prevention networks.

Three models are distributed in the network text format:

* ``fall_core.bn`` -- the first 13-variable model around drug-related fall
  risk (hypotension, balance, walking difficulty).
* ``fall_extended.bn`` -- the 41-variable model adding the stroke/autonomy
  cluster, daily-living activities and general geriatric context (32 binary
  variables, height with 7 states, weight with 10, seven variables with 3-4
  states).
* ``autonomy_fragment.bn`` -- the 13-variable fragment around autonomy loss
  used by the worked update example.

Parameters are synthesized to make the documented behaviours hold and to
keep marginals plausible; they are illustrative, not clinical estimates.
"""

from __future__ import annotations

from importlib import resources

from ..detection import NewObservation, Observation, ObservationSet
from ..network import DEFAULT_CLAMP_FLOOR, Network, load_network

__all__ = [
    "load_autonomy_fragment",
    "load_core_model",
    "load_extended_model",
    "autonomy_case",
    "model_path_text",
]


def _read(name: str) -> str:
    return resources.files(__package__).joinpath("data", name).read_text(encoding="utf-8")


def model_path_text(name: str) -> str:
    """Raw document text of a shipped model (for tests and tooling)."""
    return _read(name)


def load_core_model(clamp_floor: float = DEFAULT_CLAMP_FLOOR) -> Network:
    return load_network(_read("fall_core.bn"), clamp_floor=clamp_floor)


def load_extended_model(clamp_floor: float = DEFAULT_CLAMP_FLOOR) -> Network:
    return load_network(_read("fall_extended.bn"), clamp_floor=clamp_floor)


def load_autonomy_fragment(clamp_floor: float = DEFAULT_CLAMP_FLOOR) -> Network:
    return load_network(_read("autonomy_fragment.bn"), clamp_floor=clamp_floor)


AUTONOMY_CASE_OBSERVATIONS: tuple[tuple[str, str], ...] = (
    ("sex", "female"),
    ("diabetes", "no"),
    ("dementia", "no"),
    ("strokeTIA", "no"),
    ("muscleImpairment", "no"),
    ("parkinson", "no"),
    ("visionPb", "no"),
    ("driveCar", "weekly"),
    ("doShopping", "weekly"),
    ("leaveHome", "weekly"),
    ("getUpAlone", "yes"),
    ("livesAlone", "yes"),
)


def autonomy_case() -> tuple[ObservationSet, NewObservation]:
    """The worked update case on the autonomy fragment: a stored healthy and
    active profile, then the news that the person has lost her autonomy.

    The insertion order above stays consistent step by step, so the profile
    can also be built through the record service one observation at a time.
    """
    observations = ObservationSet(
        Observation(variable, state, 1_700_000_000 + 3_600 * i)
        for i, (variable, state) in enumerate(AUTONOMY_CASE_OBSERVATIONS)
    )
    return observations, NewObservation("autonomyLoss", "lost", 1_700_100_000)
