"""Service configuration: file based with environment overrides.

Config file is JSON with the keys ``network``, ``epsilon``, ``clamp_floor``,
``storage`` and ``api_token``.  The ``network`` value is either a path to a
network document or ``builtin:<name>`` for one of the shipped models.
Environment variables ``STALEOBS_NETWORK``, ``STALEOBS_EPSILON``,
``STALEOBS_CLAMP_FLOOR``, ``STALEOBS_STORAGE`` and ``STALEOBS_API_TOKEN``
override the file.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from ..detection import DEFAULT_EPSILON
from ..network import DEFAULT_CLAMP_FLOOR, Network, load_network

BUILTIN_PREFIX = "builtin:"


@dataclass(frozen=True)
class ServiceConfig:
    network: str = BUILTIN_PREFIX + "autonomy_fragment"
    epsilon: float = DEFAULT_EPSILON
    clamp_floor: float = DEFAULT_CLAMP_FLOOR
    storage: str = "staleobs_records.jsonl"
    api_token: str | None = None

    def load_model(self) -> Network:
        if self.network.startswith(BUILTIN_PREFIX):
            from .. import models

            name = self.network[len(BUILTIN_PREFIX) :]
            return load_network(
                models.model_path_text(f"{name}.bn"), clamp_floor=self.clamp_floor
            )
        return load_network(
            Path(self.network).read_text(encoding="utf-8"), clamp_floor=self.clamp_floor
        )


def load_config(path: str | None = None, environ: dict[str, str] | None = None) -> ServiceConfig:
    env = os.environ if environ is None else environ
    data: dict = {}
    if path:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    network = env.get("STALEOBS_NETWORK", data.get("network", ServiceConfig.network))
    epsilon = float(env.get("STALEOBS_EPSILON", data.get("epsilon", ServiceConfig.epsilon)))
    clamp = float(
        env.get("STALEOBS_CLAMP_FLOOR", data.get("clamp_floor", ServiceConfig.clamp_floor))
    )
    storage = env.get("STALEOBS_STORAGE", data.get("storage", ServiceConfig.storage))
    token = env.get("STALEOBS_API_TOKEN", data.get("api_token"))
    return ServiceConfig(
        network=network,
        epsilon=epsilon,
        clamp_floor=clamp,
        storage=storage,
        api_token=token or None,
    )
