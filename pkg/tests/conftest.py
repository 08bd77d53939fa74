import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from staleobs.network import Cpt, Network, Variable


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240901)


@pytest.fixture
def two_node_net() -> Network:
    """A -> B with P(A=1)=0.3, P(B=1|A=0)=0.2, P(B=1|A=1)=0.5."""
    variables = [Variable("A", ("0", "1")), Variable("B", ("0", "1"))]
    edges = [("A", "B")]
    cpts = {
        "A": Cpt("A", (), np.array([[0.7, 0.3]])),
        "B": Cpt("B", ("A",), np.array([[0.8, 0.2], [0.5, 0.5]])),
    }
    return Network.from_parts(variables, edges, cpts)


@pytest.fixture
def collider_net() -> Network:
    """A -> C <- B with a non-trivial C table for explaining away."""
    variables = [
        Variable("A", ("0", "1")),
        Variable("B", ("0", "1")),
        Variable("C", ("0", "1")),
    ]
    edges = [("A", "C"), ("B", "C")]
    cpts = {
        "A": Cpt("A", (), np.array([[0.7, 0.3]])),
        "B": Cpt("B", (), np.array([[0.4, 0.6]])),
        "C": Cpt(
            "C",
            ("A", "B"),
            np.array([[0.9, 0.1], [0.5, 0.5], [0.6, 0.4], [0.1, 0.9]]),
        ),
    }
    return Network.from_parts(variables, edges, cpts)


@pytest.fixture
def chain_net() -> Network:
    """A -> B -> C."""
    variables = [
        Variable("A", ("0", "1")),
        Variable("B", ("0", "1")),
        Variable("C", ("0", "1")),
    ]
    edges = [("A", "B"), ("B", "C")]
    cpts = {
        "A": Cpt("A", (), np.array([[0.6, 0.4]])),
        "B": Cpt("B", ("A",), np.array([[0.7, 0.3], [0.2, 0.8]])),
        "C": Cpt("C", ("B",), np.array([[0.9, 0.1], [0.3, 0.7]])),
    }
    return Network.from_parts(variables, edges, cpts)
