import numpy as np
import pytest

from epinfer import ModelParams, Network
from epinfer.graphs import all_pairs


def random_network(rng, n_nodes, edge_prob=0.5) -> Network:
    pairs = all_pairs(n_nodes)
    return Network(n_nodes, [p for p in pairs if rng.random() < edge_prob])


def random_state(rng, n_nodes) -> np.ndarray:
    return rng.integers(0, 2, size=n_nodes).astype(np.uint8)


@pytest.fixture
def params():
    return ModelParams(beta=1.0, gamma=0.5, eps=0.01)
