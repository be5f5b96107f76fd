from pathlib import Path

import numpy as np
import pytest

from trajent.config.settings import get_settings
from trajent.handlers.chain_core import build_chain
from trajent.schemas.chain import MarkovChain

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

FIVE_STATE_ROWS = [
    [0.0, 0.25, 0.75, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 1.0],
    [0.0, 0.5, 0.0, 0.5, 0.0],
    [0.0, 0.0, 0.0, 0.0, 1.0],
    [0.5, 0.0, 0.0, 0.5, 0.0],
]

# published two-decimal entropies of the five-state chain, row = source
FIVE_STATE_ENTROPIES = np.array(
    [
        [3.56, 3.69, 1.74, 3.18, 1.56],
        [2.00, 5.69, 3.74, 2.59, 0.00],
        [3.00, 3.84, 4.74, 2.29, 1.00],
        [2.00, 5.69, 3.74, 2.59, 0.00],
        [2.00, 5.69, 3.74, 2.59, 1.78],
    ]
)


def five_state() -> MarkovChain:
    return build_chain(["1", "2", "3", "4", "5"], FIVE_STATE_ROWS)


def five_state_with_isolated_state() -> MarkovChain:
    """The five-state chain plus a state "6" that only loops on itself."""
    matrix = np.zeros((6, 6))
    matrix[:5, :5] = FIVE_STATE_ROWS
    matrix[5, 5] = 1.0
    return build_chain(["1", "2", "3", "4", "5", "6"], matrix)


def random_strongly_connected(
    rng: np.random.Generator, n: int, density: float = 0.3
) -> MarkovChain:
    """A random Hamiltonian cycle plus extra edges, with Dirichlet row weights."""
    order = rng.permutation(n)
    mask = rng.random((n, n)) < density
    mask[order, np.roll(order, -1)] = True
    matrix = np.zeros((n, n))
    for i in range(n):
        cols = np.flatnonzero(mask[i])
        matrix[i, cols] = rng.dirichlet(np.ones(cols.size))
    return build_chain([str(k + 1) for k in range(n)], matrix)


def random_forward(rng: np.random.Generator, n: int) -> MarkovChain:
    """
    Edges only go to higher-numbered states, except from the last state, whose
    row is uniform. Trajectories ending at the last state are finite in number.
    """
    matrix = np.zeros((n, n))
    for i in range(n - 1):
        cols = np.flatnonzero(rng.random(n) < 0.6)
        cols = np.union1d(cols[cols > i], [i + 1])
        matrix[i, cols] = rng.dirichlet(np.ones(cols.size))
    matrix[n - 1] = 1.0 / n
    return build_chain([str(k + 1) for k in range(n)], matrix)


def random_leaky_cycles(
    rng: np.random.Generator, n: int, exit_mass: float = 0.95
) -> MarkovChain:
    """
    Every state but the last jumps to the last one with probability
    ``exit_mass`` and otherwise wanders among the others, cycles included.
    Trajectory mass decays geometrically with length.
    """
    k = n - 1
    matrix = np.zeros((n, n))
    for i in range(k):
        cols = np.union1d(np.flatnonzero(rng.random(k) < 0.6), [(i + 1) % k])
        matrix[i, cols] = (1 - exit_mass) * rng.dirichlet(np.ones(cols.size))
        matrix[i, k] = exit_mass
    matrix[k] = 1.0 / n
    return build_chain([str(j + 1) for j in range(n)], matrix)


@pytest.fixture
def five_state_chain() -> MarkovChain:
    return five_state()


@pytest.fixture
def isolated_state_chain() -> MarkovChain:
    return five_state_with_isolated_state()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def five_state_json() -> Path:
    return DATA_DIR / "five_state.json"


@pytest.fixture
def five_state_tsv() -> Path:
    return DATA_DIR / "five_state.tsv"


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    for name in ("THREADS", "PRECISION", "LOG_LEVEL", "SIMULATION_SEED"):
        monkeypatch.delenv(f"TRAJENT_{name}", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
