"""Trajectory entropies as fundamental-matrix weighted sums of local entropies."""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from trajent.handlers.chain_core import is_irreducible, local_entropies, split_state
from trajent.handlers.linalg_absorb import FundamentalSolver, restrict_to_reaching
from trajent.schemas.chain import MarkovChain, StateRef
from trajent.schemas.entropy import EntropyMatrix
from trajent.utils.errors import NotIrreducible, SourceCannotReachDestination

log = logging.getLogger(__name__)

ZERO_ENTROPY = 1e-12
"""Entropies within this many bits of zero are reported as exactly zero."""


def _snap(values: np.ndarray) -> np.ndarray:
    values = np.where(np.abs(values) <= ZERO_ENTROPY, 0.0, values)
    return np.clip(values, 0.0, None)


def entropy_column(chain: MarkovChain, d: StateRef) -> np.ndarray:
    """
    H_sd for every source s, computed with a single factorization.

    Sources that cannot reach d, and d itself, are NaN.
    """
    d_idx = chain.index_of(d)
    sub, kept = restrict_to_reaching(chain, d_idx)
    solver = FundamentalSolver(sub, _position(kept, d_idx))
    column = np.full(chain.n_states, np.nan)
    if solver.others.size:
        values = _snap(solver.weighted(local_entropies(sub)))
        originals = [kept[p].index for p in solver.others]
        column[originals] = values
    return column


def _position(kept, index: int) -> int:
    for position, state in enumerate(kept):
        if state.index == index:
            return position
    raise SourceCannotReachDestination(f"state {index} is outside the sub-chain")


def trajectory_entropy(chain: MarkovChain, s: StateRef, d: StateRef) -> float:
    """
    Entropy in bits of the random trajectory from s to d.

    When s == d the state is split first, giving the entropy of the return
    trajectory.
    """
    s_idx, d_idx = chain.index_of(s), chain.index_of(d)
    if s_idx == d_idx:
        chain, copy = split_state(chain, s_idx)
        d_idx = copy.index

    sub, kept = restrict_to_reaching(chain, d_idx)
    try:
        s_pos = _position(kept, s_idx)
    except SourceCannotReachDestination:
        raise SourceCannotReachDestination(
            f"{chain.labels[s_idx]} cannot reach {chain.labels[d_idx]}"
        ) from None
    solver = FundamentalSolver(sub, _position(kept, d_idx))
    values = _snap(solver.weighted(local_entropies(sub)))
    return float(values[solver.position(s_pos)])


def first_step_residual(chain: MarkovChain, d: StateRef) -> float:
    """
    Largest violation of H_sd = H(P_s.) + sum_{k != d} P_sk H_kd over the
    sources that reach d.
    """
    d_idx = chain.index_of(d)
    column = entropy_column(chain, d_idx)
    defined = ~np.isnan(column)
    defined[d_idx] = False
    h = np.where(defined, column, 0.0)
    rhs = local_entropies(chain) + chain.matrix @ h
    if not defined.any():
        return 0.0
    return float(np.max(np.abs(column[defined] - rhs[defined])))


def _destination_column(chain: MarkovChain, d: int) -> np.ndarray:
    column = entropy_column(chain, d)
    column[d] = trajectory_entropy(chain, d, d)
    return column


def entropy_matrix(chain: MarkovChain, threads: int = 1) -> EntropyMatrix:
    """
    All N^2 trajectory entropies of an irreducible chain; the diagonal holds
    return-trajectory entropies. Destinations are processed independently,
    on up to ``threads`` worker threads.
    """
    if not is_irreducible(chain):
        raise NotIrreducible("the entropy matrix needs an irreducible chain")
    values = np.zeros((chain.n_states, chain.n_states))
    destinations = range(chain.n_states)
    if threads > 1 and chain.n_states > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            columns = list(
                pool.map(lambda d: _destination_column(chain, d), destinations)
            )
    else:
        columns = [_destination_column(chain, d) for d in destinations]
    for d, column in enumerate(columns):
        values[:, d] = column
    log.debug("entropy matrix computed for %d states", chain.n_states)
    return EntropyMatrix(labels=chain.labels, values=values)
