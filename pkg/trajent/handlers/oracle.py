"""
Brute-force ground truth: trajectory enumeration and random walks.

Nothing here uses the linear-algebra results, so every closed-form value can
be cross-checked against it on small chains.
"""

import heapq
import logging
import math
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
import scipy.stats

from trajent.handlers.chain_core import can_reach
from trajent.schemas.chain import MarkovChain, StateRef
from trajent.schemas.trajectory import (
    EnumerationResult,
    OracleConfig,
    Trajectory,
    WalkStatistics,
)
from trajent.utils.errors import (
    ImpossibleConditioning,
    InsufficientCoverage,
    LimitsExceeded,
    OutOfRange,
    SourceCannotReachDestination,
    StepLimitExceeded,
)

log = logging.getLogger(__name__)


def enumerate_trajectories(
    chain: MarkovChain,
    s: StateRef,
    d: StateRef,
    config: Optional[OracleConfig] = None,
) -> EnumerationResult:
    """
    Enumerate s -> d trajectories, most probable prefixes first.

    Expansion stops once the mass left in unexpanded prefixes is at most
    ``residual_mass_bound``. Prefixes lighter than residual_mass_bound /
    max_paths are abandoned, and mass flowing into states that cannot reach
    d is counted as lost. When s == d the trajectories are return paths.
    """
    config = config or OracleConfig()
    s_idx, d_idx = chain.index_of(s), chain.index_of(d)
    n = chain.n_states
    max_length = config.max_path_length or 10 * n * n
    floor = config.residual_mass_bound / config.max_paths
    alive = can_reach(chain, [d_idx])
    successors = [np.flatnonzero(chain.matrix[i] > 0) for i in range(n)]

    if not alive[s_idx]:
        return EnumerationResult(
            source=s_idx,
            destination=d_idx,
            trajectories=[],
            covered_mass=0.0,
            lost_mass=1.0,
            residual_mass_bound=config.residual_mass_bound,
        )

    found: list[Trajectory] = []
    lost: list[float] = []
    abandoned: list[float] = []
    heap: list[tuple[float, int, tuple[int, ...]]] = [(-1.0, 0, (s_idx,))]
    pushed = 1
    frontier = 1.0
    limit = None
    while heap and frontier > config.residual_mass_bound:
        if pushed + len(found) > config.max_paths:
            limit = f"more than {config.max_paths} paths"
            break
        neg_p, _, path = heapq.heappop(heap)
        p = -neg_p
        frontier -= p
        if len(path) >= max_length:
            abandoned.append(p)
            limit = f"paths longer than {max_length} states"
            continue
        state = path[-1]
        for j in successors[state]:
            q = p * chain.matrix[state, j]
            if j == d_idx:
                found.append(Trajectory(states=path + (int(j),), probability=q))
            elif not alive[j]:
                lost.append(q)
            elif q < floor:
                abandoned.append(q)
            else:
                heapq.heappush(heap, (-q, pushed, path + (int(j),)))
                pushed += 1
                frontier += q

    uncovered = math.fsum([-entry[0] for entry in heap] + abandoned)
    result = EnumerationResult(
        source=s_idx,
        destination=d_idx,
        trajectories=found,
        covered_mass=math.fsum(t.probability for t in found),
        lost_mass=math.fsum(lost),
        uncovered_mass=uncovered,
        residual_mass_bound=config.residual_mass_bound,
        truncated=uncovered > config.residual_mass_bound,
    )
    log.debug(
        "enumerated %d trajectories %s -> %s, covered %.15f",
        len(found),
        chain.labels[s_idx],
        chain.labels[d_idx],
        result.covered_mass,
    )
    if result.truncated:
        if limit is not None:
            raise LimitsExceeded(
                f"enumeration stopped at {limit} with {uncovered:.3e} of the "
                "mass unexplored",
                partial=result,
            )
        log.warning("enumeration left %.3e of the mass unexplored", uncovered)
    return result


def _entropy(probabilities: Sequence[float]) -> float:
    value = float(scipy.stats.entropy(np.asarray(probabilities), base=2))
    return 0.0 if value <= 1e-12 else value


def oracle_entropy(result: EnumerationResult) -> float:
    """Entropy of the (renormalized) enumerated trajectory distribution."""
    required = 1.0 - result.residual_mass_bound
    if not result.trajectories or result.covered_mass < required:
        raise InsufficientCoverage(result.covered_mass, required)
    return _entropy([t.probability for t in result.trajectories])


def _filtered_entropy(
    result: EnumerationResult, keep: Callable[[Trajectory], bool], what: str
) -> float:
    probabilities = [t.probability for t in result.trajectories if keep(t)]
    if math.fsum(probabilities) <= 0.0:
        raise ImpossibleConditioning(f"no enumerated trajectory {what}")
    if result.truncated:
        log.warning("conditioning a truncated enumeration")
    return _entropy(probabilities)


def _visits_in_order(via: Sequence[int], interior: Sequence[int]) -> bool:
    remaining = iter(interior)
    return all(u in remaining for u in via)


def oracle_conditional_sequence(result: EnumerationResult, via: Sequence[int]) -> float:
    """
    Entropy of the trajectories whose interior states contain ``via`` as a
    subsequence (other states may come in between).
    """
    via = [int(u) for u in via]
    if not via:
        return oracle_entropy(result)
    return _filtered_entropy(
        result,
        lambda t: _visits_in_order(via, t.interior),
        f"visits {via} in order",
    )


def oracle_conditional_set(result: EnumerationResult, states: Iterable[int]) -> float:
    """Entropy of the trajectories visiting every state of ``states``, any order."""
    required = {int(u) for u in states}
    if not required:
        return oracle_entropy(result)
    return _filtered_entropy(
        result,
        lambda t: required.issubset(t.interior),
        f"visits all of {sorted(required)}",
    )


def oracle_conditional_avoid(result: EnumerationResult, u: int) -> float:
    """Entropy of the trajectories that never visit ``u`` in their interior."""
    return _filtered_entropy(
        result, lambda t: u not in t.interior, f"avoids state {u}"
    )


def distribution(
    result: EnumerationResult, keep: Optional[Callable[[Trajectory], bool]] = None
) -> dict[tuple[int, ...], float]:
    """Renormalized trajectory probabilities keyed by state sequence."""
    kept = [t for t in result.trajectories if keep is None or keep(t)]
    total = math.fsum(t.probability for t in kept)
    if total <= 0.0:
        raise ImpossibleConditioning("no enumerated trajectory passes the filter")
    return {t.states: t.probability / total for t in kept}


def total_variation(
    p: dict[tuple[int, ...], float], q: dict[tuple[int, ...], float]
) -> float:
    """Total variation distance between two trajectory distributions."""
    keys = p.keys() | q.keys()
    return 0.5 * math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def simulate_walks(
    chain: MarkovChain,
    s: StateRef,
    d: StateRef,
    n_walks: int,
    rng_seed: int = 0,
    max_steps: int = 10_000,
) -> WalkStatistics:
    """
    Run ``n_walks`` independent walks from s until they reach d.

    Walks are simulated in vectorized batches; batch k draws from child k of
    ``SeedSequence(rng_seed)``, so results only depend on the seed. Visits
    count the starting state; ``hit_fraction[k]`` is the share of walks that
    visited k before d (for k = d, the share absorbed).
    """
    s_idx, d_idx = chain.index_of(s), chain.index_of(d)
    if n_walks < 1:
        raise OutOfRange("n_walks", n_walks)
    if not can_reach(chain, [d_idx])[s_idx]:
        raise SourceCannotReachDestination(
            f"{chain.labels[s_idx]} cannot reach {chain.labels[d_idx]}"
        )

    n = chain.n_states
    cumulative = np.cumsum(chain.matrix, axis=1)
    last_positive = np.array(
        [np.flatnonzero(row > 0)[-1] for row in chain.matrix], dtype=int
    )
    batch = max(1, min(n_walks, 2_000_000 // n))
    sizes = [batch] * (n_walks // batch)
    if n_walks % batch:
        sizes.append(n_walks % batch)
    seeds = np.random.SeedSequence(rng_seed).spawn(len(sizes))

    sums = np.zeros(n)
    squares = np.zeros(n)
    hits = np.zeros(n)
    truncated = 0
    for seed, size in zip(seeds, sizes):
        rng = np.random.default_rng(seed)
        counts = np.zeros((size, n), dtype=np.int64)
        hit = np.zeros((size, n), dtype=bool)
        walkers = np.arange(size)
        state = np.full(size, s_idx)
        counts[:, s_idx] = 1
        hit[:, s_idx] = True
        for _ in range(max_steps):
            if walkers.size == 0:
                break
            draws = rng.random(walkers.size)
            step = (cumulative[state] < draws[:, np.newaxis]).sum(axis=1)
            step = np.minimum(step, last_positive[state])
            arrived = step == d_idx
            hit[walkers[arrived], d_idx] = True
            walkers, state = walkers[~arrived], step[~arrived]
            counts[walkers, state] += 1
            hit[walkers, state] = True
        truncated += walkers.size
        sums += counts.sum(axis=0)
        squares += (counts.astype(np.float64) ** 2).sum(axis=0)
        hits += hit.sum(axis=0)

    if truncated == n_walks:
        raise StepLimitExceeded(1.0)
    if truncated:
        log.warning("%d of %d walks hit the step limit", truncated, n_walks)

    mean = sums / n_walks
    if n_walks > 1:
        variance = np.clip((squares - n_walks * mean**2) / (n_walks - 1), 0.0, None)
    else:
        variance = np.zeros(n)
    fraction = hits / n_walks
    return WalkStatistics(
        source=s_idx,
        destination=d_idx,
        n_walks=n_walks,
        seed=rng_seed,
        mean_visits=mean,
        visits_stderr=np.sqrt(variance / n_walks),
        hit_fraction=fraction,
        hit_stderr=np.sqrt(fraction * (1.0 - fraction) / n_walks),
        truncated_fraction=truncated / n_walks,
    )
