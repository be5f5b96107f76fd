"""Absorbing transforms, absorption probabilities and the fundamental matrix.

Every linear system goes through :func:`_factorize`, a dense LU
factorization whose factors are reused for all right-hand sides.
"""

import logging
import warnings
from typing import Iterable, Optional

import numpy as np
import scipy.linalg

from trajent.handlers.chain_core import can_reach, reachable_from
from trajent.schemas.absorb import AbsorptionResult, VisitCounts
from trajent.schemas.chain import MarkovChain, StateId, StateRef
from trajent.utils.errors import (
    AbsorptionNotCertain,
    DestinationUnreachable,
    OutOfRange,
    SingularSystem,
    TargetsEqual,
)

log = logging.getLogger(__name__)

ABSORPTION_EPS = 1e-12
"""Absorption probabilities at or below this are treated as exactly zero."""

CONDITIONING_WARN = 1e-9
"""Absorption probabilities below this (but above ABSORPTION_EPS) are flagged."""

LEAK_TOLERANCE = 1e-12


class _Factorization:
    """LU factors of a square system, reusable across right-hand sides."""

    def __init__(self, system: np.ndarray):
        with warnings.catch_warnings():
            warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
            try:
                self._lu = scipy.linalg.lu_factor(system, check_finite=False)
            except (scipy.linalg.LinAlgWarning, np.linalg.LinAlgError) as exc:
                raise SingularSystem(f"linear system is singular: {exc}") from exc
        if not np.all(np.isfinite(self._lu[0])):
            raise SingularSystem("LU factorization produced non-finite values")

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        solution = scipy.linalg.lu_solve(self._lu, rhs, check_finite=False)
        if not np.all(np.isfinite(solution)):
            raise SingularSystem("linear solve produced non-finite values")
        return solution


def _factorize(system: np.ndarray) -> _Factorization:
    return _Factorization(system)


def make_absorbing(chain: MarkovChain, targets: Iterable[StateRef]) -> MarkovChain:
    """Replace the rows of ``targets`` by unit self-loops."""
    indices = sorted({chain.index_of(t) for t in targets})
    if not indices:
        raise OutOfRange("targets", "empty set")
    matrix = np.array(chain.matrix)
    matrix[indices, :] = 0.0
    matrix[indices, indices] = 1.0
    return MarkovChain(labels=chain.labels, matrix=matrix)


def absorption_probabilities(
    chain: MarkovChain,
    u: StateRef,
    d: StateRef,
    source: Optional[StateRef] = None,
) -> AbsorptionResult:
    """
    Probabilities of absorption by u and by d once both are made absorbing.

    ``a_u[s]`` is the probability that a walk from s visits u before d.
    States that can reach neither target get a_u = a_d = 0. Absorption must
    be certain from every state the walk can touch: the states reachable
    from ``source`` when it is given, otherwise every state that can reach
    u or d.
    """
    u_idx, d_idx = chain.index_of(u), chain.index_of(d)
    if u_idx == d_idx:
        raise TargetsEqual("the two absorbing targets must differ")

    absorbing = make_absorbing(chain, [u_idx, d_idx])
    reaches = can_reach(absorbing, [u_idx, d_idx])
    uncertain = can_reach(absorbing, np.flatnonzero(~reaches))
    if source is None:
        touched = reaches
    else:
        touched = reachable_from(absorbing, chain.index_of(source))
    failing = np.flatnonzero(uncertain & touched)
    if failing.size:
        raise AbsorptionNotCertain([chain.labels[i] for i in failing])

    transient = np.array(
        [i for i in np.flatnonzero(reaches) if i not in (u_idx, d_idx)], dtype=int
    )
    a_u = np.zeros(chain.n_states)
    a_d = np.zeros(chain.n_states)
    a_u[u_idx] = 1.0
    a_d[d_idx] = 1.0
    if transient.size:
        block = absorbing.matrix[np.ix_(transient, transient)]
        rhs = absorbing.matrix[np.ix_(transient, [u_idx, d_idx])]
        solution = _factorize(np.eye(transient.size) - block).solve(rhs)
        a_u[transient] = np.clip(solution[:, 0], 0.0, 1.0)
        a_d[transient] = np.clip(solution[:, 1], 0.0, 1.0)

    notes = []
    for values, name in ((a_u, chain.labels[u_idx]), (a_d, chain.labels[d_idx])):
        weak = (values > ABSORPTION_EPS) & (values < CONDITIONING_WARN)
        for i in np.flatnonzero(weak):
            note = (
                f"absorption probability of {chain.labels[i]} by {name} is "
                f"{values[i]:.3e}, close to zero"
            )
            log.warning(note)
            notes.append(note)

    return AbsorptionResult(
        target_u=StateId(index=u_idx, label=chain.labels[u_idx]),
        target_d=StateId(index=d_idx, label=chain.labels[d_idx]),
        a_u=a_u,
        a_d=a_d,
        warnings=tuple(notes),
    )


class FundamentalSolver:
    """
    Factorization of (I - Q_d) for one destination d, where Q_d is the
    transition matrix with row and column d removed.
    """

    def __init__(self, chain: MarkovChain, d: StateRef):
        self.chain = chain
        self.destination = chain.index_of(d)
        reaches = can_reach(chain, [self.destination])
        if not reaches.all():
            raise DestinationUnreachable(
                [chain.labels[i] for i in np.flatnonzero(~reaches)]
            )
        self.others = np.array(
            [i for i in range(chain.n_states) if i != self.destination], dtype=int
        )
        q = chain.matrix[np.ix_(self.others, self.others)]
        log.debug(
            "factorizing I - Q for destination %s (%d states)",
            chain.labels[self.destination],
            self.others.size,
        )
        self._factors = _factorize(np.eye(self.others.size) - q) if q.size else None

    def weighted(self, weights: np.ndarray) -> np.ndarray:
        """(I - Q_d)^-1 applied to per-state weights (indexed like the chain)."""
        if self._factors is None:
            return np.zeros(0)
        return self._factors.solve(np.asarray(weights)[self.others])

    def visits(self) -> np.ndarray:
        if self._factors is None:
            return np.zeros((0, 0))
        return self._factors.solve(np.eye(self.others.size))

    def position(self, index: int) -> int:
        return int(np.searchsorted(self.others, index))


def expected_visits(chain: MarkovChain, d: StateRef) -> VisitCounts:
    """
    The fundamental matrix (I - Q_d)^-1: expected visits to each state before
    hitting d. Every other state must reach d with positive probability;
    use :func:`restrict_to_reaching` first when that does not hold.
    """
    solver = FundamentalSolver(chain, d)
    rows = np.clip(solver.visits(), 0.0, None)
    states = tuple(StateId(index=int(i), label=chain.labels[i]) for i in solver.others)
    return VisitCounts(
        destination=chain.state(solver.destination), states=states, rows=rows
    )


def restrict_to_reaching(
    chain: MarkovChain, d: StateRef
) -> tuple[MarkovChain, list[StateId]]:
    """
    The sub-chain on the states that can reach d.

    Kept states other than d must not leak probability to dropped states
    (otherwise reaching d is possible but not certain). The row of d itself
    is irrelevant to trajectories ending at d; if it leaks, d is made
    absorbing in the sub-chain.
    """
    d_idx = chain.index_of(d)
    keep = can_reach(chain, [d_idx])
    kept = np.flatnonzero(keep)
    if keep.all():
        return chain, chain.states

    leak = chain.matrix[:, ~keep].sum(axis=1)
    leaking = [i for i in kept if i != d_idx and leak[i] > LEAK_TOLERANCE]
    if leaking:
        raise AbsorptionNotCertain([chain.labels[i] for i in leaking])

    matrix = np.array(chain.matrix[np.ix_(kept, kept)])
    d_pos = int(np.searchsorted(kept, d_idx))
    if leak[d_idx] > LEAK_TOLERANCE:
        matrix[d_pos, :] = 0.0
        matrix[d_pos, d_pos] = 1.0
    labels = tuple(chain.labels[i] for i in kept)
    log.debug(
        "restricted to %d of %d states reaching %s",
        kept.size,
        chain.n_states,
        chain.labels[d_idx],
    )
    sub = MarkovChain(labels=labels, matrix=matrix)
    return sub, [StateId(index=int(i), label=chain.labels[i]) for i in kept]
