"""Chain construction, local and stationary entropies, trajectory probability."""

import logging
import math
from functools import reduce
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.csgraph
import scipy.special

from trajent.schemas.chain import Distribution, MarkovChain, StateId, StateRef
from trajent.utils.errors import DestinationRevisited, InputError, NotIrreducible

log = logging.getLogger(__name__)

LN2 = math.log(2.0)


def build_chain(labels: Sequence[str], rows) -> MarkovChain:
    """
    Create a validated chain from labels and a square matrix of rows.

    Raises NonSquare, NegativeEntry, RowSumViolation or DuplicateLabel.
    """
    return MarkovChain(labels=tuple(labels), matrix=rows)


def local_entropies(chain: MarkovChain) -> np.ndarray:
    """Entropy in bits of every row, with 0 log 0 taken as 0."""
    return scipy.special.entr(chain.matrix).sum(axis=1) / LN2


def local_entropy(chain: MarkovChain, state: StateRef) -> float:
    """Entropy in bits of the outgoing distribution of one state."""
    return float(scipy.special.entr(chain.row(state)).sum() / LN2)


def _adjacency(chain: MarkovChain) -> scipy.sparse.csr_matrix:
    return scipy.sparse.csr_matrix(chain.matrix > 0)


def strongly_connected_components(chain: MarkovChain) -> list[list[StateId]]:
    """Strongly connected components, each listed in state order."""
    n_comps, comp_labels = scipy.sparse.csgraph.connected_components(
        _adjacency(chain), directed=True, connection="strong"
    )
    components: list[list[StateId]] = [[] for _ in range(n_comps)]
    for state in chain.states:
        components[comp_labels[state.index]].append(state)
    return sorted(components, key=lambda comp: comp[0].index)


def is_irreducible(chain: MarkovChain) -> bool:
    n_comps, _ = scipy.sparse.csgraph.connected_components(
        _adjacency(chain), directed=True, connection="strong"
    )
    return n_comps == 1


def period(chain: MarkovChain) -> int:
    """
    The period of an irreducible chain: the gcd of its cycle lengths.

    Computed from BFS levels: every edge i -> j contributes
    level(i) + 1 - level(j) to the gcd.
    """
    if not is_irreducible(chain):
        raise NotIrreducible("the period is only defined for an irreducible chain")
    levels = scipy.sparse.csgraph.shortest_path(
        _adjacency(chain), directed=True, unweighted=True, indices=0
    )
    rows, cols = np.nonzero(chain.matrix > 0)
    shifts = (levels[rows] + 1 - levels[cols]).astype(int)
    return reduce(math.gcd, (abs(int(x)) for x in shifts), 0)


def can_reach(chain: MarkovChain, targets: Iterable[int]) -> np.ndarray:
    """Mask of states with a positive-probability path to any target."""
    reverse = _adjacency(chain).T.tocsr()
    mask = np.zeros(chain.n_states, dtype=bool)
    for target in targets:
        if mask[target]:
            continue
        order = scipy.sparse.csgraph.breadth_first_order(
            reverse, target, directed=True, return_predecessors=False
        )
        mask[order] = True
    return mask


def reachable_from(chain: MarkovChain, source: int) -> np.ndarray:
    """Mask of states reachable from ``source`` (including itself)."""
    mask = np.zeros(chain.n_states, dtype=bool)
    order = scipy.sparse.csgraph.breadth_first_order(
        _adjacency(chain), source, directed=True, return_predecessors=False
    )
    mask[order] = True
    return mask


def stationary_distribution(chain: MarkovChain) -> Distribution:
    """
    Solve pi = pi P with sum(pi) = 1 as a linear system.

    Only irreducibility is required; periodic chains still have a unique
    solution.
    """
    if not is_irreducible(chain):
        raise NotIrreducible(
            "the stationary distribution is only unique for an irreducible chain"
        )
    n = chain.n_states
    system = chain.matrix.T - np.eye(n)
    system[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    pi = scipy.linalg.solve(system, rhs)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    return Distribution(labels=chain.labels, probs=pi)


def entropy_rate(chain: MarkovChain) -> float:
    """Stationary-weighted average of the local entropies, in bits per step."""
    pi = stationary_distribution(chain)
    return float(pi.probs @ local_entropies(chain))


def trajectory_probability(chain: MarkovChain, states: Sequence[StateRef]) -> float:
    """
    Probability of following ``states`` step by step, 0 if any step is
    impossible. The last state is the destination and may not appear in
    between.
    """
    if len(states) < 2:
        raise InputError("a trajectory needs at least a source and a destination")
    path = [chain.index_of(state) for state in states]
    if path[-1] in path[1:-1]:
        raise DestinationRevisited(
            f"destination {chain.labels[path[-1]]} occurs inside the path"
        )
    steps = chain.matrix[path[:-1], path[1:]]
    return float(np.prod(steps))


def split_state(chain: MarkovChain, state: StateRef) -> tuple[MarkovChain, StateId]:
    """
    Redirect every transition into ``state`` to a new absorbing copy.

    The original state keeps its outgoing row but has no incoming edges, so
    trajectories from it back to itself become trajectories to the copy.
    """
    s = chain.index_of(state)
    n = chain.n_states
    label = chain.labels[s] + "'"
    while label in chain.labels:
        label += "'"

    matrix = np.zeros((n + 1, n + 1))
    matrix[:n, :n] = chain.matrix
    matrix[:n, n] = chain.matrix[:, s]
    matrix[:n, s] = 0.0
    matrix[n, n] = 1.0
    split = MarkovChain(labels=chain.labels + (label,), matrix=matrix)
    log.debug("split state %s into %s", chain.labels[s], label)
    return split, StateId(index=n, label=label)

