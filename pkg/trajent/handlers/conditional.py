"""
Conditional trajectory entropies.

Conditioning on avoiding a state is done by transforming the chain: the
avoided state u and the destination d become absorbing, and every remaining
transition i -> j is rescaled by a_jd / a_id, the ratio of the probabilities
of being absorbed by d. The transformed chain has exactly the law of the
original trajectories conditioned on not visiting u, so its plain trajectory
entropy is the conditional one. Conditioning on an ordered sequence of
intermediate states splits the trajectory into legs that each avoid d.
"""

import logging
import math
from typing import Optional

import numpy as np
import scipy.stats

from trajent.handlers.chain_core import split_state
from trajent.handlers.linalg_absorb import (
    ABSORPTION_EPS,
    absorption_probabilities,
)
from trajent.handlers.trajectory_entropy import trajectory_entropy
from trajent.schemas.absorb import AbsorptionResult
from trajent.schemas.chain import MarkovChain, StateRef
from trajent.schemas.entropy import CondQuery, CondResult
from trajent.utils.errors import (
    AlwaysPassesThroughU,
    ImpossibleConditioning,
    NeverPassesThroughU,
    OutOfRange,
    SourceCannotReachDestination,
    StatesNotDistinct,
)

log = logging.getLogger(__name__)


def bernoulli_entropy(p: float) -> float:
    """Binary entropy h(p) in bits."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange("p", p)
    return float(scipy.stats.entropy([p, 1.0 - p], base=2))


def _snap_absorption(a_d: np.ndarray) -> np.ndarray:
    a_d = np.where(a_d <= ABSORPTION_EPS, 0.0, a_d)
    return np.where(a_d >= 1.0 - ABSORPTION_EPS, 1.0, a_d)


def _avoid(
    chain: MarkovChain, u: StateRef, d: StateRef, source: Optional[StateRef] = None
) -> tuple[MarkovChain, AbsorptionResult]:
    absorption = absorption_probabilities(chain, u, d, source)
    u_idx, d_idx = absorption.target_u.index, absorption.target_d.index
    a_d = _snap_absorption(absorption.a_d)

    matrix = np.array(chain.matrix)
    matrix[[u_idx, d_idx], :] = 0.0
    matrix[[u_idx, d_idx], [u_idx, d_idx]] = 1.0
    rescale = a_d > 0
    rescale[[u_idx, d_idx]] = False
    matrix[rescale] *= a_d[np.newaxis, :] / a_d[rescale][:, np.newaxis]
    # exact row sums only hold up to rounding in a_d
    matrix[rescale] /= matrix[rescale].sum(axis=1, keepdims=True)
    return MarkovChain(labels=chain.labels, matrix=matrix), absorption


def avoid_transform(
    chain: MarkovChain, u: StateRef, d: StateRef, source: Optional[StateRef] = None
) -> MarkovChain:
    """
    The chain whose s -> d trajectories follow the original law conditioned
    on never visiting u. Both u and d are absorbing in the result and every
    transition into u has probability zero. With ``source`` given, only the
    states reachable from it need certain absorption.
    """
    transformed, _ = _avoid(chain, u, d, source)
    return transformed


def _with_distinct_endpoints(
    chain: MarkovChain, s: StateRef, d: StateRef
) -> tuple[MarkovChain, int, int]:
    s_idx, d_idx = chain.index_of(s), chain.index_of(d)
    if s_idx == d_idx:
        chain, copy = split_state(chain, d_idx)
        d_idx = copy.index
    return chain, s_idx, d_idx


def _check_distinct(chain: MarkovChain, s: int, d: int, u: int) -> None:
    if u in (s, d):
        raise StatesNotDistinct(
            f"source, destination and conditioning state must differ, got "
            f"{chain.labels[s]}, {chain.labels[d]}, {chain.labels[u]}"
        )


def entropy_avoiding(
    chain: MarkovChain, s: StateRef, d: StateRef, u: StateRef
) -> float:
    """Entropy of T_sd given that it never visits u."""
    chain, s_idx, d_idx = _with_distinct_endpoints(chain, s, d)
    u_idx = chain.index_of(u)
    _check_distinct(chain, s_idx, d_idx, u_idx)

    transformed, absorption = _avoid(chain, u_idx, d_idx, s_idx)
    if _snap_absorption(absorption.a_d)[s_idx] == 0.0:
        raise AlwaysPassesThroughU(
            f"every trajectory from {chain.labels[s_idx]} to "
            f"{chain.labels[d_idx]} visits {chain.labels[u_idx]}"
        )
    return trajectory_entropy(transformed, s_idx, d_idx)


def entropy_via_single(
    chain: MarkovChain, s: StateRef, d: StateRef, u: StateRef
) -> float:
    """
    Entropy of T_sd given that it visits u, from the chain rule
    H_sd = a H_sd|u + (1 - a) H_sd|not u + h(a) with a = P(visit u before d).
    """
    chain, s_idx, d_idx = _with_distinct_endpoints(chain, s, d)
    u_idx = chain.index_of(u)
    _check_distinct(chain, s_idx, d_idx, u_idx)

    absorption = absorption_probabilities(chain, u_idx, d_idx, s_idx)
    alpha = absorption.alpha(s_idx)
    if alpha <= ABSORPTION_EPS:
        raise NeverPassesThroughU(
            f"no trajectory from {chain.labels[s_idx]} to {chain.labels[d_idx]} "
            f"visits {chain.labels[u_idx]}"
        )
    total = trajectory_entropy(chain, s_idx, d_idx)
    if _snap_absorption(absorption.a_d)[s_idx] == 0.0:
        return total

    avoiding = entropy_avoiding(chain, s_idx, d_idx, u_idx)
    value = (total - (1.0 - alpha) * avoiding - bernoulli_entropy(alpha)) / alpha
    return value if value > 0.0 else 0.0


def _leg(
    chain: MarkovChain, start: int, end: int, avoided: int, leg: int
) -> tuple[float, float, tuple[str, ...]]:
    if start == end:
        chain, copy = split_state(chain, end)
        end = copy.index
    transformed, absorption = _avoid(chain, avoided, end, start)
    alpha = absorption.alpha(start)
    if _snap_absorption(absorption.a_d)[start] == 0.0:
        raise ImpossibleConditioning(
            f"leg {leg}: {chain.labels[start]} cannot reach "
            f"{chain.labels[end]} without passing {chain.labels[avoided]}",
            leg=leg,
        )
    entropy = trajectory_entropy(transformed, start, end)
    return entropy, alpha, absorption.warnings


def entropy_via_sequence(chain: MarkovChain, query: CondQuery) -> CondResult:
    """
    Entropy of T_sd given that it visits ``query.via`` in order.

    Leg k runs from u_k to u_{k+1} (u_0 = s) on the chain conditioned to
    avoid d; the last leg is the plain trajectory from u_l to d. The legs
    are independent given their endpoints, so their entropies add up.
    """
    s = chain.index_of(query.source)
    d = chain.index_of(query.destination)
    via = [chain.index_of(u) for u in query.via]
    work, s, d = _with_distinct_endpoints(chain, s, d)

    per_leg: list[float] = []
    alphas: list[float] = []
    notes: list[str] = []
    probability = 1.0
    for k, (start, end) in enumerate(zip([s] + via[:-1], via)):
        entropy, alpha, warnings = _leg(work, start, end, d, k)
        per_leg.append(entropy)
        alphas.append(alpha)
        notes.extend(warnings)
        probability *= 1.0 - alpha

    last = via[-1] if via else s
    try:
        per_leg.append(trajectory_entropy(work, last, d))
    except SourceCannotReachDestination as exc:
        raise ImpossibleConditioning(
            f"leg {len(via)}: {exc.detail}", leg=len(via)
        ) from exc

    log.debug("legs for %s: %s", [work.labels[i] for i in via], per_leg)
    return CondResult(
        query=query,
        entropy=math.fsum(per_leg),
        per_leg=per_leg,
        alphas=alphas,
        probability=min(max(probability, 0.0), 1.0),
        warnings=tuple(notes),
    )


def revealed_information(
    chain: MarkovChain, query: CondQuery, solved: Optional[CondResult] = None
) -> float:
    """
    Bits of route uncertainty removed by revealing ``query.via``:
    H_sd - H_sd|via. Negative when the revelation makes the route less
    predictable. Pass ``solved`` to reuse an existing result for ``query``.
    """
    if solved is None:
        solved = entropy_via_sequence(chain, query)
    prior = entropy_via_sequence(chain, query.model_copy(update={"via": ()}))
    return prior.entropy - solved.entropy


def predictability_profile(chain: MarkovChain, query: CondQuery) -> list[CondResult]:
    """Conditional entropy after revealing each prefix of ``query.via``."""
    return [
        entropy_via_sequence(chain, query.model_copy(update={"via": query.via[:k]}))
        for k in range(len(query.via) + 1)
    ]


def sequence_set_gap(eps0: float, eps1: float, m: int) -> float:
    """
    Difference between the entropy conditioned on the ordered sequence (3, 2)
    and on the unordered set {2, 3} for the two-parameter chain family with
    m equiprobable detours: h(e0) - h(q) + (1 - e0) / (1 - e0 (1 - e1)) log m,
    where q = e0 e1 / (1 - e0 (1 - e1)). Positive values mean the sequence
    leaves more uncertainty than the set.
    """
    if not 0.0 < eps0 < 1.0:
        raise OutOfRange("eps0", eps0)
    if not 0.0 < eps1 <= 1.0:
        raise OutOfRange("eps1", eps1)
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise OutOfRange("m", m)
    denominator = 1.0 - eps0 * (1.0 - eps1)
    q = eps0 * eps1 / denominator
    return (
        bernoulli_entropy(eps0)
        - bernoulli_entropy(min(q, 1.0))
        + (1.0 - eps0) / denominator * math.log2(m)
    )


def sequence_set_gap_lower_bound(eps0: float, eps1: float, m: int) -> float:
    """-1 + (1 - e0) / (1 - e0 (1 - e1)) log m, a bound on :func:`sequence_set_gap`."""
    return -1.0 + (1.0 - eps0) / (1.0 - eps0 * (1.0 - eps1)) * math.log2(m)
