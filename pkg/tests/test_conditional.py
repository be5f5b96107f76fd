import itertools
import math

import numpy as np
import pytest
from conftest import random_strongly_connected
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from trajent.handlers import chain_core
from trajent.handlers import conditional as cond
from trajent.handlers.linalg_absorb import absorption_probabilities
from trajent.handlers.trajectory_entropy import entropy_column, trajectory_entropy
from trajent.schemas.chain import MarkovChain
from trajent.schemas.entropy import CondQuery
from trajent.utils.errors import (
    AlwaysPassesThroughU,
    DestinationInVia,
    ImpossibleConditioning,
    NeverPassesThroughU,
    OutOfRange,
    StatesNotDistinct,
)


def query(chain, s, d, *via):
    return CondQuery(
        source=chain.state(s),
        destination=chain.state(d),
        via=tuple(chain.state(u) for u in via),
    )


@pytest.mark.parametrize(
    "p, expected", [(0.5, 1.0), (0.0, 0.0), (1.0, 0.0), (0.375, 0.9544)]
)
def test_bernoulli_entropy(p, expected):
    assert cond.bernoulli_entropy(p) == pytest.approx(expected, abs=5e-5)


@pytest.mark.parametrize("p", [-0.1, 1.5])
def test_bernoulli_entropy_range(p):
    with pytest.raises(OutOfRange):
        cond.bernoulli_entropy(p)


def test_avoid_transform_kills_branch_into_avoided_state(five_state_chain):
    transformed = cond.avoid_transform(five_state_chain, "4", "5")
    np.testing.assert_allclose(transformed.matrix[2], [0, 1, 0, 0, 0])
    np.testing.assert_allclose(transformed.matrix[0], [0, 0.4, 0.6, 0, 0])
    np.testing.assert_array_equal(transformed.matrix[3], [0, 0, 0, 1, 0])
    np.testing.assert_array_equal(transformed.matrix[4], [0, 0, 0, 0, 1])
    assert transformed.matrix[:3, 3].sum() == 0.0


def test_avoid_transform_of_unreachable_state_only_absorbs():
    chain = chain_core.build_chain(
        ["s", "x", "u", "d"],
        [[0, 0.5, 0, 0.5], [0, 0, 0, 1], [0, 0, 0, 1], [1, 0, 0, 0]],
    )
    transformed = cond.avoid_transform(chain, "u", "d")
    np.testing.assert_allclose(transformed.matrix[:2], chain.matrix[:2])


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 8))
def test_avoid_transform_is_stochastic(seed, n):
    chain = random_strongly_connected(np.random.default_rng(seed), n)
    transformed = cond.avoid_transform(chain, 0, n - 1)
    np.testing.assert_allclose(transformed.matrix.sum(axis=1), 1.0, atol=1e-9)
    # rows that can still reach the destination never enter the avoided state
    live = absorption_probabilities(chain, 0, n - 1).a_d > 1e-12
    assert transformed.matrix[live, 0].sum() == 0.0


def test_entropy_avoiding(five_state_chain):
    assert cond.entropy_avoiding(five_state_chain, "1", "5", "4") == pytest.approx(
        0.9710, abs=5e-5
    )
    assert cond.entropy_avoiding(five_state_chain, "1", "3", "5") == 0.0


def test_avoiding_unreachable_state_changes_nothing():
    chain = chain_core.build_chain(
        ["s", "x", "u", "d"],
        [[0, 0.5, 0, 0.5], [0.5, 0, 0, 0.5], [0, 0, 0, 1], [1, 0, 0, 0]],
    )
    assert cond.entropy_avoiding(chain, "s", "d", "u") == pytest.approx(
        trajectory_entropy(chain, "s", "d")
    )


def test_avoiding_a_sure_state_is_infeasible():
    chain = chain_core.build_chain(
        ["s", "u", "d"], [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    )
    with pytest.raises(AlwaysPassesThroughU):
        cond.entropy_avoiding(chain, "s", "d", "u")


@pytest.mark.parametrize("u, expected", [("4", 0.0), ("3", 1.0)])
def test_entropy_via_single(five_state_chain, u, expected):
    value = cond.entropy_via_single(five_state_chain, "1", "5", u)
    assert value == pytest.approx(expected, abs=1e-12)


def test_entropy_via_sure_state_is_unconditional():
    chain = chain_core.build_chain(
        ["s", "u", "d"], [[0.5, 0.5, 0], [0, 0, 1], [1, 0, 0]]
    )
    assert cond.entropy_via_single(chain, "s", "d", "u") == pytest.approx(
        trajectory_entropy(chain, "s", "d")
    )


def test_entropy_via_unvisited_state_is_infeasible():
    chain = chain_core.build_chain(
        ["s", "u", "d"], [[0, 0, 1], [0, 0, 1], [1, 0, 0]]
    )
    with pytest.raises(NeverPassesThroughU):
        cond.entropy_via_single(chain, "s", "d", "u")


def test_single_conditioning_needs_distinct_states(five_state_chain):
    with pytest.raises(StatesNotDistinct):
        cond.entropy_via_single(five_state_chain, "1", "5", "1")
    with pytest.raises(StatesNotDistinct):
        cond.entropy_avoiding(five_state_chain, "1", "5", "5")


def test_chain_rule_on_five_state_chain(five_state_chain):
    alpha = 0.375
    total = (
        alpha * cond.entropy_via_single(five_state_chain, "1", "5", "4")
        + (1 - alpha) * cond.entropy_avoiding(five_state_chain, "1", "5", "4")
        + cond.bernoulli_entropy(alpha)
    )
    assert total == pytest.approx(1.5613, abs=5e-5)
    assert total == pytest.approx(trajectory_entropy(five_state_chain, "1", "5"))


def test_sequence_three_then_two(five_state_chain):
    result = cond.entropy_via_sequence(
        five_state_chain, query(five_state_chain, "1", "5", "3", "2")
    )
    assert result.entropy == 0.0
    assert result.per_leg == [0.0, 0.0, 0.0]
    assert result.alphas == pytest.approx([0.25, 0.5])
    assert result.probability == pytest.approx(0.375)


def test_sequence_through_four(five_state_chain):
    result = cond.entropy_via_sequence(
        five_state_chain, query(five_state_chain, "1", "5", "4")
    )
    assert result.entropy == 0.0
    assert result.probability == pytest.approx(0.375)


def test_empty_sequence_is_unconditional(five_state_chain):
    result = cond.entropy_via_sequence(
        five_state_chain, query(five_state_chain, "1", "5")
    )
    assert result.entropy == pytest.approx(1.5613, abs=5e-5)
    assert len(result.per_leg) == 1
    assert result.alphas == []


def test_entropies_do_not_add_along_a_path(five_state_chain):
    h14 = trajectory_entropy(five_state_chain, "1", "4")
    h45 = trajectory_entropy(five_state_chain, "4", "5")
    assert h14 + h45 == pytest.approx(3.18, abs=0.005)
    assert cond.entropy_via_single(five_state_chain, "1", "5", "4") == pytest.approx(
        0.0, abs=1e-12
    )


def test_impossible_leg_is_reported(five_state_chain):
    with pytest.raises(ImpossibleConditioning) as exc:
        cond.entropy_via_sequence(
            five_state_chain, query(five_state_chain, "1", "5", "2", "2")
        )
    assert exc.value.leg == 1


def test_destination_cannot_be_intermediate(five_state_chain):
    with pytest.raises(DestinationInVia):
        query(five_state_chain, "1", "5", "3", "5")


def test_sequence_agrees_with_single_state_formula(five_state_chain):
    for u in ["2", "3", "4"]:
        sequence = cond.entropy_via_sequence(
            five_state_chain, query(five_state_chain, "1", "5", u)
        )
        single = cond.entropy_via_single(five_state_chain, "1", "5", u)
        assert sequence.entropy == pytest.approx(single, abs=1e-9)


def test_revealed_information(five_state_chain):
    gain = cond.revealed_information(
        five_state_chain, query(five_state_chain, "1", "5", "4")
    )
    assert gain == pytest.approx(1.5613, abs=5e-5)


def test_revealed_information_reuses_solved_result(five_state_chain):
    q = query(five_state_chain, "1", "5", "3")
    solved = cond.entropy_via_sequence(five_state_chain, q)
    assert cond.revealed_information(
        five_state_chain, q, solved=solved
    ) == cond.revealed_information(five_state_chain, q)
    stale = solved.model_copy(update={"entropy": 0.25})
    gain = cond.revealed_information(five_state_chain, q, solved=stale)
    assert gain == pytest.approx(1.5613 - 0.25, abs=5e-5)


def test_predictability_profile(five_state_chain):
    steps = cond.predictability_profile(
        five_state_chain, query(five_state_chain, "1", "5", "3", "2")
    )
    assert [step.entropy for step in steps] == pytest.approx(
        [1.5613, 1.0, 0.0], abs=5e-5
    )


def test_closed_class_outside_the_walk_does_not_block_conditioning(
    isolated_state_chain,
):
    chain = isolated_state_chain
    assert cond.entropy_via_single(chain, "1", "5", "3") == pytest.approx(1.0)
    assert cond.entropy_avoiding(chain, "1", "5", "4") == pytest.approx(
        0.9710, abs=5e-5
    )
    result = cond.entropy_via_sequence(chain, query(chain, "1", "5", "3", "2"))
    assert result.entropy == 0.0
    assert result.probability == pytest.approx(0.375)
    transformed = cond.avoid_transform(chain, "4", "5", source="1")
    np.testing.assert_allclose(transformed.matrix.sum(axis=1), 1.0)
    np.testing.assert_array_equal(transformed.matrix[5], [0, 0, 0, 0, 0, 1])


def test_sequence_set_gap_without_detours():
    eps0, eps1 = 0.3, 0.6
    q = eps0 * eps1 / (1 - eps0 * (1 - eps1))
    expected = cond.bernoulli_entropy(eps0) - cond.bernoulli_entropy(q)
    assert cond.sequence_set_gap(eps0, eps1, 1) == pytest.approx(expected)


def test_sequence_set_gap_is_positive_with_many_detours():
    gap = cond.sequence_set_gap(0.5, 0.5, 16)
    assert gap > 0
    assert gap == pytest.approx(1 - cond.bernoulli_entropy(1 / 3) + 8 / 3)


@settings(max_examples=200, deadline=None)
@given(
    eps0=st.floats(0.01, 0.99),
    eps1=st.floats(0.01, 1.0),
    m=st.integers(1, 1024),
)
def test_sequence_set_gap_lower_bound(eps0, eps1, m):
    bound = cond.sequence_set_gap_lower_bound(eps0, eps1, m)
    assert cond.sequence_set_gap(eps0, eps1, m) >= bound - 1e-12


@settings(max_examples=200, deadline=None)
@given(
    eps0=st.floats(0.01, 0.99),
    eps1=st.floats(0.01, 1.0),
    m=st.integers(2, 2**20),
)
def test_sequence_set_gap_positive_with_enough_detours(eps0, eps1, m):
    assume(math.log2(m) > 1 + eps0 * eps1 / (1 - eps0) + 1e-9)
    assert cond.sequence_set_gap(eps0, eps1, m) > 0


@pytest.mark.parametrize("args", [(0.0, 0.5, 2), (0.5, 0.0, 2), (0.5, 0.5, 0)])
def test_sequence_set_gap_range(args):
    with pytest.raises(OutOfRange):
        cond.sequence_set_gap(*args)


@pytest.fixture(scope="module")
def random_population() -> list[MarkovChain]:
    rng = np.random.default_rng(2024)
    return [
        random_strongly_connected(rng, int(rng.integers(3, 9)), rng.uniform(0.1, 0.6))
        for _ in range(1000)
    ]


def test_avoid_transform_is_stochastic_on_population(random_population):
    for chain in random_population:
        for u, d in itertools.permutations(range(chain.n_states), 2):
            rows = cond.avoid_transform(chain, u, d).matrix.sum(axis=1)
            np.testing.assert_allclose(rows, 1.0, atol=1e-9)


def test_chain_rule_on_random_chains(random_population):
    checked = 0
    for chain in random_population:
        n = chain.n_states
        for d in range(n):
            total = entropy_column(chain, d)
            for u in range(n):
                if u == d:
                    continue
                absorption = absorption_probabilities(chain, u, d)
                avoiding = entropy_column(cond.avoid_transform(chain, u, d), d)
                # H_sd|u = H(s -> u avoiding d) + H_ud
                to_u = entropy_column(cond.avoid_transform(chain, d, u), u)
                for s in range(n):
                    alpha = absorption.alpha(s)
                    if s in (u, d) or not 1e-9 < alpha < 1 - 1e-9:
                        continue
                    via_u = to_u[s] + total[u]
                    identity = (
                        alpha * via_u
                        + (1 - alpha) * avoiding[s]
                        + cond.bernoulli_entropy(alpha)
                    )
                    assert math.isclose(
                        identity, total[s], rel_tol=1e-9, abs_tol=1e-9
                    )
                    checked += 1
        s, u, d = 0, 1, n - 1
        if absorption_probabilities(chain, u, d).alpha(s) <= 1e-9:
            continue
        result = cond.entropy_via_sequence(chain, query(chain, s, d, u))
        expected = trajectory_entropy(cond.avoid_transform(chain, d, u), s, u)
        assert result.entropy == pytest.approx(
            expected + trajectory_entropy(chain, u, d), abs=1e-9
        )
    assert checked > 50_000
