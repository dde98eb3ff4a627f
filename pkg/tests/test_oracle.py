import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vcsp.operations import Operation
from vcsp.oracle import (
    BudgetExceeded,
    brute_force_opt,
    enumerate_operations,
)
from vcsp.structures import measure

from conftest import structure


def test_triangle_opt(triangle, soft_neq):
    result = brute_force_opt(triangle, soft_neq)
    assert result.opt_value == 1
    # lexicographically least among the six cost-1 assignments
    assert result.argmin == (0, 0, 1)
    assert measure(triangle, soft_neq, result.argmin) == 1


def test_crisp_triangle_infinite(triangle, crisp_neq):
    result = brute_force_opt(triangle, crisp_neq)
    assert result.opt_value.is_infinite
    assert result.argmin is None


def test_empty_instance(soft_neq):
    inst = structure(3, [0] * 9)
    result = brute_force_opt(inst, soft_neq)
    assert result.opt_value == 0
    assert result.argmin == (0, 0, 0)


def test_budget(triangle, soft_neq):
    with pytest.raises(BudgetExceeded):
        brute_force_opt(triangle, soft_neq, budget=7)
    assert brute_force_opt(triangle, soft_neq, budget=8).opt_value == 1


def test_fractional_weights(soft_neq):
    inst = structure(2, [0, "1/3", "1/2", 0])
    result = brute_force_opt(inst, soft_neq)
    # both off-diagonal weights hit cost-0 entries at unequal values
    assert result.opt_value == 0
    assert result.argmin == (0, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 3), st.integers(2, 3), st.data())
def test_oracle_matches_direct_minimum(d, n_vars, data):
    entries = st.one_of(st.integers(0, 5), st.just("inf"))
    language = structure(
        d, [data.draw(entries) for _ in range(d * d)]
    )
    inst = structure(
        n_vars, [data.draw(st.integers(0, 2)) for _ in range(n_vars ** 2)]
    )
    result = brute_force_opt(inst, language)
    values = [
        measure(inst, language, h)
        for h in itertools.product(range(d), repeat=n_vars)
    ]
    assert result.opt_value == min(values)
    if result.argmin is not None:
        assert measure(inst, language, result.argmin) == result.opt_value
        # lexicographically least argmin
        for h in itertools.product(range(d), repeat=n_vars):
            if h == result.argmin:
                break
            assert measure(inst, language, h) > result.opt_value
    else:
        assert result.opt_value.is_infinite


def test_enumerate_operations_count_and_order():
    ops = list(enumerate_operations(2, 1))
    assert len(ops) == 4
    assert ops[0].table == (0, 0) and ops[-1].table == (1, 1)
    with pytest.raises(BudgetExceeded):
        list(enumerate_operations(3, 2, budget=10))


def test_enumerate_symmetric_only():
    ops = list(enumerate_operations(2, 2, symmetric_only=True))
    # one free value per multiset orbit: 2^3
    assert len(ops) == 8
    from vcsp.operations import is_symmetric

    assert all(is_symmetric(op) for op in ops)
    assert Operation(2, 2, (0, 0, 0, 1)) in ops
