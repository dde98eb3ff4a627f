from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vcsp import lp as lpmod
from vcsp.lp import (
    LinearProgram,
    LpConstraint,
    LpVariable,
    dump_lp,
    homogenized_rows,
    verify_solution,
)
from vcsp.lp_wide import WideSystem, solve_distribution_system
from vcsp.structures import InputError


def simple_lp(sense="min"):
    return LinearProgram(
        [LpVariable("x"), LpVariable("y")],
        [
            LpConstraint.of({"x": 1, "y": 1}, ">=", 1),
            LpConstraint.of({"x": 1}, "<=", 3),
            LpConstraint.of({"y": 1}, "<=", 3),
        ],
        {"x": Fraction(2), "y": Fraction(3)},
        sense,
    )


def test_minimize_simple():
    sol = lpmod.solve(simple_lp())
    assert sol.status == lpmod.OPTIMAL
    assert sol.objective_value == 2
    assert sol.values["x"] == 1 and sol.values["y"] == 0
    assert verify_solution(simple_lp(), sol)


def test_maximize_simple():
    sol = lpmod.solve(simple_lp("max"))
    assert sol.status == lpmod.OPTIMAL
    assert sol.objective_value == 15
    assert verify_solution(simple_lp("max"), sol)


def test_fractional_optimum():
    lp = LinearProgram(
        [LpVariable("x"), LpVariable("y")],
        [
            LpConstraint.of({"x": 2, "y": 1}, ">=", 1),
            LpConstraint.of({"x": 1, "y": 2}, ">=", 1),
        ],
        {"x": Fraction(1), "y": Fraction(1)},
        "min",
    )
    sol = lpmod.solve(lp)
    assert sol.objective_value == Fraction(2, 3)
    assert verify_solution(lp, sol)


def test_infeasible_with_farkas():
    lp = LinearProgram(
        [LpVariable("x", Fraction(0), Fraction(1))],
        [LpConstraint.of({"x": 1}, ">=", 2)],
        {"x": Fraction(1)},
        "min",
    )
    sol = lpmod.solve(lp)
    assert sol.status == lpmod.INFEASIBLE
    assert sol.dual_or_farkas is not None
    assert verify_solution(lp, sol)


def test_unbounded():
    lp = LinearProgram(
        [LpVariable("x")],
        [LpConstraint.of({"x": 1}, ">=", 0)],
        {"x": Fraction(-1)},
        "min",
    )
    sol = lpmod.solve(lp)
    assert sol.status == lpmod.UNBOUNDED


def test_free_variable():
    lp = LinearProgram(
        [LpVariable("x", None, None)],
        [LpConstraint.of({"x": 1}, ">=", -5)],
        {"x": Fraction(1)},
        "min",
    )
    sol = lpmod.solve(lp)
    assert sol.objective_value == -5
    assert verify_solution(lp, sol)


def test_equality_and_fixed_bounds():
    lp = LinearProgram(
        [LpVariable("x", Fraction(2), Fraction(2)), LpVariable("y")],
        [LpConstraint.of({"x": 1, "y": 1}, "==", 5)],
        {"y": Fraction(1)},
        "min",
    )
    sol = lpmod.solve(lp)
    assert sol.objective_value == 3
    assert sol.values["x"] == 2


def test_validation_errors():
    with pytest.raises(InputError):
        lpmod.solve(LinearProgram([LpVariable("x")], [], {"q": Fraction(1)}))
    # contradictory bounds are a trivially infeasible model, not an error
    sol = lpmod.solve(LinearProgram(
        [LpVariable("x", Fraction(1), Fraction(0))], [], {}
    ))
    assert sol.status == lpmod.INFEASIBLE


def test_determinism():
    lp = simple_lp()
    a = lpmod.solve(lp)
    b = lpmod.solve(lp)
    assert a.values == b.values and a.objective_value == b.objective_value


def test_homogenized_rows_cover_bounds():
    lp = simple_lp()
    rows = homogenized_rows(lp)
    # three constraint rows plus one lower bound row per variable
    assert len(rows) == 5


def test_dump_lp_sections():
    text = dump_lp(simple_lp())
    for token in ("Minimize", "Subject To", "Bounds", "End"):
        assert token in text
    assert "2 x" in text and "3 y" in text


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_random_lps_verify(data):
    n = data.draw(st.integers(1, 3))
    m = data.draw(st.integers(1, 3))
    names = [f"v{i}" for i in range(n)]
    variables = [LpVariable(nm, Fraction(0), Fraction(5)) for nm in names]
    constraints = []
    for _ in range(m):
        coeffs = {
            nm: Fraction(data.draw(st.integers(-3, 3))) for nm in names
        }
        rel = data.draw(st.sampled_from(["<=", ">=", "=="]))
        rhs = Fraction(data.draw(st.integers(-4, 8)))
        constraints.append(LpConstraint.of(coeffs, rel, rhs))
    objective = {
        nm: Fraction(data.draw(st.integers(-3, 3))) for nm in names
    }
    lp = LinearProgram(variables, constraints, objective, "min")
    sol = lpmod.solve(lp)
    assert sol.status in (lpmod.OPTIMAL, lpmod.INFEASIBLE)
    assert verify_solution(lp, sol)


# ---------------------------------------------------------------------------
# wide distribution systems


def test_wide_feasible():
    # rows: a <= 1; columns are candidate generators
    matrix = np.array([[1], [0]], dtype=np.int64)
    status, values = solve_distribution_system(WideSystem(matrix, [1]))
    assert status == "feasible"
    assert sum(values.values()) == 1
    # check the row inequality holds
    assert sum(values.get(g, 0) * int(matrix[g][0]) for g in range(2)) <= 1


def test_wide_infeasible_margin():
    # every column violates  col . w <= b  once w sums to 1
    matrix = np.array([[2], [3]], dtype=np.int64)
    status, y = solve_distribution_system(WideSystem(matrix, [1]))
    assert status == "infeasible"
    assert all(v >= 0 for v in y)
    # normalized certificate: every column's margin is at least one
    for g in range(2):
        margin = int(matrix[g][0]) * y[0] - 1 * y[0]
        assert margin >= 1


def test_wide_rejects_bad_input():
    with pytest.raises(ValueError):
        WideSystem(np.zeros((2, 2), dtype=np.int64), [1])
    with pytest.raises(ValueError):
        WideSystem(np.zeros((2, 2), dtype=np.int64), [1, -1])


def test_wide_multirow():
    # w on columns (1,0) and (0,1): need w0 <= 1/3 and w1 <= 1/3 -> infeasible
    matrix = np.array([[3, 0], [0, 3]], dtype=np.int64)
    status, y = solve_distribution_system(WideSystem(matrix, [1, 1]))
    assert status == "infeasible"
    for g in range(2):
        margin = sum(int(matrix[g][i]) * y[i] for i in range(2)) \
            - sum(y[i] for i in range(2))
        assert margin >= 1
    # relaxing the rhs makes it feasible
    status2, values = solve_distribution_system(
        WideSystem(matrix, [2, 2])
    )
    assert status2 == "feasible"
    assert sum(values.values()) == 1
