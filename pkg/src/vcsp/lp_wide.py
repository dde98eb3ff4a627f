"""Exact phase-1 simplex for wide distribution-feasibility systems.

Decides systems of the shape

    sum_g  w_g * A[g, :] <= b     (componentwise, r inequality rows)
    sum_g  w_g == 1,  w >= 0

where the number of candidate columns g can be far larger than the number
of rows (tens of thousands).  A revised simplex with Bland's rule keeps a
small exact basis inverse; column pricing is screened with a rigorously
error-bounded floating-point pass and finished exactly, so every returned
answer is exact.

Feasible systems yield an exact rational solution w with small support;
infeasible systems yield a Farkas vector y >= 0 over the rows, normalized
so that  A[g, :] . y  >=  b . y + 1  for every column g.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

try:
    from gmpy2 import mpq as _q
except ImportError:  # pragma: no cover
    _q = Fraction

_Q0 = _q(0)
_Q1 = _q(1)

# generous multiplier over the true float-dot rounding bound
_ERR_FACTOR = 1e-9


class WideSystem:
    """Integer data for one feasibility system (rows pre-scaled)."""

    def __init__(self, matrix: np.ndarray, rhs: list[int]):
        if matrix.ndim != 2 or matrix.shape[1] != len(rhs):
            raise ValueError("matrix shape does not match rhs")
        if any(v < 0 for v in rhs):
            raise ValueError("rhs entries must be nonnegative")
        self.A = np.ascontiguousarray(matrix, dtype=np.int64)
        self.Af = self.A.astype(np.float64)
        self.Aabs = np.abs(self.Af)
        self.b = [int(v) for v in rhs]
        self.n_cols, self.r = self.A.shape


def solve_distribution_system(system: WideSystem, stats: dict | None = None):
    """Returns ('feasible', {col: Fraction}) or ('infeasible', [Fraction]*r)."""
    A, b = system.A, system.b
    n, r = system.n_cols, system.r
    m = r + 1  # basis size: r slack rows + the normalization row

    # variable ids: 0..r-1 slacks, r..r+n-1 distribution columns, r+n artificial
    ART = r + n
    basis = list(range(r)) + [ART]
    binv = [[_Q1 if i == j else _Q0 for j in range(m)] for i in range(m)]
    xb = [_q(v) for v in b] + [_Q1]

    def column(var: int) -> list:
        if var < r:
            return [_Q1 if i == var else _Q0 for i in range(r)] + [_Q0]
        if var == ART:
            return [_Q0] * r + [_Q1]
        g = var - r
        return [_q(int(v)) for v in A[g]] + [_Q1]

    # largest-coefficient pricing by default; a run of iterations without
    # progress on the artificial value switches to Bland's rule, which
    # cannot cycle, until the value strictly decreases again
    STALL_LIMIT = 30
    stall = 0
    bland = False
    last_value = None

    while True:
        if stats is not None:
            stats["iterations"] = stats.get("iterations", 0) + 1
        art_pos = basis.index(ART) if ART in basis else -1
        if art_pos < 0 or xb[art_pos] == 0:
            values: dict[int, Fraction] = {}
            for pos, var in enumerate(basis):
                if r <= var < ART and xb[pos] != 0:
                    values[var - r] = _to_frac(xb[pos])
            return "feasible", values

        value = xb[art_pos]
        if last_value is not None and value == last_value:
            stall += 1
            if stall >= STALL_LIMIT:
                bland = True
        else:
            stall = 0
            bland = False
        last_value = value

        # phase-1 duals: the basis-inverse row of the artificial variable
        y = binv[art_pos]

        in_basis = set(basis)
        enter = -1
        if bland:
            # slacks carry the lowest variable ids
            for i in range(r):
                if i not in in_basis and y[i] > 0:
                    enter = i
                    break
            if enter < 0:
                enter_g = _price_columns(system, y, largest=False)
                if enter_g >= 0:
                    enter = r + enter_g
        else:
            best_slack = -1
            for i in range(r):
                if i not in in_basis and y[i] > 0 and (
                        best_slack < 0 or y[i] > y[best_slack]):
                    best_slack = i
            enter_g = _price_columns(system, y, largest=True)
            if enter_g >= 0:
                enter = r + enter_g
            if best_slack >= 0 and (
                    enter < 0 or y[best_slack] >= _column_value(
                        system, y, enter - r)):
                enter = best_slack
        if enter < 0:
            theta = xb[art_pos]
            assert theta > 0
            inv = _Q1 / theta
            return "infeasible", [_to_frac(-y[i] * inv) for i in range(r)]

        col = column(enter)
        u = [sum((row[i] * col[i] for i in range(m) if col[i]), _Q0)
             for row in binv]
        leave = -1
        best = None
        for k in range(m):
            if u[k] > 0:
                ratio = xb[k] / u[k]
                if best is None or ratio < best or (
                        ratio == best and basis[k] < basis[leave]):
                    best = ratio
                    leave = k
        if leave < 0:
            raise RuntimeError("internal error: unbounded phase-1 system")
        piv = u[leave]
        if piv != _Q1:
            inv = _Q1 / piv
            binv[leave] = [v * inv for v in binv[leave]]
            xb[leave] *= inv
        prow = binv[leave]
        pxb = xb[leave]
        for k in range(m):
            if k != leave and u[k]:
                f = u[k]
                brow = binv[k]
                binv[k] = [a - f * p for a, p in zip(brow, prow)]
                xb[k] -= f * pxb
        basis[leave] = enter


def _price_columns(system: WideSystem, y: list, largest: bool) -> int:
    """A column index with positive reduced-cost test value, or -1.

    The test value is  A[g, :] . y[:r] + y[r];  a float screen with an
    explicit error bound selects candidates, which are then confirmed
    with exact integer arithmetic.  ``largest`` tries candidates in
    decreasing order of the float estimate; otherwise ascending column
    index (Bland).
    """
    nums, _den = _common_denominator(y)
    scale = max(1, max(abs(v) for v in nums))
    pf = np.array([_ratio_float(v, scale) for v in nums], dtype=np.float64)
    r = system.r
    vf = system.Af @ pf[:r] + pf[r]
    errb = (system.Aabs @ np.abs(pf[:r]) + abs(pf[r])) * _ERR_FACTOR + 1e-300
    candidates = np.nonzero(vf + errb > 0)[0]
    if candidates.size == 0:
        return -1
    if largest:
        order = np.argsort(-vf[candidates], kind="stable")
        candidates = candidates[order]
    p_rows = nums[:r]
    p_last = nums[r]
    for g in candidates:
        row = system.A[g]
        total = p_last
        for i in range(r):
            v = int(row[i])
            if v:
                total += v * p_rows[i]
        if total > 0:
            return int(g)
    return -1


def _column_value(system: WideSystem, y: list, g: int):
    total = y[system.r]
    row = system.A[g]
    for i in range(system.r):
        v = int(row[i])
        if v:
            total = total + v * y[i]
    return total


def _common_denominator(y: list) -> tuple[list[int], int]:
    den = 1
    for v in y:
        den = den * v.denominator // math.gcd(den, int(v.denominator))
    nums = [int(v.numerator) * (den // int(v.denominator)) for v in y]
    return nums, den


def _ratio_float(num: int, scale: int) -> float:
    try:
        return num / scale
    except OverflowError:  # pragma: no cover - astronomically large duals
        return float(Fraction(num, scale))


def _to_frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))
