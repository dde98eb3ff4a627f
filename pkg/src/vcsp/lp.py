"""Exact rational linear programming.

Standard-form models with named variables, solved by a two-phase dense
simplex with Bland's (least-index) pivot rule.  All arithmetic is exact
(gmpy2 rationals internally, ``Fraction`` at the API); the solver never
returns approximate values.  Infeasible problems carry a Farkas
certificate over the canonical homogenized row list (see
:func:`homogenized_rows`), normalized so that ``y^T b == -1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

try:
    from gmpy2 import mpq as _q
except ImportError:  # pragma: no cover
    _q = Fraction

from .structures import InputError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_Q0 = _q(0)
_Q1 = _q(1)


@dataclass(frozen=True)
class LpVariable:
    name: str
    lower: Fraction | None = Fraction(0)
    upper: Fraction | None = None


@dataclass(frozen=True)
class LpConstraint:
    coeffs: tuple[tuple[str, Fraction], ...]
    relation: str  # "<=", "==", ">="
    rhs: Fraction

    @classmethod
    def of(cls, coeffs: Mapping[str, Fraction | int], relation: str,
           rhs: Fraction | int) -> "LpConstraint":
        if relation not in ("<=", "==", ">="):
            raise InputError(f"bad relation {relation!r}")
        return cls(
            tuple((n, Fraction(c)) for n, c in coeffs.items() if c != 0),
            relation,
            Fraction(rhs),
        )


@dataclass
class LinearProgram:
    variables: list[LpVariable]
    constraints: list[LpConstraint]
    objective: dict[str, Fraction]
    sense: str = "min"

    def variable_names(self) -> list[str]:
        return [v.name for v in self.variables]


@dataclass
class LpSolution:
    status: str
    objective_value: Fraction | None
    values: dict[str, Fraction]
    dual_or_farkas: dict[int, Fraction] | None = None


def _validate(lp: LinearProgram) -> None:
    names = lp.variable_names()
    nameset = set(names)
    if len(nameset) != len(names):
        raise InputError("duplicate variable names")
    if lp.sense not in ("min", "max"):
        raise InputError(f"bad sense {lp.sense!r}")
    for v in lp.variables:
        if v.lower is not None and v.upper is not None and v.lower > v.upper:
            # contradictory bounds are a (trivially) infeasible model, not
            # a malformed one; handled by the solver via bound rows
            pass
    for i, con in enumerate(lp.constraints):
        if con.relation not in ("<=", "==", ">="):
            raise InputError(f"constraint {i}: bad relation {con.relation!r}")
        for n, _ in con.coeffs:
            if n not in nameset:
                raise InputError(f"constraint {i}: unknown variable {n!r}")
    for n in lp.objective:
        if n not in nameset:
            raise InputError(f"objective references unknown variable {n!r}")


def homogenized_rows(lp: LinearProgram) -> list[tuple[dict[str, Fraction], Fraction]]:
    """Canonical all-``<=`` row list used for Farkas certificates.

    Order: constraints in model order ('==' split into its '<=' copy then
    its negated '>=' copy), then per variable (model order) the finite
    lower-bound row ``-x <= -lo``, then the finite upper-bound row
    ``x <= up``.
    """
    rows: list[tuple[dict[str, Fraction], Fraction]] = []
    for con in lp.constraints:
        coeffs = dict(con.coeffs)
        if con.relation in ("<=", "=="):
            rows.append((dict(coeffs), con.rhs))
        if con.relation in (">=", "=="):
            rows.append(({n: -c for n, c in coeffs.items()}, -con.rhs))
    for v in lp.variables:
        if v.lower is not None:
            rows.append(({v.name: Fraction(-1)}, -v.lower))
        if v.upper is not None:
            rows.append(({v.name: Fraction(1)}, v.upper))
    return rows


# ---------------------------------------------------------------------------
# presolve


class _Infeasible(Exception):
    pass


def _presolve(lp: LinearProgram):
    """Fix lower==upper variables and zero-forced variables.

    Returns (fixed values, rows) where rows are (orig_index, coeffs, rel,
    rhs) with fixed variables substituted out.  Raises _Infeasible when a
    contradiction is detected.
    """
    lower = {v.name: v.lower for v in lp.variables}
    upper = {v.name: v.upper for v in lp.variables}
    fixed: dict[str, Fraction] = {}
    for v in lp.variables:
        if v.lower is not None and v.upper is not None:
            if v.lower > v.upper:
                raise _Infeasible
            if v.lower == v.upper:
                fixed[v.name] = v.lower
    rows = [
        (i, dict(con.coeffs), con.relation, con.rhs)
        for i, con in enumerate(lp.constraints)
    ]

    changed = True
    while changed:
        changed = False
        next_rows = []
        for i, coeffs, rel, rhs in rows:
            live = {}
            for n, c in coeffs.items():
                if n in fixed:
                    rhs -= c * fixed[n]
                else:
                    live[n] = c
            if not live:
                ok = (rhs >= 0 if rel == "<=" else
                      rhs <= 0 if rel == ">=" else rhs == 0)
                if not ok:
                    raise _Infeasible
                changed = True
                continue
            if rhs == 0 and rel in ("<=", "=="):
                if all(c > 0 for c in live.values()) and all(
                    lower[n] == 0 for n in live
                ):
                    for n in live:
                        fixed[n] = Fraction(0)
                    changed = True
                    continue
            if rhs == 0 and rel in (">=", "=="):
                if all(c < 0 for c in live.values()) and all(
                    lower[n] == 0 for n in live
                ):
                    for n in live:
                        fixed[n] = Fraction(0)
                    changed = True
                    continue
            next_rows.append((i, live, rel, rhs))
        rows = next_rows
    for n, val in fixed.items():
        if lower[n] is not None and val < lower[n]:
            raise _Infeasible
        if upper[n] is not None and val > upper[n]:
            raise _Infeasible
    return fixed, rows


# ---------------------------------------------------------------------------
# dense two-phase simplex


class _DenseSimplex:
    """Two-phase simplex with Bland's rule on an explicit tableau.

    ``rows`` are (coeffs over column indices, relation, rhs) with all data
    as gmpy2 rationals; columns 0..n_struct-1 are structural (>= 0).
    """

    def __init__(self, n_struct: int, rows, costs):
        self.n_struct = n_struct
        n_rows = len(rows)
        # column layout: structural | slacks | artificials (one per row)
        slack_col = {}
        n_cols = n_struct
        for r, (_, rel, _) in enumerate(rows):
            if rel != "==":
                slack_col[r] = n_cols
                n_cols += 1
        art_col = {r: n_cols + r for r in range(n_rows)}
        n_cols += n_rows
        self.n_cols = n_cols
        self.art_start = n_cols - n_rows
        self.art_col = art_col

        T = []
        basis = []
        for r, (coeffs, rel, rhs) in enumerate(rows):
            row = [_Q0] * (n_cols + 1)
            for j, c in coeffs.items():
                row[j] = c
            if rel == "<=":
                row[slack_col[r]] = _Q1
            elif rel == ">=":
                row[slack_col[r]] = -_Q1
            if rhs < 0:
                row = [-v for v in row]
                rhs = -rhs
            row[-1] = rhs
            row[art_col[r]] = _Q1
            if rel != "==" and row[slack_col[r]] == _Q1:
                basis.append(slack_col[r])
            else:
                basis.append(art_col[r])
            T.append(row)
        self.T = T
        self.basis = basis
        self.costs = costs  # phase-2 structural costs, length n_struct

    def _pivot(self, r: int, c: int, z: list):
        T = self.T
        row = T[r]
        piv = row[c]
        if piv != _Q1:
            inv = _Q1 / piv
            row = [v * inv for v in row]
            T[r] = row
        for i in range(len(T)):
            if i != r:
                other = T[i]
                f = other[c]
                if f:
                    T[i] = [a - f * b for a, b in zip(other, row)]
        f = z[c]
        if f:
            z[:] = [a - f * b for a, b in zip(z, row)]
        self.basis[r] = c

    def _reduced_costs(self, costs_full: list) -> list:
        z = list(costs_full) + [_Q0]
        for r, b in enumerate(self.basis):
            cb = costs_full[b]
            if cb:
                row = self.T[r]
                z = [a - cb * v for a, v in zip(z, row)]
        return z

    def _run(self, z: list, allow_art: bool) -> str:
        basis_set = set(self.basis)
        limit = self.n_cols if allow_art else self.art_start
        while True:
            enter = -1
            for j in range(limit):
                if j in basis_set:
                    continue
                if z[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return "optimal"
            # Bland ratio test: least ratio, ties by least basic index
            best_r = -1
            best_ratio = None
            for r, row in enumerate(self.T):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    if (best_ratio is None or ratio < best_ratio or
                            (ratio == best_ratio and
                             self.basis[r] < self.basis[best_r])):
                        best_ratio = ratio
                        best_r = r
            if best_r < 0:
                return "unbounded"
            basis_set.discard(self.basis[best_r])
            basis_set.add(enter)
            self._pivot(best_r, enter, z)

    def solve(self):
        """Returns (status, values, duals) with duals over row indices."""
        n_rows = len(self.T)
        # phase 1: minimize the sum of artificial variables
        c1 = [_Q0] * self.n_cols
        for r in range(n_rows):
            c1[self.art_col[r]] = _Q1
        z1 = self._reduced_costs(c1)
        status = self._run(z1, allow_art=False)
        assert status == "optimal"
        infeas = -z1[-1]  # phase-1 objective value
        if infeas > 0:
            duals = [c1[self.art_col[r]] - z1[self.art_col[r]]
                     for r in range(n_rows)]
            return INFEASIBLE, None, duals, infeas
        # drive remaining basic artificials out where possible
        for r in range(n_rows):
            if self.basis[r] >= self.art_start:
                row = self.T[r]
                for j in range(self.art_start):
                    if row[j]:
                        self._pivot(r, j, z1)
                        break
        # phase 2
        c2 = [_Q0] * self.n_cols
        for j, c in enumerate(self.costs):
            c2[j] = c
        z2 = self._reduced_costs(c2)
        status = self._run(z2, allow_art=False)
        if status == "unbounded":
            return UNBOUNDED, None, None, None
        values = [_Q0] * self.n_struct
        for r, b in enumerate(self.basis):
            if b < self.n_struct:
                values[b] = self.T[r][-1]
        duals = [c2[self.art_col[r]] - z2[self.art_col[r]]
                 for r in range(n_rows)]
        return OPTIMAL, values, duals, None


# ---------------------------------------------------------------------------
# public solve


def solve(lp: LinearProgram, certificate: bool = True) -> LpSolution:
    """Exact optimum or a verified negative status.

    Deterministic: identical models produce identical solutions (fixed
    pivot rule and variable order).  When ``certificate`` is set (the
    default), infeasible problems carry a Farkas vector over
    :func:`homogenized_rows` with ``y >= 0``, ``y^T A == 0`` and
    ``y^T b == -1``.
    """
    _validate(lp)
    try:
        fixed, rows = _presolve(lp)
    except _Infeasible:
        return _finish_infeasible(lp, certificate)

    live_vars = [v for v in lp.variables if v.name not in fixed]
    sense_sign = Fraction(1) if lp.sense == "min" else Fraction(-1)

    # map each live variable onto one or two nonnegative structural columns
    col_of: dict[str, tuple[str, int, Fraction]] = {}
    n_struct = 0
    extra_rows: list[tuple[dict[int, Fraction], str, Fraction]] = []
    shift: dict[str, Fraction] = {}
    for v in live_vars:
        if v.lower is not None:
            col_of[v.name] = ("shift", n_struct, Fraction(1))
            shift[v.name] = v.lower
            if v.upper is not None:
                extra_rows.append(
                    ({n_struct: Fraction(1)}, "<=", v.upper - v.lower)
                )
            n_struct += 1
        elif v.upper is not None:
            col_of[v.name] = ("shift", n_struct, Fraction(-1))
            shift[v.name] = v.upper
            n_struct += 1
        else:
            col_of[v.name] = ("split", n_struct, Fraction(1))
            n_struct += 2

    def expand(coeffs: Mapping[str, Fraction]) -> tuple[dict[int, Fraction], Fraction]:
        """Rewrite a row over original variables into structural columns.

        Returns (column coefficients, constant) with variables replaced by
        their shifted/split images; constant is the value contributed by
        the shifts.
        """
        out: dict[int, Fraction] = {}
        const = Fraction(0)
        for n, c in coeffs.items():
            kind, j, sign = col_of[n]
            if kind == "shift":
                out[j] = out.get(j, Fraction(0)) + c * sign
                const += c * shift[n]
            else:
                out[j] = out.get(j, Fraction(0)) + c
                out[j + 1] = out.get(j + 1, Fraction(0)) - c
        return out, const

    sim_rows = []
    row_sources = []  # original constraint index or None (bound row)
    for i, coeffs, rel, rhs in rows:
        out, const = expand(coeffs)
        sim_rows.append((out, rel, rhs - const))
        row_sources.append(i)
    for out, rel, rhs in extra_rows:
        sim_rows.append((out, rel, rhs))
        row_sources.append(None)

    obj_cols: dict[int, Fraction] = {}
    obj_offset = Fraction(0)
    for n, c in lp.objective.items():
        c = sense_sign * Fraction(c)
        if c == 0:
            continue
        if n in fixed:
            obj_offset += c * fixed[n]
            continue
        kind, j, sign = col_of[n]
        if kind == "shift":
            obj_cols[j] = obj_cols.get(j, Fraction(0)) + c * sign
            obj_offset += c * shift[n]
        else:
            obj_cols[j] = obj_cols.get(j, Fraction(0)) + c
            obj_cols[j + 1] = obj_cols.get(j + 1, Fraction(0)) - c

    q_rows = [
        ({j: _q(c) for j, c in out.items()}, rel, _q(rhs))
        for out, rel, rhs in sim_rows
    ]
    q_costs = [_Q0] * n_struct
    for j, c in obj_cols.items():
        q_costs[j] = _q(c)

    engine = _DenseSimplex(n_struct, q_rows, q_costs)
    status, col_values, duals, _ = engine.solve()

    if status == INFEASIBLE:
        return _finish_infeasible(lp, certificate)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, None, {}, None)

    values: dict[str, Fraction] = dict(fixed)
    for v in live_vars:
        kind, j, sign = col_of[v.name]
        if kind == "shift":
            values[v.name] = shift[v.name] + sign * _frac(col_values[j])
        else:
            values[v.name] = _frac(col_values[j]) - _frac(col_values[j + 1])
    # recompute exactly from the returned values
    obj_value = sum(
        (Fraction(c) * values[n] for n, c in lp.objective.items()),
        Fraction(0),
    )
    dual_map: dict[int, Fraction] = {}
    for r, src in enumerate(row_sources):
        if src is not None and duals is not None:
            dual_map[src] = dual_map.get(src, Fraction(0)) + _frac(duals[r])
    return LpSolution(OPTIMAL, obj_value, values, dual_map or None)


def _frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _finish_infeasible(lp: LinearProgram, certificate: bool) -> LpSolution:
    farkas = _farkas_certificate(lp) if certificate else None
    return LpSolution(INFEASIBLE, None, {}, farkas)


def _farkas_certificate(lp: LinearProgram) -> dict[int, Fraction]:
    """Find y >= 0 with y^T A == 0 and y^T b == -1 over homogenized_rows.

    Solved as an auxiliary exact feasibility LP; by Farkas' lemma it has a
    solution exactly when the primal system is infeasible.
    """
    rows = homogenized_rows(lp)
    names = lp.variable_names()
    yvars = [LpVariable(f"y{r}", Fraction(0), None) for r in range(len(rows))]
    cons = []
    for n in names:
        coeffs = {}
        for r, (row, _) in enumerate(rows):
            c = row.get(n)
            if c:
                coeffs[f"y{r}"] = c
        cons.append(LpConstraint.of(coeffs, "==", 0))
    cons.append(
        LpConstraint.of(
            {f"y{r}": rhs for r, (_, rhs) in enumerate(rows) if rhs != 0},
            "==",
            Fraction(-1),
        )
    )
    aux = LinearProgram(yvars, cons, {}, "min")
    sol = solve(aux, certificate=False)
    if sol.status != OPTIMAL:
        raise RuntimeError(
            "internal error: no Farkas certificate for a problem reported "
            "infeasible"
        )
    return {
        r: sol.values[f"y{r}"]
        for r in range(len(rows))
        if sol.values[f"y{r}"] != 0
    }


def verify_solution(lp: LinearProgram, sol: LpSolution) -> bool:
    """Re-check a solution in exact arithmetic; False on any violation."""
    try:
        _validate(lp)
    except InputError:
        return False
    if sol.status == OPTIMAL:
        values = sol.values
        for v in lp.variables:
            x = values.get(v.name)
            if x is None:
                return False
            if v.lower is not None and x < v.lower:
                return False
            if v.upper is not None and x > v.upper:
                return False
        for con in lp.constraints:
            lhs = sum(
                (Fraction(c) * values[n] for n, c in con.coeffs),
                Fraction(0),
            )
            if con.relation == "<=" and not lhs <= con.rhs:
                return False
            if con.relation == ">=" and not lhs >= con.rhs:
                return False
            if con.relation == "==" and lhs != con.rhs:
                return False
        obj = sum(
            (Fraction(c) * values[n] for n, c in lp.objective.items()),
            Fraction(0),
        )
        return obj == sol.objective_value
    if sol.status == INFEASIBLE:
        y = sol.dual_or_farkas
        if y is None:
            return False
        rows = homogenized_rows(lp)
        if any(r not in range(len(rows)) or y[r] < 0 for r in y):
            return False
        combo: dict[str, Fraction] = {}
        total_rhs = Fraction(0)
        for r, w in y.items():
            row, rhs = rows[r]
            for n, c in row.items():
                combo[n] = combo.get(n, Fraction(0)) + w * c
            total_rhs += w * rhs
        return all(v == 0 for v in combo.values()) and total_rhs == -1
    return sol.status == UNBOUNDED


def dual_bound(lp: LinearProgram, sol: LpSolution) -> Fraction | None:
    """Exact Lagrangian lower bound from the duals of a minimization LP.

    Returns None when no duals are attached.  The bound is valid for any
    dual vector; with the solver's duals it equals the optimum whenever no
    presolve reduction interfered, and never exceeds it.
    """
    if lp.sense != "min" or sol.dual_or_farkas is None:
        return None
    y = sol.dual_or_farkas
    reduced = dict(lp.objective)
    bound = Fraction(0)
    for i, con in enumerate(lp.constraints):
        w = y.get(i, Fraction(0))
        if w == 0:
            continue
        bound += w * con.rhs
        for n, c in con.coeffs:
            reduced[n] = reduced.get(n, Fraction(0)) - w * c
    for v in lp.variables:
        c = reduced.get(v.name, Fraction(0))
        if c == 0:
            continue
        if c > 0:
            if v.lower is None:
                return None  # bound degenerates to -infinity
            bound += c * v.lower
        else:
            if v.upper is None:
                return None
            bound += c * v.upper
    return bound


def dump_lp(lp: LinearProgram) -> str:
    """Human-readable LP text with exact fractions."""
    from .rationals import format_rational

    def fmt_terms(coeffs) -> str:
        parts = []
        for n, c in coeffs:
            c = Fraction(c)
            if c == 0:
                continue
            sign = "- " if c < 0 else ("+ " if parts else "")
            mag = abs(c)
            parts.append(
                f"{sign}{n}" if mag == 1 else f"{sign}{format_rational(mag)} {n}"
            )
        return " ".join(parts) if parts else "0"

    lines = [("Minimize" if lp.sense == "min" else "Maximize")]
    lines.append("  obj: " + fmt_terms(sorted(lp.objective.items())))
    lines.append("Subject To")
    for i, con in enumerate(lp.constraints):
        rel = {"<=": "<=", ">=": ">=", "==": "="}[con.relation]
        lines.append(
            f"  c{i}: {fmt_terms(con.coeffs)} {rel} {format_rational(con.rhs)}"
        )
    lines.append("Bounds")
    for v in lp.variables:
        lo = "-inf" if v.lower is None else format_rational(v.lower)
        up = "+inf" if v.upper is None else format_rational(v.upper)
        lines.append(f"  {lo} <= {v.name} <= {up}")
    lines.append("End")
    return "\n".join(lines) + "\n"
