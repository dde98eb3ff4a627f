"""Fractional polymorphisms, multiset structures and LP certificates.

The two deciders here — ``find_fractional_homomorphism`` and
``find_tsfp`` — set up a distribution-feasibility system (one column per
candidate operation) and hand it to the wide exact simplex.  A feasible
system yields a :class:`Witness`; an infeasible one yields a
:class:`Refutation` whose Farkas vector can be turned into a concrete
instance with a strict gap between the basic LP relaxation and the true
optimum (``farkas_gap_instance``).

Every returned certificate is re-verified exactly before it leaves this
module.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .blp import blp_value
from .lp_wide import WideSystem, solve_distribution_system
from .operations import (
    FractionalOperation,
    MultisetDomain,
    Operation,
    apply_componentwise,
    is_symmetric,
    projection,
    superpose,
)
from .oracle import DEFAULT_BUDGET, BudgetExceeded, brute_force_opt
from .rationals import INF, ZERO, ExtendedRational
from .structures import (
    InputError,
    ValuedStructure,
    all_tuples,
    index_tuple,
    tuple_index,
)

_INF_SENTINEL = -1


@dataclass(frozen=True)
class Witness:
    """A fractional operation satisfying the defining inequalities."""

    omega: FractionalOperation


@dataclass
class Refutation:
    """A Farkas vector proving that no such fractional operation exists.

    Keys are (symbol, argument tuple); for the totally-symmetric decider
    the argument tuple ranges over multiset codes, i.e. over the domain
    of the corresponding multiset structure.
    """

    farkas_y: dict[tuple[str, tuple[int, ...]], Fraction]
    gap_instance: ValuedStructure | None = None


Certificate = Witness | Refutation


@dataclass(frozen=True)
class Violation:
    """First failing inequality of a pointwise check."""

    symbol: str
    args: tuple[tuple[int, ...], ...]
    lhs: ExtendedRational
    rhs: ExtendedRational


# ---------------------------------------------------------------------------
# pointwise checks


def check_fractional_polymorphism(language: ValuedStructure,
                                  omega: FractionalOperation
                                  ) -> Violation | None:
    """Exhaustively check sum_g w(g) f(g(a_1..a_m)) <= (1/m) sum_i f(a_i).

    Extended arithmetic throughout: an infinite left-hand side against a
    finite right-hand side is a violation.  Returns the lexicographically
    least violation, or None.
    """
    if omega.l1_norm != 1:
        raise InputError("fractional operation must have total weight 1")
    m = omega.arity
    d = language.domain_size
    if any(g.domain_size != d or g.out_domain != d for g in omega.support):
        raise InputError("operation domain does not match the language")
    inv_m = ExtendedRational(Fraction(1, m))
    for sym in language.signature.symbols:
        for args in itertools.product(all_tuples(d, sym.arity), repeat=m):
            rhs = ZERO
            for a in args:
                rhs = rhs + language.value(sym.name, a)
            rhs = rhs * inv_m
            lhs = ZERO
            for g, w in omega.items():
                lhs = lhs + ExtendedRational(w) * language.value(
                    sym.name, apply_componentwise(g, args)
                )
            if not lhs <= rhs:
                return Violation(sym.name, args, lhs, rhs)
    return None


def check_multimorphism(language: ValuedStructure, g1: Operation,
                        g2: Operation) -> Violation | None:
    """The pair inequality f(g1(a,b)) + f(g2(a,b)) <= f(a) + f(b)."""
    if g1.arity != 2 or g2.arity != 2:
        raise InputError("multimorphisms are pairs of binary operations")
    if g1 == g2:
        omega = FractionalOperation([(g1, Fraction(1))])
    else:
        omega = FractionalOperation(
            [(g1, Fraction(1, 2)), (g2, Fraction(1, 2))]
        )
    return check_fractional_polymorphism(language, omega)


def check_polymorphism(language: ValuedStructure,
                       g: Operation) -> Violation | None:
    """Feasibility-level check: g maps finite-cost tuples to finite cost."""
    d = language.domain_size
    if g.domain_size != d or g.out_domain != d:
        raise InputError("operation domain does not match the language")
    for sym in language.signature.symbols:
        finite = [
            t for t in all_tuples(d, sym.arity)
            if not language.value(sym.name, t).is_infinite
        ]
        for args in itertools.product(finite, repeat=g.arity):
            value = language.value(sym.name, apply_componentwise(g, args))
            if value.is_infinite:
                return Violation(sym.name, args, INF, ZERO)
    return None


# ---------------------------------------------------------------------------
# the multiset structure


def build_multiset_structure(language: ValuedStructure,
                             m: int) -> ValuedStructure:
    """Structure on size-m multisets whose costs are best-pairing averages.

    For k-ary f and multisets a_1..a_k the cost is (1/m) times the
    minimum over orderings t_i of a_i of  sum_j f(t_1[j], ..., t_k[j]).
    The first ordering is fixed to the canonical sorted tuple: permuting
    all orderings simultaneously leaves the sum unchanged.
    """
    if m <= 1:
        raise InputError("multiset size must be at least 2")
    d = language.domain_size
    msd = MultisetDomain(d, m)
    inv_m = ExtendedRational(Fraction(1, m))
    tables: dict[str, list[ExtendedRational]] = {}
    for sym in language.signature.symbols:
        table = language.tables[sym.name]
        out: list[ExtendedRational] = []
        for codes in all_tuples(len(msd), sym.arity):
            first = msd.multiset(codes[0])
            rest_orderings = [
                sorted(set(itertools.permutations(msd.multiset(c))))
                for c in codes[1:]
            ]
            best = INF
            for rest in itertools.product(*rest_orderings):
                orderings = (first,) + rest
                total = ZERO
                for j in range(m):
                    total = total + table[
                        tuple_index([t[j] for t in orderings], d)
                    ]
                    if not total < best:
                        break
                else:
                    best = total
            out.append(best * inv_m)
        tables[sym.name] = out
    return ValuedStructure(language.signature, len(msd), tables)


# ---------------------------------------------------------------------------
# feasibility systems


@dataclass
class _FeasSystem:
    """Scaled integer rows plus the bookkeeping to decode answers."""

    matrix: np.ndarray                 # (n_allowed, n_rows) int64
    rhs: list[int]
    row_keys: list[tuple[str, tuple[int, ...]]]
    row_scales: list[int]
    allowed: np.ndarray                # global indices of allowed columns
    n_total: int
    grid_base: int
    grid_positions: int

    def decode_column(self, global_index: int) -> tuple[int, ...]:
        return index_tuple(global_index, self.grid_base, self.grid_positions)


def _column_grid(base: int, positions: int) -> np.ndarray:
    """All maps {0..positions-1} -> {0..base-1} as rows, lexicographic."""
    n = base ** positions
    idx = np.arange(n, dtype=np.int64)
    grid = np.empty((n, positions), dtype=np.int64)
    for j in range(positions):
        grid[:, j] = (idx // base ** (positions - 1 - j)) % base
    return grid


def _scaled_table(table, scale: int) -> np.ndarray:
    return np.array(
        [
            _INF_SENTINEL if v.is_infinite else int(v.as_fraction() * scale)
            for v in table
        ],
        dtype=np.int64,
    )


def _table_denominator_lcm(table) -> int:
    den = 1
    for v in table:
        if not v.is_infinite:
            den = math.lcm(den, v.as_fraction().denominator)
    return den


def _assemble(columns: list[np.ndarray], rhs, row_keys, row_scales,
              n_total: int, base: int, positions: int) -> _FeasSystem:
    if columns:
        matrix = np.stack(columns, axis=1)
        forbidden = (matrix == _INF_SENTINEL).any(axis=1)
    else:
        matrix = np.zeros((n_total, 0), dtype=np.int64)
        forbidden = np.zeros(n_total, dtype=bool)
    allowed = np.nonzero(~forbidden)[0]
    return _FeasSystem(
        matrix[allowed], list(rhs), list(row_keys), list(row_scales),
        allowed, n_total, base, positions,
    )


def _hom_system(a: ValuedStructure, b: ValuedStructure, budget: int,
                row_filter=None) -> _FeasSystem:
    """Rows (f, abar) with finite f^A(abar); columns are maps D(A) -> D(B).

    Each row is scaled to integers; columns hitting an infinite f^B value
    on a finite row are excluded up front (their weight is forced to 0).
    ``row_filter`` optionally restricts the rows to a subset (dropping
    rows weakens the system, so infeasibility remains conclusive).
    """
    if a.signature != b.signature:
        raise InputError("structures must share one signature")
    da, db = a.domain_size, b.domain_size
    n_total = db ** da
    if n_total > budget:
        raise BudgetExceeded(
            f"{db}^{da} = {n_total} candidate maps exceed budget {budget}"
        )
    grid = _column_grid(db, da)
    columns: list[np.ndarray] = []
    rhs: list[int] = []
    row_keys: list[tuple[str, tuple[int, ...]]] = []
    row_scales: list[int] = []
    for sym in a.signature.symbols:
        scale = math.lcm(
            _table_denominator_lcm(a.tables[sym.name]),
            _table_denominator_lcm(b.tables[sym.name]),
        )
        table_b = _scaled_table(b.tables[sym.name], scale)
        for abar in all_tuples(da, sym.arity):
            fa = a.value(sym.name, abar)
            if fa.is_infinite:
                continue
            if row_filter is not None and not row_filter(sym.name, abar):
                continue
            idx = np.zeros(n_total, dtype=np.int64)
            for x in abar:
                idx = idx * db + grid[:, x]
            columns.append(table_b[idx])
            rhs.append(int(fa.as_fraction() * scale))
            row_keys.append((sym.name, abar))
            row_scales.append(scale)
    return _assemble(columns, rhs, row_keys, row_scales, n_total, db, da)


def _tsfp_system(language: ValuedStructure, m: int,
                 budget: int) -> tuple[_FeasSystem, MultisetDomain, list]:
    """Rows indexed by multisets of argument tuples; columns are symmetric
    m-ary operations encoded as maps (multiset code) -> D.

    Returns the system, the multiset domain, and for each row the key
    (f, tuple of coordinate multiset codes) it aggregates to under the
    equivalent homomorphism formulation.
    """
    d = language.domain_size
    msd = MultisetDomain(d, m)
    n_total = d ** len(msd)
    if n_total > budget:
        raise BudgetExceeded(
            f"{d}^{len(msd)} = {n_total} symmetric operations exceed "
            f"budget {budget}"
        )
    grid = _column_grid(d, len(msd))
    columns: list[np.ndarray] = []
    rhs: list[int] = []
    row_keys: list[tuple[str, tuple]] = []
    hom_keys: list[tuple[str, tuple[int, ...]]] = []
    row_scales: list[int] = []
    for sym in language.signature.symbols:
        table = language.tables[sym.name]
        den = _table_denominator_lcm(table)
        scale = m * den
        table_scaled = _scaled_table(table, scale)
        tuples = list(all_tuples(d, sym.arity))
        for args in itertools.combinations_with_replacement(tuples, m):
            total = ZERO
            for t in args:
                total = total + language.value(sym.name, t)
            if total.is_infinite:
                continue
            coords = tuple(
                msd.index_of_tuple([t[p] for t in args])
                for p in range(sym.arity)
            )
            idx = np.zeros(n_total, dtype=np.int64)
            for c in coords:
                idx = idx * d + grid[:, c]
            columns.append(table_scaled[idx])
            rhs.append(int(total.as_fraction() * den))
            row_keys.append((sym.name, args))
            hom_keys.append((sym.name, coords))
            row_scales.append(scale)
    system = _assemble(
        columns, rhs, row_keys, row_scales, n_total, d, len(msd)
    )
    return system, msd, hom_keys


def _solve_system(system: _FeasSystem):
    if len(system.allowed) == 0:
        # every candidate is excluded; the weight-1 row alone is infeasible
        return "infeasible", [Fraction(0)] * len(system.rhs)
    wide = WideSystem(system.matrix, system.rhs)
    return solve_distribution_system(wide)


def _farkas_to_keys(system: _FeasSystem, y: list[Fraction],
                    keys=None) -> dict[tuple[str, tuple], Fraction]:
    """Rescale the Farkas vector to raw (unscaled) table values and merge
    duplicate keys."""
    out: dict[tuple[str, tuple], Fraction] = {}
    keys = system.row_keys if keys is None else keys
    for key, scale, yi in zip(keys, system.row_scales, y):
        if yi:
            out[key] = out.get(key, Fraction(0)) + yi * scale
    return out


# ---------------------------------------------------------------------------
# deciders


def find_fractional_homomorphism(a: ValuedStructure, b: ValuedStructure,
                                 budget: int = DEFAULT_BUDGET) -> Certificate:
    """Decide whether a weight-1 distribution on maps D(A) -> D(B) with
    sum_g w(g) f^B(g(abar)) <= f^A(abar) everywhere exists."""
    system = _hom_system(a, b, budget)
    status, payload = _solve_system(system)
    if status == "feasible":
        omega = FractionalOperation(
            (_map_operation(system.decode_column(int(system.allowed[j])),
                            a.domain_size, b.domain_size), w)
            for j, w in payload.items()
        )
        witness = Witness(omega)
        problem = verify_homomorphism_witness(a, b, omega)
        if problem is not None:
            raise RuntimeError(f"internal error: invalid witness: {problem}")
        return witness
    farkas = _normalize_refutation(a, b, _farkas_to_keys(system, payload))
    refutation = Refutation(farkas)
    problem = verify_homomorphism_refutation(a, b, farkas)
    if problem is not None:
        raise RuntimeError(f"internal error: invalid refutation: {problem}")
    return refutation


def find_tsfp(language: ValuedStructure, m: int,
              budget: int = DEFAULT_BUDGET) -> Certificate:
    """Decide existence of an m-ary totally symmetric fractional
    polymorphism by LP feasibility over symmetric operations.

    Refutations are re-indexed by (symbol, tuple of multiset codes), the
    row space of the equivalent multiset-structure homomorphism system,
    so the two routes produce interchangeable certificates.
    """
    if m <= 1:
        raise InputError("arity must be at least 2")
    system, msd, hom_keys = _tsfp_system(language, m, budget)
    status, payload = _solve_system(system)
    if status == "feasible":
        omega = FractionalOperation(
            (_symmetric_operation(
                system.decode_column(int(system.allowed[j])), msd), w)
            for j, w in payload.items()
        )
        witness = Witness(omega)
        problem = check_fractional_polymorphism(language, omega)
        if problem is not None:
            raise RuntimeError(f"internal error: invalid witness: {problem}")
        return witness
    pm = build_multiset_structure(language, m)
    farkas = _normalize_refutation(
        pm, language, _farkas_to_keys(system, payload, keys=hom_keys)
    )
    refutation = Refutation(farkas)
    problem = verify_homomorphism_refutation(pm, language, farkas)
    if problem is not None:
        raise RuntimeError(f"internal error: invalid refutation: {problem}")
    return refutation


def _map_operation(values: tuple[int, ...], da: int, db: int) -> Operation:
    return Operation(da, 1, values, codomain_size=None if db == da else db)


def _symmetric_operation(values: tuple[int, ...],
                         msd: MultisetDomain) -> Operation:
    d = msd.domain_size
    table = tuple(
        values[msd.index_of_tuple(t)] for t in all_tuples(d, msd.m)
    )
    return Operation(d, msd.m, table)


# ---------------------------------------------------------------------------
# certificate verification (exact, independent of the solver)


def verify_homomorphism_witness(a: ValuedStructure, b: ValuedStructure,
                                omega: FractionalOperation) -> str | None:
    """None if omega is a valid fractional homomorphism A -> B."""
    if omega.l1_norm != 1:
        return "total weight differs from 1"
    for g in omega.support:
        if g.arity != 1 or g.domain_size != a.domain_size \
                or g.out_domain != b.domain_size:
            return "support operation is not a map between the domains"
    for sym in a.signature.symbols:
        for abar in all_tuples(a.domain_size, sym.arity):
            fa = a.value(sym.name, abar)
            if fa.is_infinite:
                continue
            lhs = ZERO
            for g, w in omega.items():
                lhs = lhs + ExtendedRational(w) * b.value(
                    sym.name, tuple(g(x) for x in abar)
                )
            if not lhs <= fa:
                return f"inequality fails at {sym.name}{abar}"
    return None


def minimum_margin(a: ValuedStructure, b: ValuedStructure,
                   farkas_y: dict[tuple[str, tuple[int, ...]], Fraction]
                   ) -> Fraction | None:
    """Exact minimum over non-excluded maps g of

        sum y(f, abar) * f^B(g(abar))  -  sum y(f, abar) * f^A(abar).

    Maps hitting an infinite f^B value on a finite row are excluded: any
    distribution is forced to give them weight zero.  None when every map
    is excluded (the system is then vacuously infeasible).  A float
    screen selects the near-minimal candidates, which are re-checked
    exactly.
    """
    system = _hom_system(a, b, budget=10**9)
    if len(system.allowed) == 0:
        return None
    y = []
    for key, scale in zip(system.row_keys, system.row_scales):
        y.append(farkas_y.get(key, Fraction(0)) / scale)
    base = sum((yi * bi for yi, bi in zip(y, system.rhs)), Fraction(0))
    den = math.lcm(*(yi.denominator for yi in y), base.denominator)
    ynum = [int(yi * den) for yi in y]
    scale_f = float(max(1, max(abs(v) for v in ynum)))
    yf = np.array([v / scale_f for v in ynum], dtype=np.float64)
    mf = system.matrix.astype(np.float64)
    vf = mf @ yf
    errb = np.abs(mf) @ np.abs(yf) * 1e-9 + 1e-300
    suspects = np.nonzero(vf <= vf.min() + 2 * errb + errb[int(np.argmin(vf))])[0]
    best = None
    for j in suspects:
        row = system.matrix[j]
        total = sum(int(c) * v for c, v in zip(row, ynum) if c)
        if best is None or total < best:
            best = total
    assert best is not None
    return Fraction(best, den) - base


def verify_homomorphism_refutation(
        a: ValuedStructure, b: ValuedStructure,
        farkas_y: dict[tuple[str, tuple[int, ...]], Fraction]) -> str | None:
    """None if the Farkas vector proves no fractional homomorphism exists.

    Validity means: y >= 0 supported on finite rows, and every map g not
    already excluded by an infinite f^B value on a finite row has margin
    at least 1 (the normalized form of the alternative system).
    """
    for (name, abar), w in farkas_y.items():
        if w < 0:
            return f"negative weight at {name}{abar}"
        if a.value(name, abar).is_infinite:
            return f"supported on an infinite-cost row {name}{abar}"
    margin = minimum_margin(a, b, farkas_y)
    if margin is not None and margin < 1:
        return f"margin {margin} is below 1"
    return None


def _normalize_refutation(a: ValuedStructure, b: ValuedStructure,
                          farkas_y: dict) -> dict:
    """Scale the vector so its exact minimum margin is 1."""
    margin = minimum_margin(a, b, farkas_y)
    if margin is None or margin == 1:
        return dict(farkas_y)
    if margin <= 0:
        raise RuntimeError("internal error: nonpositive certificate margin")
    return {key: w / margin for key, w in farkas_y.items()}


# ---------------------------------------------------------------------------
# witness converters between the two formulations


def tsfp_to_homomorphism_witness(omega: FractionalOperation,
                                 m: int) -> FractionalOperation:
    """An m-ary totally symmetric omega induces a fractional homomorphism
    from the multiset structure: each g becomes the map [t] -> g(t)."""
    d = omega.support[0].domain_size
    msd = MultisetDomain(d, m)
    converted = []
    for g, w in omega.items():
        if g.arity != m:
            raise InputError(f"expected arity {m}, got {g.arity}")
        if not is_symmetric(g):
            raise InputError("support contains a non-symmetric operation")
        values = tuple(g(*t) for t in msd.multisets)
        converted.append((
            Operation(len(msd), 1, values, codomain_size=d), w
        ))
    return FractionalOperation(converted)


def homomorphism_to_tsfp_witness(omega: FractionalOperation,
                                 d: int, m: int) -> FractionalOperation:
    """A fractional homomorphism from the multiset structure composes with
    the canonical map (x_1..x_m) -> [x_1..x_m] into a totally symmetric
    fractional polymorphism."""
    msd = MultisetDomain(d, m)
    converted = []
    for g, w in omega.items():
        if g.arity != 1 or g.domain_size != len(msd) or g.out_domain != d:
            raise InputError("support is not a family of multiset maps")
        table = tuple(
            g(msd.index_of_tuple(t)) for t in all_tuples(d, m)
        )
        converted.append((Operation(d, m, table), w))
    return FractionalOperation(converted)


# ---------------------------------------------------------------------------
# gap instances


@dataclass
class GapReport:
    instance: ValuedStructure
    blp: ExtendedRational
    opt: ExtendedRational
    feasible_point_bound: Fraction
    farkas_y: dict[tuple[str, tuple[int, ...]], Fraction]


def farkas_gap_instance(language: ValuedStructure, m: int,
                        refutation: Refutation,
                        budget: int = DEFAULT_BUDGET) -> GapReport:
    """Turn a Farkas refutation into an instance where the relaxation is
    strictly below the optimum.

    The instance lives on the multiset codes; the weight of scope abar
    under symbol f is the Farkas component y(f, abar).  Verified exactly:
    the relaxation value is at most the bound realized by the explicit
    feasible point (multiplicity marginals plus best-pairing lambdas),
    and the true optimum exceeds the relaxation strictly.

    A vector concentrated on scopes with repeated variables can fail to
    open a gap: there the relaxation is forced to pay the consistent
    assignment cost, which can exceed the multiset-structure cost.  In
    that case extra mass is spread over the repetition-free rows — this
    keeps the margin positive (renormalized afterwards) and is retried at
    geometrically decreasing weights before giving up.
    """
    pm = build_multiset_structure(language, m)
    candidates = [dict(refutation.farkas_y)]
    # a vector supported on repetition-free rows only, when one exists,
    # keeps the explicit-point bound tight and the instance sparse
    restricted = _hom_system(
        pm, language, budget,
        row_filter=lambda _name, abar: len(set(abar)) == len(abar),
    )
    status, payload = _solve_system(restricted)
    if status == "infeasible" and any(payload):
        candidates.append(_farkas_to_keys(restricted, payload))
    extra = _repetition_free_rows(pm)
    if extra:
        for eps in (Fraction(1), Fraction(1, 2), Fraction(1, 4),
                    Fraction(1, 8), Fraction(1, 16)):
            enriched = dict(refutation.farkas_y)
            for key in extra:
                enriched[key] = enriched.get(key, Fraction(0)) + eps
            candidates.append(enriched)
    last_error = "no usable Farkas vector"
    for y in candidates:
        margin = minimum_margin(pm, language, y)
        if margin is not None and margin <= 0:
            last_error = f"enriched vector lost the margin ({margin})"
            continue
        if margin is not None and margin != 1:
            y = {key: w / margin for key, w in y.items()}
        report = _try_gap_instance(language, pm, m, y, budget)
        if isinstance(report, str):
            last_error = report
            continue
        refutation.gap_instance = report.instance
        return report
    raise RuntimeError(f"internal error: certificate invalid: {last_error}")


def _repetition_free_rows(pm: ValuedStructure) -> list[tuple[str, tuple]]:
    rows = []
    for sym in pm.signature.symbols:
        for abar in all_tuples(pm.domain_size, sym.arity):
            if len(set(abar)) == len(abar) \
                    and not pm.value(sym.name, abar).is_infinite:
                rows.append((sym.name, abar))
    return rows


def _try_gap_instance(language: ValuedStructure, pm: ValuedStructure,
                      m: int, farkas_y: dict, budget: int):
    """Build and verify one candidate; returns a GapReport or an error
    string describing which check failed."""
    n_vars = pm.domain_size
    tables: dict[str, list[Fraction]] = {}
    for sym in language.signature.symbols:
        table = [Fraction(0)] * (n_vars ** sym.arity)
        for (name, abar), w in farkas_y.items():
            if name == sym.name:
                table[tuple_index(abar, n_vars)] = w
        tables[sym.name] = table
    instance = ValuedStructure(language.signature, n_vars, tables)

    try:
        _, _, bound = explicit_blp_point(language, m, instance)
    except InputError as exc:
        return str(exc)
    blp = blp_value(instance, language)
    opt = brute_force_opt(instance, language, budget=budget).opt_value
    if blp.is_infinite or blp.as_fraction() > bound:
        return "relaxation exceeds the explicit-point bound"
    if not blp < opt:
        return f"no strict gap (blp = opt = {blp})"
    return GapReport(instance, blp, opt, bound, farkas_y)


def explicit_blp_point(language: ValuedStructure, m: int,
                       instance: ValuedStructure
                       ) -> tuple[dict, dict, Fraction]:
    """A hand-built feasible relaxation point for a multiset-code instance.

    mu_alpha(a) = multiplicity of a in alpha over m; each scope's lambda
    spreads mass 1/m over the coordinates of a best pairing of orderings,
    chosen per distinct scope variable so repeated positions stay
    consistent.  Returns (mu, lam, objective); on repetition-free scopes
    the per-scope cost equals the multiset-structure cost.
    """
    d = language.domain_size
    msd = MultisetDomain(d, m)
    if instance.domain_size != len(msd):
        raise InputError("instance variables are not the multiset codes")
    mu: dict[tuple[int, int], Fraction] = {}
    for code, alpha in enumerate(msd.multisets):
        for a in range(d):
            mu[(code, a)] = Fraction(alpha.count(a), m)
    lam: dict[tuple[str, tuple[int, ...], tuple[int, ...]], Fraction] = {}
    objective = Fraction(0)
    for name, abar, w in instance.positive_terms():
        orderings, cost = _best_pairing(language, name, msd, abar)
        if cost.is_infinite:
            raise InputError(
                f"no finite consistent pairing for {name}{abar}"
            )
        dvars = tuple(sorted(set(abar)))
        for j in range(m):
            sigma = tuple(orderings[abar.index(c)][j] for c in dvars)
            key = (name, abar, sigma)
            lam[key] = lam.get(key, Fraction(0)) + Fraction(1, m)
        objective += w.as_fraction() * cost.as_fraction() * Fraction(1, m)
    return mu, lam, objective


def _best_pairing(language: ValuedStructure, name: str, msd: MultisetDomain,
                  abar: tuple[int, ...]
                  ) -> tuple[tuple[tuple[int, ...], ...], ExtendedRational]:
    """A cost-minimizing choice of orderings, one per distinct variable.

    Repeated positions share their variable's ordering, so the induced
    per-coordinate assignments are well defined.  On repetition-free
    scopes the minimum equals m times the multiset-structure cost.
    """
    dvars = tuple(dict.fromkeys(abar))
    first = msd.multiset(dvars[0])
    rest = [
        sorted(set(itertools.permutations(msd.multiset(c))))
        for c in dvars[1:]
    ]
    best = INF
    best_orderings = None
    for tail in itertools.product(*rest):
        chosen = dict(zip(dvars, (first,) + tail))
        orderings = tuple(chosen[c] for c in abar)
        total = ZERO
        for j in range(msd.m):
            total = total + language.value(
                name, tuple(t[j] for t in orderings)
            )
        if best_orderings is None or total < best:
            best = total
            best_orderings = orderings
    assert best_orderings is not None
    return best_orderings, best


# ---------------------------------------------------------------------------
# solvability verdicts


@dataclass
class SolvabilityReport:
    certificates: dict[int, Certificate]
    verdict: str                      # "refuted" | "certified" | "partial"
    refuted_at: int | None = None
    gap: GapReport | None = None
    skipped: list[int] = field(default_factory=list)


def certify_blp_solvability(language: ValuedStructure, m_max: int,
                            budget: int = DEFAULT_BUDGET) -> SolvabilityReport:
    """Witnesses for m = 2..m_max, or a refutation with a gap instance.

    A refutation at any m is conclusive: the relaxation does not solve
    this language.  A full run of witnesses certifies solvability only up
    to m_max — the property quantifies over every arity.
    """
    if m_max < 2:
        raise InputError("m_max must be at least 2")
    certificates: dict[int, Certificate] = {}
    skipped: list[int] = []
    for m in range(2, m_max + 1):
        try:
            cert = find_tsfp(language, m, budget=budget)
        except BudgetExceeded:
            skipped.append(m)
            continue
        certificates[m] = cert
        if isinstance(cert, Refutation):
            gap = farkas_gap_instance(language, m, cert, budget=budget)
            return SolvabilityReport(
                certificates, "refuted", refuted_at=m, gap=gap,
                skipped=skipped,
            )
    verdict = "partial" if skipped else "certified"
    return SolvabilityReport(certificates, verdict, skipped=skipped)


# ---------------------------------------------------------------------------
# bounded clone generation


@dataclass
class CloneSearch:
    operations: list[Operation]
    symmetric: Operation | None


def generate_clone_bounded(generators, target_arity: int, depth_bound: int,
                           domain_size: int | None = None,
                           budget: int = DEFAULT_BUDGET) -> CloneSearch:
    """Target-arity members of the clone of the generators, up to a
    superposition-nesting depth bound, reporting the first symmetric one.

    Projections have depth 0; h[g_1..g_n] has depth 1 + max depth(g_i).
    Exhausting the bound without a symmetric member proves nothing.
    """
    generators = sorted(generators, key=lambda g: g.sort_key())
    if domain_size is None:
        if not generators:
            raise InputError("domain_size required for empty generator sets")
        domain_size = generators[0].domain_size
    if any(g.domain_size != domain_size or g.out_domain != domain_size
           for g in generators):
        raise InputError("generators must share one domain")

    current = [projection(domain_size, target_arity, i)
               for i in range(target_arity)]
    seen = {g.table for g in current}
    symmetric = next((g for g in current if is_symmetric(g)), None)
    produced = len(current)
    for _ in range(depth_bound):
        new: list[Operation] = []
        for h in generators:
            for gs in itertools.product(current, repeat=h.arity):
                produced += 1
                if produced > budget:
                    raise BudgetExceeded(
                        f"clone generation exceeded budget {budget}"
                    )
                g = superpose(h, gs)
                if g.table not in seen:
                    seen.add(g.table)
                    new.append(g)
                    if symmetric is None and is_symmetric(g):
                        symmetric = g
        if not new:
            break
        current = current + new
    return CloneSearch(current, symmetric)
