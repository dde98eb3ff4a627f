"""Optimal soft arc consistency: bound-maximization LP and its dual.

Terms of an instance are grouped by the underlying *set* of their scope
variables; one dual variable serves every constraint on the same scope
set, which makes the dual a relaxation at least as tight as the basic
one (where each term carries its own distribution).  Unary symbols are
kept out of the scope groups and enter through a dedicated per-variable
row.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import lp as lpmod
from .blp import AcState, EmptyDomainError, arc_consistency
from .lp import LinearProgram, LpConstraint, LpVariable
from .rationals import INF, ExtendedRational
from .structures import (
    InputError,
    ValuedStructure,
    check_compatible,
)


@dataclass(frozen=True)
class ScopeIndex:
    """Positive-weight terms grouped by scope set, unary symbols apart.

    ``groups`` maps each scope set (of a symbol with arity >= 2) to its
    terms; ``unary_symbols`` lists the arity-1 symbol names, all of which
    contribute to the per-variable row regardless of weight.
    """

    groups: dict[frozenset[int], list[tuple[str, tuple[int, ...], Fraction]]]
    unary_symbols: tuple[str, ...]


def scope_index(instance: ValuedStructure,
                language: ValuedStructure) -> ScopeIndex:
    check_compatible(instance, language)
    groups: dict[frozenset[int], list] = {}
    unary = tuple(
        sym.name for sym in language.signature.symbols if sym.arity == 1
    )
    for name, xbar, w in instance.positive_terms():
        if w.is_infinite:
            raise InputError(
                f"infinite instance weight on {name}{xbar}; "
                "instance weights must be finite"
            )
        if len(xbar) == 1:
            continue
        groups.setdefault(frozenset(xbar), []).append(
            (name, xbar, w.as_fraction())
        )
    return ScopeIndex(groups, unary)


def _group_rows(index: ScopeIndex, language: ValuedStructure, ac: AcState):
    """Yield (scope tuple, assignment, finite total cost) per scope row."""
    for sset in sorted(index.groups, key=sorted):
        scope = tuple(sorted(sset))
        for vals in itertools.product(*(ac.dom(x) for x in scope)):
            sigma = dict(zip(scope, vals))
            total = ExtendedRational(0)
            for name, xbar, w in index.groups[sset]:
                cost = language.value(name, tuple(sigma[x] for x in xbar))
                if cost.is_infinite:
                    total = INF
                    break
                total = total + cost * w
            if total.is_infinite:
                continue
            yield scope, vals, total.as_fraction()


def _unary_cost(instance: ValuedStructure, language: ValuedStructure,
                index: ScopeIndex, x: int, a: int) -> ExtendedRational:
    total = ExtendedRational(0)
    for name in index.unary_symbols:
        total = total + instance.value(name, (x,)) * language.value(name, (a,))
    return total


def build_osac_primal(instance: ValuedStructure,
                      language: ValuedStructure) -> LinearProgram:
    """max sum z_x subject to the scope rows and unary rows.

    One row per (scope set, finite-cost assignment) bounds the y-shares
    of that scope; one row per (variable, surviving value) bounds z_x by
    the unary cost plus the shares collected from incident scopes.  All
    variables are free.
    """
    ac = arc_consistency(instance, language)
    if ac.empty_domain:
        raise EmptyDomainError("empty domain: the optimum is infinite")
    index = scope_index(instance, language)

    free = (None, None)
    variables: list[LpVariable] = []
    constraints: list[LpConstraint] = []
    def y_name(scope, x, a):
        return "y[{};{},{}]".format(",".join(map(str, scope)), x, a)

    for sset in sorted(index.groups, key=sorted):
        scope = tuple(sorted(sset))
        for x in scope:
            for a in ac.dom(x):
                variables.append(LpVariable(y_name(scope, x, a), *free))
    for x in range(instance.domain_size):
        variables.append(LpVariable(f"z[{x}]", *free))

    for scope, vals, total in _group_rows(index, language, ac):
        coeffs: dict[str, Fraction] = {}
        for x, a in zip(scope, vals):
            n = y_name(scope, x, a)
            coeffs[n] = coeffs.get(n, Fraction(0)) + 1
        constraints.append(LpConstraint.of(coeffs, "<=", total))

    for x in range(instance.domain_size):
        for a in ac.dom(x):
            ucost = _unary_cost(instance, language, index, x, a)
            if ucost.is_infinite:
                continue
            coeffs = {f"z[{x}]": Fraction(-1)}
            for sset in sorted(index.groups, key=sorted):
                if x in sset:
                    n = y_name(tuple(sorted(sset)), x, a)
                    coeffs[n] = coeffs.get(n, Fraction(0)) + 1
            constraints.append(
                LpConstraint.of(coeffs, ">=", -ucost.as_fraction())
            )

    objective = {
        f"z[{x}]": Fraction(1) for x in range(instance.domain_size)
    }
    return LinearProgram(variables, constraints, objective, "max")


def build_osac_dual(instance: ValuedStructure,
                    language: ValuedStructure) -> LinearProgram:
    """min weighted cost over scope-grouped distributions.

    Variables lam[scope; assignment] >= 0 (one per finite-cost scope
    row) and mu[x, a] >= 0; marginalization ties every scope containing
    x to the same mu, and each mu row sums to one.
    """
    ac = arc_consistency(instance, language)
    if ac.empty_domain:
        raise EmptyDomainError("empty domain: the optimum is infinite")
    index = scope_index(instance, language)

    variables: list[LpVariable] = []
    constraints: list[LpConstraint] = []
    objective: dict[str, Fraction] = {}

    def mu_name(x, a):
        return f"mu[{x},{a}]"
    for x in range(instance.domain_size):
        for a in ac.dom(x):
            variables.append(
                LpVariable(mu_name(x, a), Fraction(0), Fraction(1))
            )

    rows_by_scope: dict[tuple[int, ...], list[tuple[tuple[int, ...], str]]] = {}
    for scope, vals, total in _group_rows(index, language, ac):
        name = "lam[{};{}]".format(
            ",".join(map(str, scope)), ",".join(map(str, vals))
        )
        variables.append(LpVariable(name, Fraction(0), Fraction(1)))
        if total:
            objective[name] = objective.get(name, Fraction(0)) + total
        rows_by_scope.setdefault(scope, []).append((vals, name))

    for scope, rows in rows_by_scope.items():
        for pos, x in enumerate(scope):
            for a in ac.dom(x):
                coeffs = {
                    name: Fraction(1)
                    for vals, name in rows if vals[pos] == a
                }
                coeffs[mu_name(x, a)] = Fraction(-1)
                constraints.append(LpConstraint.of(coeffs, "==", 0))

    for x in range(instance.domain_size):
        coeffs = {mu_name(x, a): Fraction(1) for a in ac.dom(x)}
        constraints.append(LpConstraint.of(coeffs, "==", 1))
        for a in ac.dom(x):
            ucost = _unary_cost(instance, language, index, x, a)
            if ucost.is_infinite:
                # unsupported by any finite unary row: force mu to zero
                constraints.append(
                    LpConstraint.of({mu_name(x, a): Fraction(1)}, "==", 0)
                )
            elif ucost:
                name = mu_name(x, a)
                objective[name] = objective.get(name, Fraction(0)) \
                    + ucost.as_fraction()

    return LinearProgram(variables, constraints, objective, "min")


def osac_value(instance: ValuedStructure,
               language: ValuedStructure) -> ExtendedRational:
    """Arc consistency, then the exact dual optimum (inf if wiped out)."""
    ac = arc_consistency(instance, language)
    if ac.empty_domain:
        return INF
    model = build_osac_dual(instance, language)
    sol = lpmod.solve(model, certificate=False)
    if sol.status == lpmod.INFEASIBLE:
        # every value of some variable lost all finite scope rows: no
        # assignment has finite measure, so the optimum is infinite
        return INF
    if sol.status != lpmod.OPTIMAL:
        raise RuntimeError(f"relaxation unexpectedly {sol.status}")
    return ExtendedRational(sol.objective_value)
