"""Brute-force ground truth for everything else in the package.

The oracle enumerates all ``|D|^{|X|}`` assignments and keeps the exact
minimum.  It is deliberately simple; its job is to be trivially auditable.
A vectorized integer path is used for finite-valued inputs (exact: all
weights are scaled to a common denominator), with a plain loop handling
infinities.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rationals import INF, ZERO, ExtendedRational
from .structures import (
    Assignment,
    InputError,
    ValuedStructure,
    check_compatible,
    tuple_index,
)

DEFAULT_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration would exceed its configured budget."""


@dataclass
class OracleResult:
    opt_value: ExtendedRational
    argmin: Assignment | None
    assignments_enumerated: int


def brute_force_opt(instance: ValuedStructure, language: ValuedStructure,
                    budget: int = DEFAULT_BUDGET) -> OracleResult:
    """Exhaustive minimum of the measure, lexicographically least argmin."""
    check_compatible(instance, language)
    n_vars = instance.domain_size
    d = language.domain_size
    total = d ** n_vars
    if total > budget:
        raise BudgetExceeded(
            f"{d}^{n_vars} = {total} assignments exceed budget {budget}"
        )
    terms = list(instance.positive_terms())
    if not terms:
        return OracleResult(ZERO, tuple([0] * n_vars), 0)

    fast = _fast_opt(terms, language, n_vars, d)
    if fast is not None:
        return fast

    best: ExtendedRational | None = None
    best_h: Assignment | None = None
    count = 0
    for h in itertools.product(range(d), repeat=n_vars):
        count += 1
        value = ZERO
        for name, xbar, w in terms:
            cost = language.value(name, tuple(h[x] for x in xbar))
            value = value + w * cost
            if best is not None and best <= value:
                break
        else:
            if best is None or value < best:
                best = value
                best_h = h
                if value.is_zero:
                    break
    assert best is not None
    if best.is_infinite:
        return OracleResult(INF, None, count)
    return OracleResult(best, best_h, count)


def _fast_opt(terms, language: ValuedStructure, n_vars: int, d: int):
    """Vectorized exact enumeration for finite-valued data.

    Scales every weight*cost product to a common denominator and sums
    int64 arrays; bails out (returning None) on infinities or potential
    overflow so the generic loop takes over.
    """
    products = []  # per term: list of weight*cost Fractions over the table
    denoms = [1]
    for name, xbar, w in terms:
        if w.is_infinite:
            return None
        wf = w.as_fraction()
        row = []
        for v in language.tables[name]:
            if v.is_infinite:
                return None
            p = v.as_fraction() * wf
            row.append(p)
            denoms.append(p.denominator)
        products.append(row)
    scale = math.lcm(*denoms)

    total = d ** n_vars
    if total * len(terms) > 5 * 10**7:
        return None
    # assignment matrix: column x holds the value of variable x
    grids = np.indices([d] * n_vars).reshape(n_vars, total).T
    acc = np.zeros(total, dtype=np.int64)
    max_entry = 0
    for (name, xbar, w), row in zip(terms, products):
        scaled = [int(p * scale) for p in row]
        max_entry += max(scaled)
        if max_entry >= 2**62:
            return None
        idx = np.zeros(total, dtype=np.int64)
        for x in xbar:
            idx = idx * d + grids[:, x]
        acc += np.asarray(scaled, dtype=np.int64)[idx]
    pos = int(np.argmin(acc))
    # np.argmin returns the first minimizer; rows are in lexicographic
    # order of assignments, so this is the lexicographically least argmin.
    best = ExtendedRational(Fraction(int(acc[pos]), scale))
    return OracleResult(best, tuple(int(v) for v in grids[pos]), total)


def enumerate_operations(domain_size: int, arity: int,
                         symmetric_only: bool = False,
                         budget: int = DEFAULT_BUDGET):
    """All operations D^arity -> D as dense tables, lexicographic order.

    With ``symmetric_only`` the stream is restricted to tables constant on
    multiset orbits, enumerated by their orbit-representative values.
    Yields :class:`vcsp.operations.Operation`.
    """
    from .operations import MultisetDomain, Operation

    if symmetric_only:
        msd = MultisetDomain(domain_size, arity)
        n_free = len(msd)
    else:
        n_free = domain_size ** arity
    count = domain_size ** n_free
    if count > budget:
        raise BudgetExceeded(
            f"{domain_size}^{n_free} = {count} operations exceed budget {budget}"
        )
    if not symmetric_only:
        for values in itertools.product(range(domain_size), repeat=n_free):
            yield Operation(domain_size, arity, values)
        return
    orbit_of = [
        msd.index_of_tuple(t)
        for t in itertools.product(range(domain_size), repeat=arity)
    ]
    for values in itertools.product(range(domain_size), repeat=n_free):
        table = tuple(values[o] for o in orbit_of)
        yield Operation(domain_size, arity, table)
