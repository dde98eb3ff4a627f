"""The basic LP relaxation and its two-stage general-valued variant.

``blp_value`` runs generalized arc consistency on the finite/infinite
skeleton first and returns infinity on a wiped-out domain; otherwise it
solves the relaxation exactly.  ``solve_via_blp`` extracts an optimal
assignment by self-reduction: values are pinned one variable at a time,
keeping a pin exactly when it preserves the LP optimum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import lp as lpmod
from .lp import LinearProgram, LpConstraint, LpVariable
from .rationals import INF, ZERO, ExtendedRational
from .structures import (
    Assignment,
    InputError,
    ValuedStructure,
    check_compatible,
)


@dataclass(frozen=True)
class AcState:
    """Surviving domains after generalized arc consistency."""

    domains: tuple[frozenset[int], ...]
    empty_domain: bool

    def dom(self, x: int) -> list[int]:
        return sorted(self.domains[x])


def arc_consistency(instance: ValuedStructure,
                    language: ValuedStructure) -> AcState:
    """Prune values with no finite-cost support, iterated to a fixpoint.

    Only the {finite, infinite} skeleton of the language matters here;
    finite-valued languages prune nothing.
    """
    check_compatible(instance, language)
    n_vars = instance.domain_size
    d = language.domain_size
    domains = [set(range(d)) for _ in range(n_vars)]
    scopes = []
    for name, xbar, _ in instance.positive_terms():
        scopes.append((name, xbar, tuple(sorted(set(xbar)))))

    changed = True
    while changed:
        changed = False
        for name, xbar, dvars in scopes:
            if any(not domains[x] for x in dvars):
                continue
            supported: dict[int, set[int]] = {x: set() for x in dvars}
            for vals in itertools.product(*(sorted(domains[x]) for x in dvars)):
                sigma = dict(zip(dvars, vals))
                if not language.value(name, tuple(sigma[x] for x in xbar)).is_infinite:
                    for x, v in sigma.items():
                        supported[x].add(v)
            for x in dvars:
                if supported[x] != domains[x]:
                    domains[x] &= supported[x]
                    changed = True
    empty = any(not dom for dom in domains)
    return AcState(tuple(frozenset(dom) for dom in domains), empty)


@dataclass
class BlpModel:
    """The basic relaxation plus index maps into its variable names."""

    lp: LinearProgram
    ac: AcState
    lambda_names: dict[tuple[str, tuple[int, ...], tuple[int, ...]], str]
    mu_names: dict[tuple[int, int], str]
    constrained_vars: frozenset[int]


class EmptyDomainError(InputError):
    """Raised when a model is requested for a wiped-out AC state."""


def _scope_assignments(dvars, ac: AcState):
    return itertools.product(*(ac.dom(x) for x in dvars))


def build_blp(instance: ValuedStructure, language: ValuedStructure,
              ac: AcState) -> BlpModel:
    """Build the relaxation restricted to surviving values.

    Variables: one lambda per (positive-weight term, finite-cost scope
    assignment) and one mu per (variable, surviving value); rows are the
    marginalization and normalization equalities; everything is bounded
    to [0, 1]; the objective is the weighted expected cost, minimized.
    """
    check_compatible(instance, language)
    if ac.empty_domain:
        raise EmptyDomainError("empty domain: the optimum is infinite")

    variables: list[LpVariable] = []
    constraints: list[LpConstraint] = []
    objective: dict[str, Fraction] = {}
    lambda_names: dict[tuple[str, tuple[int, ...], tuple[int, ...]], str] = {}
    mu_names: dict[tuple[int, int], str] = {}
    constrained: set[int] = set()

    for x in range(instance.domain_size):
        for a in ac.dom(x):
            name = f"mu[{x},{a}]"
            mu_names[(x, a)] = name
            variables.append(LpVariable(name, Fraction(0), Fraction(1)))

    for fname, xbar, w in instance.positive_terms():
        if w.is_infinite:
            raise InputError(
                f"infinite instance weight on {fname}{xbar}; "
                "instance weights must be finite"
            )
        dvars = tuple(sorted(set(xbar)))
        constrained.update(dvars)
        wf = w.as_fraction()
        sigmas = []
        for vals in _scope_assignments(dvars, ac):
            sigma = dict(zip(dvars, vals))
            cost = language.value(fname, tuple(sigma[x] for x in xbar))
            if cost.is_infinite:
                continue
            name = "lam[{},{};{}]".format(
                fname, ",".join(map(str, xbar)), ",".join(map(str, vals))
            )
            lambda_names[(fname, xbar, vals)] = name
            variables.append(LpVariable(name, Fraction(0), Fraction(1)))
            coeff = wf * cost.as_fraction()
            if coeff:
                objective[name] = objective.get(name, Fraction(0)) + coeff
            sigmas.append((vals, name))
        # marginalization: sum of lambdas with sigma(x) = a equals mu_x(a)
        for pos, x in enumerate(dvars):
            for a in ac.dom(x):
                coeffs = {
                    name: Fraction(1)
                    for vals, name in sigmas
                    if vals[pos] == a
                }
                coeffs[mu_names[(x, a)]] = Fraction(-1)
                constraints.append(LpConstraint.of(coeffs, "==", 0))

    for x in range(instance.domain_size):
        coeffs = {mu_names[(x, a)]: Fraction(1) for a in ac.dom(x)}
        constraints.append(LpConstraint.of(coeffs, "==", 1))

    model = LinearProgram(variables, constraints, objective, "min")
    return BlpModel(model, ac, lambda_names, mu_names, frozenset(constrained))


def blp_value(instance: ValuedStructure,
              language: ValuedStructure) -> ExtendedRational:
    """Arc consistency, then the exact relaxation optimum (inf if wiped)."""
    ac = arc_consistency(instance, language)
    if ac.empty_domain:
        return INF
    model = build_blp(instance, language, ac)
    sol = lpmod.solve(model.lp, certificate=False)
    if sol.status != lpmod.OPTIMAL:
        raise RuntimeError(f"relaxation unexpectedly {sol.status}")
    return ExtendedRational(sol.objective_value)


def _pinned_lp(model: BlpModel, pins: dict[int, int]) -> LinearProgram:
    """Bound-fix mu variables according to pins (mu=1 for the pinned
    value, 0 for the other surviving values)."""
    new_vars = []
    for v in model.lp.variables:
        if v.name.startswith("mu["):
            x, a = map(int, v.name[3:-1].split(","))
            if x in pins:
                val = Fraction(1) if a == pins[x] else Fraction(0)
                new_vars.append(LpVariable(v.name, val, val))
                continue
        new_vars.append(v)
    return LinearProgram(
        new_vars, model.lp.constraints, model.lp.objective, "min"
    )


def solve_via_blp(instance: ValuedStructure, language: ValuedStructure
                  ) -> tuple[ExtendedRational, Assignment | None]:
    """Relaxation value plus an assignment recovered by self-reduction.

    Variables are processed in ascending index order, candidate values in
    ascending order; a pin is kept exactly when the re-solved optimum
    equals the running optimum.  If some variable admits no
    optimum-preserving value the relaxation provably does not solve this
    instance and (value, None) is returned.
    """
    ac = arc_consistency(instance, language)
    if ac.empty_domain:
        return INF, None
    model = build_blp(instance, language, ac)
    base = lpmod.solve(model.lp, certificate=False)
    if base.status != lpmod.OPTIMAL:
        raise RuntimeError(f"relaxation unexpectedly {base.status}")
    value = ExtendedRational(base.objective_value)

    pins: dict[int, int] = {}
    for x in range(instance.domain_size):
        if x not in model.constrained_vars:
            # isolated variable: any value is optimal; fixed choice
            pins[x] = min(ac.dom(x))
            continue
        chosen = None
        for a in ac.dom(x):
            trial = lpmod.solve(
                _pinned_lp(model, {**pins, x: a}), certificate=False
            )
            if trial.status == lpmod.OPTIMAL and \
                    trial.objective_value == base.objective_value:
                chosen = a
                break
        if chosen is None:
            return value, None
        pins[x] = chosen
    return value, tuple(pins[x] for x in range(instance.domain_size))
