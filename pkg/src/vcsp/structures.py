"""Valued structures over a finite signature and the measure functional.

A :class:`ValuedStructure` plays two roles: a valued constraint language
(costs on a fixed domain) and a VCSP instance (term weights on a variable
set).  Both views share the same signature and dense-table representation.
Domain elements are canonical integers ``0 .. domain_size - 1``; tables are
stored row-major with the last tuple coordinate varying fastest.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .rationals import INF, ZERO, ExtendedRational, RatLike


class InputError(ValueError):
    """Raised on malformed inputs (bad tables, mismatched signatures, ...)."""


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    arity: int


@dataclass(frozen=True)
class Signature:
    symbols: tuple[FunctionSymbol, ...]

    def __post_init__(self):
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            raise InputError("function symbol names must be unique")
        for s in self.symbols:
            if s.arity < 1:
                raise InputError(f"symbol {s.name!r} has arity {s.arity} < 1")

    @classmethod
    def of(cls, *symbols: tuple[str, int]) -> "Signature":
        return cls(tuple(FunctionSymbol(n, a) for n, a in symbols))

    def arity(self, name: str) -> int:
        for s in self.symbols:
            if s.name == name:
                return s.arity
        raise InputError(f"unknown symbol {name!r}")

    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.symbols)


def tuple_index(t: Sequence[int], domain_size: int) -> int:
    """Row-major index of a tuple (last coordinate fastest)."""
    idx = 0
    for x in t:
        idx = idx * domain_size + x
    return idx


def index_tuple(idx: int, domain_size: int, arity: int) -> tuple[int, ...]:
    out = []
    for _ in range(arity):
        idx, r = divmod(idx, domain_size)
        out.append(r)
    return tuple(reversed(out))


def all_tuples(domain_size: int, arity: int) -> Iterator[tuple[int, ...]]:
    """All tuples in row-major order (matches table layout)."""
    return itertools.product(range(domain_size), repeat=arity)


class ValuedStructure:
    """A signature, a domain size and one dense cost table per symbol."""

    def __init__(
        self,
        signature: Signature,
        domain_size: int,
        tables: Mapping[str, Sequence[RatLike]],
    ):
        if domain_size < 1:
            raise InputError("domain_size must be positive")
        self.signature = signature
        self.domain_size = domain_size
        converted: dict[str, tuple[ExtendedRational, ...]] = {}
        for sym in signature.symbols:
            if sym.name not in tables:
                raise InputError(f"missing table for symbol {sym.name!r}")
            table = tuple(ExtendedRational(v) for v in tables[sym.name])
            expected = domain_size ** sym.arity
            if len(table) != expected:
                raise InputError(
                    f"table for {sym.name!r} has {len(table)} entries, "
                    f"expected {expected}"
                )
            converted[sym.name] = table
        extra = set(tables) - set(signature.names())
        if extra:
            raise InputError(f"tables for unknown symbols: {sorted(extra)}")
        self.tables = converted

    def value(self, name: str, t: Sequence[int]) -> ExtendedRational:
        return self.tables[name][tuple_index(t, self.domain_size)]

    @property
    def is_finite_valued(self) -> bool:
        return not any(
            v.is_infinite for table in self.tables.values() for v in table
        )

    def scale(self, c: Fraction | int) -> "ValuedStructure":
        """Scale every table entry by a finite rational c >= 0."""
        c = ExtendedRational(c)
        return ValuedStructure(
            self.signature,
            self.domain_size,
            {n: [v * c for v in t] for n, t in self.tables.items()},
        )

    def positive_terms(self) -> Iterator[tuple[str, tuple[int, ...], ExtendedRational]]:
        """Yield (symbol, tuple, weight) for every nonzero table entry."""
        for sym in self.signature.symbols:
            table = self.tables[sym.name]
            for idx, w in enumerate(table):
                if w:
                    yield sym.name, index_tuple(idx, self.domain_size, sym.arity), w

    def __eq__(self, other) -> bool:
        if not isinstance(other, ValuedStructure):
            return NotImplemented
        return (
            self.signature == other.signature
            and self.domain_size == other.domain_size
            and self.tables == other.tables
        )

    def __repr__(self) -> str:
        return (
            f"ValuedStructure(domain_size={self.domain_size}, "
            f"symbols={self.signature.names()})"
        )


Assignment = tuple[int, ...]
"""A total map from instance variables to language-domain values,
represented positionally: ``h[x]`` is the value of variable ``x``."""


def check_compatible(instance: ValuedStructure, language: ValuedStructure) -> None:
    if instance.signature != language.signature:
        raise InputError("instance and language must share one signature")


def check_assignment(instance: ValuedStructure, language: ValuedStructure,
                     h: Assignment) -> None:
    if len(h) != instance.domain_size:
        raise InputError(
            f"assignment covers {len(h)} variables, "
            f"instance has {instance.domain_size}"
        )
    if any(not (0 <= v < language.domain_size) for v in h):
        raise InputError("assignment value out of language domain")


def measure(instance: ValuedStructure, language: ValuedStructure,
            h: Assignment) -> ExtendedRational:
    """Sum of ``f_I(xbar) * f_A(h(xbar))`` over all symbols and scope tuples.

    Uses the 0*inf = 0 convention: zero-weight terms never contribute,
    even on infinite-cost assignments.
    """
    check_compatible(instance, language)
    check_assignment(instance, language, h)
    total = ZERO
    for name, xbar, w in instance.positive_terms():
        cost = language.value(name, tuple(h[x] for x in xbar))
        total = total + w * cost
        if total.is_infinite:
            return INF
    return total


def validate_structure(s: ValuedStructure) -> list[str]:
    """Return a list of violations; empty list means the structure is ok.

    The constructor already rejects most malformed inputs; this re-checks
    the invariants on an existing object (useful after deserialization or
    manual surgery on the tables).
    """
    violations: list[str] = []
    if s.domain_size < 1:
        violations.append(f"domain_size {s.domain_size} is not positive")
    names = [sym.name for sym in s.signature.symbols]
    if len(set(names)) != len(names):
        violations.append("duplicate symbol names in signature")
    for sym in s.signature.symbols:
        if sym.arity < 1:
            violations.append(f"symbol {sym.name!r}: arity {sym.arity} < 1")
        table = s.tables.get(sym.name)
        if table is None:
            violations.append(f"symbol {sym.name!r}: missing table")
            continue
        expected = s.domain_size ** sym.arity
        if len(table) != expected:
            violations.append(
                f"symbol {sym.name!r}: table has {len(table)} entries, "
                f"expected {expected}"
            )
        for idx, v in enumerate(table):
            if not isinstance(v, ExtendedRational):
                violations.append(
                    f"symbol {sym.name!r}: entry {idx} is not an "
                    "ExtendedRational"
                )
            elif not v.is_infinite and v.as_fraction() < 0:
                violations.append(f"symbol {sym.name!r}: entry {idx} negative")
    return violations
