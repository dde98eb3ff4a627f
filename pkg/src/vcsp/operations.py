"""Finite operations, fractional operations and the multiset domain."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .structures import InputError, all_tuples, index_tuple, tuple_index


@dataclass(frozen=True)
class Operation:
    """A total operation D^arity -> D' given by its dense row-major table.

    ``codomain_size`` defaults to ``domain_size``; arity-1 operations with a
    different codomain represent plain maps between domains (used for
    fractional homomorphisms).
    """

    domain_size: int
    arity: int
    table: tuple[int, ...]
    codomain_size: int | None = None

    def __post_init__(self):
        cod = self.codomain_size if self.codomain_size is not None else self.domain_size
        object.__setattr__(self, "table", tuple(self.table))
        if len(self.table) != self.domain_size ** self.arity:
            raise InputError(
                f"operation table has {len(self.table)} entries, expected "
                f"{self.domain_size ** self.arity}"
            )
        if any(not (0 <= v < cod) for v in self.table):
            raise InputError("operation value out of range")

    @property
    def out_domain(self) -> int:
        return self.codomain_size if self.codomain_size is not None else self.domain_size

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise InputError(f"expected {self.arity} arguments, got {len(args)}")
        return self.table[tuple_index(args, self.domain_size)]

    def sort_key(self) -> tuple:
        return (self.arity, self.table)


def projection(domain_size: int, arity: int, index: int) -> Operation:
    """The arity-ary projection onto argument ``index`` (0-based)."""
    if not 0 <= index < arity:
        raise InputError(f"projection index {index} out of range")
    table = tuple(t[index] for t in all_tuples(domain_size, arity))
    return Operation(domain_size, arity, table)


def apply_componentwise(g: Operation, tuples: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Apply g coordinate-wise to m tuples of equal length k."""
    if len(tuples) != g.arity:
        raise InputError(f"operation arity {g.arity}, got {len(tuples)} tuples")
    k = len(tuples[0])
    if any(len(t) != k for t in tuples):
        raise InputError("tuples must all have the same length")
    return tuple(g(*(t[i] for t in tuples)) for i in range(k))


def is_symmetric(g: Operation) -> bool:
    """True iff g is invariant under every permutation of its arguments.

    Checked by requiring g to be constant on each multiset orbit.
    """
    if g.arity == 1:
        return True
    msd = MultisetDomain(g.domain_size, g.arity)
    seen: dict[int, int] = {}
    for t in all_tuples(g.domain_size, g.arity):
        orbit = msd.index_of_tuple(t)
        value = g.table[tuple_index(t, g.domain_size)]
        if seen.setdefault(orbit, value) != value:
            return False
    return True


def superpose(h: Operation, gs: Sequence[Operation]) -> Operation:
    """Pointwise h(g_1(xbar), ..., g_n(xbar)) for m-ary g_i."""
    if len(gs) != h.arity:
        raise InputError(f"need {h.arity} inner operations, got {len(gs)}")
    m = gs[0].arity
    d = gs[0].domain_size
    if any(g.arity != m or g.domain_size != d for g in gs):
        raise InputError("inner operations must share arity and domain")
    if any(g.out_domain != h.domain_size for g in gs):
        raise InputError("inner codomain must match outer domain")
    table = tuple(
        h(*(g.table[i] for g in gs))
        for i in range(d ** m)
    )
    cod = h.out_domain
    return Operation(d, m, table, codomain_size=None if cod == d else cod)


class FractionalOperation:
    """A finitely-supported rational-weighted set of same-arity operations."""

    def __init__(self, weighted_ops: Iterable[tuple[Operation, Fraction | int]]):
        merged: dict[Operation, Fraction] = {}
        for op, w in weighted_ops:
            w = Fraction(w)
            if w <= 0:
                raise InputError("fractional-operation weights must be positive")
            merged[op] = merged.get(op, Fraction(0)) + w
        if not merged:
            raise InputError("fractional operation must have nonempty support")
        arities = {op.arity for op in merged}
        domains = {(op.domain_size, op.out_domain) for op in merged}
        if len(arities) != 1 or len(domains) != 1:
            raise InputError("support operations must share arity and domains")
        self._weights = dict(
            sorted(merged.items(), key=lambda kv: kv[0].sort_key())
        )
        self.arity = arities.pop()

    @property
    def support(self) -> list[Operation]:
        return list(self._weights)

    def weight(self, op: Operation) -> Fraction:
        return self._weights.get(op, Fraction(0))

    def items(self) -> list[tuple[Operation, Fraction]]:
        return list(self._weights.items())

    @property
    def l1_norm(self) -> Fraction:
        return sum(self._weights.values(), Fraction(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FractionalOperation):
            return NotImplemented
        return self._weights == other._weights

    def __repr__(self) -> str:
        return f"FractionalOperation({len(self._weights)} ops, arity {self.arity})"


def superpose_fractional(omega: FractionalOperation,
                         gs: Sequence[Operation]) -> FractionalOperation:
    """Superpose every support operation; weights of collisions merge."""
    return FractionalOperation(
        (superpose(h, gs), w) for h, w in omega.items()
    )


class MultisetDomain:
    """Size-m multisets over {0..D-1} in canonical sorted-tuple encoding.

    Canonical codes are assigned in lexicographic order of the sorted
    nondecreasing representative tuples.
    """

    def __init__(self, domain_size: int, m: int):
        if m < 1:
            raise InputError("multiset size must be >= 1")
        self.domain_size = domain_size
        self.m = m
        self.multisets: list[tuple[int, ...]] = [
            t
            for t in itertools.combinations_with_replacement(range(domain_size), m)
        ]
        self._index = {t: i for i, t in enumerate(self.multisets)}

    def __len__(self) -> int:
        return len(self.multisets)

    def canonical(self, t: Sequence[int]) -> tuple[int, ...]:
        return tuple(sorted(t))

    def index_of_tuple(self, t: Sequence[int]) -> int:
        """Code of the multiset [t] of an arbitrary tuple."""
        return self._index[tuple(sorted(t))]

    def multiset(self, index: int) -> tuple[int, ...]:
        return self.multisets[index]
