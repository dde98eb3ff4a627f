"""Constructors for the tractable language families used as test corpus.

Lattices (meet/join multimorphisms), bisubmodular and k-submodular
operation pairs, tree meets, symmetric tournament pairs, 1-defect
multimorphisms and their symmetric-operation construction, plus seeded
random instance and cost-table generators.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .operations import Operation, apply_componentwise, is_symmetric
from .rationals import INF, ExtendedRational
from .structures import (
    InputError,
    Signature,
    ValuedStructure,
    all_tuples,
    tuple_index,
)

# ---------------------------------------------------------------------------
# lattices


@dataclass(frozen=True)
class LatticeSpec:
    """Meet and join tables of a finite lattice on {0..domain_size-1}."""

    domain_size: int
    meet: tuple[int, ...]
    join: tuple[int, ...]

    @classmethod
    def from_order(cls, domain_size: int,
                   less_equal: set[tuple[int, int]]) -> "LatticeSpec":
        """Build meet/join from a partial order given as <= pairs.

        The relation is closed reflexively and transitively first; every
        pair must have a unique greatest lower and least upper bound.
        """
        leq = {(x, x) for x in range(domain_size)} | set(less_equal)
        changed = True
        while changed:
            changed = False
            for (x, y), (u, v) in itertools.product(list(leq), repeat=2):
                if y == u and (x, v) not in leq:
                    leq.add((x, v))
                    changed = True
        meet = []
        join = []
        for x in range(domain_size):
            for y in range(domain_size):
                lower = [z for z in range(domain_size)
                         if (z, x) in leq and (z, y) in leq]
                glb = [z for z in lower
                       if all((w, z) in leq for w in lower)]
                upper = [z for z in range(domain_size)
                         if (x, z) in leq and (y, z) in leq]
                lub = [z for z in upper
                       if all((z, w) in leq for w in upper)]
                if len(glb) != 1 or len(lub) != 1:
                    raise InputError(
                        f"elements {x}, {y} lack a unique meet or join"
                    )
                meet.append(glb[0])
                join.append(lub[0])
        return cls(domain_size, tuple(meet), tuple(join))


def chain_lattice(n: int) -> LatticeSpec:
    """The total order 0 < 1 < ... < n-1."""
    return LatticeSpec.from_order(
        n, {(i, i + 1) for i in range(n - 1)}
    )


def diamond_lattice() -> LatticeSpec:
    """M2: bottom 0, incomparable middles 1 and 2, top 3."""
    return LatticeSpec.from_order(4, {(0, 1), (0, 2), (1, 3), (2, 3)})


def pentagon_lattice() -> LatticeSpec:
    """N5: bottom 0, chain 1 < 2, singleton 3, top 4 (non-distributive)."""
    return LatticeSpec.from_order(
        5, {(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)}
    )


def lattice_ops(spec: LatticeSpec) -> tuple[Operation, Operation]:
    """Meet and join as operations, after verifying the lattice laws."""
    d = spec.domain_size
    g1 = Operation(d, 2, spec.meet)
    g2 = Operation(d, 2, spec.join)
    for name, g in (("meet", g1), ("join", g2)):
        for x in range(d):
            if g(x, x) != x:
                raise InputError(f"{name} is not idempotent at {x}")
            for y in range(d):
                if g(x, y) != g(y, x):
                    raise InputError(
                        f"{name} is not commutative at ({x}, {y})"
                    )
                for z in range(d):
                    if g(g(x, y), z) != g(x, g(y, z)):
                        raise InputError(
                            f"{name} is not associative at ({x}, {y}, {z})"
                        )
    for x in range(d):
        for y in range(d):
            if g1(x, g2(x, y)) != x:
                raise InputError(
                    f"absorption x meet (x join y) fails at ({x}, {y})"
                )
            if g2(x, g1(x, y)) != x:
                raise InputError(
                    f"absorption x join (x meet y) fails at ({x}, {y})"
                )
    return g1, g2


# ---------------------------------------------------------------------------
# bisubmodular / k-submodular pair


def min0_max0(k: int) -> tuple[Operation, Operation]:
    """The pair on D = {0..k}: distinct nonzero arguments collapse to 0.

    min0(x, x) = x and min0(x, y) = 0 for x != y; max0 is max except that
    distinct nonzero arguments also give 0.  k = 1 degenerates to plain
    min and max on {0, 1}.
    """
    if k < 1:
        raise InputError("k must be at least 1")
    d = k + 1
    mn = []
    mx = []
    for x in range(d):
        for y in range(d):
            mn.append(x if x == y else 0)
            mx.append(0 if 0 != x != y != 0 else max(x, y))
    return Operation(d, 2, mn), Operation(d, 2, mx)


# ---------------------------------------------------------------------------
# trees


@dataclass(frozen=True)
class TreeSpec:
    """A rooted tree on {0..n-1}; parent[root] = -1."""

    parent: tuple[int, ...]

    def __post_init__(self):
        n = len(self.parent)
        roots = [i for i, p in enumerate(self.parent) if p == -1]
        if len(roots) != 1:
            raise InputError(f"tree must have exactly one root, got {roots}")
        for i, p in enumerate(self.parent):
            if p != -1 and not 0 <= p < n:
                raise InputError(f"parent of {i} out of range: {p}")
        for i in range(n):
            seen = set()
            while i != -1:
                if i in seen:
                    raise InputError("parent array contains a cycle")
                seen.add(i)
                i = self.parent[i]

    def ancestors(self, x: int) -> list[int]:
        """x, parent(x), ..., root."""
        out = []
        while x != -1:
            out.append(x)
            x = self.parent[x]
        return out


def star_tree(k: int) -> TreeSpec:
    """Root 0 with children 1..k."""
    return TreeSpec((-1,) + (0,) * k)


def tree_meet(spec: TreeSpec) -> Operation:
    """The binary lowest-common-ancestor operation of a rooted tree."""
    n = len(spec.parent)
    table = []
    for x in range(n):
        up_x = spec.ancestors(x)
        rank = {v: i for i, v in enumerate(up_x)}
        for y in range(n):
            lca = next(v for v in spec.ancestors(y) if v in rank)
            table.append(lca)
    g = Operation(n, 2, table)
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if g(g(x, y), z) != g(x, g(y, z)):
                    raise InputError(
                        f"tree meet not associative at ({x}, {y}, {z})"
                    )
    return g


# ---------------------------------------------------------------------------
# symmetric tournament pairs


def check_stp(g1: Operation, g2: Operation) -> bool:
    """Commutative, conservative, and disagreeing on distinct arguments.

    Conservativity forces agreement on the diagonal, so the disagreement
    condition is checked for x != y only.
    """
    if g1.arity != 2 or g2.arity != 2 or g1.domain_size != g2.domain_size:
        return False
    d = g1.domain_size
    for x in range(d):
        for y in range(d):
            for g in (g1, g2):
                if g(x, y) != g(y, x) or g(x, y) not in (x, y):
                    return False
            if x != y and g1(x, y) == g2(x, y):
                return False
    return True


# ---------------------------------------------------------------------------
# 1-defect multimorphisms


@dataclass(frozen=True)
class PartialOrderWithDefect:
    """A strict order on {0..domain_size-1} relating every pair except
    the defect pair {b, c}."""

    domain_size: int
    less_than: frozenset[tuple[int, int]]
    defect: tuple[int, int]

    def __post_init__(self):
        d = self.domain_size
        b, c = self.defect
        if not (0 <= b < d and 0 <= c < d) or b == c:
            raise InputError("defect must be a pair of distinct elements")
        lt = self.less_than
        for x, y in lt:
            if x == y:
                raise InputError(f"strict order contains ({x}, {x})")
            if (y, x) in lt:
                raise InputError(f"order contains both ({x},{y}) and ({y},{x})")
        for (x, y), (u, v) in itertools.product(lt, repeat=2):
            if y == u and (x, v) not in lt:
                raise InputError(
                    f"order not transitive: ({x},{y}), ({y},{v})"
                )
        for x in range(d):
            for y in range(x + 1, d):
                related = (x, y) in lt or (y, x) in lt
                if {x, y} == {b, c}:
                    if related:
                        raise InputError("defect pair must be incomparable")
                elif not related:
                    raise InputError(
                        f"elements {x}, {y} must be comparable"
                    )

    def lt(self, x: int, y: int) -> bool:
        return (x, y) in self.less_than

    def lower(self, x: int, y: int) -> int:
        """The smaller of two comparable elements."""
        if x == y:
            return x
        if self.lt(x, y):
            return x
        if self.lt(y, x):
            return y
        raise InputError(f"elements {x}, {y} are incomparable")

    def upper(self, x: int, y: int) -> int:
        return y if self.lower(x, y) == x else x


def check_one_defect(g1: Operation, g2: Operation,
                     order: PartialOrderWithDefect) -> bool:
    """Meet/join outside the defect pair; off-pair bracketing on it."""
    d = order.domain_size
    if g1.arity != 2 or g2.arity != 2 \
            or g1.domain_size != d or g2.domain_size != d:
        return False
    b, c = order.defect
    for x in range(d):
        for y in range(d):
            if g1(x, y) != g1(y, x) or g2(x, y) != g2(y, x):
                return False
            if {x, y} == {b, c}:
                if {g1(x, y), g2(x, y)} & {x, y}:
                    return False
                if not order.lt(g1(x, y), g2(x, y)):
                    return False
            else:
                if g1(x, y) != order.lower(x, y):
                    return False
                if g2(x, y) != order.upper(x, y):
                    return False
    return True


def one_defect_symmetric_op(g: Operation, m: int,
                            order: PartialOrderWithDefect) -> Operation:
    """Fold g over all pairwise terms into a symmetric m-ary operation.

    g must be the meet-like half of a 1-defect pair (g(b,c) below both
    defect elements) or the join-like half (above both); the terms
    f_t = g(x_i, x_j) in lexicographic (i, j) order are combined as
    g(f_1, g(f_2, ..., g(f_{M-1}, f_M)...)).
    """
    if m < 2:
        raise InputError("arity must be at least 2")
    _validate_one_defect_half(g, order)
    d = order.domain_size
    table = []
    for args in all_tuples(d, m):
        terms = [
            g(args[i], args[j])
            for i in range(m) for j in range(i + 1, m)
        ]
        acc = terms[-1]
        for t in reversed(terms[:-1]):
            acc = g(t, acc)
        table.append(acc)
    f = Operation(d, m, table)
    if not is_symmetric(f):
        raise RuntimeError(
            "internal error: 1-defect construction is not symmetric"
        )
    return f


def _validate_one_defect_half(g: Operation,
                              order: PartialOrderWithDefect) -> None:
    d = order.domain_size
    if g.arity != 2 or g.domain_size != d:
        raise InputError("expected a binary operation on the order's domain")
    b, c = order.defect
    v = g(b, c)
    if v in (b, c) or g(c, b) != v:
        raise InputError("not a valid 1-defect half: defect value")
    if order.lt(v, b) and order.lt(v, c):
        pick = order.lower
    elif order.lt(b, v) and order.lt(c, v):
        pick = order.upper
    else:
        raise InputError(
            "not a valid 1-defect half: defect value must be below or "
            "above both defect elements"
        )
    for x in range(d):
        for y in range(d):
            if {x, y} != {b, c} and g(x, y) != pick(x, y):
                raise InputError(
                    f"not a valid 1-defect half: value at ({x}, {y})"
                )


# ---------------------------------------------------------------------------
# seeded generators


def random_instance(language: ValuedStructure, num_vars: int,
                    density: float, seed: int) -> ValuedStructure:
    """Weights in {1..16} placed independently with the given density."""
    rng = random.Random(seed)
    tables: dict[str, list[int]] = {}
    for sym in language.signature.symbols:
        table = []
        for _ in range(num_vars ** sym.arity):
            if rng.random() < density:
                table.append(rng.randint(1, 16))
            else:
                table.append(0)
        tables[sym.name] = table
    return ValuedStructure(language.signature, num_vars, tables)


def random_cost_table_with_multimorphism(
        g1: Operation, g2: Operation, arity: int, seed: int,
        max_sweeps: int = 100) -> list[Fraction]:
    """A random nonnegative table repaired into the multimorphism cone.

    Violations f(g1(a,b)) + f(g2(a,b)) > f(a) + f(b) are repaired by
    decreasing the left-hand entries; each repair strictly decreases the
    table sum, and a bounded number of sweeps is attempted before falling
    back to the all-zero table (which satisfies every inequality).
    """
    d = g1.domain_size
    rng = random.Random(seed)
    table = [Fraction(rng.randint(0, 16)) for _ in range(d ** arity)]
    tuples = list(all_tuples(d, arity))
    for _ in range(max_sweeps):
        clean = True
        for a, b in itertools.product(tuples, repeat=2):
            p = tuple_index(apply_componentwise(g1, (a, b)), d)
            q = tuple_index(apply_componentwise(g2, (a, b)), d)
            rhs = table[tuple_index(a, d)] + table[tuple_index(b, d)]
            excess = table[p] + table[q] - rhs
            if excess > 0:
                clean = False
                if p == q:
                    table[p] = rhs / 2
                else:
                    cut = min(excess, table[p])
                    table[p] -= cut
                    table[q] -= excess - cut
        if clean:
            return table
    return [Fraction(0)] * (d ** arity)


def close_table_infinities(table, domain_size: int, arity: int,
                           fraction: float, g1: Operation, g2: Operation,
                           seed: int) -> list[ExtendedRational]:
    """Sprinkle infinities over a multimorphism table, then close up.

    Entries are independently set to infinity with the given fraction;
    any infinite entry reachable by applying g1/g2 componentwise to two
    finite tuples is reverted to its original value, iterated to a
    fixpoint.  The numeric inequalities of the original table are
    untouched, so the multimorphism survives in extended arithmetic.
    """
    rng = random.Random(seed)
    original = [ExtendedRational(v) for v in table]
    out = [
        INF if rng.random() < fraction else v
        for v in original
    ]
    tuples = list(all_tuples(domain_size, arity))
    changed = True
    while changed:
        changed = False
        finite = [t for t in tuples
                  if not out[tuple_index(t, domain_size)].is_infinite]
        for a, b in itertools.product(finite, repeat=2):
            for g in (g1, g2):
                idx = tuple_index(apply_componentwise(g, (a, b)), domain_size)
                if out[idx].is_infinite:
                    out[idx] = original[idx]
                    changed = True
    return out


def multimorphism_language(name_tables: dict[str, tuple[int, list]],
                           domain_size: int) -> ValuedStructure:
    """Assemble a language from {symbol: (arity, table)} mappings."""
    sig = Signature.of(*((n, a) for n, (a, _t) in name_tables.items()))
    return ValuedStructure(
        sig, domain_size, {n: t for n, (_a, t) in name_tables.items()}
    )
