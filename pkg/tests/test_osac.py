from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vcsp import lp as lpmod
from vcsp.blp import blp_value
from vcsp.oracle import brute_force_opt
from vcsp.osac import (
    build_osac_dual,
    build_osac_primal,
    osac_value,
    scope_index,
)
from vcsp.structures import InputError, Signature, ValuedStructure

from conftest import structure


def shared_scope_pair():
    """Three binary symbols on one scope whose per-term distributions can
    disagree, while any single scope distribution pays double."""
    sig = Signature.of(("fa", 2), ("fb", 2), ("fc", 2))
    language = ValuedStructure(sig, 2, {
        "fa": [0, 1, 1, 0], "fb": [1, 0, 1, 1], "fc": [1, 1, 0, 1],
    })
    inst = ValuedStructure(sig, 2, {
        "fa": [0, 1, 0, 0], "fb": [0, 1, 0, 0], "fc": [0, 1, 0, 0],
    })
    return inst, language


def primal_dual(inst, language):
    p = lpmod.solve(build_osac_primal(inst, language), certificate=False)
    d = lpmod.solve(build_osac_dual(inst, language), certificate=False)
    return p, d


def test_all_zero_instance(soft_neq):
    inst = structure(3, [0] * 9)
    assert osac_value(inst, soft_neq) == 0
    p, d = primal_dual(inst, soft_neq)
    assert p.objective_value == d.objective_value == 0


def test_triangle_equals_blp(triangle, soft_neq):
    assert osac_value(triangle, soft_neq) == 0
    assert blp_value(triangle, soft_neq) == 0
    p, d = primal_dual(triangle, soft_neq)
    assert p.objective_value == d.objective_value == 0


def test_submodular_instance_exact(triangle, soft_eq):
    opt = brute_force_opt(triangle, soft_eq).opt_value
    value = osac_value(triangle, soft_eq)
    assert blp_value(triangle, soft_eq) <= value <= opt
    assert value == opt


def test_single_scope_collapses_to_blp(soft_neq):
    inst = structure(2, [0, 1, 0, 0])
    assert osac_value(inst, soft_neq) == blp_value(inst, soft_neq)


def test_shared_scope_strict_gap():
    inst, language = shared_scope_pair()
    b = blp_value(inst, language)
    o = osac_value(inst, language)
    opt = brute_force_opt(inst, language).opt_value
    assert b == 1 and o == 2 and opt == 2
    p, d = primal_dual(inst, language)
    assert p.objective_value == d.objective_value == Fraction(2)


def test_scope_index_groups_by_set():
    inst, language = shared_scope_pair()
    index = scope_index(inst, language)
    assert set(index.groups) == {frozenset({0, 1})}
    assert len(index.groups[frozenset({0, 1})]) == 3
    assert index.unary_symbols == ()


def test_scope_index_repeated_variables(soft_neq):
    inst = structure(2, [1, 0, 0, 0])  # scope (0, 0)
    index = scope_index(inst, soft_neq)
    assert set(index.groups) == {frozenset({0})}


def test_scope_index_rejects_infinite_weight(soft_neq):
    inst = structure(2, [0, "inf", 0, 0])
    with pytest.raises(InputError):
        scope_index(inst, soft_neq)


def test_unary_terms_in_dedicated_row():
    sig = Signature.of(("edge", 2), ("u", 1))
    language = ValuedStructure(sig, 2, {"edge": [1, 0, 0, 1],
                                        "u": [0, 2]})
    inst = ValuedStructure(sig, 3, {
        "edge": [1, 1, 0, 0, 0, 1, 0, 0, 1], "u": [1, 0, 3],
    })
    index = scope_index(inst, language)
    assert index.unary_symbols == ("u",)
    assert all(len(s) > 1 or s == frozenset({0}) or s == frozenset({2})
               for s in index.groups)
    b = blp_value(inst, language)
    o = osac_value(inst, language)
    opt = brute_force_opt(inst, language).opt_value
    assert b <= o <= opt
    p, d = primal_dual(inst, language)
    assert p.objective_value == d.objective_value == o.as_fraction()


def test_empty_domain_gives_infinity(crisp_neq):
    inst = structure(2, [1, 0, 0, 0])
    assert osac_value(inst, crisp_neq).is_infinite


def test_infinite_language_entries(triangle, crisp_neq):
    value = osac_value(triangle, crisp_neq)
    opt = brute_force_opt(triangle, crisp_neq).opt_value
    assert blp_value(triangle, crisp_neq) <= value <= opt


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 3), st.data())
def test_sandwich_and_duality(d, data):
    language = structure(
        d, [data.draw(st.integers(0, 4)) for _ in range(d * d)]
    )
    inst = structure(
        3, [data.draw(st.integers(0, 2)) for _ in range(9)]
    )
    b = blp_value(inst, language)
    o = osac_value(inst, language)
    opt = brute_force_opt(inst, language).opt_value
    assert b <= o <= opt
    p, dd = primal_dual(inst, language)
    assert p.objective_value == dd.objective_value == o.as_fraction()
