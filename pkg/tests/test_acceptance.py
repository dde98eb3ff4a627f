"""Acceptance gate: one test per criterion, each printing a verdict line.

The positive-control corpus (seeded random languages and instances per
family) is built once and shared; every numeric comparison is exact
rational equality.
"""

import random
from fractions import Fraction

import pytest

from vcsp import lp as lpmod
from vcsp.algebra import (
    Refutation,
    Witness,
    build_multiset_structure,
    check_fractional_polymorphism,
    farkas_gap_instance,
    find_fractional_homomorphism,
    find_tsfp,
    homomorphism_to_tsfp_witness,
    tsfp_to_homomorphism_witness,
    verify_homomorphism_refutation,
    verify_homomorphism_witness,
)
from vcsp.blp import arc_consistency, blp_value, build_blp, solve_via_blp
from vcsp.gallery import (
    PartialOrderWithDefect,
    TreeSpec,
    chain_lattice,
    close_table_infinities,
    diamond_lattice,
    lattice_ops,
    min0_max0,
    one_defect_symmetric_op,
    pentagon_lattice,
    random_cost_table_with_multimorphism,
    random_instance,
    star_tree,
    tree_meet,
)
from vcsp.lp import LinearProgram, LpConstraint, LpVariable, verify_solution
from vcsp.operations import Operation, is_symmetric
from vcsp.oracle import brute_force_opt
from vcsp.osac import build_osac_dual, build_osac_primal
from vcsp.structures import Signature, ValuedStructure, measure

from conftest import structure

NUM_PAIRS = 20
DENSITY = 0.45


def _verdict(capsys, number, ok, label):
    with capsys.disabled():
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {label}")
    assert ok, f"criterion {number} failed: {label}"


def _family_ops():
    ops = {}
    for name, spec in (
        ("chain3", chain_lattice(3)), ("chain4", chain_lattice(4)),
        ("diamond", diamond_lattice()), ("pentagon", pentagon_lattice()),
    ):
        ops[name] = lattice_ops(spec)
    ops["bisubmodular"] = min0_max0(2)
    ops["3-submodular"] = min0_max0(3)
    g = tree_meet(star_tree(3))
    ops["star-tree"] = (g, g)
    g = tree_meet(TreeSpec((-1, 0, 0, 1, 1)))
    ops["deep-tree"] = (g, g)
    return ops


LATTICES = ("chain3", "chain4", "diamond", "pentagon")
KSUB = ("bisubmodular", "3-submodular")
TREES = ("star-tree", "deep-tree")


def _random_language(g1, g2, seed):
    sig = Signature.of(("f1", 2), ("f2", 2), ("u1", 1))
    return ValuedStructure(sig, g1.domain_size, {
        "f1": random_cost_table_with_multimorphism(g1, g2, 2, seed),
        "f2": random_cost_table_with_multimorphism(g1, g2, 2, seed + 1),
        "u1": random_cost_table_with_multimorphism(g1, g2, 1, seed + 2),
    })


@pytest.fixture(scope="module")
def corpus():
    pairs = {}
    for name, (g1, g2) in _family_ops().items():
        num_vars = 4 if g1.domain_size <= 3 else 3
        family = []
        for i in range(NUM_PAIRS):
            language = _random_language(g1, g2, 1000 * i)
            instance = random_instance(
                language, num_vars, DENSITY, 500 + i
            )
            family.append((language, instance))
        pairs[name] = family
    return pairs


@pytest.fixture(scope="module")
def corpus_values(corpus):
    values = {}
    for name, family in corpus.items():
        values[name] = [
            (blp_value(instance, language),
             brute_force_opt(instance, language).opt_value)
            for language, instance in family
        ]
    return values


def _all_exact(corpus_values, families):
    return all(
        blp == opt
        for name in families
        for blp, opt in corpus_values[name]
    )


def test_criterion_1_lattice_exactness(corpus_values, capsys):
    ok = _all_exact(corpus_values, LATTICES)
    _verdict(capsys, 1, ok,
             "submodular exactness on chain3/chain4/diamond/pentagon")


def test_criterion_2_ksubmodular_exactness(corpus_values, capsys):
    ok = _all_exact(corpus_values, KSUB)
    _verdict(capsys, 2, ok, "bisubmodular and 3-submodular exactness")


def test_criterion_3_tree_exactness(corpus_values, capsys):
    ok = _all_exact(corpus_values, TREES)
    _verdict(capsys, 3, ok, "tree-submodular exactness (star and depth 2)")


def test_criterion_4_negative_control_farkas(capsys):
    neq = structure(2, [1, 0, 0, 1])
    cert = find_tsfp(neq, 2)
    ok = isinstance(cert, Refutation)
    if ok:
        report = farkas_gap_instance(neq, 2, cert)
        ok = report.blp < report.opt
        ok = ok and report.blp == blp_value(report.instance, neq)
        ok = ok and report.opt == \
            brute_force_opt(report.instance, neq).opt_value
    triangle = structure(3, [0, 1, 0, 0, 0, 1, 1, 0, 0])
    ok = ok and blp_value(triangle, neq) == 0
    ok = ok and brute_force_opt(triangle, neq).opt_value == 1
    _verdict(capsys, 4, ok, "soft-NEQ refutation and strict gap pipeline")


def test_criterion_5_decider_route_equivalence(capsys):
    ok = True
    for seed in range(10):
        d = 2 if seed < 5 else 3
        rng = random.Random(seed)
        language = structure(
            d, [rng.randint(0, 3) for _ in range(d * d)]
        )
        for m in (2, 3):
            direct = find_tsfp(language, m)
            pm = build_multiset_structure(language, m)
            via_hom = find_fractional_homomorphism(pm, language)
            if isinstance(direct, Witness) != isinstance(via_hom, Witness):
                ok = False
                continue
            if isinstance(direct, Witness):
                conv = tsfp_to_homomorphism_witness(direct.omega, m)
                ok = ok and verify_homomorphism_witness(
                    pm, language, conv
                ) is None
                back = homomorphism_to_tsfp_witness(via_hom.omega, d, m)
                ok = ok and check_fractional_polymorphism(
                    language, back
                ) is None
            else:
                ok = ok and verify_homomorphism_refutation(
                    pm, language, direct.farkas_y
                ) is None
                ok = ok and verify_homomorphism_refutation(
                    pm, language, via_hom.farkas_y
                ) is None
    _verdict(capsys, 5, ok,
             "symmetric-operation and multiset-map deciders agree")


def test_criterion_6_homomorphism_monotonicity(capsys):
    ok = True
    checked = 0
    for seed in range(6):
        d = 2
        rng = random.Random(100 + seed)
        language = structure(
            d, [rng.randint(0, 3) for _ in range(d * d)]
        )
        m = 2
        pm = build_multiset_structure(language, m)
        cert = find_fractional_homomorphism(pm, language)
        if not isinstance(cert, Witness):
            continue
        checked += 1
        for i in range(10):
            inst = random_instance(language, 3, 0.6, 7000 + 10 * seed + i)
            opt_a = brute_force_opt(inst, pm).opt_value
            opt_b = brute_force_opt(inst, language).opt_value
            ok = ok and opt_b <= opt_a
    ok = ok and checked > 0
    _verdict(capsys, 6, ok,
             "fractional homomorphisms never increase the optimum")


def test_criterion_7_general_valued_two_stage(capsys):
    families = [
        ("chain2", lattice_ops(chain_lattice(2))),
        ("chain3", lattice_ops(chain_lattice(3))),
        ("bisub", min0_max0(2)),
    ]
    g = tree_meet(star_tree(2))
    families.append(("star2", (g, g)))
    ok = True
    for seed in range(10):
        _, (g1, g2) = families[seed % len(families)]
        d = g1.domain_size
        base = random_cost_table_with_multimorphism(g1, g2, 2, 300 + seed)
        table = close_table_infinities(base, d, 2, 0.2, g1, g2, 301 + seed)
        unary = random_cost_table_with_multimorphism(g1, g2, 1, 302 + seed)
        sig = Signature.of(("f1", 2), ("u1", 1))
        language = ValuedStructure(sig, d, {"f1": table, "u1": unary})
        instance = random_instance(language, 4, 0.6, 303 + seed)
        value = blp_value(instance, language)
        opt = brute_force_opt(instance, language).opt_value
        ok = ok and (value.is_infinite == opt.is_infinite)
        certified = all(
            isinstance(find_tsfp(language, m), Witness) for m in (2, 3)
        )
        if certified and not opt.is_infinite:
            ok = ok and value == opt
    _verdict(capsys, 7, ok,
             "arc consistency + relaxation handles infinite costs exactly")


def test_criterion_8_osac_sandwich(corpus, corpus_values, capsys):
    ok = True
    for name, family in corpus.items():
        for (language, instance), (blp, opt) in zip(
                family, corpus_values[name]):
            ac = arc_consistency(instance, language)
            if ac.empty_domain:
                continue
            p = lpmod.solve(build_osac_primal(instance, language),
                            certificate=False)
            d = lpmod.solve(build_osac_dual(instance, language),
                            certificate=False)
            ok = ok and p.status == d.status == lpmod.OPTIMAL
            if not ok:
                break
            ok = ok and p.objective_value == d.objective_value
            osac = d.objective_value
            ok = ok and blp <= osac <= opt
    # constructed shared-scope instance with a strict blp < osac gap
    sig3 = Signature.of(("fa", 2), ("fb", 2), ("fc", 2))
    lang = ValuedStructure(sig3, 2, {
        "fa": [0, 1, 1, 0], "fb": [1, 0, 1, 1], "fc": [1, 1, 0, 1],
    })
    inst = ValuedStructure(sig3, 2, {
        "fa": [0, 1, 0, 0], "fb": [0, 1, 0, 0], "fc": [0, 1, 0, 0],
    })
    b = blp_value(inst, lang)
    o = lpmod.solve(build_osac_dual(inst, lang),
                    certificate=False).objective_value
    ok = ok and b < o
    _verdict(capsys, 8, ok,
             "blp <= osac <= opt with exact primal-dual equality")


def test_criterion_9_one_defect_construction(capsys):
    order = PartialOrderWithDefect(
        4, frozenset({(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)}), (1, 2)
    )
    table = []
    for x in range(4):
        for y in range(4):
            table.append(0 if {x, y} == {1, 2} else order.lower(x, y))
    g = Operation(4, 2, table)
    ok = True
    for m in (2, 3, 4):
        f = one_defect_symmetric_op(g, m, order)
        ok = ok and is_symmetric(f)
    f3 = one_defect_symmetric_op(g, 3, order)
    # defect pair present, g(1,2) = 0 below every argument
    ok = ok and f3(1, 2, 3) == g(1, 2) == 0
    # defect pair absent: the meet of the arguments
    ok = ok and f3(1, 1, 3) == 1 and f3(3, 3, 1) == 1
    # a low argument at or below g(1,2) and all other arguments
    ok = ok and f3(0, 1, 2) == 0
    _verdict(capsys, 9, ok, "1-defect symmetric operations for m in 2..4")


def test_criterion_10_self_reduction(corpus, corpus_values, capsys):
    ok = True
    for name, family in corpus.items():
        for (language, instance), (blp, opt) in zip(
                family, corpus_values[name]):
            value, h = solve_via_blp(instance, language)
            ok = ok and value == blp
            ok = ok and h is not None
            ok = ok and measure(instance, language, h) == blp
            if not ok:
                break
    neq = structure(2, [1, 0, 0, 1])
    triangle = structure(3, [0, 1, 0, 0, 0, 1, 1, 0, 0])
    value, h = solve_via_blp(triangle, neq)
    ok = ok and value == 0 and h is None
    _verdict(capsys, 10, ok,
             "assignments recovered by pinning match the relaxation value")


def test_criterion_11_lp_self_audit(corpus, capsys):
    ok = True
    # verified relaxation solves on a corpus sample
    for name in ("chain3", "bisubmodular", "pentagon"):
        for language, instance in corpus[name][:5]:
            ac = arc_consistency(instance, language)
            if ac.empty_domain:
                continue
            model = build_blp(instance, language, ac)
            sol = lpmod.solve(model.lp)
            ok = ok and verify_solution(model.lp, sol)
            dual = build_osac_dual(instance, language)
            ok = ok and verify_solution(dual, lpmod.solve(dual))
    # infeasible models must carry re-verifiable Farkas certificates
    rng = random.Random(11)
    found_infeasible = 0
    while found_infeasible < 5:
        n = rng.randint(1, 3)
        names = [f"v{i}" for i in range(n)]
        lp = LinearProgram(
            [LpVariable(nm, Fraction(0), Fraction(3)) for nm in names],
            [
                LpConstraint.of(
                    {nm: Fraction(rng.randint(-3, 3)) for nm in names},
                    rng.choice(["<=", ">=", "=="]),
                    Fraction(rng.randint(-10, 10)),
                )
                for _ in range(rng.randint(1, 4))
            ],
            {nm: Fraction(1) for nm in names},
            "min",
        )
        sol = lpmod.solve(lp)
        ok = ok and verify_solution(lp, sol)
        if sol.status == lpmod.INFEASIBLE:
            found_infeasible += 1
            ok = ok and sol.dual_or_farkas is not None
    _verdict(capsys, 11, ok,
             "every solve and Farkas certificate re-verifies exactly")
