#!/usr/bin/env python3
"""Exactness sweep: relaxation value vs. brute force across the gallery.

For each family, draw seeded random languages compatible with the
family's multimorphism plus random instances, and count how often the
relaxation optimum equals the exhaustive optimum (it should always).
"""

import argparse
import sys
import time

sys.path.insert(0, "src")

from vcsp.blp import blp_value
from vcsp.gallery import (
    chain_lattice,
    diamond_lattice,
    lattice_ops,
    min0_max0,
    pentagon_lattice,
    random_cost_table_with_multimorphism,
    random_instance,
    star_tree,
    tree_meet,
)
from vcsp.oracle import brute_force_opt
from vcsp.structures import Signature, ValuedStructure


def families():
    for name, spec in (
        ("chain3", chain_lattice(3)),
        ("chain4", chain_lattice(4)),
        ("diamond", diamond_lattice()),
        ("pentagon", pentagon_lattice()),
    ):
        yield name, lattice_ops(spec)
    yield "bisubmodular", min0_max0(2)
    yield "3-submodular", min0_max0(3)
    g = tree_meet(star_tree(3))
    yield "star-tree", (g, g)


def random_language(g1, g2, seed):
    sig = Signature.of(("f1", 2), ("f2", 2), ("u1", 1))
    return ValuedStructure(sig, g1.domain_size, {
        "f1": random_cost_table_with_multimorphism(g1, g2, 2, seed),
        "f2": random_cost_table_with_multimorphism(g1, g2, 2, seed + 1),
        "u1": random_cost_table_with_multimorphism(g1, g2, 1, seed + 2),
    })


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--languages", type=int, default=5)
    ap.add_argument("--instances", type=int, default=5)
    ap.add_argument("--num-vars", type=int, default=4)
    ap.add_argument("--density", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    grand_total = grand_exact = 0
    for name, (g1, g2) in families():
        start = time.monotonic()
        exact = total = 0
        for ls in range(args.languages):
            language = random_language(g1, g2, args.seed + 1000 * ls)
            for js in range(args.instances):
                instance = random_instance(
                    language, args.num_vars, args.density,
                    args.seed + 1000 * ls + js + 1
                )
                value = blp_value(instance, language)
                opt = brute_force_opt(instance, language).opt_value
                total += 1
                if value == opt:
                    exact += 1
                else:
                    print(f"  MISMATCH {name} lang_seed={ls} inst_seed={js}"
                          f" relaxation={value} opt={opt}")
        elapsed = time.monotonic() - start
        print(f"{name:14s} exact {exact}/{total}  ({elapsed:.1f}s)")
        grand_total += total
        grand_exact += exact
    print(f"{'overall':14s} exact {grand_exact}/{grand_total}")
    return 0 if grand_exact == grand_total else 1


if __name__ == "__main__":
    sys.exit(main())
