"""Command-line surface tying the solver, relaxations and analysis together.

Exit codes: 0 success, 1 domain-level negative result (refutation, no
optimum-preserving assignment, check failure), 2 input error, 3 budget
exceeded.  All numbers print as exact fractions ``p/q`` or ``inf``;
``--format structured`` emits the same report as a JSON document.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import io as iomod
from . import lp as lpmod
from .algebra import (
    Refutation,
    Witness,
    build_multiset_structure,
    certify_blp_solvability,
    check_fractional_polymorphism,
    check_multimorphism,
    farkas_gap_instance,
    find_tsfp,
)
from .blp import arc_consistency, blp_value, build_blp, solve_via_blp
from .gallery import (
    chain_lattice,
    diamond_lattice,
    lattice_ops,
    min0_max0,
    pentagon_lattice,
    random_cost_table_with_multimorphism,
    tree_meet,
    TreeSpec,
)
from .operations import Operation
from .oracle import BudgetExceeded, DEFAULT_BUDGET, brute_force_opt
from .osac import build_osac_dual, build_osac_primal, osac_value
from .rationals import format_rational
from .structures import (
    InputError,
    Signature,
    ValuedStructure,
    validate_structure,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        code, doc, lines = args.handler(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.format == "structured":
        print(json.dumps(doc, indent=2))
    else:
        for line in lines:
            print(line)
    return code


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vcsp",
        description="exact VCSP solving and relaxation analysis",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, handler, *, language=True, instance=False, m=False,
            m_max=False, budget=False, out=False, dump=False, seed=False):
        p = sub.add_parser(name)
        p.set_defaults(handler=handler)
        p.add_argument("--format", choices=("text", "structured"),
                       default="text")
        if language:
            p.add_argument("--language", required=True, metavar="PATH")
        if instance:
            p.add_argument("--instance", required=True, metavar="PATH")
        if m:
            p.add_argument("--m", type=int, required=True)
        if m_max:
            p.add_argument("--m-max", type=int, required=True)
        if budget:
            p.add_argument("--budget", type=int, default=None)
        if out:
            p.add_argument("--out", metavar="PATH", default=None)
        if dump:
            p.add_argument("--dump-lp", metavar="PATH", default=None)
        if seed:
            p.add_argument("--seed", type=int, default=0)
        return p

    add("solve", _cmd_solve, instance=True, budget=True)
    add("blp", _cmd_blp, instance=True, dump=True)
    add("osac", _cmd_osac, instance=True, dump=True)
    add("oracle", _cmd_oracle, instance=True, budget=True)
    p = add("certify", _cmd_certify, m_max=True, budget=True)
    p.add_argument("--gap-out", metavar="PATH", default="gap_instance.vcsp")
    add("gap", _cmd_gap, m=True, budget=True, out=True)
    p = add("check-mm", _cmd_check_mm)
    p.add_argument("--g1", required=True, metavar="TABLE",
                   help="comma-separated binary operation table")
    p.add_argument("--g2", required=True, metavar="TABLE")
    p = add("check-fpol", _cmd_check_fpol)
    p.add_argument("--certificate", required=True, metavar="PATH")
    add("find-tsfp", _cmd_find_tsfp, m=True, budget=True, out=True)
    add("pm-build", _cmd_pm_build, m=True, out=True)
    p = add("gallery", _cmd_gallery, language=False, out=True, seed=True)
    p.add_argument("family", choices=("lattice", "ksub", "tree"))
    p.add_argument("--spec",
                   choices=("chain3", "chain4", "diamond", "pentagon"),
                   default="chain3")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--parents", metavar="CSV", default="-1,0,0,0")
    p.add_argument("--random-tables", type=int, default=2)
    p = add("validate", _cmd_validate, language=False)
    p.add_argument("--language", metavar="PATH", default=None)
    p.add_argument("--instance", metavar="PATH", default=None)
    return parser


def _budget(args) -> int:
    if getattr(args, "budget", None) is not None:
        return args.budget
    env = os.environ.get("VCSP_BUDGET")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"VCSP_BUDGET must be an integer, got {env!r}")
    return DEFAULT_BUDGET


def _load_pair(args) -> tuple[ValuedStructure, ValuedStructure]:
    return iomod.parse_structure(args.instance), \
        iomod.parse_structure(args.language)


def _fmt(v) -> str:
    return format_rational(v)


def _write_out(args, text: str, lines: list[str]) -> None:
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        lines.append(f"wrote {args.out}")
    else:
        lines.append(text.rstrip("\n"))


# ---------------------------------------------------------------------------
# command handlers


def _cmd_solve(args):
    instance, language = _load_pair(args)
    value, assignment = solve_via_blp(instance, language)
    lines = [f"value {_fmt(value)}"]
    if assignment is None:
        lines.append("assignment NO-ASSIGNMENT")
    else:
        lines.append("assignment " + " ".join(map(str, assignment)))
    doc = {
        "command": "solve",
        "value": _fmt(value),
        "assignment": None if assignment is None else list(assignment),
    }
    code = EXIT_OK if assignment is not None else EXIT_NEGATIVE
    return code, doc, lines


def _cmd_blp(args):
    instance, language = _load_pair(args)
    if args.dump_lp is not None:
        ac = arc_consistency(instance, language)
        if not ac.empty_domain:
            model = build_blp(instance, language, ac)
            with open(args.dump_lp, "w", encoding="utf-8") as fh:
                fh.write(lpmod.dump_lp(model.lp))
    value = blp_value(instance, language)
    lines = [f"blp {_fmt(value)}"]
    return EXIT_OK, {"command": "blp", "blp": _fmt(value)}, lines


def _cmd_osac(args):
    instance, language = _load_pair(args)
    value = osac_value(instance, language)
    blp = blp_value(instance, language)
    if value.is_infinite:
        primal = dual = "inf"
    else:
        primal_lp = build_osac_primal(instance, language)
        dual_lp = build_osac_dual(instance, language)
        if args.dump_lp is not None:
            with open(args.dump_lp, "w", encoding="utf-8") as fh:
                fh.write(lpmod.dump_lp(primal_lp))
                fh.write("\n")
                fh.write(lpmod.dump_lp(dual_lp))
        psol = lpmod.solve(primal_lp, certificate=False)
        dsol = lpmod.solve(dual_lp, certificate=False)
        primal = "inf" if psol.status != lpmod.OPTIMAL \
            else _fmt(psol.objective_value)
        dual = "inf" if dsol.status != lpmod.OPTIMAL \
            else _fmt(dsol.objective_value)
    lines = [f"primal {primal}", f"dual {dual}", f"blp {_fmt(blp)}"]
    doc = {
        "command": "osac", "primal": primal, "dual": dual,
        "blp": _fmt(blp),
    }
    return EXIT_OK, doc, lines


def _cmd_oracle(args):
    instance, language = _load_pair(args)
    result = brute_force_opt(instance, language, budget=_budget(args))
    lines = [f"opt {_fmt(result.opt_value)}"]
    if result.argmin is None:
        lines.append("argmin NONE")
    else:
        lines.append("argmin " + " ".join(map(str, result.argmin)))
    doc = {
        "command": "oracle",
        "opt": _fmt(result.opt_value),
        "argmin": None if result.argmin is None else list(result.argmin),
    }
    return EXIT_OK, doc, lines


def _cmd_certify(args):
    language = iomod.parse_structure(args.language)
    report = certify_blp_solvability(language, args.m_max,
                                     budget=_budget(args))
    lines = []
    per_m = {}
    for m in range(2, args.m_max + 1):
        if m in report.skipped:
            status = "skipped"
        elif m in report.certificates:
            cert = report.certificates[m]
            status = "witness" if isinstance(cert, Witness) else "refuted"
        else:
            continue
        per_m[m] = status
        lines.append(f"m={m} {status}")
    lines.append(f"verdict {report.verdict}")
    doc = {
        "command": "certify",
        "per_m": {str(m): s for m, s in per_m.items()},
        "verdict": report.verdict,
    }
    if report.verdict == "refuted":
        refutation = report.certificates[report.refuted_at]
        for (name, abar), w in sorted(refutation.farkas_y.items()):
            lines.append(
                "farkas {}{} {}".format(name, tuple(abar), _fmt(w))
            )
        iomod.write_structure(report.gap.instance, args.gap_out)
        lines.append(f"gap blp {_fmt(report.gap.blp)} opt "
                     f"{_fmt(report.gap.opt)}")
        lines.append(f"wrote {args.gap_out}")
        doc["farkas"] = [
            {"symbol": n, "args": list(a), "weight": _fmt(w)}
            for (n, a), w in sorted(refutation.farkas_y.items())
        ]
        doc["gap"] = {
            "blp": _fmt(report.gap.blp),
            "opt": _fmt(report.gap.opt),
            "path": args.gap_out,
        }
        return EXIT_NEGATIVE, doc, lines
    if report.verdict == "partial":
        return EXIT_BUDGET, doc, lines
    return EXIT_OK, doc, lines


def _cmd_gap(args):
    language = iomod.parse_structure(args.language)
    cert = find_tsfp(language, args.m, budget=_budget(args))
    if isinstance(cert, Witness):
        lines = [f"m={args.m} witness; no gap at this arity"]
        doc = {"command": "gap", "m": args.m, "result": "witness"}
        return EXIT_NEGATIVE, doc, lines
    report = farkas_gap_instance(language, args.m, cert,
                                 budget=_budget(args))
    lines = [
        f"blp {_fmt(report.blp)}",
        f"opt {_fmt(report.opt)}",
        f"bound {_fmt(report.feasible_point_bound)}",
    ]
    _write_out(args, iomod.print_structure(report.instance), lines)
    doc = {
        "command": "gap", "m": args.m, "result": "gap",
        "blp": _fmt(report.blp), "opt": _fmt(report.opt),
        "bound": _fmt(report.feasible_point_bound),
        "instance": json.loads(iomod.print_structure(report.instance)),
    }
    return EXIT_OK, doc, lines


def _parse_table(text: str, domain_size: int, arity: int) -> Operation:
    try:
        entries = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"operation table must be comma-separated "
                         f"integers, got {text!r}")
    return Operation(domain_size, arity, entries)


def _violation_report(v, lines, doc):
    if v is None:
        lines.append("OK")
        doc["violation"] = None
        return EXIT_OK
    lines.append(
        "violation {} args={} lhs={} rhs={}".format(
            v.symbol, v.args, _fmt(v.lhs), _fmt(v.rhs)
        )
    )
    doc["violation"] = {
        "symbol": v.symbol,
        "args": [list(a) for a in v.args],
        "lhs": _fmt(v.lhs),
        "rhs": _fmt(v.rhs),
    }
    return EXIT_NEGATIVE


def _cmd_check_mm(args):
    language = iomod.parse_structure(args.language)
    d = language.domain_size
    g1 = _parse_table(args.g1, d, 2)
    g2 = _parse_table(args.g2, d, 2)
    lines: list[str] = []
    doc = {"command": "check-mm"}
    code = _violation_report(check_multimorphism(language, g1, g2),
                             lines, doc)
    return code, doc, lines


def _cmd_check_fpol(args):
    language = iomod.parse_structure(args.language)
    cert = iomod.parse_certificate(args.certificate)
    if not isinstance(cert, Witness):
        raise InputError("certificate file must contain a witness")
    lines: list[str] = []
    doc = {"command": "check-fpol"}
    code = _violation_report(
        check_fractional_polymorphism(language, cert.omega), lines, doc
    )
    return code, doc, lines


def _cmd_find_tsfp(args):
    language = iomod.parse_structure(args.language)
    cert = find_tsfp(language, args.m, budget=_budget(args))
    kind = "witness" if isinstance(cert, Witness) else "refutation"
    lines = [f"m={args.m} {kind}"]
    _write_out(args, iomod.print_certificate(cert), lines)
    doc = {
        "command": "find-tsfp", "m": args.m, "result": kind,
        "certificate": json.loads(iomod.print_certificate(cert)),
    }
    code = EXIT_OK if kind == "witness" else EXIT_NEGATIVE
    return code, doc, lines


def _cmd_pm_build(args):
    language = iomod.parse_structure(args.language)
    pm = build_multiset_structure(language, args.m)
    lines: list[str] = []
    _write_out(args, iomod.print_structure(pm), lines)
    doc = {
        "command": "pm-build", "m": args.m,
        "structure": json.loads(iomod.print_structure(pm)),
    }
    return EXIT_OK, doc, lines


def _cmd_gallery(args):
    if args.family == "lattice":
        spec = {
            "chain3": chain_lattice(3), "chain4": chain_lattice(4),
            "diamond": diamond_lattice(), "pentagon": pentagon_lattice(),
        }[args.spec]
        g1, g2 = lattice_ops(spec)
    elif args.family == "ksub":
        g1, g2 = min0_max0(args.k)
    else:
        try:
            parents = tuple(int(v) for v in args.parents.split(","))
        except ValueError:
            raise InputError(f"--parents must be comma-separated integers, "
                             f"got {args.parents!r}")
        g1 = tree_meet(TreeSpec(parents))
        g2 = g1
    if args.random_tables < 1:
        raise InputError("--random-tables must be positive")
    names = []
    tables = {}
    for i in range(args.random_tables):
        name = f"f{i + 1}"
        names.append((name, 2))
        tables[name] = random_cost_table_with_multimorphism(
            g1, g2, 2, args.seed + i
        )
    names.append(("u1", 1))
    tables["u1"] = random_cost_table_with_multimorphism(
        g1, g2, 1, args.seed + args.random_tables
    )
    language = ValuedStructure(
        Signature.of(*names), g1.domain_size, tables
    )
    lines: list[str] = []
    _write_out(args, iomod.print_structure(language), lines)
    doc = {
        "command": "gallery", "family": args.family,
        "structure": json.loads(iomod.print_structure(language)),
    }
    return EXIT_OK, doc, lines


def _cmd_validate(args):
    if args.language is None and args.instance is None:
        raise InputError("provide --language and/or --instance")
    lines: list[str] = []
    doc = {"command": "validate", "violations": {}}
    bad = False
    for label, path in (("language", args.language),
                        ("instance", args.instance)):
        if path is None:
            continue
        violations = validate_structure(iomod.parse_structure(path))
        doc["violations"][label] = violations
        if violations:
            bad = True
            for v in violations:
                lines.append(f"{label}: {v}")
        else:
            lines.append(f"{label}: OK")
    return (EXIT_INPUT if bad else EXIT_OK), doc, lines


if __name__ == "__main__":
    sys.exit(main())
