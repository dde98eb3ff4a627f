"""Text serialization: structure files and certificate files.

Both formats are JSON documents with a leading ``comment`` field that
documents the conventions in-band.  Costs and weights are printed as
reduced fractions ``"p/q"`` (or ``"n"`` for integers) with ``"inf"`` for
infinity; tables are row-major, the last tuple coordinate varying
fastest.  ``parse . print`` is the identity.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .algebra import Certificate, Refutation, Witness
from .operations import FractionalOperation, Operation
from .rationals import ExtendedRational, format_rational, parse_rational
from .structures import InputError, Signature, ValuedStructure

_STRUCTURE_COMMENT = (
    "valued structure; tables are row-major (last tuple coordinate varies "
    "fastest); entries are reduced fractions 'p/q' or 'inf'"
)
_CERTIFICATE_COMMENT = (
    "certificate; a witness lists weighted operation tables, a refutation "
    "lists weighted (symbol, argument tuple) rows"
)


def print_structure(s: ValuedStructure) -> str:
    doc = {
        "comment": _STRUCTURE_COMMENT,
        "domain_size": s.domain_size,
        "symbols": [
            {"name": sym.name, "arity": sym.arity}
            for sym in s.signature.symbols
        ],
        "tables": {
            sym.name: [format_rational(v) for v in s.tables[sym.name]]
            for sym in s.signature.symbols
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_structure_text(text: str,
                         source: str = "<string>") -> ValuedStructure:
    doc = _load_json(text, source)
    try:
        domain_size = doc["domain_size"]
        symbols = doc["symbols"]
        tables = doc["tables"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"{source}: missing field {exc}") from None
    if not isinstance(domain_size, int):
        raise InputError(f"{source}: domain_size must be an integer")
    if not isinstance(symbols, list) or not isinstance(tables, dict):
        raise InputError(f"{source}: symbols must be a list, tables a map")
    sig_entries = []
    for i, sym in enumerate(symbols):
        if not isinstance(sym, dict) or \
                not isinstance(sym.get("name"), str) or \
                not isinstance(sym.get("arity"), int):
            raise InputError(
                f"{source}: symbols[{i}] must be {{name, arity}}"
            )
        sig_entries.append((sym["name"], sym["arity"]))
    try:
        sig = Signature.of(*sig_entries)
    except InputError as exc:
        raise InputError(f"{source}: {exc}") from None
    parsed_tables = {}
    for name, arity in sig_entries:
        if name not in tables:
            raise InputError(f"{source}: missing table for symbol {name!r}")
        entries = tables[name]
        expected = domain_size ** arity
        if not isinstance(entries, list) or len(entries) != expected:
            got = len(entries) if isinstance(entries, list) else "non-list"
            raise InputError(
                f"{source}: table for {name!r} has {got} entries, "
                f"expected {expected}"
            )
        parsed_tables[name] = [
            _parse_entry(v, source, f"tables[{name!r}][{j}]")
            for j, v in enumerate(entries)
        ]
    extra = set(tables) - {n for n, _ in sig_entries}
    if extra:
        raise InputError(
            f"{source}: tables for unknown symbols: {sorted(extra)}"
        )
    try:
        return ValuedStructure(sig, domain_size, parsed_tables)
    except InputError as exc:
        raise InputError(f"{source}: {exc}") from None


def parse_structure(path: str) -> ValuedStructure:
    with open(path, encoding="utf-8") as fh:
        return parse_structure_text(fh.read(), source=path)


def write_structure(s: ValuedStructure, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(print_structure(s))


# ---------------------------------------------------------------------------
# certificates


def print_certificate(cert: Certificate) -> str:
    if isinstance(cert, Witness):
        ops = cert.omega.items()
        first = ops[0][0]
        doc = {
            "comment": _CERTIFICATE_COMMENT,
            "kind": "witness",
            "arity": first.arity,
            "domain_size": first.domain_size,
            "codomain_size": first.out_domain,
            "operations": [
                {"table": list(op.table), "weight": format_rational(w)}
                for op, w in ops
            ],
        }
    else:
        doc = {
            "comment": _CERTIFICATE_COMMENT,
            "kind": "refutation",
            "rows": [
                {
                    "symbol": name,
                    "args": list(args),
                    "weight": format_rational(w),
                }
                for (name, args), w in sorted(cert.farkas_y.items())
            ],
            "gap_instance": None if cert.gap_instance is None
            else json.loads(print_structure(cert.gap_instance)),
        }
    return json.dumps(doc, indent=2) + "\n"


def parse_certificate_text(text: str,
                           source: str = "<string>") -> Certificate:
    doc = _load_json(text, source)
    kind = doc.get("kind") if isinstance(doc, dict) else None
    if kind == "witness":
        try:
            d = doc["domain_size"]
            cod = doc.get("codomain_size", d)
            arity = doc["arity"]
            ops = [
                (Operation(d, arity, tuple(entry["table"]),
                           None if cod == d else cod),
                 _parse_weight(entry["weight"], source))
                for entry in doc["operations"]
            ]
            return Witness(FractionalOperation(ops))
        except (KeyError, TypeError, InputError) as exc:
            raise InputError(f"{source}: malformed witness: {exc}") from None
    if kind == "refutation":
        try:
            farkas = {
                (entry["symbol"], tuple(entry["args"])):
                    _parse_weight(entry["weight"], source)
                for entry in doc["rows"]
            }
            gap = doc.get("gap_instance")
            instance = None if gap is None else parse_structure_text(
                json.dumps(gap), source=f"{source} (gap_instance)"
            )
            return Refutation(farkas, instance)
        except (KeyError, TypeError) as exc:
            raise InputError(
                f"{source}: malformed refutation: {exc}"
            ) from None
    raise InputError(f"{source}: kind must be 'witness' or 'refutation'")


def parse_certificate(path: str) -> Certificate:
    with open(path, encoding="utf-8") as fh:
        return parse_certificate_text(fh.read(), source=path)


def write_certificate(cert: Certificate, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(print_certificate(cert))


# ---------------------------------------------------------------------------
# helpers


def _load_json(text: str, source: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise InputError(f"{source}: top-level value must be an object")
    return doc


def _parse_entry(value, source: str, where: str) -> ExtendedRational:
    if not isinstance(value, str):
        raise InputError(
            f"{source}: {where}: entries must be strings like '3/4' or 'inf'"
        )
    try:
        return parse_rational(value)
    except (ValueError, InputError) as exc:
        raise InputError(f"{source}: {where}: {exc}") from None


def _parse_weight(value, source: str) -> Fraction:
    ext = _parse_entry(value, source, "weight")
    if ext.is_infinite:
        raise InputError(f"{source}: weights must be finite")
    return ext.as_fraction()
