"""Command-line driver.  Output is JSON by default, a plain table with --table."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import __version__
from . import knot_library as kl
from .cfk import ComplexParseError, InvalidComplexError, StructureError, load, validate
from .classical_invariants import a_coefficients, conway
from .obstructions import (OBSTRUCT_SWEEP, classify_lspace, ito_verdicts, obstruct_pair,
                           r0_nu_hat)
from .surgery import SurgerySlope, UnsupportedSlopeError, surger, vs_hs

SCHEMA = "hfsurgery-output/1"

EXIT_OK, EXIT_ERROR, EXIT_PARSE, EXIT_VALIDATION, EXIT_UNSUPPORTED = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _q(x) -> str:
    """Exact rationals as "a/b" strings (integers without a denominator)."""
    return str(Fraction(x))


def _poly(P, var: str = "t") -> dict:
    return {"text": P.to_string(var), "coefficients": [[e, c] for e, c in P.pairs()]}


def _module(mod) -> dict:
    return {"tower_bottom": _q(mod.tower_bottom),
            "torsion": [{"grading": _q(g), "length": n} for g, n in mod.torsion],
            "text": str(mod)}


def _record(name: str):
    p = Path(name)
    if name.endswith(".json") or p.is_file():
        try:
            return kl.ingest(p)
        except OSError as e:
            raise CliError(EXIT_PARSE, f"cannot read {name}: {e}") from None
    try:
        return kl.get(name)
    except kl.UnknownKnotError:
        raise CliError(EXIT_PARSE, f"unknown knot {name!r}; see the catalog command") from None


def _slope(text: str) -> SurgerySlope:
    try:
        return SurgerySlope.parse(text)
    except UnsupportedSlopeError as e:
        raise CliError(EXIT_UNSUPPORTED, str(e)) from None
    except ValueError as e:
        raise CliError(EXIT_PARSE, str(e)) from None


def _provenance(*records) -> dict:
    return {r.name: {k: v for k, v in r.notes} for r in records}


def _doc(command: List[str], inputs: dict, results, records) -> dict:
    return {"schema": SCHEMA, "version": __version__, "command": command, "inputs": inputs,
            "results": results, "provenance": _provenance(*records)}


# ---------------------------------------------------------------------------
# commands


def cmd_surgery(knot: str, slope_text: str) -> dict:
    rec = _record(knot)
    slope = _slope(slope_text)
    if rec.complex is not None:
        res = surger(rec.complex, slope)
        entries = []
        for e in res.entries:
            item = {"label": e.label, "d": _q(e.d), "hf_hat_dim": e.hf_hat_dim}
            if e.module is not None:
                item["module"] = _module(e.module)
            entries.append(item)
        results = {"absolute_gradings": res.absolute, "spin_c": entries,
                   "hf_hat_total": res.hf_hat_dim}
    elif slope == SurgerySlope(1, 1) and rec.stored_hf_plus_1 is not None:
        mod = rec.stored_hf_plus_1
        results = {"absolute_gradings": True,
                   "spin_c": [{"label": 0, "d": _q(mod.tower_bottom), "hf_hat_dim": mod.hf_hat_dim,
                               "module": _module(mod)}],
                   "hf_hat_total": mod.hf_hat_dim, "stored": True}
    else:
        raise CliError(EXIT_UNSUPPORTED, f"{rec.name} has no full complex; only stored +1 surgery data")
    return _doc(["surgery", knot, slope_text], {"knot": rec.name, "slope": str(slope)}, results, [rec])


def cmd_invariants(knot: str) -> dict:
    rec = _record(knot)
    nabla = conway(rec.alexander)
    a0, a2, a4 = a_coefficients(nabla)
    out = {"genus": rec.genus, "alexander": _poly(rec.alexander), "conway": _poly(nabla, "z"),
           "a2": _q(a2), "a4": _q(a4)}
    hfk = rec.hfk_dims()
    if hfk is not None:
        out["hfk_hat"] = [{"a": a, "m": m, "dim": d} for (a, m), d in hfk.items()]
    if rec.jones is not None:
        out["jones"] = _poly(rec.jones, "q")
    opts = rec.four_v3_options()
    if opts:
        out["four_v3"] = [_q(v) for v in opts]
        out["v3"] = [_q(v / 4) for v in opts]
        out["four_v3_sign_ambiguous"] = rec.four_v3_ambiguous
    if rec.complex is not None:
        table = vs_hs(rec.complex)
        rng = range(-rec.genus - 1, rec.genus + 2)
        out["V"] = [[s, table.V(s)] for s in rng]
        out["H"] = [[s, table.H(s)] for s in rng]
    elif rec.stored_V0 is not None:
        out["V"] = [[0, rec.stored_V0]]
    try:
        prof = r0_nu_hat(rec)
    except ValueError:
        prof = None
    if prof is not None:
        out["profile"] = {"r0_hat": prof.r0_hat, "nu_hat": prof.nu_hat}
        out["lspace_class"] = classify_lspace(rec)
    return _doc(["invariants", knot], {"knot": rec.name}, out, [rec])


def _report(rep) -> dict:
    return {"slope": str(rep.slope), "refuted": rep.refuted,
            "tests": [{"name": t.name, "status": t.status,
                       "witness": {k: _json_value(v) for k, v in t.witness}} for t in rep.tests]}


def _json_value(v):
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, Fraction):
        return _q(v)
    return v


def cmd_obstruct(a: str, b: str, slope_text: str) -> dict:
    A, B = _record(a), _record(b)
    slopes = list(OBSTRUCT_SWEEP) if slope_text == "sweep" else [_slope(slope_text)]
    reports = [_report(obstruct_pair(A, B, sl)) for sl in slopes]
    verdicts = ito_verdicts(A, B)
    ito = None if verdicts is None else [
        {"four_v3": [_q(fa), _q(fb)], "verdict": str(v)} for (fa, fb), v in verdicts]
    results = {"ito": ito, "reports": reports,
               "surviving_slopes": [r["slope"] for r in reports if not r["refuted"]]}
    return _doc(["obstruct", a, b, slope_text], {"A": A.name, "B": B.name, "slopes": slope_text},
                results, [A, B])


def cmd_catalog() -> dict:
    entries = []
    for n in kl.names():
        if "<" in n:
            entries.append({"name": n, "kind": "family"})
            continue
        rec = kl.get(n)
        entries.append({"name": n, "kind": "complex" if rec.complex is not None else "record",
                        "genus": rec.genus})
    return {"schema": SCHEMA, "version": __version__, "command": ["catalog"], "inputs": {},
            "results": {"knots": entries}, "provenance": {}}


def cmd_validate(path: str) -> dict:
    try:
        K = load(path)
    except OSError as e:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {e}") from None
    rep = validate(K)
    doc = {"schema": SCHEMA, "version": __version__, "command": ["validate", path],
           "inputs": {"file": path}, "results": {"name": K.name, "valid": rep.valid,
                                                 "violations": list(rep.violations)},
           "provenance": {}}
    if not rep.valid:
        raise _ValidationFailed(doc)
    return doc


class _ValidationFailed(Exception):
    def __init__(self, doc):
        super().__init__("validation failed")
        self.doc = doc


# ---------------------------------------------------------------------------
# rendering


def render_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def render_table(doc: dict) -> str:
    lines = [f"# {' '.join(doc['command'])}"]
    _walk(doc["results"], "", lines)
    return "\n".join(lines) + "\n"


def _walk(node, prefix: str, lines: List[str]) -> None:
    if isinstance(node, dict):
        for k, v in node.items():
            _walk(v, f"{prefix}.{k}" if prefix else k, lines)
    elif isinstance(node, list) and any(isinstance(x, (dict, list)) for x in node):
        for i, v in enumerate(node):
            _walk(v, f"{prefix}[{i}]", lines)
    else:
        shown = ", ".join(map(str, node)) if isinstance(node, list) else str(node)
        lines.append(f"{prefix:<40} {shown}")


def build_parser() -> argparse.ArgumentParser:
    # --table is accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--table", action="store_true", default=argparse.SUPPRESS,
                        help="human-readable table instead of JSON")
    ap = argparse.ArgumentParser(prog="hfsurgery", description="Heegaard Floer surgery computations",
                                 parents=[common])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    add = lambda name, help: sub.add_parser(name, help=help, parents=[common])
    p = add("surgery", "HF+ of p/q surgery")
    p.add_argument("knot", help="catalog name or complex file")
    p.add_argument("slope", help="p/q or p")
    p = add("invariants", "classical and Floer invariants of a knot")
    p.add_argument("knot")
    p = add("obstruct", "obstructions to S^3_r(A) = S^3_r(B)")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("slope", help="p/q, p or 'sweep'")
    add("catalog", "list catalog knots")
    p = add("validate", "validate a complex file")
    p.add_argument("file")
    return ap


def run(argv: Optional[List[str]] = None) -> dict:
    return _dispatch(build_parser().parse_args(argv))


def _dispatch(args) -> dict:
    if args.command == "surgery":
        return cmd_surgery(args.knot, args.slope)
    if args.command == "invariants":
        return cmd_invariants(args.knot)
    if args.command == "obstruct":
        return cmd_obstruct(args.a, args.b, args.slope)
    if args.command == "catalog":
        return cmd_catalog()
    return cmd_validate(args.file)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    render = render_table if getattr(args, "table", False) else render_json
    try:
        doc = _dispatch(args)
    except _ValidationFailed as e:
        sys.stdout.write(render(e.doc))
        return EXIT_VALIDATION
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except ComplexParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidComplexError, StructureError) as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except UnsupportedSlopeError as e:
        print(f"unsupported: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    sys.stdout.write(render(doc))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
