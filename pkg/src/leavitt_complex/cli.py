"""Command line driver.

    leavitt validate QUIVER [--out FILE]
    leavitt verify QUIVER [--suite S] [--lmin L] [--lmax L] [--N N] [--seed S] [--field F]
    leavitt lpa-mul QUIVER TERM_A TERM_B
    leavitt act QUIVER MODULE_ELEMENT LPA_ELEMENT

QUIVER is a path to a quiver file, or the name of a bundled one
(one_loop, two_loops, cycle_with_chord, source_vertex).

Literal grammar (EBNF):

    element  = "0" | signed , { ("+" | "-") , coef-term } ;
    signed   = [ "-" ] , coef-term ;
    coef-term = [ rational ] , term ;
    rational = digits , [ "/" , digits ] ;
    term     = "e(" vertex ")"                           (* vertex idempotent *)
             | 'g"' [ path ] '"' , 'r"' [ path ] '"'      (* (g)* r in Q^op *)
             | "e(" vertex ")[" qpath "|" qpath "]"      (* e_i z(p,q) *)
             | arrow "[" qpath "|" qpath "]" ;            (* a z(p,q) *)
    path     = arrow , { "." , arrow } ;                  (* written order *)
    qpath    = path | "e(" vertex ")" ;

Paths are written with the last arrow first, as in a3.a2.a1. Inside g"..."
and r"..." the arrows are those of Q^op, so g"a1.a2" is (a1^op a2^op)*.

Exit codes: 0 success, 1 a check failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path as FsPath

from . import bimodule, complex as cx, homology, lpa
from .certificates import SCHEMA_VERSION, Certificate, window_dict
from .linalg import field_from_string
from .quiver import QuiverError, parse_quiver, validate

SUITES = ("complex", "lpa", "bimodule", "cohomology", "all")


class UsageError(Exception):
    pass


def _read_quiver_text(name: str) -> str:
    p = FsPath(name)
    if p.is_file():
        return p.read_text(encoding="utf-8")
    stem = p.name[:-7] if p.name.endswith(".quiver") else p.name
    bundled = resources.files("leavitt_complex") / "data" / f"{stem}.quiver"
    if not p.parent.parts and bundled.is_file():
        return bundled.read_text(encoding="utf-8")
    raise UsageError(f"cannot read quiver file {name!r}")


def load_quiver(name: str, check: bool = True):
    try:
        q = parse_quiver(_read_quiver_text(name), validate_structure=False)
    except QuiverError as err:
        raise UsageError(f"{name}: {err}") from err
    if check:
        diag = validate(q)
        if not diag.ok:
            raise UsageError(f"{name}: " + "; ".join(diag.failures))
    return q


def _emit(text: str, out: str | None) -> None:
    if out:
        FsPath(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def cmd_validate(args) -> int:
    q = load_quiver(args.quiver, check=False)
    diag = validate(q)
    report = {"schema": SCHEMA_VERSION, "quiver": q.name, **diag.to_dict()}
    _emit(json.dumps(report, indent=2), args.out)
    return 0 if diag.ok else 1


def run_suite(name: str, q, lmin: int, lmax: int, N: int, seed: int, fld) -> list[Certificate]:
    w = cx.build_window(q, lmin, lmax, N, fld)
    certs: list[Certificate] = []
    if name == "complex":
        certs.append(cx.check_d_squared(w))
        certs.append(cx.verify_acyclicity(w))
        K, C = cx.subcomplex_K(w), cx.cokernel_C(w)
        certs.append(cx.verify_closure(K))
        certs.append(cx.verify_closure(C))
        for n in range(0, N + 1):
            certs.append(cx.verify_closure(cx.diagonal_C_n(w, n)))
        certs.append(cx.verify_decomposition(w))
        L = max(1, N)
        certs.append(cx.build_M_resolution(q, L, N, fld)[1])
        certs.append(cx.nakayama_compare(q, L, N, fld))
    elif name == "lpa":
        B = lpa.LeavittAlgebra(q, fld)
        certs.append(lpa.check_relations(B))
        certs.append(lpa.check_associativity(B, samples=200, seed=seed))
        certs.append(lpa.check_chi_bijection(B, range(lmin, lmax + 1), N))
    elif name == "bimodule":
        M = bimodule.Bimodule(q, fld)
        certs.append(bimodule.verify_relations(M, lmin, lmax, N, seed=seed))
        certs.append(bimodule.verify_well_defined(M, lmin, lmax, N, seed=seed))
        certs.append(bimodule.verify_dg_compat(w, M))
        certs.append(bimodule.verify_delta_phi(w, M, seed=seed))
        certs.append(bimodule.verify_unit_section(w, M))
        certs.append(bimodule.verify_phi_module_map(w, M, seed=seed))
    elif name == "cohomology":
        M = bimodule.Bimodule(q, fld)
        degrees = range(lmin, lmax + 1)
        for n in degrees:
            certs.append(homology.verify_coboundary_lemma(w, M, n, samples=5, seed=seed))
        certs.append(homology.quasi_balanced_report(q, degrees, w, samples=10, seed=seed, module=M))
    for c in certs:
        if not c.window:
            c.window = window_dict(lmin, lmax, N)
    return certs


def cmd_verify(args) -> int:
    fld = field_from_string(args.field)
    q = load_quiver(args.quiver)
    if args.lmin > args.lmax or args.N < 0:
        raise UsageError("need lmin <= lmax and N >= 0")
    names = SUITES[:-1] if args.suite == "all" else (args.suite,)
    suites = {}
    ok = True
    for name in names:
        certs = run_suite(name, q, args.lmin, args.lmax, args.N, args.seed, fld)
        suites[name] = [c.to_dict() for c in certs]
        ok = ok and all(c.passed for c in certs)
    report = {
        "schema": SCHEMA_VERSION,
        "quiver": q.name,
        "window": window_dict(args.lmin, args.lmax, args.N),
        "field": fld.name,
        "seed": args.seed,
        "status": "pass" if ok else "fail",
        "suites": suites,
    }
    _emit(json.dumps(report, indent=2), args.out)
    return 0 if ok else 1


def cmd_lpa_mul(args) -> int:
    q = load_quiver(args.quiver)
    B = lpa.LeavittAlgebra(q, field_from_string(args.field))
    try:
        x, y = B.parse(args.a), B.parse(args.b)
    except (ValueError, KeyError) as err:
        raise UsageError(str(err)) from err
    print(B.format(x * y))
    return 0


def cmd_act(args) -> int:
    q = load_quiver(args.quiver)
    fld = field_from_string(args.field)
    M = bimodule.Bimodule(q, fld)
    try:
        m = cx.parse_element(q, args.module, fld)
        b = M.algebra.parse(args.element)
        if len(b.homogeneous_parts()) > 1:
            raise ValueError("algebra element is not homogeneous")
    except (ValueError, KeyError) as err:
        raise UsageError(str(err)) from err
    print(cx.format_element(q, M.act(m, b)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="leavitt", description="Projective Leavitt complex toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a quiver file")
    v.add_argument("quiver")
    v.add_argument("--out")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("verify", help="run verification suites and print a JSON report")
    r.add_argument("quiver")
    r.add_argument("--suite", choices=SUITES, default="all")
    r.add_argument("--lmin", type=int, default=-2)
    r.add_argument("--lmax", type=int, default=2)
    r.add_argument("--N", type=int, default=4)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--field", default=None, help="Q or Fp:<prime> (default $LEAVITT_FIELD or Q)")
    r.add_argument("--out")
    r.set_defaults(func=cmd_verify)

    m = sub.add_parser("lpa-mul", help="multiply two elements of L_k(Q^op)")
    m.add_argument("quiver")
    m.add_argument("a")
    m.add_argument("b")
    m.add_argument("--field", default=None)
    m.set_defaults(func=cmd_lpa_mul)

    a = sub.add_parser("act", help="act on a module element by an algebra element")
    a.add_argument("quiver")
    a.add_argument("module")
    a.add_argument("element")
    a.add_argument("--field", default=None)
    a.set_defaults(func=cmd_act)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        # bad --field values and similar
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
