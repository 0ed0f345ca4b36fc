"""Command-line front end.

Every subcommand reads JSON (files or ``-`` for stdin), prints JSON on
stdout and diagnostics on stderr.  Exit codes: 0 ok, 1 corpus failure,
2 validation or malformed input, 3 insufficient precision, 4 domain error.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import archimedean as ar
from . import filmod as fm
from . import grading as gr
from . import linalg as la
from . import logpoint as lp
from . import serialize as ser
from .errors import DomainError, InsufficientPrecision, MtphiError, ValidationError
from .padic import LocalField, Scalar

DEFAULT_PRECISION = 20


class InputError(ValidationError):
    pass


def _default_precision() -> int:
    raw = os.environ.get("MTPHI_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"MTPHI_PRECISION={raw!r} is not an integer") from None
    if value < 1:
        raise InputError("MTPHI_PRECISION must be positive")
    return value


def _frac(text: str, flag: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{flag}: not a rational: {text!r}") from None


def _load_json(path: str):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _field(args, embedded=None) -> LocalField:
    """Field from --field / embedded JSON, then flag overrides."""
    source = None
    if getattr(args, "field", None):
        source = _load_json(args.field)
    elif embedded is not None:
        source = embedded
    if source is not None:
        base = ser.field_from_json(source, "$.field" if embedded is not None and not args.field else "$")
    else:
        if args.p is None:
            raise InputError("no field given: use --field FILE or --p")
        base = LocalField(args.p, _default_precision())
    p = args.p if args.p is not None else base.p
    precision = args.precision if args.precision is not None else (
        base.precision if source is not None else _default_precision())
    eis = base.eisenstein
    if args.eisenstein is not None:
        eis = tuple(a for a in args.eisenstein.split(",") if a.strip()) if args.eisenstein.strip() else ()
    branch = base.branch if args.branch is None else _frac(args.branch, "--branch")
    if p != base.p or eis != base.eisenstein or precision != base.precision:
        if isinstance(branch, Scalar):
            branch = branch.coeffs[0]
        return LocalField(p, precision, eis, branch)
    return base.with_branch(branch)


def _module(args, key="input"):
    obj = _load_json(getattr(args, key))
    if not isinstance(obj, dict):
        raise InputError("$: expected a module object")
    field = _field(args, obj.get("field"))
    return ser.module_from_json(obj, "$", field)


def _ceta(args):
    obj = _load_json(args.input)
    if not isinstance(obj, dict):
        raise InputError("$: expected a C_eta object")
    field = _field(args, obj.get("field"))
    return ser.ceta_from_json(obj, "$", field)


# -- subcommands ----------------------------------------------------------------------


def cmd_check(args):
    M = _module(args)
    report = fm.validate(M)
    out = {"valid": report.ok, "violations": report.violations}
    if report.ok:
        try:
            sd = fm.slope_decomposition(M)
            out["slopes"] = {str(n): len(v) for n, v in sorted(sd.components.items())}
            out["newton"] = list(fm.newton_polygon(M).points)
        except DomainError as exc:
            out["slopes"] = None
            out["newton"] = None
            out["note"] = str(exc)
        out["hodge"] = list(fm.hodge_polygon(M).points)
        out["mixed_tate"] = fm.is_mixed_tate(M)
        out["mt_criterion"] = fm.mt_criterion(M)
        out["crystalline"] = lp.is_crystalline(M)
    return out, (0 if report.ok else 2)


def cmd_eta(args):
    M = _module(args)
    e = lp.eta_via_deligne(M) if args.deligne else lp.eta(M)
    return ser.eta_to_json(e), 0


def cmd_eta_st(args):
    M = _module(args)
    x = None if args.x is None else _frac(args.x, "--x")
    return ser.eta_to_json(lp.eta_st(M, x)), 0


def cmd_ext_class(args):
    M = _module(args)
    return {"class": ser.scalar_to_json(lp.ext_class(M, args.n))}, 0


def cmd_ext_build(args):
    field = _field(args)
    return ser.module_to_json(lp.ext_build(_frac(args.a, "--a"), args.n, field)), 0


def cmd_baer_sum(args):
    E1 = _module(args, "input")
    E2 = _module(args, "input2")
    return ser.module_to_json(lp.baer_sum(E1, E2, args.n)), 0


def cmd_kummer(args):
    field = _field(args)
    return ser.module_to_json(lp.kummer_module(_frac(args.q, "--q"), field)), 0


def cmd_crystalline(args):
    return {"crystalline": lp.is_crystalline(_module(args))}, 0


def cmd_psi(args):
    return ser.ceta_to_json(gr.psi(_module(args))), 0


def cmd_phi_inv(args):
    return ser.module_to_json(gr.phi_inv(_ceta(args))), 0


def cmd_reconstruct_eta(args):
    V = _ceta(args)
    eta = gr.reconstruct_eta(V)
    return {"eta": ser.matrix_to_json(eta), "matches": la.equal(eta, V.eta_matrix())}, 0


def cmd_lie_dims(args):
    return ser.lie_to_json(gr.lie_dims(args.d, args.cutoff)), 0


def cmd_arch_d(args):
    obj = _load_json(args.input)
    H = ser.mths_from_json(obj)
    d = ar.compute_d(H, args.tol)
    out = {"weights": ar.graded_weights(H, args.tol), "d": ser.complex_matrix_to_json(d)}
    if args.epsilon:
        out["epsilon"] = ser.complex_matrix_to_json(ar.epsilon_arch(H, args.tol))
    return out, 0


def cmd_arch_polylog(args):
    try:
        z = complex(args.z.replace(" ", ""))
    except ValueError:
        raise InputError(f"--z: not a complex number: {args.z!r}") from None
    tol = args.tol if args.tol is not None else 1e-15
    out = {"k": args.k, "z": ser.complex_to_json(z), "li": ser.complex_to_json(ar.polylog(args.k, z, tol))}
    if args.bd:
        val = ar.bd_value(args.k, z, tol, b1=args.b1, include_top=args.include_top,
                          i_sign=-1 if args.minus_i else 1)
        out["bd"] = ser.complex_to_json(val)
    return out, 0


# -- corpus ------------------------------------------------------------------------------

INVARIANTS = (
    "validates",
    "mixed_tate",
    "mt_criterion",
    "newton_equals_hodge",
    "psi_phi_inv_identity",
    "reconstruct_eta",
    "eta_routes_agree",
    "crys_hodge_pairing",
    "eta_unipotent",
    "weight_exactness",
    "canonical_iso",
    "json_round_trip",
)


def _check_object(V: gr.CEtaObject) -> dict:
    res = {}
    M = gr.phi_inv(V)
    res["validates"] = fm.validate(M).ok
    res["mixed_tate"] = fm.is_mixed_tate(M)
    res["mt_criterion"] = fm.mt_criterion(M)
    res["newton_equals_hodge"] = fm.newton_polygon(M) == fm.hodge_polygon(M)
    res["psi_phi_inv_identity"] = gr.psi(M) == V
    res["reconstruct_eta"] = la.equal(gr.reconstruct_eta(V), V.eta_matrix())
    e1 = lp.eta(M)
    res["eta_routes_agree"] = e1 == lp.eta_via_deligne(M)
    res["crys_hodge_pairing"] = la.equal(lp.crys_hodge_pairing(M), e1.constant_matrix())
    slopes = e1.basis_slopes
    E = e1.constant_matrix()
    res["eta_unipotent"] = all(
        (E[a][b] == (1 if a == b else 0)) for a in range(len(slopes)) for b in range(len(slopes))
        if slopes[a] >= slopes[b])
    res["weight_exactness"] = all(fm.check_weight_exactness(M, i) for i in set(slopes))
    iso = gr.canonical_iso(M)
    res["canonical_iso"] = fm.is_morphism(iso) and la.is_invertible(iso.as_list())
    res["json_round_trip"] = fm.modules_equal(ser.module_from_json(json.loads(json.dumps(ser.module_to_json(M)))), M)
    return res


def run_corpus(seed: int, count: int, field: LocalField, max_dim: int = 5) -> dict:
    rng = random.Random(seed)
    tally = {name: {"pass": 0, "fail": 0} for name in INVARIANTS}
    failures = []
    for k in range(count):
        V = gr.random_ceta(field, rng, max_dim)
        for name, ok in _check_object(V).items():
            tally[name]["pass" if ok else "fail"] += 1
            if not ok:
                failures.append({"object": k, "invariant": name})
    return {
        "seed": seed,
        "count": count,
        "field": ser.field_to_json(field),
        "invariants": tally,
        "failures": failures,
        "ok": not failures,
    }


def cmd_corpus(args):
    if args.p is None and not args.field:
        args.p = 5
    field = _field(args)
    if args.count < 0:
        raise InputError("count must be >= 0")
    report = run_corpus(args.seed, args.count, field, args.max_dim)
    return report, (0 if report["ok"] else 1)


# -- parser --------------------------------------------------------------------------------


def _field_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("field")
    g.add_argument("--field", help="field JSON file")
    g.add_argument("--p", type=int, help="residue characteristic")
    g.add_argument("--precision", type=int, help="absolute precision (default: $MTPHI_PRECISION or 20)")
    g.add_argument("--eisenstein", help="comma-separated ascending coefficients, leading 1 included")
    g.add_argument("--branch", help="log(p) as a rational a/b")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mtphi", description=__doc__.splitlines()[0])
    parser.add_argument("--output", "-o", help="write JSON here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, module_input=True):
        sp = sub.add_parser(name, help=help_text)
        if module_input:
            sp.add_argument("--input", "-i", default="-", help="input JSON file (default: stdin)")
        _field_flags(sp)
        sp.set_defaults(func=func)
        return sp

    add("check", cmd_check, "validate a module and report its invariants")
    sp = add("eta", cmd_eta, "crystalline logarithmic point in the slope basis")
    sp.add_argument("--deligne", action="store_true", help="use the a_F / a_Fbar splitting route")
    sp = add("eta-st", cmd_eta_st, "semistable logarithmic point over K_st")
    sp.add_argument("--x", help="auxiliary element x with nu(x) != 0 (default p)")
    sp = add("ext-class", cmd_ext_class, "class of an extension of K(0) by K(n)")
    sp.add_argument("--n", type=int, required=True)
    sp = add("ext-build", cmd_ext_build, "extension with a given class", module_input=False)
    sp.add_argument("--a", required=True, help="class as a rational a/b")
    sp.add_argument("--n", type=int, required=True)
    sp = add("baer-sum", cmd_baer_sum, "Baer sum of two extensions")
    sp.add_argument("--input2", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp = add("kummer", cmd_kummer, "Kummer module of q", module_input=False)
    sp.add_argument("--q", required=True, help="q as a rational a/b")
    add("crystalline", cmd_crystalline, "is N zero")
    add("psi", cmd_psi, "module -> C_eta object")
    add("phi-inv", cmd_phi_inv, "C_eta object -> module")
    add("reconstruct-eta", cmd_reconstruct_eta, "exp of the generator action")
    sp = add("lie-dims", cmd_lie_dims, "graded dimensions of the free Lie algebra", module_input=False)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--cutoff", type=int, required=True)
    sp = add("arch-d", cmd_arch_d, "d and epsilon of a real mixed Tate Hodge structure")
    sp.add_argument("--tol", type=float, default=ar.DEFAULT_TOL)
    sp.add_argument("--epsilon", action="store_true", help="also print epsilon = log d")
    sp = add("arch-polylog", cmd_arch_polylog, "Li_k(z) and optionally the single-valued value",
             module_input=False)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--z", required=True, help="complex number, e.g. 0.5 or 0.3+0.2j")
    sp.add_argument("--tol", type=float)
    sp.add_argument("--bd", action="store_true", help="also evaluate the Bernoulli-weighted combination")
    sp.add_argument("--b1", type=float, default=-0.5)
    sp.add_argument("--include-top", action="store_true", help="include the l = k term")
    sp.add_argument("--minus-i", action="store_true", help="use -i as the square root of -1")
    sp = add("corpus", cmd_corpus, "random C_eta objects through the invariant suite", module_input=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=25)
    sp.add_argument("--max-dim", type=int, default=5)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        payload, code = args.func(args)
    except ValidationError as exc:
        print(f"mtphi: invalid input: {exc}", file=sys.stderr)
        return 2
    except InsufficientPrecision as exc:
        print(f"mtphi: insufficient precision: {exc}", file=sys.stderr)
        return 3
    except (DomainError, ValueError, ZeroDivisionError) as exc:
        print(f"mtphi: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    except MtphiError as exc:
        print(f"mtphi: {exc}", file=sys.stderr)
        return 4
    text = json.dumps(payload, indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


def main() -> None:
    sys.exit(run())
