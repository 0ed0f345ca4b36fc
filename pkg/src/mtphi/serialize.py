"""JSON encodings of fields, scalars, modules, eta matrices, C_eta objects and MTHS.

Decoders take a ``path`` (JSON-pointer style, e.g. ``$.phi[1][0]``) and
raise :class:`ValidationError` naming the offending location.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .archimedean import RealMTHS
from .errors import ValidationError
from .filmod import FilPhiNModule
from .grading import CEtaObject, LieProfile
from .logpoint import EtaMatrix, KstPoly
from .padic import LocalField, Scalar, parse_rational, scalar_from_digits


def _fail(path: str, msg: str):
    raise ValidationError(f"{path}: {msg}")


def _get(obj, key, path, kind=None):
    if not isinstance(obj, dict):
        _fail(path, "expected an object")
    if key not in obj:
        _fail(f"{path}.{key}", "missing")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        _fail(f"{path}.{key}", f"expected {getattr(kind, '__name__', kind)}")
    return val


def _rational(x, path) -> Fraction:
    if isinstance(x, bool):
        _fail(path, "expected a rational")
    try:
        return parse_rational(x)
    except (ValidationError, ValueError, ZeroDivisionError):
        _fail(path, f"not a rational: {x!r}")


def frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


# -- fields and scalars ------------------------------------------------------------


def field_to_json(field: LocalField) -> dict:
    branch = field.branch
    return {
        "p": field.p,
        "precision": field.precision,
        "eisenstein": [frac_str(a) for a in field.eisenstein],
        "branch": scalar_to_json(branch) if isinstance(branch, Scalar) else frac_str(branch),
    }


def field_from_json(obj, path: str = "$", precision=None) -> LocalField:
    p = _get(obj, "p", path, int)
    prec = precision if precision is not None else _get(obj, "precision", path, int)
    eis = obj.get("eisenstein", [])
    if not isinstance(eis, list):
        _fail(f"{path}.eisenstein", "expected a list")
    eis = [_rational(a, f"{path}.eisenstein[{i}]") for i, a in enumerate(eis)]
    field = LocalField(p, prec, tuple(eis))
    branch = obj.get("branch", "0/1")
    if isinstance(branch, dict):
        branch = scalar_from_json(field, branch, f"{path}.branch")
    else:
        branch = _rational(branch, f"{path}.branch")
    return field.with_branch(branch)


def scalar_to_json(s: Scalar) -> dict:
    out = {"pi_coeffs": [{"val": v, "digits": ds} for v, ds in s.digits()], "prec": frac_str(s.prec)}
    if s.in_base():
        out["rational"] = frac_str(s.coeffs[0])
    return out


def scalar_from_json(field: LocalField, obj, path: str = "$") -> Scalar:
    if isinstance(obj, (int, str)) and not isinstance(obj, bool):
        return field(_rational(obj, path))
    if not isinstance(obj, dict):
        _fail(path, "expected a scalar")
    if "pi_coeffs" in obj:
        coords = obj["pi_coeffs"]
        if not isinstance(coords, list) or len(coords) != field.e:
            _fail(f"{path}.pi_coeffs", f"expected a list of {field.e} coordinates")
        parsed = []
        for i, c in enumerate(coords):
            cp = f"{path}.pi_coeffs[{i}]"
            v = _get(c, "val", cp, int)
            ds = _get(c, "digits", cp, list)
            parsed.append((v, ds))
        prec = _rational(obj["prec"], f"{path}.prec") if "prec" in obj else None
        try:
            return scalar_from_digits(field, parsed, prec)
        except ValidationError as exc:
            _fail(path, str(exc))
    if "rational" in obj:
        return field(_rational(obj["rational"], f"{path}.rational"))
    _fail(path, "scalar needs 'pi_coeffs' or 'rational'")


def matrix_to_json(A) -> list:
    return [[scalar_to_json(x) for x in row] for row in A]


def matrix_from_json(field, obj, path, rows=None, cols=None) -> list:
    if not isinstance(obj, list):
        _fail(path, "expected a matrix (list of rows)")
    out = []
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            _fail(f"{path}[{i}]", "expected a row")
        if cols is not None and len(row) != cols:
            _fail(f"{path}[{i}]", f"expected {cols} entries")
        out.append([scalar_from_json(field, x, f"{path}[{i}][{j}]") for j, x in enumerate(row)])
    if rows is not None and len(out) != rows:
        _fail(path, f"expected {rows} rows")
    return out


# -- modules -------------------------------------------------------------------------


def module_to_json(M: FilPhiNModule) -> dict:
    return {
        "field": field_to_json(M.field),
        "dim": M.dim,
        "phi": matrix_to_json(M.phi),
        "monodromy": matrix_to_json(M.monodromy),
        "filtration": [{"step": s, "basis": matrix_to_json(b)} for s, b in M.filtration],
    }


def module_from_json(obj, path: str = "$", field: LocalField = None) -> FilPhiNModule:
    if field is None:
        field = field_from_json(_get(obj, "field", path), f"{path}.field")
    d = _get(obj, "dim", path, int)
    phi = matrix_from_json(field, _get(obj, "phi", path), f"{path}.phi", d, d)
    N = matrix_from_json(field, _get(obj, "monodromy", path), f"{path}.monodromy", d, d)
    filt = []
    for k, item in enumerate(_get(obj, "filtration", path, list)):
        ip = f"{path}.filtration[{k}]"
        step = _get(item, "step", ip, int)
        basis = matrix_from_json(field, _get(item, "basis", ip), f"{ip}.basis", None, d)
        filt.append((step, basis))
    return FilPhiNModule(field, d, phi, N, tuple(filt))


def kst_to_json(x: KstPoly) -> list:
    return [scalar_to_json(c) for c in x.coeffs]


def eta_to_json(e: EtaMatrix) -> dict:
    return {
        "basis_slopes": list(e.basis_slopes),
        "entries": [[kst_to_json(x) for x in row] for row in e.entries],
    }


def eta_from_json(field: LocalField, obj, path: str = "$") -> EtaMatrix:
    slopes = _get(obj, "basis_slopes", path, list)
    rows = _get(obj, "entries", path, list)
    entries = []
    for i, row in enumerate(rows):
        entries.append([KstPoly(field, [scalar_from_json(field, c, f"{path}.entries[{i}][{j}][{t}]")
                                        for t, c in enumerate(x)])
                        for j, x in enumerate(row)])
    return EtaMatrix(field, tuple(slopes), entries)


def ceta_to_json(V: CEtaObject) -> dict:
    return {
        "field": field_to_json(V.field),
        "dims": {str(n): v for n, v in V.dims},
        "eta": matrix_to_json(V.eta),
    }


def ceta_from_json(obj, path: str = "$", field: LocalField = None) -> CEtaObject:
    if field is None:
        field = field_from_json(_get(obj, "field", path), f"{path}.field")
    dims_raw = _get(obj, "dims", path, dict)
    dims = {}
    for k, v in dims_raw.items():
        try:
            dims[int(k)] = int(v)
        except (TypeError, ValueError):
            _fail(f"{path}.dims.{k}", "expected integer degree and dimension")
    D = sum(dims.values())
    eta = matrix_from_json(field, _get(obj, "eta", path), f"{path}.eta", D, D)
    try:
        return CEtaObject(field, dims, eta)
    except ValidationError as exc:
        _fail(path, str(exc))


def lie_to_json(profile: LieProfile) -> list:
    return list(profile.dims)


# -- real structures ---------------------------------------------------------------------


def complex_to_json(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def complex_matrix_to_json(A) -> list:
    return [[complex_to_json(x) for x in row] for row in np.asarray(A)]


def _complex(x, path) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) for t in x):
        return complex(x[0], x[1])
    _fail(path, "expected a number or [re, im]")


def mths_to_json(H: RealMTHS) -> dict:
    return {
        "dim": H.dim,
        "weights": [{"step": s, "basis": B.T.tolist()} for s, B in H.weights],
        "hodge": [{"step": s, "basis": [[complex_to_json(x) for x in col] for col in B.T]} for s, B in H.hodge],
    }


def mths_from_json(obj, path: str = "$") -> RealMTHS:
    n = _get(obj, "dim", path, int)
    weights = []
    for k, item in enumerate(_get(obj, "weights", path, list)):
        ip = f"{path}.weights[{k}]"
        step = _get(item, "step", ip, int)
        basis = _get(item, "basis", ip, list)
        vecs = []
        for i, v in enumerate(basis):
            if not isinstance(v, list) or len(v) != n or not all(
                    isinstance(t, (int, float)) and not isinstance(t, bool) for t in v):
                _fail(f"{ip}.basis[{i}]", f"expected {n} real numbers")
            vecs.append([float(t) for t in v])
        weights.append((step, vecs))
    hodge = []
    for k, item in enumerate(_get(obj, "hodge", path, list)):
        ip = f"{path}.hodge[{k}]"
        step = _get(item, "step", ip, int)
        basis = _get(item, "basis", ip, list)
        vecs = []
        for i, v in enumerate(basis):
            if not isinstance(v, list) or len(v) != n:
                _fail(f"{ip}.basis[{i}]", f"expected {n} complex numbers")
            vecs.append([_complex(t, f"{ip}.basis[{i}][{j}]") for j, t in enumerate(v)])
        hodge.append((step, vecs))
    return RealMTHS(n, tuple(weights), tuple(hodge))
