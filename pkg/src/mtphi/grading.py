"""Graded spaces with a unipotent automorphism and the free graded Lie algebra.

A :class:`CEtaObject` is a graded Q_p-space V (given by its dimensions)
with a K-linear unipotent eta whose deviation from the identity strictly
raises degree.  Bases are sorted by ascending degree, so eta is block lower
unitriangular.  Degree n corresponds to slope -n.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence

from . import filmod as fm
from . import linalg as la
from .errors import NotUnipotent, ValidationError
from .logpoint import eta as eta_of
from .padic import LocalField, Scalar, pi_coordinate, random_scalar, scalar_from_rational


@dataclass(frozen=True, eq=False)
class CEtaObject:
    field: LocalField
    dims: tuple          # ((degree, dim), ...) ascending, dims > 0
    eta: tuple

    def __post_init__(self):
        items = self.dims.items() if isinstance(self.dims, dict) else self.dims
        dims = tuple(sorted((int(k), int(v)) for k, v in items if int(v) != 0))
        if any(v < 0 for _, v in dims):
            raise ValidationError("dimensions must be nonnegative")
        object.__setattr__(self, "dims", dims)
        D = sum(v for _, v in dims)
        rows = [[self.field(x) for x in r] for r in self.eta]
        if len(rows) != D or any(len(r) != D for r in rows):
            raise ValidationError(f"eta must be {D}x{D}")
        object.__setattr__(self, "eta", tuple(tuple(r) for r in rows))
        for a in range(D):
            for b in range(D):
                if self.degrees[a] <= self.degrees[b]:
                    want = 1 if a == b else 0
                    if not self.eta[a][b] == want:
                        raise ValidationError(
                            "eta - id must map V_n into degrees > n (block lower unitriangular)"
                        )

    @property
    def total_dim(self) -> int:
        return sum(v for _, v in self.dims)

    @property
    def degrees(self) -> list:
        out = []
        for n, v in self.dims:
            out.extend([n] * v)
        return out

    def dim_dict(self) -> Dict[int, int]:
        return dict(self.dims)

    def eta_matrix(self) -> list:
        return [list(r) for r in self.eta]

    def __eq__(self, other):
        if not isinstance(other, CEtaObject) or self.dims != other.dims:
            return False
        return la.equal(self.eta_matrix(), other.eta_matrix())

    __hash__ = None


def psi(M: fm.FilPhiNModule) -> CEtaObject:
    """Degree n <- M_{-n}; eta is the slope-basis matrix of eta(M)."""
    e = eta_of(M)
    dims: Dict[int, int] = {}
    for s in e.basis_slopes:
        dims[-s] = dims.get(-s, 0) + 1
    return CEtaObject(M.field, dims, e.constant_matrix())


def phi_inv(V: CEtaObject) -> fm.FilPhiNModule:
    """phi = p^{-n} on degree n, N = 0, F^i = eta(V_{<= -i} (x) K)."""
    field = V.field
    degs = V.degrees
    D = len(degs)
    if D == 0:
        return fm.zero_module(field)
    zero = field.zero()
    phi = [[scalar_from_rational(field, Fraction(field.p) ** (-degs[a])) if a == b else zero
            for b in range(D)] for a in range(D)]
    eta = V.eta_matrix()

    def F(i):
        return [[eta[r][b] for r in range(D)] for b in range(D) if -degs[b] >= i]

    filt = fm.canonical_filtration(F, [-n for n in degs], D)
    return fm.FilPhiNModule(field, D, phi, la.zeros(field, D, D), filt)


def canonical_iso(M: fm.FilPhiNModule) -> fm.Morphism:
    """phi_inv(psi(M)) -> M: the slope basis of M."""
    target = M
    source = phi_inv(psi(M))
    S = fm.slope_decomposition(M).S
    return fm.Morphism(source, target, S)


# -- nilpotent log / exp -------------------------------------------------------


def _is_zero_matrix(A) -> bool:
    return all(x.is_zero() for row in A for x in row)


def nilpotent_log(eta) -> list:
    """sum_{k>=1} (-1)^{k+1} (eta - 1)^k / k, finite for unipotent eta."""
    A = [list(r) for r in eta]
    n = len(A)
    if n == 0:
        return []
    field = A[0][0].field
    X = la.sub(A, la.identity(field, n))
    total = la.zeros(field, n, n)
    power = la.identity(field, n)
    for k in range(1, n + 1):
        power = la.matmul(power, X)
        if _is_zero_matrix(power):
            return total
        term = [[x / k for x in row] for row in power]
        total = la.add(total, term) if k % 2 else la.sub(total, term)
    if not _is_zero_matrix(la.matmul(power, X)):
        raise NotUnipotent("eta - 1 is not nilpotent")
    return total


def nilpotent_exp(x) -> list:
    """sum_k x^k / k!, finite for nilpotent x."""
    A = [list(r) for r in x]
    n = len(A)
    if n == 0:
        return []
    field = A[0][0].field
    total = la.identity(field, n)
    power = la.identity(field, n)
    fact = 1
    for k in range(1, n + 1):
        power = la.matmul(power, A)
        if _is_zero_matrix(power):
            return total
        fact *= k
        total = la.add(total, [[y / fact for y in row] for row in power])
    if not _is_zero_matrix(la.matmul(power, A)):
        raise NotUnipotent("matrix is not nilpotent")
    return total


# -- the free graded Lie algebra --------------------------------------------------


def _apply_functional(f: Sequence, x: Scalar) -> Scalar:
    """f(x) for f given by its values on the pi-power basis of K."""
    field = x.field
    acc = None
    for t, ft in enumerate(f):
        term = pi_coordinate(x, t) * field(ft)
        acc = term if acc is None else acc + term
    return acc


def generator_action(V: CEtaObject, i: int, f: Sequence) -> list:
    """beta_i(f): the degree-i part of log(eta) read through f : K -> Q_p."""
    if i < 1:
        raise ValidationError("generator degree must be positive")
    field = V.field
    if len(f) != field.e:
        raise ValidationError(f"functional needs {field.e} values on the pi-power basis")
    return _beta(V, nilpotent_log(V.eta_matrix()), i, f)


def _beta(V: CEtaObject, log_eta, i: int, f) -> list:
    field = V.field
    degs = V.degrees
    D = len(degs)
    out = la.zeros(field, D, D)
    for a in range(D):
        for b in range(D):
            if degs[a] == degs[b] + i:
                out[a][b] = _apply_functional(f, log_eta[a][b])
    return out


def dual_functionals(field: LocalField, basis=None) -> list:
    """Values on the pi-power basis of the functionals dual to ``basis`` (default: pi^t)."""
    e = field.e
    if basis is None:
        return [[1 if s == t else 0 for s in range(e)] for t in range(e)]
    vecs = [field(b) for b in basis]
    C = [[pi_coordinate(v, t) for v in vecs] for t in range(e)]
    Cinv = la.inverse(C)
    return [list(row) for row in Cinv]


def reconstruct_eta(V: CEtaObject, basis=None) -> list:
    """exp(rho(eps)) with rho(eps) = sum_i sum_j beta_i(v_j^dual) v_j."""
    field = V.field
    degs = V.degrees
    D = len(degs)
    if D == 0:
        return []
    if basis is None:
        vecs = [field.one()] + [field.uniformizer() ** t for t in range(1, field.e)]
    else:
        vecs = [field(b) for b in basis]
    duals = dual_functionals(field, basis)
    rho = la.zeros(field, D, D)
    log_eta = nilpotent_log(V.eta_matrix())
    top = max(degs) - min(degs)
    for i in range(1, top + 1):
        for f, v in zip(duals, vecs):
            beta = _beta(V, log_eta, i, f)
            rho = la.add(rho, la.scale(beta, v))
    return nilpotent_exp(rho)


def grade_action(t, V: CEtaObject) -> CEtaObject:
    """Conjugate eta by t^n on degree n: block (m, n) picks up t^{m-n}."""
    field = V.field
    t = field(t)
    if t.is_zero():
        raise ValidationError("t must be invertible")
    degs = V.degrees
    eta = V.eta_matrix()
    out = [[eta[a][b] * (t ** (degs[a] - degs[b])) for b in range(len(degs))] for a in range(len(degs))]
    return CEtaObject(field, V.dims, out)


@dataclass(frozen=True)
class LieProfile:
    d: int
    cutoff: int
    dims: tuple


LIE_CUTOFF_MAX = 12


def _mobius(n: int) -> int:
    result, k = 1, 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            result = -result
        k += 1
    return -result if n > 1 else result


def lie_dims(d: int, cutoff: int) -> LieProfile:
    """Graded dimensions of the free Lie algebra on d generators in every positive degree.

    The generating series of the generators is d x / (1 - x), so
    sum_{k | n} k l_k = (d + 1)^n - 1 and Moebius inversion gives l_n.
    """
    if d < 1:
        raise ValidationError("d must be >= 1")
    if not 1 <= cutoff <= LIE_CUTOFF_MAX:
        raise ValidationError(f"cutoff must lie in 1..{LIE_CUTOFF_MAX}")
    dims = []
    for n in range(1, cutoff + 1):
        total = sum(_mobius(n // k) * ((d + 1) ** k - 1) for k in range(1, n + 1) if n % k == 0)
        dims.append(total // n)
    return LieProfile(d, cutoff, tuple(dims))


# -- random objects -------------------------------------------------------------


def random_ceta(field: LocalField, rng, max_dim: int = 6, degrees: Sequence[int] = range(-2, 3)) -> CEtaObject:
    D = rng.randint(1, max_dim)
    degs = sorted(rng.choice(list(degrees)) for _ in range(D))
    dims: Dict[int, int] = {}
    for n in degs:
        dims[n] = dims.get(n, 0) + 1
    zero, one = field.zero(), field.one()
    eta = [[one if a == b else (random_scalar(field, rng, 0, 2) if degs[a] > degs[b] else zero)
            for b in range(D)] for a in range(D)]
    return CEtaObject(field, dims, eta)
