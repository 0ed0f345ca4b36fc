"""Filtered (phi, N)-modules over K as matrix data.

A module is the K0-space K0^d with matrices ``phi`` and ``monodromy`` acting
on column vectors, and a descending filtration of M_K given by explicit
bases at listed steps.  F^j is the span listed at the smallest step >= j;
above the highest listed step it is zero, and the lowest listed step must
span M_K.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg as la
from .errors import (
    InsufficientPrecision,
    NotInvertible,
    NotMixedTate,
    NotMixedTatePhi,
    ValidationError,
)
from .padic import LocalField, Scalar, pi_coordinate, random_scalar, scalar_from_rational


def _as_matrix(field: LocalField, rows, d: int, what: str) -> tuple:
    rows = [[field(x) for x in r] for r in rows]
    if len(rows) != d or any(len(r) != d for r in rows):
        raise ValidationError(f"{what} must be {d}x{d}")
    return tuple(tuple(r) for r in rows)


@dataclass(frozen=True, eq=False)
class FilPhiNModule:
    field: LocalField
    dim: int
    phi: tuple
    monodromy: tuple
    filtration: tuple
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        d = self.dim
        if d < 0:
            raise ValidationError("dim must be >= 0")
        object.__setattr__(self, "phi", _as_matrix(self.field, self.phi, d, "phi"))
        object.__setattr__(self, "monodromy", _as_matrix(self.field, self.monodromy, d, "monodromy"))
        steps = []
        seen = set()
        for step, basis in self.filtration:
            step = int(step)
            if step in seen:
                raise ValidationError(f"filtration step {step} listed twice")
            seen.add(step)
            vecs = []
            for v in basis:
                v = tuple(self.field(x) for x in v)
                if len(v) != d:
                    raise ValidationError(f"filtration vector at step {step} has length {len(v)} != {d}")
                vecs.append(v)
            steps.append((step, tuple(vecs)))
        steps.sort(key=lambda t: t[0])
        object.__setattr__(self, "filtration", tuple(steps))

    @property
    def steps(self) -> list:
        return [s for s, _ in self.filtration]

    def F(self, j: int) -> list:
        """Basis vectors listed for F^j (possibly dependent if input was)."""
        for s, basis in self.filtration:
            if s >= j:
                return [list(v) for v in basis]
        return []

    def phi_matrix(self) -> list:
        return [list(r) for r in self.phi]

    def n_matrix(self) -> list:
        return [list(r) for r in self.monodromy]

    def __repr__(self):
        return f"FilPhiNModule(dim={self.dim}, p={self.field.p}, steps={self.steps})"


def make_module(field: LocalField, phi, monodromy=None, filtration=()) -> FilPhiNModule:
    d = len(phi)
    if monodromy is None:
        monodromy = [[0] * d for _ in range(d)]
    return FilPhiNModule(field, d, phi, monodromy, tuple(filtration))


def tate_object(field: LocalField, n: int) -> FilPhiNModule:
    """K(n) = (K0, p^{-n}, jump at -n)."""
    return make_module(field, [[Fraction(field.p) ** (-n)]], None, [(-n, [[1]])])


def zero_module(field: LocalField) -> FilPhiNModule:
    return FilPhiNModule(field, 0, (), (), ())


def direct_sum(*mods: FilPhiNModule) -> FilPhiNModule:
    field = mods[0].field
    d = sum(m.dim for m in mods)
    zero = field.zero()
    phi = [[zero] * d for _ in range(d)]
    N = [[zero] * d for _ in range(d)]
    off = 0
    offsets = []
    for m in mods:
        for i in range(m.dim):
            for j in range(m.dim):
                phi[off + i][off + j] = m.phi[i][j]
                N[off + i][off + j] = m.monodromy[i][j]
        offsets.append(off)
        off += m.dim
    candidates = sorted({s for m in mods for s in m.steps})

    def F(j):
        vecs = []
        for m, o in zip(mods, offsets):
            for v in m.F(j):
                w = [zero] * d
                w[o : o + m.dim] = v
                vecs.append(w)
        return vecs

    return FilPhiNModule(field, d, phi, N, canonical_filtration(F, candidates, d))


def canonical_filtration(F, candidates: Sequence[int], d: int) -> tuple:
    """Listed steps where the span jumps, each with an independent basis.

    ``F(j)`` returns spanning vectors of F^j; ``candidates`` must contain
    every step at which the filtration can change (right endpoints).
    """
    cands = sorted(set(candidates))
    bases = [la.column_basis(F(j), d) for j in cands]
    out = []
    for k, b in enumerate(bases):
        nxt = len(bases[k + 1]) if k + 1 < len(bases) else 0
        if len(b) > nxt:
            out.append((cands[k], b))
    return tuple(out)


def _span_dim(vecs, d) -> int:
    if not vecs:
        return 0
    return la.rank(la.from_columns(vecs, d, None))


def _contained(small, big, d) -> bool:
    if not small:
        return True
    return _span_dim(list(big) + list(small), d) == _span_dim(big, d)


# -- validation -----------------------------------------------------------


@dataclass
class ValidationReport:
    ok: bool
    violations: list

    def __bool__(self):
        return self.ok


def validate(M: FilPhiNModule) -> ValidationReport:
    """Check the type invariants and collect every violation found."""
    bad = []
    d = M.dim
    field = M.field
    if d == 0:
        if M.filtration:
            bad.append("zero module must have an empty filtration")
        return ValidationReport(not bad, bad)
    for name, mat in (("phi", M.phi), ("monodromy", M.monodromy)):
        if not all(x.in_base() for row in mat for x in row):
            bad.append(f"{name} has entries outside K0")
    try:
        if not la.is_invertible(M.phi_matrix()):
            bad.append("phi is not bijective")
        lhs = la.matmul(M.n_matrix(), M.phi_matrix())
        rhs = la.scale(la.matmul(M.phi_matrix(), M.n_matrix()), field(field.p))
        if not la.equal(lhs, rhs):
            bad.append("N phi != p phi N")
        if not M.filtration:
            bad.append("filtration is empty")
        else:
            low = M.filtration[0][1]
            if _span_dim(low, d) != d:
                bad.append(f"lowest listed step {M.filtration[0][0]} does not span M_K")
            for step, basis in M.filtration:
                if _span_dim(basis, d) != len(basis):
                    bad.append(f"basis at step {step} is linearly dependent")
            for (s0, b0), (s1, b1) in zip(M.filtration, M.filtration[1:]):
                if not _contained(b1, b0, d):
                    bad.append(f"F^{s1} is not contained in F^{s0}")
    except InsufficientPrecision as exc:
        bad.append(f"insufficient precision: {exc}")
    return ValidationReport(not bad, bad)


# -- slopes ----------------------------------------------------------------


@dataclass
class SlopeDecomposition:
    """Eigen-bases M_n = ker(phi - p^n), ordered by descending slope."""

    components: Dict[int, list]
    slopes: list
    basis: list
    S: list
    S_inv: list

    def indices(self, pred) -> list:
        return [k for k, s in enumerate(self.slopes) if pred(s)]

    def dim(self, n: int) -> int:
        return len(self.components.get(n, []))


def _slope_window(phi, phi_inv) -> tuple:
    lo = min(x.valuation() for row in phi for x in row if not x.is_zero())
    hi = -min(x.valuation() for row in phi_inv for x in row if not x.is_zero())
    return int(lo) if lo.denominator == 1 else int(lo) - 1, int(hi) + 1 if hi.denominator != 1 else int(hi)


def slope_decomposition(M: FilPhiNModule) -> SlopeDecomposition:
    if "slopes" in M._cache:
        cached = M._cache["slopes"]
        if isinstance(cached, Exception):
            raise cached
        return cached
    try:
        result = _slope_decomposition(M)
    except NotMixedTatePhi as exc:
        M._cache["slopes"] = exc
        raise
    M._cache["slopes"] = result
    return result


def _slope_decomposition(M: FilPhiNModule) -> SlopeDecomposition:
    d, field = M.dim, M.field
    if d == 0:
        return SlopeDecomposition({}, [], [], [], [])
    phi = M.phi_matrix()
    try:
        phi_inv = la.inverse(phi)
    except NotInvertible:
        raise NotMixedTatePhi("phi is not invertible") from None
    lo, hi = _slope_window(phi, phi_inv)
    components = {}
    total = 0
    for n in range(hi, lo - 1, -1):
        pn = scalar_from_rational(field, Fraction(field.p) ** n)
        shifted = [[x - pn if i == j else x for j, x in enumerate(row)] for i, row in enumerate(phi)]
        ker = la.nullspace(shifted)
        if ker:
            components[n] = ker
            total += len(ker)
    if total > d:
        raise InsufficientPrecision("eigenspaces overlap to working precision")
    if total < d:
        raise NotMixedTatePhi("phi is not diagonalizable with eigenvalues p^n")
    slopes, basis = [], []
    for n in sorted(components, reverse=True):
        for v in components[n]:
            slopes.append(n)
            basis.append(v)
    S = la.from_columns(basis, d, field)
    return SlopeDecomposition(components, slopes, basis, S, la.inverse(S))


def to_slope_coords(M: FilPhiNModule, vecs) -> list:
    sd = slope_decomposition(M)
    return [la.matvec(sd.S_inv, v) for v in vecs]


def monodromy_in_slope_basis(M: FilPhiNModule) -> list:
    sd = slope_decomposition(M)
    if M.dim == 0:
        return []
    return la.matmul(la.matmul(sd.S_inv, M.n_matrix()), sd.S)


def _relevant_range(M: FilPhiNModule) -> range:
    sd = slope_decomposition(M)
    pts = list(M.steps) + list(sd.slopes)
    if not pts:
        return range(0)
    return range(min(pts) - 1, max(pts) + 2)


def projection_block(M: FilPhiNModule, i: int) -> tuple:
    """(F^i in slope coords, rows of slopes >= i, square projection block)."""
    sd = slope_decomposition(M)
    B = to_slope_coords(M, M.F(i))
    rows = sd.indices(lambda s: s >= i)
    P = [[b[r] for b in B] for r in rows]
    return B, rows, P


def is_mixed_tate(M: FilPhiNModule) -> bool:
    """Property (1) and: every F^i projects isomorphically onto M_{>=i} (x) K."""
    try:
        slope_decomposition(M)
    except NotMixedTatePhi:
        return False
    if M.dim == 0:
        return True
    for i in _relevant_range(M):
        B, rows, P = projection_block(M, i)
        if len(B) != len(rows):
            return False
        if rows and not la.is_invertible(P):
            return False
    return True


# -- polygons --------------------------------------------------------------


@dataclass(frozen=True)
class Polygon:
    """Multiset of integers; ``points`` sorted ascending with multiplicity."""

    points: tuple

    @classmethod
    def of(cls, values) -> "Polygon":
        return cls(tuple(sorted(values)))

    def counts(self) -> Counter:
        return Counter(self.points)


def newton_polygon(M: FilPhiNModule) -> Polygon:
    return Polygon.of(slope_decomposition(M).slopes)


def hodge_polygon(M: FilPhiNModule) -> Polygon:
    d = M.dim
    dims = [(s, _span_dim(b, d)) for s, b in M.filtration]
    pts = []
    for k, (s, dk) in enumerate(dims):
        nxt = dims[k + 1][1] if k + 1 < len(dims) else 0
        pts.extend([s] * (dk - nxt))
    return Polygon.of(pts)


# -- weight filtration -------------------------------------------------------


def _intersect_weight(M: FilPhiNModule, j: int, i: int) -> list:
    """F^j cap M_{<=i}, as slope-coordinate vectors."""
    sd = slope_decomposition(M)
    B = to_slope_coords(M, M.F(j))
    if not B:
        return []
    high = sd.indices(lambda s: s > i)
    if not high:
        return la.column_basis(B, M.dim)
    sub = [[b[r] for b in B] for r in high]
    coeffs = la.nullspace(sub)
    out = []
    for c in coeffs:
        v = [sum((b[r] * cj for b, cj in zip(B[1:], c[1:])), B[0][r] * c[0]) for r in range(M.dim)]
        out.append(v)
    return out


def weight_dim(M: FilPhiNModule, j: int, i: int) -> int:
    """dim_K (F^j cap M_{<=i})."""
    sd = slope_decomposition(M)
    B = to_slope_coords(M, M.F(j))
    if not B:
        return 0
    high = sd.indices(lambda s: s > i)
    r = _span_dim(B, M.dim)
    if not high:
        return r
    sub = [[b[rw] for b in B] for rw in high]
    return r - la.rank(sub)


def _submodule_in_slope_basis(M: FilPhiNModule, keep: list, steps_fn, candidates) -> FilPhiNModule:
    field = M.field
    sd = slope_decomposition(M)
    pn = {n: scalar_from_rational(field, Fraction(field.p) ** n) for n in set(sd.slopes)}
    zero = field.zero()
    d = len(keep)
    phi = [[pn[sd.slopes[a]] if a == b else zero for b in keep] for a in keep]
    Ns = monodromy_in_slope_basis(M)
    N = [[Ns[a][b] for b in keep] for a in keep]

    def F(j):
        return [[v[k] for k in keep] for v in steps_fn(j)]

    if d == 0:
        return zero_module(field)
    return FilPhiNModule(field, d, phi, N, canonical_filtration(F, candidates, d))


def weight_sub(M: FilPhiNModule, i: int) -> FilPhiNModule:
    """W_{2i}: (M_{<=i}, phi|, N|, F cap M_{<=i}) in the slope basis of M_{<=i}."""
    sd = slope_decomposition(M)
    keep = sd.indices(lambda s: s <= i)
    return _submodule_in_slope_basis(M, keep, lambda j: _intersect_weight(M, j, i), M.steps)


def gr_weight(M: FilPhiNModule, i: int) -> FilPhiNModule:
    """gr^W_{2i}: (M_i, phi|, F~) with F~ jumping only at step i (a sum of K(-i))."""
    field = M.field
    sd = slope_decomposition(M)
    keep = sd.indices(lambda s: s == i)
    if not keep:
        return zero_module(field)
    d = len(keep)
    phi = [[scalar_from_rational(field, Fraction(field.p) ** i) if a == b else field.zero()
            for b in range(d)] for a in range(d)]
    basis = la.identity(field, d)
    return FilPhiNModule(field, d, phi, la.zeros(field, d, d), ((i, basis),))


def check_weight_exactness(M: FilPhiNModule, i: int) -> bool:
    """0 -> W_{2(i-1)} -> W_{2i} -> gr^W_{2i} -> 0 is exact, strictly on every F^j."""
    sd = slope_decomposition(M)
    di = sd.dim(i)
    below = len(sd.indices(lambda s: s <= i - 1))
    upto = len(sd.indices(lambda s: s <= i))
    if upto != below + di:
        return False
    for j in _relevant_range(M):
        tilde = di if j <= i else 0
        if weight_dim(M, j, i) != weight_dim(M, j, i - 1) + tilde:
            return False
    return True


def mt_criterion(M: FilPhiNModule) -> bool:
    """Existence of a weight filtration by subobjects with Tate gradeds.

    The candidate is forced to be W_{2i} = M_{<=i}; the graded pieces carry
    the quotient filtration, whose dimension at step j is
    dim(F^j cap M_{<=i}) - dim(F^j cap M_{<=i-1}).
    """
    try:
        sd = slope_decomposition(M)
    except NotMixedTatePhi:
        return False
    Ns = monodromy_in_slope_basis(M)
    for a, sa in enumerate(sd.slopes):
        for b, sb in enumerate(sd.slopes):
            # N(W_{2i}) must stay inside W_{2i}
            if sa > sb and not Ns[a][b].is_zero():
                return False
    for i in sorted(set(sd.slopes)):
        if not check_weight_exactness(M, i):
            return False
    return True


# -- morphisms -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Morphism:
    """K0-linear map source -> target given by a target.dim x source.dim matrix."""

    source: FilPhiNModule
    target: FilPhiNModule
    matrix: tuple

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in self.matrix))

    def as_list(self) -> list:
        return [list(r) for r in self.matrix]


def _equivariance_rows(A, B, d1, d2) -> list:
    """Rows of the linear system f A = B f in the unknowns f[a][c] (index a*d1 + c)."""
    rows = []
    field = (A[0][0] if A else B[0][0]).field
    zero = field.zero()
    for a in range(d2):
        for b in range(d1):
            row = [zero] * (d1 * d2)
            for c in range(d1):
                row[a * d1 + c] = row[a * d1 + c] + A[c][b]
            for c in range(d2):
                row[c * d1 + b] = row[c * d1 + b] - B[a][c]
            rows.append(row)
    return rows


def _annihilator(vecs, d, field) -> list:
    if not vecs:
        return [la.unit_vector(field, d, k) for k in range(d)]
    return la.nullspace([list(v) for v in vecs])


def hom_space(M: FilPhiNModule, M2: FilPhiNModule) -> list:
    """Basis of Hom(M, M2): f phi = phi' f, f N = N' f, f(F^i) in F'^i."""
    field = M.field
    d1, d2 = M.dim, M2.dim
    if d1 == 0 or d2 == 0:
        return []
    rows = _equivariance_rows(M.phi_matrix(), M2.phi_matrix(), d1, d2)
    rows += _equivariance_rows(M.n_matrix(), M2.n_matrix(), d1, d2)
    cand = la.nullspace(rows)
    if not cand:
        return []
    # impose the filtration on f = sum_k t_k cand_k
    cond = []
    zero = field.zero()
    for step in M.steps:
        src = M.F(step)
        ann = _annihilator(M2.F(step), d2, field)
        for y in ann:
            for b in src:
                vals = []
                for f in cand:
                    acc = zero
                    for a in range(d2):
                        if y[a].is_zero():
                            continue
                        inner = zero
                        for c in range(d1):
                            inner = inner + f[a * d1 + c] * b[c]
                        acc = acc + y[a] * inner
                    vals.append(acc)
                for t in range(field.e):
                    cond.append([pi_coordinate(v, t) for v in vals])
    if cond:
        ts = la.nullspace(cond)
    else:
        ts = [la.unit_vector(field, len(cand), k) for k in range(len(cand))]
    out = []
    for t in ts:
        flat = [sum((tk * f[i] for tk, f in zip(t[1:], cand[1:])), t[0] * cand[0][i]) for i in range(d1 * d2)]
        mat = [[flat[a * d1 + c] for c in range(d1)] for a in range(d2)]
        out.append(Morphism(M, M2, mat))
    return out


def is_morphism(f: Morphism) -> bool:
    M, M2 = f.source, f.target
    A = f.as_list()
    if not la.equal(la.matmul(A, M.phi_matrix()), la.matmul(M2.phi_matrix(), A)):
        return False
    if not la.equal(la.matmul(A, M.n_matrix()), la.matmul(M2.n_matrix(), A)):
        return False
    for step in M.steps:
        img = [la.matvec(A, v) for v in M.F(step)]
        if not _contained(img, M2.F(step), M2.dim):
            return False
    return True


def _left_inverse_rows(cols, d) -> tuple:
    """Rows picking coordinates on span(cols): (row indices, inverse of that block)."""
    Kt = [list(c) for c in cols]  # r x d
    rows = la.pivot_columns(Kt)
    blockm = [[c[r] for c in cols] for r in rows]
    return rows, la.inverse(blockm)


def _coords_in(cols, rows, Linv, v) -> list:
    return la.matvec(Linv, [v[r] for r in rows])


def kernel(f: Morphism) -> FilPhiNModule:
    return kernel_with_inclusion(f)[0]


def kernel_with_inclusion(f: Morphism) -> tuple:
    """(ker f, basis of ker f as vectors of the source)."""
    M = f.source
    field = M.field
    A = f.as_list()
    if M.dim == 0:
        return zero_module(field), []
    if f.target.dim == 0:
        ker = [la.unit_vector(field, M.dim, k) for k in range(M.dim)]
    else:
        ker = la.nullspace(A)
    r = len(ker)
    if r == 0:
        return zero_module(field), []
    rows, Linv = _left_inverse_rows(ker, M.dim)
    phi_k = [_coords_in(ker, rows, Linv, la.matvec(M.phi_matrix(), k)) for k in ker]
    N_k = [_coords_in(ker, rows, Linv, la.matvec(M.n_matrix(), k)) for k in ker]

    def F(j):
        B = M.F(j)
        if not B:
            return []
        if f.target.dim == 0:
            cs = [la.unit_vector(field, len(B), k) for k in range(len(B))]
        else:
            img = la.from_columns([la.matvec(A, b) for b in B], f.target.dim, field)
            cs = la.nullspace(img)
        vecs = []
        for c in cs:
            v = [sum((b[i] * ci for b, ci in zip(B[1:], c[1:])), B[0][i] * c[0]) for i in range(M.dim)]
            vecs.append(_coords_in(ker, rows, Linv, v))
        return vecs

    K = FilPhiNModule(field, r, la.transpose(phi_k), la.transpose(N_k),
                      canonical_filtration(F, M.steps, r))
    return K, ker


def cokernel(f: Morphism) -> FilPhiNModule:
    return cokernel_with_projection(f)[0]


def cokernel_with_projection(f: Morphism) -> tuple:
    """(coker f, matrix of the quotient map from the target)."""
    M2 = f.target
    field = M2.field
    d2 = M2.dim
    if d2 == 0:
        return zero_module(field), []
    A = f.as_list()
    image = la.column_basis(la.columns(A), d2) if f.source.dim else []
    full = list(image)
    comp = []
    for k in range(d2):
        e_k = la.unit_vector(field, d2, k)
        if _span_dim(full + [e_k], d2) > len(full):
            full.append(e_k)
            comp.append(e_k)
    q = len(comp)
    if q == 0:
        return zero_module(field), []
    Cinv = la.inverse(la.from_columns(full, d2, field))
    Q = Cinv[len(image):]
    phi_q = la.matmul(Q, la.matmul(M2.phi_matrix(), la.from_columns(comp, d2, field)))
    N_q = la.matmul(Q, la.matmul(M2.n_matrix(), la.from_columns(comp, d2, field)))

    def F(j):
        return [la.matvec(Q, v) for v in M2.F(j)]

    C = FilPhiNModule(field, q, phi_q, N_q, canonical_filtration(F, M2.steps, q))
    return C, Q


# -- tensor constructions --------------------------------------------------------


def tensor(M: FilPhiNModule, M2: FilPhiNModule) -> FilPhiNModule:
    field = M.field
    d = M.dim * M2.dim
    if d == 0:
        return zero_module(field)
    phi = la.kron(M.phi_matrix(), M2.phi_matrix())
    I1, I2 = la.identity(field, M.dim), la.identity(field, M2.dim)
    N = la.add(la.kron(M.n_matrix(), I2), la.kron(I1, M2.n_matrix()))

    def kv(u, w):
        return [a * b for a in u for b in w]

    def F(i):
        vecs = []
        for a in M.steps:
            for u in M.F(a):
                for w in M2.F(i - a):
                    vecs.append(kv(u, w))
        return vecs

    cands = [a + b for a in M.steps for b in M2.steps]
    return FilPhiNModule(field, d, phi, N, canonical_filtration(F, cands, d))


def dual(M: FilPhiNModule) -> FilPhiNModule:
    """phi^v = (phi^-1)^T, N^v = -N^T, F^i(M^v) = (F^{1-i})^perp."""
    field = M.field
    d = M.dim
    if d == 0:
        return zero_module(field)
    phi = la.transpose(la.inverse(M.phi_matrix()))
    N = [[-x for x in row] for row in la.transpose(M.n_matrix())]

    def F(i):
        return _annihilator(M.F(1 - i), d, field) if M.F(1 - i) else [la.unit_vector(field, d, k) for k in range(d)]

    cands = [-s for s in M.steps]
    return FilPhiNModule(field, d, phi, N, canonical_filtration(F, cands, d))


def tate_twist(M: FilPhiNModule, n: int) -> FilPhiNModule:
    """M (x) K(n): phi scaled by p^{-n}, filtration steps shifted by -n."""
    field = M.field
    c = scalar_from_rational(field, Fraction(field.p) ** (-n))
    phi = la.scale(M.phi_matrix(), c)
    filt = [(s - n, [list(v) for v in b]) for s, b in M.filtration]
    return FilPhiNModule(field, M.dim, phi, M.n_matrix(), tuple(filt))


# -- comparisons -------------------------------------------------------------------


def same_filtration(M: FilPhiNModule, M2: FilPhiNModule) -> bool:
    d = M.dim
    for j in sorted(set(M.steps) | set(M2.steps)):
        a, b = M.F(j), M2.F(j)
        if not (_contained(a, b, d) and _contained(b, a, d)):
            return False
    return True


def modules_equal(M: FilPhiNModule, M2: FilPhiNModule) -> bool:
    """Same matrices and the same subspaces F^j, to working precision."""
    if M.dim != M2.dim or not M.field.same_ring(M2.field):
        return False
    if M.dim == 0:
        return True
    return (la.equal(M.phi_matrix(), M2.phi_matrix())
            and la.equal(M.n_matrix(), M2.n_matrix())
            and same_filtration(M, M2))


def find_isomorphism(M: FilPhiNModule, M2: FilPhiNModule) -> Optional[Morphism]:
    """An invertible element of Hom(M, M2), or None.

    Tries the basis elements and a few fixed integer combinations; for the
    mixed Tate modules handled here the generic combination is invertible
    whenever an isomorphism exists.
    """
    if M.dim != M2.dim:
        return None
    if M.dim == 0:
        return Morphism(M, M2, ())
    basis = hom_space(M, M2)
    if not basis:
        return None
    trials = [[1 if i == k else 0 for i in range(len(basis))] for k in range(len(basis))]
    trials += [[(i + 1) ** s for i in range(len(basis))] for s in (1, 2, 3)]
    undecided = None
    for coeffs in trials:
        mats = [b.as_list() for b in basis]
        comb = [[sum((c * m[r][s] for c, m in zip(coeffs[1:], mats[1:])), coeffs[0] * mats[0][r][s])
                 for s in range(M.dim)] for r in range(M.dim)]
        try:
            if la.is_invertible(comb):
                return Morphism(M, M2, comb)
        except InsufficientPrecision as exc:
            undecided = exc
    if undecided is not None:
        raise undecided
    return None


def is_isomorphic(M: FilPhiNModule, M2: FilPhiNModule) -> bool:
    return find_isomorphism(M, M2) is not None


def change_basis(M: FilPhiNModule, P) -> FilPhiNModule:
    """The same module written in the basis given by the columns of P (over K0)."""
    Pinv = la.inverse(P)
    phi = la.matmul(Pinv, la.matmul(M.phi_matrix(), P))
    N = la.matmul(Pinv, la.matmul(M.n_matrix(), P))
    filt = [(s, [la.matvec(Pinv, list(v)) for v in b]) for s, b in M.filtration]
    return FilPhiNModule(M.field, M.dim, phi, N, tuple(filt))


def _random_base(field: LocalField, rng, lo: int = 0, hi: int = 2) -> Scalar:
    x = rng.randrange(field.p ** field.precision) * Fraction(field.p) ** rng.randint(lo, hi)
    return scalar_from_rational(field, x)


def random_mixed_tate(field: LocalField, rng, max_dim: int = 4, slopes=None,
                      monodromy: bool = False, scramble: bool = True) -> FilPhiNModule:
    """Random mixed Tate module, built in a slope basis and then rewritten.

    F^i = eta(M_{>=i}) for a random unipotent eta; with ``monodromy`` a
    random N lowering slope by one is added (nonzero when two adjacent
    slopes occur).
    """
    if slopes is None:
        d = rng.randint(1, max_dim)
        slopes = [rng.randint(-3, 1) for _ in range(d)]
    slopes = sorted(slopes, reverse=True)
    d = len(slopes)
    zero, one = field.zero(), field.one()
    eta = [[one if a == b else (random_scalar(field, rng, 0, 2) if slopes[a] < slopes[b] else zero)
            for b in range(d)] for a in range(d)]
    N = [[zero] * d for _ in range(d)]
    if monodromy:
        for a in range(d):
            for b in range(d):
                if slopes[a] == slopes[b] - 1:
                    N[a][b] = _random_base(field, rng)
    phi = [[scalar_from_rational(field, Fraction(field.p) ** slopes[a]) if a == b else zero
            for b in range(d)] for a in range(d)]

    def F(i):
        return [[eta[r][b] for r in range(d)] for b in range(d) if slopes[b] >= i]

    M = FilPhiNModule(field, d, phi, N, canonical_filtration(F, slopes, d))
    if not scramble:
        return M
    U = [[one if a == b else (field(rng.randint(-2, 2)) if a < b else zero) for b in range(d)] for a in range(d)]
    L = [[one if a == b else (field(rng.randint(-2, 2)) if a > b else zero) for b in range(d)] for a in range(d)]
    perm = list(range(d))
    rng.shuffle(perm)
    P = la.matmul(U, L)
    P = [P[k] for k in perm]
    return change_basis(M, P)

