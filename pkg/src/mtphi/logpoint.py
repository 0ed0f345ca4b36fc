"""The logarithmic points eta and eta_st, extension classes and Kummer modules."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import filmod as fm
from . import linalg as la
from .errors import NotMixedTate, ValidationError, WrongShape
from .filmod import FilPhiNModule, Morphism
from .padic import LocalField, Scalar, branch_log, scalar_from_rational, unit_log


class KstPoly:
    """Polynomial in X = log_st(p) with coefficients in K (index = power of X)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: LocalField, coeffs):
        coeffs = [field(c) for c in coeffs] or [field.zero()]
        while len(coeffs) > 1 and coeffs[-1].is_zero():
            coeffs.pop()
        self.field = field
        self.coeffs = tuple(coeffs)

    @classmethod
    def constant(cls, field: LocalField, x) -> "KstPoly":
        return cls(field, [x])

    @classmethod
    def X(cls, field: LocalField) -> "KstPoly":
        return cls(field, [field.zero(), field.one()])

    @property
    def degree(self) -> int:
        return 0 if self.is_zero() else len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def is_constant(self) -> bool:
        return all(c.is_zero() for c in self.coeffs[1:])

    def _lift(self, other) -> "KstPoly":
        if isinstance(other, KstPoly):
            return other
        return KstPoly(self.field, [other])

    def __add__(self, other):
        o = self._lift(other)
        n = max(len(self.coeffs), len(o.coeffs))
        z = self.field.zero()
        a = list(self.coeffs) + [z] * (n - len(self.coeffs))
        b = list(o.coeffs) + [z] * (n - len(o.coeffs))
        return KstPoly(self.field, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return KstPoly(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, KstPoly):
            o = self.field(other) if not isinstance(other, Scalar) else other
            return KstPoly(self.field, [c * o for c in self.coeffs])
        z = self.field.zero()
        out = [z] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return KstPoly(self.field, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return KstPoly(self.field, [c / other for c in self.coeffs])

    def evaluate(self, c) -> Scalar:
        c = self.field(c)
        acc = self.coeffs[-1]
        for a in reversed(self.coeffs[:-1]):
            acc = acc * c + a
        return acc

    def __eq__(self, other):
        o = self._lift(other)
        n = max(len(self.coeffs), len(o.coeffs))
        z = self.field.zero()
        a = list(self.coeffs) + [z] * (n - len(self.coeffs))
        b = list(o.coeffs) + [z] * (n - len(o.coeffs))
        return all(x == y for x, y in zip(a, b))

    __hash__ = None

    def __repr__(self):
        return "KstPoly(" + ", ".join(repr(c) for c in self.coeffs) + ")"


def _poly_matmul(A, B):
    n, k, m = len(A), len(B), len(B[0]) if B else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = A[i][0] * B[0][j]
            for t in range(1, k):
                if not A[i][t].is_zero():
                    acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(row)
    return out


def _nilpotent_exp(A, one, zero):
    """sum A^k / k! for a nilpotent square matrix with ring entries."""
    n = len(A)
    ident = [[one if i == j else zero for j in range(n)] for i in range(n)]
    total = [row[:] for row in ident]
    power = ident
    for k in range(1, n + 1):
        power = _poly_matmul(power, A)
        if all(x.is_zero() for row in power for x in row):
            break
        power = [[x / k for x in row] for row in power]
        total = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(total, power)]
    return total


@dataclass(frozen=True, eq=False)
class EtaMatrix:
    """Unipotent matrix in the slope basis (descending slope order).

    ``slope_basis`` holds the module-basis coordinates of the slope vectors
    (the columns of S) so the matrix can be carried back to the module basis.
    """

    field: LocalField
    basis_slopes: tuple
    entries: tuple
    slope_basis: Optional[tuple] = None

    def __post_init__(self):
        rows = tuple(tuple(x if isinstance(x, KstPoly) else KstPoly.constant(self.field, x) for x in r)
                     for r in self.entries)
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "basis_slopes", tuple(self.basis_slopes))

    @property
    def size(self) -> int:
        return len(self.basis_slopes)

    def is_constant(self) -> bool:
        return all(x.is_constant() for r in self.entries for x in r)

    def constant_matrix(self) -> list:
        if not self.is_constant():
            raise ValidationError("matrix depends on X")
        return [[x.coeffs[0] for x in r] for r in self.entries]

    def evaluate(self, c) -> list:
        return [[x.evaluate(c) for x in r] for r in self.entries]

    def module_matrix(self) -> list:
        """S eta S^-1: the same automorphism in the module's own basis."""
        if self.slope_basis is None:
            raise ValidationError("no slope basis recorded")
        S = la.from_columns([list(v) for v in self.slope_basis], self.size, self.field)
        return la.matmul(la.matmul(S, self.constant_matrix()), la.inverse(S))

    def entry(self, i: int, j: int) -> KstPoly:
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, EtaMatrix) or self.basis_slopes != other.basis_slopes:
            return False
        return all(a == b for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb))

    __hash__ = None


def _require_mixed_tate(M: FilPhiNModule) -> fm.SlopeDecomposition:
    if not fm.is_mixed_tate(M):
        raise NotMixedTate("module is not mixed Tate")
    return fm.slope_decomposition(M)


def _force_unipotent(field, slopes, cols):
    """Replace the blocks fixed by unipotence (target slope >= source slope) by 0 / 1."""
    d = len(slopes)
    zero, one = field.zero(), field.one()
    out = [[cols[b][a] for b in range(d)] for a in range(d)]
    for a in range(d):
        for b in range(d):
            if slopes[a] >= slopes[b]:
                out[a][b] = one if a == b else zero
    return out


def eta(M: FilPhiNModule) -> EtaMatrix:
    """eta(v) = pi_i^{-1}(v) for v in M_i, pi_i : F^i -> M_{>=i} (x) K the projection."""
    sd = _require_mixed_tate(M)
    field = M.field
    d = M.dim
    cols = [None] * d
    for i in sorted(set(sd.slopes)):
        B, rows, P = fm.projection_block(M, i)
        Pinv = la.inverse(P)
        for k in sd.indices(lambda s: s == i):
            u = [row[rows.index(k)] for row in Pinv]
            cols[k] = [sum((b[r] * c for b, c in zip(B[1:], u[1:])), B[0][r] * u[0]) for r in range(d)]
    return EtaMatrix(field, sd.slopes, _force_unipotent(field, sd.slopes, cols), tuple(map(tuple, sd.basis)))


def eta_via_deligne(M: FilPhiNModule) -> EtaMatrix:
    """eta = a_Fbar^{-1} d a_Fbar with d = a_Fbar a_F^{-1}.

    In slope coordinates a_Fbar is the identity and a_F sends the pieces
    F^i cap W_{2i} onto Gr^W_{2i} = M_i, so eta = L G^{-1} where the columns
    of L span the pieces and G is the block diagonal of their projections.
    """
    sd = _require_mixed_tate(M)
    field = M.field
    d = M.dim
    cols = [None] * d
    for i in sorted(set(sd.slopes)):
        W = fm._intersect_weight(M, i, i)
        idx = sd.indices(lambda s: s == i)
        if len(W) != len(idx):
            raise NotMixedTate(f"F^{i} cap W_{2 * i} has the wrong dimension")
        G = [[w[r] for w in W] for r in idx]
        Ginv = la.inverse(G)
        for pos, k in enumerate(idx):
            u = [row[pos] for row in Ginv]
            cols[k] = [sum((w[r] * c for w, c in zip(W[1:], u[1:])), W[0][r] * u[0]) for r in range(d)]
    return EtaMatrix(field, sd.slopes, _force_unipotent(field, sd.slopes, cols), tuple(map(tuple, sd.basis)))


def crys_hodge_bases(M: FilPhiNModule) -> tuple:
    """(crystalline basis, Hodge basis) in module coordinates.

    v^crys_j is the j-th slope vector; v^Hodge_j is the element of
    F^i cap W_{2i} (i its slope) projecting onto it in M_i.
    """
    sd = _require_mixed_tate(M)
    S = sd.S
    hodge = [None] * M.dim
    for i in sorted(set(sd.slopes)):
        W = fm._intersect_weight(M, i, i)
        idx = sd.indices(lambda s: s == i)
        G = [[w[r] for w in W] for r in idx]
        Ginv = la.inverse(G)
        for pos, k in enumerate(idx):
            u = [row[pos] for row in Ginv]
            v = [sum((w[r] * c for w, c in zip(W[1:], u[1:])), W[0][r] * u[0]) for r in range(M.dim)]
            hodge[k] = la.matvec(S, v)
    return [list(v) for v in sd.basis], hodge


def crys_hodge_pairing(M: FilPhiNModule) -> list:
    """Matrix of v_i^{crys,dual}(v_j^{Hodge})."""
    crys, hodge = crys_hodge_bases(M)
    C = la.from_columns(crys, M.dim, M.field)
    dual_rows = la.inverse(C)
    return [[la._dot(row, h) for h in hodge] for row in dual_rows]


def log_st(field: LocalField, x) -> KstPoly:
    """nu(x) X + log(x^e / p^{e nu(x)}) / e."""
    x = field(x)
    v = x.valuation()
    m = v * field.e
    unit = x ** field.e / scalar_from_rational(field, Fraction(field.p) ** int(m))
    return KstPoly(field, [unit_log(field, unit) / field.e, scalar_from_rational(field, v)])


def eta_st(M: FilPhiNModule, x=None) -> EtaMatrix:
    """exp(((log_c x - log_st x) / nu(x)) N) eta(M), with c = M.field.branch and x = p by default."""
    field = M.field
    base = eta(M)
    if x is None:
        x = field.p
    x = field(x)
    shift = (KstPoly.constant(field, branch_log(field, x)) - log_st(field, x)) / x.valuation()
    Ns = fm.monodromy_in_slope_basis(M)
    A = [[shift * n for n in row] for row in Ns]
    zero = KstPoly.constant(field, field.zero())
    one = KstPoly.constant(field, field.one())
    E = _nilpotent_exp(A, one, zero) if M.dim else []
    entries = _poly_matmul(E, [list(r) for r in base.entries]) if M.dim else []
    return EtaMatrix(field, base.basis_slopes, entries, base.slope_basis)


def _scalar_nilpotent_exp(A, field):
    return _nilpotent_exp(A, field.one(), field.zero())


def transport_filtration(M: FilPhiNModule, c, c_new) -> FilPhiNModule:
    """Filtration for branch c_new from one written for branch c: F' = exp((c - c') N) F."""
    field = M.field
    if c is None:
        c = field.branch
    delta = field(c) - field(c_new)
    A = la.scale(M.n_matrix(), delta) if M.dim else []
    E = _scalar_nilpotent_exp(A, field) if M.dim else []
    filt = [(s, [la.matvec(E, list(v)) for v in b]) for s, b in M.filtration]
    new_field = field.with_branch(c_new)
    return FilPhiNModule(new_field, M.dim, M.phi_matrix(), M.n_matrix(), tuple(filt))


# -- extensions of K(0) by K(n) -------------------------------------------------


@dataclass
class ExtensionData:
    """Slope data of an extension 0 -> K(n) -> E -> K(0) -> 0."""

    decomposition: fm.SlopeDecomposition
    i_n: int          # slope-basis index of the sub K(n)
    i_0: int          # slope-basis index of the quotient
    iota: list        # iota(1) in module coordinates
    section: list     # v(1) in module coordinates
    proj: list        # pi as a row vector
    alpha: Scalar     # iota(1) = alpha * (slope -n vector)
    beta: Scalar      # pi(slope 0 vector)


def extension_data(E: FilPhiNModule, n: int, iota=None, proj=None) -> ExtensionData:
    if n < 1:
        raise WrongShape("n must be a positive integer")
    if E.dim != 2:
        raise WrongShape("an extension of K(0) by K(n) has dimension 2")
    try:
        sd = fm.slope_decomposition(E)
    except NotMixedTate:
        raise WrongShape("phi is not of mixed Tate type") from None
    if sorted(sd.slopes) != [-n, 0]:
        raise WrongShape(f"slopes are {sorted(sd.slopes)}, expected [{-n}, 0]")
    i_0, i_n = sd.slopes.index(0), sd.slopes.index(-n)
    field = E.field
    s_n, s_0 = sd.basis[i_n], sd.basis[i_0]
    default_proj = list(sd.S_inv[i_0])
    if iota is None:
        alpha = field.one()
        iota = list(s_n)
    else:
        iota = [field(x) for x in iota]
        coords = la.matvec(sd.S_inv, iota)
        if not coords[i_0].is_zero():
            raise ValidationError("iota(1) must lie in the slope -n line")
        alpha = coords[i_n]
    if proj is None:
        beta = field.one()
        proj = default_proj
    else:
        proj = [field(x) for x in proj]
        beta = la._dot(proj, s_0)
    section = [x / beta for x in s_0]
    return ExtensionData(sd, i_n, i_0, iota, section, proj, alpha, beta)


def ext_class(E: FilPhiNModule, n: int, iota=None, proj=None) -> Scalar:
    """a = f(eta(E)(v(1))) with f, v the phi-module sections of iota and pi."""
    data = extension_data(E, n, iota, proj)
    eta_s = eta(E).constant_matrix()
    return eta_s[data.i_n][data.i_0] / (data.alpha * data.beta)


def ext_build(a, n: int, field: LocalField = None) -> FilPhiNModule:
    """Basis (e_n, e_0), phi = diag(p^-n, 1), N = 0, F^0 = K<a e_n + e_0>."""
    if field is None:
        if not isinstance(a, Scalar):
            raise ValidationError("a rational class needs a field")
        field = a.field
    if n < 1:
        raise WrongShape("n must be a positive integer")
    a = field(a)
    p = Fraction(field.p)
    phi = [[p ** (-n), 0], [0, 1]]
    filt = [(-n, [[1, 0], [0, 1]]), (0, [[a, field.one()]])]
    return fm.make_module(field, phi, None, filt)


def ext_scale(E: FilPhiNModule, n: int, lam) -> FilPhiNModule:
    """Multiply the class by lam by rescaling the K(n)-component of the F^0 line."""
    data = extension_data(E, n)
    field = E.field
    lam = field(lam)
    sd = data.decomposition

    def rescale(v):
        c = la.matvec(sd.S_inv, list(v))
        c[data.i_n] = c[data.i_n] * lam
        return la.matvec(sd.S, c)

    filt = []
    for s, b in E.filtration:
        if -n < s <= 0:
            filt.append((s, [rescale(v) for v in b]))
        else:
            filt.append((s, [list(v) for v in b]))
    return FilPhiNModule(field, 2, E.phi_matrix(), E.n_matrix(), tuple(filt))


def baer_sum(E: FilPhiNModule, E2: FilPhiNModule, n: int) -> FilPhiNModule:
    """Pull back along the diagonal of K(0), push out along the sum of K(n).

    The result is written in the basis (iota(1), v(1)) inherited from the
    summands, the same shape as :func:`ext_build`.
    """
    d1 = extension_data(E, n)
    d2 = extension_data(E2, n)
    field = E.field
    D = fm.direct_sum(E, E2)
    K0, Kn = fm.tate_object(field, 0), fm.tate_object(field, n)
    g = Morphism(D, K0, [d1.proj + [-x for x in d2.proj]])
    P, ker = fm.kernel_with_inclusion(g)
    Kmat = la.from_columns(ker, 4, field)

    def in_P(vec):
        return la.solve(Kmat, vec)

    zero2 = [field.zero(), field.zero()]
    anti = in_P(list(d1.iota) + [-x for x in d2.iota])
    h = Morphism(Kn, P, [[x] for x in anti])
    C, Q = fm.cokernel_with_projection(h)
    iota_c = la.matvec(Q, in_P(list(d1.iota) + zero2))
    sect_c = la.matvec(Q, in_P(list(d1.section) + list(d2.section)))
    return fm.change_basis(C, la.from_columns([iota_c, sect_c], 2, field))


def ext_negate(E: FilPhiNModule, n: int) -> FilPhiNModule:
    """The inverse extension class: iota replaced by -iota."""
    data = extension_data(E, n)
    field = E.field
    P = la.from_columns([[-x for x in data.iota], data.section], 2, field)
    return fm.change_basis(E, P)


def split_extension(field: LocalField, n: int) -> FilPhiNModule:
    return ext_build(field.zero(), n, field)


# -- Kummer modules ----------------------------------------------------------


def kummer_module(q, field: LocalField) -> FilPhiNModule:
    """Basis (e_0, e_1), phi e_i = p^-i e_i, N e_0 = -nu(q) e_1, F^0 = K<log_c(q) e_1 + e_0>."""
    q = field(q)
    v = q.valuation()
    logq = branch_log(field, q)
    phi = [[1, 0], [0, Fraction(1, field.p)]]
    N = [[0, 0], [-v, 0]]
    filt = [(-1, [[1, 0], [0, 1]]), (0, [[field.one(), logq]])]
    return fm.make_module(field, phi, N, filt)


def is_crystalline(M: FilPhiNModule) -> bool:
    return all(x.is_zero() for row in M.monodromy for x in row)
