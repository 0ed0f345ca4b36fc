"""Capped absolute precision arithmetic in Q_p and in a totally ramified K/Q_p.

An element of K = Q_p[x]/(E(x)) is stored through the exact rational
coordinates of a representative on the basis 1, pi, ..., pi^(e-1) together
with an absolute precision ``prec`` measured with nu_K(p) = 1.  The
representative is reduced modulo {nu_K >= prec} after every operation, so
the numbers stay small and no digit beyond the precision is ever claimed.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

from .errors import (
    InsufficientPrecision,
    NotAUnit,
    ValidationError,
    ZeroValuation,
)

Rational = Union[int, Fraction]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def vp_int(n: int, p: int) -> int:
    if n == 0:
        raise ZeroValuation("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(q: Rational, p: int) -> int:
    q = Fraction(q)
    return vp_int(q.numerator, p) - vp_int(q.denominator, p)


def ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def reduce_mod(c: Fraction, p: int, m: int) -> Fraction:
    """Canonical representative of ``c`` modulo p^m: p^v * k with 0 <= k < p^(m-v)."""
    if c == 0:
        return Fraction(0)
    v = vp(c, p)
    if v >= m:
        return Fraction(0)
    num, den = c.numerator, c.denominator
    if v > 0:
        num //= p**v
    elif v < 0:
        den //= p ** (-v)
    mod = p ** (m - v)
    k = (num * pow(den, -1, mod)) % mod
    if k == 0:
        return Fraction(0)
    return Fraction(k * p**v) if v >= 0 else Fraction(k, p ** (-v))


def parse_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise ValidationError(f"not a rational: {x!r}")


@dataclass(frozen=True)
class LocalField:
    """K = Q_p[pi]/(E) with K0 = Q_p, a precision cap and a log branch.

    ``eisenstein`` lists the coefficients of the monic Eisenstein polynomial
    in ascending order, leading 1 included; empty means K = Q_p.  ``branch``
    is the value c = log(p) fixing the extension of log to K^x.
    """

    p: int
    precision: int
    eisenstein: tuple = ()
    branch: object = Fraction(0)

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValidationError(f"p = {self.p!r} is not prime")
        if not isinstance(self.precision, int) or self.precision < 1:
            raise ValidationError("precision must be a positive integer")
        eis = tuple(parse_rational(a) for a in self.eisenstein)
        object.__setattr__(self, "eisenstein", eis)
        if eis:
            if len(eis) < 2 or eis[-1] != 1:
                raise ValidationError("Eisenstein polynomial must be monic of degree >= 1")
            if eis[0] == 0 or vp(eis[0], self.p) != 1:
                raise ValidationError("Eisenstein constant term must have p-valuation 1")
            for a in eis[1:-1]:
                if a != 0 and vp(a, self.p) < 1:
                    raise ValidationError("Eisenstein middle coefficients must have p-valuation >= 1")
        if not isinstance(self.branch, Scalar):
            object.__setattr__(self, "branch", parse_rational(self.branch))
        elif not self.branch.in_base():
            raise ValidationError("branch must lie in K0 = Q_p")

    @property
    def e(self) -> int:
        return len(self.eisenstein) - 1 if self.eisenstein else 1

    @cached_property
    def _poly(self) -> tuple:
        # E(x) ascending; for K = Q_p the uniformizer is p itself.
        return self.eisenstein if self.eisenstein else (Fraction(-self.p), Fraction(1))

    @cached_property
    def _high_powers(self) -> tuple:
        """Coordinates of pi^k for e <= k <= 2e-2."""
        e = self.e
        low = [-a for a in self._poly[:e]]
        table = [tuple(low)]
        for _ in range(e, 2 * e - 2):
            prev = table[-1]
            # multiply by pi: shift up, fold the top coordinate back
            shifted = [Fraction(0)] + list(prev[:-1])
            top = prev[-1]
            table.append(tuple(s + top * l for s, l in zip(shifted, low)))
        return tuple(table)

    def same_ring(self, other: "LocalField") -> bool:
        return self.p == other.p and self.eisenstein == other.eisenstein

    def with_precision(self, precision: int) -> "LocalField":
        return replace(self, precision=precision)

    def with_branch(self, branch) -> "LocalField":
        return replace(self, branch=branch)

    def branch_scalar(self) -> "Scalar":
        if isinstance(self.branch, Scalar):
            return Scalar(self, self.branch.coeffs, self.branch.prec)
        return scalar_from_rational(self, self.branch)

    def zero(self) -> "Scalar":
        return Scalar(self, (0,) * self.e, self.precision)

    def one(self) -> "Scalar":
        return scalar_from_rational(self, 1)

    def uniformizer(self) -> "Scalar":
        if self.e == 1:
            return scalar_from_rational(self, -self._poly[0])
        coords = [0] * self.e
        coords[1] = 1
        return Scalar(self, coords, self.precision)

    def __call__(self, q) -> "Scalar":
        if isinstance(q, Scalar):
            return q
        return scalar_from_rational(self, parse_rational(q))


def _poly_mul(field: LocalField, a: Sequence[Fraction], b: Sequence[Fraction]) -> list:
    e = field.e
    if e == 1:
        return [a[0] * b[0]]
    prod = [Fraction(0)] * (2 * e - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                prod[i + j] += x * y
    out = prod[:e]
    for k, row in zip(range(e, 2 * e - 1), field._high_powers):
        c = prod[k]
        if c:
            for i in range(e):
                out[i] += c * row[i]
    return out


def _solve_exact(rows: list, rhs: list) -> list:
    """Gauss-Jordan over Q; ``rows`` is square and invertible."""
    n = len(rows)
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[r][n] for r in range(n)]


class Scalar:
    """Element of K known modulo {nu_K >= prec}."""

    __slots__ = ("field", "coeffs", "prec")

    def __init__(self, field: LocalField, coeffs: Iterable[Rational], prec: Rational):
        e = field.e
        coeffs = [c if type(c) is Fraction else Fraction(c) for c in coeffs]
        if len(coeffs) != e:
            raise ValidationError(f"expected {e} pi-coordinates, got {len(coeffs)}")
        if type(prec) is not Fraction:
            prec = Fraction(prec)
        if prec > field.precision:
            prec = Fraction(field.precision)
        if prec.denominator != 1 and e > 1:
            prec = Fraction(ceil_frac(prec * e), e)
        elif prec.denominator != 1:
            prec = Fraction(ceil_frac(prec))
        p = field.p
        self.field = field
        self.prec = prec
        self.coeffs = tuple(
            reduce_mod(c, p, ceil_frac(prec - Fraction(j, e))) for j, c in enumerate(coeffs)
        )

    # -- structure -----------------------------------------------------
    def _rep_val(self):
        p, e = self.field.p, self.field.e
        best = None
        for j, c in enumerate(self.coeffs):
            if c != 0:
                v = vp(c, p) + Fraction(j, e)
                if best is None or v < best:
                    best = v
        return best

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def valuation(self) -> Fraction:
        v = self._rep_val()
        if v is None:
            raise ZeroValuation("element is zero to working precision")
        return v

    def _val_or_prec(self) -> Fraction:
        v = self._rep_val()
        return self.prec if v is None else v

    def in_base(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def relative_precision(self) -> Fraction:
        return self.prec - self.valuation()

    def with_prec(self, prec: Rational) -> "Scalar":
        return Scalar(self.field, self.coeffs, min(Fraction(prec), self.prec))

    def lift_to(self, field: LocalField) -> "Scalar":
        """Same representative viewed in ``field`` at that field's full precision."""
        return Scalar(field, self.coeffs, field.precision)

    def residue(self) -> int:
        """Image in F_p of an integral element."""
        if self._val_or_prec() < 0:
            raise NotAUnit("element is not integral")
        c = self.coeffs[0]
        if c == 0:
            return 0
        p = self.field.p
        return (c.numerator * pow(c.denominator, -1, p)) % p

    def rational(self) -> Fraction:
        """Rational representative of an element of K0."""
        if not self.in_base():
            raise ValidationError("element does not lie in K0")
        return self.coeffs[0]

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if not self.field.same_ring(other.field):
                raise ValidationError("scalars from different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return scalar_from_rational(self.field, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prec = min(self.prec, o.prec)
        return Scalar(self.field, [a + b for a, b in zip(self.coeffs, o.coeffs)], prec)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.field, [-a for a in self.coeffs], self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prec = min(self.prec, o.prec)
        return Scalar(self.field, [a - b for a, b in zip(self.coeffs, o.coeffs)], prec)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prec = min(self._val_or_prec() + o.prec, o._val_or_prec() + self.prec)
        if self.is_zero() or o.is_zero():
            return Scalar(self.field, (0,) * self.field.e, prec)
        if self.field.e == 1:
            return Scalar(self.field, (self.coeffs[0] * o.coeffs[0],), prec)
        return Scalar(self.field, _poly_mul(self.field, self.coeffs, o.coeffs), prec)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise InsufficientPrecision("cannot invert an element that is zero to precision")
        v = self.valuation()
        prec = self.prec - 2 * v
        if prec <= -v:
            raise InsufficientPrecision("leading digit of the inverse is undetermined")
        e = self.field.e
        if e == 1:
            return Scalar(self.field, [1 / self.coeffs[0]], prec)
        # columns: self * pi^j
        cols = []
        col = list(self.coeffs)
        pi = [Fraction(0)] * e
        pi[1] = Fraction(1)
        for _ in range(e):
            cols.append(col)
            col = _poly_mul(self.field, col, pi)
        rows = [[cols[j][i] for j in range(e)] for i in range(e)]
        sol = _solve_exact(rows, [Fraction(1)] + [Fraction(0)] * (e - 1))
        return Scalar(self.field, sol, prec)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if isinstance(other, (int, Fraction)):
            # exact rational divisor: scale the representative directly
            q = Fraction(other)
            if q == 0:
                raise ZeroDivisionError("division by zero")
            shift = vp(q, self.field.p)
            return Scalar(self.field, [a / q for a in self.coeffs], self.prec - shift)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, Scalar) else other
        if o is NotImplemented:
            return NotImplemented
        if not self.field.same_ring(o.field):
            return False
        return (self - o).is_zero()

    __hash__ = None

    # -- presentation --------------------------------------------------
    def digits(self) -> list:
        """Per coordinate (valuation, little-endian base-p digits up to precision)."""
        p, e = self.field.p, self.field.e
        out = []
        for j, c in enumerate(self.coeffs):
            m = ceil_frac(self.prec - Fraction(j, e))
            if c == 0:
                out.append((m, []))
                continue
            v = vp(c, p)
            u = reduce_mod(c / Fraction(p) ** v, p, m - v)
            n = int(u)
            ds = []
            for _ in range(m - v):
                n, r = divmod(n, p)
                ds.append(r)
            out.append((v, ds))
        return out

    def __repr__(self):
        terms = []
        for j, c in enumerate(self.coeffs):
            if c != 0:
                terms.append(f"{c}" if j == 0 else f"({c})*pi^{j}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(p^{self.prec})"


def scalar_from_rational(field: LocalField, q: Rational) -> Scalar:
    q = Fraction(q)
    return Scalar(field, [q] + [0] * (field.e - 1), field.precision)


def scalar_from_digits(field: LocalField, coords: Sequence, prec=None) -> Scalar:
    """Inverse of :meth:`Scalar.digits`; precision inferred when not given."""
    p, e = field.p, field.e
    if len(coords) != e:
        raise ValidationError(f"expected {e} pi-coordinates")
    values = []
    inferred = None
    for j, (v, ds) in enumerate(coords):
        if any((not isinstance(d, int)) or d < 0 or d >= p for d in ds):
            raise ValidationError(f"digits must lie in [0, {p})")
        n = sum(d * p**i for i, d in enumerate(ds))
        values.append(Fraction(n) * Fraction(p) ** v)
        bound = v + len(ds) + Fraction(j, e)
        inferred = bound if inferred is None else min(inferred, bound)
    return Scalar(field, values, inferred if prec is None else Fraction(prec))


def val(s: Scalar) -> Fraction:
    return s.valuation()


def add(s: Scalar, t: Scalar) -> Scalar:
    return s + t


def mul(s: Scalar, t: Scalar) -> Scalar:
    return s * t


def neg(s: Scalar) -> Scalar:
    return -s


def inv(s: Scalar) -> Scalar:
    return s.inverse()


def teichmuller(field: LocalField, r: int) -> Scalar:
    """Teichmueller lift of the residue r in F_p^x, by iterating x -> x^p."""
    p = field.p
    if not 1 <= r < p:
        raise ValidationError(f"residue must satisfy 1 <= r < {p}")
    mod = p ** (field.precision + 1)
    x = r
    for _ in range(field.precision + 2):
        y = pow(x, p, mod)
        if y == x:
            break
        x = y
    return Scalar(field, [x] + [0] * (field.e - 1), field.precision)


def _log_sensitivity(p: int, prec: Fraction) -> Fraction:
    """Lower bound of nu(log(1+w)) over nu(w) >= prec > 0."""
    best = prec
    n = 2
    while True:
        bound = n * prec - vp_int(n, p)
        best = min(best, bound)
        if n * prec - math.log(n, p) > best and n * prec * math.log(p) >= 1:
            return best
        n += 1


def _one_unit_log(x: Scalar) -> Scalar:
    """sum (-1)^(n+1) x^n / n for nu(x) > 0, at x.field's precision."""
    field = x.field
    p = field.p
    if x.is_zero():
        return field.zero().with_prec(x.prec)
    v = x.valuation()
    target = field.precision
    n_max = 1
    while True:
        if n_max * v * math.log(p) >= 1 and n_max * v - math.floor(math.log(n_max, p) + 1e-12) > target:
            break
        n_max += 1
    guard = math.floor(math.log(n_max, p) + 1e-12) + 1
    work = field.with_precision(target + guard)
    xw = x.lift_to(work)
    total = work.zero()
    power = xw
    for n in range(1, n_max):
        term = power / n
        total = total + term if n % 2 else total - term
        power = power * xw
    out_prec = min(Fraction(target), _log_sensitivity(p, x.prec)) if x.prec > 0 else Fraction(0)
    return Scalar(field, total.coeffs, out_prec)


def unit_log(field: LocalField, u: Scalar) -> Scalar:
    """log on O_K^x: zero on Teichmueller lifts, the usual series on 1-units."""
    if u.is_zero() or u.valuation() != 0:
        raise NotAUnit("unit_log needs nu_K(u) = 0")
    omega = teichmuller(field, u.residue())
    one_unit = u * omega ** (field.p - 2)
    return _one_unit_log(one_unit - 1)


def _times_pi_power(y: Scalar, m: int) -> Scalar:
    """y * pi^m computed exactly on the representative (pi is exact)."""
    field = y.field
    e = field.e
    if m == 0:
        return y
    if e == 1:
        pi = -field._poly[0]
        return Scalar(field, [y.coeffs[0] * pi**m], y.prec + m)
    pi = [Fraction(0)] * e
    pi[1] = Fraction(1)
    if m < 0:
        # pi^{-1} = -(pi^{e-1} + a_{e-1} pi^{e-2} + ... + a_1) / a_0
        a = field._poly
        step = [-a[j + 1] / a[0] for j in range(e)]
    else:
        step = pi
    coords = list(y.coeffs)
    for _ in range(abs(m)):
        coords = _poly_mul(field, coords, step)
    return Scalar(field, coords, y.prec + Fraction(m, e))


def log_uniformizer(field: LocalField) -> Scalar:
    """log(pi) = (c + log(pi^e / p)) / e under the field's branch c."""
    e = field.e
    c = field.branch_scalar()
    if e == 1:
        ratio = -field._poly[0] / field.p
        return c + unit_log(field, scalar_from_rational(field, ratio))
    pe_over_p = Scalar(field, [c / field.p for c in field._high_powers[0]], field.precision)
    return (c + unit_log(field, pe_over_p)) / e


def branch_log(field: LocalField, y: Scalar) -> Scalar:
    """The homomorphism K^x -> K extending unit_log with log(p) = field.branch."""
    if y.is_zero():
        raise ZeroValuation("log of zero")
    m = y.valuation() * field.e
    assert m.denominator == 1
    m = int(m)
    unit = _times_pi_power(y, -m)
    result = unit_log(field, unit)
    if m:
        result = result + log_uniformizer(field) * m
    return result


def random_scalar(field: LocalField, rng: random.Random, min_val: int = 0, max_val: int = 2) -> Scalar:
    """Random element with nu_K in [min_val, ...), full precision."""
    p, e, N = field.p, field.e, field.precision
    shift = rng.randint(min_val, max_val)
    coords = [rng.randrange(p ** max(N - shift, 1)) * Fraction(p) ** shift for _ in range(e)]
    return Scalar(field, coords, N)


def random_unit(field: LocalField, rng: random.Random) -> Scalar:
    p, e, N = field.p, field.e, field.precision
    c0 = rng.randrange(1, p) + p * rng.randrange(p ** (N - 1))
    rest = [rng.randrange(p**N) for _ in range(e - 1)]
    return Scalar(field, [c0] + rest, N)


def pi_coordinate(x: Scalar, t: int) -> Scalar:
    """The t-th pi-coordinate of x as an element of K0, with the precision it carries."""
    field = x.field
    coords = [0] * field.e
    coords[0] = x.coeffs[t]
    return Scalar(field, coords, ceil_frac(x.prec - Fraction(t, field.e)))
