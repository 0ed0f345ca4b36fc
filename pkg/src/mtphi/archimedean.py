"""Real mixed Tate Hodge structures and single-valued polylogarithm values.

Everything here is floating point (numpy, complex128).  The weight
filtration is given at even steps, increasing: W_j is the span listed at the
largest step <= j and the highest listed step spans H.  The Hodge filtration
is decreasing on H (x) C: F^p is the span listed at the smallest step >= p and
the lowest listed step spans H (x) C.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence

import numpy as np

from .errors import DomainError, NotMTHS, NotUnipotent, ValidationError

DEFAULT_TOL = 1e-9
POLYLOG_RADIUS = 0.95


def _rank(A: np.ndarray, tol: float) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def _nullspace(A: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis (columns) of ker A."""
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(A)
    r = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    return vh[r:].conj().T


@dataclass(frozen=True, eq=False)
class RealMTHS:
    dim: int
    weights: tuple   # ((step, real array dim x r), ...) ascending
    hodge: tuple     # ((step, complex array dim x r), ...) ascending

    def __post_init__(self):
        n = self.dim
        ws = []
        for step, basis in self.weights:
            B = np.array(basis, dtype=float).reshape(-1, n).T if len(basis) else np.zeros((n, 0))
            ws.append((int(step), B))
        ws.sort(key=lambda t: t[0])
        hs = []
        for step, basis in self.hodge:
            B = np.array(basis, dtype=complex).reshape(-1, n).T if len(basis) else np.zeros((n, 0), complex)
            hs.append((int(step), B))
        hs.sort(key=lambda t: t[0])
        object.__setattr__(self, "weights", tuple(ws))
        object.__setattr__(self, "hodge", tuple(hs))
        if any(s % 2 for s, _ in ws):
            raise ValidationError("weight filtration must be listed at even steps")
        if n and (not ws or _rank(ws[-1][1], DEFAULT_TOL) != n):
            raise ValidationError("highest weight step must span H")
        if n and (not hs or _rank(hs[0][1], DEFAULT_TOL) != n):
            raise ValidationError("lowest Hodge step must span H (x) C")

    def W(self, j: int) -> np.ndarray:
        out = np.zeros((self.dim, 0))
        for s, B in self.weights:
            if s <= j:
                out = B
        return out

    def F(self, p: int) -> np.ndarray:
        for s, B in self.hodge:
            if s >= p:
                return B
        return np.zeros((self.dim, 0), complex)


@dataclass
class WeightSplitting:
    basis: np.ndarray    # adapted real basis, blocks in ascending weight
    blocks: list         # [(weight, [column indices])] ascending


def adapted_basis(H: RealMTHS, tol: float = DEFAULT_TOL) -> WeightSplitting:
    cols: list = []
    blocks = []
    for step, B in H.weights:
        new = []
        for k in range(B.shape[1]):
            cand = cols + [B[:, k]]
            if _rank(np.column_stack(cand), tol) == len(cand):
                cols.append(B[:, k])
                new.append(len(cols) - 1)
        if new:
            blocks.append((step, new))
    if len(cols) != H.dim:
        raise ValidationError("weight filtration is not exhaustive")
    basis = np.column_stack(cols) if cols else np.zeros((0, 0))
    return WeightSplitting(basis, blocks)


def _pieces(H: RealMTHS, tol: float):
    """For each weight 2j (descending): F^j cap W_{2j} in adapted coordinates."""
    split = adapted_basis(H, tol)
    A_inv = np.linalg.inv(split.basis)
    out = []
    for w, idx in reversed(split.blocks):
        if w % 2:
            raise NotMTHS("odd weight graded piece")
        j = w // 2
        higher = [c for ww, ix in split.blocks if ww > w for c in ix]
        pieces = []
        for p in (j, j + 1):
            C = A_inv @ H.F(p)
            if C.shape[1] == 0:
                pieces.append(np.zeros((H.dim, 0), complex))
                continue
            ker = _nullspace(C[higher, :], tol) if higher else np.eye(C.shape[1], dtype=complex)
            V = C @ ker
            if higher:
                V[higher, :] = 0
            pieces.append(V)
        V, V_next = pieces
        if V.shape[1] != len(idx) or _rank(V[idx, :], tol) != len(idx):
            raise NotMTHS(f"F^{j} cap W_{w} does not map isomorphically onto Gr^W_{w}")
        if V_next.shape[1] and np.max(np.abs(V_next[idx, :])) > tol * max(1.0, np.max(np.abs(V_next))):
            raise NotMTHS(f"F^{j + 1} meets Gr^W_{w}: not of Tate type")
        out.append((w, idx, V))
    return split, out


def compute_d(H: RealMTHS, tol: float = DEFAULT_TOL) -> np.ndarray:
    """d = a_Fbar a_F^{-1} on the sum of Gr^W, graded pieces in descending weight."""
    split, pieces = _pieces(H, tol)
    order = [c for _, idx, _ in pieces for c in idx]
    n = H.dim
    L = np.zeros((n, n), complex)
    G = np.zeros((n, n), complex)
    col = 0
    for w, idx, V in pieces:
        k = len(idx)
        L[:, col:col + k] = V[order, :]
        rows = [order.index(c) for c in idx]
        G[np.ix_(rows, range(col, col + k))] = V[idx, :]
        col += k
    try:
        d = np.conj(G) @ np.linalg.solve(np.conj(L), L @ np.linalg.inv(G))
    except np.linalg.LinAlgError:
        raise NotMTHS("splitting maps are singular") from None
    return d


def graded_weights(H: RealMTHS, tol: float = DEFAULT_TOL) -> list:
    """Weight of each coordinate of compute_d's basis."""
    split = adapted_basis(H, tol)
    return [w for w, idx in reversed(split.blocks) for _ in idx]


def nilpotent_log_np(A: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    n = A.shape[0]
    X = A - np.eye(n)
    total = np.zeros_like(A, dtype=complex)
    power = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        power = power @ X
        total = total + ((-1) ** (k + 1)) * power / k
    if n and np.max(np.abs(power @ X)) > tol * max(1.0, np.max(np.abs(A))):
        raise NotUnipotent("matrix is not unipotent")
    return total


def nilpotent_exp_np(X: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    n = X.shape[0]
    total = np.eye(n, dtype=complex)
    power = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        power = power @ X / k
        total = total + power
    if n and np.max(np.abs(power @ X)) > tol * max(1.0, np.max(np.abs(X))):
        raise NotUnipotent("matrix is not nilpotent")
    return total


def epsilon_arch(H: RealMTHS, tol: float = DEFAULT_TOL) -> np.ndarray:
    """log d; conjugation negates it since conj(d) = d^{-1}."""
    return nilpotent_log_np(compute_d(H, tol), tol)


# -- polylogarithms ---------------------------------------------------------------


def polylog(k: int, z: complex, tol: float = 1e-15) -> complex:
    """Li_k(z) = sum_{m>=1} z^m / m^k on |z| <= 0.95; Li_0(z) = z / (1 - z)."""
    if k < 0:
        raise DomainError("polylog order must be >= 0")
    z = complex(z)
    r = abs(z)
    if r > POLYLOG_RADIUS + 1e-15:
        raise DomainError(f"|z| = {r:.6g} is outside the series disk |z| <= {POLYLOG_RADIUS}")
    if k == 0:
        return z / (1 - z)
    total = 0j
    power = 1 + 0j
    m = 0
    while True:
        m += 1
        power *= z
        total += power / m**k
        if r ** (m + 1) / ((m + 1) ** k * (1 - r)) < tol:
            return total


@lru_cache(maxsize=None)
def _bernoulli_minus(n: int) -> Fraction:
    if n == 0:
        return Fraction(1)
    return -sum(Fraction(math.comb(n + 1, j)) * _bernoulli_minus(j) for j in range(n)) / (n + 1)


def bernoulli(n: int, b1: float = -0.5) -> Fraction:
    """Bernoulli numbers with a selectable sign convention for b_1."""
    if n == 1:
        return Fraction(b1).limit_denominator()
    return _bernoulli_minus(n)


def bd_value(k: int, z: complex, tol: float = 1e-15, b1: float = -0.5,
             include_top: bool = False, i_sign: int = 1) -> complex:
    """2i sum_l b_l log(z zbar)^l / l! Part(Li_{k-l}(z)), Part = Im (k even) or Re (k odd).

    l runs over 0..k-1; ``include_top`` also takes l = k (the Li_0 term).
    ``i_sign`` = -1 uses the other square root of -1.
    """
    if k < 1:
        raise DomainError("k must be a positive integer")
    z = complex(z)
    if z == 0 or z == 1:
        raise DomainError("z must avoid 0 and 1")
    if abs(z) > POLYLOG_RADIUS + 1e-15:
        raise DomainError(f"|z| = {abs(z):.6g} is outside the series disk")
    L = math.log(abs(z) ** 2)
    top = k if include_top else k - 1
    total = 0.0
    for ell in range(top + 1):
        b = bernoulli(ell, b1)
        if b == 0:
            continue
        li = polylog(k - ell, z, tol)
        part = li.imag if k % 2 == 0 else li.real
        total += float(b) * L**ell / math.factorial(ell) * part
    return 2j * i_sign * total


# -- random instances ---------------------------------------------------------------


def random_mths(rng, max_dim: int = 5, weights: Sequence[int] = (-4, -2, 0, 2)) -> RealMTHS:
    """Random valid structure with entries in [-1, 1].

    Build a real adapted basis A and a complex block-unipotent U (descending
    weight order); F^p is spanned by the columns of A U of weight >= 2p.
    """
    n = rng.randint(1, max_dim)
    ws = sorted((rng.choice(list(weights)) for _ in range(n)), reverse=True)
    while True:
        A = np.array([[rng.uniform(-1, 1) for _ in range(n)] for _ in range(n)])
        if abs(np.linalg.det(A)) > 0.05:
            break
    U = np.eye(n, dtype=complex)
    for a in range(n):
        for b in range(n):
            if ws[a] < ws[b]:
                U[a, b] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    cols = A @ U
    weight_steps = sorted(set(ws))
    weights_out = []
    for w in weight_steps:
        idx = [c for c in range(n) if ws[c] <= w]
        weights_out.append((w, [A[:, c].tolist() for c in idx]))
    hodge_steps = sorted(set(w // 2 for w in ws))
    hodge_out = []
    for p in hodge_steps:
        idx = [c for c in range(n) if ws[c] // 2 >= p]
        hodge_out.append((p, [cols[:, c].tolist() for c in idx]))
    return RealMTHS(n, tuple(weights_out), tuple(hodge_out))
