import cmath
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mtphi import archimedean as ar
from mtphi.errors import DomainError, NotMTHS, ValidationError


def two_dim(tau):
    """W_{-2} = <h1>, W_0 = H, F^0 = <h2 + tau h1>."""
    return ar.RealMTHS(2, ((-2, [[1, 0]]), (0, [[1, 0], [0, 1]])), ((-1, [[1, 0], [0, 1]]), (0, [[tau, 1]])))


def polylog_structure(z, n):
    """Real MTHS of the polylogarithm up to weight -2n at z.

    Rows of P give the classical multivalued periods: row 0 is the constant
    1, row j starts with -Li_j(z) followed by (2 pi i)^c log(z)^(j-c)/(j-c)!.
    The Betti lattice is the standard basis, W_{-2k} is spanned by e_k..e_n
    and F^{-p} by the first p+1 columns of P^{-1}.
    """
    L = cmath.log(z)
    tpi = 2j * math.pi
    P = np.zeros((n + 1, n + 1), complex)
    P[0, 0] = 1
    for j in range(1, n + 1):
        P[j, 0] = -ar.polylog(j, z)
        for c in range(1, j + 1):
            P[j, c] = tpi**c * L ** (j - c) / math.factorial(j - c)
    Pi = np.linalg.inv(P)
    weights = [(-2 * k, [np.eye(n + 1)[i].tolist() for i in range(k, n + 1)]) for k in range(n, -1, -1)]
    hodge = [(-p, [Pi[:, i].tolist() for i in range(p + 1)]) for p in range(n, -1, -1)]
    return ar.RealMTHS(n + 1, tuple(weights), tuple(hodge))


def test_two_dim_example():
    for tau in (0.3 + 0.7j, -1 + 0.25j, 2.0 + 0j):
        d = ar.compute_d(two_dim(tau))
        assert abs(d[1, 0] - (tau - tau.conjugate())) < 1e-12
        assert abs(d[0, 0] - 1) < 1e-12 and abs(d[1, 1] - 1) < 1e-12 and abs(d[0, 1]) < 1e-12
        eps = ar.epsilon_arch(two_dim(tau))
        assert abs(eps[1, 0] - 2j * tau.imag) < 1e-12


def test_split_structure_has_trivial_d():
    H = ar.RealMTHS(2, ((-2, [[1, 0]]), (0, [[1, 0], [0, 1]])), ((-1, [[1, 0], [0, 1]]), (0, [[0, 1]])))
    assert np.allclose(ar.compute_d(H), np.eye(2))
    assert np.allclose(ar.epsilon_arch(H), 0)


def test_invalid_structures():
    with pytest.raises(ValidationError):
        ar.RealMTHS(1, ((-1, [[1]]),), ((0, [[1]]),))  # odd weight step
    with pytest.raises(ValidationError):
        ar.RealMTHS(2, ((0, [[1, 0]]),), ((0, [[1, 0], [0, 1]]),))  # W not exhaustive
    # weight 0 piece but F^1 nonzero: Hodge type (1,1) in weight 0
    bad = ar.RealMTHS(1, ((0, [[1]]),), ((1, [[1]]),))
    with pytest.raises(NotMTHS):
        ar.compute_d(bad)
    # F^0 misses the weight 0 piece
    bad = ar.RealMTHS(2, ((-2, [[1, 0]]), (0, [[1, 0], [0, 1]])), ((-1, [[1, 0], [0, 1]]), (0, [[1, 0]])))
    with pytest.raises(NotMTHS):
        ar.compute_d(bad)


@given(st.integers(0, 10**6))
def test_random_structures(seed):
    H = ar.random_mths(random.Random(seed))
    d = ar.compute_d(H)
    n = H.dim
    assert np.max(np.abs(d @ np.conj(d) - np.eye(n))) < 1e-9
    eps = ar.epsilon_arch(H)
    assert np.max(np.abs(ar.nilpotent_exp_np(eps) - d)) < 1e-9
    assert np.max(np.abs(np.conj(eps) + eps)) < 1e-9
    # d - 1 strictly raises weight: zero on and above the block diagonal (descending weight order)
    w = ar.graded_weights(H)
    for a in range(n):
        for b in range(n):
            if w[a] >= w[b]:
                assert abs(d[a, b] - (a == b)) < 1e-9


def test_nilpotent_np_errors():
    from mtphi.errors import NotUnipotent

    with pytest.raises(NotUnipotent):
        ar.nilpotent_log_np(np.array([[2.0]]))
    with pytest.raises(NotUnipotent):
        ar.nilpotent_exp_np(np.array([[1.0]]))


def test_polylog_values():
    assert abs(ar.polylog(1, 0.5) - math.log(2)) < 1e-14
    assert abs(ar.polylog(2, 0.5) - (math.pi**2 / 12 - math.log(2) ** 2 / 2)) < 1e-14
    assert abs(ar.polylog(0, 0.5) - 1) < 1e-15
    assert abs(ar.polylog(3, 0.0)) == 0
    with pytest.raises(DomainError):
        ar.polylog(2, 0.96)
    with pytest.raises(DomainError):
        ar.polylog(-1, 0.5)


def test_polylog_order_one_is_log():
    rng = random.Random(0)
    for _ in range(100):
        r = 0.95 * math.sqrt(rng.random())
        z = cmath.rect(r, rng.uniform(-math.pi, math.pi))
        assert abs(ar.polylog(1, z) + cmath.log(1 - z)) < 1e-12


def test_polylog_derivative_relation():
    # z d/dz Li_k = Li_{k-1}, by a central difference
    z, h = 0.4 + 0.3j, 1e-6
    for k in (2, 3, 4):
        deriv = (ar.polylog(k, z + h) - ar.polylog(k, z - h)) / (2 * h)
        assert abs(z * deriv - ar.polylog(k - 1, z)) < 1e-8


def test_bd_value_examples():
    got = ar.bd_value(1, 0.5, include_top=True)
    assert abs(got - 2.772588722239781j) < 1e-12
    assert abs(ar.bd_value(1, 0.5) - 2j * math.log(2)) < 1e-14
    for k in (2, 4, 6):
        for z in np.linspace(0.05, 0.94, 12):
            assert abs(ar.bd_value(k, z)) < 1e-10
    for k in (1, 3, 5):
        z = 0.3 - 0.4j
        assert abs(ar.bd_value(k, z, i_sign=-1) + ar.bd_value(k, z)) < 1e-15
    with pytest.raises(DomainError):
        ar.bd_value(0, 0.5)
    with pytest.raises(DomainError):
        ar.bd_value(2, 0.99)


def test_bernoulli_numbers():
    from fractions import Fraction

    assert [ar.bernoulli(n) for n in range(7)] == [1, Fraction(-1, 2), Fraction(1, 6), 0, Fraction(-1, 30), 0,
                                                    Fraction(1, 42)]
    assert ar.bernoulli(1, b1=0.5) == Fraction(1, 2)


def test_bloch_wigner_symmetry():
    # the k = 2 value is 2i D(z); D(zbar) = -D(z)
    z = 0.2 + 0.5j
    assert abs(ar.bd_value(2, z) + ar.bd_value(2, z.conjugate())) < 1e-14


@pytest.mark.parametrize("z", [0.3 + 0.2j, -0.5 + 0.1j, 0.1 - 0.6j, 0.7j])
def test_period_matrix_route_matches_bd_value(z):
    """epsilon of the polylog structure against the closed formula, two independent routes."""
    n = 5
    eps = ar.epsilon_arch(polylog_structure(z, n))
    for k in range(1, n + 1):
        # the sign is the fixed normalization of (2 pi i)^k against 2i; it does not move with z
        want = (-1) ** (k * (k + 1) // 2) * ar.bd_value(k, z) / (2 * math.pi) ** k
        assert abs(eps[k, 0] - want) < 1e-10 * max(1.0, abs(want))


def test_period_matrix_rejects_top_term():
    # with the extra l = k term the ratio to epsilon moves with z
    ratios = []
    for z in (0.3 + 0.2j, -0.5 + 0.1j):
        eps = ar.epsilon_arch(polylog_structure(z, 1))
        ratios.append(eps[1, 0] / ar.bd_value(1, z, include_top=True))
    assert abs(ratios[0] - ratios[1]) > 1e-3
