from fractions import Fraction as F
import math
import random

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from ewensvar import hahn, spectral
from ewensvar.scalar import gen_binomial, rising_factorial

THETAS = [F(1, 3), F(1, 2), F(1), F(2), F(7, 3)]
fracs = st.fractions(min_value=-12, max_value=12, max_denominator=9)


def brute_pfq(m, upper, lower):
    """Independent term-by-term evaluation from rising factorials."""
    total = F(0)
    for k in range(m + 1):
        num = rising_factorial(F(-m), k)
        for a in upper:
            num *= rising_factorial(F(a), k)
        den = F(math.factorial(k))
        for b in lower:
            den *= rising_factorial(F(b), k)
        total += num / den
    return total


def test_pfq_examples():
    assert hahn.pfq(0, (F(3),), (F(5),)) == 1
    b, c = F(2, 7), F(9, 4)
    assert hahn.pfq(1, (b,), (c,)) == 1 - b / c
    assert hahn.pfq(3, (F(1, 2),), (F(2),)) == F(35, 64)


def test_pfq_rejects_poles():
    with pytest.raises(hahn.PoleError):
        hahn.pfq(4, (F(1),), (F(-2),))
    # a pole just past the summation range is fine
    assert hahn.pfq(3, (F(1),), (F(-3),)) == brute_pfq(3, (1,), (-3,))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 12), st.lists(fracs, max_size=3), st.lists(fracs, max_size=3))
def test_pfq_matches_brute_force(m, upper, lower):
    assume(not any(b.denominator == 1 and -(m - 1) <= b <= 0 for b in lower))
    assert hahn.pfq(m, upper, lower) == brute_pfq(m, upper, lower)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 25), fracs, fracs)
def test_chu_vandermonde(m, b, c):
    assume(not (c.denominator == 1 and c <= 0))
    lhs, rhs = hahn.chu_vandermonde_sides(m, b, c)
    assert lhs == rhs


def test_hahn_Q_examples():
    theta, n = F(7, 3), 9
    for x in range(n):
        assert hahn.hahn_Q(0, x, 1, theta - 1, n) == 1
        assert hahn.hahn_Q(1, x, F(1), theta - 1, n) == 1 - x * (theta + 2) / (2 * (n - 1))
    assert hahn.hahn_Q(1, 0, F(1), theta - 1, n) == 1
    with pytest.raises(ValueError):
        hahn.hahn_Q(n, 0, F(1), theta - 1, n)


@pytest.mark.parametrize("theta", THETAS)
@pytest.mark.parametrize("n", [2, 5, 10])
def test_q_poly_closed_forms(n, theta):
    for j in range(1, n + 1):
        assert hahn.q_poly(0, j, theta, n) == 1
        assert hahn.q_poly(1, j, theta, n) == ((theta + 2) * j - (2 * n + theta)) / (2 * (1 - n))
        q3f2, q2f1, closed = hahn.q_last_sides(j, theta, n)
        assert q3f2 == q2f1 == closed


def test_inner_product_examples():
    theta, n = F(2, 5), 7
    assert hahn.inner_product(1, 4, theta, n) == 0
    assert hahn.inner_product(0, 0, F(1), 9) == 9 * 10 // 2
    assert hahn.inner_product(0, 0, F(1), 2) == 3
    assert hahn.pi_norm_sq(0, F(2), 8) == 8 * 9 * 10 // 6
    assert all(hahn.pi_norm_sq(r, theta, n) > 0 for r in range(n))


@pytest.mark.parametrize("theta", THETAS)
@pytest.mark.parametrize("n", [2, 6, 13, 25])
def test_orthogonality(n, theta):
    G = hahn.gram_matrix(theta, n)
    assert all(G[i][j] == 0 for i in range(n) for j in range(n) if i != j)
    assert all(G[i][i] > 0 for i in range(n))


@pytest.mark.parametrize("theta", THETAS)
def test_gram_schmidt_reproduces_q(theta):
    n = 11
    gs = hahn.gram_schmidt(theta, n, 7)
    b = hahn.hahn_basis(n, theta)
    for r, v in enumerate(gs):
        c = hahn.proportional(b.values[r], v)
        assert c is not None and c != 0


@pytest.mark.parametrize("theta", [F(1, 3), F(1), F(7, 3)])
@pytest.mark.parametrize("n", [2, 7, 20])
def test_eigenbasis_orthonormal_and_reconstructs(n, theta):
    E = hahn.eigenbasis(theta, n)
    assert np.allclose(E @ E.T, np.eye(n), atol=1e-12, rtol=0)
    M = spectral.build_M_float(n, theta)
    assert np.allclose(hahn.spectral_reconstruction(theta, n), M, atol=1e-8, rtol=0)
    for r in range(1, n + 1):
        mu = float(spectral.mu_closed(r, theta))
        assert np.allclose(E[r - 1] @ M, mu * E[r - 1], atol=1e-10)


def test_e2_matches_extremal_direction():
    n, theta = 9, F(2)
    th = [float(x) for x in spectral.gauge_dsq(n, theta)]
    v = np.array([((2 + 2) * j - (2 * n + 2)) * math.sqrt(th[j - 1]) for j in range(1, n + 1)])
    e2 = hahn.eigenbasis_vector(2, theta, n)
    assert abs(abs(e2 @ v) - np.linalg.norm(v)) < 1e-9 * np.linalg.norm(v)


def brute_binom_sum_pr1(a, b, M):
    return gen_binomial(a + b + 1, M)


@settings(max_examples=60, deadline=None)
@given(fracs, fracs, st.integers(0, 20))
def test_pr1(a, b, M):
    lhs, rhs = hahn.pr1_sides(a, b, M)
    assert lhs == rhs == brute_binom_sum_pr1(a, b, M)


@settings(max_examples=60, deadline=None)
@given(fracs, st.integers(0, 20), st.integers(0, 20))
def test_pr2(a, m, M):
    assert hahn.verify_pr2(a, m, M)


def test_pr_examples():
    assert hahn.pr1_sides(F(3, 2), F(-1, 5), 0) == (1, 1)
    theta, n = F(7, 3), 10
    for r in range(1, n):
        for j in range(1, n - r + 1):
            assert hahn.verify_pr1(theta - 1, F(n - r - 1), n - r - j)
    assert hahn.pr2_sides(F(4, 9), 3, 0) == (gen_binomial(F(4, 9), 3),) * 2
    assert hahn.pr2_sides(F(6), 1, 3) == (0, 0)
    for i in range(n + 1):
        for j in range(n + 1):
            assert hahn.verify_pr2(F(n), j, i)


def test_lemma2():
    assert hahn.lemma2_check(0, F(3), F(5, 2), (F(1),), (F(4),))
    for theta in THETAS:
        n = 7
        for r in range(n):
            for M in range(n):
                assert hahn.lemma2_check(M, theta, F(1), (F(-r), r + theta + 1), (F(2), F(1 - n)))
    rng = random.Random(3)
    for _ in range(20):
        M = rng.randint(0, 7)
        alpha, beta = F(rng.randint(1, 40), 7), F(rng.randint(1, 40), 3)
        upper = (F(rng.randint(-9, 9), 2),)
        lower = (F(rng.randint(1, 30), 4), F(rng.randint(1, 30), 5))
        assert hahn.lemma2_check(M, alpha, beta, upper, lower)


def test_sigma_r():
    theta, n = F(7, 3), 9
    for M in range(n):
        assert hahn.sigma_r(0, M, theta, n) == sum(esf_theta(theta, k) for k in range(M + 1))
    assert hahn.sigma_r(1, 1, F(1), 2) == 1 + (1 - F(3, 2))
    for r in range(n):
        for M in range(n):
            hahn.sigma_r(r, M, theta, n)
    for r in range(1, n + 1):
        lhs, rhs = hahn.part_sides(r, theta, n)
        assert lhs == rhs


def esf_theta(theta, k):
    return rising_factorial(theta, k) / math.factorial(k)


def test_sigma_r_raises_on_violation(monkeypatch):
    monkeypatch.setattr(hahn, "sigma_r_sides", lambda *a: (F(1), F(2)))
    with pytest.raises(hahn.IdentityViolation):
        hahn.sigma_r(0, 0, F(1), 3)


@pytest.mark.parametrize("theta", [F(1, 2), F(1), F(2)])
@pytest.mark.parametrize("n", [2, 5, 9])
def test_lemma4(n, theta):
    k = spectral.build_kernel(n, theta)
    for r in range(1, n + 1):
        assert hahn.phi(r, 0, theta, n) == 0
        for i in range(1, n + 1):
            lhs, rhs = hahn.lemma4_exact_sides(r, i, theta, n, k)
            assert lhs == rhs
        for i in range(1, n):
            lhs, rhs = hahn.lemma4_step_sides(r, i, theta, n)
            assert lhs == rhs
        direct = hahn.lemma4_direct(r, theta, n)
        closed = [hahn.lemma4_y(r, i, theta, n) for i in range(1, n + 1)]
        assert np.allclose(direct, closed, atol=1e-10, rtol=0)
        assert closed[-1] == pytest.approx(-math.sqrt(n) / float(r * (r + theta - 1)))


def test_concluding_relation_examples():
    for n in (2, 5, 8):
        assert hahn.concluding_sides(1, 1, F(3, 2), n) == (1, 1)
        for i in range(1, n + 1):
            assert hahn.concluding_relation_check(i, n, F(1, 2), n)


@pytest.mark.parametrize("theta", [F(1, 2), F(1), F(2)])
def test_concluding_relation_grid(theta):
    for n in range(1, 13):
        for i in range(1, n + 1):
            for r in range(1, n + 1):
                assert hahn.concluding_relation_check(i, r, theta, n)


def test_leading_coefficients():
    theta, n = F(5, 4), 8
    sides = hahn.leading_coeff_sides(2, theta, n)
    assert sides["q"][0] == (theta + 2) / (2 * (1 - n))
    assert hahn.leading_coeff_sides(2, F(1), 4)["q"] == (F(3) / (2 * (1 - 4)),) * 2
    for r in range(1, n + 1):
        assert hahn.leading_coeff_check(r, theta, n)
        c, closed = hahn.leading_coeff_sides(r, theta, n)["c"]
        assert c == (-1) ** (r - 1) * math.factorial(r) * (r + theta - 1) / (rising_factorial(theta, r) * n)


def test_leading_coefficient_helper():
    vals = [3 * x ** 4 - x + 7 for x in range(6)]
    assert hahn.leading_coefficient(vals, 4) == 3


@pytest.mark.parametrize("theta", [F(1, 3), F(1), F(7, 3)])
def test_remark_last_row(theta):
    for n in (2, 4, 9):
        info = hahn.remark_last_row(theta, n)
        assert info["proportional"]
        assert info["residual"] < 1e-10
        assert abs(info["constant"]) > 0
