"""Terminating hypergeometric sums, the Hahn polynomials q_r and their identities.

The polynomials are

    q_r(x) = 3F2(-r, -(x-1), r+theta+1; 2, 1-n; 1),   0 <= r <= n-1,

orthogonal on {1..n} under the weight x * Theta(n-x).  In weight
coordinates the vector (j * q_{r-1}(j))_j is an eigenvector of M_n for mu_r.
Every identity check returns the two sides so callers can report them;
the boolean wrappers compare exactly in rational mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .scalar import (
    ThetaSeq,
    check_mode,
    check_n,
    check_theta,
    gen_binomial,
    mode_of,
    one,
    rising_factorial,
    zero,
)
from . import spectral


class PoleError(ZeroDivisionError):
    """A lower parameter hits a nonpositive integer inside the summation range."""


class IdentityViolation(AssertionError):
    """Two sides of an identity that must agree did not."""


def _is_pole(b, m: int) -> bool:
    # (b)_k vanishes for some k <= m iff b is an integer in [-(m-1), 0]
    if isinstance(b, float):
        return b.is_integer() and -(m - 1) <= b <= 0
    b = b if isinstance(b, int) else (b.numerator if b.denominator == 1 else None)
    return b is not None and -(m - 1) <= b <= 0


def pfq(m: int, upper: Sequence = (), lower: Sequence = (), z=1):
    """Terminating series sum_{k=0}^m (-m)_k prod(upper)_k / prod(lower)_k z^k / k!.

    The leading numerator parameter -m is implicit.  Raises PoleError when a
    lower parameter makes a denominator vanish for some k <= m.
    """
    if m < 0:
        raise ValueError("termination order must be nonnegative")
    mode = check_mode(*upper, *lower, z)
    for b in lower:
        if _is_pole(b, m):
            raise PoleError(f"lower parameter {b} has a pole for k <= {m}")
    term = one(mode)
    total = term
    for k in range(m):
        num = (k - m) * z
        for a in upper:
            num *= a + k
        if not num:
            break
        den = k + 1
        for b in lower:
            den *= b + k
        term = term * num / den
        total += term
    return total


def hahn_Q(r: int, x, alpha, beta, n: int):
    """Discrete Hahn polynomial Q_r(x; alpha, beta, n) as a 3F2 at unit argument."""
    if not 0 <= r <= n - 1:
        raise ValueError(f"need 0 <= r <= n-1, got r={r}, n={n}")
    return pfq(r, (-x, r + alpha + beta + 1), (alpha + 1, 1 - n))


def q_poly(r: int, j, theta, n: int):
    """q_r(j) = Q_r(j-1; 1, theta-1, n)."""
    return hahn_Q(r, j - 1, one(mode_of(theta)), theta - 1, n)


@dataclass(frozen=True)
class HahnBasis:
    """Values q_r(j) (``values[r][j-1]``) and squared norms pi_r^2 for one (n, theta)."""

    n: int
    theta: object
    values: tuple
    pi_sq: tuple

    def weight_vector(self, r: int) -> list:
        """Eigenvector for mu_r in weight coordinates: a_j = j q_{r-1}(j)."""
        return [j * v for j, v in enumerate(self.values[r - 1], start=1)]


@lru_cache(maxsize=64)
def _basis(kind, theta, n):
    values = tuple(tuple(q_poly(r, j, theta, n) for j in range(1, n + 1)) for r in range(n))
    th = ThetaSeq(theta, n)
    pi_sq = tuple(
        sum((j * v * v * th(n - j) for j, v in enumerate(row, start=1)), zero(mode_of(theta)))
        for row in values
    )
    return HahnBasis(n, theta, values, pi_sq)


def hahn_basis(n: int, theta) -> HahnBasis:
    n = check_n(n, minimum=1)
    check_theta(theta)
    return _basis(type(theta), theta, n)


def inner_product(l: int, r: int, theta, n: int):
    """<q_l, q_r> = sum_j j q_l(j) q_r(j) Theta(n-j)."""
    b = hahn_basis(n, theta)
    th = ThetaSeq(theta, n)
    total = zero(mode_of(theta))
    for j in range(1, n + 1):
        total += j * b.values[l][j - 1] * b.values[r][j - 1] * th(n - j)
    return total


def pi_norm_sq(r: int, theta, n: int):
    return hahn_basis(n, theta).pi_sq[r]


def gram_matrix(theta, n: int) -> list:
    return [[inner_product(l, r, theta, n) for r in range(n)] for l in range(n)]


def eigenbasis_vector(r: int, theta, n: int) -> np.ndarray:
    """Unit vector e_r with e_rj = q_{r-1}(j) sqrt(j Theta(n-j)) / pi_{r-1}."""
    if not 1 <= r <= n:
        raise ValueError(f"need 1 <= r <= n, got r={r}")
    b = hahn_basis(n, theta)
    th = ThetaSeq(theta, n)
    pi = math.sqrt(float(b.pi_sq[r - 1]))
    return np.array([float(b.values[r - 1][j - 1]) * math.sqrt(float(j * th(n - j))) / pi
                     for j in range(1, n + 1)])


def eigenbasis(theta, n: int) -> np.ndarray:
    """Rows e_1..e_n."""
    return np.vstack([eigenbasis_vector(r, theta, n) for r in range(1, n + 1)])


def spectral_reconstruction(theta, n: int) -> np.ndarray:
    """sum_r mu_r e_r^T e_r, which should reproduce M_n."""
    E = eigenbasis(theta, n)
    mu = np.array([float(spectral.mu_closed(r, theta)) for r in range(1, n + 1)])
    return E.T @ (mu[:, None] * E)


def gram_schmidt(theta, n: int, count: int) -> list:
    """Orthogonalize 1, x, x^2, ... on {1..n} under the weight x Theta(n-x).

    Returns the value tables of the first ``count`` orthogonal polynomials.
    """
    th = ThetaSeq(theta, n)
    w = [j * th(n - j) for j in range(1, n + 1)]
    mode = mode_of(theta)

    def ip(u, v):
        return sum((wi * ui * vi for wi, ui, vi in zip(w, u, v)), zero(mode))

    out = []
    for deg in range(count):
        v = [one(mode) * j ** deg for j in range(1, n + 1)]
        for u in out:
            c = ip(v, u) / ip(u, u)
            v = [vi - c * ui for vi, ui in zip(v, u)]
        out.append(v)
    return out


def proportional(u: Sequence, v: Sequence):
    """Return c with u = c v exactly, or None."""
    c = None
    for ui, vi in zip(u, v):
        if not vi:
            if ui:
                return None
            continue
        if c is None:
            c = ui / vi
        elif ui != c * vi:
            return None
    return c


# -- identities ---------------------------------------------------------------


def chu_vandermonde_sides(m: int, b, c):
    """2F1(-m, b; c; 1) against (c-b)_m / (c)_m."""
    return pfq(m, (b,), (c,)), rising_factorial(c - b, m) / rising_factorial(c, m)


def pr1_sides(a, b, M: int):
    """sum_k C(a+k, k) C(b-k, M-k) against sum_k C(a+b-k, M-k)."""
    lhs = sum(gen_binomial(a + k, k) * gen_binomial(b - k, M - k) for k in range(M + 1))
    rhs = sum(gen_binomial(a + b - k, M - k) for k in range(M + 1))
    return lhs, rhs


def verify_pr1(a, b, M: int) -> bool:
    lhs, rhs = pr1_sides(a, b, M)
    return lhs == rhs


def pr2_sides(a, m: int, M: int):
    """sum_k (-1)^k C(M, k) C(a-k, m) against C(a-M, m-M)."""
    lhs = sum((-1) ** k * math.comb(M, k) * gen_binomial(a - k, m) for k in range(M + 1))
    return lhs, gen_binomial(a - M, m - M)


def verify_pr2(a, m: int, M: int) -> bool:
    lhs, rhs = pr2_sides(a, m, M)
    return lhs == rhs


def lemma2_sides(M: int, alpha, beta, upper: Sequence, lower: Sequence):
    """Binomial convolution of truncated series against the augmented series."""
    lhs = sum(
        math.comb(M, k) * rising_factorial(alpha, M - k) * rising_factorial(beta, k)
        * pfq(k, upper, lower)
        for k in range(M + 1)
    )
    rhs = rising_factorial(alpha + beta, M) * pfq(M, (beta, *upper), (alpha + beta, *lower))
    return lhs, rhs


def lemma2_check(M: int, alpha, beta, upper: Sequence, lower: Sequence) -> bool:
    lhs, rhs = lemma2_sides(M, alpha, beta, upper, lower)
    return lhs == rhs


def _agree(x, y) -> bool:
    if isinstance(x, float) or isinstance(y, float):
        return math.isclose(x, y, rel_tol=1e-9, abs_tol=1e-12)
    return x == y


def sigma_r_sides(r: int, M: int, theta, n: int):
    """Direct sum_{k<=M} Q_r(k; 1, theta-1, n) Theta(M-k) and its 4F3 closed form."""
    if not (0 <= M <= n - 1 and 0 <= r <= n - 1):
        raise ValueError(f"need 0 <= M, r <= n-1; got M={M}, r={r}, n={n}")
    th = ThetaSeq(theta, n)
    u = one(mode_of(theta))
    direct = sum((hahn_Q(r, k, u, theta - 1, n) * th(M - k) for k in range(M + 1)), zero(mode_of(theta)))
    closed = rising_factorial(theta + 1, M) / math.factorial(M) * pfq(
        M, (u, -r, r + theta + 1), (theta + 1, 2 * u, 1 - n))
    return direct, closed


def sigma_r(r: int, M: int, theta, n: int):
    """Sum_{k<=M} Q_r(k) Theta(M-k); raises IdentityViolation if the 4F3 form disagrees."""
    direct, closed = sigma_r_sides(r, M, theta, n)
    if not _agree(direct, closed):
        raise IdentityViolation(f"sigma_r({r}, {M}) direct {direct} != closed {closed}")
    return direct


def _f43(M: int, r: int, theta, n: int):
    u = one(mode_of(theta))
    return pfq(M, (u, 1 - r, r + theta), (theta + 1, 2 * u, 1 - n))


def phi(r: int, x, theta, n: int):
    """Phi_r(x) = 3F2(-r, -n+x, r+theta-1; theta, -n; 1)."""
    return pfq(r, (x - n, r + theta - 1), (theta, -n))


def part_sides(r: int, theta, n: int):
    """n * 4F3(-(n-1)) against theta n / (r (r+theta-1))."""
    return n * _f43(n - 1, r, theta, n), theta * n / (r * (r + theta - 1))


def lemma4_step_sides(r: int, i: int, theta, n: int):
    """(n-i) 4F3(-(n-i-1)) against theta n / (r (r+theta-1)) (1 - Phi_r(i)), 1 <= i < n."""
    lhs = (n - i) * _f43(n - i - 1, r, theta, n)
    return lhs, theta * n / (r * (r + theta - 1)) * (1 - phi(r, i, theta, n))


def lemma4_y(r: int, i: int, theta, n: int) -> float:
    """Closed form of (pi_{r-1} e_r M_n)_i."""
    th = ThetaSeq(theta, n)
    f = phi(r, i, theta, n)
    return -math.sqrt(float(th(n - i)) / i) * float(n / (r * (r + theta - 1)) * f)


def lemma4_direct(r: int, theta, n: int) -> np.ndarray:
    """pi_{r-1} e_r M_n by an explicit float matrix-vector product."""
    x = math.sqrt(float(pi_norm_sq(r - 1, theta, n))) * eigenbasis_vector(r, theta, n)
    return x @ spectral.build_M_float(n, theta)


def lemma4_exact_sides(r: int, i: int, theta, n: int, kernel=None):
    """The eigenvector product identity scaled by sqrt(i Theta(n-i)) so both
    sides are rational.

    sum_j q_{r-1}(j) C_ji  against  -Theta(n-i) n / (r (r+theta-1)) Phi_r(i).
    """
    k = kernel or spectral.build_kernel(n, theta)
    b = hahn_basis(n, theta)
    th = ThetaSeq(theta, n)
    lhs = sum((b.values[r - 1][j] * k.C[j][i - 1] for j in range(n)), zero(mode_of(theta)))
    rhs = -th(n - i) * n / (r * (r + theta - 1)) * phi(r, i, theta, n)
    return lhs, rhs


def concluding_sides(i: int, r: int, theta, n: int):
    """(-1)^(r-1) r! i 3F2(1-r, 1-i, r+theta; 2, 1-n; 1)
    against (theta)_{r-1} n 3F2(-r, i-n, r+theta-1; theta, -n; 1)."""
    u = one(mode_of(theta))
    lhs = (-1) ** (r - 1) * math.factorial(r) * i * pfq(r - 1, (1 - i * u, r + theta), (2 * u, 1 - n))
    rhs = rising_factorial(theta, r - 1) * n * phi(r, i, theta, n)
    return lhs, rhs


def concluding_relation_check(i: int, r: int, theta, n: int) -> bool:
    lhs, rhs = concluding_sides(i, r, theta, n)
    return lhs == rhs


def leading_coefficient(values: Sequence, degree: int):
    """Leading coefficient of a polynomial of known degree from values at
    consecutive integers: the degree-th forward difference over degree!."""
    diffs = list(values[: degree + 1])
    for _ in range(degree):
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
    return diffs[0] / math.factorial(degree)


def leading_coeff_sides(r: int, theta, n: int) -> dict:
    """Leading coefficients of Phi_r and q_{r-1} and the ratio c_{r-1}, each as
    (extracted, closed form)."""
    if not 1 <= r <= n:
        raise ValueError(f"need 1 <= r <= n, got r={r}")
    phi_vals = [phi(r, x, theta, n) for x in range(r + 1)]
    phi_lead = leading_coefficient(phi_vals, r)
    phi_closed = ((-1) ** r * rising_factorial(theta + r - 1, r)
                  / (rising_factorial(theta, r) * rising_factorial(-n, r)))
    q_vals = [q_poly(r - 1, j, theta, n) for j in range(1, r + 1)]
    q_lead = leading_coefficient(q_vals, r - 1)
    q_closed = (rising_factorial(r + theta, r - 1)
                / (math.factorial(r) * rising_factorial(1 - n, r - 1)))
    c_closed = (-1) ** (r - 1) * math.factorial(r) * (r + theta - 1) / (rising_factorial(theta, r) * n)
    return {
        "phi": (phi_lead, phi_closed),
        "q": (q_lead, q_closed),
        "c": (phi_lead / q_lead, c_closed),
        "phi_at_zero": (phi_vals[0], zero(mode_of(theta))),
    }


def leading_coeff_check(r: int, theta, n: int) -> bool:
    return all(_agree(a, b) for a, b in leading_coeff_sides(r, theta, n).values())


def q_last_closed(j: int, theta, n: int):
    """q_{n-1}(j) = (-1)^(j-1) (theta+n-j)_{j-1} / j!."""
    return (-1) ** (j - 1) * rising_factorial(theta + n - j, j - 1) / math.factorial(j)


def q_last_sides(j: int, theta, n: int):
    """q_{n-1}(j) from its 3F2 definition, the reduced 2F1, and the closed product."""
    u = one(mode_of(theta))
    return q_poly(n - 1, j, theta, n), pfq(j - 1, (theta + n,), (2 * u,)), q_last_closed(j, theta, n)


def remark_last_row(theta, n: int) -> dict:
    """Last row of e^L against e_n.

    Exact part: U_nj / q_{n-1}(j) must be constant in j (gauge form).  Float
    part: the proportionality constant between v_n and the unit vector e_n.
    """
    U = spectral.exp_L_gauge(n, theta)
    b = hahn_basis(n, theta)
    c_gauge = proportional(U[n - 1], b.values[n - 1])
    v = spectral.gauge_to_float(U, spectral.gauge_dsq(n, theta))[n - 1]
    e = eigenbasis_vector(n, theta, n)
    c_float = float(v @ e)
    resid = float(np.max(np.abs(v - c_float * e)))
    return {"n": n, "theta": theta, "proportional": c_gauge is not None,
            "gauge_constant": c_gauge, "constant": c_float, "residual": resid}
