"""The quadratic-form matrix M_n, its closed-form spectrum and the sharp constant.

M_n carries square roots.  For exact work it is factored through the diagonal
gauge D = diag(sqrt(j * Theta(n-j))):

    M = D^-1 C D^-1,   e^L = D^-1 U D,   e^L M e^-L = D^-1 R D,

where C, U and R are rational whenever theta is.  Conjugation by D preserves
eigenvalues and triangularity, so every spectral claim is checked on C, U and
R in rational arithmetic.  Float versions of M, L and e^L are available for
cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .esf import b_form, variance_D
from .scalar import (
    EXACT,
    ThetaSeq,
    check_mode,
    check_n,
    check_theta,
    mode_of,
    one,
    rising_factorial,
    zero,
)


@dataclass(frozen=True)
class KernelMatrix:
    """Rational kernel C_ij = Theta(n-i-j) - Theta(n-i)Theta(n-j)/Theta(n).

    ``dsq[j-1] = j * Theta(n-j)`` holds the squared gauge diagonal.
    """

    n: int
    theta: object
    C: tuple
    dsq: tuple

    def to_float_M(self) -> np.ndarray:
        c = np.array([[float(x) for x in row] for row in self.C])
        d = np.sqrt(np.array([float(x) for x in self.dsq]))
        return c / np.outer(d, d)


def _setup(n, theta):
    n = check_n(n)
    check_theta(theta)
    return n, ThetaSeq(theta, n)


def gauge_dsq(n: int, theta) -> tuple:
    n, th = _setup(n, theta)
    return tuple(j * th(n - j) for j in range(1, n + 1))


def build_kernel(n: int, theta) -> KernelMatrix:
    n, th = _setup(n, theta)
    tn = th(n)
    rows = []
    for i in range(1, n + 1):
        rows.append(tuple(th(n - i - j) - th(n - i) * th(n - j) / tn for j in range(1, n + 1)))
    return KernelMatrix(n, theta, tuple(rows), gauge_dsq(n, theta))


def build_M_float(n: int, theta) -> np.ndarray:
    """M_n entry by entry from its defining square-root formula (float)."""
    n, th = _setup(n, float(theta))
    tn = th(n)
    m = np.empty((n, n))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            first = th(n - i - j) / math.sqrt(i * j * th(n - i) * th(n - j))
            second = math.sqrt(th(n - i) / (i * tn)) * math.sqrt(th(n - j) / (j * tn))
            m[i - 1, j - 1] = first - second
    return m


def mu_closed(r: int, theta):
    """Closed-form eigenvalue mu_r = (-1)^r (r-1)! / (theta)_r."""
    if r < 1:
        raise ValueError("eigenvalue index starts at 1")
    check_theta(theta)
    return (-1) ** r * math.factorial(r - 1) / rising_factorial(theta, r)


def spectrum_closed(n: int, theta) -> list:
    return [mu_closed(r, theta) for r in range(1, check_n(n) + 1)]


def tau_closed(theta):
    """Sharp constant (theta+2)/(theta+1)."""
    check_theta(theta)
    return (theta + 2) / (theta + 1)


def extremal_a(n: int, theta) -> list:
    """Weights a_j = (theta+2) j^2 - (2n+theta) j attaining the supremum."""
    n = check_n(n)
    check_theta(theta)
    return [(theta + 2) * j * j - (2 * n + theta) * j for j in range(1, n + 1)]


def rayleigh_ratio(n: int, theta, a: Sequence):
    """D_n(a) / (theta * B_n(a)); the supremum over a is tau_closed(theta)."""
    b = b_form(n, theta, a)
    if not b:
        raise ValueError("rayleigh ratio undefined for the zero weight vector")
    return variance_D(n, theta, a) / (theta * b)


def eigen_residual(n: int, theta, mu, a: Sequence, kernel: KernelMatrix | None = None) -> list:
    """sum_j C_ij a_j / j - mu Theta(n-i) a_i for each i.

    This is M x = mu x written in weight coordinates (x_j proportional to
    sqrt(Theta(n-j)/j) a_j); all entries are rational for rational input.
    """
    if len(a) != n:
        raise ValueError(f"weight vector has length {len(a)}, expected {n}")
    check_mode(theta, mu, *a)
    k = kernel or build_kernel(n, theta)
    th = ThetaSeq(theta, n)
    scaled = [a[j] / (j + 1) for j in range(n)]
    out = []
    for i in range(n):
        lhs = sum((cij * sj for cij, sj in zip(k.C[i], scaled)), zero(mode_of(theta)))
        out.append(lhs - mu * th(n - i - 1) * a[i])
    return out


def rational_eigencheck(n: int, theta, r: int, a: Sequence, kernel: KernelMatrix | None = None) -> bool:
    """True iff ``a`` (weight coordinates, any nonzero scale) is an eigenvector for mu_r."""
    if not any(a):
        raise ValueError("zero vector is never an eigenvector")
    res = eigen_residual(n, theta, mu_closed(r, theta), a, kernel)
    return all(x == 0 for x in res)


# -- triangularization by the exponential of a nilpotent matrix ---------------


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list:
    """Product of list-of-rows matrices, skipping zero entries on both sides."""
    m = len(B[0])
    sparse_b = [[(j, v) for j, v in enumerate(row) if v] for row in B]
    z = zero(mode_of(A[0][0]) if not isinstance(A[0][0], int) else EXACT)
    out = []
    for row in A:
        acc = [z] * m
        for k, aik in enumerate(row):
            if not aik:
                continue
            for j, bkj in sparse_b[k]:
                acc[j] = acc[j] + aik * bkj
        out.append(acc)
    return out


def build_L(n: int, theta):
    """Subdiagonal generator L_n (float) and its rational gauge image D L D^-1.

    The gauge image has entries -(j+1) Theta(n-j-1) / Theta(n-j) at (j+1, j).
    """
    n, th = _setup(n, theta)
    thf = ThetaSeq(float(theta), n)
    L = np.zeros((n, n))
    z = zero(mode_of(theta))
    G = [[z] * n for _ in range(n)]
    for j in range(1, n):
        L[j, j - 1] = -math.sqrt((j + 1) * j * thf(n - j - 1) / thf(n - j))
        G[j][j - 1] = -(j + 1) * th(n - j - 1) / th(n - j)
    return L, G


def exp_nilpotent(G: Sequence[Sequence]) -> list:
    """exp(G) for nilpotent G by its terminating series sum G^k / k!."""
    n = len(G)
    mode = mode_of(G[1][0]) if n > 1 else EXACT
    term = [[one(mode) if i == j else zero(mode) for j in range(n)] for i in range(n)]
    total = [row[:] for row in term]
    for k in range(1, n):
        term = matmul(term, G)
        term = [[x / k for x in row] for row in term]
        total = [[t + x for t, x in zip(trow, xrow)] for trow, xrow in zip(total, term)]
    return total


def exp_L_gauge(n: int, theta) -> list:
    """Closed form of D e^L D^-1: U_ij = (-1)^(i-j) C(i,j) Theta(n-i)/Theta(n-j), i >= j."""
    n, th = _setup(n, theta)
    z = zero(mode_of(theta))
    U = [[z] * n for _ in range(n)]
    for i in range(1, n + 1):
        for j in range(1, i + 1):
            U[i - 1][j - 1] = (-1) ** (i - j) * math.comb(i, j) * th(n - i) / th(n - j)
    return U


def abs_matrix(U: Sequence[Sequence]) -> list:
    return [[abs(x) for x in row] for row in U]


def triangularize(n: int, theta, kernel: KernelMatrix | None = None) -> list:
    """R = U C D^-2 |U|, the gauge image of e^L M e^-L.  Upper triangular."""
    k = kernel or build_kernel(n, theta)
    U = exp_L_gauge(n, theta)
    UC = matmul(U, k.C)
    UCD = [[x / d for x, d in zip(row, k.dsq)] for row in UC]
    return matmul(UCD, abs_matrix(U))


def gauge_to_float(X: Sequence[Sequence], dsq: Sequence) -> np.ndarray:
    """D^-1 X D in floats."""
    x = np.array([[float(v) for v in row] for row in X])
    d = np.sqrt(np.array([float(v) for v in dsq]))
    return x * d[None, :] / d[:, None]


def strictly_lower_zero(R: Sequence[Sequence]) -> bool:
    return all(R[i][j] == 0 for i in range(len(R)) for j in range(i))


def float_spectrum(n: int, theta) -> np.ndarray:
    """Sorted eigenvalues of the float matrix M_n from a symmetric eigensolver."""
    return np.linalg.eigvalsh(build_M_float(n, theta))


def match_spectrum(n: int, theta) -> list:
    """Pair numeric eigenvalues with the closed forms, both sorted ascending.

    Returns records ``(r, mu_closed, mu_numeric, abs_err)`` indexed by r.
    """
    numeric = float_spectrum(n, theta)
    closed = [(float(mu_closed(r, theta)), r) for r in range(1, n + 1)]
    closed.sort()
    rows = [(r, mu, float(num), abs(float(num) - mu)) for (mu, r), num in zip(closed, numeric)]
    rows.sort()
    return rows


def tau_report(n: int, theta) -> dict:
    """Three routes to the sharp constant and whether they agree exactly."""
    closed = tau_closed(theta)
    via_mu = 1 + theta * max(spectrum_closed(n, theta))
    via_ratio = rayleigh_ratio(n, theta, extremal_a(n, theta))
    if mode_of(theta) == EXACT:
        agree = closed == via_mu == via_ratio
    else:
        agree = math.isclose(closed, via_mu, rel_tol=1e-12) and math.isclose(closed, via_ratio, rel_tol=1e-9)
    return {"n": n, "theta": theta, "tau_closed": closed, "one_plus_theta_mu2": via_mu,
            "rayleigh_extremal": via_ratio, "pass": agree}
