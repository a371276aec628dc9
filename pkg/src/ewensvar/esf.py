"""Ewens measure on cycle types and closed-form moments of additive statistics.

A cycle type of a permutation of n letters is the tuple ``(s_1, ..., s_n)``
where ``s_j`` counts the cycles of length j.  An additive statistic is
``h = a_1 s_1 + ... + a_n s_n`` for a weight vector ``a``.
"""

from __future__ import annotations

import math
from typing import Sequence

from .scalar import ThetaSeq, check_mode, check_n, check_theta, one, zero

CycleType = tuple


def ell(s: Sequence[int]) -> int:
    """Weighted length 1*s_1 + 2*s_2 + ... + n*s_n."""
    return sum(j * c for j, c in enumerate(s, start=1))


def cycle_type_from_lengths(lengths: Sequence[int], n: int) -> CycleType:
    counts = [0] * n
    for length in lengths:
        counts[length - 1] += 1
    return tuple(counts)


def cycle_count(s: Sequence[int]) -> int:
    return sum(s)


def _check_dim(n: int, vec: Sequence, name: str) -> None:
    if len(vec) != n:
        raise ValueError(f"{name} has length {len(vec)}, expected {n}")


def esf_probability(n: int, theta, s: Sequence[int]):
    """Probability of cycle type ``s`` under the Ewens measure of parameter theta.

    Zero off the surface ell(s) = n.
    """
    check_theta(theta)
    _check_dim(n, s, "cycle type")
    mode = check_mode(theta)
    if ell(s) != n:
        return zero(mode)
    th = ThetaSeq(theta, n)
    p = one(mode)
    for j, c in enumerate(s, start=1):
        if c:
            p *= (theta / j) ** c / math.factorial(c)
    return p / th(n)


def additive_value(a: Sequence, s: Sequence[int]):
    if len(a) != len(s):
        raise ValueError(f"weight vector has length {len(a)}, cycle type {len(s)}")
    total = 0
    for aj, sj in zip(a, s):
        if sj:
            total = total + aj * sj
    return total


def _weights(n, theta, a, minimum=1):
    check_n(n, minimum)
    check_theta(theta)
    _check_dim(n, a, "weight vector")
    mode = check_mode(theta, *a)
    return mode, ThetaSeq(theta, n)


def _linear_part(n, a, th):
    """sum_j (a_j / j) Theta(n-j) / Theta(n)."""
    total = 0
    for j in range(1, n + 1):
        total += a[j - 1] * th(n - j) / j
    return total / th(n)


def mean_A(n: int, theta, a: Sequence):
    """E h under the Ewens measure: theta * sum_j (a_j/j) Theta(n-j)/Theta(n)."""
    mode, th = _weights(n, theta, a)
    return theta * _linear_part(n, a, th) + zero(mode)


def b_form(n: int, theta, a: Sequence):
    """B_n(a) = sum_j (a_j^2 / j) Theta(n-j)/Theta(n)."""
    mode, th = _weights(n, theta, a, minimum=2)
    total = zero(mode)
    for j in range(1, n + 1):
        total += a[j - 1] * a[j - 1] * th(n - j) / j
    return total / th(n)


def delta_form(n: int, theta, a: Sequence):
    """Delta_n(a): the pair-interaction quadratic form minus the squared mean part."""
    mode, th = _weights(n, theta, a, minimum=2)
    pair = zero(mode)
    for i in range(1, n):
        ai = a[i - 1]
        if not ai:
            continue
        inner = zero(mode)
        for j in range(1, n - i + 1):
            inner += a[j - 1] * th(n - i - j) / j
        pair += ai * inner / i
    lin = _linear_part(n, a, th)
    return pair / th(n) - lin * lin


def variance_D(n: int, theta, a: Sequence):
    """Var h = theta * B_n(a) + theta^2 * Delta_n(a)."""
    return theta * b_form(n, theta, a) + theta * theta * delta_form(n, theta, a)


def unit_vector(n: int, j: int, mode: str) -> list:
    v = [zero(mode)] * n
    v[j - 1] = one(mode)
    return v


def var_kj(n: int, theta, j: int):
    """Variance of the number of j-cycles."""
    if not 1 <= j <= n:
        raise ValueError(f"need 1 <= j <= n, got j={j}, n={n}")
    return variance_D(n, theta, unit_vector(n, j, check_mode(theta)))


def sum_var_gap(n: int, theta, a: Sequence):
    """Diagnostic pair (sum_j a_j^2 Var k_j - theta*B_n, n^-(min(1,theta)) * B_n).

    Only reported; no inequality between the two is asserted.
    """
    mode = check_mode(theta, *a)
    b = b_form(n, theta, a)
    total = zero(mode)
    for j in range(1, n + 1):
        if a[j - 1]:
            total += a[j - 1] * a[j - 1] * var_kj(n, theta, j)
    expo = min(1, theta)
    if expo == 1:
        scale = one(mode) / n
    else:
        # irrational power of n; reported as a float
        scale = float(n) ** (-float(expo))
    return total - theta * b, scale * b
