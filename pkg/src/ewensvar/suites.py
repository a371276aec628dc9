"""Verification suites run by ``ewensvar verify`` and ``ewensvar identities``.

Each suite takes ``(n, theta)`` with rational theta and returns a list of
check records ``{suite, check, params, holds, lhs, rhs}``.  ``holds`` is
None for diagnostics that are reported but not asserted.
"""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from . import esf, hahn, oracle, spectral

SUITES = ("spectral", "hahn", "identities", "oracle", "remark")

ORTHO_TOL = 1e-12
RECON_TOL = 1e-8
EIG_TOL = 1e-8
LEMMA4_TOL = 1e-10
GAUGE_TOL = 1e-12


def _rec(suite, check, params, holds, lhs=None, rhs=None, **extra):
    r = {"suite": suite, "check": check, "params": params, "holds": holds, "lhs": lhs, "rhs": rhs}
    r.update(extra)
    return r


def _pair(suite, check, params, sides):
    lhs, rhs = sides
    return _rec(suite, check, params, lhs == rhs, lhs, rhs)


def random_rational(rng: random.Random, span: int = 20, den: int = 9) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, den))


def random_weights(rng: random.Random, n: int) -> list:
    while True:
        a = [random_rational(rng) for _ in range(n)]
        if any(a):
            return a


# -- spectral -----------------------------------------------------------------


def gauge_error(A: np.ndarray, B: np.ndarray, tol: float = GAUGE_TOL) -> tuple:
    """Entrywise relative agreement, with an absolute floor of 1e-3*tol*max|A|
    for entries that cancel to zero.  Returns (max relative error, ok)."""
    scale = float(np.max(np.abs(A)))
    big = np.maximum(np.abs(A), np.abs(B))
    diff = np.abs(A - B)
    ok = bool(np.all(diff <= tol * big + 1e-3 * tol * scale))
    mask = big > tol * scale
    rel = float(np.max(diff[mask] / big[mask])) if mask.any() else 0.0
    return rel, ok


def spectral_suite(n: int, theta) -> list:
    S = "spectral"
    p = {"n": n, "theta": theta}
    out = []
    k = spectral.build_kernel(n, theta)
    R = spectral.triangularize(n, theta, k)
    mus = spectral.spectrum_closed(n, theta)
    out.append(_rec(S, "triangular", p, spectral.strictly_lower_zero(R)))
    diag = [R[i][i] for i in range(n)]
    out.append(_rec(S, "diagonal_is_mu", p, diag == mus, diag, mus))

    t = spectral.tau_report(n, theta)
    out.append(_rec(S, "tau_three_routes", p, t["pass"], t["rayleigh_extremal"], t["tau_closed"],
                    one_plus_theta_mu2=t["one_plus_theta_mu2"]))
    out.append(_rec(S, "max_mu_is_mu2", p, max(mus) == spectral.mu_closed(2, theta)))

    basis = hahn.hahn_basis(n, theta)
    for r in range(1, n + 1):
        ok = spectral.rational_eigencheck(n, theta, r, basis.weight_vector(r), k)
        out.append(_rec(S, "eigenvector", {**p, "r": r}, ok))
    out.append(_rec(S, "extremal_is_mu2_eigenvector", p,
                    spectral.rational_eigencheck(n, theta, 2, spectral.extremal_a(n, theta), k)))

    M = spectral.build_M_float(n, theta)
    gauge = k.to_float_M()
    rel, ok = gauge_error(M, gauge)
    out.append(_rec(S, "gauge_identity", p, ok, max_rel_err=rel))

    L, G = spectral.build_L(n, theta)
    U = spectral.exp_L_gauge(n, theta)
    out.append(_rec(S, "expL_closed_form", p, spectral.exp_nilpotent(G) == U))
    V = spectral.gauge_to_float(U, k.dsq)
    series = np.array(spectral.exp_nilpotent(L.tolist()))
    err = float(np.max(np.abs(V - series)))
    out.append(_rec(S, "expL_float_series", p, err <= GAUGE_TOL * max(1.0, float(np.max(np.abs(V)))),
                    max_abs_err=err))
    inv = spectral.matmul(U, spectral.abs_matrix(U))
    ident = all(inv[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))
    out.append(_rec(S, "expL_inverse_is_abs", p, ident))

    rows = spectral.match_spectrum(n, theta)
    worst = max(r[3] for r in rows)
    out.append(_rec(S, "float_spectrum", p, worst <= EIG_TOL, max_abs_err=worst))
    tr = abs(float(np.trace(M)) - float(sum(float(m) for m in mus)))
    out.append(_rec(S, "trace", p, tr <= 1e-10, abs_err=tr))
    return out


# -- hahn -----------------------------------------------------------------------


def hahn_suite(n: int, theta) -> list:
    S = "hahn"
    p = {"n": n, "theta": theta}
    out = []
    G = hahn.gram_matrix(theta, n)
    off = all(G[i][j] == 0 for i in range(n) for j in range(n) if i != j)
    out.append(_rec(S, "gram_diagonal", p, off))
    out.append(_rec(S, "pi_sq_positive", p, all(G[i][i] > 0 for i in range(n)),
                    pi_sq=[G[i][i] for i in range(n)]))
    out.append(_rec(S, "q0_is_one", p, all(v == 1 for v in hahn.hahn_basis(n, theta).values[0])))

    gs = hahn.gram_schmidt(theta, n, min(7, n))
    b = hahn.hahn_basis(n, theta)
    for r, v in enumerate(gs):
        c = hahn.proportional(b.values[r], v)
        out.append(_rec(S, "gram_schmidt", {**p, "r": r}, c is not None and c != 0, scale=c))

    E = hahn.eigenbasis(theta, n)
    dev = float(np.max(np.abs(E @ E.T - np.eye(n))))
    out.append(_rec(S, "orthonormal", p, dev <= ORTHO_TOL, max_abs_err=dev))
    rec = float(np.max(np.abs(hahn.spectral_reconstruction(theta, n) - spectral.build_M_float(n, theta))))
    out.append(_rec(S, "reconstruction", p, rec <= RECON_TOL, max_abs_err=rec))
    worst = 0.0
    for r in range(1, n + 1):
        direct = hahn.lemma4_direct(r, theta, n)
        closed = np.array([hahn.lemma4_y(r, i, theta, n) for i in range(1, n + 1)])
        worst = max(worst, float(np.max(np.abs(direct - closed))))
    out.append(_rec(S, "lemma4_float", p, worst <= LEMMA4_TOL, max_abs_err=worst))
    return out


# -- identities -----------------------------------------------------------------


def identities_suite(n: int, theta, seed: int = 0, max_order: int = 20, random_cases: int = 10) -> list:
    """Exact checks of every binomial and hypergeometric identity used in the proofs."""
    S = "identities"
    rng = random.Random(seed)
    out = []
    # first binomial summation: the instances used in the triangularization, then random
    for r in range(1, n):
        for j in range(1, n - r + 1):
            a, bb, M = theta - 1, n - r - 1, n - r - j
            out.append(_pair(S, "pr1", {"a": a, "b": bb, "M": M}, hahn.pr1_sides(a, bb, M)))
    for M in range(max_order + 1):
        for _ in range(2):
            a, bb = random_rational(rng), random_rational(rng)
            out.append(_pair(S, "pr1", {"a": a, "b": bb, "M": M}, hahn.pr1_sides(a, bb, M)))
    # second binomial summation
    for i in range(0, n + 1):
        for j in range(0, n + 1):
            out.append(_pair(S, "pr2", {"a": n, "m": j, "M": i}, hahn.pr2_sides(n, j, i)))
    for M in range(max_order + 1):
        for m in range(max_order + 1):
            a = random_rational(rng)
            out.append(_pair(S, "pr2", {"a": a, "m": m, "M": M}, hahn.pr2_sides(a, m, M)))
    # Chu-Vandermonde
    for m in range(max_order + 1):
        for bb, c in ((theta + n, Fraction(2)), (theta + 1, theta), (Fraction(1, 2), Fraction(2))):
            out.append(_pair(S, "chu_vandermonde", {"m": m, "b": bb, "c": c},
                             hahn.chu_vandermonde_sides(m, bb, c)))
        for _ in range(2):
            bb, c = random_rational(rng), random_rational(rng)
            if c.denominator == 1 and c <= 0:
                c += Fraction(1, 2)
            out.append(_pair(S, "chu_vandermonde", {"m": m, "b": bb, "c": c},
                             hahn.chu_vandermonde_sides(m, bb, c)))
    # binomial convolution of hypergeometric sums: the Hahn instantiation, then random parameter sets
    one = Fraction(1)
    for r in range(n):
        for M in range(n):
            params = {"M": M, "alpha": theta, "beta": one, "upper": [-r, r + theta + 1], "lower": [2, 1 - n]}
            out.append(_pair(S, "lemma2", params,
                             hahn.lemma2_sides(M, theta, one, (-r * one, r + theta + 1), (2 * one, one - n))))
    for _ in range(random_cases):
        M = rng.randint(0, 8)
        alpha, beta = random_rational(rng) + 30, random_rational(rng) + 30
        upper = (random_rational(rng), random_rational(rng))
        lower = (random_rational(rng) + Fraction(1, 3) + 40, random_rational(rng) + 40)
        out.append(_pair(S, "lemma2", {"M": M, "alpha": alpha, "beta": beta, "upper": list(upper),
                                       "lower": list(lower)},
                         hahn.lemma2_sides(M, alpha, beta, upper, lower)))
    # partial sums of q_r(j) Theta(n-j) as a 4F3
    for r in range(n):
        for M in range(n):
            out.append(_pair(S, "sigma_r_4f3", {"n": n, "theta": theta, "r": r, "M": M},
                             hahn.sigma_r_sides(r, M, theta, n)))
    # the kernel only exists for n >= 2
    k = spectral.build_kernel(n, theta) if n >= 2 else None
    for r in range(1, n + 1):
        p = {"n": n, "theta": theta, "r": r}
        out.append(_pair(S, "f43_at_one_minus_n", p, hahn.part_sides(r, theta, n)))
        out.append(_pair(S, "phi_at_zero", p, (hahn.phi(r, 0, theta, n), 0)))
        for i in range(1, n):
            out.append(_pair(S, "lemma4_step", {**p, "i": i}, hahn.lemma4_step_sides(r, i, theta, n)))
        for i in range(1, n + 1):
            if k is not None:
                out.append(_pair(S, "lemma4", {**p, "i": i}, hahn.lemma4_exact_sides(r, i, theta, n, k)))
            out.append(_pair(S, "concluding_relation", {**p, "i": i}, hahn.concluding_sides(i, r, theta, n)))
        for name, sides in hahn.leading_coeff_sides(r, theta, n).items():
            out.append(_pair(S, f"leading_coeff_{name}", p, sides))
    for j in range(1, n + 1):
        q3f2, q2f1, closed = hahn.q_last_sides(j, theta, n)
        out.append(_rec(S, "q_last_row", {"n": n, "theta": theta, "j": j}, q3f2 == q2f1 == closed, q3f2, closed))
    q1 = hahn.hahn_basis(n, theta).values[1] if n > 1 else ()
    for j, v in enumerate(q1, start=1):
        closed = ((theta + 2) * j - (2 * n + theta)) / (2 * (1 - n))
        out.append(_pair(S, "q1_closed", {"n": n, "theta": theta, "j": j}, (v, closed)))
    return out


# -- oracle ---------------------------------------------------------------------


def oracle_suite(n: int, theta, seed: int = 0, count: int = 200) -> list:
    S = "oracle"
    p = {"n": n, "theta": theta}
    rng = random.Random(seed)
    out = []
    table = oracle.ewens_table(n, theta)
    total = sum(pr for _, pr in table)
    out.append(_rec(S, "normalization", p, total == 1, total, 1))
    tau = spectral.tau_closed(theta)
    agree = bound = 0
    for _ in range(count):
        a = random_weights(rng, n)
        rep = oracle.oracle_mean_var(n, theta, a)
        agree += rep.agree
        if n >= 2:
            bound += rep.var_exact <= tau * theta * esf.b_form(n, theta, a)
    out.append(_rec(S, "exhaustive_agreement", {**p, "vectors": count}, agree == count, agree, count))
    if n >= 2:
        out.append(_rec(S, "sharp_bound", {**p, "vectors": count}, bound == count, bound, count))
        a = spectral.extremal_a(n, theta)
        rep = oracle.oracle_mean_var(n, theta, a)
        lhs, rhs = rep.var_exact, tau * theta * esf.b_form(n, theta, a)
        out.append(_rec(S, "sharp_bound_equality", p, rep.agree and lhs == rhs, lhs, rhs))
    if n <= oracle.MAX_PERM_N:
        out.append(_rec(S, "permutation_enumeration", p, oracle.enumerate_permutations_check(n, theta)))
    return out


# -- remark ---------------------------------------------------------------------


def remark_suite(n: int, theta) -> list:
    S = "remark"
    p = {"n": n, "theta": theta}
    R = spectral.triangularize(n, theta)
    mu_n = spectral.mu_closed(n, theta)
    last_row = [R[n - 1][i] for i in range(n)]
    expect = [0] * (n - 1) + [mu_n]
    out = [_rec(S, "last_row_is_mu_n_delta", p, last_row == expect, last_row, expect)]
    info = hahn.remark_last_row(theta, n)
    out.append(_rec(S, "last_row_of_expL_proportional_to_e_n", p,
                    info["proportional"] and info["residual"] <= 1e-10,
                    gauge_constant=info["gauge_constant"], constant=info["constant"],
                    residual=info["residual"]))
    # the claimed vanishing of the last column does not hold in general
    last_col = [R[i][n - 1] for i in range(n - 1)]
    out.append(_rec(S, "last_column_diagnostic", p, None, last_col,
                    vanishes=all(x == 0 for x in last_col)))
    return out


RUNNERS = {
    "spectral": spectral_suite,
    "hahn": hahn_suite,
    "identities": identities_suite,
    "oracle": oracle_suite,
    "remark": remark_suite,
}


def run_suite(name: str, n: int, theta, seed: int = 0, count: int = 200) -> list:
    if name == "identities":
        return identities_suite(n, theta, seed)
    if name == "oracle":
        return oracle_suite(n, theta, seed, count)
    return RUNNERS[name](n, theta)


def failures(records: list) -> list:
    return [r for r in records if r["holds"] is False]
