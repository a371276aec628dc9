from fractions import Fraction as F
import math

import numpy as np
import pytest

from ewensvar import esf, oracle, spectral

# p(n) for n = 1..12
PARTITIONS = [1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77]


def test_enumerate_cycle_types():
    assert oracle.enumerate_cycle_types(2) == [(2, 0), (0, 1)]
    assert len(oracle.enumerate_cycle_types(4)) == 5
    for n, p in enumerate(PARTITIONS, start=1):
        types = oracle.enumerate_cycle_types(n)
        assert len(types) == len(set(types)) == p
        assert all(esf.ell(s) == n for s in types)
        assert types == sorted(types, reverse=True)
    with pytest.raises(ValueError):
        oracle.enumerate_cycle_types(41)


def test_oracle_examples():
    rep = oracle.oracle_mean_var(2, F(1), [F(-2), F(2)])
    assert rep.var_exact == rep.var_formula == 9 and rep.agree
    n, theta = 7, F(1, 2)
    ones = [F(1)] * n
    rep = oracle.oracle_mean_var(n, theta, ones)
    assert rep.agree and rep.var_exact == esf.variance_D(n, theta, ones)
    assert oracle.esf.esf_probability(2, F(2), (2, 0)) == F(2, 3)
    rep = oracle.oracle_mean_var(2, F(2), [F(1), F(0)])
    assert rep.var_exact == F(8, 9) == rep.var_formula


def test_oracle_float_mode():
    a = [math.log(j) for j in range(1, 9)]
    rep = oracle.oracle_mean_var(8, 1.5, a)
    assert rep.agree


def test_permutation_enumeration():
    w = oracle.permutation_type_weights(3, F(1))
    assert w == {(3, 0, 0): F(1, 6), (1, 1, 0): F(1, 2), (0, 0, 1): F(1, 3)}
    assert oracle.permutation_type_weights(2, F(1)) == {(2, 0): F(1, 2), (0, 1): F(1, 2)}
    for theta in (F(1, 2), F(1), F(2), F(3)):
        for n in range(1, 8):
            assert oracle.enumerate_permutations_check(n, theta)
    with pytest.raises(ValueError):
        oracle.permutation_type_weights(9, F(1))


def test_sharp_bound_on_oracle():
    n, theta = 6, F(7, 3)
    tau = spectral.tau_closed(theta)
    a = spectral.extremal_a(n, theta)
    rep = oracle.oracle_mean_var(n, theta, a)
    assert rep.var_exact == tau * theta * esf.b_form(n, theta, a)


def test_crp_single_draws():
    rng = oracle.make_rng(11)
    assert oracle.crp_sample(1, F(2), rng) == (1,)
    for _ in range(20):
        s = oracle.crp_sample(9, 0.7, rng)
        assert esf.ell(s) == 9


def test_labels_to_types():
    labels = np.array([[0, 0, 1, 0, 2], [0, 1, 2, 3, 4]])
    assert oracle.labels_to_types(labels).tolist() == [[2, 0, 1, 0, 0], [5, 0, 0, 0, 0]]


def test_crp_new_cycle_probability():
    n, theta, count = 8, 1.7, 100_000
    labels = oracle.crp_labels(n, theta, count, oracle.make_rng(5))
    for k in range(1, n):
        new = labels[:, k] == labels[:, :k].max(axis=1) + 1
        p = theta / (theta + k)
        se = math.sqrt(p * (1 - p) / count)
        assert abs(new.mean() - p) <= 3 * se


def test_crp_type_frequencies_small():
    batch = oracle.sample_batch(5, F(1, 2), 200_000, seed=2)
    assert all(esf.ell(s) == 5 for s in batch.draws[:100])
    rows = oracle.type_frequency_zscores(batch.draws, 5, F(1, 2))
    assert max(abs(z) for *_, z in rows) <= 4


def test_sampler_determinism():
    a = oracle.sample_batch(12, 1.3, 5000, seed=99, streams=4)
    b = oracle.sample_batch(12, 1.3, 5000, seed=99, streams=4, workers=3)
    c = oracle.sample_batch(12, 1.3, 5000, seed=98, streams=4)
    assert np.array_equal(a.draws, b.draws)
    assert not np.array_equal(a.draws, c.draws)
    assert a.draws.shape == (5000, 12)


def test_mc_variance_examples():
    assert oracle.mc_variance_estimate(6, 1.0, [0.0] * 6, 100, seed=1) == (0.0, 0.0)
    with pytest.raises(ValueError):
        oracle.mc_variance_estimate(6, 1.0, [1.0] * 6, 1, seed=1)
    n, theta = 30, F(2)
    a = spectral.extremal_a(n, theta)
    var, se = oracle.mc_variance_estimate(n, theta, a, 100_000, seed=4)
    scale = float(theta * esf.b_form(n, theta, a))
    assert abs(var / scale - 4 / 3) <= 4 * se / scale


def test_variance_with_se_against_normal():
    h = oracle.make_rng(0).normal(size=400_000) * 2
    var, se = oracle.variance_with_se(h)
    # sd of the sample variance of N(0, 4) is 4 sqrt(2/m)
    assert se == pytest.approx(4 * math.sqrt(2 / h.size), rel=0.02)
    assert abs(var - 4) <= 4 * se


def test_conditioned_poisson():
    rep = oracle.conditioned_poisson_check(2, F(1), 100_000, seed=3)
    assert rep.passed and rep.accepted > 1000
    rep = oracle.conditioned_poisson_check(1, F(1), 10_000, seed=3)
    assert rep.passed and rep.max_abs_z == 0
    rep = oracle.conditioned_poisson_check(5, F(1, 2), 400_000, seed=8, a=[1, 2, 3, 4, 5])
    assert rep.passed and rep.var_formula == 0
    rep = oracle.conditioned_poisson_check(5, F(1, 2), 400_000, seed=8, a=[2, -1, 0, 3, 1])
    assert rep.passed and abs(rep.var_z) <= 4


def test_conditioned_poisson_floor_is_reported():
    rep = oracle.conditioned_poisson_check(8, F(1, 3), 50, seed=1)
    assert not rep.passed and "acceptances" in rep.note
    with pytest.raises(ValueError):
        oracle.conditioned_poisson_check(9, F(1), 10, seed=1)
