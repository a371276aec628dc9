"""Independent ground truth for the closed-form moments.

Exhaustive sums over cycle types (and over whole permutations for small n),
a Chinese-restaurant sampler for Monte Carlo at larger n, and the
conditioned-Poisson representation checked by rejection sampling.

All randomness comes from numpy's PCG64 generator.  A run is keyed by
``(seed, streams)``: the draw count is split evenly over ``streams``
independent child seeds of ``SeedSequence(seed)``, so the result does not
depend on how many worker threads process the streams.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import esf
from .scalar import EXACT, check_mode, check_n, check_theta, rising_factorial, zero

MAX_ENUM_N = 40
MAX_PERM_N = 8
MAX_POISSON_N = 8


def enumerate_cycle_types(n: int) -> list:
    """All cycle types of S_n in decreasing lexicographic order, starting at (n, 0, ..., 0)."""
    if not 1 <= n <= MAX_ENUM_N:
        raise ValueError(f"enumeration supports 1 <= n <= {MAX_ENUM_N}, got {n}")
    out = []
    counts = [0] * n

    def fill(j, rest):
        if j > n:
            if rest == 0:
                out.append(tuple(counts))
            return
        for c in range(rest // j, -1, -1):
            counts[j - 1] = c
            fill(j + 1, rest - c * j)
        counts[j - 1] = 0

    fill(1, n)
    return out


@lru_cache(maxsize=128)
def _measure(kind, theta, n):
    return tuple((s, esf.esf_probability(n, theta, s)) for s in enumerate_cycle_types(n))


def ewens_table(n: int, theta) -> tuple:
    """``((cycle_type, probability), ...)`` over the whole support."""
    check_theta(theta)
    return _measure(type(theta), theta, n)


@dataclass
class OracleReport:
    n: int
    theta: object
    a: list
    mean_exact: object
    var_exact: object
    mean_formula: object
    var_formula: object
    agree: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def oracle_mean_var(n: int, theta, a: Sequence) -> OracleReport:
    """Mean and variance of h by summing over every cycle type, next to the closed forms."""
    mode = check_mode(theta, *a)
    mean = zero(mode)
    second = zero(mode)
    for s, p in ewens_table(n, theta):
        h = esf.additive_value(a, s)
        mean += p * h
        second += p * h * h
    var = second - mean * mean
    mean_f = esf.mean_A(n, theta, a)
    var_f = esf.variance_D(n, theta, a) if n >= 2 else zero(mode)
    if mode == EXACT:
        agree = mean == mean_f and var == var_f
    else:
        scale = max(1.0, abs(second))
        agree = abs(mean - mean_f) <= 1e-9 * scale and abs(var - var_f) <= 1e-9 * scale
    return OracleReport(n, theta, list(a), mean, var, mean_f, var_f, agree)


def permutation_cycle_type(perm: Sequence[int]) -> tuple:
    n = len(perm)
    seen = [False] * n
    lengths = []
    for start in range(n):
        if seen[start]:
            continue
        length, k = 0, start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        lengths.append(length)
    return esf.cycle_type_from_lengths(lengths, n)


def permutation_type_weights(n: int, theta) -> dict:
    """Sum of theta^w(sigma) / (theta)_n over all n! permutations, grouped by cycle type."""
    if not 1 <= n <= MAX_PERM_N:
        raise ValueError(f"permutation enumeration supports n <= {MAX_PERM_N}")
    check_theta(theta)
    norm = rising_factorial(theta, n)
    tally = {}
    for perm in itertools.permutations(range(n)):
        s = permutation_cycle_type(perm)
        tally[s] = tally.get(s, 0) + 1
    return {s: c * theta ** sum(s) / norm for s, c in tally.items()}


def enumerate_permutations_check(n: int, theta) -> bool:
    weights = permutation_type_weights(n, theta)
    table = dict(ewens_table(n, theta))
    return weights.keys() == table.keys() and all(weights[s] == table[s] for s in table)


# -- sampling -----------------------------------------------------------------


def make_rng(seed: int | None, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def crp_labels(n: int, theta, count: int, rng: np.random.Generator) -> np.ndarray:
    """Cycle labels of elements 1..n for ``count`` sequential constructions.

    Element k+1 opens a new cycle with probability theta/(theta+k); otherwise
    it joins the cycle of a uniformly chosen earlier element.
    """
    th = float(theta)
    labels = np.zeros((count, n), dtype=np.int64)
    fresh = np.ones(count, dtype=np.int64)
    rows = np.arange(count)
    for k in range(1, n):
        new = rng.random(count) < th / (th + k)
        pick = rng.integers(0, k, size=count)
        labels[:, k] = np.where(new, fresh, labels[rows, pick])
        fresh += new
    return labels


def labels_to_types(labels: np.ndarray) -> np.ndarray:
    """Rows of cycle counts (s_1..s_n) from per-element cycle labels."""
    count, n = labels.shape
    rows = np.arange(count)[:, None]
    sizes = np.bincount((rows * n + labels).ravel(), minlength=count * n).reshape(count, n)
    types = np.bincount((rows * (n + 1) + sizes).ravel(), minlength=count * (n + 1))
    return types.reshape(count, n + 1)[:, 1:]


def crp_sample(n: int, theta, rng: np.random.Generator) -> tuple:
    """One cycle type drawn from the Ewens measure."""
    check_theta(theta)
    return tuple(int(c) for c in labels_to_types(crp_labels(n, theta, 1, rng))[0])


@dataclass
class SampleBatch:
    n: int
    theta: object
    seed: int
    count: int
    streams: int
    draws: np.ndarray = field(repr=False)

    def summary(self) -> dict:
        return {"n": self.n, "theta": self.theta, "seed": self.seed, "count": self.count,
                "streams": self.streams, "mean_cycles": float(self.draws.sum(axis=1).mean())}


def _split(count: int, streams: int) -> list:
    return [count // streams + (i < count % streams) for i in range(streams)]


def _run_streams(fn, count: int, seed: int, streams: int, workers: int | None) -> list:
    sizes = _split(count, streams)
    jobs = [(make_rng(seed, i), size) for i, size in enumerate(sizes)]
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda job: fn(*job), jobs))
    return [fn(*job) for job in jobs]


def sample_batch(n: int, theta, count: int, seed: int, streams: int = 1,
                 workers: int | None = None) -> SampleBatch:
    check_n(n, 1)
    check_theta(theta)
    if streams < 1:
        raise ValueError("need at least one stream")
    parts = _run_streams(lambda rng, size: labels_to_types(crp_labels(n, theta, size, rng)),
                         count, seed, streams, workers)
    return SampleBatch(n, theta, seed, count, streams, np.vstack(parts))


def variance_with_se(h: np.ndarray) -> tuple:
    """Unbiased sample variance and the standard error of that estimate."""
    m = h.size
    if m < 2:
        raise ValueError("need at least two draws")
    c = h - h.mean()
    s2 = float(c @ c) / (m - 1)
    m4 = float(np.mean(c ** 4))
    var_s2 = (m4 - s2 * s2 * (m - 3) / (m - 1)) / m
    return s2, math.sqrt(max(var_s2, 0.0))


def mc_variance_estimate(n: int, theta, a: Sequence, count: int, seed: int,
                         streams: int = 1, workers: int | None = None) -> tuple:
    """(sample variance of h, its standard error) from ``count`` CRP draws."""
    if count < 2:
        raise ValueError("count must be at least 2")
    batch = sample_batch(n, theta, count, seed, streams, workers)
    h = batch.draws @ np.array([float(x) for x in a])
    return variance_with_se(h)


def type_frequency_zscores(draws: np.ndarray, n: int, theta) -> list:
    """Per cycle type: (type, observed count, expected probability, z-score)."""
    total = draws.shape[0]
    uniq, counts = np.unique(draws, axis=0, return_counts=True)
    observed = {tuple(int(x) for x in u): int(c) for u, c in zip(uniq, counts)}
    rows = []
    for s, p in ewens_table(n, theta):
        pf = float(p)
        k = observed.pop(s, 0)
        sd = math.sqrt(pf * (1 - pf) / total)
        z = (k / total - pf) / sd if sd > 0 else (0.0 if k == total else math.inf)
        rows.append((s, k, pf, z))
    if observed:
        raise AssertionError(f"draws outside the support: {sorted(observed)}")
    return rows


def conditioned_poisson(n: int, theta, count: int, rng: np.random.Generator) -> np.ndarray:
    """Independent Poisson(theta/j) vectors kept only when 1*xi_1 + ... + n*xi_n = n."""
    lam = float(theta) / np.arange(1, n + 1)
    xi = rng.poisson(lam, size=(count, n))
    return xi[xi @ np.arange(1, n + 1) == n]


@dataclass
class PoissonReport:
    n: int
    theta: object
    proposals: int
    accepted: int
    max_abs_z: float
    var_estimate: float | None
    var_se: float | None
    var_formula: float | None
    var_z: float | None
    passed: bool
    note: str = ""

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def conditioned_poisson_check(n: int, theta, count: int, seed: int, a: Sequence | None = None,
                              sigmas: float = 4.0, floor: int = 1000,
                              streams: int = 1, workers: int | None = None) -> PoissonReport:
    """Accepted cycle-type frequencies and Var(Y_n | ell = n) against the Ewens closed forms.

    ``count`` is the number of proposals.  Too few acceptances is reported in
    ``note`` and leaves ``passed`` False; it does not raise.
    """
    if not 1 <= n <= MAX_POISSON_N:
        raise ValueError(f"rejection sampling is limited to n <= {MAX_POISSON_N}")
    check_theta(theta)
    draws = np.vstack(_run_streams(lambda rng, size: conditioned_poisson(n, theta, size, rng),
                                   count, seed, streams, workers))
    accepted = draws.shape[0]
    if accepted < floor:
        return PoissonReport(n, theta, count, accepted, math.nan, None, None, None, None, False,
                             f"only {accepted} acceptances (< {floor})")
    zmax = max(abs(z) for *_, z in type_frequency_zscores(draws, n, theta))
    ok = zmax <= sigmas
    var_est = var_se = var_f = var_z = None
    if a is not None and n >= 2:
        var_est, var_se = variance_with_se(draws @ np.array([float(x) for x in a]))
        var_f = float(esf.variance_D(n, theta, a))
        var_z = (var_est - var_f) / var_se if var_se > 0 else 0.0
        ok = ok and abs(var_z) <= sigmas
    return PoissonReport(n, theta, count, accepted, zmax, var_est, var_se, var_f, var_z, ok)
