import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from boolperc.model import (MemoryBudgetError, ModelParams, Window, dump_realization,
                            expected_count, load_realization, sample_realization, smallest_r_cut,
                            stream_seed, truncation_error_bound)
from boolperc.radius_laws import Constant, Pareto, Uniform


def test_void_probability_tiny_lambda():
    L, rcut = 1.0, 1.0
    lam = 1e-9 / (2 * (L + rcut)) ** 2
    params = ModelParams(2, lam, Constant(1))
    assert all(len(sample_realization(params, Window(L), rcut, s)) == 0 for s in range(2000))


def test_poisson_count_moments():
    params = ModelParams(2, 0.5, Constant(1))
    counts = np.array([len(sample_realization(params, Window(2), 1.0, s)) for s in range(3000)])
    mean = expected_count(params, Window(2), 1.0)
    assert mean == 0.5 * 36
    assert abs(counts.mean() - mean) < 3 * math.sqrt(mean / len(counts))
    assert counts.var() == pytest.approx(mean, rel=0.1)


def test_centers_in_halo_box():
    params = ModelParams(2, 0.3, Uniform(0.5, 1.5))
    real = sample_realization(params, Window(3), 2.0, 42)
    assert np.all(np.abs(real.centers) <= 5.0)
    assert real.truncation_error == truncation_error_bound(params, Window(3), 2.0)


def test_same_seed_identical():
    params = ModelParams(2, 0.3, Pareto(3, 1))
    a = sample_realization(params, Window(3), 5.0, 99)
    b = sample_realization(params, Window(3), 5.0, 99)
    np.testing.assert_array_equal(a.centers, b.centers)
    np.testing.assert_array_equal(a.radii, b.radii)
    c = sample_realization(params, Window(3), 5.0, 100)
    assert len(c) != len(a) or not np.array_equal(c.radii, a.radii)


def test_truncation_examples():
    assert truncation_error_bound(ModelParams(2, 1.0, Constant(1)), Window(5), 1.0) == 0
    assert truncation_error_bound(ModelParams(2, 0.01, Pareto(2, 1)), Window(1), 1e6) == 1
    oracle = integrate.quad(lambda r: (2 + 2 * r) * 3 * r**-4, 10, math.inf, epsrel=1e-13)[0]
    got = truncation_error_bound(ModelParams(1, 1.0, Pareto(3, 1)), Window(1), 10.0)
    assert got == pytest.approx(oracle, rel=1e-12)
    assert got == pytest.approx(0.032, rel=1e-12)


@given(st.floats(0.01, 50), st.floats(0.01, 50), st.floats(0.01, 2), st.floats(0.5, 10))
@settings(max_examples=60)
def test_truncation_monotone(r1, r2, lam, L):
    lo, hi = min(r1, r2), max(r1, r2)
    law = Pareto(3.5, 1)
    p = ModelParams(2, lam, law)
    assert truncation_error_bound(p, Window(L), hi) <= truncation_error_bound(p, Window(L), lo)
    assert truncation_error_bound(p, Window(L), lo) <= truncation_error_bound(ModelParams(2, 2 * lam, law), Window(L), lo)
    assert truncation_error_bound(p, Window(L), lo) <= truncation_error_bound(p, Window(2 * L), lo)


def test_window_hitting_count_stable_across_rcut():
    # statistical total-variation proxy: mean count of balls meeting the window
    params = ModelParams(1, 0.5, Pareto(3, 1))
    L, n = 2.0, 4000
    means = []
    for rcut in (3.0, 30.0):
        hits = []
        for s in range(n):
            real = sample_realization(params, Window(L), rcut, stream_seed(5, s))
            hits.append(np.sum(np.maximum(np.abs(real.centers[:, 0]) - L, 0) < real.radii))
        means.append((np.mean(hits), np.std(hits) / math.sqrt(n), truncation_error_bound(params, Window(L), rcut)))
    (m1, s1, t1), (m2, s2, t2) = means
    assert abs(m1 - m2) < t1 + t2 + 3 * math.hypot(s1, s2)


def test_hitting_mode_matches_halo_mode():
    params = ModelParams(2, 0.2, Pareto(3, 1))
    L, n = 2.0, 3000
    halo = [len(sample_realization(params, Window(L), 40.0, stream_seed(1, s))) for s in range(300)]
    hit = []
    for s in range(n):
        real = sample_realization(params, Window(L), math.inf, stream_seed(2, s), hitting=True)
        excess = np.maximum(np.abs(real.centers) - L, 0)
        assert np.all(np.sqrt((excess**2).sum(axis=1)) < real.radii)
        hit.append(len(real))
    # exact mean of the number of balls meeting the square: lambda E|W + B(0,R)|
    er, er2 = 1.5, 3.0
    exact = 0.2 * ((2 * L) ** 2 + 4 * 2 * L * er + math.pi * er2)
    assert abs(np.mean(hit) - exact) < 4 * np.std(hit) / math.sqrt(n)
    assert np.mean(halo) > np.mean(hit)


def test_memory_budget():
    with pytest.raises(MemoryBudgetError):
        sample_realization(ModelParams(2, 10.0, Constant(1)), Window(1e4), 1.0, 0)


def test_dump_load_roundtrip():
    params = ModelParams(2, 0.4, Pareto(3, 1))
    real = sample_realization(params, Window(2), 3.0, 7)
    back = load_realization(dump_realization(real), "pareto:3:1")
    np.testing.assert_array_equal(back.centers, real.centers)
    np.testing.assert_array_equal(back.radii, real.radii)
    assert back.truncation_error == real.truncation_error
    assert back.seed == 7 and back.r_cut == 3.0


def test_smallest_r_cut():
    params = ModelParams(2, 0.05, Pareto(3.5, 1))
    r = smallest_r_cut(params, Window(10), 1e-4)
    assert truncation_error_bound(params, Window(10), r) <= 1e-4
    assert truncation_error_bound(params, Window(10), r * 0.99) > 1e-4
    assert smallest_r_cut(ModelParams(2, 0.05, Pareto(2, 1)), Window(10), 1e-4) is None
    assert smallest_r_cut(ModelParams(2, 0.05, Constant(1)), Window(10), 1e-6) <= 1.0 + 1e-5


def test_stream_seeds_distinct():
    seeds = {stream_seed(123, i) for i in range(100_000)}
    assert len(seeds) == 100_000
    assert stream_seed(0, 0) != stream_seed(1, 0)
