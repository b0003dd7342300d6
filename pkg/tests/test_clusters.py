import math

import numpy as np
import pytest

from boolperc.clusters import cluster_stats, component_labels, origin_cluster, union_diameter
from boolperc.model import ModelParams, Window, make_realization, sample_realization
from boolperc.radius_laws import Constant, Mixture, Pareto, Uniform

from oracles import brute_origin_cluster, brute_stats

LAWS = [Constant(0.7), Uniform(0.2, 1.5), Pareto(2.5, 0.3),
        Mixture((0.7, 0.3), (Constant(0.4), Pareto(1.8, 0.5)))]


def hand(d, centers, radii, L=20.0):
    return make_realization(ModelParams(d, 1.0, Constant(1)), Window(L), centers, radii)


def test_empty():
    real = hand(2, np.zeros((0, 2)), [])
    assert origin_cluster(real) == []
    s = cluster_stats(real)
    assert (s.covered, s.N, s.D, s.M, s.boundary_hit) == (False, 0, 0.0, 0.0, False)


def test_chain_in_line():
    real = hand(1, [[0.5], [2.0], [10.0]], [1, 1, 1])
    assert origin_cluster(real) == [0, 1]


def test_single_ball_stats():
    s = cluster_stats(hand(1, [[0.5]], [1]))
    assert (s.covered, s.N, s.D, s.M) == (True, 1, 2.0, 1.5)


def test_pair_stats():
    s = cluster_stats(hand(1, [[0.0], [1.5]], [1, 1]))
    assert (s.N, s.D, s.M) == (2, 3.5, 2.5)


def test_tangent_not_connected():
    real = hand(2, [[0.0, 0.0], [2.0, 0.0]], [1, 1])
    assert origin_cluster(real) == [0]


def test_boundary_flag():
    assert cluster_stats(hand(1, [[0.0], [1.5]], [1, 1], L=2.0)).boundary_hit
    assert not cluster_stats(hand(1, [[0.0], [1.5]], [1, 1], L=2.5)).boundary_hit


def random_configs(count, seed=0):
    rng = np.random.default_rng(seed)
    for t in range(count):
        d = int(rng.integers(1, 4))
        n = int(rng.integers(0, 51))
        law = LAWS[t % len(LAWS)]
        side = float(rng.uniform(1, 6))
        centers = rng.uniform(-side, side, (n, d))
        radii = law.sample(rng, n)
        yield d, centers, radii, side


def test_matches_bfs_oracle():
    for d, centers, radii, side in random_configs(300, seed=1):
        real = hand(d, centers, radii, L=side)
        assert origin_cluster(real) == brute_origin_cluster(centers.tolist(), radii.tolist())
        got, want = cluster_stats(real), brute_stats(centers.tolist(), radii.tolist(), side)
        assert (got.covered, got.N, got.boundary_hit) == (want["covered"], want["N"], want["boundary_hit"])
        assert got.D == pytest.approx(want["D"], rel=1e-12)
        assert got.M == pytest.approx(want["M"], rel=1e-12)


def test_cell_size_invariance():
    for d, centers, radii, _ in random_configs(200, seed=2):
        if len(radii) < 2:
            continue
        rmax = radii.max()
        labels = [component_labels(centers, radii, cell_size=c) for c in (rmax, 2 * rmax, 0.3 * rmax)]
        for other in labels[1:]:
            np.testing.assert_array_equal(labels[0], other)


def test_diameter_sampling_oracle():
    rng = np.random.default_rng(4)
    checked = 0
    while checked < 40:
        n = int(rng.integers(1, 8))
        centers = rng.uniform(-1.5, 1.5, (n, 2))
        radii = rng.uniform(0.3, 1.2, n)
        real = hand(2, centers, radii)
        members = origin_cluster(real)
        if not members:
            continue
        checked += 1
        D = cluster_stats(real).D
        # sample points of each ball near its boundary and take the sup of pair distances
        pts = []
        for i in members:
            u = rng.normal(size=(2000, 2))
            u /= np.linalg.norm(u, axis=1)[:, None]
            pts.append(centers[i] + radii[i] * (1 - 1e-12) * u * rng.uniform(0.98, 1, (2000, 1)))
        pts = np.concatenate(pts)
        sub = pts[rng.choice(len(pts), min(len(pts), 3000), replace=False)]
        far = np.sqrt(((sub[:, None, :] - sub[None, :, :]) ** 2).sum(-1)).max()
        assert far <= D
        assert far > D - 0.1


def test_covered_frequency_void_probability():
    params = ModelParams(1, 0.1, Constant(1))
    n = 20_000
    hits = sum(cluster_stats(sample_realization(params, Window(20), 1.0, s)).covered for s in range(n))
    p = 1 - math.exp(-0.1 * 2 * 1)
    sigma = math.sqrt(p * (1 - p) / n)
    assert abs(hits / n - p) < 3 * sigma


def test_union_diameter_blocks():
    rng = np.random.default_rng(0)
    c = rng.normal(size=(3000, 3))
    r = rng.uniform(0.1, 1, 3000)
    full = np.sqrt(((c[:200, None] - c[None, :200]) ** 2).sum(-1)) + r[:200, None] + r[None, :200]
    assert union_diameter(c[:200], r[:200]) == full.max()
    assert union_diameter(c, r) >= union_diameter(c[:200], r[:200])
