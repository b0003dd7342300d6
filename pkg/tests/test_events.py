import math

import numpy as np
import pytest

from boolperc.events import (EventSpec, PreconditionError, decide, event_cover, event_G, event_H,
                             event_H_tilde)
from boolperc.model import ModelParams, Window, make_realization
from boolperc.radius_laws import Constant

from oracles import brute_G, brute_H


def hand(d, centers, radii, L=100.0):
    return make_realization(ModelParams(d, 1.0, Constant(1)), Window(L), centers, radii)


@pytest.mark.parametrize("alpha", [1.0, 0.3, 2.5])
def test_G_examples(alpha):
    empty = hand(2, np.zeros((0, 2)), [])
    assert not event_G(empty, None, alpha)
    assert not event_G(hand(2, [[5 * alpha, 0]], [4 * alpha]), None, alpha)
    assert event_G(hand(2, [[4 * alpha, 0]], [4 * alpha]), None, alpha)


def test_G_shifted_x():
    x = (3.0, -2.0)
    assert event_G(hand(2, [[7.0, -2.0]], [4.0]), x, 1.0)
    assert not event_G(hand(2, [[8.0, -2.0]], [4.0]), x, 1.0)


def test_G_precondition():
    with pytest.raises(PreconditionError):
        event_G(hand(2, [[0, 0]], [1], L=5), None, 1.0)


def test_H_examples():
    assert not event_H(hand(2, np.zeros((0, 2)), []), 1.0)
    assert event_H(hand(2, [[12.0, 0]], [3.5]), 1.0)
    assert not event_H(hand(2, [[12.0, 0]], [3.0]), 1.0)


def test_H_tilde_examples():
    assert not event_H_tilde(hand(2, np.zeros((0, 2)), [], L=100), 1.0)
    assert event_H_tilde(hand(2, [[99.0, 0]], [1.0], L=100), 1.0)
    assert not event_H_tilde(hand(2, [[101.0, 0]], [50.0], L=200), 1.0)
    with pytest.raises(PreconditionError):
        event_H_tilde(hand(2, [[0, 0]], [1], L=50), 1.0)


def test_cover_semantics():
    real = hand(1, [[0.5]], [1.0])
    assert event_cover(real, 0.0)
    assert event_cover(real, 0.5)
    assert not event_cover(real, 0.51)
    assert not event_cover(hand(1, [[1.0]], [1.0]), 0.0)


def handcrafted(count, seed=0):
    """Configurations concentrated near the thresholds of G and H."""
    rng = np.random.default_rng(seed)
    for t in range(count):
        d = int(rng.integers(1, 4))
        alpha = float(rng.choice([0.5, 1.0, 2.0]))
        n = int(rng.integers(0, 25))
        dirs = rng.normal(size=(n, d))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        # norms on a grid of multiples of alpha/2 to hit ties exactly
        norms = alpha * 0.5 * rng.integers(0, 30, n)
        radii = alpha * 0.5 * rng.integers(1, 12, n)
        if d == 1 or t % 3 == 0:
            dirs = np.zeros((n, d))
            dirs[:, 0] = rng.choice([-1.0, 1.0], n)
        yield d, alpha, dirs * norms[:, None], radii


def test_G_H_match_brute_force():
    count = 0
    for d, alpha, centers, radii in handcrafted(500, seed=3):
        real = hand(d, centers, radii, L=20 * alpha)
        cl, rl = centers.tolist(), radii.tolist()
        assert event_G(real, None, alpha) == brute_G(cl, rl, [0.0] * d, alpha)
        assert event_H(real, alpha) == brute_H(cl, rl, alpha)
        count += 1
    assert count == 500


def test_event_spec_defaults():
    assert EventSpec("MReach", alpha=2.0).threshold == 18.0
    assert EventSpec("DTail", threshold=5.0).scale == 5.0
    with pytest.raises(ValueError):
        EventSpec("G")
    with pytest.raises(ValueError):
        EventSpec("bogus", alpha=1.0)
    with pytest.raises(ValueError):
        EventSpec("DTail")


def test_decide_reports_censoring():
    real = hand(1, [[0.0], [1.5]], [1, 1], L=2.0)
    assert decide(real, EventSpec("DTail", threshold=3.0)) == (True, True)
    assert decide(real, EventSpec("MReach", alpha=1.0)) == (False, True)
    assert decide(real, EventSpec("Cover", threshold=0.0)) == (True, False)
