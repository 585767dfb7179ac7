import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from onlinebb.errors import DegenerateSecant, InvalidArgument
from onlinebb.losses import random_quadratic
from onlinebb.steppers import SecantPair, StepPolicy, bb1, bb2, next_step


def pair(s, y):
    return SecantPair(np.array(s, dtype=float), np.array(y, dtype=float))


@pytest.mark.parametrize(
    "s, y, one, two",
    [
        ([1, 0], [2, 0], 0.5, 0.5),
        ([3, 4], [3, 4], 1.0, 1.0),
        # s's = 2, s'y = 3, y'y = 5
        ([1, 1], [1, 2], 2 / 3, 3 / 5),
    ],
)
def test_bb_examples(s, y, one, two):
    assert bb1(pair(s, y)) == pytest.approx(one, rel=1e-15)
    assert bb2(pair(s, y)) == pytest.approx(two, rel=1e-15)


def test_bb_degenerate():
    with pytest.raises(DegenerateSecant):
        bb1(pair([1, 0], [0, 1]))
    with pytest.raises(DegenerateSecant):
        bb2(pair([1, 0], [0, 0]))


def test_next_step_examples():
    assert next_step(StepPolicy("constant", alpha0=0.1), None, 17) == 0.1
    assert next_step(StepPolicy("diminishing", alpha0=1.0), None, 4) == 0.5
    p = StepPolicy("bb1", fallback=0.1)
    assert p.next_step(pair([1, 1], [-1, -1]), 2) == 0.1
    assert p.last_flagged


def test_round_one_bootstrap_is_not_flagged():
    p = StepPolicy("bb2", fallback=0.25, alpha_min=1e-3)
    assert p.next_step(None, 1) == 0.25
    assert not p.last_flagged


def test_clamping():
    p = StepPolicy("bb1", alpha_min=0.01, alpha_max=2.0, fallback=0.1)
    assert p.next_step(pair([1, 0], [1e-3, 0]), 2) == 2.0
    assert p.next_step(pair([1, 0], [1e3, 0]), 3) == 0.01
    assert not p.last_flagged


def test_tiny_denominators_fall_back():
    p = StepPolicy("bb2", fallback=0.1)
    assert p.next_step(pair([1e-8, 0], [1e-8, 0]), 2) == 0.1
    assert p.last_flagged


def test_alternation_schedule():
    p = StepPolicy("alt_bb", period=3)
    used = [p.formula_for(k) for k in range(1, 10)]
    assert used == ["bb1"] * 3 + ["bb2"] * 3 + ["bb1"] * 3
    sp = pair([1, 1], [1, 2])
    assert p.next_step(sp, 2) == pytest.approx(2 / 3)
    assert p.next_step(sp, 4) == pytest.approx(3 / 5)


def test_policy_validation():
    with pytest.raises(InvalidArgument):
        StepPolicy("newton")
    with pytest.raises(InvalidArgument):
        StepPolicy("bb1", alpha_min=1.0, fallback=0.1)
    with pytest.raises(InvalidArgument):
        StepPolicy("constant", alpha0=0.0)
    with pytest.raises(InvalidArgument):
        StepPolicy("alt_bb", period=0)


def test_spectral_sandwich_and_ordering():
    rng = np.random.default_rng(0)
    for seed in range(5):
        f = random_quadratic(np.random.default_rng(seed), 6, (0.5, 20.0), (0, 0))
        eig = np.linalg.eigvalsh(f.curvature)
        for _ in range(200):
            s = rng.standard_normal(6)
            p = pair(s, f.curvature @ s)
            b1, b2 = bb1(p), bb2(p)
            assert 1 / eig[-1] - 1e-12 <= b2 <= b1 <= 1 / eig[0] + 1e-12


def test_isotropic_exactness():
    rng = np.random.default_rng(4)
    for lam in (0.5, 2.0, 7.0):
        for _ in range(20):
            s = rng.standard_normal(5)
            p = pair(s, lam * s)
            assert bb1(p) == pytest.approx(1 / lam, rel=1e-14)
            assert bb2(p) == pytest.approx(1 / lam, rel=1e-14)


vec = arrays(np.float64, 4, elements=st.floats(-10, 10))


@settings(max_examples=300, deadline=None)
@given(vec, vec, st.floats(0.01, 100) | st.floats(-100, -0.01))
def test_scale_invariance_and_cauchy_schwarz(s, y, t):
    p = pair(s, y)
    if p.sy <= 1e-8 or p.yy <= 1e-8:
        return
    q = pair(t * s, t * y)
    assert bb1(q) == pytest.approx(bb1(p), rel=1e-12)
    assert bb2(q) == pytest.approx(bb2(p), rel=1e-12)
    assert bb2(p) <= bb1(p) * (1 + 1e-12)


special = st.sampled_from([np.zeros(4), np.ones(4), -np.ones(4), np.array([1e-9, 0, 0, 0])])


@settings(max_examples=400, deadline=None)
@given(st.sampled_from(["bb1", "bb2", "alt_bb"]), vec | special, vec | special, st.integers(1, 50))
def test_safeguard_totality(kind, s, y, k):
    p = StepPolicy(kind, alpha_min=1e-4, alpha_max=50.0, fallback=0.1)
    for candidate in (pair(s, y), pair(s, -s), pair(s, np.zeros(4)), None):
        a = p.next_step(candidate, k)
        assert 1e-4 <= a <= 50.0
