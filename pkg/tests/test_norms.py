import numpy as np
import pytest

from shamp.acceptance import norm_equivalence_violations, random_piecewise_linear
from shamp.norms import (SpaceTimeSamples, WeightParams, c0_gamma, c0_gamma_spacetime,
                         curly_c0_gamma, window_sups)
from shamp.spectral import PhysicalSamples

X = np.linspace(-4, 4, 801)


def field(v, x=X):
    return PhysicalSamples(x, np.broadcast_to(v, x.shape).astype(float))


def test_weight_params_range():
    with pytest.raises(ValueError, match=r"gamma out of range \(0, 0.5\)"):
        WeightParams(0.7)
    with pytest.raises(ValueError):
        WeightParams(0.0)


def test_c0_examples():
    w = WeightParams(0.2)
    assert c0_gamma(field(0.0), w) == 0.0
    assert c0_gamma(field(-3.5), w) == 3.5
    assert c0_gamma(field((1 + X**2) ** 0.1), w) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError, match="real"):
        c0_gamma(PhysicalSamples(X, X + 0j), w)


def test_curly_examples():
    w = WeightParams(0.2)
    assert curly_c0_gamma(field(0.0), w) == 0.0
    assert curly_c0_gamma(field(1.0), w) == 1.0
    u = np.where((X >= 2) & (X <= 3), 8 * (X - 2), 0.0)
    # hand oracle over L in {1, 2, 3, 4}: sups 0, 0, 8, 8 -> best 8 / 3
    assert curly_c0_gamma(field(u), 1.0, 4) == pytest.approx(8 / 3, rel=1e-12)
    with pytest.raises(ValueError):
        curly_c0_gamma(field(1.0), w, 0.5)


def test_window_sups_oracle():
    rng = np.random.default_rng(0)
    x = np.sort(rng.uniform(-10, 10, 500))
    v = rng.standard_normal((3, 500))
    L = [0.5, 2.0, 7.5, 10.0]
    got = window_sups(x, v, L)
    for i, l in enumerate(L):
        m = np.abs(x) <= l
        assert np.array_equal(got[:, i], np.abs(v[:, m]).max(axis=1))


def test_spacetime_examples():
    w = WeightParams(0.1)
    zeros = np.zeros((4, X.size))
    assert c0_gamma_spacetime(SpaceTimeSamples([0, 1, 2, 3], X, zeros), w) == 0.0
    one = zeros.copy()
    one[2] = 5.0
    assert c0_gamma_spacetime(SpaceTimeSamples([0, 1, 2, 3], X, one), w) == 5.0
    u = np.sin(X)
    st = SpaceTimeSamples.from_fields([0.0, 0.5, 1.0], [field(u)] * 3)
    assert c0_gamma_spacetime(st, w) == c0_gamma(field(u), w)
    with pytest.raises(ValueError):
        SpaceTimeSamples([1.0, 0.0], X, zeros[:2])


@pytest.mark.parametrize("gamma", [0.05, 0.1, 0.3])
def test_equivalence_random_fields(gamma):
    assert norm_equivalence_violations(gamma, n_fields=300, seed=7) == 0


@pytest.mark.parametrize("n", [2, 4, 10])
def test_rescaling_bounds(n):
    # u(eps .) is exactly resampleable when eps = 1/n and points scale by n
    eps = 1.0 / n
    rng = np.random.default_rng(n)
    for _ in range(50):
        g = float(rng.uniform(0.01, 0.49))
        u = random_piecewise_linear(rng, int(rng.integers(1, 9)))
        v = PhysicalSamples(u.points / eps, u.values)
        cu = curly_c0_gamma(u, g)
        cv = curly_c0_gamma(v, g)
        assert eps**g * cu <= cv * (1 + 1e-12)
        assert cv <= 2**g * cu * (1 + 1e-12)


def test_monotone_in_gamma():
    rng = np.random.default_rng(5)
    for _ in range(100):
        u = random_piecewise_linear(rng, 10)
        assert c0_gamma(u, 0.3) <= c0_gamma(u, 0.1) <= c0_gamma(u, 0.05)
