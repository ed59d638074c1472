import numpy as np
import pytest

from shamp.spectral import (ComplexModeState, PhysicalSamples, analyze, apply_multiplier,
                            is_conjugate_symmetric, make_grid, modulate_reconstruct, synthesize,
                            synthesize_coeffs, synthesize_oversampled)


def test_make_grid_examples():
    assert make_grid(2, 1.0).modes.tolist() == [-1.0, 0.0]
    assert make_grid(4, 0.5).modes.tolist() == [-1.0, -0.5, 0.0, 0.5]
    with pytest.raises(ValueError, match="n_modes must be even"):
        make_grid(3, 1.0)
    with pytest.raises(ValueError):
        make_grid(0, 1.0)
    with pytest.raises(ValueError):
        make_grid(4, -1.0)


def test_grid_invariants():
    g = make_grid(16, 0.25)
    assert np.all(np.diff(g.modes) > 0)
    assert g.period == pytest.approx(2 * np.pi / 0.25)
    assert np.allclose(g.modes[1:], -g.modes[g.mirror_index()][1:])
    with pytest.raises(ValueError):
        g.modes[0] = 1.0


def test_state_validation():
    g = make_grid(4, 1.0)
    with pytest.raises(ValueError, match="length"):
        ComplexModeState(g, [1, 2, 3])
    with pytest.raises(ValueError, match="finite"):
        ComplexModeState(g, [np.nan, 0, 0, 0])
    with pytest.raises(ValueError, match="conjugate"):
        ComplexModeState(g, [0, 1j, 0, 1j], real=True)
    ComplexModeState(g, [5.0, -1j, 2.0, 1j], real=True)  # lone endpoint is unconstrained


def test_points_validation():
    with pytest.raises(ValueError, match="increasing"):
        PhysicalSamples([0.0, 0.0], [1.0, 1.0])
    with pytest.raises(ValueError, match="finite"):
        PhysicalSamples([0.0, 1.0], [1.0, np.inf])


def test_synthesize_examples():
    g = make_grid(8, 1.0)
    x = np.linspace(-3, 3, 13)
    assert np.all(synthesize(ComplexModeState.zeros(g, real=True), x).values == 0)
    c = np.zeros(8, complex)
    c[4] = 1.0
    assert np.allclose(synthesize(ComplexModeState(g, c, real=True), x).values, 1.0)
    c = np.zeros(8, complex)
    c[3] = c[5] = 0.5
    s = synthesize(ComplexModeState(g, c, real=True), x)
    assert s.is_real
    assert np.allclose(s.values, np.cos(x), atol=1e-14)


def test_fft_path_matches_direct_sum():
    rng = np.random.default_rng(0)
    g = make_grid(32, 0.3)
    c = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    x = g.uniform_points()
    fast = synthesize_coeffs(g, c, x)
    direct = c @ np.exp(1j * np.outer(x, g.modes)).T
    assert np.allclose(fast, direct, rtol=0, atol=1e-12)
    assert np.allclose(analyze(g, fast), c, atol=1e-13)


def test_oversampled_is_same_polynomial():
    rng = np.random.default_rng(1)
    g = make_grid(16, 0.5)
    c = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    x, v = synthesize_oversampled(g, c, 4)
    assert x.size == 64
    direct = np.exp(1j * np.outer(x, g.modes)) @ c
    assert np.allclose(v, direct, atol=1e-12)


def test_parseval():
    # sum |c|^2 equals the mean square of u over one period
    g = make_grid(64, 0.2)
    c = np.exp(-g.modes**2) * (1 + 0.3j * g.modes)
    c = 0.5 * (c + np.conj(c[g.mirror_index()]))
    c[0] = 0
    x = np.linspace(-g.period / 2, g.period / 2, 20001)
    u = synthesize(ComplexModeState(g, c, real=True), x).values
    mass = np.trapezoid(u * u, x)
    assert np.sum(np.abs(c) ** 2) == pytest.approx(g.delta_k / (2 * np.pi) * mass, rel=1e-6)


def test_apply_multiplier():
    rng = np.random.default_rng(2)
    g = make_grid(16, 0.5)
    s = ComplexModeState(g, rng.standard_normal(16) + 1j * rng.standard_normal(16))
    assert np.array_equal(apply_multiplier(s, lambda k: np.ones_like(k)).coeffs, s.coeffs)
    assert np.all(apply_multiplier(s, lambda k: 0.0).coeffs == 0)
    m1 = lambda k: np.exp(-k**2)
    m2 = lambda k: 1 + 1j * k
    two = apply_multiplier(apply_multiplier(s, m1), m2)
    one = apply_multiplier(s, lambda k: m1(k) * m2(k))
    assert np.allclose(two.coeffs, one.coeffs, rtol=1e-14, atol=0)
    with pytest.raises(ValueError, match="K=0.0"), np.errstate(divide="ignore"):
        apply_multiplier(s, lambda k: 1.0 / k)


def test_multiplier_keeps_real_flag():
    g = make_grid(8, 1.0)
    c = np.zeros(8, complex)
    c[3] = c[5] = 0.5
    s = ComplexModeState(g, c, real=True)
    assert apply_multiplier(s, lambda k: np.exp(-k**2)).real
    assert is_conjugate_symmetric(g, apply_multiplier(s, lambda k: k * k).coeffs)


def test_modulate_reconstruct_examples():
    X = np.linspace(-1, 1, 11)
    z = modulate_reconstruct(PhysicalSamples(X, np.zeros(11, complex)), 0.5)
    assert np.all(z.values == 0)
    one = modulate_reconstruct(PhysicalSamples(X, np.ones(11, complex)), 0.5)
    assert np.allclose(one.points, X / 0.5)
    assert np.allclose(one.values, 2 * np.cos(X / 0.5))
    i = modulate_reconstruct(PhysicalSamples(X, np.full(11, 1j)), 0.5)
    assert np.allclose(i.values, -2 * np.sin(X / 0.5))
    rng = np.random.default_rng(3)
    r = modulate_reconstruct(PhysicalSamples(X, rng.standard_normal(11) + 1j * rng.standard_normal(11)), 0.1)
    assert r.is_real
