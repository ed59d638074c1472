import math

import numpy as np
import pytest

from shamp.kernels import KernelParams
from shamp.spectral import make_grid, synthesis_matrix
from shamp.stochastic import (CoupledPath, NoiseStream, advance, coupled_step, error_snapshot,
                              joint_transition, sample_complex_gaussian,
                              sample_stationary_gaussian, truncation_correction, variance_oracle)


def test_complex_gaussian_moments():
    z = sample_complex_gaussian(NoiseStream(1, 0), 10**6)
    assert abs(z.mean()) < 0.005
    assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, abs=0.01)
    assert abs(np.mean(z * z)) < 0.01


def test_streams_are_addressed():
    a = NoiseStream(5, 3).normals(10)
    assert np.array_equal(a, NoiseStream(5, 3).normals(10))
    assert not np.array_equal(a, NoiseStream(5, 4).normals(10))
    assert not np.array_equal(a, NoiseStream(5, 3, "initial").normals(10))
    s = NoiseStream(5, 3)
    s.normals((2, 3))
    assert s.counter == 6
    with pytest.raises(ValueError):
        NoiseStream(-1, 0)


def test_joint_transition_examples():
    s = joint_transition(1.0, 4.0, 0.5, 1.0)
    assert s.var_sh == pytest.approx((1 - math.exp(-1)) / 2, rel=1e-14)
    assert s.var_amp == pytest.approx((1 - math.exp(-4)) / 8, rel=1e-14)
    assert s.cov == pytest.approx((1 - math.exp(-2.5)) / 5, rel=1e-14)
    same = joint_transition(0.7, 0.7, 0.3, 2.0)
    assert same.cov == same.var_sh == same.var_amp
    assert same.l22 == 0.0 and same.clamped == 0
    h = 1e-9
    tiny = joint_transition(3.0, -1.0, h, 0.5)
    for v in (tiny.var_sh, tiny.var_amp, tiny.cov):
        assert v == pytest.approx(0.5 * h, rel=1e-8)
    zero = joint_transition(0.0, 0.0, 2.0, 1.0)
    assert zero.var_sh == 2.0
    unstable = joint_transition(-0.5, -0.5, 1.0, 1.0)
    assert unstable.var_sh == pytest.approx(math.expm1(1.0), rel=1e-14)


def test_cholesky_reproduces_covariance():
    ls = np.linspace(-1, 30, 50)
    la = np.linspace(-1, 5, 50)
    s = joint_transition(ls, la, 0.2, 0.3)
    assert np.allclose(s.l11**2, s.var_sh)
    assert np.allclose(s.l11 * s.l21, s.cov)
    assert np.allclose(s.l21**2 + s.l22**2, s.var_amp)


def test_zero_noise_is_pure_decay():
    g = make_grid(16, 0.5)
    p = KernelParams(0.2)
    rng = np.random.default_rng(0)
    c0 = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    path = CoupledPath(g, c0, c0)
    out = advance(path, 0.3, p, NoiseStream(0, 0), noise_intensity=0.0)
    st = coupled_step(g, p, 0.3, 0.0)
    assert np.allclose(out.sh_state, st.decay_sh * c0)
    assert np.allclose(out.amp_state, st.decay_amp * c0)
    assert out.t_slow == 0.3


def test_zero_mode_is_shared_brownian():
    g = make_grid(8, 0.5)
    p = KernelParams(0.2, nu=0.0)
    path = CoupledPath.zero(g)
    for _ in range(5):
        path = advance(path, 0.1, p, NoiseStream(3, 0))
    j = int(np.flatnonzero(g.modes == 0)[0])
    assert path.sh_state[j] == path.amp_state[j] != 0


def test_out_of_band_modes_carry_no_band_part():
    g = make_grid(64, 0.5)
    p = KernelParams(0.2)
    st = coupled_step(g, p, 0.1)
    below = g.modes < -1 / p.epsilon
    assert below.any()
    assert np.all(st.l11[below] == 0) and np.all(st.decay_sh[below] == 0)
    assert np.allclose(st.l22[below] ** 2, st.var_amp[below])


def test_replay_is_bit_exact():
    g = make_grid(32, 0.25)
    p = KernelParams(0.1)

    def run(rows):
        path = CoupledPath.zero(g, len(rows))
        streams = [NoiseStream(9, r) for r in rows]
        for _ in range(4):
            path = advance(path, 0.25, p, streams)
        return path

    a, b = run(range(6)), run(range(6))
    assert np.array_equal(a.sh_state, b.sh_state) and np.array_equal(a.amp_state, b.amp_state)
    # replica 4 does not depend on how the batch is split
    c = run([4])
    assert np.array_equal(a.sh_state[4], c.sh_state[0])


def test_marginal_and_coupling_laws():
    g = make_grid(8, 0.5)
    p = KernelParams(0.2, nu=0.5)
    R, n, h = 10_000, 10, 0.1
    streams = [NoiseStream(17, r) for r in range(R)]
    step = coupled_step(g, p, h)
    path = CoupledPath.zero(g, R)
    for _ in range(n):
        path = advance(path, h, p, streams, step=step)
    T = n * h
    exact = joint_transition(step.lambda_sh, step.lambda_amp, T, g.noise_intensity)
    for j in (4, 5, 7):  # K = 0, 0.5, 1.5
        y = np.abs(path.sh_state[:, j]) ** 2
        assert abs(y.mean() - exact.var_sh[j]) <= 3 * y.std(ddof=1) / math.sqrt(R)
        c = (path.sh_state[:, j] * np.conj(path.amp_state[:, j])).real
        assert abs(c.mean() - exact.cov[j]) <= 3 * c.std(ddof=1) / math.sqrt(R)


def test_error_snapshot():
    g = make_grid(8, 0.5)
    x = np.linspace(-20, 20, 401)
    rng = np.random.default_rng(1)
    c = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    assert np.all(error_snapshot(CoupledPath(g, c, c), 0.1, x).values == 0)
    one = np.zeros(8, complex)
    one[6] = 0.3 - 0.4j
    got = error_snapshot(CoupledPath(g, one, np.zeros(8)), 0.1, x).values
    want = 2 * (one[6] * np.exp(1j * (g.modes[6] * 0.1 + 1) * x)).real
    assert np.allclose(got, want, atol=1e-13)


def test_stationary_sampler():
    g = make_grid(16, 0.5)
    assert np.all(sample_stationary_gaussian(np.zeros(16), g, NoiseStream(0, 0)).coeffs == 0)
    with pytest.raises(ValueError):
        sample_stationary_gaussian(-np.ones(16), g, NoiseStream(0, 0))
    q = 1 / (1 + g.modes**2)
    R = 10_000
    C = np.stack([sample_stationary_gaussian(q, g, NoiseStream(4, r, "field")).coeffs for r in range(R)])
    A = C @ synthesis_matrix(g, [0.0, 1.0]).T
    y0 = np.abs(A[:, 0]) ** 2
    assert abs(y0.mean() - np.sum(q) * g.noise_intensity) <= 3 * y0.std(ddof=1) / math.sqrt(R)
    y1 = (A[:, 1] * np.conj(A[:, 0])).real
    target = np.sum(q * g.noise_intensity * np.cos(g.modes))
    assert abs(y1.mean() - target) <= 3 * y1.std(ddof=1) / math.sqrt(R)


def _trapezoid_oracle(t, n):
    # swapped order: (1/2pi) int_R t phi(2 t (1-k^2)^2) dk, closed form in s
    k = np.linspace(0.0, 60.0, n)
    a = 2 * (1 - k * k) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(a * t > 1e-12, -np.expm1(-a * t) / a, t)
    K = k[-1]
    tail = 1 / (6 * K**3) + 1 / (5 * K**5) + 3 / (14 * K**7)
    return 2 * (np.trapezoid(g, k) + tail) / (2 * np.pi)


def test_variance_oracle():
    o1 = variance_oracle(1.0, tol=1e-6)
    assert o1.converged
    ref = _trapezoid_oracle(1.0, 2_000_001)
    assert abs(ref - _trapezoid_oracle(1.0, 1_000_001)) < 1e-7
    assert o1.value == pytest.approx(ref, abs=1e-5)
    assert variance_oracle(2.0).value > variance_oracle(1.0).value
    assert variance_oracle(1e-8).value < 1e-3
    with pytest.raises(ValueError):
        variance_oracle(0.0)


def test_truncation_correction_bounds():
    full = variance_oracle(1.0).value
    c = truncation_correction(1.0, 0.5, 1.5)
    assert 0 < c < full
    assert truncation_correction(1.0, 0.0, 1e3) < 1e-6
