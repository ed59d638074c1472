import numpy as np
import pytest

from shamp.kernels import (KernelParams, covariance_symbol, error_kernel, error_kernel_fn,
                           ic_error_kernel_fn, piece_fns)
from shamp.quadrature import adaptive_gl, graded_points, panel_nodes
from shamp.quadrature_bounds import (NormReport, Resolution, fit_scaling, kgamma_sq, l2_hgamma_sq,
                                     linf_q_sq)

P = KernelParams(0.1, nu=1.0, delta=0.5)
zero = lambda t, k: np.zeros(np.broadcast(t, k).shape)


def test_composite_rule_is_exact_for_polynomials():
    n, w = panel_nodes(np.array([0.0, 0.3, 1.0]), 8)
    assert np.sum(w * n**15) == pytest.approx(1 / 16, rel=1e-14)


def test_graded_points_reach_h_min():
    e = graded_points(0.0, 1.0, 1e-3, 2.0)
    assert e[0] == 0.0 and e[-1] == 1.0
    assert np.diff(e)[0] <= 1e-3 and np.diff(e)[-1] <= 1e-3
    assert np.all(np.diff(e) > 0)


def test_adaptive_gl():
    v, err, ok = adaptive_gl(np.exp, 0.0, 2.0, rtol=1e-13)
    assert ok and v == pytest.approx(np.expm1(2.0), rel=1e-13)
    v, err, ok = adaptive_gl(np.sqrt, 0.0, 1.0, rtol=1e-6)
    assert ok and v == pytest.approx(2 / 3, rel=1e-6)


def test_zero_kernel_gives_zero():
    assert l2_hgamma_sq(zero, 0.1, 1.0).value == 0.0
    assert kgamma_sq(zero, 0.1, 1.0).value == 0.0
    assert linf_q_sq(zero, lambda k: np.ones_like(k), 0.1, 1.0).value == 0.0
    assert linf_q_sq(ic_error_kernel_fn(P), lambda k: np.zeros_like(k), 0.1, 1.0).value == 0.0


def test_indicator_kernel():
    f = lambda t, k: ((t >= 0) & (t <= 1) & (k >= 0) & (k <= 1)).astype(float)
    r = l2_hgamma_sq(f, 0.0, 1.0)
    assert r.value == pytest.approx(2.0, rel=1e-12)
    assert not r.flagged


def test_time_constant_kernel_second_sup_is_zero():
    f = lambda t, k: np.broadcast_to(np.exp(-k * k), np.broadcast(t, k).shape)
    r = kgamma_sq(f, 0.05, 1.0)
    assert r.parts["second_sup"] == 0.0
    assert r.parts["first_sup"] > 0


def test_gamma_ranges():
    with pytest.raises(ValueError):
        l2_hgamma_sq(error_kernel_fn(P), 0.6, 1.0)
    with pytest.raises(ValueError):
        linf_q_sq(ic_error_kernel_fn(P), lambda k: covariance_symbol(k, P), 0.3, 1.0)
    with pytest.raises(ValueError):
        NormReport(-1.0, "L2_Hgamma", 0.1, P, {}, 0.0)


def test_l2_against_monte_carlo():
    # same integral restricted to |K| <= 30, once by quadrature and once by
    # 1e7 uniform samples on [0, 1] x [-30, 30]
    Kc, g = 30.0, 0.01
    trunc = lambda t, k: error_kernel(t, k, P) * (np.abs(k) <= Kc)
    quad = l2_hgamma_sq(trunc, g, 1.0, params=P, breakpoints=(-Kc, Kc)).value
    rng = np.random.Generator(np.random.Philox(11))
    acc = 0.0
    n, chunks = 10**6, 10
    for _ in range(chunks):
        t = rng.uniform(0, 1, n)
        k = rng.uniform(-Kc, Kc, n)
        acc += np.sum(error_kernel(t, k, P) ** 2 * (np.abs(k) ** (2 * g) + 1))
    mc = acc / (n * chunks) * 2 * Kc
    assert quad == pytest.approx(mc, rel=0.01)


def test_kgamma_doubled_resolution():
    f = error_kernel_fn(P)
    base = kgamma_sq(f, 0.05, 1.0)
    fine = kgamma_sq(f, 0.05, 1.0, res=Resolution(lattice_points=128, h_min=5e-4, gl_order=10))
    assert base.value == pytest.approx(fine.value, rel=0.02)
    assert not base.flagged


def test_linf_q_lattice_doubling():
    p = KernelParams(0.1, t_eps=100.0)
    q = lambda k: covariance_symbol(k, p)
    a = linf_q_sq(ic_error_kernel_fn(p), q, 0.1, 1.0)
    b = linf_q_sq(ic_error_kernel_fn(p), q, 0.1, 1.0, res=Resolution().doubled_lattice())
    assert np.isfinite(a.value) and a.value > 0
    assert a.value == pytest.approx(b.value, rel=0.02)


def test_piece_sum_bound():
    for eps in (0.2, 0.1):
        p = KernelParams(eps)
        whole = l2_hgamma_sq(error_kernel_fn(p), 0.05, 1.0).value
        pieces = sum(l2_hgamma_sq(f, 0.05, 1.0).value for f in piece_fns(p))
        assert whole <= 5 * pieces


def test_monotone_in_gamma():
    p = KernelParams(0.2)
    f = error_kernel_fn(p)
    q = lambda k: covariance_symbol(k, p)
    for fn in (lambda g: l2_hgamma_sq(f, g, 1.0), lambda g: kgamma_sq(f, g, 1.0),
               lambda g: linf_q_sq(ic_error_kernel_fn(p), q, g, 1.0)):
        v = [fn(g).value for g in (0.0, 0.05, 0.1)]
        assert v[0] <= v[1] <= v[2]


def test_fit_scaling_examples():
    eps = [0.2, 0.1, 0.05, 0.025]
    f = fit_scaling([(e, e) for e in eps])
    assert f.slope == pytest.approx(1.0, abs=1e-12) and f.r_squared == pytest.approx(1.0)
    assert fit_scaling([(e, 4.2) for e in eps]).slope == pytest.approx(0.0, abs=1e-12)
    rng = np.random.default_rng(0)
    for _ in range(20):
        noisy = [(e, 3 * e**0.98 * (1 + 0.01 * rng.standard_normal())) for e in eps]
        assert 0.93 <= fit_scaling(noisy).slope <= 1.03
    with pytest.raises(ValueError):
        fit_scaling([(0.2, 1.0), (0.1, 0.0), (0.05, 1.0)])
    with pytest.raises(ValueError):
        fit_scaling([(0.2, 1.0), (0.1, 1.0)])
