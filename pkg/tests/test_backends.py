"""The numba kernels and the numpy fallback must agree."""
import os
import subprocess
import sys

import numpy as np
import pytest

from shamp import _accel
from shamp.kernels import CODE_NAMES, KernelParams
from shamp.quadrature import panel_nodes
from shamp.quadrature_bounds import k_edges, tau_edges, Resolution

nb = pytest.importorskip("shamp._kernels_nb")
np_ = _accel.get_backend("numpy")
P = KernelParams(0.1, nu=0.7, delta=0.5)


@pytest.mark.parametrize("code", sorted(CODE_NAMES))
def test_eval_grid(code):
    taus = np.concatenate([[0.0], np.geomspace(1e-7, 5, 40)])
    ks = np.concatenate([np.linspace(-25, 25, 1001), [-10.0, -5.0, 5.0, 1e5, -1e5]])
    a = nb.eval_grid(code, P.epsilon, P.nu, P.delta, taus, ks)
    b = np_.eval_grid(code, P.epsilon, P.nu, P.delta, taus, ks)
    # exponent arguments reach ~-500 here, so libm vs numpy exp differ at ~1e-13
    assert np.allclose(a, b, rtol=1e-11, atol=1e-300)


@pytest.mark.parametrize("mode,weighted", [(0, True), (0, False), (1, False)])
def test_panel_matrix(mode, weighted):
    res = Resolution()
    tn, tw = panel_nodes(tau_edges(1.0, P, res), 8)
    kn, kw = panel_nodes(k_edges(P, res), 8)
    args = (0, P.epsilon, P.nu, P.delta, tn, tw, kn, kw, 0.1, 0.05, weighted, mode)
    assert np.allclose(nb.panel_matrix(*args), np_.panel_matrix(*args), rtol=1e-11, atol=1e-300)


def test_ou_advance_and_sup():
    rng = np.random.default_rng(0)
    r, n = 5, 33
    c = lambda *s: rng.standard_normal(s) + 1j * rng.standard_normal(s)
    sh, amp = c(r, n), c(r, n)
    coef = [c(n) for _ in range(5)]
    z1, z2 = c(r, n), c(r, n)
    s1, a1, s2, a2 = sh.copy(), amp.copy(), sh.copy(), amp.copy()
    nb.ou_advance(s1, a1, *coef, z1, z2)
    np_.ou_advance(s2, a2, *coef, z1, z2)
    assert np.allclose(s1, s2, rtol=1e-15) and np.allclose(a1, a2, rtol=1e-15)
    carrier, w = np.exp(1j * np.arange(n)), rng.uniform(0.1, 1, n)
    assert np.allclose(nb.modulated_sup(sh, carrier, w), np_.modulated_sup(sh, carrier, w), rtol=1e-14)


def test_env_flag_selects_numpy():
    env = dict(os.environ, SHAMP_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", "from shamp import _accel; print(_accel.backend_name())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    with pytest.raises(ValueError):
        _accel.get_backend("fortran")
