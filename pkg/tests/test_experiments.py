import numpy as np
import pytest

from shamp.config import ExperimentConfig
from shamp.experiments import (e_det_value, fast_points, run_convolution_error,
                               run_full_approximation, run_L_probe, run_semigroup_probe,
                               slow_grid)
from shamp.kernels import ic_error_kernel

SMALL = ExperimentConfig(epsilon_sweep=(0.2, 0.1, 0.05), n_replicas=3, snapshots=4, L_max=4.0,
                         cov_replicas=50, probe_replicas=4, n_fields=3)


def test_grids():
    g = slow_grid(SMALL, 0.1)
    assert g.period == pytest.approx(16.0)
    assert g.k_max >= 2 / 0.1
    x = fast_points(SMALL, 0.1)
    assert x[0] == -40 and x[-1] == 40 and np.max(np.diff(x)) <= 0.1 + 1e-12


def test_zero_noise_gives_zero_error():
    r = run_convolution_error(SMALL.with_(noise=0.0))
    assert all(v == 0 for v in r.column("median_error"))
    assert "error_decreasing_slope" not in r.checks


def test_convolution_error_is_deterministic():
    cfg = SMALL.with_(epsilon_sweep=(0.2,), n_replicas=2)
    assert run_convolution_error(cfg).rows == run_convolution_error(cfg).rows


def test_degenerate_full_approximation_matches_convolution_error():
    cfg = SMALL.with_(epsilon_sweep=(0.2, 0.1))
    full = run_full_approximation(cfg, ic={"a_det": "zero", "use_a_st": False, "e_profile": "zero"})
    conv = run_convolution_error(cfg)
    assert full.column("median_total") == conv.column("median_error")
    assert all(v == 0 for v in full.column("E_det"))


def test_ic_error_vanishes_at_time_zero():
    g = slow_grid(SMALL, 0.1)
    assert np.all(ic_error_kernel(0.0, g.modes, SMALL.kernel_params(0.1)) == 0)


def test_e_det_zero_mode_without_growth():
    # a single zero-mode amplitude is propagated identically by both symbols when nu = 0
    p = SMALL.with_(nu=0.0).kernel_params(0.1)
    assert ic_error_kernel(0.7, 0.0, p) == 0.0
    v, _ = e_det_value(SMALL, 0.1)
    assert v > 0


def test_l_probe_rejects_bad_lists():
    with pytest.raises(ValueError):
        run_L_probe(SMALL, L_list=(4, 4, 4, 4))
    r = run_L_probe(SMALL.with_(noise=0.0))
    assert all(v == 0 for v in r.column("rms_sup"))


def test_semigroup_probe_identity_at_zero():
    r = run_semigroup_probe(SMALL, t_list=(0.0, 1.0), n_random_fields=3)
    at0 = [row for row in r.rows if row[1] == 0.0]
    assert all(row[2] == 1.0 for row in at0)
