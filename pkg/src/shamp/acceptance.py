"""The twelve acceptance criteria as callable checks.

Each ``criterion_N(cfg, cache)`` returns a :class:`~shamp.experiments.Check`.
``cache`` maps subcommand name to its result so each experiment runs once;
the determinism criterion re-runs every subcommand and compares CSV bytes
against the cached first run.
"""
import time

import numpy as np

from .config import ExperimentConfig
from .experiments import ANCHORS, RUNNERS, Check, a_det_hat, slow_grid
from .kernels import amplitude_symbol, error_kernel, ic_error_kernel, sh_symbol
from .norms import WeightParams, c0_gamma, curly_c0_gamma
from .report import csv_text
from .spectral import PhysicalSamples

TITLES = {
    1: "L2(H^gamma) kernel-norm slope in [0.85, 1.05]",
    2: "K_gamma kernel-norm slope in [0.70, 1.10]",
    3: "Linf_Q first-supremum slope >= 0.45",
    4: "pointwise kernel identities (exact)",
    5: "pointwise variance within 3 SE of oracle minus truncation",
    6: "rescaling identity per mode to 1e-10",
    7: "norm equivalence on 1000 random fields per gamma",
    8: "convolution error: decreasing, slope >= 0.35, chain ratio < 3",
    9: "full approximation: total - E_det slope >= 0.15",
    10: "q bound on 1e4 lattice and sampler lags within 3 SE",
    11: "L-probe: exponent <= gamma + 0.05, sqrt-log ratio varies < 25%",
    12: "byte-identical CSV on re-run for every subcommand",
}


def _run(name, cfg, cache):
    if name not in cache:
        cache[name] = RUNNERS[name](cfg)
    return cache[name]


def _kernel_norms(cfg, cache):
    return _run("kernel-norms", cfg, cache)


def _merge(*checks):
    return Check(all(c.passed for c in checks), "; ".join(c.detail for c in checks))


def criterion_1(cfg, cache):
    r = _kernel_norms(cfg, cache)
    return _merge(r.checks["l2_slope"], r.checks["quadrature_converged"])


def criterion_2(cfg, cache):
    r = _kernel_norms(cfg, cache)
    return _merge(r.checks["kgamma_slope"], r.checks["quadrature_converged"])


def criterion_3(cfg, cache):
    return _kernel_norms(cfg, cache).checks["linf_q_first_slope"]


def criterion_4(cfg, cache):
    failures = []
    taus = np.concatenate([[0.0], np.geomspace(1e-8, 10.0, 200)])
    for eps in cfg.kernel_sweep:
        p = cfg.kernel_params(eps)
        K_in = np.concatenate([[-1.0 / eps], np.linspace(-1.0 / eps, 4.0 / eps, 2001),
                               np.geomspace(1e-6, 1e6, 200)])
        K_out = -1.0 / eps - np.geomspace(1e-9, 1e4, 200)
        if np.any(error_kernel(taus, 0.0, p) != 0.0):
            failures.append(f"f(tau,0) != 0 at eps={eps}")
        if np.any(error_kernel(0.0, K_in, p) != 0.0):
            failures.append(f"f(0,K) != 0 on band at eps={eps}")
        if np.any(error_kernel(0.0, K_out, p) != -1.0):
            failures.append(f"f(0,K) != -1 below band at eps={eps}")
        if np.any(ic_error_kernel(0.0, np.concatenate([K_in, K_out]), p) != 0.0):
            failures.append(f"f_ic(0,.) != 0 at eps={eps}")
        K_open = K_in[K_in > -1.0 / eps]
        tt, kk = np.meshgrid(taus, K_open)
        if np.any(ic_error_kernel(tt, kk, p) != error_kernel(tt, kk, p)):
            failures.append(f"f_ic != f above -1/eps at eps={eps}")
    return Check(not failures, "; ".join(failures) or "all identities exact")


def criterion_5(cfg, cache):
    return _run("variance-check", cfg, cache).checks["variance_within_3se"]


def rescaling_identity_errors(cfg, T):
    """Max per-mode discrepancy between fast-scale evolution and amplitude
    evolution plus the initial-condition error kernel, for the modulated
    Gaussian bump.  Returns ``(scale_relative, worst_relative_on_significant)``
    over the epsilon sweep."""
    scale_rel, sig_rel = 0.0, 0.0
    for eps in cfg.epsilon_sweep:
        p = cfg.kernel_params(eps)
        grid = slow_grid(cfg, eps)
        K = grid.modes
        c = a_det_hat(K) * grid.noise_intensity
        fast = c * sh_symbol(T / eps**2, 1.0 + eps * K, p)
        slow = c * amplitude_symbol(T, K, p.nu) + c * ic_error_kernel(T, K, p)
        diff = np.abs(fast - slow)
        top = np.max(np.abs(fast))
        scale_rel = max(scale_rel, float(np.max(diff) / top))
        sig = np.abs(fast) >= 1e-3 * top
        sig_rel = max(sig_rel, float(np.max(diff[sig] / np.abs(fast[sig]))))
    return scale_rel, sig_rel


def criterion_6(cfg, cache):
    parts = []
    ok = True
    for T in (0.1, 1.0):
        s, g = rescaling_identity_errors(cfg, T)
        ok &= s <= 1e-10
        parts.append(f"T={T}: max|diff|/max|mode|={s:.2e}, relative on significant modes={g:.2e}")
    return Check(ok, "; ".join(parts))


def random_piecewise_linear(rng, L_max, n_points=2001):
    """Random piecewise-linear field on ``[-L_max, L_max]`` sampled on a fine grid."""
    n_knots = int(rng.integers(2, 40))
    knots = np.sort(rng.uniform(-L_max, L_max, n_knots))
    knots = np.concatenate([[-L_max], knots, [L_max]])
    vals = rng.standard_normal(knots.size) * np.exp(rng.uniform(-2.0, 2.0))
    x = np.linspace(-L_max, L_max, n_points)
    return PhysicalSamples(x, np.interp(x, knots, vals))


def norm_equivalence_violations(gamma, n_fields=1000, seed=0):
    rng = np.random.Generator(np.random.Philox(key=[seed, int(gamma * 1e6)]))
    w = WeightParams(gamma)
    bad = 0
    for _ in range(n_fields):
        L_max = int(rng.integers(1, 33))
        u = random_piecewise_linear(rng, L_max)
        c0 = c0_gamma(u, w)
        cu = curly_c0_gamma(u, w, L_max)
        if not (2.0 ** (-gamma / 2) * cu <= c0 <= 2.0**gamma * cu):
            bad += 1
    return bad


def criterion_7(cfg, cache):
    counts = {g: norm_equivalence_violations(g, seed=cfg.seed % 2**63) for g in (0.05, 0.1, 0.3)}
    return Check(sum(counts.values()) == 0,
                 ", ".join(f"gamma={g}: {v} violations" for g, v in counts.items()))


def criterion_8(cfg, cache):
    r = _run("convolution-error", cfg, cache)
    if not r.checks:
        return Check(False, "sweep too short to fit a slope")
    return _merge(r.checks["error_decreasing_slope"], r.checks["kernel_chain_ratio"])


def criterion_9(cfg, cache):
    r = _run("full-approximation", cfg, cache)
    return r.checks.get("total_minus_E_det_slope",
                        Check(False, "total - E_det not positive along the sweep"))


def criterion_10(cfg, cache):
    r = _run("attractivity", cfg, cache)
    return _merge(r.checks["q_bound"], r.checks["stationary_lags"])


def criterion_11(cfg, cache):
    r = _run("l-probe", cfg, cache)
    if not r.checks:
        return Check(False, "probe returned zero norms")
    return _merge(r.checks["L_exponent"], r.checks["sqrt_log_ratio"])


def criterion_12(cfg, cache):
    differing = []
    for name, fn in RUNNERS.items():
        first = csv_text(_run(name, cfg, cache), ANCHORS[name])
        again = csv_text(fn(cfg), ANCHORS[name])
        if first != again:
            differing.append(name)
    return Check(not differing, f"{len(RUNNERS)} subcommands re-run; differing: "
                 + (", ".join(differing) or "none"))


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 13)}


def run_all(cfg: ExperimentConfig = None, only=None, report=None, cache=None):
    """Evaluate criteria in order.  ``report(i, title, check, seconds)`` is
    called after each one.  Returns ``[(i, title, check, seconds), ...]``;
    experiment results are left in ``cache`` keyed by subcommand."""
    cfg = cfg or ExperimentConfig()
    cache = {} if cache is None else cache
    out = []
    for i, fn in CRITERIA.items():
        if only and i not in only:
            continue
        t0 = time.perf_counter()
        try:
            chk = fn(cfg, cache)
        except Exception as exc:  # a crashing criterion is a failed criterion
            chk = Check(False, f"error: {type(exc).__name__}: {exc}")
        dt = time.perf_counter() - t0
        out.append((i, TITLES[i], chk, dt))
        if report:
            report(i, TITLES[i], chk, dt)
    return out
