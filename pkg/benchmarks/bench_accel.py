"""Timing of the numba kernels against the numpy fallback.

    python3 benchmarks/bench_accel.py [--repeat N]

Each kernel is run once to trigger compilation, then timed ``repeat`` times;
the best time is reported.
"""
import argparse
import time

import numpy as np

from shamp import _accel
from shamp.kernels import ERROR, KernelParams
from shamp.quadrature import panel_nodes
from shamp.quadrature_bounds import Resolution, k_edges, tau_edges


def cases():
    p = KernelParams(0.05)
    res = Resolution()
    tn, tw = panel_nodes(tau_edges(1.0, p, res, level=1), res.gl_order)
    kn, kw = panel_nodes(k_edges(p, res, level=1), res.gl_order)
    rng = np.random.default_rng(0)
    r, n = 64, 2048
    cplx = lambda *s: rng.standard_normal(s) + 1j * rng.standard_normal(s)
    sh, amp, z1, z2 = cplx(r, n), cplx(r, n), cplx(r, n), cplx(r, n)
    coef = [cplx(n) for _ in range(5)]
    phi, carrier, w = cplx(r, 8001), np.exp(1j * np.arange(8001.0)), rng.uniform(0, 1, 8001)
    taus, ks = np.geomspace(1e-4, 1, 256), np.linspace(-60, 60, 4096)
    return {
        "panel_matrix": lambda be: be.panel_matrix(ERROR, p.epsilon, p.nu, p.delta, tn, tw, kn, kw,
                                                   0.0, 0.01, True, 0),
        "eval_grid": lambda be: be.eval_grid(ERROR, p.epsilon, p.nu, p.delta, taus, ks),
        "ou_advance": lambda be: be.ou_advance(sh.copy(), amp.copy(), *coef, z1, z2),
        "modulated_sup": lambda be: be.modulated_sup(phi, carrier, w),
    }


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [_accel.get_backend("numpy")]
    if _accel.HAVE_NUMBA:
        backends.insert(0, _accel.get_backend("numba"))
    print(f"{'kernel':<16}" + "".join(f"{b.NAME:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in cases().items():
        t = [best_of(lambda: fn(b), args.repeat) for b in backends]
        speed = f"{t[-1] / t[0]:9.1f}x" if len(t) == 2 else ""
        print(f"{name:<16}" + "".join(f"{v * 1e3:10.2f}ms" for v in t) + f"{speed:>10}")


if __name__ == "__main__":
    main()
