"""Fourier symbols of the fast and slow semigroups and the derived error kernels.

Slow variables are ``(tau, K)``: slow time and slow wavenumber, related to the
fast wavenumber by ``k = 1 + eps*K``.  With

    a(K) = (2 + eps*K)**2 * K**2      (band decay rate)
    b(K) = 4*K**2                     (amplitude decay rate)

the error kernel is ``exp(tau*nu) * (exp(-tau*a) - exp(-tau*b))`` on the band
support ``K >= -1/eps`` and ``-exp(tau*nu - tau*b)`` below it.  Differences of
exponentials are evaluated as ``exp(-tau*b) * expm1(-tau*(a - b))`` whenever the
argument is small, with ``a - b = eps*K**3*(4 + eps*K)`` formed directly, so the
kernel keeps full relative accuracy near ``K = 0``.
"""
from dataclasses import dataclass, field, replace

import numpy as np

# integer codes shared with the accelerated quadrature kernels
ERROR, IC_ERROR, PIECE_A, PIECE_B, PIECE_C, PIECE_D = range(6)
CODE_NAMES = {
    ERROR: "f",
    IC_ERROR: "f_ic",
    PIECE_A: "f_a",
    PIECE_B: "f_b",
    PIECE_C: "f_c",
    PIECE_D: "f_d",
}


@dataclass(frozen=True)
class KernelParams:
    """Scalar parameters shared by all kernel formulas.

    ``t_eps`` defaults to ``t_eps_factor / epsilon**2``.
    """

    epsilon: float
    nu: float = 1.0
    delta: float = 0.5
    T_slow: float = 1.0
    t_eps: float = field(default=None)
    t_eps_factor: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon out of range (0, 1): {self.epsilon}")
        if abs(self.nu) > 1.0:
            raise ValueError(f"nu out of range |nu| <= 1: {self.nu}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta out of range (0, 1): {self.delta}")
        if not self.T_slow > 0.0:
            raise ValueError(f"T_slow must be positive: {self.T_slow}")
        if self.t_eps is None:
            if not self.t_eps_factor > 0.0:
                raise ValueError(f"t_eps_factor must be positive: {self.t_eps_factor}")
            object.__setattr__(self, "t_eps", self.t_eps_factor / self.epsilon**2)
        elif not self.t_eps > 0.0:
            raise ValueError(f"t_eps must be positive: {self.t_eps}")

    def with_(self, **changes):
        if "epsilon" in changes and "t_eps" not in changes:
            changes["t_eps"] = None
        return replace(self, **changes)

    @property
    def slow_attract_time(self):
        """``t_eps * eps**2``, the slow time over which the amplitude noise acts."""
        return self.t_eps * self.epsilon**2

    def as_array(self):
        return np.array([self.epsilon, self.nu, self.delta], dtype=np.float64)


# ---------------------------------------------------------------------------
# vectorised evaluators

def _diff_exp(tau, K, eps, nu):
    tau, K = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(K, dtype=float))
    b = 4.0 * K * K
    d = eps * K**3 * (4.0 + eps * K)
    x = -tau * d
    small = np.abs(x) < 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        near = np.exp(tau * nu - tau * b) * np.expm1(np.where(small, x, 0.0))
        far = np.exp(tau * nu - tau * (b + d)) - np.exp(tau * nu - tau * b)
    return np.where(small, near, far)


def eval_code(code, eps, nu, delta, tau, K):
    """Vectorised kernel evaluation by integer code (see module constants)."""
    tau, K = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(K, dtype=float))
    if code == ERROR:
        inside = K >= -1.0 / eps
        return np.where(inside, _diff_exp(tau, K, eps, nu),
                        -np.exp(tau * nu - 4.0 * tau * K * K))
    if code == IC_ERROR:
        return _diff_exp(tau, K, eps, nu)
    if code in (PIECE_A, PIECE_B):
        if code == PIECE_A:
            mask = K >= delta / eps
        else:
            mask = (K >= -1.0 / eps) & (K <= -delta / eps)
        e = 2.0 + eps * K
        return np.where(mask, np.exp(tau * nu - tau * e * e * K * K), 0.0)
    if code == PIECE_C:
        return np.where(np.abs(K) < delta / eps, _diff_exp(tau, K, eps, nu), 0.0)
    if code == PIECE_D:
        return np.where(K >= delta / eps, -2.0 * np.exp(tau * nu - 4.0 * tau * K * K), 0.0)
    raise ValueError(f"unknown kernel code {code}")


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _check_time(t, name="tau"):
    if np.any(np.asarray(t) < 0):
        raise ValueError(f"{name} must be >= 0")


# ---------------------------------------------------------------------------
# public symbols

def sh_symbol(t, k, p=None):
    """Swift-Hohenberg semigroup symbol ``exp(-t(1-k^2)^2 + t eps^2 nu)``.

    With ``p=None`` the shift is dropped (pure ``g_t``).
    """
    _check_time(t, "t")
    t = np.asarray(t, dtype=float)
    k = np.asarray(k, dtype=float)
    shift = 0.0 if p is None else p.epsilon**2 * p.nu
    return _out(np.exp(-t * (1.0 - k * k) ** 2 + t * shift))


def band_symbol(tau, K, p):
    """Slow-scale symbol of the rescaled band: ``exp(-tau(2+K eps)^2 K^2 + tau nu)``
    for ``K >= -1/eps``, zero below."""
    _check_time(tau)
    tau = np.asarray(tau, dtype=float)
    K = np.asarray(K, dtype=float)
    e = 2.0 + p.epsilon * K
    val = np.exp(-tau * e * e * K * K + tau * p.nu)
    return _out(np.where(K >= -1.0 / p.epsilon, val, 0.0))


def band_symbol_full(tau, K, p):
    """Band symbol without the support cut-off: the exact fast semigroup acting
    on a modulated wave ``A(eps x) e^{ix}``, expressed per slow mode."""
    _check_time(tau)
    e = 2.0 + p.epsilon * np.asarray(K, dtype=float)
    return _out(np.exp(-np.asarray(tau) * e * e * np.asarray(K) ** 2 + np.asarray(tau) * p.nu))


def amplitude_symbol(tau, K, nu):
    """Symbol ``exp(-4 tau K^2 + tau nu)`` of the amplitude semigroup."""
    _check_time(tau)
    tau = np.asarray(tau, dtype=float)
    K = np.asarray(K, dtype=float)
    return _out(np.exp(-4.0 * tau * K * K + tau * nu))


def error_kernel(tau, K, p):
    """Difference kernel of band and amplitude convolutions (with the part of
    the amplitude convolution below ``-1/eps`` that the band does not cover)."""
    _check_time(tau)
    return _out(eval_code(ERROR, p.epsilon, p.nu, p.delta, tau, K))


def kernel_pieces(tau, K, p):
    """The four-piece split ``(f_a, f_b, f_c, f_d)`` used for bounds.

    Support conventions: ``f_a, f_d`` on ``K >= delta/eps``, ``f_b`` on
    ``[-1/eps, -delta/eps]``, ``f_c`` on ``|K| < delta/eps``.  The pieces do
    not sum to the error kernel (``f_d`` carries a factor 2 and folds in the
    tail below ``-delta/eps`` by symmetry).
    """
    _check_time(tau)
    return tuple(_out(eval_code(c, p.epsilon, p.nu, p.delta, tau, K))
                 for c in (PIECE_A, PIECE_B, PIECE_C, PIECE_D))


def ic_error_kernel(T, ell, p):
    """Initial-condition error kernel: band symbol without cut-off minus the
    amplitude symbol, both carrying ``exp(nu T)``."""
    _check_time(T, "T")
    return _out(eval_code(IC_ERROR, p.epsilon, p.nu, p.delta, T, ell))


def covariance_symbol(k, p):
    """Stationary amplitude covariance ``(1 - exp(-8 k^2 s)) / (8 k^2)``,
    ``s = t_eps eps^2``; the k = 0 singularity is filled by its Taylor series."""
    s = p.slow_attract_time
    k = np.asarray(k, dtype=float)
    x = 8.0 * k * k * s
    small = np.abs(x) < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        big = -np.expm1(-x) / (8.0 * k * k)
    taylor = s * (1.0 - x / 2.0 + x * x / 6.0)
    return _out(np.where(small, taylor, big))


class Kernel:
    """A named kernel ``(tau, K) -> real`` bound to parameters.

    Instances are recognised by the quadrature engine, which evaluates them in
    the compiled backend instead of calling back into Python.
    """

    __slots__ = ("code", "params")

    def __init__(self, code, params):
        if code not in CODE_NAMES:
            raise ValueError(f"unknown kernel code {code}")
        self.code = code
        self.params = params

    @property
    def name(self):
        return CODE_NAMES[self.code]

    def __call__(self, tau, K):
        p = self.params
        return eval_code(self.code, p.epsilon, p.nu, p.delta, tau, K)

    def __repr__(self):
        return f"Kernel({self.name}, {self.params})"


def error_kernel_fn(p):
    return Kernel(ERROR, p)


def ic_error_kernel_fn(p):
    return Kernel(IC_ERROR, p)


def piece_fns(p):
    return tuple(Kernel(c, p) for c in (PIECE_A, PIECE_B, PIECE_C, PIECE_D))
