"""Seeded Gaussian streams, exact coupled Ornstein-Uhlenbeck stepping, and
the variance oracle of the fast-scale stochastic convolution.

Each slow Fourier mode ``K`` carries two complex OU processes driven by the
same complex Brownian increment:

* the rescaled Swift-Hohenberg band mode, decay rate
  ``lambda_sh = (2 + eps K)^2 K^2 - nu`` (only for ``K >= -1/eps``),
* the amplitude-equation mode, decay rate ``lambda_amp = 4 K^2 - nu``.

Both are advanced with the exact joint Gaussian transition, so there is no
time-step bias.  White noise in space is represented with per-mode
intensity ``sigma^2 = dK / (2 pi)``.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .kernels import KernelParams
from .quadrature import adaptive_gl
from .spectral import ComplexModeState, PhysicalSamples, WavenumberGrid, synthesis_matrix

# Philox counter word 3 separates the substreams of one replica
PURPOSES = {"convolution": 0, "initial": 1, "field": 2, "misc": 3}


class NoiseStream:
    """Counter-based Gaussian stream addressed by ``(root_seed, replica_id)``.

    Built on numpy's Philox4x64 generator: the key is
    ``(root_seed, replica_id)`` and the high counter word selects an
    independent substream (``purpose``).  ``counter`` counts the real
    normals drawn so far.
    """

    def __init__(self, root_seed, replica_id, purpose="convolution"):
        for name, v in (("root_seed", root_seed), ("replica_id", replica_id)):
            if int(v) != v or not 0 <= int(v) < 2**64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer")
        self.root_seed = int(root_seed)
        self.replica_id = int(replica_id)
        self.purpose = purpose
        sub = PURPOSES[purpose] if isinstance(purpose, str) else int(purpose)
        bitgen = np.random.Philox(key=np.array([self.root_seed, self.replica_id], dtype=np.uint64),
                                  counter=np.array([0, 0, 0, sub], dtype=np.uint64))
        self._gen = np.random.Generator(bitgen)
        self.counter = 0

    def normals(self, shape):
        out = self._gen.standard_normal(shape)
        self.counter += out.size
        return out

    def __repr__(self):
        return (f"NoiseStream(root_seed={self.root_seed}, replica_id={self.replica_id}, "
                f"purpose={self.purpose!r}, counter={self.counter})")


def sample_complex_gaussian(stream, n):
    """``n`` circular complex standard normals (``E|z|^2 = 1``, ``E z^2 = 0``)."""
    shape = (n,) if np.ndim(n) == 0 else tuple(n)
    r = stream.normals(shape + (2,))
    return (r[..., 0] + 1j * r[..., 1]) * np.sqrt(0.5)


def _phi(x):
    """``(1 - exp(-x)) / x`` with its series near 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        big = -np.expm1(-x) / x
    return np.where(small, 1.0 - x / 2.0 + x * x / 6.0, big)


@dataclass(frozen=True)
class OUJointStep:
    """Exact one-step transition of the coupled pair, elementwise over modes.

    ``(xi_sh, xi_amp) = (l11 z1, l21 z1 + l22 z2)`` has covariance
    ``[[var_sh, cov], [cov, var_amp]]``.
    """

    lambda_sh: np.ndarray
    lambda_amp: np.ndarray
    h: float
    noise_intensity: float
    decay_sh: np.ndarray
    decay_amp: np.ndarray
    var_sh: np.ndarray
    var_amp: np.ndarray
    cov: np.ndarray
    l11: np.ndarray
    l21: np.ndarray
    l22: np.ndarray
    clamped: int = 0


def joint_transition(lambda_sh, lambda_amp, h, noise_intensity):
    """Closed-form variances, cross-covariance and Cholesky factor.

    Examples
    --------
    >>> s = joint_transition(1.0, 4.0, 0.5, 1.0)
    >>> [round(float(v), 6) for v in (s.var_sh, s.var_amp, s.cov)]
    [0.31606, 0.122711, 0.183583]
    """
    if not h > 0:
        raise ValueError("h must be positive")
    if not noise_intensity >= 0:
        raise ValueError("noise_intensity must be >= 0")
    ls = np.asarray(lambda_sh, dtype=float)
    la = np.asarray(lambda_amp, dtype=float)
    s2h = noise_intensity * h
    var_sh = s2h * _phi(2.0 * ls * h)
    var_amp = s2h * _phi(2.0 * la * h)
    cov = s2h * _phi((ls + la) * h)
    l11 = np.sqrt(var_sh)
    with np.errstate(divide="ignore", invalid="ignore"):
        l21 = np.where(l11 > 0, cov / np.where(l11 > 0, l11, 1.0), 0.0)
    same = ls == la
    l21 = np.where(same, l11, l21)  # identical dynamics share one draw exactly
    rem = var_amp - l21 * l21
    rem = np.where(same | (np.abs(rem) <= 1e-13 * var_amp), 0.0, rem)
    clamped = int(np.count_nonzero(rem < 0))
    l22 = np.sqrt(np.maximum(rem, 0.0))
    return OUJointStep(ls, la, float(h), float(noise_intensity), np.exp(-ls * h), np.exp(-la * h),
                       var_sh, var_amp, cov, l11, l21, l22, clamped)


def mode_rates(grid, p):
    """``(lambda_sh, lambda_amp, in_band)`` for every grid mode."""
    K = grid.modes
    e = 2.0 + p.epsilon * K
    return e * e * K * K - p.nu, 4.0 * K * K - p.nu, K >= -1.0 / p.epsilon


def coupled_step(grid, p, h, noise_intensity=None):
    """Joint transition for every mode; out-of-band modes carry no band part."""
    ls, la, inband = mode_rates(grid, p)
    sig = grid.noise_intensity if noise_intensity is None else noise_intensity
    st = joint_transition(np.where(inband, ls, la), la, h, sig)
    zero = np.zeros_like(ls)
    return OUJointStep(ls, la, st.h, st.noise_intensity,
                       np.where(inband, st.decay_sh, 0.0), st.decay_amp,
                       np.where(inband, st.var_sh, 0.0), st.var_amp,
                       np.where(inband, st.cov, 0.0),
                       np.where(inband, st.l11, zero), np.where(inband, st.l21, zero),
                       np.where(inband, st.l22, np.sqrt(st.var_amp)), st.clamped)


@dataclass(frozen=True)
class CoupledPath:
    """Band and amplitude mode states; a leading axis may index replicas."""

    grid: WavenumberGrid
    sh_state: np.ndarray
    amp_state: np.ndarray
    t_slow: float = 0.0
    clamped: int = field(default=0, compare=False)

    def __post_init__(self):
        sh = np.asarray(self.sh_state, dtype=complex)
        amp = np.asarray(self.amp_state, dtype=complex)
        if sh.shape != amp.shape or sh.shape[-1] != self.grid.n_modes:
            raise ValueError("sh_state and amp_state must share the grid")
        object.__setattr__(self, "sh_state", sh)
        object.__setattr__(self, "amp_state", amp)

    @classmethod
    def zero(cls, grid, n_replicas=None):
        shape = (grid.n_modes,) if n_replicas is None else (n_replicas, grid.n_modes)
        return cls(grid, np.zeros(shape, complex), np.zeros(shape, complex), 0.0)

    @property
    def sh(self):
        return ComplexModeState(self.grid, self.sh_state) if self.sh_state.ndim == 1 else None

    @property
    def amp(self):
        return ComplexModeState(self.grid, self.amp_state) if self.amp_state.ndim == 1 else None


def _draw_pairs(streams, n):
    """Two complex normal vectors per replica, drawn replica by replica."""
    z = np.stack([sample_complex_gaussian(s, (2, n)) for s in streams])
    return z[:, 0], z[:, 1]


def advance(path, h, p, stream, noise_intensity=None, step=None, backend=None):
    """One exact coupled step of length ``h`` (slow time).

    ``stream`` is one :class:`NoiseStream` (single path) or a sequence with
    one stream per replica row.  ``step`` may carry a precomputed
    :func:`coupled_step` for repeated use.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    st = step if step is not None else coupled_step(path.grid, p, h, noise_intensity)
    single = path.sh_state.ndim == 1
    streams = [stream] if single else list(stream)
    sh = np.atleast_2d(path.sh_state).copy()
    amp = np.atleast_2d(path.amp_state).copy()
    if len(streams) != sh.shape[0]:
        raise ValueError("need one stream per replica")
    z1, z2 = _draw_pairs(streams, path.grid.n_modes)
    be = _accel.get_backend(backend)
    be.ou_advance(sh, amp, st.decay_sh.astype(complex), st.decay_amp.astype(complex),
                  st.l11.astype(complex), st.l21.astype(complex), st.l22.astype(complex), z1, z2)
    if single:
        sh, amp = sh[0], amp[0]
    return CoupledPath(path.grid, sh, amp, path.t_slow + h, path.clamped + st.clamped)


def error_snapshot(path, epsilon, x):
    """Fast-scale error field ``2 Re((sh - amp)(eps x) e^{ix})``."""
    x = np.asarray(x, dtype=float)
    phi = path.sh_state - path.amp_state
    E = synthesis_matrix(path.grid, epsilon * x)
    vals = 2.0 * ((phi @ E.T) * np.exp(1j * x)).real
    if vals.ndim == 1:
        return PhysicalSamples(x, vals)
    return vals


def sample_stationary_gaussian(q, grid, stream):
    """Complex Gaussian field with covariance multiplier ``q``.

    ``coeff(K_j) = sqrt(q(K_j) dK / 2pi) z_j`` so that
    ``E|A(X)|^2 = sum_j q(K_j) dK / 2pi``.
    """
    qv = np.asarray(q(grid.modes) if callable(q) else q, dtype=float)
    qv = np.broadcast_to(qv, grid.modes.shape)
    if np.any(qv < 0) or not np.all(np.isfinite(qv)):
        raise ValueError("q must be finite and nonnegative on the grid")
    z = sample_complex_gaussian(stream, grid.n_modes)
    return ComplexModeState(grid, np.sqrt(qv * grid.noise_intensity) * z)


# ---------------------------------------------------------------------------
# variance oracle

def _inner_k_integral(s, rtol):
    """``int_R exp(-2 s (1 - k^2)^2) dk`` for one ``s > 0``."""
    k_hi = np.sqrt(1.0 + np.sqrt(40.0 / s))
    f = lambda k: np.exp(-2.0 * s * (1.0 - k * k) ** 2)
    a, ea, oka = adaptive_gl(f, 0.0, 1.0, rtol=rtol)
    b, eb, okb = adaptive_gl(f, 1.0, k_hi, rtol=rtol)
    return 2.0 * (a + b), oka and okb


@dataclass(frozen=True)
class OracleValue:
    value: float
    converged: bool
    est_error: float


def variance_oracle(t, tol=1e-8):
    """Variance ``(1/2pi) int_0^t int_R exp(-2 s (1 - k^2)^2) dk ds`` of the
    fast stochastic convolution at one point.

    The inner integral grows like ``s^(-1/4)`` as ``s -> 0``; the outer
    integral is taken in ``v`` with ``s = t v^4``, which makes the integrand
    smooth.  Returns an :class:`OracleValue`; ``converged`` is False when the
    tolerance was not met.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    flags = []

    def outer(v):
        v = np.atleast_1d(v)
        out = np.empty(v.shape)
        for i, vi in enumerate(v):
            s = t * vi**4
            if s == 0.0:
                out[i] = 0.0
                continue
            g, ok = _inner_k_integral(s, 0.1 * tol)
            flags.append(ok)
            out[i] = 4.0 * t * vi**3 * g
        return out

    val, err, ok = adaptive_gl(outer, 0.0, 1.0, rtol=tol)
    conv = ok and all(flags) and err <= tol * abs(val) * 10
    return OracleValue(val / (2.0 * np.pi), bool(conv), err / (2.0 * np.pi))


def _swapped_integrand(k, t):
    """``int_0^t exp(-2 s (1-k^2)^2) ds`` (closed form, limit t at k = +-1)."""
    a = 2.0 * (1.0 - k * k) ** 2
    return t * _phi(a * t)


def truncation_correction(t, k_lo, k_hi):
    """Part of the variance integral outside ``[k_lo, k_hi] U [-k_hi, -k_lo]``
    (``0 <= k_lo < 1 < k_hi``), in the same units as :func:`variance_oracle`."""
    from scipy.integrate import quad

    if not 0.0 <= k_lo < 1.0 < k_hi:
        raise ValueError("need 0 <= k_lo < 1 < k_hi")
    f = lambda k: float(_swapped_integrand(k, t))
    inner, _ = quad(f, 0.0, k_lo, limit=200, epsabs=1e-13, epsrel=1e-11) if k_lo > 0 else (0.0, 0.0)
    outer, _ = quad(f, k_hi, np.inf, limit=200, epsabs=1e-13, epsrel=1e-11)
    return 2.0 * (inner + outer) / (2.0 * np.pi)
