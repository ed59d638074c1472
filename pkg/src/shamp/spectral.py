"""Truncated Fourier representation of periodic fields on the slow scale.

Convention used throughout the package: a field is represented as

    u(X) = sum_j c_j exp(i K_j X),    K_j = j * dK,  j = -n/2 .. n/2 - 1,

so it is periodic with period ``P = 2 pi / dK``.  A continuum Fourier integral
``(1/2pi) int u_hat(K) e^{iKX} dK`` is discretised as a Riemann sum, i.e.
``c_j = u_hat(K_j) * dK / (2 pi)``.
"""
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

REAL_SYMMETRY_RTOL = 1e-12
REAL_RESIDUE_RTOL = 1e-10


@dataclass(frozen=True)
class WavenumberGrid:
    """Symmetric slow-scale wavenumber grid ``K_j = j * delta_k``."""

    delta_k: float
    n_modes: int
    modes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if isinstance(self.n_modes, bool) or int(self.n_modes) != self.n_modes:
            raise ValueError("n_modes must be an integer")
        if self.n_modes < 2:
            raise ValueError("n_modes must be >= 2")
        if self.n_modes % 2:
            raise ValueError("n_modes must be even")
        if not (np.isfinite(self.delta_k) and self.delta_k > 0):
            raise ValueError("delta_k must be positive")
        object.__setattr__(self, "n_modes", int(self.n_modes))
        object.__setattr__(self, "delta_k", float(self.delta_k))
        j = np.arange(-self.n_modes // 2, self.n_modes // 2)
        modes = j * self.delta_k
        modes.setflags(write=False)
        object.__setattr__(self, "modes", modes)

    @property
    def period(self):
        return 2.0 * np.pi / self.delta_k

    @property
    def k_max(self):
        return self.n_modes // 2 * self.delta_k

    @property
    def noise_intensity(self):
        """Per-mode variance rate ``dK / 2pi`` of spatial white noise."""
        return self.delta_k / (2.0 * np.pi)

    def uniform_points(self):
        """The sample points ``X_m = (m - n/2) P / n`` served by the FFT path."""
        n = self.n_modes
        return (np.arange(n) - n // 2) * (self.period / n)

    def mirror_index(self):
        """Index of ``-K_j`` for each j (the lone endpoint maps to itself)."""
        n = self.n_modes
        idx = (n - np.arange(n)) % n
        idx[0] = 0
        return idx


def make_grid(n_modes, delta_k):
    """Grid with ``n_modes`` modes spaced ``delta_k`` apart.

    Examples
    --------
    >>> make_grid(4, 0.5).modes
    array([-1. , -0.5,  0. ,  0.5])
    """
    return WavenumberGrid(delta_k=delta_k, n_modes=n_modes)


def is_conjugate_symmetric(grid, coeffs, rtol=REAL_SYMMETRY_RTOL):
    """Check ``c(-K) == conj(c(K))`` on all paired modes.

    The one-sided endpoint ``K = -n/2 dK`` has no partner and is skipped.
    """
    c = np.asarray(coeffs)
    partner = np.conj(c[..., grid.mirror_index()])
    scale = max(np.max(np.abs(c), initial=0.0), np.finfo(float).tiny)
    return bool(np.all(np.abs(c[..., 1:] - partner[..., 1:]) <= rtol * scale))


@dataclass(frozen=True)
class ComplexModeState:
    """Complex Fourier coefficients of one field on ``grid``.

    With ``real=True`` the coefficients must be conjugate symmetric; the
    synthesised values are then returned as real numbers.
    """

    grid: WavenumberGrid
    coeffs: np.ndarray
    real: bool = False

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != (self.grid.n_modes,):
            raise ValueError(f"coeffs must have length n_modes={self.grid.n_modes}, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coeffs must be finite")
        if self.real and not is_conjugate_symmetric(self.grid, c):
            raise ValueError("coeffs flagged real are not conjugate symmetric")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, grid, real=False):
        return cls(grid, np.zeros(grid.n_modes, dtype=complex), real)


@dataclass(frozen=True)
class PhysicalSamples:
    """Values of a field at strictly increasing points."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.array(self.points, dtype=float)
        v = np.array(self.values)
        if x.ndim != 1 or x.size == 0:
            raise ValueError("points must be a nonempty 1-d array")
        if v.shape != x.shape:
            raise ValueError("values must match points")
        if x.size > 1 and not np.all(np.diff(x) > 0):
            raise ValueError("points must be strictly increasing")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise ValueError("points and values must be finite")
        x.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "points", x)
        object.__setattr__(self, "values", v)

    @property
    def is_real(self):
        return not np.iscomplexobj(self.values)


def synthesis_matrix(grid, points):
    """Matrix ``E[i, j] = exp(i K_j X_i)`` so that ``values = E @ coeffs``."""
    x = np.asarray(points, dtype=float)
    return np.exp(1j * np.outer(x, grid.modes))


def _on_fft_grid(grid, x):
    if x.size != grid.n_modes:
        return False
    ref = grid.uniform_points()
    return np.allclose(x, ref, rtol=0.0, atol=1e-12 * grid.period)


def synthesize_coeffs(grid, coeffs, points):
    """Evaluate ``sum_j c_j e^{i K_j X}`` for coefficient rows ``coeffs[..., n]``.

    Uses an FFT when ``points`` are exactly :meth:`WavenumberGrid.uniform_points`
    and direct summation otherwise.
    """
    c = np.asarray(coeffs, dtype=complex)
    x = np.asarray(points, dtype=float)
    if _on_fft_grid(grid, x):
        n = grid.n_modes
        y = n * np.fft.ifft(np.fft.ifftshift(c, axes=-1), axis=-1)
        return np.fft.fftshift(y, axes=-1)
    return c @ synthesis_matrix(grid, x).T


def analyze(grid, values):
    """Inverse of the FFT synthesis path: coefficients from samples on
    :meth:`WavenumberGrid.uniform_points` (rows of ``values`` handled together)."""
    v = np.asarray(values, dtype=complex)
    if v.shape[-1] != grid.n_modes:
        raise ValueError("values must be sampled on the grid's uniform points")
    c = np.fft.fft(np.fft.ifftshift(v, axes=-1), axis=-1) / grid.n_modes
    return np.fft.fftshift(c, axes=-1)


def synthesize_oversampled(grid, coeffs, factor):
    """Values on ``factor * n_modes`` uniform points of one period.

    Returns ``(points, values)``; the coefficients are zero-padded so the
    same trigonometric polynomial is sampled more finely.
    """
    factor = int(factor)
    if factor < 1:
        raise ValueError("factor must be >= 1")
    c = np.asarray(coeffs, dtype=complex)
    n = grid.n_modes
    m = factor * n
    pad = np.zeros(c.shape[:-1] + (m,), dtype=complex)
    pad[..., m // 2 - n // 2: m // 2 + n // 2] = c
    y = m * np.fft.ifft(np.fft.ifftshift(pad, axes=-1), axis=-1)
    x = (np.arange(m) - m // 2) * (grid.period / m)
    return x, np.fft.fftshift(y, axes=-1)


def synthesize(state, points):
    """Physical samples of ``state`` at ``points``.

    Examples
    --------
    >>> g = make_grid(4, 1.0)
    >>> s = ComplexModeState(g, [0, 0.5, 0, 0.5], real=True)
    >>> np.allclose(synthesize(s, [0.0, np.pi]).values, [1.0, -1.0])
    True
    """
    x = np.asarray(points, dtype=float)
    v = synthesize_coeffs(state.grid, state.coeffs, x)
    if state.real:
        scale = max(np.max(np.abs(v), initial=0.0), np.finfo(float).tiny)
        resid = np.max(np.abs(v.imag), initial=0.0)
        if resid > REAL_RESIDUE_RTOL * scale:
            raise ValueError(f"imaginary residue {resid:.3e} too large for a real state")
        v = v.real
    return PhysicalSamples(x, v)


def apply_multiplier(state, m: Callable):
    """Multiply every coefficient by ``m(K)``.

    ``m`` is called once with the full mode array (it may also be a scalar
    function, in which case it is vectorised).
    """
    K = state.grid.modes
    try:
        vals = np.asarray(m(K), dtype=complex)
        if vals.shape != K.shape:
            vals = np.broadcast_to(vals, K.shape)
    except (TypeError, ValueError):
        vals = np.array([complex(m(float(k))) for k in K])
    bad = ~np.isfinite(vals)
    if np.any(bad):
        k = float(K[np.argmax(bad)])
        raise ValueError(f"multiplier not finite at mode K={k!r}")
    c = vals * state.coeffs
    real = state.real and is_conjugate_symmetric(state.grid, c)
    return ComplexModeState(state.grid, c, real)


def modulate(A, X, epsilon):
    """``2 Re(A(X) e^{i X/eps})`` for arrays (no validation)."""
    return 2.0 * (np.asarray(A) * np.exp(1j * np.asarray(X) / epsilon)).real


def modulate_reconstruct(A, epsilon):
    """Fast-scale field ``2 Re(A(X) e^{ix})`` at ``x = X / eps``.

    Examples
    --------
    >>> A = PhysicalSamples([0.0, 1.0], np.array([1j, 1j]))
    >>> np.allclose(modulate_reconstruct(A, 0.5).values, -2 * np.sin([0.0, 2.0]))
    True
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    x = A.points / epsilon
    vals = 2.0 * (A.values * np.exp(1j * x)).real
    return PhysicalSamples(x, vals)
