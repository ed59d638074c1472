"""Weighted supremum norms of sampled fields.

``c0_gamma`` is the polynomially weighted sup-norm
``sup_x (1 + x^2)^(-gamma/2) |u(x)|``; ``curly_c0_gamma`` is the equivalent
window form ``sup_L L^(-gamma) sup_{|x| <= L} |u(x)|`` over integer ``L``.
Both are evaluated exactly at the sample points; no interpolation.
"""
from dataclasses import dataclass

import numpy as np

from .spectral import PhysicalSamples


@dataclass(frozen=True)
class WeightParams:
    gamma: float

    def __post_init__(self):
        if not 0.0 < self.gamma < 0.5:
            raise ValueError(f"gamma out of range (0, 0.5): {self.gamma}")


def _gamma(w):
    return w.gamma if isinstance(w, WeightParams) else WeightParams(float(w)).gamma


def weight(x, gamma):
    """``(1 + x^2)^(-gamma/2)``."""
    x = np.asarray(x, dtype=float)
    return (1.0 + x * x) ** (-0.5 * gamma)


def _real_values(field):
    if not field.is_real:
        raise ValueError("field must be real-valued")
    if field.values.size == 0:
        raise ValueError("empty point set")
    return field.values


def c0_gamma(field, w):
    """``max_i (1 + x_i^2)^(-gamma/2) |u(x_i)|``.

    Examples
    --------
    >>> f = PhysicalSamples([-1.0, 0.0, 2.0], [3.0, 3.0, 3.0])
    >>> c0_gamma(f, WeightParams(0.1))
    3.0
    """
    v = _real_values(field)
    return float(np.max(weight(field.points, _gamma(w)) * np.abs(v)))


def c0_gamma_rows(values, points, gamma):
    """Row-wise ``c0_gamma`` of a stack of real fields sharing ``points``."""
    v = np.asarray(values, dtype=float)
    return np.max(np.abs(v) * weight(points, gamma), axis=-1)


def window_sups(points, values, L_list):
    """``sup_{|x| <= L} |u|`` for each ``L`` (rows of ``values`` handled together).

    Windows containing no sample give 0.
    """
    x = np.asarray(points, dtype=float)
    v = np.abs(np.asarray(values))
    order = np.argsort(np.abs(x), kind="stable")
    ax = np.abs(x)[order]
    cm = np.maximum.accumulate(v[..., order], axis=-1)
    cnt = np.searchsorted(ax, np.asarray(L_list, dtype=float), side="right")
    out = np.zeros(v.shape[:-1] + (len(cnt),))
    for i, c in enumerate(cnt):
        if c > 0:
            out[..., i] = cm[..., c - 1]
    return out


def curly_c0_gamma(field, w, L_max=None):
    """``max_{L = 1..floor(L_max)} L^(-gamma) max_{|x_i| <= L} |u(x_i)|``.

    ``L_max`` defaults to the half-width of the sampled interval,
    ``min(-x_first, x_last)``.

    Examples
    --------
    >>> x = np.linspace(-4, 4, 801)
    >>> u = np.where((x >= 2) & (x <= 3), 8.0 * (x - 2), 0.0)
    >>> round(curly_c0_gamma(PhysicalSamples(x, u), 1.0), 12) == round(8 / 3, 12)
    True
    """
    v = _real_values(field)
    if L_max is None:
        L_max = min(-field.points[0], field.points[-1])
    if not L_max >= 1:
        raise ValueError(f"L_max must be >= 1, got {L_max}")
    g = w.gamma if isinstance(w, WeightParams) else float(w)
    if not 0.0 <= g:
        raise ValueError("gamma must be nonnegative")
    L = np.arange(1, int(np.floor(L_max)) + 1, dtype=float)
    sups = window_sups(field.points, v, L)
    return float(np.max(L ** (-g) * sups))


@dataclass(frozen=True)
class SpaceTimeSamples:
    """Real field values ``values[t, i]`` at ``times[t]`` and shared ``points[i]``."""

    times: np.ndarray
    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.array(self.times, dtype=float).ravel()
        x = np.array(self.points, dtype=float)
        v = np.array(self.values)
        if t.size == 0:
            raise ValueError("times must be nonempty")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be increasing")
        if np.any(t < 0):
            raise ValueError("times must be >= 0")
        if v.shape != (t.size, x.size):
            raise ValueError("values must have shape (len(times), len(points))")
        PhysicalSamples(x, v[0])  # point-set validation
        for a in (t, x, v):
            a.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", x)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_fields(cls, times, fields):
        fields = list(fields)
        if not fields:
            raise ValueError("times must be nonempty")
        x = fields[0].points
        for f in fields[1:]:
            if not np.array_equal(f.points, x):
                raise ValueError("all fields must share the same point set")
        return cls(times, x, np.stack([f.values for f in fields]))

    @property
    def fields(self):
        return [PhysicalSamples(self.points, row) for row in self.values]


def c0_gamma_spacetime(st, w):
    """``max_t c0_gamma(u(t))``."""
    if np.iscomplexobj(st.values):
        raise ValueError("field must be real-valued")
    return float(np.max(c0_gamma_rows(st.values, st.points, _gamma(w))))
