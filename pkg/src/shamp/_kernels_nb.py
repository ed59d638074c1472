"""numba implementations of the hot loops.

Signatures and semantics mirror :mod:`shamp._kernels_np` exactly; the test
suite checks the two against each other.
"""
import math

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True, inline="always")
def _diff_exp(tau, K, eps, nu):
    b = 4.0 * K * K
    d = eps * K * K * K * (4.0 + eps * K)
    x = -tau * d
    if abs(x) < 1.0:
        return math.exp(tau * nu - tau * b) * math.expm1(x)
    return math.exp(tau * nu - tau * (b + d)) - math.exp(tau * nu - tau * b)


@njit(cache=True)
def kernel_value(code, eps, nu, delta, tau, K):
    if code == 0:
        if K >= -1.0 / eps:
            return _diff_exp(tau, K, eps, nu)
        return -math.exp(tau * nu - 4.0 * tau * K * K)
    if code == 1:
        return _diff_exp(tau, K, eps, nu)
    if code == 2:
        if K >= delta / eps:
            e = 2.0 + eps * K
            return math.exp(tau * nu - tau * e * e * K * K)
        return 0.0
    if code == 3:
        if K >= -1.0 / eps and K <= -delta / eps:
            e = 2.0 + eps * K
            return math.exp(tau * nu - tau * e * e * K * K)
        return 0.0
    if code == 4:
        if abs(K) < delta / eps:
            return _diff_exp(tau, K, eps, nu)
        return 0.0
    if code == 5:
        if K >= delta / eps:
            return -2.0 * math.exp(tau * nu - 4.0 * tau * K * K)
        return 0.0
    return math.nan


@njit(cache=True)
def eval_grid(code, eps, nu, delta, taus, ks):
    """Kernel values on the tensor grid ``taus x ks``."""
    out = np.empty((taus.size, ks.size))
    for i in range(taus.size):
        for j in range(ks.size):
            out[i, j] = kernel_value(code, eps, nu, delta, taus[i], ks[j])
    return out


@njit(cache=True)
def panel_matrix(code, eps, nu, delta, tn, tw, kn, kw, shift, gamma, weighted, mode):
    """Integral of the squared kernel over every (tau panel, K panel) cell.

    ``mode == 0``: ``f(tau, K)**2``; ``mode == 1``: ``(f(tau+shift, K) - f(tau, K))**2``.
    The weight ``|K|**(2 gamma) + 1`` is applied when ``weighted`` is true.
    """
    pt, mt = tn.shape
    pk, mk = kn.shape
    out = np.zeros((pt, pk))
    for b in range(pk):
        for j in range(mk):
            K = kn[b, j]
            wk = kw[b, j]
            if weighted:
                wk *= abs(K) ** (2.0 * gamma) + 1.0
            for a in range(pt):
                acc = 0.0
                for i in range(mt):
                    tau = tn[a, i]
                    v = kernel_value(code, eps, nu, delta, tau, K)
                    if mode == 1:
                        v = kernel_value(code, eps, nu, delta, tau + shift, K) - v
                    acc += tw[a, i] * v * v
                out[a, b] += wk * acc
    return out


@njit(cache=True)
def ou_advance(sh, amp, dsh, damp, l11, l21, l22, z1, z2):
    """In-place exact OU step for a batch of replicas (rows) and modes (columns)."""
    r, n = sh.shape
    for i in range(r):
        for j in range(n):
            a = z1[i, j]
            sh[i, j] = dsh[j] * sh[i, j] + l11[j] * a
            amp[i, j] = damp[j] * amp[i, j] + l21[j] * a + l22[j] * z2[i, j]


@njit(cache=True)
def modulated_sup(phi, carrier, weight):
    """Per-row ``max_i weight_i * |2 Re(phi_i * carrier_i)|``."""
    r, n = phi.shape
    out = np.zeros(r)
    for i in range(r):
        m = 0.0
        for j in range(n):
            c = carrier[j]
            v = abs(2.0 * (phi[i, j].real * c.real - phi[i, j].imag * c.imag)) * weight[j]
            if v > m:
                m = v
        out[i] = m
    return out
