"""Vectorised numpy implementations of the hot loops (fallback backend)."""
import numpy as np

from .kernels import eval_code

NAME = "numpy"


def eval_grid(code, eps, nu, delta, taus, ks):
    return eval_code(code, eps, nu, delta, np.asarray(taus)[:, None], np.asarray(ks)[None, :])


def panel_matrix(code, eps, nu, delta, tn, tw, kn, kw, shift, gamma, weighted, mode):
    pt, mt = tn.shape
    pk, mk = kn.shape
    kflat = kn.ravel()
    wk = kw.ravel()
    if weighted:
        wk = wk * (np.abs(kflat) ** (2.0 * gamma) + 1.0)
    out = np.empty((pt, pk))
    for a in range(pt):
        tau = tn[a][:, None]
        v = eval_code(code, eps, nu, delta, tau, kflat[None, :])
        if mode == 1:
            v = eval_code(code, eps, nu, delta, tau + shift, kflat[None, :]) - v
        out[a] = ((tw[a] @ (v * v)) * wk).reshape(pk, mk).sum(axis=1)
    return out


def ou_advance(sh, amp, dsh, damp, l11, l21, l22, z1, z2):
    new_sh = dsh * sh + l11 * z1
    amp *= damp
    amp += l21 * z1 + l22 * z2
    sh[...] = new_sh


def modulated_sup(phi, carrier, weight):
    return (np.abs(2.0 * (phi * carrier).real) * weight).max(axis=1)
