"""Compiled inner loop of the reverse Loewner flow.

The driver arrives as the flat tuple from ``Driver.kernel_args``.  Each
step applies half of the driver increment, the exact slit map
``h -> sqrt(h**2 - 4 ds)`` and the other half, so every substep is a
conformal self-map of the upper half-plane.
"""
import math

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_BUDGET = 1
STATUS_CAPACITY = 2


@njit(cache=True, nogil=True)
def _base(kind, sigma, base_T, kt, kv, u):
    if kind == 0:
        return 0.0
    if kind == 1:
        return sigma * math.sqrt(max(u, 0.0))
    if kind == 2:
        return sigma * (math.sqrt(max(base_T - u, 0.0)) - math.sqrt(base_T))
    n = kt.shape[0]
    if u <= kt[0]:
        return kv[0]
    if u >= kt[n - 1]:
        return kv[n - 1]
    j = np.searchsorted(kt, u, side="right") - 1
    w = (u - kt[j]) / (kt[j + 1] - kt[j])
    return kv[j] + w * (kv[j + 1] - kv[j])


@njit(cache=True, nogil=True)
def lam(kind, sigma, base_T, kt, kv, offset, direction, scale, u):
    return scale * (_base(kind, sigma, base_T, kt, kv, offset + direction * u)
                    - _base(kind, sigma, base_T, kt, kv, offset))


@njit(cache=True, nogil=True)
def slit_step(h, ds):
    """Exact flow of dh = -2/h ds over ``ds``; returns (new h, h'/h_old')."""
    q = 4.0 * ds / (h * h)
    r = np.sqrt(1.0 - q)
    return h * r, 1.0 / r


@njit(cache=True, nogil=True)
def reverse_flow(kind, sigma, base_T, kt, kv, offset, direction, scale,
                 t, z0, tol, max_steps, record, out_s, out_h, out_ld, out_ad):
    """Integrate the reverse flow driven by lambda(t) - lambda(t - s).

    Returns (status, n_steps, h_t, log|h'|, arg h').  When ``record`` is
    true the state after step k is written to index k of the out arrays;
    running out of room returns STATUS_CAPACITY.
    """
    lam_t = lam(kind, sigma, base_T, kt, kv, offset, direction, scale, t)
    h = z0
    s = 0.0
    b_prev = 0.0
    logd = 0.0
    argd = 0.0
    n = 0
    if record:
        out_s[0] = 0.0
        out_h[0] = h
        out_ld[0] = 0.0
        out_ad[0] = 0.0
    while s < t:
        if n >= max_steps:
            return STATUS_BUDGET, n, h, logd, argd
        if record and n + 1 >= out_s.shape[0]:
            return STATUS_CAPACITY, n, h, logd, argd
        y = h.imag
        ds = 0.25 * tol * y * y
        if s + ds >= t or t - (s + ds) < 1e-3 * ds:
            s_new = t
        else:
            s_new = s + ds
        ds = s_new - s
        s_mid = s + 0.5 * ds
        b_mid = lam_t - lam(kind, sigma, base_T, kt, kv, offset, direction, scale,
                            max(t - s_mid, 0.0))
        b_new = lam_t - lam(kind, sigma, base_T, kt, kv, offset, direction, scale,
                            max(t - s_new, 0.0))
        h = h + (b_mid - b_prev)
        h, factor = slit_step(h, ds)
        logd += math.log(abs(factor))
        argd += math.atan2(factor.imag, factor.real)
        h = h + (b_new - b_mid)
        b_prev = b_new
        s = s_new
        n += 1
        if record:
            out_s[n] = s
            out_h[n] = h
            out_ld[n] = logd
            out_ad[n] = argd
    return STATUS_OK, n, h, logd, argd
