"""Closed-form bounds for quasislits driven by Lip-1/2 functions.

Everything here is a function of the seminorm ``sigma`` (plus the
comparison-ODE parameters for the Lambert-W machinery); no flows are
integrated.  Values outside a bound's hypothesis are returned as ``None``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

EIGHT_OVER_PI = 8.0 / math.pi
WINDING_SIGMA_MAX = 4.0 * math.sqrt(2.0) / math.pi
QUASIARC_SIGMA_MAX = 1.0 / 3.0


def _check_sigma(sigma):
    if not (0.0 < sigma < 4.0):
        raise ValueError(f"sigma={sigma} outside (0, 4)")


def lambert_w(x: float) -> float:
    """Principal branch of the Lambert W function on ``x >= 0``.

    Halley iteration from ``log(1 + x)``.
    """
    if x < 0 or math.isnan(x):
        raise ValueError("lambert_w is only defined here for x >= 0")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf
    w = math.log1p(x)
    for _ in range(100):
        # f = w e^w - x written as w - x e^{-w} to stay finite for large x
        ew = math.exp(-w)
        f = w - x * ew
        fp = 1.0 + x * ew
        fpp = -x * ew
        step = 2.0 * f * fp / (2.0 * fp * fp - f * fpp)
        w_new = w - step
        if abs(step) <= 4e-16 * abs(w_new):
            return w_new
        w = w_new
    return w


def _p_gap(x, sigma):
    # log(lhs) - log(rhs); 16x^2 - s^2(x+1)^2 factored to avoid cancellation
    q = ((4.0 - sigma) * x - sigma) * ((4.0 + sigma) * x + sigma)
    if q <= 0:
        return -math.inf
    return x + 0.5 * math.log(q) - 0.5 * math.log(16.0 - sigma * sigma)


def p_of_sigma(sigma: float) -> float:
    """Unique ``x > sigma/(4-sigma)`` with ``e^x = sqrt(16-s^2)/sqrt(16x^2 - s^2(x+1)^2)``."""
    _check_sigma(sigma)
    x_left = sigma / (4.0 - sigma)
    lo = x_left * (1.0 + 1e-9)
    while _p_gap(lo, sigma) > 0:
        # root squeezed against the singular endpoint (sigma close to 4)
        nxt = x_left + 0.5 * (lo - x_left)
        if nxt <= x_left or nxt == lo:
            return lo
        lo = nxt
    hi = max(2.0 * lo, 1.0)
    while _p_gap(hi, sigma) < 0:
        hi *= 2.0
    while hi - lo > 1e-13 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if _p_gap(mid, sigma) < 0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    # one Newton polish on the log-gap; keep it only if it stays bracketed
    a, b = (4.0 - sigma), (4.0 + sigma)
    deriv = 1.0 + 0.5 * (a / (a * x - sigma) + b / (b * x + sigma))
    x_new = x - _p_gap(x, sigma) / deriv
    return x_new if lo <= x_new <= hi else x


def p_residual(sigma: float, x: float) -> float:
    """Relative residual |lhs - rhs|/rhs of the defining equation of p."""
    rhs = math.sqrt(16.0 - sigma * sigma) / math.sqrt(
        ((4.0 - sigma) * x - sigma) * ((4.0 + sigma) * x + sigma))
    return abs(math.exp(x) - rhs) / rhs


def k_sigma(sigma: float) -> float:
    _check_sigma(sigma)
    return sigma / math.sqrt(16.0 - sigma * sigma)


def big_l(sigma: float) -> float:
    """Cone constant valid for every sigma < 4."""
    p = p_of_sigma(sigma)
    try:
        return k_sigma(sigma) * (1.0 + p) * math.exp(p)
    except OverflowError:
        return math.inf


def small_sigma_cone(sigma: float) -> float | None:
    """``pi*sigma/sqrt(64 - pi^2 sigma^2)`` for sigma < 8/pi, else None."""
    if not 0.0 <= sigma < EIGHT_OVER_PI:
        return None
    return math.pi * sigma / math.sqrt(64.0 - (math.pi * sigma) ** 2)


def cone_lower(sigma: float) -> float:
    """Opening of the ray generated by ``sigma*sqrt(t)``; a lower bound for the cone."""
    return math.tan(0.5 * math.pi * sigma / math.sqrt(16.0 + sigma * sigma))


@dataclass(frozen=True)
class ConeBound:
    m: float
    K: float
    part_ii: float | None
    cone_lower: float
    L: float


def cone_bound(sigma: float) -> ConeBound:
    _check_sigma(sigma)
    L = big_l(sigma)
    part_ii = small_sigma_cone(sigma)
    m = L if part_ii is None else min(L, part_ii)
    return ConeBound(m, k_sigma(sigma), part_ii, cone_lower(sigma), L)


def m_sigma(sigma: float) -> float:
    return cone_bound(sigma).m


@dataclass(frozen=True)
class HolderExponents:
    alpha_cap: float
    alpha_cor2: float | None
    alpha_spiral_ref: float  # conjectured optimal, not a proven bound


def holder_exponents(sigma: float) -> HolderExponents:
    m = m_sigma(sigma)
    a2 = 1.0 - (math.pi * sigma) ** 2 / 64.0 if sigma < EIGHT_OVER_PI else None
    return HolderExponents(1.0 / (1.0 + m * m), a2, 1.0 - sigma * sigma / 16.0)


def winding_coefficients(sigma: float) -> tuple[float, float]:
    """(a, b) in ``|arg f_t'| <= a log(y^2+4t) + b log(1/y)``."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma < WINDING_SIGMA_MAX:
        a = math.pi * sigma * math.sqrt(64.0 - (math.pi * sigma) ** 2) / 64.0
        return a, 2.0 * a
    return 1.0, 2.0


def winding_bound(sigma: float, t: float, y: float) -> tuple[float, float, float]:
    if not (t > 0 and y > 0):
        raise ValueError("t and y must be positive")
    a, b = winding_coefficients(sigma)
    return a * math.log(y * y + 4.0 * t) + b * math.log(1.0 / y), a, b


def comparison_z(z0: float, sigma: float, s: float) -> float:
    """Exact solution of ``dZ = sigma d(sqrt s) - (sigma^2/8)/Z ds``, ``Z_0 = z0``."""
    if not z0 > 0:
        raise ValueError("z0 must be positive")
    _check_sigma(sigma)
    if s < 0:
        raise ValueError("s must be non-negative")
    r = 0.5 * sigma * math.sqrt(s)
    return r + z0 * math.exp(lambert_w(r / z0))


def _check_kappa(sigma, kappa):
    if not (sigma * sigma / 4.0 < kappa < 4.0):
        raise ValueError(f"kappa={kappa} outside (sigma^2/4, 4)")


def h_func(x0: float, sigma: float, x: float, form: int = 1) -> float:
    """``H_{x0}(x)``, the square of the comparison solution at time ``x``.

    ``form=2`` uses the equivalent ``sigma^2 x/4 (1 + 1/W)^2`` expression,
    which is undefined at ``x = 0``.
    """
    if not x0 > 0:
        raise ValueError("x0 must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if form == 1:
        return comparison_z(x0, sigma, x) ** 2
    w = lambert_w(0.5 * sigma * math.sqrt(x) / x0)
    return 0.25 * sigma * sigma * x * (1.0 + 1.0 / w) ** 2


def m_of_kappa(x0: float, sigma: float, kappa: float) -> float:
    """Closed-form inverse: the ``M`` with ``sigma^2/4 (1 + 1/W(sigma sqrt(M)/(2 x0)))^2 = kappa``."""
    if not x0 > 0:
        raise ValueError("x0 must be positive")
    _check_sigma(sigma)
    _check_kappa(sigma, kappa)
    w = sigma / (2.0 * math.sqrt(kappa) - sigma)
    try:
        return (2.0 * x0 / sigma * w * math.exp(w)) ** 2
    except OverflowError:
        return math.inf


def mk_residual(x0: float, sigma: float, kappa: float, M: float) -> float:
    w = lambert_w(0.5 * sigma * math.sqrt(M) / x0)
    return abs(0.25 * sigma * sigma * (1.0 + 1.0 / w) ** 2 - kappa)


def v_envelope(x0: float, y0: float, sigma: float, kappa: float, s: float) -> float:
    """Linear envelope ``max(M/y0^2, 1/(4-kappa)) (y0^2 + s)`` for the time-change ODE."""
    if not y0 > 0:
        raise ValueError("y0 must be positive")
    if s < 0:
        raise ValueError("s must be non-negative")
    M = m_of_kappa(x0, sigma, kappa)
    return max(M / (y0 * y0), 1.0 / (4.0 - kappa)) * (y0 * y0 + s)


def v_rhs(x0: float, y0: float, sigma: float):
    """Right side of ``dV/ds = H_{x0}(V)/(4(y0^2+s)) + 1/4`` as ``f(s, V)``."""
    def f(s, V):
        return 0.25 * h_func(x0, sigma, max(V, 0.0)) / (y0 * y0 + s) + 0.25
    return f


@dataclass(frozen=True)
class QuasiarcProfile:
    k: float | None
    alpha_reparam: float | None


def quasiarc_profile(sigma: float) -> QuasiarcProfile:
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma >= QUASIARC_SIGMA_MAX:
        return QuasiarcProfile(None, None)
    k = 3.0 * sigma
    return QuasiarcProfile(k, 1.0 / (1.0 + k * k))


@dataclass(frozen=True)
class BoundProfile:
    sigma: float
    p: float
    L: float
    K: float
    m: float
    xi: float
    part_ii: float | None
    alpha_cap: float
    alpha_cor2: float | None
    cone_lower: float
    a_wind: float
    b_wind: float
    k_quasiarc: float | None
    alpha_reparam: float | None
    alpha_spiral_ref: float
    dimension_upper: float | None  # 1 + pi^2 sigma^2/64, leading order only

    def as_dict(self) -> dict:
        return asdict(self)


CSV_COLUMNS = ("sigma", "p", "L", "K", "m", "alpha_cap", "alpha_cor2",
               "cone_lower", "a_wind", "b_wind", "k")


def bound_profile(sigma: float) -> BoundProfile:
    cb = cone_bound(sigma)
    ex = holder_exponents(sigma)
    a, b = winding_coefficients(sigma)
    qa = quasiarc_profile(sigma)
    m = cb.m
    return BoundProfile(
        sigma=sigma, p=p_of_sigma(sigma), L=cb.L, K=cb.K, m=m,
        xi=(m * m - 1.0) / (m * m + 1.0) if math.isfinite(m) else 1.0,
        part_ii=cb.part_ii, alpha_cap=ex.alpha_cap, alpha_cor2=ex.alpha_cor2,
        cone_lower=cb.cone_lower, a_wind=a, b_wind=b,
        k_quasiarc=qa.k, alpha_reparam=qa.alpha_reparam,
        alpha_spiral_ref=ex.alpha_spiral_ref,
        dimension_upper=None if ex.alpha_cor2 is None else 1.0 + (math.pi * sigma) ** 2 / 64.0,
    )


def profile_row(bp: BoundProfile) -> list[str]:
    vals = (bp.sigma, bp.p, bp.L, bp.K, bp.m, bp.alpha_cap, bp.alpha_cor2,
            bp.cone_lower, bp.a_wind, bp.b_wind, bp.k_quasiarc)
    return ["" if v is None else repr(float(v)) for v in vals]
