"""Forward and reverse Loewner flows, curve tracing and time change.

The reverse flow ``dh = dbeta - 2/h ds`` is integrated by composing exact
slit maps with the driver held piecewise constant, so trajectories never
leave the upper half-plane and the spatial derivative is a product of
exact factors.  ``h_t(z) = f_t(lambda_t + z)``, hence the tip of the
curve is ``gamma(t) = lim h_t(iy)`` as ``y -> 0``.
"""
from __future__ import annotations

import cmath
import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import _kernel
from .driving import Driver


class SolverError(RuntimeError):
    pass


class StepBudgetExceeded(SolverError):
    pass


class Swallowed(SolverError):
    """The forward flow of a point hit the driver (point swallowed)."""

    def __init__(self, z, time):
        super().__init__(f"{z} swallowed at t={time:.6g}")
        self.z = z
        self.time = time


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-3
    max_steps: int = 50_000_000
    y_tip: float | None = None  # None means 1e-4 * sqrt(t)
    richardson: bool = True
    derivative_mode: str = "exact"  # or "quadrature"
    allow_supercritical: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        if self.y_tip is not None and not self.y_tip > 0:
            raise ValueError("y_tip must be positive")
        if self.derivative_mode not in ("exact", "quadrature"):
            raise ValueError(f"unknown derivative mode {self.derivative_mode!r}")

    def tip_height(self, t: float) -> float:
        return self.y_tip if self.y_tip is not None else 1e-4 * math.sqrt(t)


DEFAULT_OPTIONS = SolverOptions()


@dataclass(frozen=True)
class FlowState:
    s: float
    X: float
    Y: float
    log_abs_deriv: float = 0.0
    arg_deriv: float = 0.0

    @property
    def h(self) -> complex:
        return complex(self.X, self.Y)

    @property
    def W(self) -> float:
        return self.X / self.Y


def step_elementary(state: FlowState, dbeta: float, ds: float) -> FlowState:
    """One exact substep: slit map over ``ds``, then shift by ``dbeta``."""
    if not ds > 0:
        raise ValueError("ds must be positive")
    if not state.Y > 0:
        raise ValueError("state must lie in the upper half-plane")
    h = state.h
    r = cmath.sqrt(1.0 - 4.0 * ds / (h * h))
    new = h * r
    factor = 1.0 / r
    return FlowState(
        state.s + ds, new.real + dbeta, new.imag,
        state.log_abs_deriv + math.log(abs(factor)),
        state.arg_deriv + math.atan2(factor.imag, factor.real),
    )


@dataclass(frozen=True, eq=False)
class FlowTrajectory:
    """Recorded reverse flow from ``z0`` (normally ``i*y0``) up to ``horizon``."""

    driver: Driver
    horizon: float
    z0: complex
    s: np.ndarray
    h: np.ndarray
    log_abs_deriv: np.ndarray
    arg_deriv: np.ndarray
    tol: float

    @property
    def y0(self) -> float:
        return self.z0.imag

    @property
    def X(self) -> np.ndarray:
        return self.h.real

    @property
    def Y(self) -> np.ndarray:
        return self.h.imag

    @property
    def W(self) -> np.ndarray:
        return self.h.real / self.h.imag

    def __len__(self):
        return self.s.size

    def __getitem__(self, k) -> FlowState:
        return FlowState(float(self.s[k]), float(self.h[k].real), float(self.h[k].imag),
                         float(self.log_abs_deriv[k]), float(self.arg_deriv[k]))

    @property
    def states(self) -> list[FlowState]:
        return [self[k] for k in range(len(self))]

    @property
    def final(self) -> FlowState:
        return self[-1]

    def beta(self, s) -> np.ndarray:
        """Reverse driver ``lambda(t) - lambda(t - s)``."""
        t = self.horizon
        return self.driver(t) - self.driver(np.clip(t - np.asarray(s), 0.0, t))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "x", "y", "w", "logderiv", "argderiv"])
            for row in zip(self.s, self.X, self.Y, self.W, self.log_abs_deriv, self.arg_deriv):
                w.writerow([repr(float(v)) for v in row])


def _check(d: Driver, t: float, opts: SolverOptions):
    if not (0.0 < t <= d.T * (1 + 1e-12)):
        raise ValueError(f"horizon {t} outside (0, {d.T}]")
    if d.nominal_seminorm >= 4 and not opts.allow_supercritical:
        raise ValueError(f"seminorm {d.nominal_seminorm:g} >= 4; pass allow_supercritical "
                         "to explore non-quasislit drivers")
    return min(float(t), d.T)


_DUMMY_R = np.zeros(1)
_DUMMY_C = np.zeros(1, dtype=complex)


def _run(d: Driver, t: float, z0: complex, opts: SolverOptions):
    status, n, h, ld, ad = _kernel.reverse_flow(
        *d.kernel_args(), t, complex(z0), opts.tol, opts.max_steps, False,
        _DUMMY_R, _DUMMY_C, _DUMMY_R, _DUMMY_R)
    if status == _kernel.STATUS_BUDGET:
        raise StepBudgetExceeded(f"reverse flow needed more than {opts.max_steps} steps")
    return h, ld, ad


def reverse_map(d: Driver, t: float, z: complex, opts: SolverOptions = DEFAULT_OPTIONS):
    """``h_t(z) = f_t(lambda_t + z)`` for any ``z`` in the upper half-plane.

    Returns ``(h_t(z), log|h_t'(z)|, arg h_t'(z))``.
    """
    t = _check(d, t, opts)
    if not z.imag > 0:
        raise ValueError("z must lie in the upper half-plane")
    return _run(d, t, z, opts)


def solve_reverse(d: Driver, t: float, y0: float,
                  opts: SolverOptions = DEFAULT_OPTIONS, z0: complex | None = None) -> FlowTrajectory:
    """Recorded reverse flow of ``i*y0`` (or ``z0``) over ``[0, t]``."""
    t = _check(d, t, opts)
    z0 = complex(0.0, y0) if z0 is None else complex(z0)
    if not z0.imag > 0:
        raise ValueError("start point must lie in the upper half-plane")
    # generous first guess from Y^2 growing at least like y0^2 + s
    cap = int(min(opts.max_steps, 16.0 / opts.tol * math.log1p(4 * t / z0.imag**2) + 1024)) + 1
    args = d.kernel_args()
    while True:
        out_s = np.empty(cap)
        out_h = np.empty(cap, dtype=complex)
        out_ld = np.empty(cap)
        out_ad = np.empty(cap)
        status, n, *_ = _kernel.reverse_flow(*args, t, z0, opts.tol, opts.max_steps, True,
                                             out_s, out_h, out_ld, out_ad)
        if status == _kernel.STATUS_OK:
            break
        if status == _kernel.STATUS_BUDGET:
            raise StepBudgetExceeded(f"reverse flow needed more than {opts.max_steps} steps")
        cap = min(2 * cap, opts.max_steps + 2)
    k = n + 1
    return FlowTrajectory(d, t, z0, out_s[:k].copy(), out_h[:k].copy(),
                          out_ld[:k].copy(), out_ad[:k].copy(), opts.tol)


def derivative_quadrature(traj: FlowTrajectory) -> tuple[float, float]:
    """Trapezoid quadrature of the integral formulas for log|h'| and arg h'."""
    X, Y, s = traj.X, traj.Y, traj.s
    r2 = X * X + Y * Y
    log_abs = np.trapezoid(2.0 * (X * X - Y * Y) / (r2 * r2), s)
    arg = np.trapezoid(-4.0 * X * Y / (r2 * r2), s)
    return float(log_abs), float(arg)


def spatial_derivative(d: Driver, t: float, y: float,
                       opts: SolverOptions = DEFAULT_OPTIONS) -> complex:
    """``h_t'(iy) = f_t'(lambda_t + iy)``."""
    if not y > 0:
        raise ValueError("y must be positive")
    if opts.derivative_mode == "quadrature":
        la, ar = derivative_quadrature(solve_reverse(d, t, y, opts))
    else:
        _, la, ar = reverse_map(d, t, complex(0.0, y), opts)
    return cmath.exp(complex(la, ar))


@dataclass(frozen=True, eq=False)
class TracedCurve:
    t: np.ndarray
    gamma: np.ndarray
    err: np.ndarray
    y_tip: np.ndarray

    @property
    def ratio(self) -> np.ndarray:
        return self.gamma.real / self.gamma.imag

    def __len__(self):
        return self.t.size

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "re", "im", "ratio", "err"])
            for row in zip(self.t, self.gamma.real, self.gamma.imag, self.ratio, self.err):
                w.writerow([repr(float(v)) for v in row])

    def to_records(self) -> list[dict]:
        return [{"t": float(t), "re": float(g.real), "im": float(g.imag),
                 "ratio": float(g.real / g.imag), "err": float(e)}
                for t, g, e in zip(self.t, self.gamma, self.err)]


def _threads() -> int:
    env = os.environ.get("LOEWNER_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _tip(d: Driver, t: float, opts: SolverOptions):
    y = opts.tip_height(t)
    v1 = _run(d, t, complex(0.0, y), opts)[0]
    v2 = _run(d, t, complex(0.0, y / 2), opts)[0]
    value = 2 * v2 - v1 if opts.richardson else v2
    return value, abs(v1 - v2), y


def trace_curve(d: Driver, times, opts: SolverOptions = DEFAULT_OPTIONS) -> TracedCurve:
    """Tip positions ``gamma(t_i)``, one independent reverse solve per time."""
    times = np.asarray(times, dtype=float).ravel()
    if times.size == 0:
        raise ValueError("no times given")
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted")
    ts = [_check(d, t, opts) for t in times]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        res = list(pool.map(lambda t: _tip(d, t, opts), ts))
    return TracedCurve(np.array(ts), np.array([r[0] for r in res]),
                       np.array([r[1] for r in res]), np.array([r[2] for r in res]))


@dataclass(frozen=True, eq=False)
class ReparamTrajectory:
    """Trajectory re-timed so that ``Y~(s)**2 = y0**2 + s``."""

    y0: float
    s: np.ndarray
    theta: np.ndarray
    X: np.ndarray

    @property
    def Y(self) -> np.ndarray:
        return np.sqrt(self.y0**2 + self.s)

    @property
    def W(self) -> np.ndarray:
        return self.X / self.Y

    def theta_at(self, s):
        return np.interp(s, self.s, self.theta)

    def residual(self) -> np.ndarray:
        """|d theta/ds - (W~^2 + 1)/4| on each sample interval."""
        slope = np.diff(self.theta) / np.diff(self.s)
        w2 = 0.5 * (self.W[1:] ** 2 + self.W[:-1] ** 2)
        return np.abs(slope - 0.25 * (w2 + 1.0))


def reparametrize(traj: FlowTrajectory) -> ReparamTrajectory:
    Y = traj.Y
    if np.any(np.diff(Y) <= 0):
        raise SolverError("Y is not strictly increasing along the trajectory")
    s_new = Y * Y - traj.y0**2
    s_new[0] = 0.0
    if np.any(np.diff(s_new) <= 0):
        raise SolverError("Y^2 - y0^2 is not strictly increasing")
    return ReparamTrajectory(traj.y0, s_new, traj.s.copy(), traj.X.copy())


def solve_forward(d: Driver, z: complex, t: float, opts: SolverOptions = DEFAULT_OPTIONS,
                  swallow_tol: float = 1e-7, rtol: float = 1e-12) -> complex:
    """``g_t(z)`` from ``dg/dt = 2/(g - lambda_t)`` by adaptive Runge-Kutta."""
    t = _check(d, t, opts)
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("z must lie in the upper half-plane")

    def rhs(u, y):
        w = 2.0 / complex(y[0] - d(u), y[1])
        return [w.real, w.imag]

    def hit(u, y):
        return math.hypot(y[0] - d(u), y[1]) - swallow_tol
    hit.terminal = True
    hit.direction = -1

    sol = solve_ivp(rhs, (0.0, t), [z.real, z.imag], method="DOP853", rtol=rtol,
                    atol=rtol * 1e-2 * max(1.0, abs(z)), events=hit)
    if sol.status == 1:
        raise Swallowed(z, float(sol.t_events[0][0]))
    if sol.status != 0:
        # the right side is singular only at the driver, so a collapsing step
        # size next to it means the point is being swallowed
        u_end = float(sol.t[-1])
        dist = math.hypot(sol.y[0, -1] - d(u_end), sol.y[1, -1])
        if dist < 1e-4 * max(1.0, abs(z)):
            raise Swallowed(z, u_end)
        raise SolverError(f"forward integration failed: {sol.message}")
    return complex(sol.y[0, -1], sol.y[1, -1])
