"""Numerical checks of the cone, flow, winding and comparison inequalities.

Every check yields :class:`ReportEntry` rows.  A row passes when its
margin (bound minus measured, reversed for lower bounds) is at least
``-slack``; parameters outside a bound's hypothesis give ``inconclusive`` rather than ``fail``.
"""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp

from . import bounds
from .driving import Driver, make_driver, random_walk_driver
from .flow import (SolverOptions, TracedCurve, derivative_quadrature, reverse_map,
                   solve_reverse, trace_curve)

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class ReportEntry:
    check: str
    sigma: float | None
    t: float | None
    y0: float | None
    driver: str
    measured: float
    bound: float | None
    margin: float | None
    status: str
    slack: float = 0.0
    runtime: float = 0.0
    note: str = ""

    def sort_key(self):
        return (self.check, self.driver, self.sigma if self.sigma is not None else -1.0,
                self.t or 0.0, self.y0 or 0.0, self.note)


def _entry(check, measured, bound, slack, *, sigma=None, t=None, y0=None,
           driver="", runtime=0.0, note="", applicable=True, lower=False,
           strict=False) -> ReportEntry:
    """``lower`` flips the inequality to measured >= bound; ``strict`` drops equality."""
    measured = float(measured)
    if not applicable or bound is None:
        return ReportEntry(check, sigma, t, y0, driver, measured,
                           None if bound is None else float(bound), None, INCONCLUSIVE,
                           slack, runtime, note)
    margin = measured - float(bound) if lower else float(bound) - measured
    ok = margin > -slack if strict else margin >= -slack
    status = PASS if ok else FAIL
    return ReportEntry(check, sigma, t, y0, driver, measured, float(bound), margin,
                       status, slack, runtime, note)


@dataclass
class VerificationReport:
    entries: list[ReportEntry] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.status != FAIL for e in self.entries)

    def failures(self) -> list[ReportEntry]:
        return [e for e in self.entries if e.status == FAIL]

    def extend(self, other):
        self.entries.extend(other.entries if isinstance(other, VerificationReport) else other)
        return self

    def sorted(self) -> "VerificationReport":
        return VerificationReport(sorted(self.entries, key=ReportEntry.sort_key))

    def summary(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for e in self.entries:
            c = out.setdefault(e.check, {PASS: 0, FAIL: 0, INCONCLUSIVE: 0})
            c[e.status] += 1
        return out

    def to_json(self, path=None, runtimes: bool = False) -> str:
        rows = []
        for e in self.sorted().entries:
            r = asdict(e)
            if not runtimes:
                r.pop("runtime")
            rows.append(r)
        text = json.dumps(rows, indent=1)
        if path is not None:
            Path(path).write_text(text)
        return text

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["check", "pass", "fail", "inconclusive"])
            for name, c in sorted(self.summary().items()):
                w.writerow([name, c[PASS], c[FAIL], c[INCONCLUSIVE]])


@dataclass(frozen=True)
class SweepConfig:
    sigmas: tuple[float, ...] = (0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 3.5, 3.9)
    ts: tuple[float, ...] = (0.1, 1.0)
    y0s: tuple[float, ...] = (1e-2, 1e-3)
    families: tuple[str, ...] = ("constant", "sqrt_forward", "sqrt_backward", "random")
    n_random: int = 20
    seed: int = 0
    random_steps: int = 64
    opts: SolverOptions = SolverOptions()
    allow_supercritical: bool = False
    holder_window: tuple[float, float] = (0.5, 1.0)
    holder_samples: int = 33
    holder_tol: float = 1e-2
    winding_ys: tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-5)

    def __post_init__(self):
        if not self.families:
            raise ValueError("empty driver family list")
        if any(s < 0 for s in self.sigmas):
            raise ValueError("negative sigma in sweep")
        if any(s >= 4 for s in self.sigmas) and not self.allow_supercritical:
            raise ValueError("sigma >= 4 in sweep without allow_supercritical")
        if not self.ts or not self.y0s:
            raise ValueError("empty t or y0 grid")
        if self.allow_supercritical and not self.opts.allow_supercritical:
            object.__setattr__(self, "opts", replace(self.opts, allow_supercritical=True))

    @property
    def T(self) -> float:
        return max(self.ts)

    def drivers(self) -> list[tuple[float, Driver]]:
        """(sigma, driver) pairs in sweep order; the zero driver appears once."""
        out = []
        if "constant" in self.families:
            out.append((0.0, make_driver("constant", 0.0, self.T, label="zero")))
        for sigma in self.sigmas:
            if sigma == 0:
                continue
            for fam in self.families:
                if fam in ("sqrt_forward", "sqrt_backward"):
                    out.append((sigma, make_driver(fam, sigma, self.T,
                                                   label=f"{fam}(sigma={sigma:g})")))
                elif fam == "random":
                    for k in range(self.n_random):
                        out.append((sigma, random_walk_driver(sigma, self.T, self.random_steps,
                                                              self.seed + k)))
                elif fam != "constant":
                    raise ValueError(f"unknown sweep family {fam!r}")
        if not out:
            raise ValueError("sweep produced no drivers")
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        data = dict(data)
        opts = SolverOptions(**data.pop("opts", {}))
        tuples = {k: tuple(v) for k, v in data.items() if isinstance(v, list)}
        data.update(tuples)
        return cls(opts=opts, **data)

    @classmethod
    def load(cls, path) -> "SweepConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def running_oscillation(traj) -> np.ndarray:
    """``sup_{r <= s} |beta_s - beta_r|`` at each recorded s.

    Step midpoints are included since the solver samples the driver there.
    """
    s = traj.s
    b = traj.beta(s)
    allb = np.empty(2 * s.size - 1)
    allb[0::2] = b
    allb[1::2] = traj.beta(0.5 * (s[1:] + s[:-1]))
    hi = np.maximum.accumulate(allb)[0::2]
    lo = np.minimum.accumulate(allb)[0::2]
    return np.maximum(hi - b, b - lo)


def _cone_bounds(sigma):
    if not 0 < sigma < 4:
        return None, None
    return bounds.big_l(sigma), bounds.small_sigma_cone(sigma)


def verify_cone(cfg: SweepConfig) -> VerificationReport:
    rep = VerificationReport()
    for sigma, d in cfg.drivers():
        L, part_ii = _cone_bounds(sigma)
        for t in cfg.ts:
            for y0 in cfg.y0s:
                t0 = time.perf_counter()
                traj = solve_reverse(d, t, y0, cfg.opts)
                sup_w = float(np.max(np.abs(traj.W)))
                dt = time.perf_counter() - t0
                kw = dict(sigma=sigma, t=t, y0=y0, driver=d.name, runtime=dt)
                if sigma == 0:
                    rep.entries.append(_entry("cone_zero_driver", sup_w, 0.0, 1e-12, **kw))
                    continue
                rep.entries.append(_entry("cone_L", sup_w, L, 1e-3 * L if L else 0.0, **kw,
                                          applicable=L is not None))
                rep.entries.append(_entry("cone_small_sigma", sup_w, part_ii,
                                          1e-3 * part_ii if part_ii else 0.0, **kw,
                                          applicable=part_ii is not None))
            t0 = time.perf_counter()
            g = trace_curve(d, [t], cfg.opts).gamma[0]
            ratio = abs(g.real) / g.imag
            kw = dict(sigma=sigma, t=t, driver=d.name, runtime=time.perf_counter() - t0)
            if sigma == 0:
                rep.entries.append(_entry("curve_ratio_zero_driver", ratio, 0.0, 1e-9, **kw))
                continue
            rep.entries.append(_entry("curve_ratio_L", ratio, L, 1e-3 * L if L else 0.0, **kw,
                                      applicable=L is not None))
            rep.entries.append(_entry("curve_ratio_small_sigma", ratio, part_ii,
                                      1e-3 * part_ii if part_ii else 0.0, **kw,
                                      applicable=part_ii is not None))
    return rep


def estimate_holder(curve: TracedCurve, window: tuple[float, float] | None = None,
                    min_octaves: int = 4) -> tuple[float, float]:
    """Hölder exponent from the max increment over dyadic lags.

    Fits ``log max_t |gamma(t + s) - gamma(t)|`` against ``log s`` by least
    squares and returns ``(slope, standard error)``.  Samples must be
    uniformly spaced in time.
    """
    t, g = curve.t, curve.gamma
    if window is not None:
        a, b = window
        if not 0 < a < b:
            raise ValueError("window must satisfy 0 < start < end")
        keep = (t >= a - 1e-12) & (t <= b + 1e-12)
        t, g = t[keep], g[keep]
    if t.size < 32:
        raise ValueError(f"need at least 32 samples in the window, got {t.size}")
    h = np.diff(t)
    if np.ptp(h) > 1e-6 * h.mean():
        raise ValueError("samples must be uniformly spaced")
    h = h.mean()
    lags = []
    k = 1
    while 2 * k <= t.size - 1:
        lags.append(k)
        k *= 2
    if len(lags) - 1 < min_octaves:
        raise ValueError("window does not span enough octaves")
    inc = np.array([np.max(np.abs(g[k:] - g[:-k])) for k in lags])
    if np.any(inc <= 0):
        raise ValueError("degenerate (constant) curve")
    x = np.log(np.array(lags) * h)
    y = np.log(inc)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    dof = max(x.size - 2, 1)
    resid = y - A @ coef
    se = math.sqrt(float(resid @ resid) / dof / float(((x - x.mean()) ** 2).sum()))
    return float(coef[0]), se


def holder_times(window: tuple[float, float], samples: int) -> np.ndarray:
    return np.linspace(window[0], window[1], samples)


def verify_holder(cfg: SweepConfig, slack: float = 0.05) -> VerificationReport:
    """Fitted exponent on the sweep window against ``1/(1 + m_sigma^2)``."""
    rep = VerificationReport()
    opts = replace(cfg.opts, tol=cfg.holder_tol)
    times = holder_times(cfg.holder_window, cfg.holder_samples)
    for sigma, d in cfg.drivers():
        t0 = time.perf_counter()
        if sigma == 0:
            continue
        curve = trace_curve(d, times, opts)
        alpha, se = estimate_holder(curve)
        ok = 0 < sigma < 4
        bound = bounds.holder_exponents(sigma).alpha_cap if ok else None
        rep.entries.append(_entry("holder_capacity", alpha, bound, slack, lower=True,
                                  sigma=sigma, driver=d.name, runtime=time.perf_counter() - t0,
                                  note=f"se={se:.4f} window={cfg.holder_window}",
                                  applicable=ok))
    return rep


def verify_winding(d: Driver, sigma: float, t: float, ys,
                   opts: SolverOptions = SolverOptions(), slope_slack: float = 1e-2,
                   rel_slack: float = 1e-6) -> VerificationReport:
    """``|arg h_t'(iy)|`` against the winding bound on a log-spaced y grid."""
    ys = np.asarray(sorted(ys, reverse=True), dtype=float)
    if ys.size < 4:
        raise ValueError("winding check needs at least 4 heights")
    if not sigma < 4 and not opts.allow_supercritical:
        raise ValueError("sigma must be < 4")
    rep = VerificationReport()
    args = []
    for y in ys:
        t0 = time.perf_counter()
        _, _, ar = reverse_map(d, t, complex(0.0, y), opts)
        args.append(abs(ar))
        value, a, b = bounds.winding_bound(sigma, t, y)
        rep.entries.append(_entry("winding_pointwise", abs(ar), value,
                                  rel_slack * value + 1e-12, sigma=sigma, t=t, y0=y,
                                  driver=d.name, runtime=time.perf_counter() - t0,
                                  note=f"a={a:.6g} b={b:.6g}", applicable=sigma < 4))
    a, b = bounds.winding_coefficients(sigma)
    slope = float(np.polyfit(np.log(1.0 / ys), np.array(args), 1)[0])
    rep.entries.append(_entry("winding_slope", slope, b, slope_slack, sigma=sigma, t=t,
                              driver=d.name, note=f"{ys.size} heights", applicable=sigma < 4))
    return rep


def integrate_comparison(z0: float, sigma: float, horizon: float, forcing: float | None = None,
                         delta: float = 1e-6, n: int = 201):
    """Solve ``dU = forcing d(sqrt s) - (sigma^2/8)/U ds`` numerically.

    Integrated in ``r = sqrt(s)`` where the right side is smooth; stops
    when ``U`` reaches ``delta``.  Returns ``(s, U)`` on a grid.
    """
    c = sigma * sigma / 8.0
    f = sigma if forcing is None else forcing

    def rhs(r, u):
        return [f - 2.0 * r * c / u[0]]

    def low(r, u):
        return u[0] - delta
    low.terminal = True
    low.direction = -1

    r_end = math.sqrt(horizon)
    sol = solve_ivp(rhs, (0.0, r_end), [z0], method="DOP853", rtol=1e-12, atol=1e-14,
                    dense_output=True, events=low)
    r_stop = sol.t[-1]
    r = np.linspace(0.0, r_stop, n)
    return r * r, sol.sol(r)[0]


def verify_comparison(sigma: float, z0: float, horizon: float = 1.0,
                      rel_tol: float = 1e-6) -> VerificationReport:
    rep = VerificationReport()
    kw = dict(sigma=sigma, t=horizon, y0=z0, driver="comparison")
    t0 = time.perf_counter()
    s, U = integrate_comparison(z0, sigma, horizon)
    Z = np.array([bounds.comparison_z(z0, sigma, v) for v in s])
    rel = np.abs(U - Z) / Z
    rep.entries.append(_entry("comparison_exact", float(rel.max()), rel_tol, 0.0,
                              runtime=time.perf_counter() - t0, **kw))
    # domination U <= Z (equality up to solver error)
    rep.entries.append(_entry("comparison_domination", float(np.max((U - Z) / Z)), 0.0,
                              rel_tol, **kw))
    rep.entries.append(_entry("comparison_initial", abs(U[0] - Z[0]), 0.0, 1e-15, **kw))
    s2, U2 = integrate_comparison(z0, sigma, horizon, forcing=0.9 * sigma)
    Z2 = np.array([bounds.comparison_z(z0, sigma, v) for v in s2[1:]])
    gap = Z2 - U2[1:]
    rep.entries.append(_entry("comparison_smaller_forcing", float(gap.min()), 0.0, 0.0,
                              lower=True, strict=True, note="min of Z - U on (0, horizon]", **kw))
    return rep


def verify_flow_bounds(cfg: SweepConfig, deriv_tol: float = 1e-3) -> VerificationReport:
    rep = VerificationReport()
    for sigma, d in cfg.drivers():
        for t in cfg.ts:
            for y0 in cfg.y0s:
                t0 = time.perf_counter()
                traj = solve_reverse(d, t, y0, cfg.opts)
                s, X, Y = traj.s, traj.X, traj.Y
                kw = dict(sigma=sigma, t=t, y0=y0, driver=d.name)
                cap = np.sqrt(y0 * y0 + 4.0 * s)
                rep.entries.append(_entry("flow_Y_upper", float(np.max(Y / cap)), 1.0, 1e-9, **kw))
                rep.entries.append(_entry("flow_Y_monotone", float(np.min(np.diff(Y))), 0.0,
                                          0.0, lower=True, strict=True, note="min increment", **kw))
                win = s >= min(y0 * y0, t)
                win[0] = False
                c_hat = float(np.min((Y[win] ** 2 - y0 * y0) / s[win])) if win.any() else 0.0
                rep.entries.append(_entry("flow_Y_lower_growth", c_hat, 0.0, 0.0,
                                          lower=True, strict=True, **kw))
                osc = running_oscillation(traj)
                rep.entries.append(_entry("flow_X_oscillation", float(np.max(np.abs(X) - osc)),
                                          0.0, 1e-12, **kw))
                la, ar = derivative_quadrature(traj)
                rel = abs(math.expm1(traj.log_abs_deriv[-1] - la))
                rep.entries.append(_entry("flow_deriv_abs", rel, deriv_tol, 0.0, **kw))
                rep.entries.append(_entry("flow_deriv_arg", abs(traj.arg_deriv[-1] - ar),
                                          deriv_tol, 0.0, runtime=time.perf_counter() - t0, **kw))
    return rep


def verify_bounds_identities(sigmas=None) -> VerificationReport:
    """Algebraic identities and orderings among the closed-form bounds."""
    rep = VerificationReport()
    if sigmas is None:
        sigmas = np.linspace(0.05, 3.95, 79)
    for sigma in sigmas:
        sigma = float(sigma)
        bp = bounds.bound_profile(sigma)
        kw = dict(sigma=sigma, driver="bounds")
        rep.entries.append(_entry("bounds_L_ge_K", bp.K, bp.L, 0.0, **kw))
        rep.entries.append(_entry("bounds_m_le_L", bp.m, bp.L, 0.0, **kw))
        rep.entries.append(_entry("bounds_p_domain", bp.p, sigma / (4 - sigma), 0.0,
                                  lower=True, strict=True, **kw))
        if bp.part_ii is not None:
            rep.entries.append(_entry("bounds_lower_le_upper", bp.cone_lower, bp.part_ii, 0.0, **kw))
            if bp.part_ii <= bp.L:
                rep.entries.append(_entry("bounds_alpha_identity",
                                          abs(bp.alpha_cap - bp.alpha_cor2), 1e-12, 0.0, **kw))
    for x0, sigma, kappa in [(1.0, 2.0, 2.0), (0.5, 1.0, 1.0), (2.0, 3.0, 3.5)]:
        M = bounds.m_of_kappa(x0, sigma, kappa)
        rep.entries.append(_entry("bounds_MK_residual", bounds.mk_residual(x0, sigma, kappa, M),
                                  1e-10, 0.0, sigma=sigma, driver=f"x0={x0},kappa={kappa}"))
    return rep


def verify_v_envelope(x0: float, y0: float, sigma: float, kappa: float,
                      horizon: float = 10.0, n: int = 401) -> VerificationReport:
    """Integrate the time-change ODE and compare against its linear envelope."""
    f = bounds.v_rhs(x0, y0, sigma)
    sol = solve_ivp(lambda s, v: [f(s, v[0])], (0.0, horizon), [0.0], method="DOP853",
                    rtol=1e-11, atol=1e-13, dense_output=True)
    s = np.linspace(0.0, horizon, n)
    V = sol.sol(s)[0]
    env = np.array([bounds.v_envelope(x0, y0, sigma, kappa, v) for v in s])
    k = int(np.argmax(V - env))
    return VerificationReport([_entry("v_envelope", float(V[k]), float(env[k]), 0.0,
                                      sigma=sigma, t=float(s[k]), y0=y0,
                                      driver=f"x0={x0},kappa={kappa}",
                                      note="worst point of the grid")])


def verify_tip_winding(cfg: SweepConfig) -> VerificationReport:
    rep = VerificationReport()
    for sigma, d in cfg.drivers():
        if d.family not in ("constant", "sqrt_forward", "sqrt_backward"):
            continue
        rep.extend(verify_winding(d, sigma, cfg.T, cfg.winding_ys, cfg.opts))
    return rep


def run_suite(cfg: SweepConfig | None = None, *, holder: bool = True) -> VerificationReport:
    """All checks on one sweep; passes iff no entry fails."""
    cfg = SweepConfig() if cfg is None else cfg
    rep = VerificationReport()
    steps = [
        ("bounds identities", lambda: verify_bounds_identities()),
        ("cone", lambda: verify_cone(cfg)),
        ("flow bounds", lambda: verify_flow_bounds(cfg)),
        ("winding", lambda: verify_tip_winding(cfg)),
        ("comparison", lambda: VerificationReport().extend(
            [e for z0, s in [(1.0, 1.0), (1.0, 2.0), (0.1, 3.0)]
             for e in verify_comparison(s, z0).entries])),
        ("v envelope", lambda: verify_v_envelope(1.0, 1.0, 2.0, 2.0)),
    ]
    if holder:
        steps.append(("holder", lambda: verify_holder(cfg)))
    for name, fn in steps:
        try:
            rep.extend(fn())
        except Exception as exc:
            raise RuntimeError(f"verification step '{name}' failed: {exc}") from exc
    return rep.sorted()
