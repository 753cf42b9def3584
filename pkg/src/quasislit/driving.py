"""Lip-1/2 driving functions and their time reversals.

A driver is a real function on ``[0, T]`` with ``lambda(0) = 0``.  Every
driver is stored as a base family evaluated through an affine change of
time,

    lambda(u) = scale * (base(offset + direction * u) - base(offset)),

which makes reversal closed under composition and lets the compiled flow
kernel evaluate any driver from a handful of numbers.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FAMILIES = ("sqrt_forward", "sqrt_backward", "constant", "piecewise_linear", "sampled")
FAMILY_ALIASES = {"sqrt": "sqrt_forward", "sqrt_reverse": "sqrt_backward", "zero": "constant"}

# integer codes understood by quasislit._kernel
KIND_CONSTANT = 0
KIND_SQRT_FORWARD = 1
KIND_SQRT_BACKWARD = 2
KIND_KNOTS = 3

_KIND = {
    "constant": KIND_CONSTANT,
    "sqrt_forward": KIND_SQRT_FORWARD,
    "sqrt_backward": KIND_SQRT_BACKWARD,
    "piecewise_linear": KIND_KNOTS,
    "sampled": KIND_KNOTS,
}

EXACT_PAIRS_LIMIT = 4096
_EMPTY = np.zeros(1)


@dataclass(frozen=True, eq=False)
class Driver:
    """Immutable driving function on ``[0, T]``.

    ``sigma`` is the family scale parameter and ``nominal_seminorm`` the
    claimed Lip-1/2 seminorm; for the square-root families the two agree.
    Use :func:`make_driver` rather than constructing this directly.
    """

    family: str
    sigma: float
    T: float
    nominal_seminorm: float
    knots_t: np.ndarray = field(default=_EMPTY, repr=False)
    knots_v: np.ndarray = field(default=_EMPTY, repr=False)
    base_T: float = 1.0
    offset: float = 0.0
    direction: float = 1.0
    scale: float = 1.0
    label: str = ""

    @property
    def kind(self) -> int:
        return _KIND[self.family]

    def _base(self, u):
        if self.family == "constant":
            return np.zeros_like(u)
        if self.family == "sqrt_forward":
            return self.sigma * np.sqrt(np.maximum(u, 0.0))
        if self.family == "sqrt_backward":
            return self.sigma * (np.sqrt(np.maximum(self.base_T - u, 0.0)) - np.sqrt(self.base_T))
        return np.interp(u, self.knots_t, self.knots_v)

    def __call__(self, t):
        tt = np.asarray(t, dtype=float)
        slack = 1e-12 * max(self.T, 1.0)
        if np.any(tt < -slack) or np.any(tt > self.T + slack) or np.any(np.isnan(tt)):
            raise ValueError(f"driver evaluated outside [0, {self.T}]")
        tt = np.clip(tt, 0.0, self.T)
        u = self.offset + self.direction * tt
        out = self.scale * (self._base(u) - self._base(np.asarray(self.offset)))
        return float(out) if out.ndim == 0 else out

    def kernel_args(self):
        """Flat parameter tuple consumed by the compiled flow kernel."""
        return (
            self.kind,
            float(self.sigma),
            float(self.base_T),
            np.ascontiguousarray(self.knots_t, dtype=float),
            np.ascontiguousarray(self.knots_v, dtype=float),
            float(self.offset),
            float(self.direction),
            float(self.scale),
        )

    @property
    def name(self) -> str:
        return self.label or f"{self.family}(sigma={self.sigma:g}, T={self.T:g})"


@dataclass(frozen=True, eq=False, kw_only=True)
class ReverseDriver(Driver):
    """``beta(s) = lambda(t) - lambda(t - s)`` for ``s`` in ``[0, t]``."""

    base: Driver
    horizon: float


def _as_knots(samples):
    if samples is None:
        raise ValueError("this family needs samples")
    if isinstance(samples, tuple) and len(samples) == 2:
        t, v = (np.asarray(a, dtype=float).ravel() for a in samples)
    else:
        arr = np.asarray(samples, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("samples must be (t, values) or an (n, 2) array")
        t, v = arr[:, 0].copy(), arr[:, 1].copy()
    if t.size == 0:
        raise ValueError("empty sample set")
    if t.size != v.size:
        raise ValueError("sample times and values differ in length")
    if t.size < 2:
        raise ValueError("need at least two samples")
    if t[0] != 0.0:
        raise ValueError("first sample must be at t=0")
    if np.any(np.diff(t) <= 0):
        raise ValueError("sample times must be strictly increasing")
    return t, v - v[0]


def knot_seminorm(t, v) -> float:
    """Exact Lip-1/2 seminorm of the piecewise-linear interpolant of knots.

    On each linear piece the ratio ``|dv|/sqrt(dt)`` has no interior
    maximum, so the supremum is attained on a pair of knots.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    best = 0.0
    for k in range(1, t.size):
        r = np.abs(v[k:] - v[:-k]) / np.sqrt(t[k:] - t[:-k])
        best = max(best, float(r.max()))
    return best


def make_driver(family: str, sigma: float | None = None, T: float | None = None,
                samples=None, label: str = "") -> Driver:
    """Build a driver from a named family.

    ``sqrt_forward`` is ``sigma*sqrt(t)``; ``sqrt_backward`` is
    ``sigma*(sqrt(T-t) - sqrt(T))``; ``constant`` is identically zero.
    ``piecewise_linear`` and ``sampled`` interpolate ``samples`` linearly;
    if ``sigma`` is given their values are rescaled to that exact seminorm.
    """
    family = FAMILY_ALIASES.get(family, family)
    if family not in FAMILIES:
        raise ValueError(f"unknown driver family {family!r}")
    if sigma is not None and sigma < 0:
        raise ValueError("sigma must be non-negative")

    if family in ("piecewise_linear", "sampled"):
        t, v = _as_knots(samples)
        if T is not None and not np.isclose(T, t[-1], rtol=1e-12, atol=0):
            raise ValueError(f"T={T} does not match last sample time {t[-1]}")
        norm = knot_seminorm(t, v)
        if sigma is not None:
            if norm == 0.0 and sigma > 0:
                raise ValueError("cannot rescale a constant sample set")
            if norm > 0:
                v = v * (sigma / norm)
                norm = knot_seminorm(t, v)
        return Driver(family, norm if sigma is None else float(sigma), float(t[-1]), norm,
                      knots_t=t, knots_v=v, base_T=float(t[-1]), label=label)

    T = 1.0 if T is None else float(T)
    if T <= 0:
        raise ValueError("T must be positive")
    if family == "constant":
        return Driver(family, 0.0, T, 0.0, base_T=T, label=label)
    sigma = 1.0 if sigma is None else float(sigma)
    return Driver(family, sigma, T, sigma, base_T=T, label=label)


def random_walk_driver(sigma: float, T: float = 1.0, n_steps: int = 64,
                       seed: int = 0) -> Driver:
    """Piecewise-linear driver from cumulative +-sqrt(dt) steps.

    The walk is rescaled so its exact seminorm equals ``sigma``.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, T, n_steps + 1)
    steps = rng.choice([-1.0, 1.0], size=n_steps) * np.sqrt(T / n_steps)
    v = np.concatenate([[0.0], np.cumsum(steps)])
    return make_driver("piecewise_linear", sigma, samples=(t, v),
                       label=f"random(sigma={sigma:g}, seed={seed})")


def load_driver_csv(path, sigma: float | None = None) -> Driver:
    """Read a sampled driver from a CSV with header ``t,lambda``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if header != ["t", "lambda"]:
            raise ValueError(f"{path}: expected header 't,lambda', got {header}")
        rows = [(float(a), float(b)) for a, b in reader if a.strip()]
    if not rows:
        raise ValueError(f"{path}: empty sample set")
    return make_driver("sampled", sigma, samples=np.array(rows), label=Path(path).stem)


def save_driver_csv(d: Driver, path, n: int = 257) -> None:
    t = d.knots_t if d.family in ("piecewise_linear", "sampled") and d.direction == 1.0 \
        else np.linspace(0.0, d.T, n)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "lambda"])
        for a, b in zip(t, d(t)):
            w.writerow([repr(float(a)), repr(float(b))])


def lip_seminorm(d: Driver, n: int = 1025) -> float:
    """Grid estimate of the Lip-1/2 seminorm on ``n`` uniform points.

    All pairs are used up to ``EXACT_PAIRS_LIMIT`` points, dyadic gaps above.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    t = np.linspace(0.0, d.T, n)
    v = d(t)
    h = d.T / (n - 1)
    gaps = range(1, n) if n <= EXACT_PAIRS_LIMIT else (1 << j for j in range(int(np.log2(n - 1)) + 1))
    best = 0.0
    for k in gaps:
        best = max(best, float(np.max(np.abs(v[k:] - v[:-k]))) / np.sqrt(k * h))
    return best


def reverse_driver(d: Driver, t: float) -> ReverseDriver:
    """Time reversal ``beta(s) = lambda(t) - lambda(t - s)`` on ``[0, t]``."""
    if not (0.0 < t <= d.T * (1 + 1e-12)):
        raise ValueError(f"horizon {t} outside (0, {d.T}]")
    t = min(float(t), d.T)
    # beta(s) = -scale*(base(offset + dir*(t - s)) - base(offset + dir*t))
    return ReverseDriver(
        d.family, d.sigma, t, d.nominal_seminorm,
        knots_t=d.knots_t, knots_v=d.knots_v, base_T=d.base_T,
        offset=d.offset + d.direction * t, direction=-d.direction, scale=-d.scale,
        label=f"reverse({d.name}, t={t:g})", base=d, horizon=t,
    )
