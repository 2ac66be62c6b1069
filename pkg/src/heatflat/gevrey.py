"""Gevrey classes: weight sequences, time/Fourier norms, analytic test signals.

The Hilbert norm of order s, radius R, exponent gamma is

    ||phi||^2 = sum_n ( ||phi^(n)||_{L2} / M_n )^2,
    M_n = (ns)! / R^{ns} * (1+n)^(-s*gamma - 1/4),

and its Fourier-side counterpart is the L2 norm against the weight
(1+|xi|)^gamma exp(R |xi|^{1/s}).  Test signals carry closed-form n-th
derivative providers; n-fold numerical differentiation is never used.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import gammaln

from .numkit import LogScalar

__all__ = [
    "GevreyParams",
    "Signal",
    "WeightSeq",
    "weight_Mn",
    "weight_seq",
    "gevrey_norm_time",
    "weighted_fourier_norm",
    "bump_gevrey",
    "two_sided_bump",
    "gaussian_signal",
    "gevrey_cutoff",
    "product_signal",
    "fourier_decay_fit",
    "GevreyNormResult",
    "DecayFit",
]


@dataclass(frozen=True)
class GevreyParams:
    """Order s > 0, radius R > 0 and polynomial exponent gamma."""

    s: float
    R: float
    gamma: float = 0.0

    def __post_init__(self):
        if not (self.s > 0 and self.R > 0):
            raise ValueError("GevreyParams requires s > 0 and R > 0")


@dataclass
class Signal:
    """A uniformly sampled signal with an optional analytic derivative provider.

    ``deriv(n, t)`` must return the n-th derivative at the points ``t``
    (vectorized).  ``deriv(0, .)`` is checked against ``values`` on the grid.
    """

    grid: np.ndarray
    values: np.ndarray
    deriv: object = None  # callable (n, t_array) -> array
    compact_support: bool = False
    family: str = "raw"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values)
        if self.grid.ndim != 1 or len(self.grid) < 2:
            raise ValueError("grid must be 1-D with at least two points")
        h = np.diff(self.grid)
        if np.any(np.abs(h - h[0]) > 1e-12 * max(abs(h[0]), 1e-300)):
            raise ValueError("grid must be uniform to 1e-12 relative")
        if self.values.shape != self.grid.shape:
            raise ValueError("values must match grid shape")
        if self.deriv is not None:
            v0 = np.asarray(self.deriv(0, self.grid))
            scale = max(np.max(np.abs(self.values)), 1e-300)
            if np.max(np.abs(v0 - self.values)) > 1e-10 * scale:
                raise ValueError("deriv(0, .) disagrees with sampled values beyond 1e-10")

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def t0(self) -> float:
        return float(self.grid[0])

    @property
    def t1(self) -> float:
        return float(self.grid[-1])

    def __add__(self, other: "Signal") -> "Signal":
        if len(self.grid) != len(other.grid) or np.max(np.abs(self.grid - other.grid)) > 1e-12:
            raise ValueError("signals must share a grid to be added")
        da, db = self.deriv, other.deriv
        dsum = (lambda n, t: da(n, t) + db(n, t)) if (da and db) else None
        return Signal(
            self.grid,
            self.values + other.values,
            deriv=dsum,
            compact_support=self.compact_support and other.compact_support,
            family="sum",
            params={"terms": [self.descriptor(), other.descriptor()]},
        )

    def descriptor(self) -> dict:
        return {
            "family": self.family,
            "params": self.params,
            "t0": self.t0,
            "t1": self.t1,
            "n": len(self.grid),
            "compact_support": self.compact_support,
        }

    def to_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("t,value\n")
            for t, v in zip(self.grid, self.values):
                f.write(f"{t:.17g},{np.real(v):.17g}\n")

    def to_json(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.descriptor(), f, indent=1)


def product_signal(a: Signal, b: Signal, family: str = "product") -> Signal:
    """Pointwise product with a Leibniz-rule derivative provider."""
    if len(a.grid) != len(b.grid) or np.max(np.abs(a.grid - b.grid)) > 1e-12:
        raise ValueError("signals must share a grid")
    da, db = a.deriv, b.deriv

    def dprod(n, t):
        out = np.zeros_like(np.asarray(t, dtype=float))
        for j in range(n + 1):
            out = out + comb(n, j) * da(j, t) * db(n - j, t)
        return out

    return Signal(
        a.grid,
        a.values * b.values,
        deriv=dprod if (da and db) else None,
        compact_support=a.compact_support or b.compact_support,
        family=family,
        params={"factors": [a.descriptor(), b.descriptor()]},
    )


# ---------------------------------------------------------------------------
# Weight sequence M_n
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightSeq:
    logM: np.ndarray

    def __len__(self):
        return len(self.logM)


def weight_Mn(p: GevreyParams, n: int) -> LogScalar:
    """M_n = (ns)!/R^{ns} (1+n)^{-s gamma - 1/4} as a LogScalar."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return LogScalar(float(_log_Mn(p, np.array([n], dtype=float))[0]))


def _log_Mn(p: GevreyParams, n: np.ndarray) -> np.ndarray:
    return (
        gammaln(n * p.s + 1.0)
        - n * p.s * math.log(p.R)
        - (p.s * p.gamma + 0.25) * np.log1p(n)
    )


def weight_seq(p: GevreyParams, N: int) -> WeightSeq:
    return WeightSeq(_log_Mn(p, np.arange(N + 1, dtype=float)))


# ---------------------------------------------------------------------------
# Time-domain norm
# ---------------------------------------------------------------------------

def _log_l2_norm(f, a: float, b: float, rtol: float = 1e-8, m0: int = 513, mmax: int = 32769):
    """log of the L2 norm of f over [a, b]; composite Simpson with halving.

    Returns (log_norm, converged).  Scaled so arbitrarily large derivative
    values stay in range.
    """
    prev = None
    m = m0
    while m <= mmax:
        t = np.linspace(a, b, m)
        v = np.asarray(f(t), dtype=np.longdouble)
        mx = np.max(np.abs(v))
        if mx == 0.0:
            return -math.inf, True
        w = np.ones(m, dtype=np.longdouble)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        h = (b - a) / (m - 1)
        integral = float(np.log(np.sum(w * (v / mx) ** 2)) + np.log(h / 3.0))
        log_norm = float(np.log(mx)) + 0.5 * integral
        if prev is not None and abs(log_norm - prev) < 0.5 * rtol:
            return log_norm, True
        prev = log_norm
        m = 2 * m - 1
    return prev, False


@dataclass(frozen=True)
class GevreyNormResult:
    partial_sums: np.ndarray
    increments: np.ndarray
    converged: bool
    quadrature_ok: bool

    @property
    def total(self) -> float:
        return float(self.partial_sums[-1])


def gevrey_norm_time(sig: Signal, p: GevreyParams, N: int,
                     decay_ratio: float = 0.95) -> GevreyNormResult:
    """Partial sums of sum_n (||phi^(n)||_{L2} / M_n)^2 up to n = N.

    The convergence flag is set when the last five increments decay
    geometrically (successive ratios <= ``decay_ratio``) or have hit zero.
    """
    if sig.deriv is None:
        raise ValueError("gevrey_norm_time requires a signal with a derivative provider")
    if N < 1:
        raise ValueError("N must be >= 1")
    logM = _log_Mn(p, np.arange(N + 1, dtype=float))
    incs = np.empty(N + 1)
    quad_ok = True
    for n in range(N + 1):
        log_norm, ok = _log_l2_norm(lambda t, n=n: sig.deriv(n, t), sig.t0, sig.t1)
        quad_ok = quad_ok and ok
        incs[n] = 0.0 if log_norm == -math.inf else math.exp(
            min(2.0 * (log_norm - logM[n]), 700.0)
        )
    partial = np.cumsum(incs)
    total = partial[-1]
    if total == 0.0:
        converged = True
    else:
        last = incs[-5:]
        if np.all(last <= 1e-14 * total):
            converged = True
        else:
            ratios = incs[-5:] / np.maximum(incs[-6:-1], 1e-300)
            converged = bool(np.all(ratios <= decay_ratio))
    return GevreyNormResult(partial, incs, converged, quad_ok)


# ---------------------------------------------------------------------------
# Fourier-domain norm
# ---------------------------------------------------------------------------

def _spectrum(sig: Signal, pad: int = 4):
    """|F phi| on the positive rFFT grid with zero padding (unitary convention)."""
    n = len(sig.grid)
    n2 = 1 << int(math.ceil(math.log2(pad * n)))
    V = np.fft.rfft(np.real(sig.values), n=n2)
    xi = 2.0 * np.pi * np.fft.rfftfreq(n2, d=sig.step)
    F = sig.step / math.sqrt(2.0 * math.pi) * np.abs(V)
    return xi, F


def weighted_fourier_norm(sig: Signal, p: GevreyParams) -> float:
    """integral over xi of |F phi(xi)|^2 (1+|xi|)^{2 gamma} e^{2 R |xi|^{1/s}}.

    Discrete Fourier transform on a zero-padded grid (factor 8 >= 4, length a
    power of two); |F|^2 is splined and the integral taken in the variable
    xi = rho^s, which removes the |xi|^{1/s} cusp of the weight at zero.
    Frequencies where the integrand falls below 1e-16 of its maximum are
    truncated.  The signal must be compactly supported inside the grid or
    decay below 1e-14 (relative) at the grid ends.
    """
    vmax = np.max(np.abs(sig.values))
    if vmax == 0.0:
        return 0.0
    if not sig.compact_support:
        edge = max(abs(sig.values[0]), abs(sig.values[-1]))
        if edge > 1e-14 * vmax:
            raise ValueError("signal does not decay at grid ends; Fourier norm would leak")
    xi, F = _spectrum(sig, pad=8)
    F2 = F * F
    logw2 = 2.0 * p.gamma * np.log1p(xi) + 2.0 * p.R * xi ** (1.0 / p.s)
    logint = np.log(np.maximum(F2, 1e-300)) + logw2
    live = logint > logint.max() + math.log(1e-16)
    xi_hi = xi[np.where(live)[0][-1]]
    spline = CubicSpline(xi, F2)
    m = 8193
    rho = np.linspace(0.0, xi_hi ** (1.0 / p.s), m)
    xs = rho**p.s
    vals = (p.s * rho ** (p.s - 1.0) * np.maximum(spline(xs), 0.0)
            * np.exp(2.0 * p.R * rho) * (1.0 + xs) ** (2.0 * p.gamma))
    w = np.ones(m)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    h = rho[1] - rho[0]
    # bilateral integral; |F| is even for real signals
    return 2.0 * float(np.sum(w * vals) * h / 3.0)


# ---------------------------------------------------------------------------
# Analytic test signals
# ---------------------------------------------------------------------------

class _OneSidedBump:
    """Derivatives of f(t) = exp(-t^-g) for t > 0 (0 for t <= 0).

    f^(n)(t) = f(t) * t^-n * D_n(u), u = t^-g, with polynomial coefficients
    obeying d[n+1,m] = -(m g + n) d[n,m] + g d[n,m-1].  Evaluation is done in
    extended precision; the alternating D_n(u) loses digits at large n.
    """

    def __init__(self, g: float):
        self.g = float(g)
        d0 = np.zeros(1, dtype=np.longdouble)
        d0[0] = 1.0
        self._d = (d0,)

    def _coeffs(self, n: int) -> np.ndarray:
        # extend into a fresh tuple and swap atomically: concurrent readers
        # only ever see a complete table
        if len(self._d) <= n:
            d = list(self._d)
            while len(d) <= n:
                k = len(d) - 1
                cur = d[k]
                nxt = np.zeros(k + 2, dtype=np.longdouble)
                m = np.arange(k + 1)
                nxt[: k + 1] += -(m * self.g + k) * cur
                nxt[1 : k + 2] += self.g * cur
                d.append(nxt)
            self._d = tuple(d)
        return self._d[n]

    def __call__(self, n: int, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.longdouble)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.zeros_like(t)
        pos = t > 0
        if pos.any():
            tp = t[pos]
            d = self._coeffs(n)
            m = np.arange(n + 1)
            logs = -np.outer(m * self.g + n, np.log(tp))
            vals = (d[:, None] * np.exp(logs)).sum(axis=0)
            out[pos] = vals * np.exp(-tp ** -self.g)
        out = out.astype(np.float64)
        return out[0] if scalar else out


def bump_gevrey(gamma_exp: float, t_scale: float = 1.0, grid: np.ndarray = None,
                npts: int = 2049) -> Signal:
    """One-sided Gevrey bump y(t) = exp(-(t/t_scale)^-gamma_exp) for t > 0.

    Flat at 0 with all derivatives vanishing; nominal Gevrey order
    1 + 1/gamma_exp.  Derivatives come from the exact rational recurrence.
    """
    if not gamma_exp > 0:
        raise ValueError("gamma_exp must be > 0")
    base = _OneSidedBump(gamma_exp)
    s = float(t_scale)

    def deriv(n, t):
        return base(n, np.asarray(t, dtype=float) / s) / s**n

    if grid is None:
        grid = np.linspace(-0.5 * s, 4.0 * s, npts)
    grid = np.asarray(grid, dtype=float)
    return Signal(grid, deriv(0, grid), deriv=deriv, compact_support=False,
                  family="bump_gevrey", params={"gamma_exp": gamma_exp, "t_scale": s})


def two_sided_bump(center: float, halfwidth: float, gamma_exp: float,
                   grid: np.ndarray = None, npts: int = 2049) -> Signal:
    """Compactly supported bump on [center-halfwidth, center+halfwidth].

    Product of two one-sided bumps, normalized to unit peak; Gevrey of order
    1 + 1/gamma_exp.
    """
    base = _OneSidedBump(gamma_exp)
    a = center - halfwidth
    b = center + halfwidth
    peak = float(base(0, np.array([halfwidth]))[0]) ** 2

    def deriv(n, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for j in range(n + 1):
            fa = base(j, t - a)
            fb = (-1.0) ** (n - j) * base(n - j, b - t)
            out += comb(n, j) * fa * fb
        return out / peak

    if grid is None:
        grid = np.linspace(a - halfwidth, b + halfwidth, npts)
    grid = np.asarray(grid, dtype=float)
    return Signal(grid, deriv(0, grid), deriv=deriv, compact_support=True,
                  family="two_sided_bump",
                  params={"center": center, "halfwidth": halfwidth, "gamma_exp": gamma_exp})


def gaussian_signal(center: float = 0.0, sigma: float = 1.0,
                    grid: np.ndarray = None, npts: int = 2049) -> Signal:
    """Gaussian exp(-(t-c)^2 / (2 sigma^2)) with Hermite-recurrence derivatives."""

    def derivs_upto(nmax, t):
        x = (np.asarray(t, dtype=float) - center)
        f0 = np.exp(-(x**2) / (2.0 * sigma**2))
        out = [f0, -(x / sigma**2) * f0]
        for n in range(1, nmax):
            out.append(-(x / sigma**2) * out[n] - (n / sigma**2) * out[n - 1])
        return out

    def deriv(n, t):
        return derivs_upto(max(n, 1), t)[n]

    if grid is None:
        grid = np.linspace(center - 8.7 * sigma, center + 8.7 * sigma, npts)
    grid = np.asarray(grid, dtype=float)
    return Signal(grid, deriv(0, grid), deriv=deriv, compact_support=False,
                  family="gaussian", params={"center": center, "sigma": sigma})


def gevrey_cutoff(t_a: float, t_b: float, order_s: float,
                  grid: np.ndarray = None, npts: int = 2049) -> Signal:
    """Cutoff identical to 1 on (-inf, t_a], 0 on [t_b, inf), Gevrey of order order_s.

    chi(t) = 1 - (1/Z) * integral_{t_a}^t rho, where rho is a normalized
    two-sided Gevrey bump supported on [t_a, t_b]; derivatives of chi are
    exact (chi^(n) = -rho^(n-1)/Z), chi itself interpolates a dense cumulative
    Simpson table by cubic spline.
    """
    if not t_a < t_b:
        raise ValueError("need t_a < t_b")
    if not (1.0 < order_s < 2.0):
        raise ValueError("order_s must lie in (1, 2)")
    g = 1.0 / (order_s - 1.0)
    base = _OneSidedBump(g)
    w = 0.5 * (t_b - t_a)
    c = 0.5 * (t_a + t_b)

    def rho_deriv(n, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for j in range(n + 1):
            out += comb(n, j) * base(j, t - t_a) * (-1.0) ** (n - j) * base(n - j, t_b - t)
        return out

    # cumulative integral of rho over [t_a, t_b]: composite Simpson on pairs
    # of subintervals, then a spline through the even-node values
    mdense = 8193
    td = np.linspace(t_a, t_b, mdense)
    rd = rho_deriv(0, td)
    h = td[1] - td[0]
    cum_even = np.concatenate(
        [[0.0], np.cumsum((rd[0:-2:2] + 4.0 * rd[1:-1:2] + rd[2::2]) * (h / 3.0))]
    )
    Z = cum_even[-1]
    chi_spl = CubicSpline(td[::2], 1.0 - cum_even / Z)

    def deriv(n, t):
        t = np.asarray(t, dtype=float)
        if n == 0:
            out = np.ones_like(t)
            inside = (t > t_a) & (t < t_b)
            out[t >= t_b] = 0.0
            out[inside] = chi_spl(t[inside])
            return out
        return -rho_deriv(n - 1, t) / Z

    if grid is None:
        grid = np.linspace(t_a - w, t_b + w, npts)
    grid = np.asarray(grid, dtype=float)
    return Signal(grid, deriv(0, grid), deriv=deriv, compact_support=False,
                  family="gevrey_cutoff",
                  params={"t_a": t_a, "t_b": t_b, "order_s": order_s})


# ---------------------------------------------------------------------------
# Fourier decay fit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    delta: float
    intercept: float
    residual_rms: float
    mismatch: bool
    window: tuple
    npoints: int


def fourier_decay_fit(sig: Signal, order_s: float, rel_window=(1e-12, 1e-3),
                      mismatch_tol: float = 0.02) -> DecayFit:
    """Fit -ln|F phi(xi)| = c + delta * |xi|^{1/s} over a decay window.

    The window keeps the frequencies where |F phi| lies between 1e-12 and
    1e-3 of its maximum, cut before the FFT noise floor.  A large normalized
    fit residual flags that the signal does not decay at the claimed order
    (``mismatch``); the fitted slope delta estimates the decay rate.
    """
    if not sig.compact_support:
        raise ValueError("fourier_decay_fit expects a compactly supported signal")
    xi, F = _spectrum(sig, pad=4)
    Fmax = F.max()
    rel = F / Fmax
    lo, hi = rel_window
    # the Gevrey estimate bounds the *envelope*: bump spectra oscillate
    # through near-zeros, so fit only the points visible from the right
    # (suffix maxima = lobe peaks; every point for monotone spectra)
    imax = int(np.argmax(F))
    env = np.maximum.accumulate(F[::-1])[::-1]
    onenv = F >= env * (1.0 - 1e-12)
    floor = max(lo, 1e-13)
    window = (np.arange(len(F)) > imax) & (rel < hi) & (rel > floor) & onenv
    idx = np.where(window)[0]
    if len(idx) < 8:
        raise ValueError("decay window too small; enlarge the grid or padding")
    x = xi[idx] ** (1.0 / order_s)
    y = -np.log(F[idx])
    delta, icpt = np.polyfit(x, y, 1)
    resid = y - (delta * x + icpt)
    rms = float(np.sqrt(np.mean(resid**2)))
    spread = float(y.max() - y.min())
    mismatch = rms > mismatch_tol * max(spread, 1.0)
    return DecayFit(float(delta), float(icpt), rms, bool(mismatch),
                    (float(xi[idx[0]]), float(xi[idx[-1]])), len(idx))
