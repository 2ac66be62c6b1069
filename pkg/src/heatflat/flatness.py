"""Flatness-based control synthesis and trackability checks.

The state of the Neumann-controlled system is parameterized by the output's
time derivatives,

    z(t, x) = sum_k y^(k)(t) x^{2k} / (2k)!,
    u(t)    = z_x(t, 1) = sum_{k>=1} y^(k)(t) / (2k-1)!,

so any sufficiently regular target output can be tracked exactly by an
open-loop control.  Trackability over the infinite horizon is the weighted
square-summability

    sum_k ( ||y^(k+1)||_{L2} / [ (2k)! 2^k (1+k)^{3/4} ] )^2 < infinity,

equivalently membership of y' in the Gevrey Hilbert class of order 2,
radius 1/sqrt(2), exponent -1/2 (the index bridge in the weights is exact).
On a finite horizon the terminal Taylor sequence y^(k)(T) must additionally
generate a reachable state; the reachable class is tested through the
Bergman machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .gevrey import Signal, _log_l2_norm
from .heatsim import SimConfig, SimResult, simulate
from .holo import BergmanReport, CoeffSeq, bergman_norm_estimate, borel_range_test

__all__ = [
    "flat_state",
    "flat_control",
    "tracking_experiment",
    "check_trackable_infinite",
    "check_trackable_finite",
    "terminal_state_report",
    "FlatEval",
    "ControlSynthesis",
    "TrackingResult",
    "SeriesCheck",
    "Trackable2Result",
]


@dataclass(frozen=True)
class FlatEval:
    value: float
    tail_proxy: float
    diverged: bool


def flat_state(y_provider, t: float, x: float, K: int) -> FlatEval:
    """Partial sum of z(t,x) = sum_k y^(k)(t) x^{2k}/(2k)! up to K terms.

    The last-term magnitude (relative) serves as tail proxy; terms that stop
    decreasing at the cutoff raise the divergence flag (|x| beyond the
    Gevrey radius of the target).
    """
    if abs(x) > 1.0:
        raise ValueError("flat series is used for |x| <= 1")
    terms = []
    for k in range(K + 1):
        yk = float(np.atleast_1d(y_provider(k, np.array([t])))[0])
        if x == 0.0:
            terms.append(yk if k == 0 else 0.0)
            continue
        mag = abs(yk)
        term = 0.0
        if mag > 0:
            term = math.copysign(
                math.exp(min(math.log(mag) + 2 * k * math.log(abs(x)) - gammaln(2 * k + 1), 700.0)),
                yk,
            )
        terms.append(term)
    return _sum_with_diagnostics(terms)


@dataclass
class ControlSynthesis:
    u: np.ndarray
    tail_proxy: float
    diverged: bool


def flat_control(y_provider, t_grid, K: int) -> ControlSynthesis:
    """u(t) = sum_{k=1}^K y^(k)(t)/(2k-1)! on the grid (x-derivative at x=1).

    Divergence of the terms at the cutoff is reported, not raised: for
    near-critical targets the synthesized control is still returned with its
    tail proxy and the experiment is treated as heuristic.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    u = np.zeros_like(t_grid)
    lastmag = np.zeros_like(t_grid)
    grow = 0
    tail = 0.0
    for k in range(1, K + 1):
        term = np.asarray(y_provider(k, t_grid), dtype=float) * math.exp(-gammaln(2 * k))
        u += term
        a = float(np.max(np.abs(term)))
        scale = float(np.max(np.abs(u))) + 1e-300
        if k > 2:
            grow = grow + 1 if a > float(np.max(lastmag)) * (1 + 1e-12) else 0
        lastmag = np.abs(term)
        tail = a / scale
    return ControlSynthesis(u, tail, grow >= 4)


def _sum_with_diagnostics(terms) -> FlatEval:
    mags = [abs(t) for t in terms]
    total = math.fsum(terms)
    tail = mags[-1] / max(abs(total), 1e-300)
    diverged = False
    if len(mags) > 6:
        last = mags[-5:]
        diverged = all(last[i + 1] >= last[i] * (1 - 1e-12) for i in range(4)) and last[-1] > 0
    return FlatEval(total, tail, diverged)


# ---------------------------------------------------------------------------
# End-to-end tracking
# ---------------------------------------------------------------------------

@dataclass
class TrackingResult:
    sim: SimResult
    y_target: np.ndarray
    max_error: float
    synthesis: ControlSynthesis
    K: int

    def to_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("t,y_target,y_sim,u\n")
            for t, yt, ys, u in zip(self.sim.t, self.y_target, self.sim.y, self.sim.u):
                f.write(f"{t:.17g},{yt:.17g},{ys:.17g},{u:.17g}\n")


def tracking_experiment(y_target: Signal, cfg: SimConfig, K: int) -> TrackingResult:
    """Synthesize the flat control for the target, simulate, report max error.

    The target must be flat at t = 0: derivatives up to order K+1 below
    1e-12 there (the compatibility condition for zero initial data).
    """
    if y_target.deriv is None:
        raise ValueError("tracking needs a target with derivatives")
    z = np.array([0.0])
    flat0 = max(abs(float(np.atleast_1d(y_target.deriv(k, z))[0])) for k in range(K + 2))
    if flat0 > 1e-12:
        raise ValueError(f"target is not flat at t=0 (max |y^(k)(0)| = {flat0:.2e})")
    tgrid = cfg.time_grid()
    synth = flat_control(y_target.deriv, tgrid, K)
    sim = simulate(synth.u, cfg)
    yt = np.asarray(y_target.deriv(0, tgrid), dtype=float)
    err = float(np.max(np.abs(sim.y - yt)))
    return TrackingResult(sim, yt, err, synth, K)


# ---------------------------------------------------------------------------
# Trackability conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesCheck:
    partial_sums: np.ndarray
    increments: np.ndarray
    converged: bool

    @property
    def total(self) -> float:
        return float(self.partial_sums[-1])


def _log_weight_condition5(k: np.ndarray) -> np.ndarray:
    # (2k)! 2^k (1+k)^{3/4}
    return gammaln(2 * k + 1) + k * math.log(2.0) + 0.75 * np.log1p(k)


def check_trackable_infinite(y: Signal, N: int, decay_ratio: float = 0.95) -> SeriesCheck:
    """Partial sums of sum_k (||y^(k+1)||_{L2} / [(2k)! 2^k (1+k)^{3/4}])^2.

    The weights equal the order-2 radius-1/sqrt(2) exponent -1/2 Hilbert
    weights applied to y' (exact index bridge); the geometric-decay flag
    follows the same rule as the Gevrey norms.
    """
    if y.deriv is None:
        raise ValueError("needs analytic derivatives")
    if N < 1:
        raise ValueError("N >= 1")
    k = np.arange(N + 1, dtype=float)
    logW = _log_weight_condition5(k)
    incs = np.empty(N + 1)
    for kk in range(N + 1):
        log_norm, _ = _log_l2_norm(lambda t, n=kk + 1: y.deriv(n, t), y.t0, y.t1)
        incs[kk] = 0.0 if log_norm == -math.inf else math.exp(
            min(2.0 * (log_norm - logW[kk]), 700.0)
        )
    partial = np.cumsum(incs)
    if partial[-1] == 0.0:
        converged = True
    elif np.all(incs[-5:] <= 1e-14 * partial[-1]):
        converged = True
    else:
        ratios = incs[-5:] / np.maximum(incs[-6:-1], 1e-300)
        converged = bool(np.all(ratios <= decay_ratio))
    return SeriesCheck(partial, incs, converged)


@dataclass
class Trackable2Result:
    condition13: SeriesCheck
    terminal_even: BergmanReport
    terminal_derivative: BergmanReport

    @property
    def reachable_class(self) -> str:
        """Combined classification of the terminal state membership."""
        if "divergent" in (self.terminal_even.classification,
                           self.terminal_derivative.classification):
            return "divergent"
        if (self.terminal_even.classification == "convergent"
                and self.terminal_derivative.classification == "convergent"):
            return "convergent"
        return "undecided"


def terminal_state_report(seq: CoeffSeq):
    """Reachability test of a terminal Taylor sequence (a_k) = (y^(k)(T)).

    The terminal state sum a_k zeta^{2k}/(2k)! must be an even holomorphic
    H^1 function on the tilted square: both the series itself and its
    termwise derivative (the odd series with entries shifted by one) are put
    through the Bergman estimate at scale 1/sqrt(2); the derivative test is
    the decisive one (the flat series of the two-sided counterexample stays
    square-integrable while its derivative blows up like Li_{-1/2}).
    """
    R = 1.0 / math.sqrt(2.0)
    even = bergman_norm_estimate(seq, R)
    deriv = borel_range_test(seq, p=1, parity="odd", R=R)
    return even, deriv


def check_trackable_finite(y: Signal, N: int, K: int) -> Trackable2Result:
    """Finite-horizon trackability: regularity series plus terminal-state test."""
    cond13 = check_trackable_infinite(y, N)
    T = y.t1
    a = [float(np.atleast_1d(y.deriv(k, np.array([T])))[0]) for k in range(K + 1)]
    seq = CoeffSeq.from_values(a, parity="even", name="terminal")
    even, deriv = terminal_state_report(seq)
    return Trackable2Result(cond13, even, deriv)
