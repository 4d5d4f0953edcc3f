"""Scattering-side observables: outgoing profiles, free-wave defects,
space-time tail norms, and the power-law fits that turn a decaying series
into a rate.

Rate conventions.  Along an outward line r = t - tau the outgoing
derivative (w_r - w_t)(t-tau, t) settles to a limit g_+(tau) at the rate
r^{-(p-2)/(p+1)}; the radiated profile obeys pi*int g_+^2 <= E.  The
space-time tail norm

    N(t0) = int_{t0}^inf ( int |u|^{2p} dx )^{1/2} dt
          = || u ||_{L^p L^{2p} ([t0,inf) x R^3)}^p

decays like t0^{-(p+1)/(p+3) * (kappa - kappa0)} when the weighted channel
mass with exponent kappa is finite, and the defect of the evolution from a
free wave over [t, 2t] decays at the same rate in the kinetic energy norm.
All reported rate fits are least squares on log-log values at dyadic
sample times.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateFitError,
    OffGridError,
    ShortSpanError,
    TailNotConvergedError,
)
from .model import RadialPair
from .numerics import derivative, grid_index, trapz
from .solver import GridSpec, _interior_step, bootstrap

MIN_DYADIC_SAMPLES = 8


def predicted_tail_exponent(params):
    """Theoretical decay exponent -(p+1)/(p+3) * (kappa - kappa0)."""
    return -(params.p + 1.0) / (params.p + 3.0) * (params.kappa - params.kappa0)


def char_settle_rate(p):
    """Exponent (p-2)/(p+1) at which outgoing derivatives settle."""
    return (p - 2.0) / (p + 1.0)


@dataclass
class FitResult:
    exponent: float
    amplitude: float
    r_squared: float
    window: tuple
    n_points: int


def fit_power_law(t, y):
    """Least-squares fit y ~ amplitude * t^exponent on log-log values.

    Raises DegenerateFitError when fewer than 3 points are given or any
    sample is non-positive (a sign the quantity has decayed into rounding
    noise or the window is wrong).
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.size < 3:
        raise DegenerateFitError(f"power-law fit needs >= 3 points, got {t.size}")
    if np.any(t <= 0.0) or np.any(y <= 0.0):
        raise DegenerateFitError("power-law fit needs positive samples")
    lt, ly = np.log(t), np.log(y)
    slope, intercept = np.polyfit(lt, ly, 1)
    resid = ly - (slope * lt + intercept)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(ly - ly.mean(), ly - ly.mean()))
    if ss_tot < 1e-30:
        r2 = 1.0 if ss_res < 1e-30 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return FitResult(
        exponent=float(slope),
        amplitude=float(math.exp(intercept)),
        r_squared=r2,
        window=(float(t[0]), float(t[-1])),
        n_points=int(t.size),
    )


@dataclass
class LogGrowthFit:
    offset: float
    slope: float
    r_squared: float


def fit_log_growth(t, v):
    """Fit v ~ offset + slope * log(1 + t), for logarithmically growing
    exterior masses."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    if t.size < 3:
        raise DegenerateFitError(f"log-growth fit needs >= 3 points, got {t.size}")
    x = np.log1p(t)
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, v, rcond=None)
    resid = v - design @ coef
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(v - v.mean(), v - v.mean()))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 1e-30 else 1.0
    return LogGrowthFit(offset=float(coef[0]), slope=float(coef[1]), r_squared=r2)


@dataclass
class CharTrace:
    """Dyadic samples of (w_r - w_t) along r = t - tau with the
    extrapolated limit g_plus and the observed settling rate."""

    tau: float
    distances: np.ndarray  # r = t - tau at the sample times
    values: np.ndarray
    g_plus: float
    rate_estimate: float


def extract_g_plus(traj, tau, spacing=None):
    """Estimate g_+(tau) from a monitored outgoing trace.

    Samples the recorded (w_r - w_t) series at distances spacing * 2^j
    from the vertex, Richardson-extrapolates the last two samples with
    the known settling exponent q = (p-2)/(p+1):

        g = (y_J - 2^{-q} y_{J-1}) / (1 - 2^{-q}),

    and reports the observed rate from a log-log fit of |y_j - g|.
    Raises ShortSpanError when fewer than 8 dyadic samples fit between
    the vertex and the end of the recorded line.
    """
    if tau not in traj.char_traces:
        raise OffGridError(f"trace label tau={tau} was not monitored during the run")
    series = traj.char_traces[tau]
    h = traj.grid.h
    if spacing is None:
        spacing = 4.0 * h
    d0 = grid_index(spacing, h, "spacing") * h
    tau_idx = grid_index(tau, h, "tau")

    levels, dists = [], []
    d_idx = int(round(d0 / h))
    while True:
        m = tau_idx + d_idx
        if m >= series.size or d_idx > traj.grid.n - 1:
            break
        if not math.isnan(series[m]):
            levels.append(m)
            dists.append(d_idx * h)
        d_idx *= 2
    if len(levels) < MIN_DYADIC_SAMPLES:
        raise ShortSpanError(
            f"only {len(levels)} dyadic samples fit along tau={tau}; "
            f"need {MIN_DYADIC_SAMPLES} (extend t_max or shrink spacing)"
        )
    y = series[levels]
    q = char_settle_rate(traj.params.p)
    damp = 2.0 ** (-q)
    g = (y[-1] - damp * y[-2]) / (1.0 - damp)
    resid = np.abs(y - g)
    good = resid > 0.0
    if good.sum() >= 3:
        fit = np.polyfit(np.log(np.asarray(dists)[good]), np.log(resid[good]), 1)
        rate = float(fit[0])
    else:
        rate = float("nan")
    return CharTrace(
        tau=tau,
        distances=np.asarray(dists),
        values=np.asarray(y),
        g_plus=float(g),
        rate_estimate=rate,
    )


@dataclass
class DefectReport:
    t1: float
    t2: float
    defect: float  # kinetic energy norm of (nonlinear - free) at t2
    relative: float  # defect / sqrt(E(t1))


def free_wave_defect(traj, t1, t2):
    """Evolve the t1 snapshot freely (no source) to t2 and measure the
    kinetic energy-norm gap against the nonlinear state:

        defect = ( 2*pi int (d_r^2 + d_t^2) dr )^{1/2},  d = w - w_free.

    Both snapshots must have been recorded during the run.
    """
    snap1 = traj.snapshot_at(t1)
    snap2 = traj.snapshot_at(t2)
    h = traj.grid.h
    steps = grid_index(t2 - t1, h, "t2 - t1")
    if steps < 1:
        raise OffGridError(f"need t2 > t1, got ({t1}, {t2})")

    w0 = snap1.w_curr.copy()
    w1 = snap1.w_t
    w0[0] = 0.0
    w1[0] = 0.0
    pair = RadialPair(w0=w0, w1=w1, h=h)
    span_grid = GridSpec(
        h=h,
        r_max=traj.grid.r_max,
        t_max=steps * h,
        boundary=traj.grid.boundary,
    )
    w_prev = pair.w0.copy()
    w_curr = bootstrap(pair, traj.params, span_grid, linear=True)
    zero = np.zeros_like(w_prev)
    w_at = None
    for m in range(1, steps + 1):
        w_next = _interior_step(w_prev, w_curr, zero, h)
        w_next[0] = 0.0
        w_next[-1] = 0.0 if span_grid.boundary == "pad" else w_curr[-2]
        if m == steps:
            w_at = (w_prev, w_curr, w_next)
        w_prev, w_curr = w_curr, w_next
    w_free_prev, w_free, w_free_next = w_at
    wt_free = (w_free_next - w_free_prev) / (2.0 * h)

    d = snap2.w_curr - w_free
    dt = snap2.w_t - wt_free
    dr = derivative(d, h)
    defect = math.sqrt(2.0 * math.pi * trapz(dr * dr + dt * dt, h))
    e1 = float(traj.ledger.e_total[traj.ledger.level(t1)])
    return DefectReport(
        t1=t1, t2=t2, defect=defect, relative=defect / math.sqrt(max(e1, 1e-300))
    )


@dataclass
class TailNormReport:
    t0: float
    value: float  # truncated integral over [t0, t_max]
    tail: float  # extrapolated remainder
    fit_exponent: float  # decay rate of the integrand over the last decade

    @property
    def total(self):
        return self.value + self.tail


def lp_l2p_tail(traj, t0, require_tail=True):
    """N(t0) = int_{t0}^{t_max} (int |u|^{2p} dx)^{1/2} dt plus a power-law
    tail extrapolation past t_max (same policy as cylinder integrals:
    the last-decade fit must give an integrable decay).

    With require_tail=False a non-integrable last-decade fit returns the
    truncated integral with tail 0 instead of raising, so short exploratory
    runs can still report the (steep-biased) truncated values.
    """
    led = traj.ledger
    y = led.y2p
    l0 = led.level(t0)
    if l0 >= y.size - 1:
        raise OffGridError(f"t0={t0} leaves no integration window")
    value = trapz(y[l0:], led.h)
    last = float(y[-1])
    if last <= 1e-12 * max(float(y.max()), 1e-300):
        return TailNormReport(t0, float(value), 0.0, -math.inf)
    l_dec = led.level(led.h * int(round(led.t_max / 10.0 / led.h)))
    tt, yy = led.t[l_dec:], y[l_dec:]
    if np.any(yy <= 0.0):
        if not require_tail:
            return TailNormReport(t0, float(value), 0.0, math.nan)
        raise TailNotConvergedError("tail window contains non-positive samples")
    slope, logc = np.polyfit(np.log(tt), np.log(yy), 1)
    if slope > -1.05:
        if not require_tail:
            return TailNormReport(t0, float(value), 0.0, float(slope))
        raise TailNotConvergedError(
            f"integrand decays like t^{slope:.3f}; tail not integrable "
            f"within the run, extend t_max"
        )
    tail = math.exp(logc) * led.t_max ** (slope + 1.0) / (-slope - 1.0)
    return TailNormReport(t0, float(value), float(tail), float(slope))


def exterior_cumulative(traj, t_samples):
    """Cumulative exterior mass V(T) = int_0^T [4pi int_{r>1+t} |u|^{2(p-1)}
    r^2 dr] dt evaluated at each sample time."""
    led = traj.ledger
    series = led.exterior_l2p2
    cums = []
    for t_val in t_samples:
        l = led.level(t_val)
        cums.append(trapz(series[: l + 1], led.h) if l >= 1 else 0.0)
    return np.asarray(cums)


def exterior_growth_fit(traj, t_samples):
    """Fit the cumulative exterior mass as offset + slope*log(1+T).

    Returns (fit, values).  The fit should show slope > 0 with high r^2
    for data whose exterior tail is exactly scale critical."""
    values = exterior_cumulative(traj, t_samples)
    fit = fit_log_growth(np.asarray(t_samples, dtype=float), values)
    return fit, values
