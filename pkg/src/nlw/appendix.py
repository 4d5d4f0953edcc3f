"""Laboratory for the explicit slow-decay example.

The example starts the power-law family (u0 = c r^{-2/(p-1)} outside the
unit ball, at rest) and verifies, numerically, the chain of facts that
make it scatter even though its conformal-type norms diverge:

  * envelope: |w(r,t)| stays below 3 c r^beta on the undisturbed exterior
    r >= 1 + t, and the profile never drops far below c r^beta there;
  * the source term of the integral equation over a backward light
    triangle with apex (r', t'), t' < r', obeys the closed-form bound

        iint |w|^p / r^{p-1} dr dt <= (3c)^p * C_p * (r')^beta,

    where C_p is the constant produced by enlarging the triangle to the
    full characteristic strips and integrating r^{beta-2} (finite only
    for beta > 0, i.e. p > 3 -- at p = 3 the strip integral diverges
    logarithmically at the inner corner);
  * the weighted channel mass is finite exactly for kappa < (5-p)/(p-1)
    and the scattering-rate fits behave accordingly.

run_appendix_example orchestrates a production run and returns a JSON-
ready report; the CLI `appendix` subcommand wraps it.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BlowupError,
    DivergentIntegralError,
    OutOfRangeError,
    TailNotConvergedError,
)
from .model import AppendixPowerLaw, k_functional, make_params
from .numerics import abs_power, dyadic_times, grid_index, odd_power, trapz
from .scattering import (
    exterior_cumulative,
    exterior_growth_fit,
    fit_power_law,
    free_wave_defect,
    lp_l2p_tail,
    predicted_tail_exponent,
)
from .solver import EnvelopeSpec, GridSpec, Monitors, _interior_step, bootstrap, evolve


def triangle_bound_constant(p, n_quad=4096):
    """The strip-integral constant C_p with iint_{strips} r^{beta-2} =
    C_p (r')^beta, computed numerically.

    In characteristic coordinates the strips reduce to a one-dimensional
    integral with an integrable endpoint singularity x^{beta-1}; the
    infinite leg is integrated in closed form (no truncation of it
    converges for beta < 1), the finite leg on a geometric mesh.  The
    result is independent of the apex radius; evaluating at two apexes
    guards the implementation.  Returns inf for p = 3, where beta = 0
    makes the inner-corner contribution logarithmically divergent.
    """
    beta = (p - 3.0) / (p - 1.0)
    if beta <= 0.0:
        return math.inf

    def strip_integral(r_apex):
        # int_0^{2 r'} [ 2^{1-beta} / (1-beta) ] x^{beta-1} dx  via a
        # geometric mesh plus the exact stub below x_min
        x_hi = 2.0 * r_apex
        x_lo = x_hi * 1e-12
        x = np.geomspace(x_lo, x_hi, n_quad)
        y = (2.0 ** (1.0 - beta) / (1.0 - beta)) * x ** (beta - 1.0)
        total = float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))
        stub = (2.0 ** (1.0 - beta) / (1.0 - beta)) * x_lo**beta / beta
        return total + stub

    c_a = strip_integral(1.0) / 1.0**beta
    c_b = strip_integral(3.0) / 3.0**beta
    if abs(c_a - c_b) > 1e-6 * abs(c_a):
        raise ArithmeticError(
            f"strip constant not apex-independent: {c_a} vs {c_b}"
        )
    return c_a


@dataclass(frozen=True)
class TriangleRegion:
    """Backward light triangle with apex (r_apex, t_apex), t_apex < r_apex,
    truncated at t = 0.  The restriction keeps the triangle away from the
    origin so no reflection term enters."""

    r_apex: float
    t_apex: float

    def __post_init__(self):
        if not (0.0 < self.t_apex < self.r_apex):
            raise OutOfRangeError(
                f"need 0 < t_apex < r_apex, got ({self.r_apex}, {self.t_apex})"
            )


def full_slab(pair, params, grid):
    """Leapfrog evolution that keeps every level: returns W[level, node].

    Only intended for short, coarse runs (the memory cost is the full
    space-time slab); the appendix triangle checks use it.
    """
    h = grid.h
    steps = grid.steps
    n = grid.n
    w = np.empty((steps + 1, n + 1))
    w[0] = pair.w0
    w[1] = bootstrap(pair, params, grid)
    r = grid.r
    # same source arithmetic as evolve(), so slab levels agree with its
    # snapshots bit for bit
    inv_rp1 = np.zeros(n + 1)
    inv_rp1[1:] = 1.0 / abs_power(r[1:], params.p - 1.0)
    f = np.zeros(n + 1)
    for m in range(1, steps):
        f[1:] = odd_power(w[m, 1:], params.p) * inv_rp1[1:]
        _interior_step(w[m - 1], w[m], f, h, out=w[m + 1])
        w[m + 1, 0] = 0.0
        w[m + 1, -1] = 0.0 if grid.boundary == "pad" else w[m, -2]
    return w


def triangle_integral(slab, grid, params, region):
    """Discrete iint |w|^p / r^{p-1} dr dt over the backward triangle.

    Trapezoid in radius on each level, trapezoid in time across levels;
    the apex level has zero width and contributes nothing.
    """
    h = grid.h
    i_apex = grid_index(region.r_apex, h, "r_apex")
    m_apex = grid_index(region.t_apex, h, "t_apex")
    if m_apex >= slab.shape[0]:
        raise OutOfRangeError("slab does not reach the apex time")
    if i_apex + m_apex > grid.n:
        raise OutOfRangeError("triangle leaves the grid")
    p = params.p
    r = grid.r
    total = 0.0
    for m in range(m_apex + 1):
        half = m_apex - m
        lo, hi = i_apex - half, i_apex + half
        if hi == lo:
            continue
        seg_w = slab[m, lo : hi + 1]
        seg_r = r[lo : hi + 1]
        g = abs_power(seg_w, float(p)) / abs_power(seg_r, p - 1.0)
        inner = h * (g.sum() - 0.5 * (g[0] + g[-1]))
        weight = 0.5 if m in (0, m_apex) else 1.0
        total += weight * h * inner
    return total


@dataclass
class TriangleBoundReport:
    region: TriangleRegion
    integral: float
    bound: float  # (3c)^p * C_p * r_apex^beta

    @property
    def ratio(self):
        return self.integral / self.bound


def source_triangle_check(slab, grid, params, c, region):
    """Compare the actual source integral over a backward triangle with
    its envelope-based closed-form bound.  Meaningful for p > 3 only
    (the bound constant is infinite at p = 3, making the check vacuous:
    ratio 0)."""
    value = triangle_integral(slab, grid, params, region)
    cp = triangle_bound_constant(params.p)
    if math.isinf(cp):
        bound = math.inf
    else:
        bound = (3.0 * c) ** params.p * cp * region.r_apex**params.beta
    return TriangleBoundReport(region=region, integral=value, bound=bound)


def find_envelope_threshold(p, h=1.0 / 32.0, t_max=16.0, lo=0.02, hi=2.0, cap=4.0):
    """Largest amplitude c (up to bisection resolution) for which the
    envelope |w| < 3 c r^beta holds on r >= 1 + t through t_max, found
    empirically on a coarse grid.  Returns the safe (holding) endpoint.
    """
    params = make_params(p, 0.5)  # kappa is irrelevant to the envelope

    def holds(c):
        family = AppendixPowerLaw(c, params)
        r_max = h * math.ceil((2.0 + 2.0 * t_max) / h)
        grid = GridSpec(h=h, r_max=r_max, t_max=t_max, boundary="outgoing")
        mon = Monitors(envelope=EnvelopeSpec(c=c, ray_offsets=()))
        try:
            traj = evolve(family.sample(grid, leak_tol=None), params, grid, mon)
        except BlowupError:
            # far past the threshold the explicit scheme goes unstable near
            # the origin before the level loop finishes; either way the
            # envelope did not hold
            return False
        return traj.envelope.peak_ratio < 1.0

    if not holds(lo):
        raise OutOfRangeError(f"envelope fails even at c={lo}; no threshold found")
    while holds(hi):
        if hi >= cap:
            return cap
        lo = hi
        hi = min(2.0 * hi, cap)
    for _ in range(12):
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return lo


def run_appendix_example(
    p,
    kappa,
    c=None,
    h=1.0 / 128.0,
    t_max=64.0,
    r_max=None,
    threshold_h=1.0 / 32.0,
    threshold_t_max=16.0,
):
    """Full study of the slow-decay example; returns (report, traj).

    The report is a JSON-ready dict with five sections: the envelope
    verdict, the weighted channel mass (or its divergence), the decay of
    the inward energy against t^{-kappa}, the scattering-rate fits, and
    the triangle source bound.  c=None picks half the empirically found
    envelope threshold.

    r_max=None sizes the grid at 16*t_max + 4.  The causal wedge only
    needs 1 + 2*t_max, but the exterior norm is truncation-sensitive:
    cutting the slowly decaying tail at r_max turns its shell integral
    1/(1+t) - 1/r_max into a linear-in-T deficit of the cumulative norm,
    so r_max must be a large multiple of t_max for the logarithmic
    growth to come through cleanly.
    """
    params = make_params(p, kappa)
    threshold = None
    if c is None:
        threshold = find_envelope_threshold(p, h=threshold_h, t_max=threshold_t_max)
        c = threshold / 2.0
    family = AppendixPowerLaw(c, params)
    if r_max is None:
        r_max = h * math.ceil((4.0 + 16.0 * t_max) / h)
    grid = GridSpec(h=h, r_max=r_max, t_max=t_max, boundary="outgoing")

    snap_times = list(dyadic_times(4.0, t_max))
    mon = Monitors(
        radii=(0.25, 1.0, "t/4"),
        snapshot_times=tuple(snap_times),
        envelope=EnvelopeSpec(c=c),
        char_tau=(2.0,),
    )
    traj = evolve(family.sample(grid, leak_tol=None), params, grid, mon)
    led = traj.ledger

    env = traj.envelope
    envelope_sec = {
        "c": c,
        "threshold": threshold,
        "peak_ratio": env.peak_ratio,
        "peak_r": env.peak_r,
        "peak_t": env.peak_t,
        # nan means "never"; the report is JSON-ready, so use null
        "first_violation_t": (
            None if math.isnan(env.first_violation_t) else env.first_violation_t
        ),
        "min_profile": float(np.nanmin(env.min_profile)),
        "holds": bool(env.peak_ratio < 1.0),
    }

    try:
        kr = k_functional(traj.pair, params)
        k_sec = {"divergent": False, "k1": kr.k1, "k": kr.k}
        k_value = kr.k
    except DivergentIntegralError as err:
        k_sec = {"divergent": True, "detail": str(err)}
        k_value = None

    decay_times = dyadic_times(4.0, t_max)
    e_minus_vals = [float(led.e_minus[led.level(t)]) for t in decay_times]
    decay_sec = {
        "times": list(decay_times),
        "e_minus": e_minus_vals,
        "scaled_by_t_kappa": (
            None
            if k_value is None
            else [e * t**kappa / k_value for t, e in zip(decay_times, e_minus_vals)]
        ),
    }

    fit_times = dyadic_times(4.0, t_max / 2.0)
    try:
        tail_reports = [lp_l2p_tail(traj, t0) for t0 in fit_times]
        tails_converged = True
    except TailNotConvergedError:
        # Short runs end before the integrand settles into an integrable
        # power law.  Fall back to the truncated integrals so the rest of
        # the report survives; the fitted exponent is then biased steep.
        tail_reports = [
            lp_l2p_tail(traj, t0, require_tail=False) for t0 in fit_times
        ]
        tails_converged = False
    if len(fit_times) >= 3:
        lp_fit = fit_power_law(fit_times, [rep.total for rep in tail_reports])
        lp_exponent, lp_r2 = lp_fit.exponent, lp_fit.r_squared
    else:
        lp_exponent = lp_r2 = None  # too few dyadic start times to fit
    ext_times = dyadic_times(4.0, t_max)
    if len(ext_times) >= 3:
        ext_fit, ext_vals = exterior_growth_fit(traj, ext_times)
        ext_slope, ext_offset, ext_r2 = (
            ext_fit.slope,
            ext_fit.offset,
            ext_fit.r_squared,
        )
    else:
        ext_vals = exterior_cumulative(traj, ext_times)
        ext_slope = ext_offset = ext_r2 = None  # not enough samples to fit
    defect_ts = [t for t in (8.0, 16.0, 32.0) if 2.0 * t <= t_max]
    defects = [free_wave_defect(traj, t, 2.0 * t) for t in defect_ts]
    rates_sec = {
        "lp_l2p": {
            "times": list(fit_times),
            "totals": [rep.total for rep in tail_reports],
            "exponent": lp_exponent,
            "r_squared": lp_r2,
            "predicted_exponent": predicted_tail_exponent(params),
            "tails_converged": tails_converged,
        },
        "exterior_growth": {
            "slope": ext_slope,
            "offset": ext_offset,
            "r_squared": ext_r2,
            "values": [float(v) for v in ext_vals],
        },
        "free_wave_defect": {
            "pairs": [[d.t1, d.t2] for d in defects],
            "values": [d.defect for d in defects],
        },
    }

    # short dense slab for the triangle source bound
    slab_t = 4.0
    slab_grid = GridSpec(
        h=h,
        r_max=h * math.ceil((2.0 + 2.0 * slab_t) / h),
        t_max=slab_t,
        boundary="outgoing",
    )
    slab = full_slab(family.sample(slab_grid, leak_tol=None), params, slab_grid)
    triangle_sec = []
    for t_apex in (1.0, 2.0, 4.0):
        region = TriangleRegion(r_apex=1.0 + t_apex, t_apex=t_apex)
        rep = source_triangle_check(slab, slab_grid, params, c, region)
        triangle_sec.append(
            {
                "r_apex": region.r_apex,
                "t_apex": region.t_apex,
                "integral": rep.integral,
                "bound": rep.bound,
                "ratio": 0.0 if math.isinf(rep.bound) else rep.ratio,
            }
        )

    report = {
        "p": p,
        "kappa": kappa,
        "grid": {"h": h, "r_max": grid.r_max, "t_max": t_max},
        "envelope": envelope_sec,
        "channel_mass": k_sec,
        "energy_decay": decay_sec,
        "scattering_rates": rates_sec,
        "triangle_bound": triangle_sec,
    }
    return report, traj
