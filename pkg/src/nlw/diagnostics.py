"""Channel energies, flux identities, triangle laws, and weighted bounds.

Conventions (w = r*u, all integrals over the half line unless said):

  E_-(t)   = pi * int |w_r + w_t|^2 + (2/(p+1)) |w|^{p+1}/r^{p-1} dr   inward
  E_+(t)   = same with w_r - w_t                                      outward
  E(t)     = E_-(t) + E_+(t)
  xi(t)    = slope of w at the origin; pi * int_{t1}^{t2} xi^2 dt is the
             energy handed from the inward to the outward channel at r=0
  Q_-^-(s; t1,t2) = (4pi/(p+1)) int_{t1}^{t2} |w(s-t,t)|^{p+1}/(s-t)^{p-1} dt
  Q_+^+(tau; t1,t2) analogously along r = t - tau

Triangle law (inward): for the triangle {r>0, t>t0, r+t < t0+r0},

  E_-(t0;0,r0) = pi*int_{t0}^{t0+r0} xi^2 dt + Q_-^-(t0+r0; t0, t0+r0)
                 + (2pi(p-1)/(p+1)) * iint |w|^{p+1}/r^p dr dt,

and the outward twin on {r>0, t<t0, t-r > t0-r0}.  The module recomputes
each term from quantities the solver accumulated and reports the residual,
which must vanish at the discretization order.

The combined weighted bound: for a weight a with a(1)=1 and
0 < a'(s) <= gamma*a(s)/s (0 < gamma < 1),

  pi*int_1^inf a(t) xi^2 dt
    + (2pi(p-1-2gamma)/(p+1)) * iint_{r+t>1} a(r+t)|w|^{p+1}/r^p dr dt
    <= K1,

with K1 the a-weighted incoming channel mass of the data (weight 1 inside
the unit ball).  Truncating the left side in time only lowers it, so the
check bound_ratio <= 1 is one-sided safe on a finite run.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import OffGridError, TailNotConvergedError, WeightInvalidError
from .model import k_functional
from .numerics import abs_power, cumtrapz, derivative, grid_index, trapz


@dataclass
class EnergyLedger:
    """Per-level scalar series recorded by evolve().

    s_bulk bins the nonlinear bulk mass by characteristic label: bin k
    holds the contribution of |w|^{p+1}/r^p from the strip of spacetime
    with r + t in [k*h, (k+1)*h) (midpoint-in-time, trapezoid-in-space),
    so weighted integrals over r+t > s_min reduce to a weighted bin sum.
    """

    h: float
    p: float
    kappa: float
    n: int
    t: np.ndarray
    e_total: np.ndarray
    e_minus: np.ndarray
    e_plus: np.ndarray
    xi: np.ndarray
    bulk: np.ndarray  # int |w|^{p+1}/r^p dr per level
    y2p: np.ndarray  # (4pi int |u|^{2p} r^2 dr)^{1/2} per level
    exterior_l2p2: np.ndarray  # 4pi int_{r>1+t} |u|^{2(p-1)} r^2 dr
    radii: dict  # label -> (E, E_minus, E_plus) arrays
    s_bulk: np.ndarray

    @classmethod
    def allocate(cls, steps, h, params, monitors, n):
        zeros = lambda: np.zeros(steps + 1)
        return cls(
            h=h,
            p=params.p,
            kappa=params.kappa,
            n=n,
            t=h * np.arange(steps + 1),
            e_total=zeros(),
            e_minus=zeros(),
            e_plus=zeros(),
            xi=zeros(),
            bulk=zeros(),
            y2p=zeros(),
            exterior_l2p2=zeros(),
            radii={label: (zeros(), zeros(), zeros()) for label in monitors.radii},
            s_bulk=np.zeros(steps + n + 1),
        )

    @property
    def t_max(self):
        return float(self.t[-1])

    def level(self, t):
        idx = grid_index(t, self.h, "time")
        if not (0 <= idx < self.t.size):
            raise OffGridError(f"t={t} outside the recorded range")
        return idx

    # -- bookkeeping checks -------------------------------------------------

    def conservation_drift(self):
        """max_t |E(t) - E(0)| / E(0)."""
        e0 = self.e_total[0]
        return float(np.abs(self.e_total - e0).max() / abs(e0))

    def additivity_error(self):
        """max_t |E(t) - (E_-(t) + E_+(t))|; zero by construction."""
        return float(np.abs(self.e_total - (self.e_minus + self.e_plus)).max())

    def monotonicity_margins(self):
        """(worst increase of E_-, worst decrease of E_+) between levels,
        as nonnegative numbers; both should be at the discretization-noise
        scale for a causally clean run."""
        up = float(np.diff(self.e_minus).max(initial=0.0))
        down = float(-np.diff(self.e_plus).min(initial=0.0))
        return max(up, 0.0), max(down, 0.0)

    # -- windowed integrals -------------------------------------------------

    def xi_energy(self, t1, t2, weight=None):
        """pi * int_{t1}^{t2} weight(t) xi(t)^2 dt (weight=None means 1)."""
        l1, l2 = self.level(t1), self.level(t2)
        if l2 <= l1:
            return 0.0
        sq = self.xi[l1 : l2 + 1] ** 2
        if weight is not None:
            sq = sq * weight(self.t[l1 : l2 + 1])
        return math.pi * trapz(sq, self.h)

    def bulk_time_integral(self, t1, t2):
        """iint over [t1,t2] x (0,inf) of |w|^{p+1}/r^p (no prefactor)."""
        l1, l2 = self.level(t1), self.level(t2)
        if l2 <= l1:
            return 0.0
        return trapz(self.bulk[l1 : l2 + 1], self.h)

    def bulk_weighted(self, weight, s_min=1.0):
        """iint over {r+t >= s_min} of weight(r+t) |w|^{p+1}/r^p, from the
        characteristic bins (no prefactor)."""
        s_mid = self.h * (np.arange(self.s_bulk.size) + 0.5)
        mask = s_mid >= s_min
        return float(np.dot(weight(s_mid[mask]), self.s_bulk[mask]))


@dataclass
class ChannelReport:
    e_total: float
    e_minus: float
    e_plus: float
    em_cum: np.ndarray  # pi-scaled inward energy in [0, r], per node
    ep_cum: np.ndarray


def energy_channels(w, w_t, h, p, potential=True):
    """Channel energies of a state, with cumulative-in-radius profiles."""
    w = np.asarray(w, dtype=float)
    w_t = np.asarray(w_t, dtype=float)
    r = h * np.arange(w.size)
    wr = derivative(w, h)
    pot = np.zeros_like(w)
    if potential:
        pot[1:] = (2.0 / (p + 1.0)) * abs_power(w[1:], p + 1.0) / abs_power(
            r[1:], p - 1.0
        )
    a = wr + w_t
    b = wr - w_t
    em_cum = math.pi * cumtrapz(a * a + pot, h)
    ep_cum = math.pi * cumtrapz(b * b + pot, h)
    return ChannelReport(
        e_total=float(em_cum[-1] + ep_cum[-1]),
        e_minus=float(em_cum[-1]),
        e_plus=float(ep_cum[-1]),
        em_cum=em_cum,
        ep_cum=ep_cum,
    )


def xi_trace(traj):
    """(times, xi) series of the origin slope."""
    return traj.ledger.t, traj.ledger.xi


def _flux_window(traj, series, l1, l2, what):
    if l2 <= l1:
        return 0.0
    seg = series[l1 : l2 + 1]
    if np.isnan(seg).any():
        raise OffGridError(
            f"{what}: requested window [{l1}, {l2}] leaves the recorded range"
        )
    h = traj.grid.h
    p = traj.params.p
    return (4.0 * math.pi / (p + 1.0)) * trapz(seg, h)


def flux_inward(traj, s, t1=None, t2=None):
    """Q_-^-(s; t1, t2) along the inward characteristic r + t = s.

    Defaults cover the whole recorded segment: t1 = max(0, s - r_max),
    t2 = min(s, t_max).  The label s must have been registered in
    Monitors.flux_s before the run.
    """
    if s not in traj.flux_in:
        raise OffGridError(f"flux label s={s} was not monitored during the run")
    if t1 is None:
        t1 = max(0.0, s - traj.grid.r_max)
    if t2 is None:
        t2 = min(s, traj.grid.t_max)
    if not (t1 < t2 <= s + 1e-12):
        raise OffGridError(f"inward flux window needs t1 < t2 <= s, got ({t1},{t2})")
    led = traj.ledger
    return _flux_window(traj, traj.flux_in[s], led.level(t1), led.level(t2), "flux_inward")


def flux_outward(traj, tau, t1=None, t2=None):
    """Q_+^+(tau; t1, t2) along the outward characteristic r = t - tau."""
    if tau not in traj.flux_out:
        raise OffGridError(f"flux label tau={tau} was not monitored during the run")
    if t1 is None:
        t1 = tau
    if t2 is None:
        t2 = min(traj.grid.t_max, tau + traj.grid.r_max)
    if not (tau - 1e-12 <= t1 < t2):
        raise OffGridError(f"outward flux window needs tau <= t1 < t2, got ({t1},{t2})")
    led = traj.ledger
    return _flux_window(traj, traj.flux_out[tau], led.level(t1), led.level(t2), "flux_outward")


@dataclass
class TriangleReport:
    kind: str
    t0: float
    r0: float
    energy: float
    xi_term: float
    flux_term: float
    bulk_term: float

    @property
    def residual(self):
        return self.energy - (self.xi_term + self.flux_term + self.bulk_term)

    @property
    def residual_frac(self):
        return abs(self.residual) / abs(self.energy)


def triangle_residual(traj, t0, r0, kind="inward"):
    """Evaluate one monitored triangle probe against the triangle law."""
    for rec in traj.triangle_records:
        if rec.kind == kind and rec.t0 == t0 and rec.r0 == r0:
            break
    else:
        raise OffGridError(
            f"{kind} triangle ({t0}, {r0}) was not monitored during the run"
        )
    led = traj.ledger
    p = traj.params.p
    if kind == "inward":
        xi_term = led.xi_energy(t0, t0 + r0)
    else:
        xi_term = led.xi_energy(t0 - r0, t0)
    flux_term = (4.0 * math.pi / (p + 1.0)) * rec.flux
    bulk_term = (2.0 * math.pi * (p - 1.0) / (p + 1.0)) * rec.bulk
    return TriangleReport(
        kind=kind,
        t0=t0,
        r0=r0,
        energy=rec.energy,
        xi_term=xi_term,
        flux_term=flux_term,
        bulk_term=bulk_term,
    )


@dataclass
class InfiniteTriangleReport:
    t: float
    energy: float  # E_-(t)
    xi_term: float
    bulk_term: float

    @property
    def residual(self):
        return self.energy - (self.xi_term + self.bulk_term)

    @property
    def residual_frac(self):
        return abs(self.residual) / abs(self.energy)


def infinite_triangle_residual(traj, t):
    """Closure of the infinite triangle law at time t:

        E_-(t) = pi*int_t^inf xi^2 dt'
                 + (2pi(p-1)/(p+1)) * int_t^inf int |w|^{p+1}/r^p dr dt'.

    The truncation at t_max must be immaterial: if the last decade
    [t_max/10, t_max] carries more than 10% of either truncated integral,
    the run is too short to verify the identity and TailNotConvergedError
    is raised.
    """
    led = traj.ledger
    p = traj.params.p
    t_max = led.t_max
    if t >= t_max / 10.0:
        raise TailNotConvergedError(
            f"infinite triangle at t={t} needs t < t_max/10 = {t_max / 10.0}"
        )
    xi_all = led.xi_energy(t, t_max)
    bulk_all = led.bulk_time_integral(t, t_max)
    # last decade of the truncated window, aligned to the grid
    t_dec = led.h * int(round(t_max / 10.0 / led.h))
    xi_tail = led.xi_energy(t_dec, t_max)
    bulk_tail = led.bulk_time_integral(t_dec, t_max)
    if xi_tail > 0.1 * xi_all or bulk_tail > 0.1 * bulk_all:
        raise TailNotConvergedError(
            f"last decade carries {xi_tail / max(xi_all, 1e-300):.1%} of the "
            f"xi integral and {bulk_tail / max(bulk_all, 1e-300):.1%} of the "
            f"bulk integral; extend t_max"
        )
    coef = 2.0 * math.pi * (p - 1.0) / (p + 1.0)
    return InfiniteTriangleReport(
        t=t,
        energy=float(led.e_minus[led.level(t)]),
        xi_term=xi_all,
        bulk_term=coef * bulk_all,
    )


@dataclass
class MorawetzReport:
    gamma: float
    xi_term: float
    bulk_term: float
    k1: float

    @property
    def lhs(self):
        return self.xi_term + self.bulk_term

    @property
    def bound_ratio(self):
        return self.lhs / self.k1


def _validate_weight(weight, gamma, s_max):
    """Check a(1)=1, a increasing, and the growth hypothesis in its
    integrated form: a'(s) <= gamma a(s)/s integrates to
    a(s2)/a(s1) <= (s2/s1)^gamma, which is checked between neighboring
    sample points.  The integrated form is exact for every weight that
    satisfies the pointwise hypothesis (no discretization slack needed),
    in particular for the critical power weight a = s^gamma itself;
    violations smaller than the sample spacing can slip through, which
    is acceptable for a guard."""
    if not (0.0 < gamma < 1.0):
        raise WeightInvalidError(f"gamma={gamma} outside (0, 1)")
    if abs(weight(np.array([1.0]))[0] - 1.0) > 1e-9:
        raise WeightInvalidError("weight must satisfy a(1) = 1")
    s = np.geomspace(1.0, max(s_max, 1.0 + 1e-6), 4097)
    a = weight(s)
    if np.any(a <= 0.0):
        raise WeightInvalidError("weight must be positive")
    dlog_a = np.diff(np.log(a))
    if np.any(dlog_a <= 0.0):
        raise WeightInvalidError("weight must be strictly increasing")
    if np.any(dlog_a > gamma * np.diff(np.log(s)) + 1e-9):
        raise WeightInvalidError(
            f"weight grows faster than gamma*a(s)/s with gamma={gamma}"
        )


def weighted_morawetz(traj, kappa=None, weight=None, gamma=None):
    """Combined weighted bound on a run; bound_ratio <= 1 is the check.

    With no arguments the power weight a(s) = s^kappa, gamma = kappa, is
    used with the run's own kappa.  A custom weight callable (vectorized)
    may be supplied together with its gamma; it is validated against the
    hypotheses a(1) = 1, 0 < a'(s) <= gamma*a(s)/s before use.

    The left side is evaluated from kappa-independent accumulators (xi
    series and characteristic bins), the right side K1 from the initial
    data, so several weights can be compared on a single run.
    """
    led = traj.ledger
    p = traj.params.p
    pair = traj.pair
    if weight is None:
        if kappa is None:
            kappa = traj.params.kappa
        gamma = kappa
        weight = lambda s: s**kappa
    elif gamma is None:
        raise WeightInvalidError("a custom weight needs an explicit gamma")
    s_max = led.t_max + traj.grid.r_max
    _validate_weight(weight, gamma, s_max)

    if led.t_max < 1.0:
        raise OffGridError("weighted bound needs t_max >= 1")
    xi_term = led.xi_energy(1.0, led.t_max, weight=weight)
    coef = 2.0 * math.pi * (p - 1.0 - 2.0 * gamma) / (p + 1.0)
    bulk_term = coef * led.bulk_weighted(weight, s_min=1.0)

    # K1: weight 1 inside the unit ball, a(r) outside
    h = pair.h
    r = pair.r
    wr = derivative(pair.w0, h)
    chan = (wr + pair.w1) ** 2
    chan[1:] += (2.0 / (p + 1.0)) * abs_power(pair.w0[1:], p + 1.0) / abs_power(
        r[1:], p - 1.0
    )
    wfull = np.ones_like(r)
    outside = r >= 1.0
    wfull[outside] = weight(r[outside])
    k1 = math.pi * trapz(wfull * chan, h)
    return MorawetzReport(gamma=gamma, xi_term=xi_term, bulk_term=bulk_term, k1=k1)


def _radius_series(traj, radius, channel):
    led = traj.ledger
    for label, (tot, mn, pl) in led.radii.items():
        if label == "t/4":
            if radius == "t/4":
                break
        elif radius != "t/4" and abs(float(label) - float(radius)) <= 1e-9:
            break
    else:
        raise OffGridError(f"radius {radius} was not monitored during the run")
    return {"total": tot, "inward": mn, "outward": pl}[channel]


@dataclass
class CylinderReport:
    t0: float
    radius: float
    channel: str
    value: float  # truncated integral over [t0, t_max]
    tail: float  # extrapolated remainder past t_max
    tail_exponent: float

    @property
    def total(self):
        return self.value + self.tail


def cylinder_integral(traj, t0, radius, channel="outward"):
    """int_{t0}^{inf} E_ch(t; 0, radius) dt with a power-law tail estimate.

    The truncated part integrates the recorded series over [t0, t_max].
    The remainder is estimated by fitting log E against log t over the
    last decade [t_max/10, t_max] and integrating the fitted power law
    past t_max; if the fitted decay is not integrable (exponent > -1.05)
    the truncation dominates and TailNotConvergedError is raised.  A
    series that has already decayed to rounding noise gets tail = 0.
    """
    led = traj.ledger
    series = _radius_series(traj, radius, channel)
    l0 = led.level(t0)
    if l0 >= series.size - 1:
        raise OffGridError(f"t0={t0} leaves no integration window")
    value = trapz(series[l0:], led.h)

    peak = float(series.max())
    last = float(series[-1])
    if last <= 1e-12 * max(peak, 1e-300):
        return CylinderReport(t0, radius, channel, float(value), 0.0, -math.inf)

    l_dec = led.level(led.h * int(round(led.t_max / 10.0 / led.h)))
    tt = led.t[l_dec:]
    yy = series[l_dec:]
    if np.any(yy <= 0.0) or tt[0] <= 0.0:
        raise TailNotConvergedError("tail window contains non-positive samples")
    slope, logc = np.polyfit(np.log(tt), np.log(yy), 1)
    if slope > -1.05:
        raise TailNotConvergedError(
            f"fitted tail decay t^{slope:.3f} of E_{channel}(t;0,{radius}) is "
            f"not integrable; extend t_max"
        )
    tail = math.exp(logc) * led.t_max ** (slope + 1.0) / (-slope - 1.0)
    return CylinderReport(t0, radius, channel, float(value), float(tail), float(slope))


@dataclass
class LocalEnergyBoundReport:
    t: float
    radius: float
    e_plus: float
    bound: float  # K * t^{1-kappa} / (t - radius)

    @property
    def ratio(self):
        return self.e_plus / self.bound


def outward_local_energy_bound(traj, t, radius):
    """Compare E_+(t; 0, radius) against K t^{1-kappa}/(t - radius).

    The comparison constant is not universal (the sharp one depends on p
    and kappa), so the useful check is stability of the ratio across
    times, radii, and refinements rather than any fixed threshold.
    """
    if not (0.0 < radius < t):
        raise OffGridError(f"need 0 < radius < t, got radius={radius}, t={t}")
    led = traj.ledger
    series = _radius_series(traj, radius, "outward")
    e_plus = float(series[led.level(t)])
    kr = k_functional(traj.pair, traj.params)
    kappa = traj.params.kappa
    bound = kr.k * t ** (1.0 - kappa) / (t - radius)
    return LocalEnergyBoundReport(t=t, radius=radius, e_plus=e_plus, bound=bound)


@dataclass
class PointwiseReport:
    max_ratio1: float
    argmax_r1: float
    max_ratio2: float
    argmax_r2: float


def pointwise_bounds(w, h, p):
    """Sharpest-constant pointwise bounds, evaluated at every node.

    ratio1: |w(R)| / (R^{1/2} E1(R)^{1/2})            with constant 1,
    ratio2: |w(R)| / (2 R^{(p-1)/(p+3)} (E1 E2)^{1/(p+3)})  with constant 2,

    where E1(R) = int_0^R w_r^2 dr and E2(R) = int_0^R |w|^{p+1}/r^{p-1} dr.
    E1 uses the cell-slope sum h * sum ((w_{i+1}-w_i)/h)^2, for which the
    discrete ratio1 <= 1 holds exactly (telescoping plus Cauchy-Schwarz at
    the nodes, sharp for linear w).  Nodes where a denominator vanishes
    are skipped.
    """
    w = np.asarray(w, dtype=float)
    r = h * np.arange(w.size)
    slopes = np.diff(w) / h
    e1 = np.zeros_like(w)
    np.cumsum(h * slopes * slopes, out=e1[1:])
    pot = np.zeros_like(w)
    pot[1:] = abs_power(w[1:], p + 1.0) / abs_power(r[1:], p - 1.0)
    e2 = cumtrapz(pot, h)

    ratio1 = np.zeros_like(w)
    mask1 = e1 > 0.0
    ratio1[mask1] = np.abs(w[mask1]) / np.sqrt(r[mask1] * e1[mask1])
    k1 = int(np.argmax(ratio1))

    ratio2 = np.zeros_like(w)
    prod = e1 * e2
    mask2 = prod > 0.0
    expo = (p - 1.0) / (p + 3.0)
    ratio2[mask2] = np.abs(w[mask2]) / (
        2.0 * r[mask2] ** expo * prod[mask2] ** (1.0 / (p + 3.0))
    )
    k2 = int(np.argmax(ratio2))
    return PointwiseReport(
        max_ratio1=float(ratio1[k1]),
        argmax_r1=float(r[k1]),
        max_ratio2=float(ratio2[k2]),
        argmax_r2=float(r[k2]),
    )
