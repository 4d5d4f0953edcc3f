"""Reference implementations used only by the tests.

Everything in this module is deliberately independent of the package
internals: closed forms where they exist, scipy quadrature otherwise, and
a couple of intentionally naive evaluators.  Tests compare the fast
implementations against these, so nothing here may call into the package.

Conventions mirrored from the library (half-line reduction w = r u):

    energy          E  = 2 pi int [w_r^2 + w_t^2 + (2/(p+1))|w|^{p+1}/r^{p-1}] dr
    channel split   E_-/+ = pi int [(w_r +/- w_t)^2 + (2/(p+1))|w|^{p+1}/r^{p-1}] dr
    weighted mass   K1 = pi int max(1, r^kappa) [(w_r + w_t)^2 + ...] dr
"""

import math

import numpy as np
from scipy.integrate import quad


# ---------------------------------------------------------------------------
# exact linear propagation
# ---------------------------------------------------------------------------

def odd_eval(f, x):
    """Evaluate the odd extension of f (defined on x >= 0) at any x."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * f(np.abs(x))


def dalembert_point(w0f, w1_anti, r, t):
    """Exact half-line solution of w_tt = w_rr with w(0, t) = 0.

    w0f is the initial profile on r >= 0 and w1_anti its velocity
    antiderivative V(x) = int_0^x w1 (so the formula needs no quadrature).
    The odd extension of w1 makes V even, hence the |.| below.
    """
    r = np.asarray(r, dtype=float)
    lead = 0.5 * (odd_eval(w0f, r + t) + odd_eval(w0f, r - t))
    vel = 0.5 * (w1_anti(np.abs(r + t)) - w1_anti(np.abs(r - t)))
    return lead + vel


def dalembert_grid(w0, w1, h, m):
    """Discrete exact solution after m unit-CFL steps, as an array over j.

    For the three-point scheme with the half-sum-plus-midpoint first level,

        W[m][j] = (W0e[j+m] + W0e[j-m]) / 2 + h * sum W1e[k],

    the sum running over k = j-m+1, j-m+3, ..., j+m-1 of the odd
    extensions.  This is exact in exact arithmetic for any grid data, so
    discrepancies against the marching solver are pure rounding.  Only
    valid where the stencil has not touched the outer boundary, i.e. for
    j + m <= n - 1; the returned array is restricted accordingly.
    """
    w0 = np.asarray(w0, dtype=float)
    w1 = np.asarray(w1, dtype=float)
    n = w0.size
    ext = np.concatenate([-w0[:0:-1], w0])  # index k -> position k + n - 1
    ext1 = np.concatenate([-w1[:0:-1], w1])
    j_hi = n - m
    j = np.arange(j_hi)
    lead = 0.5 * (ext[j + m + n - 1] + ext[j - m + n - 1])
    vel = np.zeros(j_hi)
    for k in range(-m + 1, m, 2):
        vel += ext1[j + k + n - 1]
    return lead + h * vel


# ---------------------------------------------------------------------------
# quadrature references
# ---------------------------------------------------------------------------

def energy_u_quad(u0f, u0rf, u1f, p, r_max):
    """Full 3D energy 4 pi int (u_r^2/2 + u_t^2/2 + |u|^{p+1}/(p+1)) r^2 dr.

    Written on the u side on purpose: it exercises the integration by
    parts hidden in the half-line normalization instead of assuming it.
    """
    def dens(r):
        return (
            4.0 * math.pi * r * r * (
                0.5 * u0rf(r) ** 2
                + 0.5 * u1f(r) ** 2
                + abs(u0f(r)) ** (p + 1.0) / (p + 1.0)
            )
        )

    val, err = quad(dens, 0.0, r_max, limit=400)
    return val


def channel_quad(w0f, w0rf, w1f, p, r_max, sign):
    """pi int (w_r + sign*w_t)^2 + (2/(p+1)) |w|^{p+1}/r^{p-1} dr."""
    def dens(r):
        pot = 0.0
        if r > 0.0:
            pot = (2.0 / (p + 1.0)) * abs(w0f(r)) ** (p + 1.0) / r ** (p - 1.0)
        return (w0rf(r) + sign * w1f(r)) ** 2 + pot

    val, err = quad(dens, 0.0, r_max, limit=400)
    return math.pi * val


def k1_quad(w0f, w0rf, w1f, p, kappa, r_max):
    def dens(r):
        pot = 0.0
        if r > 0.0:
            pot = (2.0 / (p + 1.0)) * abs(w0f(r)) ** (p + 1.0) / r ** (p - 1.0)
        return max(1.0, r ** kappa) * ((w0rf(r) + w1f(r)) ** 2 + pot)

    val, err = quad(dens, 0.0, r_max, limit=400, points=[1.0])
    return math.pi * val


def gaussian_u_callables(amplitude, center, width):
    """(u0, u0_r, w0, w0_r) callables for the at-rest Gaussian data."""
    def u0(r):
        x = (r - center) / width
        return amplitude * np.exp(-x * x)

    def u0r(r):
        x = (r - center) / width
        return -2.0 * x / width * amplitude * np.exp(-x * x)

    def w0(r):
        return r * u0(r)

    def w0r(r):
        return u0(r) + r * u0r(r)

    return u0, u0r, w0, w0r


# ---------------------------------------------------------------------------
# backward light triangles
# ---------------------------------------------------------------------------

def cp_closed(p):
    """2 / (beta (1 - beta)) with beta = (p-3)/(p-1); diverges at p = 3."""
    beta = (p - 3.0) / (p - 1.0)
    if beta <= 0.0:
        return math.inf
    return 2.0 / (beta * (1.0 - beta))


def triangle_power_closed(beta, r_apex, t_apex):
    """Closed form of the double integral of r^{beta-2} over the backward
    triangle with the given apex:

        (2 r'^beta - (r'+t')^beta - (r'-t')^beta) / (beta (1 - beta)).
    """
    return (
        2.0 * r_apex ** beta
        - (r_apex + t_apex) ** beta
        - (r_apex - t_apex) ** beta
    ) / (beta * (1.0 - beta))


def triangle_quad(fn, r_apex, t_apex, n_t=4000):
    """Double integral of fn(r, t) over the backward triangle from the apex,
    by composite Simpson in r inside an adaptive-free trapezoid in t.  Meant
    for smooth integrands; accuracy is limited but independent."""
    ts = np.linspace(0.0, t_apex, n_t + 1)
    vals = np.empty_like(ts)
    for i, t in enumerate(ts):
        half = t_apex - t
        lo, hi = r_apex - half, r_apex + half
        if half == 0.0:
            vals[i] = 0.0
            continue
        rs = np.linspace(lo, hi, 257)
        fr = np.array([fn(r, t) for r in rs])
        vals[i] = np.trapezoid(fr, rs)
    return np.trapezoid(vals, ts)


# ---------------------------------------------------------------------------
# random smooth states
# ---------------------------------------------------------------------------

def random_smooth_state(rng, h, r_max, n_bumps=4, amp=0.5, moving=True):
    """Sum of random Gaussian bumps on the u side, lifted to w = r u.

    Centers stay a few widths inside (0, r_max) so the state is compactly
    supported to rounding; w(0) = 0 holds by construction.
    """
    n = int(round(r_max / h)) + 1
    r = h * np.arange(n)
    w0 = np.zeros(n)
    w1 = np.zeros(n)
    for _ in range(n_bumps):
        a = amp * (2.0 * rng.random() - 1.0)
        width = 0.3 + 0.7 * rng.random()
        center = 4.0 * width + rng.random() * (r_max - 8.0 * width)
        x = (r - center) / width
        bump = a * np.exp(-x * x)
        w0 += r * bump
        if moving:
            # a right/left mover contributes w_t ~ -/+ w_r of its own bump
            sgn = 1.0 if rng.random() < 0.5 else -1.0
            w1 += sgn * (bump + r * (-2.0 * x / width) * bump)
    w1[0] = 0.0
    return w0, w1


def naive_pointwise_ratios(w, h, p, stride=7):
    """Per-node recomputation of the two pointwise-bound ratios with plain
    Python loops; subsampled for speed.  Returns the max over the sample."""
    n = len(w)
    pot = [0.0] * n
    for i in range(1, n):
        pot[i] = abs(w[i]) ** (p + 1.0) / (i * h) ** (p - 1.0)
    best1 = 0.0
    best2 = 0.0
    for j in range(1, n, stride):
        r = j * h
        e1 = 0.0
        for i in range(j):
            s = (w[i + 1] - w[i]) / h
            e1 += h * s * s
        e2 = 0.0
        for i in range(1, j + 1):
            e2 += 0.5 * h * (pot[i - 1] + pot[i])
        if e1 > 0.0:
            best1 = max(best1, abs(w[j]) / math.sqrt(r * e1))
        prod = e1 * e2
        if prod > 0.0:
            expo = (p - 1.0) / (p + 3.0)
            best2 = max(
                best2,
                abs(w[j]) / (2.0 * r ** expo * prod ** (1.0 / (p + 3.0))),
            )
    return best1, best2
