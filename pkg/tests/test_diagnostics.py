import math

import numpy as np
import pytest

import oracles
from nlw.diagnostics import (
    cylinder_integral,
    energy_channels,
    flux_inward,
    flux_outward,
    infinite_triangle_residual,
    outward_local_energy_bound,
    pointwise_bounds,
    triangle_residual,
    weighted_morawetz,
    xi_trace,
)
from nlw.errors import (
    OffGridError,
    TailNotConvergedError,
    WeightInvalidError,
)
from nlw.model import GaussianBump, make_params
from nlw.solver import GridSpec, Monitors, evolve


# --------------------------------------------------------------------------
# channel split
# --------------------------------------------------------------------------

def test_channel_split_sums_exactly(rng):
    """E_- + E_+ = E must hold to rounding because the three integrals
    share their potential subterm by construction."""
    h = 1.0 / 128.0
    w0, w1 = oracles.random_smooth_state(rng, h, 10.0)
    rep = energy_channels(w0, w1, h, 3.5)
    assert abs(rep.e_minus + rep.e_plus - rep.e_total) < 1e-13 * rep.e_total
    assert rep.em_cum[0] == 0.0
    assert rep.em_cum[-1] == pytest.approx(rep.e_minus)
    # cumulative profiles are non-decreasing in radius
    assert np.all(np.diff(rep.em_cum) >= -1e-15)
    assert np.all(np.diff(rep.ep_cum) >= -1e-15)


def test_channel_split_against_quadrature():
    amp, center, width = 0.4, 2.0, 0.5
    u0f, u0rf, w0f, w0rf = oracles.gaussian_u_callables(amp, center, width)
    p = 4.0
    h = 1.0 / 512.0
    n = int(8.0 / h) + 1
    r = h * np.arange(n)
    fam = GaussianBump(amp, center, width)
    rep = energy_channels(fam.w0(r), np.zeros(n), h, p)
    ref_minus = oracles.channel_quad(w0f, w0rf, lambda s: 0.0, p, 8.0, +1.0)
    ref_plus = oracles.channel_quad(w0f, w0rf, lambda s: 0.0, p, 8.0, -1.0)
    assert abs(rep.e_minus - ref_minus) < 3e-5 * ref_minus
    assert abs(rep.e_plus - ref_plus) < 3e-5 * ref_plus


def test_at_rest_data_splits_evenly(rng):
    h = 1.0 / 128.0
    w0, _ = oracles.random_smooth_state(rng, h, 10.0, moving=False)
    rep = energy_channels(w0, np.zeros_like(w0), h, 3.0)
    assert rep.e_minus == pytest.approx(rep.e_plus, rel=1e-12)


# --------------------------------------------------------------------------
# conservation, monotonicity, additivity on a real run
# --------------------------------------------------------------------------

def test_ledger_conservation_and_channels(compact_run):
    led = compact_run["traj"].ledger
    assert led.conservation_drift() <= 1e-4
    assert led.additivity_error() <= 1e-12
    worst_minus, worst_plus = led.monotonicity_margins()
    e0 = led.e_total[0]
    # E_- may only decrease, E_+ may only increase (up to rounding)
    assert worst_minus >= -1e-6 * e0
    assert worst_plus >= -1e-6 * e0


def test_radius_series_additivity(compact_run):
    led = compact_run["traj"].ledger
    e, em, ep = led.radii[1.0]
    assert np.max(np.abs(em + ep - e)) < 1e-12 * max(1.0, led.e_total[0])
    # the ball energy never exceeds the global one
    assert np.all(e <= led.e_total * (1.0 + 1e-12))


# --------------------------------------------------------------------------
# origin trace
# --------------------------------------------------------------------------

def test_xi_balance_for_linear_reflection(linear_pulse_run):
    """Everything an inward pulse carries must come out through the origin
    term: pi int xi^2 dt = E_-(0) in linear mode."""
    traj = linear_pulse_run
    led = traj.ledger
    converted = led.xi_energy(0.0, traj.grid.t_max)
    e_minus0 = led.e_minus[0]
    assert abs(converted - e_minus0) < 1e-3 * e_minus0


def test_xi_trace_shape(linear_pulse_run):
    t, xi = xi_trace(linear_pulse_run)
    assert t.shape == xi.shape
    assert np.max(np.abs(xi)) > 0.0


# --------------------------------------------------------------------------
# characteristic flux
# --------------------------------------------------------------------------

def test_flux_decays_beyond_support(compact_run):
    traj = compact_run["traj"]
    e0 = traj.ledger.e_total[0]
    qs = [flux_inward(traj, s, 0.0, s) for s in (6.0, 8.0, 12.0, 16.0, 20.0, 25.0)]
    assert all(q >= 0.0 for q in qs)
    for a, b in zip(qs, qs[1:]):
        assert b <= a * (1.0 + 1e-12), f"flux not decreasing: {qs}"
    assert qs[-1] < 1e-3 * e0


def test_flux_window_validation(compact_run):
    traj = compact_run["traj"]
    with pytest.raises(OffGridError):
        flux_inward(traj, 7.0)  # label never monitored
    with pytest.raises(OffGridError):
        flux_inward(traj, 8.0, 6.0, 5.0)  # empty window
    with pytest.raises(OffGridError):
        flux_inward(traj, 8.0, 2.0, 9.0)  # beyond the focusing time


def test_outward_flux_crossing_pulse():
    # an outgoing pulse must deposit positive flux on r = t - tau
    params = make_params(3.0, 0.5)
    fam = GaussianBump(0.5, 2.0, 0.4)
    h = 1.0 / 64.0
    grid = GridSpec.padded(h, 8.0, fam.support_radius())
    traj = evolve(fam.sample(grid), params, grid, Monitors(flux_tau=(2.0,)))
    q = flux_outward(traj, 2.0)
    assert q > 0.0
    e0 = traj.ledger.e_total[0]
    assert q < e0  # cannot exceed the total budget


# --------------------------------------------------------------------------
# triangle laws
# --------------------------------------------------------------------------

def test_triangle_report_budget_arithmetic(triangle_runs):
    for traj in triangle_runs.values():
        rep = triangle_residual(traj, 1.0, 2.0)
        recon = rep.xi_term + rep.flux_term + rep.bulk_term + rep.residual
        assert recon == pytest.approx(rep.energy, rel=1e-12)
        assert rep.residual_frac == pytest.approx(
            abs(rep.residual) / rep.energy, rel=1e-12
        )
        # every term in the budget is a nonnegative energy quantity
        assert min(rep.energy, rep.xi_term, rep.flux_term, rep.bulk_term) >= 0.0


def test_triangle_closure_small_and_refining(triangle_runs):
    h1, h2 = 1.0 / 128.0, 1.0 / 256.0
    r1 = abs(triangle_residual(triangle_runs[h1], 1.0, 2.0).residual_frac)
    r2 = abs(triangle_residual(triangle_runs[h2], 1.0, 2.0).residual_frac)
    assert r2 < 0.01
    assert r2 <= 0.65 * r1


def test_outward_triangle_closure():
    params = make_params(4.0, 0.25)
    fam = GaussianBump(1.0, 1.0, 0.25)
    h = 1.0 / 128.0
    grid = GridSpec.padded(h, 4.0, fam.support_radius())
    traj = evolve(
        fam.sample(grid), params, grid, Monitors(triangles_out=((3.0, 2.0),))
    )
    rep = triangle_residual(traj, 3.0, 2.0, kind="outward")
    assert abs(rep.residual_frac) < 0.01


def test_infinite_triangle_closure():
    """Data hugging the origin: all the conversion happens well before
    t_max/10, so the truncated infinite law must close."""
    params = make_params(3.0, 0.5)
    fam = GaussianBump(0.5, 1.0, 0.2)
    h = 1.0 / 128.0
    grid = GridSpec.padded(h, 30.0, fam.support_radius())
    traj = evolve(fam.sample(grid), params, grid)
    rep = infinite_triangle_residual(traj, 1.0)
    assert abs(rep.residual_frac) < 0.01


def test_infinite_triangle_guards(compact_run):
    traj = compact_run["traj"]
    with pytest.raises(TailNotConvergedError):
        infinite_triangle_residual(traj, 10.0)  # needs t < t_max/10
    with pytest.raises(TailNotConvergedError):
        # valid window, but the origin is still active past t_max/10
        infinite_triangle_residual(traj, 4.0)


# --------------------------------------------------------------------------
# weighted space-time bound
# --------------------------------------------------------------------------

def test_morawetz_bound_holds(morawetz_runs):
    for p, traj in morawetz_runs.items():
        rep = weighted_morawetz(traj, kappa=0.6)
        assert rep.bound_ratio <= 1.0, f"p={p}: ratio {rep.bound_ratio}"
        assert rep.lhs == pytest.approx(rep.xi_term + rep.bulk_term)
        assert rep.k1 > 0.0


def test_morawetz_custom_weight(morawetz_runs):
    traj = morawetz_runs[3.0]
    gamma = 0.5
    rep = weighted_morawetz(
        traj, weight=lambda s: s ** 0.25, gamma=gamma
    )
    # a slower-growing valid weight still satisfies the bound
    assert rep.bound_ratio <= 1.0
    assert rep.gamma == pytest.approx(gamma)


def test_morawetz_weight_validation(morawetz_runs):
    traj = morawetz_runs[3.0]
    with pytest.raises(WeightInvalidError):
        weighted_morawetz(traj, weight=lambda s: s, gamma=1.0)  # gamma not < 1
    with pytest.raises(WeightInvalidError):
        weighted_morawetz(traj, weight=lambda s: 2.0 * s ** 0.5, gamma=0.5)  # a(1) != 1
    with pytest.raises(WeightInvalidError):
        weighted_morawetz(traj, weight=lambda s: s ** -0.2, gamma=0.5)  # decreasing
    with pytest.raises(WeightInvalidError):
        weighted_morawetz(traj, weight=lambda s: s ** 0.9, gamma=0.5)  # too fast


def test_morawetz_critical_weight_is_accepted(morawetz_runs):
    """a(s) = s^gamma saturates a' = gamma a / s exactly; the validator
    must not reject its own hypothesis boundary."""
    traj = morawetz_runs[4.0]
    rep = weighted_morawetz(traj, weight=lambda s: s ** 0.3, gamma=0.3)
    assert rep.bound_ratio <= 1.0


# --------------------------------------------------------------------------
# cylinder integrals and the local outward bound
# --------------------------------------------------------------------------

def test_cylinder_integrable_tail(appendix_quick):
    traj = appendix_quick["traj"]
    rep = cylinder_integral(traj, 4.0, 1.0, channel="outward")
    assert rep.value > 0.0 and rep.tail > 0.0
    assert rep.tail_exponent < -1.05
    assert rep.total == pytest.approx(rep.value + rep.tail)


def test_cylinder_non_integrable_tail_raises(appendix_quick):
    traj = appendix_quick["traj"]
    with pytest.raises(TailNotConvergedError):
        cylinder_integral(traj, 4.0, "t/4", channel="outward")


def test_cylinder_rounding_noise_tail(linear_pulse_run):
    # linear pulse leaves exact zeros behind at unit CFL, so the late
    # series sits on the rounding floor and no tail fit is attempted
    rep = cylinder_integral(linear_pulse_run, 10.0, 1.0, channel="inward")
    assert rep.tail == 0.0
    assert rep.tail_exponent == -math.inf


def test_local_outward_bound_stable(appendix_quick):
    traj = appendix_quick["traj"]
    ratios = [
        outward_local_energy_bound(traj, t, 1.0).ratio for t in (8.0, 16.0, 32.0)
    ]
    assert all(r > 0.0 for r in ratios)
    # not a sharp-constant bound; require stability rather than a value
    assert max(ratios) < 10.0 * min(ratios)
    with pytest.raises(OffGridError):
        outward_local_energy_bound(traj, 4.0, 6.0)


# --------------------------------------------------------------------------
# pointwise bounds
# --------------------------------------------------------------------------

def test_pointwise_first_cell_identity(rng):
    """ratio1 equals 1 exactly at the first node: |w_1| over
    sqrt(r_1 * h (w_1/h)^2) telescopes to 1."""
    h = 1.0 / 64.0
    w0, _ = oracles.random_smooth_state(rng, h, 8.0)
    rep = pointwise_bounds(w0, h, 4.0)
    assert rep.max_ratio1 == pytest.approx(1.0, abs=1e-9)


def test_pointwise_bounds_hold_on_random_states(rng):
    h = 1.0 / 64.0
    for _ in range(25):
        w0, _ = oracles.random_smooth_state(rng, h, 8.0)
        rep = pointwise_bounds(w0, h, 3.5)
        assert rep.max_ratio1 <= 1.0 + 1e-6
        assert rep.max_ratio2 <= 1.0 + 1e-6


def test_pointwise_matches_naive_recomputation(rng):
    h = 1.0 / 32.0
    w0, _ = oracles.random_smooth_state(rng, h, 6.0)
    rep = pointwise_bounds(w0, h, 4.0)
    naive1, naive2 = oracles.naive_pointwise_ratios(list(w0), h, 4.0, stride=1)
    assert rep.max_ratio1 == pytest.approx(naive1, rel=1e-10)
    assert rep.max_ratio2 == pytest.approx(naive2, rel=1e-10)
