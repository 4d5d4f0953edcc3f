"""Shared fixtures.

The expensive trajectories are session-scoped and shared between the
module tests and the acceptance suite, so the whole run stays within the
acceptance runtime budgets.  Everything here is deterministic: fixed
grids, fixed data, fixed seeds.
"""

import time

import numpy as np
import pytest

from nlw import (
    DirectedPulse,
    GaussianBump,
    GridSpec,
    Monitors,
    evolve,
    make_params,
    run_appendix_example,
)


def _timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start


@pytest.fixture(scope="session")
def compact_run():
    """Long compactly-supported p=3 run on a causally padded grid.

    Drives the conservation/channel criteria and the flux-tail criterion;
    the snapshots also feed the pointwise-bound sweep.
    """
    params = make_params(3.0, 0.5)
    family = GaussianBump(0.5, 2.0, 0.5)
    grid = GridSpec.padded(1.0 / 256.0, 50.0, family.support_radius())
    mon = Monitors(
        radii=(1.0, "t/4"),
        flux_s=(6.0, 8.0, 12.0, 16.0, 20.0, 25.0),
        snapshot_times=(4.0, 8.0, 16.0, 32.0, 50.0),
    )
    traj, elapsed = _timed(evolve, family.sample(grid), params, grid, mon)
    return {"traj": traj, "elapsed": elapsed, "support": family.support_radius()}


@pytest.fixture(scope="session")
def triangle_runs():
    """The same p=4 bump at h=1/128 and h=1/256 with the (t0, r0) = (1, 2)
    inward triangle probe, for the closure/refinement criterion."""
    params = make_params(4.0, 0.25)
    family = GaussianBump(1.0, 1.0, 0.25)
    out = {}
    for h in (1.0 / 128.0, 1.0 / 256.0):
        grid = GridSpec.padded(h, 4.0, family.support_radius())
        out[h] = evolve(
            family.sample(grid), params, grid, Monitors(triangles=((1.0, 2.0),))
        )
    return out


@pytest.fixture(scope="session")
def linear_pulse_run():
    """Inward Gaussian pulse evolved linearly, long enough to reflect
    through the origin completely."""
    params = make_params(3.0, 0.5)
    family = DirectedPulse(0.8, 4.0, 0.5, direction="inward")
    grid = GridSpec.padded(1.0 / 256.0, 12.0, family.support_radius())
    mon = Monitors(radii=(1.0,), char_tau=(3.5,), snapshot_times=(4.0, 8.0))
    traj = evolve(family.sample(grid), params, grid, mon, linear=True)
    return traj


@pytest.fixture(scope="session")
def morawetz_runs():
    """Small-amplitude bumps at p=3 and p=4 for the weighted-bound sweep
    (the weight accumulators are kappa-independent, so one run per p
    serves every kappa)."""
    runs = {}
    for p in (3.0, 4.0):
        params = make_params(p, 0.5)
        family = GaussianBump(0.1, 2.0, 0.5)
        grid = GridSpec.padded(1.0 / 64.0, 32.0, family.support_radius())
        runs[p] = evolve(family.sample(grid), params, grid)
    return runs


@pytest.fixture(scope="session")
def flagship():
    """The full slow-decay study at production resolution: p=4,
    kappa=0.25, h=1/128, t_max=64, amplitude auto-set to half the
    envelope-failure threshold."""
    (report, traj), elapsed = _timed(run_appendix_example, 4.0, 0.25)
    return {"report": report, "traj": traj, "elapsed": elapsed}


@pytest.fixture(scope="session")
def flagship_coarse(flagship):
    """One grid refinement below the flagship (same amplitude, h=1/64)."""
    c = flagship["report"]["envelope"]["c"]
    report, _ = run_appendix_example(4.0, 0.25, c=c, h=1.0 / 64.0, t_max=64.0)
    return report


@pytest.fixture(scope="session")
def appendix_quick():
    """Cheap slow-decay run (coarse grid, short horizon) for diagnostics
    that need the persistent power-law tail but not production accuracy."""
    report, traj = run_appendix_example(4.0, 0.25, h=1.0 / 32.0, t_max=32.0)
    return {"report": report, "traj": traj}


@pytest.fixture()
def rng():
    return np.random.default_rng(20260816)
