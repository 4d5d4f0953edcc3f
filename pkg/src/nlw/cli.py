"""Command line interface.

Subcommands:

  run       evolve a configured problem; write ledger.csv + summary.json
            (+ snapshots.npz, + SVG plots on request)
  verify    run, then apply the bookkeeping checks (conservation,
            channel additivity, channel monotonicity, pointwise bounds,
            triangle residuals); exit 1 if any check fails
  sweep     repeat a run along one config axis, in parallel
  appendix  the slow-decay power-law example study (report + plots)
  fit       power-law or logarithmic-growth fit on ledger.csv columns

Config files are flat "dotted.key = value" lines; '#' starts a comment.
Values may be numbers (fractions like 1/256 work), booleans, bare
strings, comma-separated lists, and colon pairs for triangle probes
("t0:r0").  Unknown keys are rejected, missing required keys reported
by name.

Exit codes: 0 success, 1 a verify check failed, 2 config problem,
3 any other lab error (blowup, divergent integral, off-grid request...).
"""

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .appendix import run_appendix_example
from .diagnostics import pointwise_bounds, triangle_residual
from .errors import ConfigError, NlwError
from .model import (
    AppendixPowerLaw,
    DirectedPulse,
    GaussianBump,
    Tabulated,
    make_params,
)
from .scattering import fit_log_growth, fit_power_law
from .solver import EnvelopeSpec, GridSpec, Monitors, evolve
from .svgplot import line_plot

SCHEMA_VERSION = "1"

KNOWN_KEYS = frozenset(
    {
        "params.p",
        "params.kappa",
        "grid.h",
        "grid.t_max",
        "grid.r_max",
        "grid.boundary",
        "grid.margin",
        "data.family",
        "data.amplitude",
        "data.center",
        "data.width",
        "data.direction",
        "data.c",
        "data.blend",
        "data.path",
        "data.leak_tol",
        "monitors.radii",
        "monitors.flux_s",
        "monitors.flux_tau",
        "monitors.char_tau",
        "monitors.triangles",
        "monitors.triangles_out",
        "monitors.snapshots",
        "monitors.envelope_c",
        "monitors.xi_variant",
        "run.linear",
        "output.stride",
        "output.snapshots",
        "output.plots",
        "checks.conservation",
        "checks.additivity",
        "checks.monotonicity",
        "checks.pointwise",
        "checks.triangle",
    }
)

_MISSING = object()


def parse_scalar(text):
    """One config token: bool, int, float (fractions allowed), or string."""
    s = text.strip()
    low = s.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if "/" in s:
        num, _, den = s.partition("/")
        try:
            return float(num) / float(den)
        except (ValueError, ZeroDivisionError):
            return s
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def load_config(path):
    """Read a flat key = value file into a raw-string dict."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    raw = {}
    for ln, line in enumerate(lines, 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, value = body.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(f"{path}:{ln}: expected 'key = value'")
        raw[key] = value
    return raw


class Config:
    """Typed access to a raw config dict with good error messages."""

    def __init__(self, raw):
        unknown = sorted(set(raw) - KNOWN_KEYS)
        if unknown:
            raise ConfigError("unknown config keys: " + ", ".join(unknown))
        self.raw = dict(raw)

    def number(self, key, default=_MISSING):
        if key not in self.raw:
            if default is _MISSING:
                raise ConfigError(f"missing required config key {key!r}")
            return default
        v = parse_scalar(self.raw[key])
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{key} must be a number, got {self.raw[key]!r}")
        return float(v)

    def integer(self, key, default=_MISSING):
        v = self.number(key, default)
        if v is default:
            return default
        n = int(round(v))
        if abs(v - n) > 1e-9:
            raise ConfigError(f"{key} must be an integer, got {self.raw[key]!r}")
        return n

    def string(self, key, default=_MISSING):
        if key not in self.raw:
            if default is _MISSING:
                raise ConfigError(f"missing required config key {key!r}")
            return default
        return self.raw[key]

    def boolean(self, key, default=_MISSING):
        if key not in self.raw:
            if default is _MISSING:
                raise ConfigError(f"missing required config key {key!r}")
            return default
        v = parse_scalar(self.raw[key])
        if not isinstance(v, bool):
            raise ConfigError(f"{key} must be a boolean, got {self.raw[key]!r}")
        return v

    def scalar_list(self, key, default=()):
        if key not in self.raw:
            return tuple(default)
        return tuple(parse_scalar(x) for x in self.raw[key].split(","))

    def number_list(self, key, default=()):
        out = []
        for v in self.scalar_list(key, default):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"{key} must list numbers, got {v!r}")
            out.append(float(v))
        return tuple(out)

    def pair_list(self, key, default=()):
        if key not in self.raw:
            return tuple(default)
        out = []
        for item in self.raw[key].split(","):
            a, sep, b = item.strip().partition(":")
            va, vb = parse_scalar(a), parse_scalar(b)
            ok = (
                sep
                and isinstance(va, (int, float))
                and isinstance(vb, (int, float))
                and not isinstance(va, bool)
                and not isinstance(vb, bool)
            )
            if not ok:
                raise ConfigError(f"{key}: expected 't0:r0', got {item.strip()!r}")
            out.append((float(va), float(vb)))
        return tuple(out)


# -- problem construction ----------------------------------------------------


def build_params(cfg):
    try:
        return make_params(cfg.number("params.p"), cfg.number("params.kappa", 0.5))
    except NlwError as err:
        raise ConfigError(str(err)) from err


def build_family(cfg, params):
    kind = cfg.string("data.family")
    try:
        if kind == "gaussian":
            return GaussianBump(
                cfg.number("data.amplitude"),
                cfg.number("data.center"),
                cfg.number("data.width"),
            )
        if kind == "pulse":
            return DirectedPulse(
                cfg.number("data.amplitude"),
                cfg.number("data.center"),
                cfg.number("data.width"),
                cfg.string("data.direction", "inward"),
            )
        if kind == "power_law":
            return AppendixPowerLaw(
                cfg.number("data.c"), params, blend=cfg.number("data.blend", 0.5)
            )
        if kind == "file":
            path = cfg.string("data.path")
            try:
                with np.load(path) as z:
                    return Tabulated(z["w0"], z["w1"], float(z["h"]))
            except (OSError, KeyError) as err:
                raise ConfigError(f"cannot load data from {path}: {err}") from err
    except NlwError as err:
        raise ConfigError(str(err)) from err
    raise ConfigError(f"unknown data.family {kind!r}")


def build_grid(cfg, family):
    h = cfg.number("grid.h")
    t_max = cfg.number("grid.t_max")
    r_max = cfg.number("grid.r_max", None)
    boundary = cfg.string("grid.boundary", None)
    try:
        if r_max is None:
            support = family.support_radius()
            if support is None:
                raise ConfigError(
                    "the data family has an unbounded tail; set grid.r_max"
                )
            grid = GridSpec.padded(
                h, t_max, support, margin=cfg.number("grid.margin", 1.0)
            )
            if boundary is not None and boundary != grid.boundary:
                grid = GridSpec(
                    h=h, r_max=grid.r_max, t_max=t_max, boundary=boundary
                )
            return grid
        return GridSpec(
            h=h, r_max=r_max, t_max=t_max, boundary=boundary or "outgoing"
        )
    except NlwError as err:
        raise ConfigError(str(err)) from err


def build_monitors(cfg):
    radii = cfg.scalar_list("monitors.radii")
    for x in radii:
        if x == "t/4":
            continue
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ConfigError(f"monitors.radii entry {x!r} is not a radius")
    env_c = cfg.number("monitors.envelope_c", None)
    envelope = EnvelopeSpec(c=env_c) if env_c is not None else None
    xi_variant = cfg.string("monitors.xi_variant", "one_sided")
    if xi_variant not in ("one_sided", "second_order"):
        raise ConfigError(f"monitors.xi_variant {xi_variant!r} not recognized")
    return Monitors(
        radii=radii,
        flux_s=cfg.number_list("monitors.flux_s"),
        flux_tau=cfg.number_list("monitors.flux_tau"),
        char_tau=cfg.number_list("monitors.char_tau"),
        triangles=cfg.pair_list("monitors.triangles"),
        triangles_out=cfg.pair_list("monitors.triangles_out"),
        snapshot_times=cfg.number_list("monitors.snapshots"),
        envelope=envelope,
        xi_variant=xi_variant,
    )


def run_problem(cfg):
    """Build and evolve; returns (trajectory, elapsed_seconds, data_desc)."""
    params = build_params(cfg)
    family = build_family(cfg, params)
    grid = build_grid(cfg, family)
    monitors = build_monitors(cfg)
    linear = cfg.boolean("run.linear", False)
    leak_raw = cfg.raw.get("data.leak_tol", "")
    if leak_raw.strip().lower() in ("none", "off"):
        leak_tol = None
    else:
        leak_tol = cfg.number("data.leak_tol", 0.05)
    pair = family.sample(grid, leak_tol=leak_tol)
    desc = {
        key.split(".", 1)[1]: parse_scalar(value)
        for key, value in cfg.raw.items()
        if key.startswith("data.")
    }
    start = time.perf_counter()
    traj = evolve(pair, params, grid, monitors, linear=linear)
    return traj, time.perf_counter() - start, desc


# -- output writers ----------------------------------------------------------


def _radius_tag(label):
    return "t4" if label == "t/4" else f"{float(label):g}"


def write_ledger_csv(path, traj, stride=1):
    led = traj.ledger
    stride = max(1, int(stride))
    cols = ["t", "E_total", "E_minus", "E_plus", "xi", "bulk", "y2p", "exterior_l2p2"]
    series = [
        led.t,
        led.e_total,
        led.e_minus,
        led.e_plus,
        led.xi,
        led.bulk,
        led.y2p,
        led.exterior_l2p2,
    ]
    for label, (tot, mn, pl) in led.radii.items():
        tag = _radius_tag(label)
        cols += [f"E_total_r{tag}", f"E_minus_r{tag}", f"E_plus_r{tag}"]
        series += [tot, mn, pl]
    levels = list(range(0, led.t.size, stride))
    if levels[-1] != led.t.size - 1:
        levels.append(led.t.size - 1)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for m in levels:
            writer.writerow([f"{arr[m]:.12g}" for arr in series])
    return len(levels)


def write_snapshots_npz(path, traj):
    if not traj.snapshots:
        return False
    np.savez_compressed(
        path,
        t=np.array([s.t for s in traj.snapshots]),
        w=np.stack([s.w_curr for s in traj.snapshots]),
        w_t=np.stack([s.w_t for s in traj.snapshots]),
        h=np.array(traj.grid.h),
    )
    return True


def _jsonable(obj):
    """Recursively convert to JSON-safe types; non-finite floats -> None."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def summarize(traj, data_desc=None, checks=None, elapsed=None):
    """JSON-ready run summary; deterministic except the timing block."""
    led = traj.ledger
    up, down = led.monotonicity_margins()
    doc = {
        "schema_version": SCHEMA_VERSION,
        "params": {"p": led.p, "kappa": led.kappa},
        "grid": {
            "h": traj.grid.h,
            "r_max": traj.grid.r_max,
            "t_max": traj.grid.t_max,
            "boundary": traj.grid.boundary,
        },
        "linear": bool(traj.linear),
        "energy": {
            "initial": float(led.e_total[0]),
            "final": float(led.e_total[-1]),
            "e_minus_final": float(led.e_minus[-1]),
            "e_plus_final": float(led.e_plus[-1]),
            "conservation_drift": led.conservation_drift(),
            "additivity_error": led.additivity_error(),
            "worst_e_minus_increase": up,
            "worst_e_plus_decrease": down,
        },
    }
    if data_desc:
        doc["data"] = dict(data_desc)
    if traj.triangle_records:
        rows = []
        for rec in traj.triangle_records:
            rep = triangle_residual(traj, rec.t0, rec.r0, kind=rec.kind)
            rows.append(
                {
                    "t0": rec.t0,
                    "r0": rec.r0,
                    "kind": rec.kind,
                    "energy": rep.energy,
                    "xi_term": rep.xi_term,
                    "flux_term": rep.flux_term,
                    "bulk_term": rep.bulk_term,
                    "residual": rep.residual,
                    "residual_frac": rep.residual_frac,
                }
            )
        doc["triangles"] = rows
    if traj.envelope is not None:
        env = traj.envelope
        doc["envelope"] = {
            "c": env.c,
            "peak_ratio": env.peak_ratio,
            "peak_r": env.peak_r,
            "peak_t": env.peak_t,
            "first_violation_t": env.first_violation_t,
        }
    if checks is not None:
        doc["checks"] = [
            {"name": name, "value": value, "threshold": threshold, "passed": ok}
            for name, value, threshold, ok in checks
        ]
    if elapsed is not None:
        doc["timing"] = {"seconds": elapsed}
    return _jsonable(doc)


def write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_run_plots(out_dir, traj):
    led = traj.ledger
    paths = []
    energy_path = os.path.join(out_dir, "energy.svg")
    line_plot(
        energy_path,
        [
            ("E_total", led.t, led.e_total),
            ("E_minus", led.t, led.e_minus),
            ("E_plus", led.t, led.e_plus),
        ],
        title="channel energies",
        xlabel="t",
        ylabel="energy",
    )
    paths.append(energy_path)
    if traj.envelope is not None:
        env_path = os.path.join(out_dir, "envelope.svg")
        line_plot(
            env_path,
            [
                ("sup ratio", traj.envelope.t, traj.envelope.max_ratio),
                ("profile floor", traj.envelope.t, traj.envelope.min_profile),
            ],
            title="envelope ratios",
            xlabel="t",
            ylabel="ratio",
        )
        paths.append(env_path)
    return paths


# -- verify checks -----------------------------------------------------------


def run_checks(traj, cfg):
    """List of (name, value, threshold, passed); value <= threshold passes."""
    led = traj.ledger
    e0 = max(abs(float(led.e_total[0])), 1e-300)
    checks = []
    if traj.grid.boundary == "pad":
        tol = cfg.number("checks.conservation", 1e-4)
        val = led.conservation_drift()
        checks.append(("conservation", val, tol, val <= tol))
    tol = cfg.number("checks.additivity", 1e-12)
    val = led.additivity_error() / e0
    checks.append(("additivity", val, tol, val <= tol))
    tol = cfg.number("checks.monotonicity", 1e-6)
    up, down = led.monotonicity_margins()
    val = max(up, down) / e0
    checks.append(("monotonicity", val, tol, val <= tol))
    tol = cfg.number("checks.pointwise", 1e-6)
    worst = 0.0
    states = [traj.pair.w0] + [snap.w_curr for snap in traj.snapshots]
    for w in states:
        rep = pointwise_bounds(w, led.h, led.p)
        worst = max(worst, rep.max_ratio1, rep.max_ratio2)
    checks.append(("pointwise", worst - 1.0, tol, worst - 1.0 <= tol))
    if traj.triangle_records:
        tol = cfg.number("checks.triangle", 0.01)
        worst = 0.0
        for rec in traj.triangle_records:
            rep = triangle_residual(traj, rec.t0, rec.r0, kind=rec.kind)
            worst = max(worst, abs(rep.residual_frac))
        checks.append(("triangle", worst, tol, worst <= tol))
    return checks


# -- subcommands -------------------------------------------------------------


def _write_outputs(out_dir, cfg, traj, elapsed, desc, checks=None):
    os.makedirs(out_dir, exist_ok=True)
    stride = cfg.integer("output.stride", 1)
    rows = write_ledger_csv(os.path.join(out_dir, "ledger.csv"), traj, stride)
    if cfg.boolean("output.snapshots", True):
        write_snapshots_npz(os.path.join(out_dir, "snapshots.npz"), traj)
    doc = summarize(traj, data_desc=desc, checks=checks, elapsed=elapsed)
    write_json(os.path.join(out_dir, "summary.json"), doc)
    if cfg.boolean("output.plots", False):
        write_run_plots(out_dir, traj)
    return rows


def cmd_run(args):
    cfg = Config(load_config(args.config))
    traj, elapsed, desc = run_problem(cfg)
    rows = _write_outputs(args.out_dir, cfg, traj, elapsed, desc)
    led = traj.ledger
    print(f"wrote {args.out_dir}/ledger.csv ({rows} rows) and summary.json")
    print(
        f"E(0) = {led.e_total[0]:.6g}, E(t_max) = {led.e_total[-1]:.6g}, "
        f"E_minus(t_max) = {led.e_minus[-1]:.6g}, "
        f"E_plus(t_max) = {led.e_plus[-1]:.6g} "
        f"[{elapsed:.2f}s, {led.t.size - 1} steps]"
    )
    return 0


def cmd_verify(args):
    cfg = Config(load_config(args.config))
    traj, elapsed, desc = run_problem(cfg)
    checks = run_checks(traj, cfg)
    _write_outputs(args.out_dir, cfg, traj, elapsed, desc, checks=checks)
    failed = 0
    for name, value, threshold, ok in checks:
        mark = "PASS" if ok else "FAIL"
        print(f"[{name}] {mark} {value:.6g} vs {threshold:g}")
        failed += 0 if ok else 1
    if failed:
        print(f"{failed} check(s) failed")
        return 1
    print("all checks passed")
    return 0


def _parse_axis(spec):
    key, sep, rhs = spec.partition("=")
    key, rhs = key.strip(), rhs.strip()
    if not sep or key not in KNOWN_KEYS:
        raise ConfigError(f"sweep axis must be '<known key>=<values>', got {spec!r}")
    if "," in rhs:
        values = [v.strip() for v in rhs.split(",") if v.strip()]
    elif rhs.count(":") == 2:
        lo_s, hi_s, step_s = rhs.split(":")
        lo, hi, step = (parse_scalar(x) for x in (lo_s, hi_s, step_s))
        for v in (lo, hi, step):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"sweep range {rhs!r} is not numeric")
        if step <= 0 or hi < lo:
            raise ConfigError(f"sweep range {rhs!r} must be lo:hi:step, step > 0")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        values = [f"{lo + k * step:.12g}" for k in range(count)]
    else:
        values = [rhs]
    if not values:
        raise ConfigError(f"sweep axis {spec!r} produced no values")
    return key, values


def _sweep_worker(raw, key, value, out_dir):
    raw = dict(raw)
    raw[key] = value
    cfg = Config(raw)
    traj, elapsed, desc = run_problem(cfg)
    _write_outputs(out_dir, cfg, traj, elapsed, desc)
    led = traj.ledger
    return {
        "value": value,
        "out_dir": out_dir,
        "e_total_initial": float(led.e_total[0]),
        "e_total_final": float(led.e_total[-1]),
        "e_minus_final": float(led.e_minus[-1]),
        "e_plus_final": float(led.e_plus[-1]),
        "conservation_drift": led.conservation_drift(),
        "seconds": elapsed,
    }


def cmd_sweep(args):
    raw = load_config(args.config)
    Config(raw)  # validate the base config before forking anything
    key, values = _parse_axis(args.axis)
    os.makedirs(args.out_dir, exist_ok=True)
    jobs = []
    for value in values:
        sub = os.path.join(args.out_dir, f"{key}={value.replace('/', '_')}")
        jobs.append((raw, key, value, sub))
    workers = os.environ.get("NLW_THREADS")
    workers = int(workers) if workers else (os.cpu_count() or 1)
    workers = max(1, min(workers, len(jobs)))
    if workers == 1:
        results = [_sweep_worker(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_worker, *zip(*jobs)))
    table = os.path.join(args.out_dir, "sweep.csv")
    cols = [
        key,
        "e_total_initial",
        "e_total_final",
        "e_minus_final",
        "e_plus_final",
        "conservation_drift",
        "seconds",
        "out_dir",
    ]
    with open(table, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for row in results:
            writer.writerow(
                [row["value"]]
                + [f"{row[c]:.12g}" for c in cols[1:-1]]
                + [row["out_dir"]]
            )
    for row in results:
        print(
            f"{key}={row['value']}: E(t_max)={row['e_total_final']:.6g} "
            f"E_minus={row['e_minus_final']:.6g} [{row['seconds']:.2f}s]"
        )
    print(f"wrote {table}")
    return 0


def _fraction(text):
    v = parse_scalar(text)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    return float(v)


def cmd_appendix(args):
    report, traj = run_appendix_example(
        p=args.p,
        kappa=args.kappa,
        c=args.c,
        h=args.h,
        t_max=args.t_max,
        r_max=args.r_max,
    )
    os.makedirs(args.out_dir, exist_ok=True)
    env = traj.envelope
    ray_series = [("sup ratio (3c envelope)", env.t, env.max_ratio)]
    for k, off in enumerate(env.ray_offsets):
        ray_series.append((f"|w|/(c r^b) on r=1+t+{off:g}", env.t, env.ray_ratio[k]))
    env_path = os.path.join(args.out_dir, "envelope_rays.svg")
    line_plot(
        env_path,
        ray_series,
        title="exterior envelope and ray profiles",
        xlabel="t",
        ylabel="ratio",
    )
    led = traj.ledger
    decay_path = os.path.join(args.out_dir, "energy_decay.svg")
    line_plot(
        decay_path,
        [
            ("E_minus (r<=1)", led.t, led.radii[1.0][1]),
            ("E_plus (r<=1)", led.t, led.radii[1.0][2]),
            ("E_minus (r<=t/4)", led.t, led.radii["t/4"][1]),
            ("y2p", led.t, led.y2p),
        ],
        title="localized channel decay",
        xlabel="t",
        ylabel="mass",
        loglog=True,
    )
    report["artifacts"] = {"envelope_rays": env_path, "energy_decay": decay_path}
    write_json(os.path.join(args.out_dir, "report.json"), _jsonable(report))

    envr = report["envelope"]
    verdict = "holds" if envr["holds"] else "FAILS"
    print(
        f"envelope {verdict}: peak ratio {envr['peak_ratio']:.4g} "
        f"(c = {envr['c']:.6g})"
    )
    mass = report["channel_mass"]
    if mass["divergent"]:
        print("weighted channel mass: divergent at this kappa (as expected "
              "above the admissible range)")
    else:
        print(f"weighted channel mass: K = {mass['k']:.6g}")
    rates = report["scattering_rates"]
    lp = rates["lp_l2p"]
    if lp["exponent"] is None:
        print("tail norm exponent: too few dyadic start times to fit "
              "(extend t-max)")
    else:
        qualifier = "" if lp["tails_converged"] else ", truncated (no tail)"
        print(
            f"tail norm exponent {lp['exponent']:+.4f} "
            f"(predicted floor {lp['predicted_exponent']:+.4f}, "
            f"r^2 = {lp['r_squared']:.4f}{qualifier})"
        )
    ext = rates["exterior_growth"]
    if ext["slope"] is None:
        print("exterior norm: too few dyadic sample times to fit (extend t-max)")
    else:
        print(
            f"exterior norm V(T) ~ {ext['offset']:.4g} + {ext['slope']:.4g} "
            f"log(1+T) (r^2 = {ext['r_squared']:.4f})"
        )
    print(f"wrote {args.out_dir}/report.json")
    return 0


def cmd_fit(args):
    try:
        with open(args.csv, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as err:
        raise ConfigError(f"cannot read {args.csv}: {err}") from err
    if not rows:
        raise ConfigError(f"{args.csv} has no data rows")
    for col in (args.x, args.y):
        if col not in rows[0]:
            raise ConfigError(
                f"column {col!r} not in {args.csv} "
                f"(have: {', '.join(rows[0].keys())})"
            )
    x = np.array([float(row[args.x]) for row in rows])
    y = np.array([float(row[args.y]) for row in rows])
    mask = np.ones(x.size, dtype=bool)
    if args.t_min is not None:
        mask &= x >= args.t_min
    if args.t_max is not None:
        mask &= x <= args.t_max
    x, y = x[mask], y[mask]
    if args.log_growth:
        fit = fit_log_growth(x, y)
        print(
            f"{args.y} ~ {fit.offset:.6g} + {fit.slope:.6g} * log(1 + {args.x}) "
            f"(r^2 = {fit.r_squared:.6f}, {x.size} points)"
        )
    else:
        keep = x > 0  # a power law cannot include the t = 0 row
        if not keep.all():
            print(f"ignoring {int((~keep).sum())} row(s) with {args.x} <= 0")
        fit = fit_power_law(x[keep], y[keep])
        print(
            f"{args.y} ~ {fit.amplitude:.6g} * {args.x}^{fit.exponent:+.6g} "
            f"(r^2 = {fit.r_squared:.6f}, {fit.n_points} points)"
        )
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="nlw",
        description="energy-channel laboratory for the radial defocusing "
        "semilinear wave equation",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evolve a configured problem")
    p_run.add_argument("config")
    p_run.add_argument("--out-dir", default="nlw-out")

    p_ver = sub.add_parser("verify", help="run plus bookkeeping checks")
    p_ver.add_argument("config")
    p_ver.add_argument("--out-dir", default="nlw-out")

    p_sw = sub.add_parser("sweep", help="repeat a run along one config axis")
    p_sw.add_argument("config")
    p_sw.add_argument(
        "axis", help="key=lo:hi:step or key=v1,v2,... (e.g. grid.h=1/64,1/128)"
    )
    p_sw.add_argument("--out-dir", default="nlw-sweep")

    p_ap = sub.add_parser("appendix", help="slow-decay power-law example study")
    p_ap.add_argument("--p", type=_fraction, required=True)
    p_ap.add_argument("--kappa", type=_fraction, required=True)
    p_ap.add_argument(
        "--c", type=_fraction, default=None,
        help="tail amplitude; default: half the empirical envelope threshold",
    )
    p_ap.add_argument("--h", type=_fraction, default=1.0 / 128.0)
    p_ap.add_argument("--t-max", type=_fraction, default=64.0)
    p_ap.add_argument("--r-max", type=_fraction, default=None)
    p_ap.add_argument("--out-dir", default="nlw-appendix")

    p_fit = sub.add_parser("fit", help="fit a power law to ledger columns")
    p_fit.add_argument("csv")
    p_fit.add_argument("--x", default="t")
    p_fit.add_argument("--y", required=True)
    p_fit.add_argument("--t-min", type=_fraction, default=None)
    p_fit.add_argument("--t-max", type=_fraction, default=None)
    p_fit.add_argument(
        "--log-growth", action="store_true",
        help="fit a + b log(1+x) instead of a power law",
    )
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    handlers = {
        "run": cmd_run,
        "verify": cmd_verify,
        "sweep": cmd_sweep,
        "appendix": cmd_appendix,
        "fit": cmd_fit,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except NlwError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
