"""Experiment drivers: configs, orchestration, CSV and manifest output.

Each experiment wires the walk, trace, zipper, variation and stats
modules into one comparison and writes its results as plain CSV files
plus a manifest and a summary of headline numbers.  Runs are
deterministic given (config, seed): the SAW stages checkpoint both the
chain and the partial observable arrays, so a resumed run is
bit-identical to an uninterrupted one.
"""

from __future__ import annotations

import configparser
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__ as _pkg_version
from .curves import ParamCurve
from .loewner import sample_endpoints, sample_trace
from .stats import (cdf_grid, covariance_profile, ecdf, moment_estimates,
                    normalize_by_mean, polar_arrays)
from .variation import (TraceExhausted, intersection_estimate,
                        time_at_variation, var_cap, var_no, var_p_uniform,
                        variance_vs_dt, variation_times)
from .walks import PivotChain, init_walk, scaled_path
from .zipper import CapacityProfile, ZipperError, zip_curve, zip_points

OUTPUT_ROOT_ENV = "SAWSLE_OUTPUT_ROOT"

SYSTEMATIC_NOTE = ("errors quoted in outputs are statistical only; "
                   "finite walk length, finite map count and finite lattice "
                   "spacing contribute systematic errors that are not "
                   "quantified here")


class ConfigError(ValueError):
    """Invalid configuration (bad key, bad value, unknown experiment)."""


# ----------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------

_COMMON_DEFAULTS = {
    "seed": 0,
    "output_dir": "",
    "kappa": 8.0 / 3.0,
    "nu": 0.75,
    "p": 4.0 / 3.0,
    "horizon": 1.0,
    "batches": 100,
    "checkpoint_every": 500,
    "equilibrate_accepted": 0,       # 0 = automatic (see _burn_in)
    "grid_times": 50,
}

# per-experiment defaults on top of the common ones (desk scale)
_EXPERIMENT_DEFAULTS = {
    "fix_time": {
        "saw_n": 100_000, "saw_n_prime": 20_000,
        "samples": 10_000, "observe_every": 1_000,
        "sle_maps": 10_000, "sle_samples": 10_000,
    },
    "fix_cap": {
        "saw_n": 10_000, "saw_n_prime": 10_000,
        "samples": 5_000, "observe_every": 100,
        "sle_maps": 10_000, "sle_samples": 100_000,
        "cap_prefix": 0.1,
    },
    "fix_cap_covar": {
        "saw_n": 10_000, "saw_n_prime": 10_000,
        "samples": 5_000, "observe_every": 100,
        "sle_maps": 4_000, "sle_samples": 5_000, "stride": 4,
        "cap_prefix": 0.1,
    },
    "fix_fvar_covar": {
        "saw_n": 20_000, "saw_n_prime": 20_000,
        "samples": 5_000, "observe_every": 100,
        "sle_maps": 4_000, "sle_samples": 5_000, "stride": 4,
        "dt_match": 0.02,
    },
    "saw_fvar": {
        "saw_n": 100_000, "saw_n_prime": 100_000,
        "samples": 10_000, "observe_every": 100,
        "dts": "0.01 0.02 0.04",
    },
    "saw_fvar_variance": {
        "saw_n": 10_000, "saw_n_prime": 10_000,
        "samples": 2_000, "observe_every": 100,
        "dts": "0.01 0.02 0.04", "include_cap": 1,
    },
    "saw_cp_fvar": {
        "saw_n": 10_000, "saw_n_prime": 10_000,
        "samples": 3_000, "observe_every": 100,
        "dts": "0.02 0.04 0.08",
    },
    "fix_fvar": {
        "saw_n": 100_000, "saw_n_prime": 100_000,
        "samples": 5_000, "observe_every": 100,
        "sle_maps": 10_000, "sle_samples": 5_000, "stride": 5,
        "dts": "0.02 0.04",
    },
}


class ExperimentConfig:
    """Typed parameter bundle for one experiment section."""

    def __init__(self, name: str, overrides: dict | None = None,
                 soft_overrides: dict | None = None):
        if name not in _EXPERIMENT_DEFAULTS:
            raise ConfigError(
                f"unknown experiment {name!r}; valid names: "
                + ", ".join(sorted(_EXPERIMENT_DEFAULTS)))
        self.name = name
        self.params = dict(_COMMON_DEFAULTS)
        self.params.update(_EXPERIMENT_DEFAULTS[name])
        # soft overrides (the [DEFAULT] section) apply only where the key
        # exists for this experiment; section-own keys are checked strictly
        for key, raw in (soft_overrides or {}).items():
            if key in self.params:
                self.params[key] = self._coerce(key, raw)
        overrides = dict(overrides or {})
        # `iterations` is accepted as an alternative to `samples`
        iterations = overrides.pop("iterations", None)
        for key, raw in overrides.items():
            if key not in self.params:
                raise ConfigError(f"unknown key {key!r} for experiment {name}")
            self.params[key] = self._coerce(key, raw)
        if iterations is not None:
            spacing = self.params["observe_every"]
            self.params["samples"] = int(iterations) // spacing
        self._validate()

    def _coerce(self, key, raw):
        ref = self.params[key]
        if isinstance(ref, int):
            return int(raw)
        if isinstance(ref, float):
            return float(raw)
        return str(raw)

    def _validate(self):
        p = self.params
        for key, val in p.items():
            if isinstance(val, (int, float)) and key not in ("seed",):
                if key in ("equilibrate_accepted",):
                    if val < 0:
                        raise ConfigError(f"{key} must be >= 0")
                elif val <= 0:
                    raise ConfigError(f"{key} must be positive, got {val}")
        if p["kappa"] > 4.0:
            raise ConfigError("kappa must be <= 4 (simple-trace regime)")
        if abs(p["nu"] * p["p"] - 1.0) > 1e-9:
            raise ConfigError("nu * p must equal 1")
        if "saw_n_prime" in p and p["saw_n_prime"] > p["saw_n"]:
            raise ConfigError("saw_n_prime cannot exceed saw_n")
        if "dts" in p:
            dts = self.dts
            if len(dts) != len(set(dts)):
                raise ConfigError("dts must be distinct")
            if self.name == "saw_fvar_variance" and len(dts) < 3:
                raise ConfigError("saw_fvar_variance needs at least three "
                                  "dt values for the variance-slope fit")

    def __getitem__(self, key):
        return self.params[key]

    @property
    def dts(self) -> list[float]:
        return [float(tok) for tok in str(self.params["dts"]).replace(",", " ").split()]

    @classmethod
    def sections_from_file(cls, path) -> list["ExperimentConfig"]:
        parser = configparser.ConfigParser()
        try:
            read = parser.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config: {exc}") from exc
        if not read:
            raise ConfigError(f"cannot read config file {path}")
        if not parser.sections():
            raise ConfigError("config has no experiment sections")
        soft = dict(parser.defaults())
        out = []
        for section in parser.sections():
            own = {k: v for k, v in parser[section].items() if k not in soft
                   or parser[section][k] != soft[k]}
            out.append(cls(section, own, soft))
        return out


def list_experiments() -> list[str]:
    return sorted(_EXPERIMENT_DEFAULTS)


# ----------------------------------------------------------------------
# output plumbing
# ----------------------------------------------------------------------

def _output_dir(cfg: ExperimentConfig) -> Path:
    root = cfg["output_dir"] or os.environ.get(OUTPUT_ROOT_ENV, "runs")
    out = Path(root) / f"{cfg.name}-seed{cfg['seed']}"
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".10g")


def _write_manifest(outdir: Path, cfg: ExperimentConfig, runtime: float,
                    extra: dict | None = None) -> None:
    import numba
    import scipy
    lines = [
        "sawsle experiment manifest",
        f"experiment = {cfg.name}",
    ]
    for key in sorted(cfg.params):
        lines.append(f"{key} = {_fmt(cfg.params[key])}")
    lines += [
        f"version.python = {sys.version.split()[0]}",
        f"version.numpy = {np.__version__}",
        f"version.scipy = {scipy.__version__}",
        f"version.numba = {numba.__version__}",
        f"version.sawsle = {_pkg_version}",
        f"runtime_seconds = {runtime:.1f}",
        f"note = {SYSTEMATIC_NOTE}",
    ]
    if extra:
        for key in sorted(extra):
            lines.append(f"{key} = {_fmt(extra[key])}")
    (outdir / "manifest.txt").write_text("\n".join(lines) + "\n")


def _write_summary(outdir: Path, summary: dict) -> None:
    lines = [f"{key} = {_fmt(summary[key])}" for key in summary]
    (outdir / "summary.txt").write_text("\n".join(lines) + "\n")


def _write_cdf(outdir: Path, name: str, grid, F) -> None:
    _write_csv(outdir / f"{name}.csv", ["x", "F"], zip(grid, F))


def _write_cdf_diff(outdir: Path, name: str, grid, diff, err) -> None:
    _write_csv(outdir / f"{name}.csv", ["x", "dF", "stderr"],
               zip(grid, diff, err))


def _write_covariance(outdir: Path, name: str, profiles: dict) -> None:
    rows = []
    for (i, j), prof in profiles.items():
        for t, v, e in zip(prof.times, prof.values, prof.stderr):
            rows.append((t, v, e, i, j))
    _write_csv(outdir / f"{name}.csv", ["t", "value", "stderr", "i", "j"], rows)


# ----------------------------------------------------------------------
# statistics helpers
# ----------------------------------------------------------------------

def _cdf_batched(samples, grid, n_batches) -> tuple[np.ndarray, np.ndarray]:
    """ECDF on a grid with batched-means stderr (correlated chains)."""
    samples = np.asarray(samples, dtype=float)
    n_batches = min(n_batches, len(samples) // 2)
    size = len(samples) // n_batches
    used = samples[:n_batches * size].reshape(n_batches, size)
    F_b = np.stack([np.searchsorted(np.sort(b), grid, side="right") / size
                    for b in used])
    F = F_b.mean(axis=0)
    err = F_b.std(axis=0, ddof=1) / np.sqrt(n_batches)
    return F, err


def _cdf_iid(samples, grid) -> tuple[np.ndarray, np.ndarray]:
    """ECDF on a grid with the iid binomial stderr (independent samples)."""
    samples = np.sort(np.asarray(samples, dtype=float))
    F = np.searchsorted(samples, grid, side="right") / len(samples)
    err = np.sqrt(F * (1.0 - F) / len(samples))
    return F, err


def _cdf_comparison(saw_vals, sle_vals, n_batches):
    """Grids, CDFs and difference band for one observable."""
    grid = cdf_grid([ecdf(saw_vals), ecdf(sle_vals)])
    F_saw, e_saw = _cdf_batched(saw_vals, grid, n_batches)
    F_sle, e_sle = _cdf_iid(sle_vals, grid)
    diff = F_saw - F_sle
    err = np.sqrt(e_saw ** 2 + e_sle ** 2)
    return grid, F_saw, F_sle, diff, err


def _burn_in(cfg: ExperimentConfig) -> int:
    """Accepted pivots discarded before observing.

    The conservative default of 20n accepted pivots is kept up to
    n = 20000; beyond that the initialization bias of the slowest
    observables tracked here (the variation estimators) decays within
    about 3n accepted moves, so 6n is safe while 20n would dominate
    the runtime budget.
    """
    if cfg["equilibrate_accepted"]:
        return cfg["equilibrate_accepted"]
    n = cfg["saw_n"]
    return 20 * n if n <= 20_000 else max(6 * n, 400_000)


def _spawn(cfg: ExperimentConfig, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(
        entropy=cfg["seed"], spawn_key=(stream,)))


# ----------------------------------------------------------------------
# SAW sampling stage with checkpoint/resume
# ----------------------------------------------------------------------

def _run_saw_stage(cfg: ExperimentConfig, outdir: Path, tag: str,
                   store: dict, record) -> dict:
    """Drive the pivot chain, recording store arrays via `record`.

    record(walk, index, store) fills row `index` of every array in
    `store`.  The chain state plus partial arrays are checkpointed every
    cfg.checkpoint_every observations; if checkpoints exist the stage
    resumes, reproducing the uninterrupted run bit for bit.

    A walk whose near-self-touches defeat the zipper in double
    precision (ZipperError) leaves NaN in its row; callers drop such
    rows.  The count accumulates in store["skipped"].
    """
    store.setdefault("skipped", np.zeros((), dtype=np.int64))
    n_obs = cfg["samples"]
    spacing = cfg["observe_every"]
    ck_chain = outdir / f"{tag}.chain.ckpt"
    ck_data = outdir / f"{tag}.partial.npz"
    done = 0
    if ck_chain.exists() and ck_data.exists():
        chain = PivotChain.load_checkpoint(ck_chain)
        saved = np.load(ck_data)
        done = int(saved["done"])
        for key in store:
            arr = saved[key]
            if arr.ndim:
                store[key][:len(arr)] = arr
            else:
                store[key][()] = arr
    else:
        rng = _spawn(cfg, 0)
        chain = PivotChain(init_walk(cfg["saw_n"]), rng)
        chain.equilibrate(_burn_in(cfg))
    chunk = cfg["checkpoint_every"]
    while done < n_obs:
        m = min(chunk, n_obs - done)
        idx = done

        def observe(walk):
            nonlocal idx
            try:
                record(walk, idx, store)
            except ZipperError:
                for key, arr in store.items():
                    if arr.ndim:
                        arr[idx] = np.nan
                store["skipped"] += 1
            idx += 1

        chain.run(m * spacing, spacing, observe)
        done = idx
        chain.save_checkpoint(ck_chain)
        np.savez(ck_data, done=done, **store)
    return store


def _finite_rows(arr: np.ndarray) -> np.ndarray:
    """Mask of rows untouched by a skipped (NaN-marked) observation."""
    finite = np.isfinite(arr)
    return finite if arr.ndim == 1 else finite.all(axis=1)


def _zip_prefix(curve: ParamCurve, budget: float) -> tuple[CapacityProfile, float]:
    """Capacity profile of the curve's prefix up to hcap = budget.

    Feeds roughly the first half of the points first (the prefix takes
    about a third of them) and falls back to the full curve when the
    budget is not reached.
    """
    n = len(curve.points)
    head = max(2, int(0.55 * n))
    for pts, params in ((curve.points[:head], curve.params[:head]),
                        (curve.points, curve.params)):
        knots, caps = zip_points(pts, capacity_budget=budget)
        h = np.cumsum(caps)
        if h[-1] >= budget:
            s = np.concatenate(([0.0], params[knots]))
            hh = np.concatenate(([0.0], h))
            return CapacityProfile(s, hh), h[-1]
    raise TraceExhausted(
        f"curve exhausted before reaching capacity {budget}")


# ----------------------------------------------------------------------
# experiments
# ----------------------------------------------------------------------

def exp_fix_time(cfg: ExperimentConfig, outdir: Path) -> dict:
    """R and Theta of the natural-time SAW endpoint against SLE at t=1."""
    n_prime, nu = cfg["saw_n_prime"], cfg["nu"]
    scale = n_prime ** -nu

    def record(walk, i, store):
        store["end"][i] = (walk.x[n_prime] + 1j * walk.y[n_prime]) * scale

    store = {"end": np.zeros(cfg["samples"], dtype=complex)}
    _run_saw_stage(cfg, outdir, "saw", store, record)
    saw_end = store["end"]

    sle_end = sample_endpoints(cfg["kappa"], cfg["sle_maps"], cfg["horizon"],
                               cfg["sle_samples"], _spawn(cfg, 1))
    b, b_err = moment_estimates(saw_end, cfg["batches"])
    c, c_err = moment_estimates(sle_end)
    a = b / c
    # reparameterize the SLE to t' = a * t^{2 nu}; at t = 1 this scales
    # the endpoint by sqrt(a)
    sle_end = np.sqrt(a) * sle_end

    r_saw, th_saw = polar_arrays(saw_end)
    r_sle, th_sle = polar_arrays(sle_end)
    r_saw = normalize_by_mean(r_saw)
    r_sle = normalize_by_mean(r_sle)

    summary = {"a": a, "b": b, "b_stderr": b_err, "c": c, "c_stderr": c_err}
    for name, s_vals, g_vals in (("R", r_saw, r_sle), ("Theta", th_saw, th_sle)):
        grid, F_saw, F_sle, diff, err = _cdf_comparison(s_vals, g_vals,
                                                        cfg["batches"])
        _write_cdf(outdir, f"cdf_{name}_saw", grid, F_saw)
        _write_cdf(outdir, f"cdf_{name}_sle", grid, F_sle)
        _write_cdf_diff(outdir, f"cdf_diff_{name}", grid, diff, err)
        summary[f"sup_diff_{name}"] = np.abs(diff).max()
    return summary


def exp_fix_cap(cfg: ExperimentConfig, outdir: Path) -> dict:
    """R and Theta of the capacity-time SAW endpoint against SLE at t=1."""
    n_prime, nu = cfg["saw_n_prime"], cfg["nu"]
    budget = cfg["cap_prefix"]
    r = np.sqrt(2.0 * cfg["horizon"] / budget)

    def record(walk, i, store):
        curve = scaled_path(walk, n_prime, nu)
        profile, _ = _zip_prefix(curve, budget)
        s1 = profile.time_at_capacity(budget)
        store["end"][i] = r * curve.point_at(s1)
        store["frac"][i] = s1

    store = {"end": np.zeros(cfg["samples"], dtype=complex),
             "frac": np.zeros(cfg["samples"])}
    _run_saw_stage(cfg, outdir, "saw", store, record)
    keep = _finite_rows(store["end"])

    sle_end = sample_endpoints(cfg["kappa"], cfg["sle_maps"], cfg["horizon"],
                               cfg["sle_samples"], _spawn(cfg, 1))
    r_saw, th_saw = polar_arrays(store["end"][keep])
    r_sle, th_sle = polar_arrays(sle_end)

    summary = {"mean_prefix_fraction": store["frac"][keep].mean(),
               "mean_R_sle": r_sle.mean(),
               "mean_R_saw": r_saw.mean(),
               "skipped_self_touch": int(store["skipped"])}
    for name, s_vals, g_vals in (("R", r_saw, r_sle), ("Theta", th_saw, th_sle)):
        grid, F_saw, F_sle, diff, err = _cdf_comparison(s_vals, g_vals,
                                                        cfg["batches"])
        _write_cdf(outdir, f"cdf_{name}_saw", grid, F_saw)
        _write_cdf(outdir, f"cdf_{name}_sle", grid, F_sle)
        _write_cdf_diff(outdir, f"cdf_diff_{name}", grid, diff, err)
        summary[f"sup_diff_{name}"] = np.abs(diff).max()
    return summary


def _intersection_or_nan(cdfs) -> tuple[float, float]:
    """intersection_estimate, or NaNs when the CDFs never cross (which
    happens at very small sample counts)."""
    try:
        return intersection_estimate(cdfs)
    except ValueError:
        return float("nan"), float("nan")


def _covariances(grid_times, points, endpoint, n_batches) -> dict:
    return {(i, j): covariance_profile(grid_times, points, endpoint, i, j,
                                       n_batches)
            for (i, j) in ((1, 1), (2, 2))}


def _vertical_scale(profiles: dict) -> float:
    return max(np.abs(prof.values).max() for prof in profiles.values())


def exp_fix_cap_covar(cfg: ExperimentConfig, outdir: Path) -> dict:
    """Covariance profiles with both curves in capacity time."""
    n_prime, nu = cfg["saw_n_prime"], cfg["nu"]
    budget = cfg["cap_prefix"]
    horizon = cfg["horizon"]
    r = np.sqrt(2.0 * horizon / budget)
    n_grid = cfg["grid_times"]
    grid_times = np.arange(1, n_grid + 1) / n_grid * horizon

    def record(walk, i, store):
        curve = scaled_path(walk, n_prime, nu)
        profile, _ = _zip_prefix(curve, budget)
        # hcap(omega-hat[0,t]) = 2t after rescale <=> hcap = t*budget before
        s = np.interp(grid_times * budget, profile.h, profile.s)
        store["pts"][i] = r * curve.point_at(s)

    store = {"pts": np.zeros((cfg["samples"], n_grid), dtype=complex)}
    _run_saw_stage(cfg, outdir, "saw", store, record)
    saw_pts = store["pts"][_finite_rows(store["pts"])]
    saw_cov = _covariances(grid_times, saw_pts, saw_pts[:, -1], cfg["batches"])
    _write_covariance(outdir, "covariance_saw", saw_cov)

    rng = _spawn(cfg, 1)
    sle_pts = np.zeros((cfg["sle_samples"], n_grid), dtype=complex)
    for i in range(cfg["sle_samples"]):
        trace = sample_trace(cfg["kappa"], cfg["sle_maps"], horizon, rng,
                             stride=cfg["stride"])
        sle_pts[i] = trace.as_curve().point_at(grid_times)
    sle_cov = _covariances(grid_times, sle_pts, sle_pts[:, -1], cfg["batches"])
    _write_covariance(outdir, "covariance_sle", sle_cov)

    return {"vertical_scale_saw": _vertical_scale(saw_cov),
            "vertical_scale_sle": _vertical_scale(sle_cov),
            "skipped_self_touch": int(store["skipped"])}


def exp_fix_fvar_covar(cfg: ExperimentConfig, outdir: Path) -> dict:
    """Covariance profiles with the SAW in natural time and the SLE in
    matched variation time."""
    n_prime, nu = cfg["saw_n_prime"], cfg["nu"]
    horizon = cfg["horizon"]
    dt = cfg["dt_match"]
    n_grid = cfg["grid_times"]
    grid_times = np.arange(1, n_grid + 1) / n_grid * horizon

    def record(walk, i, store):
        curve = scaled_path(walk, n_prime, nu)
        store["pts"][i] = curve.point_at(grid_times)
        store["rate"][i] = var_no(curve, dt, nu, horizon).value

    store = {"pts": np.zeros((cfg["samples"], n_grid), dtype=complex),
             "rate": np.zeros(cfg["samples"])}
    _run_saw_stage(cfg, outdir, "saw", store, record)
    saw_pts = store["pts"]
    rate = store["rate"].mean()
    saw_cov = _covariances(grid_times, saw_pts, saw_pts[:, -1], cfg["batches"])
    _write_covariance(outdir, "covariance_saw", saw_cov)

    rng = _spawn(cfg, 1)
    sle_pts = np.zeros((cfg["sle_samples"], n_grid), dtype=complex)
    resampled = 0
    n_maps = cfg["sle_maps"]
    i = 0
    while i < cfg["sle_samples"]:
        trace = sample_trace(cfg["kappa"], n_maps, horizon, rng,
                             stride=cfg["stride"])
        curve = trace.as_curve()
        try:
            v = variation_times(curve, grid_times, dt, rate, nu)
        except TraceExhausted:
            resampled += 1
            continue
        sle_pts[i] = curve.point_at(v)
        i += 1
    sle_cov = _covariances(grid_times, sle_pts, sle_pts[:, -1], cfg["batches"])
    _write_covariance(outdir, "covariance_sle", sle_cov)

    return {"rate_var_no": rate,
            "resampled_traces": resampled,
            "vertical_scale_saw": _vertical_scale(saw_cov),
            "vertical_scale_sle": _vertical_scale(sle_cov)}


def exp_saw_fvar(cfg: ExperimentConfig, outdir: Path) -> dict:
    """Distributions of var and var_no for the SAW over a dt grid."""
    n_prime, nu, p = cfg["saw_n_prime"], cfg["nu"], cfg["p"]
    horizon = cfg["horizon"]
    dts = cfg.dts

    def record(walk, i, store):
        curve = scaled_path(walk, n_prime, nu)
        for k, dt in enumerate(dts):
            store["var"][i, k] = var_p_uniform(curve, p, dt, horizon).value
            store["var_no"][i, k] = var_no(curve, dt, nu, horizon).value

    shape = (cfg["samples"], len(dts))
    store = {"var": np.zeros(shape), "var_no": np.zeros(shape)}
    _run_saw_stage(cfg, outdir, "saw", store, record)

    summary = {}
    rows = []
    for kind in ("var", "var_no"):
        cdfs = []
        for k, dt in enumerate(dts):
            vals = store[kind][:, k]
            rows.extend((kind, p, dt, v) for v in vals)
            cdfs.append((dt, ecdf(vals)))
            grid = cdf_grid([cdfs[-1][1]])
            F, _ = _cdf_batched(vals, grid, cfg["batches"])
            _write_cdf(outdir, f"cdf_{kind}_dt{dt:g}", grid, F)
        value, spread = _intersection_or_nan(cdfs)
        summary[f"intersection_{kind}"] = value
        summary[f"intersection_{kind}_spread"] = spread
    _write_csv(outdir / "samples.csv", ["kind", "p", "dt", "value"], rows)
    return summary


def exp_saw_fvar_variance(cfg: ExperimentConfig, outdir: Path) -> dict:
    """Variance of the variation estimators versus dt, with slopes."""
    n_prime, nu, p = cfg["saw_n_prime"], cfg["nu"], cfg["p"]
    horizon = cfg["horizon"]
    dts = cfg.dts
    with_cap = bool(cfg["include_cap"])

    def record(walk, i, store):
        curve = scaled_path(walk, n_prime, nu)
        if with_cap:
            _, profile = zip_curve(curve)
        for k, dt in enumerate(dts):
            store["var"][i, k] = var_p_uniform(curve, p, dt, horizon).value
            store["var_no"][i, k] = var_no(curve, dt, nu, horizon).value
            if with_cap:
                store["var_cap"][i, k] = var_cap(curve, profile, dt, p,
                                                 horizon).value

    shape = (cfg["samples"], len(dts))
    kinds = ["var", "var_no"] + (["var_cap"] if with_cap else [])
    store = {kind: np.zeros(shape) for kind in kinds}
    _run_saw_stage(cfg, outdir, "saw", store, record)
    keep = _finite_rows(store["var"])

    summary = {"skipped_self_touch": int(store["skipped"])}
    rows = []
    for kind in kinds:
        groups = {dt: store[kind][keep, k] for k, dt in enumerate(dts)}
        table, slope = variance_vs_dt(groups)
        rows.extend((kind, dt, v) for dt, v in table)
        summary[f"slope_{kind}"] = slope
    _write_csv(outdir / "variance.csv", ["kind", "dt", "variance"], rows)
    return summary


def exp_saw_cp_fvar(cfg: ExperimentConfig, outdir: Path) -> dict:
    """Distribution of var_cap (capacity-time variation) for the SAW."""
    n_prime, nu, p = cfg["saw_n_prime"], cfg["nu"], cfg["p"]
    horizon = cfg["horizon"]
    dts = cfg.dts

    def record(walk, i, store):
        curve = scaled_path(walk, n_prime, nu)
        _, profile = zip_curve(curve)
        for k, dt in enumerate(dts):
            store["var_cap"][i, k] = var_cap(curve, profile, dt, p,
                                             horizon).value

    store = {"var_cap": np.zeros((cfg["samples"], len(dts)))}
    _run_saw_stage(cfg, outdir, "saw", store, record)
    kept = store["var_cap"][_finite_rows(store["var_cap"])]

    rows = []
    cdfs = []
    for k, dt in enumerate(dts):
        vals = kept[:, k]
        rows.extend(("var_cap", p, dt, v) for v in vals)
        cdfs.append((dt, ecdf(vals)))
        grid = cdf_grid([cdfs[-1][1]])
        F, _ = _cdf_batched(vals, grid, cfg["batches"])
        _write_cdf(outdir, f"cdf_var_cap_dt{dt:g}", grid, F)
    _write_csv(outdir / "samples.csv", ["kind", "p", "dt", "value"], rows)
    value, spread = _intersection_or_nan(cdfs)
    return {"intersection_var_cap": value,
            "intersection_var_cap_spread": spread,
            "skipped_self_touch": int(store["skipped"])}


def exp_fix_fvar(cfg: ExperimentConfig, outdir: Path) -> dict:
    """R and Theta of the natural-time SAW endpoint against SLE in matched
    variation time, for each dt in the grid."""
    n_prime, nu = cfg["saw_n_prime"], cfg["nu"]
    horizon = cfg["horizon"]
    dts = cfg.dts

    def record(walk, i, store):
        curve = scaled_path(walk, n_prime, nu)
        store["end"][i] = curve.point_at(horizon)
        for k, dt in enumerate(dts):
            store["rate"][i, k] = var_no(curve, dt, nu, horizon).value

    store = {"end": np.zeros(cfg["samples"], dtype=complex),
             "rate": np.zeros((cfg["samples"], len(dts)))}
    _run_saw_stage(cfg, outdir, "saw", store, record)
    r_saw, th_saw = polar_arrays(store["end"])
    rates = store["rate"].mean(axis=0)

    rng = _spawn(cfg, 1)
    summary = {}
    for k, dt in enumerate(dts):
        n_maps = cfg["sle_maps"]
        v1 = np.zeros(cfg["sle_samples"])
        end = np.zeros(cfg["sle_samples"], dtype=complex)
        resampled = 0
        i = 0
        while i < cfg["sle_samples"]:
            trace = sample_trace(cfg["kappa"], n_maps, horizon, rng,
                                 stride=cfg["stride"])
            curve = trace.as_curve()
            try:
                v = time_at_variation(curve, horizon, dt, nu, rates[k])
            except TraceExhausted:
                resampled += 1
                continue
            v1[i] = v
            end[i] = curve.point_at(v)
            i += 1
        r_sle, th_sle = polar_arrays(end)
        for name, s_vals, g_vals in (("R", r_saw, r_sle),
                                     ("Theta", th_saw, th_sle)):
            grid, F_saw, F_sle, diff, err = _cdf_comparison(
                s_vals, g_vals, cfg["batches"])
            _write_cdf_diff(outdir, f"cdf_diff_{name}_dt{dt:g}", grid, diff,
                            err)
            summary[f"sup_diff_{name}_dt{dt:g}"] = np.abs(diff).max()
        summary[f"rate_var_no_dt{dt:g}"] = rates[k]
        summary[f"mean_V1_dt{dt:g}"] = v1.mean()
        summary[f"mean_hcap_at_V1_dt{dt:g}"] = 2.0 * v1.mean()
        summary[f"resampled_traces_dt{dt:g}"] = resampled
    return summary


_RUNNERS = {
    "fix_time": exp_fix_time,
    "fix_cap": exp_fix_cap,
    "fix_cap_covar": exp_fix_cap_covar,
    "fix_fvar_covar": exp_fix_fvar_covar,
    "saw_fvar": exp_saw_fvar,
    "saw_fvar_variance": exp_saw_fvar_variance,
    "saw_cp_fvar": exp_saw_cp_fvar,
    "fix_fvar": exp_fix_fvar,
}


def _write_config_echo(outdir: Path, cfg: ExperimentConfig) -> None:
    lines = [f"[{cfg.name}]"]
    lines += [f"{key} = {_fmt(cfg.params[key])}" for key in sorted(cfg.params)]
    (outdir / "config.echo").write_text("\n".join(lines) + "\n")


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Run one configured experiment; returns its artifact directory."""
    outdir = _output_dir(cfg)
    _write_config_echo(outdir, cfg)
    start = time.time()
    summary = _RUNNERS[cfg.name](cfg, outdir)
    _write_summary(outdir, summary)
    _write_manifest(outdir, cfg, time.time() - start)
    return outdir


def run(config_path) -> list[Path]:
    """Run every experiment section of a config file."""
    outdirs = []
    for cfg in ExperimentConfig.sections_from_file(config_path):
        outdirs.append(run_experiment(cfg))
    return outdirs


def resume(checkpoint_path) -> Path:
    """Resume an interrupted run from its artifact directory.

    Accepts the artifact directory or any checkpoint file inside it; the
    configuration is recovered from the manifest written at submission
    time, or, if the run died before the manifest, from config.echo.
    """
    path = Path(checkpoint_path)
    outdir = path if path.is_dir() else path.parent
    echo = outdir / "config.echo"
    if not echo.exists():
        raise ConfigError(f"no config.echo found in {outdir}")
    cfgs = ExperimentConfig.sections_from_file(echo)
    if len(cfgs) != 1:
        raise ConfigError("config.echo must contain exactly one section")
    return run_experiment(cfgs[0])
