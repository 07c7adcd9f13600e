"""Config-driven experiments: each runner turns an ExperimentConfig into CSV rows
(and optional SVG plots) under an output directory.

Config files are flat ``key = value`` lines with dotted section names; ``#``
starts a comment. Lists are comma separated.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from aniso import counterexamples as cx
from aniso import norms, quadrature, solvers
from aniso.fitting import loglog_fit
from aniso.multipliers import SpaceParams, SymbolSpec
from aniso.spectral import make_grid, random_field, write_field_csv

EXPERIMENTS = (
    "threshold-scan",
    "feps-scaling",
    "rotation-witness",
    "algebra-witness",
    "embedding-sweep",
    "product-sweep",
    "solve-linear",
    "solve-nonlinear",
    "region-map",
)
STOCHASTIC = {"embedding-sweep", "product-sweep", "solve-linear", "solve-nonlinear"}
WORKERS_ENV = "ANISO_WORKERS"


class ConfigError(ValueError):
    """Malformed or incomplete configuration (a usage error)."""


# ---------------------------------------------------------------------------
# config


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def geometric_schedule(values, name: str = "schedule") -> np.ndarray:
    """Validate a geometric sequence of at least 4 positive points."""
    v = np.asarray(values, float)
    if v.size < 4:
        raise ConfigError(f"{name} needs at least 4 points, got {v.size}")
    if np.any(v <= 0):
        raise ConfigError(f"{name} must be positive")
    q = v[1:] / v[:-1]
    if not np.allclose(q, q[0], rtol=1e-9) or q[0] == 1:
        raise ConfigError(f"{name} is not geometric")
    return v


@dataclass
class ExperimentConfig:
    experiment: str
    params: Optional[SpaceParams] = None
    n: tuple = (32,)
    L: float = 8.0
    seed: Optional[int] = None
    schedules: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    out_dir: Path = Path("out")

    def option(self, key: str, default=None, cast: Callable = str):
        if key not in self.options:
            if default is None:
                raise ConfigError(f"missing config key {key!r}")
            return default
        try:
            return cast(self.options[key])
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {self.options[key]!r}") from exc

    def floats(self, key: str, default=None) -> list:
        raw = self.options.get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"missing config key {key!r}")
            return list(default)
        try:
            return [float(x) for x in raw.split(",") if x.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad list for {key!r}: {raw!r}") from exc

    def require_params(self) -> SpaceParams:
        if self.params is None:
            raise ConfigError("config needs params.s, params.r, params.delta and params.d")
        return self.params

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError(f"experiment {self.experiment!r} is stochastic and needs a seed")
        return self.seed


def _schedule(kv: dict, name: str) -> Optional[np.ndarray]:
    prefix = f"schedule.{name}"
    if prefix in kv:
        return geometric_schedule([float(x) for x in kv[prefix].split(",")], prefix)
    keys = [f"{prefix}.start", f"{prefix}.ratio", f"{prefix}.count"]
    if not any(k in kv for k in keys):
        return None
    try:
        start, ratio, count = float(kv[keys[0]]), float(kv[keys[1]]), int(kv[keys[2]])
    except KeyError as exc:
        raise ConfigError(f"{prefix} needs start, ratio and count") from exc
    except ValueError as exc:
        raise ConfigError(f"{prefix}: bad number") from exc
    return geometric_schedule(start * ratio ** np.arange(count), prefix)


def build_config(kv: dict, experiment: str, seed: Optional[int] = None, out_dir=None) -> ExperimentConfig:
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    named = kv.get("experiment")
    if named is not None and named != experiment:
        raise ConfigError(f"config is for {named!r}, not {experiment!r}")
    kv = dict(kv)
    params = None
    pkeys = [f"params.{k}" for k in ("s", "r", "delta", "d")]
    if all(k in kv for k in pkeys):
        try:
            params = SpaceParams(float(kv["params.s"]), float(kv["params.r"]), float(kv["params.delta"]),
                                 int(kv["params.d"]))
        except ValueError as exc:
            raise ConfigError(f"bad params: {exc}") from exc
    elif any(k in kv for k in pkeys):
        raise ConfigError("params needs all of s, r, delta and d")
    try:
        n = tuple(int(x) for x in kv.get("grid.n", "32").split(","))
        L = float(kv.get("grid.L", "8"))
        cfg_seed = int(kv["seed"]) if "seed" in kv else None
    except ValueError as exc:
        raise ConfigError(f"bad grid or seed: {exc}") from exc
    if seed is not None:
        cfg_seed = seed
    if cfg_seed is not None and not 0 <= cfg_seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    schedules = {}
    for name in ("eps", "rho_min"):
        sch = _schedule(kv, name)
        if sch is not None:
            schedules[name] = sch
    out = Path(out_dir if out_dir is not None else kv.get("output.dir", "out"))
    known = set(pkeys) | {"experiment", "grid.n", "grid.L", "seed", "output.dir"}
    options = {k: v for k, v in kv.items() if k not in known and not k.startswith("schedule.")}
    return ExperimentConfig(experiment, params, n, L, cfg_seed, schedules, options, out)


def load_config(path, experiment: str, seed: Optional[int] = None, out_dir=None) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    return build_config(parse_config_text(text), experiment, seed, out_dir)


# ---------------------------------------------------------------------------
# helpers


def workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn, items) -> list:
    """Order-preserving map over a thread pool sized by ANISO_WORKERS."""
    items = list(items)
    k = workers()
    if k == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_metadata(cfg: ExperimentConfig, files):
    meta = {
        "experiment": cfg.experiment,
        "seed": cfg.seed,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "files": sorted(str(f.name) for f in files),
    }
    (cfg.out_dir / "metadata.json").write_text(json.dumps(meta, indent=2) + "\n")


def loglog_plot(path: Path, series: dict, xlabel: str, ylabel: str, title: str):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "aniso"
    fig, ax = plt.subplots(figsize=(5, 4))
    for label, (x, y) in series.items():
        x = np.asarray(x, float)
        y = np.abs(np.asarray(y, float))
        ok = (x > 0) & (y > 0)
        ax.loglog(x[ok], y[ok], marker="o", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


FIT_HEADER = ["quantity", "slope", "intercept", "r_squared", "points"]


def _fit_row(name, fit):
    return [name, fit.slope, fit.intercept, fit.r_squared, fit.points]


# ---------------------------------------------------------------------------
# runners; each returns the list of files written


def run_threshold_scan(cfg: ExperimentConfig, plots: bool) -> list:
    kind = cfg.option("scan.kind", "low_freq")
    if kind not in quadrature.INTEGRAL_KINDS:
        raise ConfigError(f"scan.kind must be one of {sorted(quadrature.INTEGRAL_KINDS)}")
    rho = cfg.schedules.get("rho_min")
    if rho is None:
        raise ConfigError("threshold-scan needs schedule.rho_min")
    R = cfg.option("scan.R", 1.0, float)
    if "scan.cases" in cfg.options:
        cases = []
        for chunk in cfg.options["scan.cases"].split(";"):
            try:
                d, r, delta = (float(x) for x in chunk.split(","))
            except ValueError as exc:
                raise ConfigError(f"scan.cases entries are d,r,delta triples: {chunk!r}") from exc
            cases.append((int(d), r, delta))
    else:
        p = cfg.require_params()
        cases = [(p.d, p.r, p.delta)]
    fn = quadrature.INTEGRAL_KINDS[kind]
    rows, fits, curves = [], [], {}
    for d, r, delta in cases:
        vals = pmap(lambda x: fn(d, r, delta, R, float(x)), rho)
        rows += [[kind, d, r, delta, x, v] for x, v in zip(rho, vals)]
        fit = quadrature.divergence_exponent_scan(kind, {"d": d, "r": r, "delta": delta, "R": R}, rho)
        fits.append(_fit_row(f"{kind}(d={d},r={r:g},delta={delta:g})", fit))
        curves[f"d={d} r={r:g} delta={delta:g}"] = (rho, vals)
    out = cfg.out_dir
    files = [out / "threshold.csv", out / "fit.csv"]
    write_csv(files[0], ["kind", "d", "r", "delta", "rho_min", "value"], rows)
    write_csv(files[1], FIT_HEADER, fits)
    if plots:
        files.append(out / "threshold.svg")
        loglog_plot(files[-1], curves, "rho_min", "value", f"{kind} cutoff integrals")
    return files


def run_feps_scaling(cfg: ExperimentConfig, plots: bool) -> list:
    p = cfg.require_params()
    eps = cfg.schedules.get("eps")
    if eps is None:
        raise ConfigError("feps-scaling needs schedule.eps")
    res = pmap(lambda e: cx.feps_norms(float(e), p), eps)
    out = cfg.out_dir
    files = [out / "feps.csv", out / "fit.csv"]
    write_csv(files[0], ["eps", "l1", "l2", "x_norm"], [[e, r.l1, r.l2, r.x_norm] for e, r in zip(eps, res)])
    fits = [_fit_row(q, loglog_fit(eps, [getattr(r, q) for r in res])) for q in ("l1", "l2", "x_norm")]
    write_csv(files[1], FIT_HEADER, fits)
    if plots:
        files.append(out / "feps.svg")
        loglog_plot(files[-1], {q: (eps, [getattr(r, q) for r in res]) for q in ("l1", "l2", "x_norm")},
                    "eps", "norm", "F_eps norms")
    return files


WITNESS_HEADER = ["family", "parameter", "term_index_or_m", "value"]


def run_rotation_witness(cfg: ExperimentConfig, plots: bool) -> list:
    p = cfg.require_params()
    plane = [int(x) - 1 for x in cfg.option("rotation.plane", "1,2").split(",")]
    if len(plane) != 2 or plane[0] == plane[1] or not all(0 <= i < p.d for i in plane):
        raise ConfigError("rotation.plane must name two distinct axes in 1..d")
    angle = cfg.option("rotation.angle_deg", 90.0, float)
    terms = cfg.option("rotation.terms", 12, int)
    q = cx.RotationSpec.plane_rotation(p.d, plane[0], plane[1], math.radians(angle))
    table = cx.rotation_witness(q, p, terms)
    rows = []
    for name in table.SERIES:
        rows += [[f"rotation-{name}", angle, k, v] for k, v in zip(table.k, getattr(table, name))]
    ratio_rows = []
    for name in table.SERIES:
        ratio_rows += [[f"rotation-{name}-log4ratio", angle, k, v] for k, v in zip(table.k[1:], table.log4_ratios(name))]
    out = cfg.out_dir
    files = [out / "witness.csv", out / "ratios.csv"]
    write_csv(files[0], WITNESS_HEADER, rows)
    write_csv(files[1], WITNESS_HEADER, ratio_rows)
    if plots:
        files.append(out / "witness.svg")
        loglog_plot(files[-1], {n: (4.0**table.k, getattr(table, n)) for n in table.SERIES},
                    "4^k", "term", "rotation witness series")
    return files


def run_algebra_witness(cfg: ExperimentConfig, plots: bool) -> list:
    r = cfg.option("witness.r", 0.9, float)
    delta = cfg.option("witness.delta", 2.5, float)
    ms = [int(x) for x in cfg.floats("witness.m", range(2, 9))]
    if len(ms) < 4:
        raise ConfigError("witness.m needs at least 4 values")
    ratios = pmap(lambda m: cx.algebra_witness_ratio(m, r, delta), ms)
    out = cfg.out_dir
    files = [out / "witness.csv", out / "fit.csv"]
    write_csv(files[0], WITNESS_HEADER, [["algebra", delta, m, v] for m, v in zip(ms, ratios)])
    fit = loglog_fit(2.0 ** np.asarray(ms), ratios, base=2.0)
    write_csv(files[1], FIT_HEADER, [_fit_row("log2_ratio_vs_m", fit)])
    if plots:
        files.append(out / "witness.svg")
        loglog_plot(files[-1], {"ratio": (2.0 ** np.asarray(ms), ratios)}, "2^m", "ratio", "algebra witness")
    return files


SWEEP_HEADER = ["d", "s", "r", "delta", "n", "L", "seed", "statistic", "value"]


def _sweep_rng(seed: int, n: int) -> np.random.Generator:
    return np.random.default_rng([seed, n])


def embedding_statistics(p: SpaceParams, n: int, L: float, seed: int, count: int, tau: float) -> dict:
    grid = make_grid(p.d, n, L)
    rng = _sweep_rng(seed, n)
    decay = p.s + p.d / 2 + 1
    l1, der = [], []
    for _ in range(count):
        f = random_field(grid, decay, rng)
        l1.append(norms.fourier_l1_bound_ratio(f, p))
        der.append(norms.derivative_ratio(f, p, tau))
    return {"fourier_l1_max": max(l1), "fourier_l1_mean": float(np.mean(l1)),
            "derivative_max": max(der), "derivative_mean": float(np.mean(der))}


def product_statistics(p: SpaceParams, n: int, L: float, seed: int, count: int) -> dict:
    grid = make_grid(p.d, n, L)
    rng = _sweep_rng(seed, n)
    decay = p.s + p.d / 2 + 1
    vals = []
    for _ in range(count):
        f = random_field(grid, decay, rng, band_limited=True)
        g = random_field(grid, decay, rng, band_limited=True)
        vals.append(norms.product_ratio_Hs(f, g, p))
    return {"product_max": max(vals), "product_mean": float(np.mean(vals))}


def _run_sweep(cfg: ExperimentConfig, plots: bool, stat_fn, name: str) -> list:
    p = cfg.require_params()
    seed = cfg.require_seed()
    stats = pmap(lambda n: stat_fn(p, n, cfg.L, seed), cfg.n)
    rows = []
    for n, st in zip(cfg.n, stats):
        rows += [[p.d, p.s, p.r, p.delta, n, cfg.L, seed, k, v] for k, v in st.items()]
    out = cfg.out_dir
    files = [out / f"{name}.csv"]
    write_csv(files[0], SWEEP_HEADER, rows)
    if plots and len(cfg.n) > 1:
        files.append(out / f"{name}.svg")
        keys = list(stats[0])
        loglog_plot(files[-1], {k: (cfg.n, [st[k] for st in stats]) for k in keys}, "n", "ratio", name)
    return files


def run_embedding_sweep(cfg: ExperimentConfig, plots: bool) -> list:
    p = cfg.require_params()
    count = cfg.option("sweep.count", 500, int)
    tau = cfg.option("sweep.tau", p.delta - p.r, float)
    return _run_sweep(cfg, plots, lambda p, n, L, seed: embedding_statistics(p, n, L, seed, count, tau), "embedding")


def run_product_sweep(cfg: ExperimentConfig, plots: bool) -> list:
    count = cfg.option("sweep.count", 500, int)
    return _run_sweep(cfg, plots, lambda p, n, L, seed: product_statistics(p, n, L, seed, count), "product")


def _symbol(cfg: ExperimentConfig) -> SymbolSpec:
    kind = cfg.option("solver.symbol", "fractional-power")
    if kind == "fractional-power":
        return SymbolSpec.fractional_power(cfg.option("solver.symbol_delta", cfg.require_params().delta, float))
    if kind == "gravity-tanh":
        return SymbolSpec.gravity_tanh()
    raise ConfigError("solver.symbol must be fractional-power or gravity-tanh")


def _series(cfg: ExperimentConfig, key: str, default: str) -> solvers.PowerSeries:
    coeffs = [float(x) for x in cfg.option(key, default).split(",")]
    radius = cfg.option(key + "_radius", math.inf, float)
    try:
        return solvers.PowerSeries(tuple(coeffs), radius)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc


TRACE_HEADER = ["iteration", "residual", "damping"]


def run_solve_linear(cfg: ExperimentConfig, plots: bool) -> list:
    p = cfg.require_params()
    seed = cfg.require_seed()
    gamma = cfg.option("solver.gamma", 1.0, float)
    beta = cfg.option("solver.beta", 1.0, float)
    spec = _symbol(cfg)
    grid = make_grid(p.d, cfg.n[0], cfg.L)
    f = random_field(grid, p.s + p.d / 2 + 1, _sweep_rng(seed, grid.n))
    u = solvers.solve_linear(f, gamma, beta, spec)
    back = solvers.apply_forward(u, solvers.LinearForm(gamma, beta, spec))
    resid = norms.weighted_norm(back - f, norms.IntersectionWeight(p.s, p.r))
    ratio = norms.weighted_norm(u, norms.XWeight(p.with_s(p.s + spec.sigma))) / norms.weighted_norm(
        f, norms.IntersectionWeight(p.s, p.r))
    out = cfg.out_dir
    files = [out / "trace.csv", out / "summary.csv", out / "f.csv", out / "u.csv"]
    write_csv(files[0], TRACE_HEADER, [[0, resid, ""]])
    write_csv(files[1], ["statistic", "value"], [["roundtrip_residual", resid], ["norm_ratio", ratio]])
    write_field_csv(f, files[2])
    write_field_csv(u, files[3])
    return files


def _form(cfg: ExperimentConfig):
    kind = cfg.option("solver.form", "composition")
    gamma = cfg.option("solver.gamma", 1.0, float)
    zeta = _series(cfg, "solver.zeta", "1,1")
    if kind == "composition":
        return solvers.CompositionForm(gamma, zeta, _series(cfg, "solver.psi", "1,0,0.16666666666666666"), _symbol(cfg))
    if kind == "divergence":
        psi = None if cfg.options.get("solver.psi", "1") == "0" else _series(cfg, "solver.psi", "1,0,0.16666666666666666")
        return solvers.DivergenceForm(gamma, cfg.require_params().delta, zeta, psi)
    raise ConfigError("solver.form must be composition or divergence")


def run_solve_nonlinear(cfg: ExperimentConfig, plots: bool) -> list:
    p = cfg.require_params()
    seed = cfg.require_seed()
    form = _form(cfg)
    amp = cfg.option("solver.amplitude", 1e-2, float)
    opts = solvers.NewtonOptions(
        max_iterations=cfg.option("solver.max_iterations", 50, int),
        tolerance=cfg.option("solver.tolerance", 1e-12, float),
        damping=cfg.option("solver.damping", 1.0, float),
        jacobian=cfg.option("solver.jacobian", "frozen"),
        s=p.s, r=p.r)
    grid = make_grid(p.d, cfg.n[0], cfg.L)
    ustar = random_field(grid, p.s + p.d / 2 + 1, _sweep_rng(seed, grid.n), band_limited=True)
    ustar = ustar * (amp / float(np.max(np.abs(ustar.physical()))))
    f = solvers.apply_forward(ustar, form)
    u, trace = solvers.solve_nonlinear(f, form, opts)
    err = norms.weighted_norm(u - ustar, norms.XWeight(p.with_s(p.s + form.sigma)))
    out = cfg.out_dir
    files = [out / "trace.csv", out / "summary.csv", out / "f.csv", out / "u.csv", out / "u_exact.csv"]
    write_csv(files[0], TRACE_HEADER, trace.rows())
    write_csv(files[1], ["statistic", "value"],
              [["converged", trace.converged], ["iterations", trace.iterations], ["error_x_norm", err]])
    write_field_csv(f, files[2])
    write_field_csv(u, files[3])
    write_field_csv(ustar, files[4])
    if plots:
        files.append(out / "trace.svg")
        loglog_plot(files[-1], {"residual": (np.arange(1, len(trace.residuals) + 1), trace.residuals)},
                    "iteration + 1", "residual", "Newton residuals")
    return files


REGION_HEADER = ["d", "s", "r", "delta", "is_complete", "embeds_Hs", "is_algebra", "schwartz_included"]


def region_lattice(ds, rs, deltas, s_offset: float = 1.0):
    rows = []
    for d in ds:
        for r in rs:
            for delta in deltas:
                p = SpaceParams(d / 2 + s_offset, float(r), float(delta), int(d))
                rows.append([p.d, p.s, p.r, p.delta, p.is_complete, p.embeds_Hs, p.is_algebra, p.schwartz_included])
    return rows


def run_region_map(cfg: ExperimentConfig, plots: bool) -> list:
    ds = [int(x) for x in cfg.floats("lattice.d", [2, 3])]
    rs = np.linspace(cfg.option("lattice.r_min", -1.0, float), cfg.option("lattice.r_max", 2.0, float),
                     cfg.option("lattice.r_count", 31, int))
    deltas = np.linspace(cfg.option("lattice.delta_min", 1.0, float), cfg.option("lattice.delta_max", 4.0, float),
                         cfg.option("lattice.delta_count", 31, int))
    rows = region_lattice(ds, rs, deltas, cfg.option("lattice.s_offset", 1.0, float))
    out = cfg.out_dir
    files = [out / "region.csv"]
    write_csv(files[0], REGION_HEADER, rows)
    if plots:
        files += region_plots(out, rows, ds)
    return files


def region_plots(out: Path, rows, ds) -> list:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "aniso"
    files = []
    arr = np.array([[r[0], r[2], r[3], r[4], r[6]] for r in rows], float)
    for d in ds:
        sel = arr[arr[:, 0] == d]
        fig, ax = plt.subplots(figsize=(5, 4))
        code = sel[:, 3] + sel[:, 4]
        ax.scatter(sel[:, 1], sel[:, 2], c=code, cmap="viridis", s=12, vmin=0, vmax=2)
        ax.set_xlabel("r")
        ax.set_ylabel("delta")
        ax.set_title(f"d={d}: 0 incomplete, 1 complete, 2 algebra")
        fig.tight_layout()
        path = out / f"region_d{d}.svg"
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        files.append(path)
    return files


RUNNERS = {
    "threshold-scan": run_threshold_scan,
    "feps-scaling": run_feps_scaling,
    "rotation-witness": run_rotation_witness,
    "algebra-witness": run_algebra_witness,
    "embedding-sweep": run_embedding_sweep,
    "product-sweep": run_product_sweep,
    "solve-linear": run_solve_linear,
    "solve-nonlinear": run_solve_nonlinear,
    "region-map": run_region_map,
}


def run_experiment(cfg: ExperimentConfig, plots: bool = False) -> list:
    if cfg.experiment in STOCHASTIC:
        cfg.require_seed()
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    files = RUNNERS[cfg.experiment](cfg, plots)
    write_metadata(cfg, files)
    return files
