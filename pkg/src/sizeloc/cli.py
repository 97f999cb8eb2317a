"""Command-line front end.

Exit codes: 0 ok, 2 config error, 3 data error, 4 numerical degeneracy.

Settings resolve as built-in defaults < ``--config`` file < explicit flags.
Config files are TOML or JSON with keys named like the long flags
(``directions``, ``n_grid``, ...). Every output file carries the seed,
a config hash and the library version.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__
from . import io as sio
from .applications import IntervalDataset, IntervalRow, fit, robust_feasible
from .decomposition import SeriesProfiles, quadrature_steiner, support_matrix
from .dependence import COMPONENTS, REPORT_COLUMNS, lag_corr_sweep, report
from .errors import ConfigError, DataError, DegeneracyError, SizeLocError
from .geometry import Polygon2D, body_from_dict, body_to_dict, steiner_exact
from .limits import (
    chebyshev_check,
    halving_ratios,
    lln_decay_sweep,
    make_grid,
    mse_rate_sweep,
)
from .process import (
    SCENARIOS,
    AR1Params,
    build_scenario,
    disc_profiles,
    gaussian_pair_profiles,
    gen_disc_radii,
    replication_seed,
    scenario_from_dict,
)

S4_ALPHAS = (0.0, 0.25, 0.5, 0.75, 1.0)
TABLE_COLUMNS = ("corr_size", "corr_loc_res", "corr_steiner", "corr_loc")
EXAMPLE_TRIANGLE = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))

COMMON_DEFAULTS = {"seed": 0, "out": ".", "directions": 256, "grid": "equal_angle"}

DEFAULTS = {
    "scenario": {"scenario": "S1", "alpha": None, "alphas": list(S4_ALPHAS), "reps": 200, "n": 2000,
                 "center_ar": None, "shape_ar": None, "orientation_ar": None, "base_vertices": None,
                 "shape_clamp": None},
    "estimate": {"input": None, "input_y": None},
    "decay": {"n_grid": [64, 128, 256, 512, 1024, 2048, 4096], "reps": 100, "component": "size",
              "phi": 0.6, "innovation_sd": 0.3, "mean": 2.0, "directions": 16},
    "mse-rate": {"n_grid": [200, 400], "m_grid": [64, 128], "reps": 200, "component": "loc",
                 "cov_diag": [1.0, 1.0], "rho": 0.5},
    "mixing": {"n": 10000, "lags": [1, 2, 3, 4, 5], "phi": 0.6, "innovation_sd": 0.3, "mean": 2.0,
               "directions": 16},
    "regress": {"input": None},
    "robust": {"input": None},
    "steiner": {"input": None},
}

HELP = {
    "scenario": "simulate scenarios S1-S4 and tabulate correlations over replications",
    "estimate": "dependence report for two body series given as JSON lines",
    "decay": "LLN decay sweep and Chebyshev check on an AR(1) disc series",
    "mse-rate": "MSE of the integrated covariance estimator on an (n, M) grid",
    "mixing": "lagged-correlation mixing proxy for an AR(1) disc series",
    "regress": "midpoint/radius interval regression from a CSV dataset",
    "robust": "robust feasibility of x under interval-valued constraints",
    "steiner": "exact and quadrature Steiner point of a convex body",
}


def _int_list(s: str) -> list[int]:
    return [int(v) for v in s.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sizeloc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"sizeloc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in DEFAULTS:
        p = sub.add_parser(name, help=HELP[name], description=HELP[name])
        p.add_argument("--config", help="TOML or JSON file with settings")
        p.add_argument("--seed", type=int, help="base seed (default 0)")
        p.add_argument("--out", help="output directory (default .)")
        p.add_argument("--directions", type=int, metavar="M", help="number of direction nodes")
        p.add_argument("--grid", choices=("equal_angle", "random"))
        if name in ("scenario", "decay", "mse-rate"):
            p.add_argument("--reps", type=int)
        if name in ("decay", "mse-rate"):
            p.add_argument("--component", choices=COMPONENTS)
        if name == "scenario":
            p.add_argument("--scenario", choices=SCENARIOS)
            p.add_argument("--alpha", type=float, help="S4 mixing weight; omit for the alpha sweep")
            p.add_argument("--n", type=int)
        if name in ("estimate", "regress", "robust", "steiner"):
            p.add_argument("--input", help="input file")
        if name == "estimate":
            p.add_argument("--input-y", dest="input_y", help="second series (JSON lines)")
        if name in ("decay", "mse-rate"):
            p.add_argument("--n-grid", dest="n_grid", type=_int_list, help="comma-separated lengths")
        if name == "mse-rate":
            p.add_argument("--m-grid", dest="m_grid", type=_int_list, help="comma-separated node counts")
            p.add_argument("--rho", type=float)
        if name in ("decay", "mixing"):
            p.add_argument("--phi", type=float)
        if name == "mixing":
            p.add_argument("--n", type=int)
            p.add_argument("--lags", type=_int_list, help="comma-separated lags")
    return parser


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    cfg = {**COMMON_DEFAULTS, **DEFAULTS[command]}
    if args.config:
        data = sio.load_config(args.config)
        unknown = sorted(set(data) - set(cfg) - {"config"})
        if unknown:
            raise ConfigError(f"{args.config}: unknown field(s) {unknown} for command '{command}'")
        cfg.update(data)
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        cfg[key] = value
    for key in ("seed", "directions"):
        if not isinstance(cfg[key], int) or isinstance(cfg[key], bool):
            raise ConfigError(f"field '{key}' must be an integer, got {cfg[key]!r}")
    if cfg["seed"] < 0 or cfg["seed"] >= 2**64:
        raise ConfigError(f"field 'seed' must be an unsigned 64-bit integer, got {cfg['seed']}")
    if cfg["grid"] not in ("equal_angle", "random"):
        raise ConfigError(f"field 'grid' must be 'equal_angle' or 'random', got {cfg['grid']!r}")
    if "reps" in cfg and (not isinstance(cfg["reps"], int) or cfg["reps"] < 1):
        raise ConfigError(f"field 'reps' must be a positive integer, got {cfg['reps']!r}")
    if "component" in cfg and cfg["component"] not in COMPONENTS:
        raise ConfigError(f"field 'component' must be one of {COMPONENTS}, got {cfg['component']!r}")
    return cfg


def _grid(cfg: dict):
    try:
        # random directions get their own stream so they never collide with process streams
        seed = int(np.random.SeedSequence(cfg["seed"], spawn_key=(2000,)).generate_state(1)[0])
        return make_grid(cfg["grid"], cfg["directions"], seed)
    except ValueError as exc:
        raise ConfigError(f"field 'directions': {exc}") from None


class Writer:
    def __init__(self, command: str, cfg: dict):
        self.out = Path(cfg["out"])
        # the output location is not part of the experiment, so it stays out of the hash
        hashed = {k: v for k, v in cfg.items() if k != "out"}
        self.meta = sio.make_meta(command, hashed, cfg["seed"])
        self.written: list[Path] = []

    def _path(self, name: str) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        p = self.out / name
        self.written.append(p)
        return p

    def json(self, name: str, payload: dict) -> None:
        sio.write_json(self._path(name), payload, self.meta)

    def csv(self, name: str, header, rows) -> None:
        sio.write_csv(self._path(name), header, rows, self.meta)


def _mean_sd(values: list) -> tuple[Optional[float], Optional[float]]:
    vals = [v for v in values if v is not None]
    if not vals:
        return None, None
    m = math.fsum(vals) / len(vals)
    if len(vals) < 2:
        return m, None
    return m, math.sqrt(math.fsum((v - m) ** 2 for v in vals) / (len(vals) - 1))


def _scenario_config(cfg: dict, sid: str, alpha) -> dict:
    data = {"id": sid, "n": cfg["n"], "seed": cfg["seed"]}
    if alpha is not None:
        data["alpha"] = alpha
    for key in ("center_ar", "shape_ar", "orientation_ar", "base_vertices", "shape_clamp"):
        if cfg.get(key) is not None:
            data[key] = cfg[key]
    return data


def run_scenario(cfg: dict) -> Writer:
    sid = cfg["scenario"]
    if sid not in SCENARIOS:
        raise ConfigError(f"field 'scenario' must be one of {SCENARIOS}, got {sid!r}")
    alphas = [None]
    if sid == "S4":
        alphas = [cfg["alpha"]] if cfg["alpha"] is not None else [float(a) for a in cfg["alphas"]]
    ds = _grid(cfg)
    w = Writer("scenario", cfg)
    rep_rows, plot_rows, summary = [], [], []
    for alpha in alphas:
        base = scenario_from_dict(_scenario_config(cfg, sid, alpha))
        reports = []
        for rep in range(cfg["reps"]):
            rs = replication_seed(cfg["seed"], rep)
            sc = scenario_from_dict({**_scenario_config(cfg, sid, alpha), "seed": rs})
            xs, ys = build_scenario(sc)
            r = report(SeriesProfiles.from_bodies(xs, ds), SeriesProfiles.from_bodies(ys, ds)).to_dict()
            reports.append(r)
            rep_rows.append([sid, alpha, rep, rs] + [r[c] for c in REPORT_COLUMNS])
            plot_rows.append([sid, alpha, rep] + [r[c] for c in TABLE_COLUMNS])
        row = {"scenario": sid, "alpha": alpha, "reps": cfg["reps"], "n": base.n, "M": ds.size}
        for c in TABLE_COLUMNS:
            row[f"{c}_mean"], row[f"{c}_sd"] = _mean_sd([r[c] for r in reports])
        summary.append(row)
    w.csv("reports.csv", ["scenario", "alpha", "rep", "rep_seed", *REPORT_COLUMNS], rep_rows)
    w.csv("plot_corr_by_rep.csv", ["scenario", "alpha", "rep", *TABLE_COLUMNS], plot_rows)
    cols = list(summary[0])
    w.csv("summary.csv", cols, [[row[c] for c in cols] for row in summary])
    w.json("summary.json", {"directions": ds.to_dict(), "rows": summary})
    if sid == "S4" and len(alphas) > 1:
        w.csv("plot_alpha_sweep.csv", ["alpha", *TABLE_COLUMNS],
              [[row["alpha"]] + [row[f"{c}_mean"] for c in TABLE_COLUMNS] for row in summary])
    return w


def _require_input(cfg: dict, key: str = "input") -> str:
    if not cfg.get(key):
        raise ConfigError(f"field '{key}' is required for this command")
    return cfg[key]


def run_estimate(cfg: dict) -> Writer:
    xs = sio.read_bodies_jsonl(_require_input(cfg))
    ys = sio.read_bodies_jsonl(_require_input(cfg, "input_y"))
    ds = _grid(cfg)
    rep = report(SeriesProfiles.from_bodies(xs, ds), SeriesProfiles.from_bodies(ys, ds))
    w = Writer("estimate", cfg)
    w.json("report.json", {"directions": ds.to_dict(), "report": rep.to_dict()})
    w.csv("directions.csv", ["ux", "uy", "weight"], [[u[0], u[1], wt] for u, wt in zip(ds.nodes, ds.weights)])
    return w


def _disc_ar(cfg: dict) -> AR1Params:
    try:
        return AR1Params(float(cfg["phi"]), float(cfg["innovation_sd"]), float(cfg["mean"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"disc AR(1) parameters: {exc}") from None


def _disc_generator(p: AR1Params, ds) -> Callable[[int, int], SeriesProfiles]:
    def gen(n: int, seed: int) -> SeriesProfiles:
        radii, _ = gen_disc_radii(p, n, seed)
        return disc_profiles(radii, ds)
    return gen


def run_decay(cfg: dict) -> Writer:
    ds, comp = _grid(cfg), cfg["component"]
    gen = _disc_generator(_disc_ar(cfg), ds)
    sweep = lln_decay_sweep(gen, cfg["n_grid"], cfg["reps"], comp, cfg["seed"])
    cheb = []
    for n, row in zip(sweep.n_grid, sweep.norms_sq):
        if sweep.degenerate or cfg["reps"] < 100:
            continue
        c = chebyshev_check(np.sqrt(row), 2.0 * math.sqrt(float(np.mean(row))))
        cheb.append({"n": n, "eps": c.eps, "empirical_prob": c.empirical_prob, "bound": c.bound,
                     "se": c.se, "violated": c.violated})
    w = Writer("decay", cfg)
    w.csv("decay.csv", ["comp", "n", "rep", "norm_sq"],
          [[comp, n, r, v] for n, row in zip(sweep.n_grid, sweep.norms_sq) for r, v in enumerate(row)])
    w.json("decay_summary.json", {
        "comp": comp, "n_grid": sweep.n_grid, "reps": sweep.reps,
        "mean_norm_sq": sweep.mean_norm_sq, "slope": None if sweep.degenerate else sweep.slope,
        "intercept": None if sweep.degenerate else sweep.intercept,
        "excluded_n": sweep.excluded, "degenerate": sweep.degenerate, "chebyshev": cheb,
    })
    return w


def run_mse(cfg: dict) -> Writer:
    comp = cfg["component"]
    diag, rho = [float(v) for v in cfg["cov_diag"]], float(cfg["rho"])
    if comp == "size":
        truth = 0.0
    else:
        # singletons: loc = tot = <u, xi>; Cov integrates to rho tr(D) / 2
        truth = rho * sum(diag) / 2.0
    cells = mse_rate_sweep(
        lambda n, ds, s: gaussian_pair_profiles(diag, rho, n, ds, s),
        truth, cfg["n_grid"], cfg["m_grid"], cfg["reps"], comp, cfg["grid"], cfg["seed"],
    )
    w = Writer("mse-rate", cfg)
    w.csv("mse_rate.csv", ["n", "M", "mse", "reps"], [[c.n, c.M, c.mse, c.reps] for c in cells])
    w.json("mse_rate_summary.json", {
        "comp": comp, "truth": truth, "grid": cfg["grid"],
        "cells": [{"n": c.n, "M": c.M, "mse": c.mse} for c in cells],
        "ratios_n": halving_ratios(cells, "n"), "ratios_M": halving_ratios(cells, "M"),
    })
    return w


def run_mixing(cfg: dict) -> Writer:
    p = _disc_ar(cfg)
    ds = _grid(cfg)
    radii, clamped = gen_disc_radii(p, int(cfg["n"]), cfg["seed"])
    rows = lag_corr_sweep(disc_profiles(radii, ds), cfg["lags"])
    w = Writer("mixing", cfg)
    w.csv("mixing.csv", ["k", "proxy_size", "proxy_loc", "proxy_tot", "phi_pow_k"],
          [[r["k"], r["proxy_size"], r["proxy_loc"], r["proxy_tot"], abs(p.phi) ** r["k"]] for r in rows])
    w.json("mixing_summary.json", {"phi": p.phi, "n": int(cfg["n"]), "clamped_radii": clamped, "rows": rows})
    return w


def bundled_dataset_path():
    return resources.files("sizeloc").joinpath("data/interval_synthetic.csv")


def run_regress(cfg: dict) -> Writer:
    path = cfg.get("input") or bundled_dataset_path()
    data = IntervalDataset.from_csv(path)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        f = fit(data)
    w = Writer("regress", cfg)
    w.json("fit.json", {"columns": list(data.columns), "n": data.n, **f.to_dict(),
                        "warnings": [str(c.message) for c in caught]})
    return w


def _read_json_input(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    except ValueError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from None


def run_robust(cfg: dict) -> Writer:
    doc = _read_json_input(_require_input(cfg))
    if not isinstance(doc, dict) or "rows" not in doc or "x" not in doc:
        raise DataError(f"{cfg['input']}: expected an object with 'rows' and 'x'")
    rows = [IntervalRow.from_dict(r) for r in doc["rows"]]
    res = robust_feasible(doc["x"], rows)
    w = Writer("robust", cfg)
    w.json("robust.json", {"x": [float(v) for v in doc["x"]], **res.to_dict()})
    return w


def run_steiner(cfg: dict) -> Writer:
    if cfg.get("input"):
        doc = _read_json_input(cfg["input"])
        # a bare {"vertices": [...]} is accepted as a polygon
        if isinstance(doc, dict) and "type" not in doc and "vertices" in doc:
            doc = {"type": "polygon", **doc}
        body = body_from_dict(doc)
    else:
        body = Polygon2D(EXAMPLE_TRIANGLE)
    exact = steiner_exact(body)
    payload = {"body": body_to_dict(body), "steiner_exact": exact}
    if body.dim == 2:
        ds = _grid(cfg)
        payload["directions"] = ds.to_dict()
        payload["steiner_quadrature"] = quadrature_steiner(support_matrix([body], ds)[0], ds)
    w = Writer("steiner", cfg)
    w.json("steiner.json", payload)
    return w


RUNNERS = {
    "scenario": run_scenario,
    "estimate": run_estimate,
    "decay": run_decay,
    "mse-rate": run_mse,
    "mixing": run_mixing,
    "regress": run_regress,
    "robust": run_robust,
    "steiner": run_steiner,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.command, args)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            w = RUNNERS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return exc.exit_code
    except DegeneracyError as exc:
        print(f"numerical degeneracy: {exc}", file=sys.stderr)
        return exc.exit_code
    except SizeLocError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    for p in w.written:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
