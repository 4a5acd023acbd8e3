"""Command-line interface.

Subcommands: simulate, aggregate, fit-mple, fit-dmh, diagnose, predict,
summarize, render, oracle.  Runs are driven by a JSON config file (paths
resolved relative to it); every subcommand writes a manifest with the
config echo, seed, and input digests so it can be re-run bit-exactly.
Exit codes: 0 success, 2 validation error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .acd import ACDConfig, diagnose
from .aggregation import AggregationSpec, aggregate, read_points_csv
from .dmh import ChainOutput, DMHConfig, ProposalSpec, default_blocks, run_dmh, tune_scales
from .errors import AutomrfError, ConfigError
from .gibbs import SweepSchedule, random_arrangement, sample
from .generators import (
    CarSpec,
    GpSpec,
    car_field,
    gp_mixture_sample,
    multinomial_logit_sample,
    simulate_covariates,
)
from .io import (
    DEFAULT_PALETTE,
    read_arrangement_csv,
    read_chain_csv,
    read_design_csv,
    sha256_file,
    write_arrangement_csv,
    write_chain_csv,
    write_design_csv,
    write_json,
    write_ppm,
)
from .lattice import GridSpec, build_regular_grid, read_edge_list
from .model import DesignMatrix, ModelSpec, Params, suff_stats
from .oracle import GridAxis, enumerate_table, exact_posterior_grid
from .priors import PriorSpec
from .pseudolikelihood import mple_fit
from .rng import STREAM_PREDICT, STREAM_SIM, substream
from .summaries import summarize_draws


def _load_config(path: str) -> tuple[dict, Path]:
    import json

    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if "seed" not in cfg or not isinstance(cfg["seed"], int):
        raise ConfigError("config requires an integer 'seed'")
    return cfg, p.parent


def _resolve(base: Path, rel: str) -> Path:
    p = Path(rel)
    return p if p.is_absolute() else base / p


def _out_dir(cfg: dict, base: Path, override: str | None) -> Path:
    out = Path(override) if override else _resolve(base, cfg.get("output_dir", "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _build_graph(model_cfg: dict, base: Path):
    grid = None
    if model_cfg.get("grid"):
        g = model_cfg["grid"]
        try:
            grid = GridSpec(int(g["rows"]), int(g["cols"]), g.get("connectivity", "rook"))
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad model.grid: {exc}") from exc
        graph = build_regular_grid(grid)
    elif model_cfg.get("edges_txt"):
        path = _resolve(base, model_cfg["edges_txt"])
        if not path.is_file():
            raise ConfigError(f"edge list not found: {path}")
        graph = read_edge_list(path, n_sites=model_cfg.get("n_sites"))
    else:
        raise ConfigError("model requires either 'grid' or 'edges_txt'")
    return graph, grid


def _build_design(model_cfg: dict, base: Path, n_sites: int) -> DesignMatrix:
    design_csv = model_cfg.get("design_csv")
    if design_csv:
        path = _resolve(base, design_csv)
        if not path.is_file():
            raise ConfigError(f"design matrix not found: {path}")
        design = read_design_csv(path)
        if design.n != n_sites:
            raise ConfigError(f"design has {design.n} rows for {n_sites} sites")
    else:
        design = DesignMatrix.empty(n_sites)
    if model_cfg.get("intercept", False):
        design = design.with_intercept()
    return design


def _build_model(cfg: dict, base: Path, need_arrangement: bool = True):
    model_cfg = cfg.get("model")
    if not isinstance(model_cfg, dict):
        raise ConfigError("config requires a 'model' section")
    if "n_classes" not in model_cfg:
        raise ConfigError("model requires 'n_classes'")
    graph, grid = _build_graph(model_cfg, base)
    design = _build_design(model_cfg, base, graph.n_sites)
    try:
        spec = ModelSpec(int(model_cfg["n_classes"]), graph, design)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    y = None
    inputs = {}
    if model_cfg.get("design_csv"):
        inputs["design_csv"] = str(_resolve(base, model_cfg["design_csv"]))
    if need_arrangement:
        arr = model_cfg.get("arrangement_csv")
        if not arr:
            raise ConfigError("model requires 'arrangement_csv' for this subcommand")
        path = _resolve(base, arr)
        if not path.is_file():
            raise ConfigError(f"arrangement not found: {path}")
        y, shape = read_arrangement_csv(path)
        if y.shape[0] != spec.n_sites:
            raise ConfigError(f"arrangement has {y.shape[0]} sites, model has {spec.n_sites}")
        if y.max() >= spec.n_classes:
            raise ConfigError("arrangement labels exceed n_classes")
        inputs["arrangement_csv"] = str(path)
    return spec, grid, y, inputs


def _prior_from(cfg: dict) -> PriorSpec:
    pc = cfg.get("prior", {})
    try:
        return PriorSpec.from_dict(pc)
    except ValueError as exc:
        raise ConfigError(f"bad prior: {exc}") from exc


def _dmh_config(cfg: dict, spec: ModelSpec, prior: PriorSpec, inner_sweeps: int | None = None) -> DMHConfig:
    dc = dict(cfg.get("dmh", {}))
    if "outer_iterations" not in dc:
        raise ConfigError("dmh section requires 'outer_iterations'")
    blocks = None
    if isinstance(dc.get("blocks"), list):
        blocks = [np.asarray(b, dtype=np.int64) for b in dc["blocks"]]
    try:
        return DMHConfig(
            outer_iterations=int(dc["outer_iterations"]),
            burn_in=int(dc.get("burn_in", 0)),
            thin=int(dc.get("thin", 1)),
            inner_sweeps=int(inner_sweeps if inner_sweeps is not None else dc.get("inner_sweeps", 8)),
            seed=int(cfg["seed"]),
            blocks=blocks,
            proposals=None,
            prior=prior,
            sweep_mode=dc.get("sweep_mode", "raster"),
        )
    except ValueError as exc:
        raise ConfigError(f"bad dmh section: {exc}") from exc


def _acd_config(cfg: dict) -> ACDConfig:
    ac = cfg.get("acd", {})
    try:
        return ACDConfig(
            aux_samples=int(ac.get("aux_samples", 500)),
            aux_burn_sweeps=int(ac.get("aux_burn_sweeps", 50)),
            aux_sweeps=int(ac.get("aux_sweeps", 5)),
            thin=int(ac.get("thin", 100)),
            quantile=float(ac.get("quantile", 0.99)),
            rank_tolerance=float(ac.get("rank_tolerance", 1e-10)),
        )
    except ValueError as exc:
        raise ConfigError(f"bad acd section: {exc}") from exc


def _manifest(out: Path, name: str, subcommand: str, cfg: dict, inputs: dict, outputs: list[str]) -> None:
    write_json(
        out / name,
        {
            "tool": {"name": "automrf", "version": __version__},
            "subcommand": subcommand,
            "seed": cfg["seed"],
            "config": cfg,
            "inputs": {k: sha256_file(v) for k, v in inputs.items()},
            "outputs": sorted(outputs),
        },
    )


def _write_chain_outputs(out: Path, stem: str, chain: ChainOutput) -> list[str]:
    write_chain_csv(out / f"{stem}.csv", chain)
    write_json(
        out / f"{stem}.meta.json",
        {
            "seed": chain.seed,
            "inner_sweeps": chain.inner_sweeps,
            "outer_iterations": chain.outer_iterations,
            "burn_in": chain.burn_in,
            "thin": chain.thin,
            "n_draws": chain.n_draws,
            "param_names": chain.param_names,
            "block_accept_rates": chain.block_accept_rates.tolist(),
            "truncated": chain.truncated,
        },
    )
    # Wall-clock sidecar: intentionally not covered by determinism guarantees.
    write_json(out / f"{stem}.timing.json", chain.timings)
    return [f"{stem}.csv", f"{stem}.meta.json"]


# ------------------------------------------------------------ simulate


def _cmd_simulate(args) -> int:
    cfg, base = _load_config(args.config)
    sim = cfg.get("simulate")
    if not isinstance(sim, dict) or "generator" not in sim:
        raise ConfigError("config requires a 'simulate' section with a 'generator'")
    out = _out_dir(cfg, base, args.out)
    gen = sim["generator"]
    seed = cfg["seed"]
    rng = substream(seed, STREAM_SIM, 0)
    outputs: list[str] = []

    def emit_design(design: DesignMatrix):
        write_design_csv(out / "design.csv", design)
        outputs.append("design.csv")

    def emit_labels(labels: np.ndarray, grid: GridSpec | None):
        write_arrangement_csv(out / "arrangement.csv", labels, grid)
        outputs.append("arrangement.csv")

    if gen == "covariates":
        cols = [(float(m), float(s)) for m, s in sim["columns"]]
        design = simulate_covariates(int(sim["n"]), cols, rng, intercept=sim.get("intercept", False))
        emit_design(design)
    elif gen == "car":
        g = sim.get("grid") or cfg.get("model", {}).get("grid")
        if not g:
            raise ConfigError("car generator requires a grid")
        grid = GridSpec(int(g["rows"]), int(g["cols"]), g.get("connectivity", "rook"))
        graph = build_regular_grid(grid)
        cols = [(float(m), float(s)) for m, s in sim["columns"]]
        design = simulate_covariates(grid.n_sites, cols, rng, intercept=sim.get("intercept", True))
        beta = np.asarray(sim["beta"], dtype=np.float64)
        if beta.shape[0] != design.p:
            raise ConfigError(f"beta has {beta.shape[0]} rows for p={design.p}")
        car = CarSpec(graph, tau=float(sim.get("tau", 0.1)), rho=float(sim.get("rho", 0.2)))
        phi = np.column_stack([car_field(car, rng) for _ in range(beta.shape[1])])
        labels = multinomial_logit_sample(design.values, beta, phi, rng)
        emit_design(design)
        emit_labels(labels, grid)
    elif gen == "gp":
        g = sim.get("grid") or cfg.get("model", {}).get("grid")
        if not g:
            raise ConfigError("gp generator requires a grid")
        grid = GridSpec(int(g["rows"]), int(g["cols"]), g.get("connectivity", "rook"))
        cols = [(float(m), float(s)) for m, s in sim["columns"]]
        design = simulate_covariates(grid.n_sites, cols, rng, intercept=sim.get("intercept", False))
        gp = GpSpec(
            beta=np.asarray(sim["beta"], dtype=np.float64),
            length=float(sim.get("length", 3.0)),
            exponent=float(sim.get("exponent", 2.0)),
        )
        labels = gp_mixture_sample(grid, design.values, gp, rng)
        emit_design(design)
        emit_labels(labels, grid)
    elif gen == "gibbs":
        spec, grid, _, _ = _build_model(cfg, base, need_arrangement=False)
        theta = np.asarray(sim["theta"], dtype=np.float64)
        if theta.shape != (spec.p_total,):
            raise ConfigError(f"theta must have length {spec.p_total}")
        params = Params.unflatten(theta, spec.p, spec.n_classes)
        schedule = SweepSchedule(sim.get("sweep_mode", "raster"), int(sim.get("sweeps", 500)))
        init = random_arrangement(spec.n_sites, spec.n_classes, rng)
        labels = sample(spec, params, init, schedule, rng)
        emit_labels(labels, grid)
    else:
        raise ConfigError(f"unknown generator {gen!r}")

    _manifest(out, "simulate.manifest.json", "simulate", cfg, {}, outputs)
    return 0


# ------------------------------------------------------------ aggregate


def _cmd_aggregate(args) -> int:
    cfg, base = _load_config(args.config)
    ac = cfg.get("aggregate")
    if not isinstance(ac, dict):
        raise ConfigError("config requires an 'aggregate' section")
    points_path = _resolve(base, args.points or ac.get("points_csv", ""))
    if not points_path.is_file():
        raise ConfigError(f"points file not found: {points_path}")
    try:
        spec = AggregationSpec(
            bounds=tuple(float(v) for v in ac["bounds"]),
            rows=int(ac["rows"]),
            cols=int(ac["cols"]),
            class_mapping={str(k): int(v) for k, v in ac["class_mapping"].items()},
            standardize=bool(ac.get("standardize", False)),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad aggregate section: {exc}") from exc
    points, _ = read_points_csv(points_path)
    result = aggregate(points, spec)
    out = _out_dir(cfg, base, args.out)
    grid = GridSpec(spec.rows, spec.cols)
    write_arrangement_csv(out / "arrangement.csv", result.labels, grid)
    write_design_csv(out / "design.csv", result.design)
    write_json(
        out / "aggregate.report.json",
        {
            "cell_counts": result.cell_counts.tolist(),
            "standardization": result.standardization,
            "n_points_used": int(result.cell_counts.sum()),
        },
    )
    _manifest(
        out,
        "aggregate.manifest.json",
        "aggregate",
        cfg,
        {"points_csv": str(points_path)},
        ["arrangement.csv", "design.csv", "aggregate.report.json"],
    )
    return 0


# ------------------------------------------------------------ fitting


def _cmd_fit_mple(args) -> int:
    cfg, base = _load_config(args.config)
    spec, _, y, inputs = _build_model(cfg, base)
    mc = cfg.get("mple", {})
    fit = mple_fit(
        spec,
        y,
        max_iter=int(mc.get("max_iter", 100)),
        grad_tol=float(mc.get("grad_tol", 1e-8)),
        fix_gamma=mc.get("fix_gamma"),
    )
    out = _out_dir(cfg, base, args.out)
    report = fit.to_dict()
    report["param_names"] = spec.param_names()
    write_json(out / "mple.json", report)
    _manifest(out, "fit-mple.manifest.json", "fit-mple", cfg, inputs, ["mple.json"])
    return 0


def _run_chain_job(job):
    spec, y, config, chain_id = job
    return run_dmh(spec, y, config, chain_id=chain_id)


def _cmd_fit_dmh(args) -> int:
    cfg, base = _load_config(args.config)
    spec, _, y, inputs = _build_model(cfg, base)
    prior = _prior_from(cfg)
    out = _out_dir(cfg, base, args.out)

    m_list = [int(m) for m in args.m_list.split(",")] if args.m_list else [None]
    n_chains = max(1, args.chains)

    base_cfgs = []
    for m in m_list:
        config = _dmh_config(cfg, spec, prior, inner_sweeps=m)
        dc = cfg.get("dmh", {})
        blocks = config.blocks if config.blocks is not None else default_blocks(spec)
        fit = mple_fit(spec, y)
        cov = fit.covariance if fit.covariance is not None else None
        proposals = ProposalSpec.from_mple_covariance(cov, blocks)
        if dc.get("scales"):
            proposals = ProposalSpec(proposals.covariances, [float(s) for s in dc["scales"]])
        config = replace(config, blocks=blocks, proposals=proposals)
        if dc.get("tune", False):
            proposals = tune_scales(
                spec,
                y,
                config,
                pilot_iterations=int(dc.get("pilot_iterations", 500)),
                max_rounds=int(dc.get("max_tune_rounds", 10)),
                start=fit.theta_hat,
            )
            config = replace(config, proposals=proposals)
        base_cfgs.append((m, config, fit.theta_hat))

    jobs = []
    stems = []
    for m, config, _start in base_cfgs:
        for c in range(n_chains):
            jobs.append((spec, y, config, c))
            mm = config.inner_sweeps
            stems.append(f"chain_m{mm}_c{c}" if (len(m_list) > 1 or n_chains > 1) else "chain")
    if len(jobs) > 1 and args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            chains = list(pool.map(_run_chain_job, jobs))
    else:
        chains = [_run_chain_job(j) for j in jobs]

    outputs = []
    for stem, chain in zip(stems, chains):
        outputs += _write_chain_outputs(out, stem, chain)
    _manifest(out, "fit-dmh.manifest.json", "fit-dmh", cfg, inputs, outputs)
    return 0


def _cmd_diagnose(args) -> int:
    cfg, base = _load_config(args.config)
    spec, _, y, inputs = _build_model(cfg, base)
    prior = _prior_from(cfg)
    acd_config = _acd_config(cfg)
    chain_path = _resolve(base, args.chain)
    if not chain_path.is_file():
        raise ConfigError(f"chain file not found: {chain_path}")
    data = read_chain_csv(chain_path)
    if data["draws"].shape[0] == 0:
        raise ConfigError("chain file has no draws")
    if data["draws"].shape[1] != spec.p_total:
        raise ConfigError(
            f"chain has {data['draws'].shape[1]} parameters, model has {spec.p_total}"
        )
    chain = ChainOutput(
        draws=data["draws"],
        iterations=data["iterations"],
        log_h=data["log_h"],
        accept_flags=data["accept_flags"],
        block_accept_rates=np.zeros(0),
        param_names=data["param_names"],
        seed=cfg["seed"],
        inner_sweeps=0,
        outer_iterations=0,
        burn_in=0,
        thin=1,
    )
    result = diagnose(chain, spec, y, prior, acd_config, seed=cfg["seed"], workers=args.workers)
    out = _out_dir(cfg, base, args.out)
    write_json(out / "acd.json", result.to_dict())
    inputs = dict(inputs, chain_csv=str(chain_path))
    _manifest(out, "diagnose.manifest.json", "diagnose", cfg, inputs, ["acd.json"])
    return 0


def _cmd_predict(args) -> int:
    cfg, base = _load_config(args.config)
    spec, grid, _, inputs = _build_model(cfg, base, need_arrangement=False)
    chain_path = _resolve(base, args.posterior)
    if not chain_path.is_file():
        raise ConfigError(f"chain file not found: {chain_path}")
    data = read_chain_csv(chain_path)
    if data["draws"].shape[0] == 0:
        raise ConfigError("chain file has no draws")
    theta = data["draws"].mean(axis=0)
    if theta.shape[0] != spec.p_total:
        raise ConfigError("chain parameters do not match the model")
    params = Params.unflatten(theta, spec.p, spec.n_classes)
    sweeps = args.sweeps if args.sweeps is not None else int(cfg.get("predict", {}).get("sweeps", 500))
    rng = substream(cfg["seed"], STREAM_PREDICT, 0)
    init = random_arrangement(spec.n_sites, spec.n_classes, rng)
    labels = sample(spec, params, init, SweepSchedule("raster", sweeps), rng)
    out = _out_dir(cfg, base, args.out)
    write_arrangement_csv(out / "prediction.csv", labels, grid)
    outputs = ["prediction.csv"]
    if grid is not None:
        write_ppm(out / "prediction.ppm", labels, grid, cell_px=int(cfg.get("render", {}).get("cell_px", 8)))
        outputs.append("prediction.ppm")
    write_json(out / "predict.report.json", {"posterior_mean": theta.tolist(), "sweeps": sweeps})
    inputs = dict(inputs, chain_csv=str(chain_path))
    _manifest(out, "predict.manifest.json", "predict", cfg, inputs, outputs + ["predict.report.json"])
    return 0


def _cmd_summarize(args) -> int:
    chain_path = Path(args.chain)
    if not chain_path.is_file():
        raise ConfigError(f"chain file not found: {chain_path}")
    data = read_chain_csv(chain_path)
    if data["draws"].shape[0] == 0:
        raise ConfigError("chain file has no draws")
    acd_ref = None
    if args.acd:
        import json

        acd_ref = json.loads(Path(args.acd).read_text())
    params = summarize_draws(data["draws"], data["param_names"])
    flags = data["accept_flags"]
    rates = flags.mean(axis=0).tolist() if flags.size else []
    payload = {
        "parameters": [
            {"name": p.name, "mean": p.mean, "lower": p.lower, "upper": p.upper} for p in params
        ],
        "n_draws": int(data["draws"].shape[0]),
        "acceptance_rates_retained": rates,
        "acd_reference": acd_ref,
    }
    out_path = Path(args.out) if args.out else chain_path.with_suffix(".summary.json")
    write_json(out_path, payload)
    return 0


def _cmd_render(args) -> int:
    labels, shape = read_arrangement_csv(args.arrangement)
    if shape is None:
        raise ConfigError("render requires a grid arrangement (row,col,label format)")
    grid = GridSpec(shape[0], shape[1])
    out_path = Path(args.out) if args.out else Path(args.arrangement).with_suffix(".ppm")
    write_ppm(out_path, labels, grid, DEFAULT_PALETTE, cell_px=args.cell_px)
    return 0


def _cmd_oracle(args) -> int:
    cfg, base = _load_config(args.config)
    spec, _, y, inputs = _build_model(cfg, base, need_arrangement=args.grid_index is not None)
    if args.theta:
        theta = np.array([float(v) for v in args.theta.split(",")])
        if theta.shape != (spec.p_total,):
            raise ConfigError(f"theta must have length {spec.p_total}")
    else:
        theta = np.zeros(spec.p_total)
    params = Params.unflatten(theta, spec.p, spec.n_classes)
    table = enumerate_table(spec)
    payload: dict = {
        "theta": theta.tolist(),
        "param_names": spec.param_names(),
        "log_z": table.log_partition(params),
        "n_configs": table.n_configs,
    }
    mean, cov = table.moments(params)
    payload["mean_suff_stats"] = mean.tolist()
    payload["cov_suff_stats"] = cov.tolist()
    if args.grid_index is not None:
        prior = _prior_from(cfg)
        values = np.linspace(args.grid_start, args.grid_stop, args.grid_num)
        grid_post = exact_posterior_grid(
            spec, y, prior, [GridAxis(args.grid_index, values)], params, table=table
        )
        payload["posterior_grid"] = {
            "index": args.grid_index,
            "values": values.tolist(),
            "probs": grid_post.probs.tolist(),
            "mean": grid_post.marginal_mean(0),
        }
        payload["observed_suff_stats"] = suff_stats(spec, y).tolist()
    out = _out_dir(cfg, base, args.out)
    write_json(out / "oracle.json", payload)
    _manifest(out, "oracle.manifest.json", "oracle", cfg, inputs, ["oracle.json"])
    return 0


# ------------------------------------------------------------ dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="automrf",
        description="Categorical Markov random fields on lattices: simulation, "
        "double MH posterior sampling, and convergence diagnostics.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(fn=fn)
        p.add_argument("--out", default=None, help="output directory override")
        return p

    p = add("simulate", _cmd_simulate, "generate synthetic fields/covariates")
    p.add_argument("--config", required=True)

    p = add("aggregate", _cmd_aggregate, "majority-vote grid aggregation of point data")
    p.add_argument("--config", required=True)
    p.add_argument("--points", default=None, help="points CSV (overrides config)")

    p = add("fit-mple", _cmd_fit_mple, "maximum pseudolikelihood fit")
    p.add_argument("--config", required=True)

    p = add("fit-dmh", _cmd_fit_dmh, "double Metropolis-Hastings posterior sampling")
    p.add_argument("--config", required=True)
    p.add_argument("--chains", type=int, default=1, help="independent chains per m")
    p.add_argument("--m-list", default=None, help="comma-separated inner sweep counts")
    p.add_argument("--workers", type=int, default=1, help="parallel chain workers")

    p = add("diagnose", _cmd_diagnose, "approximate curvature diagnostic on a chain")
    p.add_argument("--config", required=True)
    p.add_argument("--chain", required=True)
    p.add_argument("--workers", type=int, default=1)

    p = add("predict", _cmd_predict, "simulate an arrangement at the posterior mean")
    p.add_argument("--config", required=True)
    p.add_argument("--posterior", required=True, help="chain CSV")
    p.add_argument("--sweeps", type=int, default=None)

    p = add("summarize", _cmd_summarize, "posterior means and 95% intervals")
    p.add_argument("--chain", required=True)
    p.add_argument("--acd", default=None, help="attach an ACD report")

    p = add("render", _cmd_render, "render a grid arrangement to binary PPM")
    p.add_argument("--arrangement", required=True)
    p.add_argument("--cell-px", type=int, default=8)

    p = add("oracle", _cmd_oracle, "exact enumeration on tiny models (debugging)")
    p.add_argument("--config", required=True)
    p.add_argument("--theta", default=None, help="comma-separated flat parameter vector")
    p.add_argument("--grid-index", type=int, default=None, help="posterior grid over this index")
    p.add_argument("--grid-start", type=float, default=0.0)
    p.add_argument("--grid-stop", type=float, default=1.0)
    p.add_argument("--grid-num", type=int, default=101)

    return parser


def cli_dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AutomrfError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
