"""Command-line harness: configuration, run orchestration, persistence, plots.

Subcommands:

    preset-list   show the built-in model presets
    validate      check a model (or run config) against the coercivity bounds
    threshold     solve the variational problem, write threshold.json + sidecars
    classify      label initial data against a threshold file
    simulate      integrate the system, write trajectory CSV + summary JSON
    sweep         repeat simulate over a parameter list, bracket the outcome flip

Configuration files are JSON; unknown keys are rejected everywhere.  Outputs
are deterministic: floats are written with 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .classify import classify
from .dynamics import (
    SolverConfig,
    TrajectoryRecord,
    integrate,
    invariance_monitor,
    levine_check,
    write_trajectory_csv,
)
from .families import build_field
from .functionals import StateUW, energy, power_integral
from .grid import GridSpec, write_field_bin
from .symbols import (
    ModelSpec,
    model_from_dict,
    model_to_dict,
    preset_names,
    validate_model,
)
from .wellsolver import (
    MinimizeOptions,
    ThresholdResult,
    load_thresholds,
    minimize_embedding_constant,
    save_thresholds,
    select_threshold,
)

__all__ = ["ConfigError", "RunConfig", "parse_run_config", "serialize_run_config", "main"]


class ConfigError(ValueError):
    """Invalid configuration or model; maps to exit code 2."""


@dataclass
class RunConfig:
    model: ModelSpec
    grid: GridSpec
    initial_u: dict
    initial_w: dict
    gamma: float
    solver: SolverConfig | None
    gamma_grid: tuple | None
    out_dir: str | None
    formats: tuple
    seed: int | None


def _check_keys(data: dict, allowed: set, where: str, required: set = frozenset()):
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    missing = required - set(data)
    if missing:
        raise ConfigError(f"missing keys in {where}: {sorted(missing)}")


def parse_run_config(data: dict) -> RunConfig:
    _check_keys(
        data,
        {"model", "grid", "initial_u", "initial_w", "gamma", "solver", "gamma_grid", "outputs", "seed"},
        "run config",
        required={"model", "grid"},
    )
    try:
        model = model_from_dict(data["model"])
    except ValueError as err:
        raise ConfigError(f"model: {err}") from err

    grid_data = data["grid"]
    _check_keys(grid_data, {"half_length", "n_modes"}, "grid", required={"half_length", "n_modes"})
    try:
        grid = GridSpec(float(grid_data["half_length"]), int(grid_data["n_modes"]))
    except ValueError as err:
        raise ConfigError(f"grid: {err}") from err

    solver = None
    if "solver" in data:
        sdata = dict(data["solver"])
        _check_keys(
            sdata,
            {"dt", "t_end", "output_stride", "dealias", "blowup_norm_threshold",
             "levine_tracking", "snapshot_times"},
            "solver",
            required={"dt", "t_end"},
        )
        solver = SolverConfig(
            dt=float(sdata["dt"]),
            t_end=float(sdata["t_end"]),
            output_stride=int(sdata.get("output_stride", 10)),
            dealias=bool(sdata.get("dealias", True)),
            blowup_norm_threshold=float(sdata.get("blowup_norm_threshold", 1e6)),
            levine_tracking=bool(sdata.get("levine_tracking", False)),
            snapshot_times=tuple(float(t) for t in sdata.get("snapshot_times", ())),
        )

    out_dir = None
    formats = ("csv", "json", "svg")
    if "outputs" in data:
        odata = data["outputs"]
        _check_keys(odata, {"directory", "formats"}, "outputs")
        out_dir = odata.get("directory")
        if "formats" in odata:
            formats = tuple(odata["formats"])
            bad = set(formats) - {"csv", "json", "svg", "bin"}
            if bad:
                raise ConfigError(f"unknown output formats: {sorted(bad)}")

    gamma_grid = None
    if "gamma_grid" in data:
        gamma_grid = tuple(float(g) for g in data["gamma_grid"])

    return RunConfig(
        model=model,
        grid=grid,
        initial_u=dict(data.get("initial_u", {"family": "zero"})),
        initial_w=dict(data.get("initial_w", {"family": "zero"})),
        gamma=float(data.get("gamma", 0.0)),
        solver=solver,
        gamma_grid=gamma_grid,
        out_dir=out_dir,
        formats=formats,
        seed=int(data["seed"]) if "seed" in data else None,
    )


def serialize_run_config(config: RunConfig) -> dict:
    data = {
        "model": model_to_dict(config.model),
        "grid": {"half_length": config.grid.half_length, "n_modes": config.grid.n_modes},
        "initial_u": dict(config.initial_u),
        "initial_w": dict(config.initial_w),
        "gamma": config.gamma,
    }
    if config.solver is not None:
        data["solver"] = {
            "dt": config.solver.dt,
            "t_end": config.solver.t_end,
            "output_stride": config.solver.output_stride,
            "dealias": config.solver.dealias,
            "blowup_norm_threshold": config.solver.blowup_norm_threshold,
            "levine_tracking": config.solver.levine_tracking,
            "snapshot_times": list(config.solver.snapshot_times),
        }
    if config.gamma_grid is not None:
        data["gamma_grid"] = list(config.gamma_grid)
    outputs = {}
    if config.out_dir is not None:
        outputs["directory"] = config.out_dir
    outputs["formats"] = list(config.formats)
    data["outputs"] = outputs
    if config.seed is not None:
        data["seed"] = config.seed
    return data


def load_run_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    return parse_run_config(raw)


def _write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _out_dir(args, config: RunConfig | None) -> Path:
    name = args.out or (config.out_dir if config else None) or "wavewell_out"
    path = Path(name)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _grid_samples(grid: GridSpec) -> np.ndarray:
    return np.linspace(0.0, grid.max_wavenumber, 4097)


# ---------------------------------------------------------------------------
# subcommands


def cmd_preset_list(args) -> int:
    for name, params in preset_names().items():
        print(f"{name}({', '.join(params)})")
    return 0


def cmd_validate(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read {args.config}: {err}") from err

    if "grid" in raw or "initial_u" in raw or "solver" in raw:
        config = parse_run_config(raw)
        model, xi = config.model, _grid_samples(config.grid)
    else:
        try:
            model = model_from_dict(raw)
        except ValueError as err:
            raise ConfigError(str(err)) from err
        xi = _grid_samples(GridSpec(30.0, 4096))
    report = validate_model(model, xi)
    for line in report.violations:
        print(f"violation: {line}")
    for line in report.warnings:
        print(f"warning: {line}")
    print(
        f"model {'valid' if report.valid else 'INVALID'}: "
        f"rho={report.rho:g} r={report.r:g} s0={report.s0:g} p={report.p:g}"
    )
    if args.out:
        out = _out_dir(args, None)
        _write_json(out / "validation.json", {
            "valid": report.valid,
            "violations": report.violations,
            "warnings": report.warnings,
            "rho": report.rho,
            "r": report.r,
            "s0": report.s0,
            "p": report.p,
        })
    return 0 if report.valid else 2


def _require_valid(model: ModelSpec, grid: GridSpec) -> None:
    report = validate_model(model, _grid_samples(grid))
    if not report.valid:
        raise ConfigError("invalid model: " + "; ".join(report.violations))


def cmd_threshold(args) -> int:
    config = load_run_config(args.config)
    _require_valid(config.model, config.grid)
    out = _out_dir(args, config)
    gammas = config.gamma_grid
    if gammas is None:
        gammas = (args.gamma if args.gamma is not None else config.gamma,)
    results = []
    for gamma in gammas:
        res = minimize_embedding_constant(config.model, config.grid, gamma, MinimizeOptions())
        results.append(res)
        print(
            f"gamma={gamma:g}: best_constant={res.best_constant:.12g} "
            f"well_depth={res.well_depth:.12g} iterations={res.iterations} "
            f"residual={res.residual:.3e}"
        )
    save_thresholds(results, out / "threshold.json")
    print(f"wrote {out / 'threshold.json'}")
    return 0


def _check_compat(config: RunConfig, threshold: ThresholdResult) -> ThresholdResult:
    if threshold.grid != config.grid or threshold.model != config.model:
        raise ConfigError("threshold file does not match the run's model and grid")
    return threshold


def _load_threshold_for(args, config: RunConfig, out: Path) -> ThresholdResult:
    gamma = args.gamma if args.gamma is not None else config.gamma
    if args.threshold:
        return _check_compat(config, select_threshold(load_thresholds(args.threshold), gamma))
    # cache per output directory: reuse a matching entry, extend otherwise
    cached = out / "threshold.json"
    existing = []
    if cached.exists():
        loaded = load_thresholds(cached)
        try:
            return _check_compat(config, select_threshold(loaded, gamma))
        except ValueError:
            existing = [r for r in loaded
                        if r.model == config.model and r.grid == config.grid]
    _require_valid(config.model, config.grid)
    res = minimize_embedding_constant(config.model, config.grid, gamma, MinimizeOptions())
    save_thresholds(existing + [res], cached)
    return res


def _build_state(config: RunConfig, threshold: ThresholdResult) -> StateUW:
    try:
        u0 = build_field(config.grid, config.initial_u, threshold)
        w0 = build_field(config.grid, config.initial_w, threshold)
    except ValueError as err:
        raise ConfigError(f"initial data: {err}") from err
    return StateUW(u0, w0, config.model)


def _classification_row(state: StateUW, threshold: ThresholdResult) -> dict:
    label = classify(state, threshold)
    breakdown = energy(state)
    return {
        "gamma": threshold.gamma,
        "E": breakdown.total,
        "M": breakdown.momentum,
        "I": breakdown.dispersive,
        "Q": power_integral(state.u, state.model.p),
        "sign_quantity": label.sign_quantity,
        "d": threshold.well_depth,
        "label": str(label.label),
    }


def cmd_classify(args) -> int:
    config = load_run_config(args.config)
    out = _out_dir(args, config)
    threshold = _check_compat(config, _load_threshold_for(args, config, out))
    state = _build_state(config, threshold)
    row = _classification_row(state, threshold)
    _write_json(out / "classification.json", row)
    print(f"label={row['label']} E={row['E']:.6g} d={row['d']:.6g} "
          f"sign_quantity={row['sign_quantity']:.6g}")
    return 0


def _run_simulation(config: RunConfig, threshold: ThresholdResult, out: Path,
                    seed: int | None = None) -> dict:
    if config.solver is None:
        raise ConfigError("config has no 'solver' block")
    _check_compat(config, threshold)
    state = _build_state(config, threshold)
    record = integrate(state, config.solver, threshold)

    e_series = np.asarray(record.series["E"])
    m_series = np.asarray(record.series["M"])
    drift_e = float(np.max(np.abs(e_series - e_series[0])) / max(1.0, abs(e_series[0])))
    drift_m = float(np.max(np.abs(m_series - m_series[0])) / max(1.0, abs(m_series[0])))

    invariance = invariance_monitor(record)
    levine = None
    if config.solver.levine_tracking:
        report = levine_check(record, record.p)
        levine = {
            "applicable": report.applicable,
            "passed": report.passed,
            "delta": report.delta,
            "second_derivative_violations": len(report.second_derivative_violations),
            "concavity_violations": len(report.concavity_violations),
        }

    if "csv" in config.formats:
        write_trajectory_csv(record, out / "trajectory.csv")
    for t, u_snap, w_snap in record.snapshots:
        write_field_bin(u_snap, out / f"snapshot_u_t{t:g}.bin")
        write_field_bin(w_snap, out / f"snapshot_w_t{t:g}.bin")
    if "svg" in config.formats:
        _plot_trajectory(record, out / "diagnostics.svg")

    blowup = record.blowup
    summary = {
        "initial_label": str(record.initial_label.label),
        "gamma": record.gamma,
        "outcome": "blowup" if blowup.detected else "completed",
        "t_detect": blowup.t_detect,
        "trigger": blowup.trigger,
        "delta_bound": blowup.delta_bound,
        "levine_upper_bound": blowup.levine_upper_bound,
        "energy_drift": drift_e,
        "momentum_drift": drift_m,
        "cfl_number": record.cfl_number,
        "invariance": {
            "applicable": invariance.applicable,
            "passed": invariance.passed,
            "note": invariance.note,
            "sign_violations": len(invariance.sign_violations),
            "depth_violations": len(invariance.depth_violations),
        },
        "levine": levine,
        "E0": float(e_series[0]),
        "depth": threshold.well_depth,
        "steps_recorded": len(record.times),
        "seed": seed,
    }
    _write_json(out / "summary.json", summary)
    return summary


def cmd_simulate(args) -> int:
    config = load_run_config(args.config)
    out = _out_dir(args, config)
    threshold = _load_threshold_for(args, config, out)
    seed = args.seed if args.seed is not None else config.seed
    summary = _run_simulation(config, threshold, out, seed=seed)
    print(f"label={summary['initial_label']} outcome={summary['outcome']}"
          + (f" t_detect={summary['t_detect']:g}" if summary["t_detect"] else "")
          + f" energy_drift={summary['energy_drift']:.3e}")
    return 0


def _set_parameter(config: RunConfig, parameter: str, value: float) -> RunConfig:
    head, _, key = parameter.partition(".")
    if head == "gamma" and not key:
        return replace(config, gamma=value)
    if head in ("initial_u", "initial_w") and key:
        block = dict(getattr(config, head))
        block[key] = value
        return replace(config, **{head: block})
    raise ConfigError(
        f"unsupported sweep parameter {parameter!r}; use gamma, initial_u.<param> "
        "or initial_w.<param>"
    )


def _sweep_worker(payload) -> dict:
    config_data, threshold_path, parameter, value, out_name = payload
    config = _set_parameter(parse_run_config(config_data), parameter, value)
    out = Path(out_name)
    out.mkdir(parents=True, exist_ok=True)
    threshold = select_threshold(load_thresholds(threshold_path), config.gamma)
    row = {"value": value, "out": out.name}
    try:
        state = _build_state(config, threshold)
        row.update(_classification_row(state, threshold))
        summary = _run_simulation(config, threshold, out, seed=config.seed)
        row["outcome"] = summary["outcome"]
        row["t_detect"] = summary["t_detect"]
    except Exception as err:  # a failed point must not sink the sweep
        row["outcome"] = "error"
        row["error"] = str(err)
    return row


def cmd_sweep(args) -> int:
    config = load_run_config(args.config)
    out = _out_dir(args, config)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("sweep needs a nonempty --values list")
    if sorted(values) != values:
        raise ConfigError("sweep values must be sorted ascending")

    if args.threshold:
        threshold_path = Path(args.threshold)
    else:
        threshold_path = out / "threshold.json"
        if not threshold_path.exists():
            _require_valid(config.model, config.grid)
            res = minimize_embedding_constant(config.model, config.grid, config.gamma,
                                              MinimizeOptions())
            save_thresholds([res], threshold_path)

    config_data = serialize_run_config(config)
    jobs = [
        (config_data, str(threshold_path), args.parameter, value,
         str(out / f"value_{idx:03d}"))
        for idx, value in enumerate(values)
    ]
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(_sweep_worker, jobs))
    else:
        rows = [_sweep_worker(job) for job in jobs]

    survivors = [r["value"] for r in rows if r["outcome"] == "completed"]
    blowups = [r["value"] for r in rows if r["outcome"] == "blowup"]
    bracket = None
    note = "both outcomes present" if survivors and blowups else \
        "no blow-up in the sweep" if survivors else "no surviving run in the sweep"
    if survivors and blowups:
        bracket = {"survives": max(survivors), "blows_up": min(blowups)}
    result = {
        "parameter": args.parameter,
        "values": values,
        "rows": rows,
        "bracket": bracket,
        "note": note,
    }
    _write_json(out / "sweep_result.json", result)
    if "svg" in config.formats:
        _plot_sweep(result, out / "sweep_outcomes.svg")
    print(f"sweep over {args.parameter}: " + (
        f"bracket ({bracket['survives']:g}, {bracket['blows_up']:g})" if bracket else note))
    return 0


# ---------------------------------------------------------------------------
# plots (SVG files, no display server)


def _plot_trajectory(record: TrajectoryRecord, path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    t = record.times
    for key in ("E", "M", "I", "Q", "twoI_minus_Q"):
        axes[0].plot(t, record.series[key], label=key)
    axes[0].legend(loc="best", fontsize=8)
    axes[0].set_ylabel("diagnostics")
    axes[1].plot(t, record.series["u_sobolev_s0"], label="u Sobolev norm")
    axes[1].plot(t, record.series["w_sobolev_s0_minus_rho_half"], label="w Sobolev norm")
    if record.series["H"]:
        axes[1].plot(t, record.series["H"], label="H")
    axes[1].set_yscale("log")
    axes[1].legend(loc="best", fontsize=8)
    axes[1].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _plot_sweep(result: dict, path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = [r for r in result["rows"] if "E" in r]
    fig, ax = plt.subplots(figsize=(7, 4))
    colors = {"completed": "tab:blue", "blowup": "tab:red", "error": "gray"}
    for row in rows:
        ax.scatter(row["value"], row["E"], color=colors.get(row["outcome"], "black"),
                   label=row["outcome"])
    if rows:
        ax.axhline(rows[0]["d"], linestyle="--", color="k", label="well depth")
    seen = set()
    handles, labels = ax.get_legend_handles_labels()
    dedup = [(h, l) for h, l in zip(handles, labels) if not (l in seen or seen.add(l))]
    if dedup:
        ax.legend(*zip(*dedup), fontsize=8)
    ax.set_xlabel(result["parameter"])
    ax.set_ylabel("initial energy")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="wavewell",
        description="Potential-well thresholds and pseudo-spectral runs for "
                    "doubly dispersive nonlocal wave equations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, threshold=False, sweep=False):
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--gamma", type=float, default=None, help="override the config gamma")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="seed recorded with outputs")
        sp.add_argument("--threads", type=int, default=1, help="worker pool size (sweep)")
        if threshold:
            sp.add_argument("--threshold", default=None, help="threshold.json from 'threshold'")
        if sweep:
            sp.add_argument("--parameter", required=True,
                            help="swept parameter, e.g. initial_u.amplitude")
            sp.add_argument("--values", required=True, help="comma-separated ascending values")

    sub.add_parser("preset-list", help="list model presets").set_defaults(fn=cmd_preset_list)

    sp = sub.add_parser("validate", help="validate a model or run config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("threshold", help="solve for the well constants")
    add_common(sp)
    sp.set_defaults(fn=cmd_threshold)

    sp = sub.add_parser("classify", help="label initial data")
    add_common(sp, threshold=True)
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("simulate", help="integrate the system")
    add_common(sp, threshold=True)
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("sweep", help="simulate over a parameter list")
    add_common(sp, threshold=True, sweep=True)
    sp.set_defaults(fn=cmd_sweep)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # runtime failure
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
