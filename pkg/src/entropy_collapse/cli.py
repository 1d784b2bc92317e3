"""Command line interface.

Subcommands map to experiment kinds: run (single trajectory), sweep, phase,
irrev, universal, sense. Options given on the command line override the
config file. Exit codes: 0 success, 1 validation or config error, 2 I/O
error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import ExperimentConfig, config_from_dict, load_config, serialize_config
from .dynamics import evolve
from .errors import ConfigError, EntropyCollapseError
from .experiments import (
    run_irreversibility,
    run_phase_diagram,
    run_sensitivity,
    run_universality,
    sweep_alpha,
)
from .io import (
    _fmt,
    write_irreversibility_json,
    write_phase_csv,
    write_sensitivity_json,
    write_sweep_csv,
    write_trajectory_csv,
    write_universality_json,
)
from .simplex import RngStream, derive_stream_index, sample_dirichlet_uniform

KIND_BY_COMMAND = {
    "run": "single",
    "sweep": "sweep",
    "phase": "phase",
    "irrev": "irreversibility",
    "universal": "universality",
    "sense": "sensitivity",
}


class _Parser(argparse.ArgumentParser):
    # Usage mistakes are validation errors (exit 1), not I/O errors.
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ecl", description="Entropy collapse simulation engine")
    sub = parser.add_subparsers(dest="command", required=True)
    for command, kind in KIND_BY_COMMAND.items():
        p = sub.add_parser(command, help=f"{kind} experiment")
        p.add_argument("--config", help="YAML config file")
        p.add_argument("--alpha", type=float, help="feedback strength")
        p.add_argument("--beta", type=float, help="base novelty rate")
        p.add_argument("--rule", help="update rule: multiplicative, softmax or replicator")
        p.add_argument("--n", type=int, dest="n_states", help="number of states")
        p.add_argument("--steps", type=int, dest="horizon", help="evolution horizon")
        p.add_argument("--seed", type=int, dest="master_seed", help="master seed")
        p.add_argument("--out", dest="out_dir", help="output directory")
        p.add_argument(
            "--describe", action="store_true", help="print the resolved config and exit"
        )
    return parser


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    kind = KIND_BY_COMMAND[args.command]
    data: dict = {}
    if args.config:
        loaded = load_config(args.config)
        from .config import config_to_dict

        data = config_to_dict(loaded)
        if data["kind"] != kind:
            raise ConfigError(
                f"kind in config ({data['kind']}) does not match subcommand ({args.command})"
            )
    data["kind"] = kind
    for key in ("alpha", "beta", "rule", "n_states", "horizon", "master_seed", "out_dir"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return config_from_dict(data)


def _out_path(cfg: ExperimentConfig, experiment: str, name: str) -> str:
    return os.path.join(cfg.out_dir, experiment, name)


def _run_single(cfg: ExperimentConfig) -> list[str]:
    rng = RngStream(cfg.master_seed, derive_stream_index("single", cfg.replicate)).generator()
    p0 = sample_dirichlet_uniform(cfg.n_states, rng)
    traj = evolve(p0, cfg.dynamics_params(), cfg.horizon, rng)
    path = _out_path(cfg, "single", "trajectory.csv")
    write_trajectory_csv(traj, path)
    return [path]


def _run_sweep(cfg: ExperimentConfig) -> list[str]:
    sweep = sweep_alpha(
        cfg.alphas,
        rule=cfg.rule,
        beta=cfg.beta,
        n_states=cfg.n_states,
        horizon=cfg.horizon,
        noise_sigma=cfg.noise_sigma,
        replicates=cfg.replicates,
        master_seed=cfg.master_seed,
        schedule=cfg.schedule(),
        window=cfg.window,
        tol=cfg.tol,
        measure=cfg.entropy_measure(),
        keep_trajectories=True,
    )
    paths = [_out_path(cfg, "sweep", "sweep.csv")]
    write_sweep_csv(sweep, paths[0])
    for point, traj in zip(sweep.points, sweep.trajectories):
        path = _out_path(cfg, "sweep", f"traj_alpha_{_fmt(point.alpha)}.csv")
        write_trajectory_csv(traj, path)
        paths.append(path)
    return paths


def _run_phase(cfg: ExperimentConfig) -> list[str]:
    phase = run_phase_diagram(
        cfg.alphas,
        cfg.betas,
        rule=cfg.rule,
        n_states=cfg.n_states,
        horizon=cfg.horizon,
        noise_sigma=cfg.noise_sigma,
        replicates=cfg.replicates,
        master_seed=cfg.master_seed,
        window=cfg.window,
        tol=cfg.tol,
    )
    path = _out_path(cfg, "phase", "phase.csv")
    write_phase_csv(phase, path)
    return [path]


def _run_irrev(cfg: ExperimentConfig) -> list[str]:
    report = run_irreversibility(
        alpha=cfg.alpha,
        beta=cfg.beta,
        rule=cfg.rule,
        n_states=cfg.n_states,
        horizon=cfg.horizon,
        shock_start=cfg.shock_start,
        shock_end=cfg.shock_end,
        shock_multiplier=cfg.shock_multiplier,
        noise_sigma=cfg.noise_sigma,
        master_seed=cfg.master_seed,
        replicate=cfg.replicate,
    )
    json_path = _out_path(cfg, "irreversibility", "report.json")
    csv_path = _out_path(cfg, "irreversibility", "trajectory.csv")
    write_irreversibility_json(report, json_path)
    write_trajectory_csv(report.trajectory, csv_path)
    return [json_path, csv_path]


def _run_universal(cfg: ExperimentConfig) -> list[str]:
    report = run_universality(
        alpha=cfg.alpha,
        beta=cfg.beta,
        n_states=cfg.n_states,
        horizon=cfg.horizon,
        master_seed=cfg.master_seed,
        grid_points=cfg.grid_points,
    )
    paths = [_out_path(cfg, "universality", "report.json")]
    write_universality_json(report, paths[0])
    for name, traj in report.trajectories.items():
        path = _out_path(cfg, "universality", f"traj_{name}.csv")
        write_trajectory_csv(traj, path)
        paths.append(path)
    return paths


def _run_sense(cfg: ExperimentConfig) -> list[str]:
    report = run_sensitivity(
        beta=cfg.beta,
        base_n=cfg.n_states,
        horizon=cfg.horizon,
        replicates=cfg.replicates,
        master_seed=cfg.master_seed,
        alphas=cfg.alphas,
    )
    path = _out_path(cfg, "sensitivity", "report.json")
    write_sensitivity_json(report, path)
    return [path]


_RUNNERS = {
    "single": _run_single,
    "sweep": _run_sweep,
    "phase": _run_phase,
    "irreversibility": _run_irrev,
    "universality": _run_universal,
    "sensitivity": _run_sense,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _resolve_config(args)
        if args.describe:
            sys.stdout.write(serialize_config(cfg))
            return 0
        for path in _RUNNERS[cfg.kind](cfg):
            print(f"wrote {path}")
        return 0
    except EntropyCollapseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
