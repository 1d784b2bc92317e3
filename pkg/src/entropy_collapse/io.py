"""Deterministic writers for trajectory CSVs and experiment reports.

Floats are written with repr, the shortest round-trip form, so a file's
bytes are a pure function of the data. All files end with a newline and use
LF line endings regardless of platform.
"""

from __future__ import annotations

import json
import os
from typing import Any

from .dynamics import Trajectory
from .experiments import (
    IrreversibilityReport,
    PhaseDiagram,
    SensitivityReport,
    SweepResult,
    UniversalityReport,
)

TRAJECTORY_HEADER = (
    "step,alpha,beta_effective,rule,n_states,entropy_nats,entropy_norm,"
    "dominant_share,top5_mass,eff_dim_order1,eff_dim_order2"
)
SWEEP_HEADER = "alpha,steady_mean,steady_std,reached"
PHASE_HEADER = "alpha,beta,steady_entropy_norm,regime"


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return "none"
    return str(value)


def _write_text(path: str, text: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_trajectory_csv(traj: Trajectory, path: str) -> None:
    alpha = _fmt(traj.params.alpha)
    rule = traj.params.rule.value
    n = traj.n_states
    lines = [TRAJECTORY_HEADER]
    for s in traj.steps:
        lines.append(
            f"{s.step},{alpha},{_fmt(s.beta_effective)},{rule},{n},"
            f"{_fmt(s.entropy)},{_fmt(s.entropy_norm)},{_fmt(s.dominant_share)},"
            f"{_fmt(s.top5_mass)},{_fmt(s.eff_dim_order1)},{_fmt(s.eff_dim_order2)}"
        )
    _write_text(path, "\n".join(lines) + "\n")


def write_sweep_csv(sweep: SweepResult, path: str) -> None:
    """Sweep table plus a trailing alpha_c record."""
    lines = [SWEEP_HEADER]
    for p in sweep.points:
        lines.append(f"{_fmt(p.alpha)},{_fmt(p.steady_mean)},{_fmt(p.steady_std)},{_fmt(p.reached)}")
    lines.append(f"alpha_c,{_fmt(sweep.alpha_c)}")
    _write_text(path, "\n".join(lines) + "\n")


def write_phase_csv(phase: PhaseDiagram, path: str) -> None:
    lines = [PHASE_HEADER]
    for c in phase.cells:
        lines.append(f"{_fmt(c.alpha)},{_fmt(c.beta)},{_fmt(c.steady_entropy_norm)},{c.regime.value}")
    _write_text(path, "\n".join(lines) + "\n")


def _dump_json(payload: dict[str, Any], path: str) -> None:
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_irreversibility_json(report: IrreversibilityReport, path: str) -> None:
    payload = {
        "alpha": report.alpha,
        "beta": report.beta,
        "rule": report.rule.value,
        "n_states": report.n_states,
        "horizon": report.horizon,
        "shock_start": report.shock_start,
        "shock_end": report.shock_end,
        "shock_multiplier": report.shock_multiplier,
        "noise_sigma": report.noise_sigma,
        "master_seed": report.master_seed,
        "replicate": report.replicate,
        "baseline": report.baseline,
        "shock_peak": report.shock_peak,
        "post_shock_floor": report.post_shock_floor,
        "recovery_gap": report.recovery_gap,
        "dominant_share_final": report.dominant_share_final,
        "top5_before": report.top5_before,
        "top5_after": report.top5_after,
    }
    _dump_json(payload, path)


def write_universality_json(report: UniversalityReport, path: str) -> None:
    payload = {
        "alpha": report.alpha,
        "beta": report.beta,
        "n_states": report.n_states,
        "horizon": report.horizon,
        "master_seed": report.master_seed,
        "rules": [r.value for r in report.rules],
        "dilations": report.dilations,
        "max_pairwise_rms": report.max_pairwise_rms,
        "grid": [float(x) for x in report.grid],
        "curves": {name: [float(x) for x in curve] for name, curve in report.curves.items()},
    }
    _dump_json(payload, path)


def write_sensitivity_json(report: SensitivityReport, path: str) -> None:
    def axis(points) -> list[dict[str, Any]]:
        return [
            {
                "setting": p.setting,
                "alpha_c": p.alpha_c,
                "regimes": list(p.regimes),
                "labels": list(p.labels),
            }
            for p in points
        ]

    payload = {
        "beta": report.beta,
        "base_n": report.base_n,
        "horizon": report.horizon,
        "replicates": report.replicates,
        "master_seed": report.master_seed,
        "alphas": list(report.alphas),
        "axes": {
            "n_states": axis(report.n_axis),
            "noise_sigma": axis(report.sigma_axis),
            "renyi_q": axis(report.q_axis),
            "beta_schedule": axis(report.schedule_axis),
        },
        "alpha_c_over_beta_spread": report.alpha_c_over_beta_spread,
        "noisy_transient_mean": report.noisy_transient_mean,
        "noiseless_transient_mean": report.noiseless_transient_mean,
    }
    _dump_json(payload, path)


def write_report(report: Any, path: str) -> None:
    """Dispatch on report type: sweeps and phases to CSV, the rest to JSON."""
    if isinstance(report, SweepResult):
        write_sweep_csv(report, path)
    elif isinstance(report, PhaseDiagram):
        write_phase_csv(report, path)
    elif isinstance(report, IrreversibilityReport):
        write_irreversibility_json(report, path)
    elif isinstance(report, UniversalityReport):
        write_universality_json(report, path)
    elif isinstance(report, SensitivityReport):
        write_sensitivity_json(report, path)
    else:
        raise TypeError(f"no writer for {type(report).__name__}")
