"""The five figure kinds, each a pure plot of stored columns.

No numeric value is recomputed here: entropies, thresholds, baselines and
dilations all come from the input files, written by the simulation engine.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

from . import inputs
from .errors import InputError
from .style import RC, REGIME_COLORS, SHOCK_COLOR, plt, save

KINDS = ("trajectories", "sweep", "irreversibility", "universality", "phase")

# (xlabel, ylabel) used when the spec leaves them unset
_DEFAULT_LABELS = {
    "trajectories": ("step", "normalized entropy"),
    "sweep": ("feedback strength alpha", "steady-state normalized entropy"),
    "irreversibility": ("step", "normalized entropy"),
    "universality": ("rescaled time", "normalized entropy"),
    "phase": ("feedback strength alpha", "novelty rate beta"),
}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    xlabel: str | None = None
    ylabel: str | None = None
    title: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InputError(f"kind must be one of {', '.join(KINDS)}, got {self.kind!r}")
        if not self.inputs:
            raise InputError("at least one input file is required")
        object.__setattr__(self, "inputs", tuple(self.inputs))

    def labels(self) -> tuple[str, str]:
        dx, dy = _DEFAULT_LABELS[self.kind]
        return self.xlabel or dx, self.ylabel or dy


def _single_input(spec: FigureSpec) -> str:
    if len(spec.inputs) != 1:
        raise InputError(f"{spec.kind} takes exactly one input file, got {len(spec.inputs)}")
    return spec.inputs[0]


def _render_trajectories(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for path in spec.inputs:
        data = inputs.read_trajectory(path)
        ax.plot(data["step"], data["entropy_norm"], label=f"alpha={data['alpha'][0]!r}")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8)
    return fig, ax


def _render_sweep(spec: FigureSpec):
    data, alpha_c = inputs.read_sweep(_single_input(spec))
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.errorbar(
        data["alpha"],
        data["steady_mean"],
        yerr=data["steady_std"],
        color="#1f5673",
        linewidth=1.2,
        elinewidth=0.8,
        capsize=2,
        zorder=2,
    )
    reached = [(a, m) for a, m, r in zip(data["alpha"], data["steady_mean"], data["reached"]) if r]
    pending = [(a, m) for a, m, r in zip(data["alpha"], data["steady_mean"], data["reached"]) if not r]
    if reached:
        ax.scatter(*zip(*reached), s=14, color="#1f5673", zorder=3, label="steady")
    if pending:
        ax.scatter(
            *zip(*pending), s=14, facecolors="white", edgecolors="#1f5673", zorder=3,
            label="still drifting",
        )
    if alpha_c is not None:
        ax.axvline(alpha_c, color="#b0413e", linestyle="--", linewidth=1.0)
        ax.text(
            alpha_c, 0.98, f" alpha_c = {alpha_c!r}",
            color="#b0413e", fontsize=8, ha="left", va="top", transform=ax.get_xaxis_transform(),
        )
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8, loc="lower left")
    return fig, ax


def _render_irreversibility(spec: FigureSpec):
    if len(spec.inputs) != 2:
        raise InputError(
            f"irreversibility takes a report JSON and a trajectory CSV, got {len(spec.inputs)} files"
        )
    json_paths = [p for p in spec.inputs if p.lower().endswith(".json")]
    csv_paths = [p for p in spec.inputs if not p.lower().endswith(".json")]
    if len(json_paths) != 1:
        raise InputError("irreversibility needs exactly one .json input among the two")
    report = inputs.read_irreversibility(json_paths[0])
    traj = inputs.read_trajectory(csv_paths[0])

    fig, (top, bottom) = plt.subplots(
        2, 1, figsize=(6.4, 5.6), sharex=True, gridspec_kw={"height_ratios": [3, 2]}
    )
    top.plot(traj["step"], traj["entropy_norm"], color="#1f5673", linewidth=1.2)
    top.axvspan(report["shock_start"], report["shock_end"], color=SHOCK_COLOR, alpha=0.25,
                label=f"novelty shock x{report['shock_multiplier']!r}")
    top.axhline(report["baseline"], color="#3a7d44", linestyle="--", linewidth=0.9,
                label="pre-shock baseline")
    top.axhline(report["post_shock_floor"], color="#b0413e", linestyle=":", linewidth=1.1,
                label="post-shock floor")
    top.text(
        0.99, 0.95, f"recovery gap = {report['recovery_gap']:+.4f}",
        ha="right", va="top", fontsize=8, transform=top.transAxes,
    )
    top.set_ylim(-0.02, 1.02)
    top.legend(fontsize=7, loc="center right")

    bottom.plot(traj["step"], traj["dominant_share"], color="#b0413e", linewidth=1.1,
                label="dominant share")
    bottom.plot(traj["step"], traj["top5_mass"], color="#e0a437", linewidth=1.1,
                label="top-5 mass")
    bottom.set_ylim(-0.02, 1.02)
    bottom.set_ylabel("share of mass")
    bottom.legend(fontsize=7, loc="center right")
    return fig, top


def _render_universality(spec: FigureSpec):
    report = inputs.read_universality(_single_input(spec))
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for rule in sorted(report["curves"]):
        dilation = report["dilations"].get(rule)
        label = rule if dilation is None else f"{rule} (dilation {dilation:g})"
        ax.plot(report["grid"], report["curves"][rule], linewidth=1.2, label=label)
    ax.text(
        0.99, 0.95, f"max pairwise RMS = {report['max_pairwise_rms']:.4f}",
        ha="right", va="top", fontsize=8, transform=ax.transAxes,
    )
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8)
    return fig, ax


def _render_phase(spec: FigureSpec):
    data = inputs.read_phase(_single_input(spec))
    alphas = sorted(set(data["alpha"]))
    betas = sorted(set(data["beta"]))
    col = {a: i for i, a in enumerate(alphas)}
    row = {b: j for j, b in enumerate(betas)}

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.grid(False)
    for a, b, regime in zip(data["alpha"], data["beta"], data["regime"]):
        color = REGIME_COLORS.get(regime, "#888888")
        ax.add_patch(
            plt.Rectangle((col[a], row[b]), 1.0, 1.0, facecolor=color, edgecolor="white",
                          linewidth=1.0)
        )
    ax.set_xlim(0, len(alphas))
    ax.set_ylim(0, len(betas))
    ax.set_xticks([i + 0.5 for i in range(len(alphas))], [repr(a) for a in alphas])
    ax.set_yticks([j + 0.5 for j in range(len(betas))], [repr(b) for b in betas])
    handles = [
        plt.Rectangle((0, 0), 1, 1, facecolor=c, edgecolor="white")
        for c in REGIME_COLORS.values()
    ]
    ax.legend(handles, list(REGIME_COLORS), fontsize=8, loc="upper right")
    return fig, ax


_BUILDERS = {
    "trajectories": _render_trajectories,
    "sweep": _render_sweep,
    "irreversibility": _render_irreversibility,
    "universality": _render_universality,
    "phase": _render_phase,
}


def render(spec: FigureSpec) -> str:
    """Build the figure and write it to spec.output; returns the path."""
    with matplotlib.rc_context(RC):
        fig, ax = _BUILDERS[spec.kind](spec)
        xlabel, ylabel = spec.labels()
        if spec.kind == "irreversibility":
            fig.axes[-1].set_xlabel(xlabel)
        else:
            ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if spec.title:
            ax.set_title(spec.title)
        fig.tight_layout()
        save(fig, spec.output)
    return spec.output
