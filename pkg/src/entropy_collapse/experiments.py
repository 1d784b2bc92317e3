"""Experiment battery: sweeps, phase diagrams, shock response, rule comparison.

Every experiment unit (one trajectory) owns an independent RNG stream derived
from the master seed and the unit's position, so results are identical no
matter how many worker threads run them. The ``ECL_THREADS`` environment
variable caps the thread pool; 0 or unset means one worker per CPU.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence, TypeVar

import numpy as np

from .dynamics import (
    BetaSchedule,
    ConstantSchedule,
    DynamicsParams,
    ShockSchedule,
    SinusoidalSchedule,
    Trajectory,
    UpdateRule,
    _coerce_rule,
    evolve,
)
from .errors import ParameterError
from .metrics import EntropyMeasure
from .simplex import RngStream, derive_stream_index, sample_dirichlet_uniform

# Detection defaults. The plateau test window is 100 steps; 0.02 absorbs the
# slow residual contraction of sub-threshold trajectories at small n while
# staying far below the 0.5 gap between the regime bands. With noise on, the
# plateau band scales with sigma, so the effective tolerance is
# max(tol, noise_sigma).
DEFAULT_STEADY_WINDOW = 100
DEFAULT_STEADY_TOL = 0.02

# Regime bands on steady-state normalized entropy.
ADAPTIVE_MIN = 0.8
COLLAPSED_MAX = 0.3

# A sweep whose values span less than this has no detectable threshold.
MIN_TOTAL_DROP = 0.2

DEFAULT_ALPHA_GRID = tuple(i / 10 for i in range(2, 31))

_T = TypeVar("_T")
_R = TypeVar("_R")


def _worker_count() -> int:
    raw = os.environ.get("ECL_THREADS", "0")
    try:
        count = int(raw)
    except ValueError:
        raise ParameterError(f"ECL_THREADS must be an integer, got {raw!r}") from None
    if count < 0:
        raise ParameterError(f"ECL_THREADS must be >= 0, got {count}")
    if count == 0:
        return os.cpu_count() or 1
    return count


def _parallel_map(fn: Callable[[_T], _R], items: Sequence[_T]) -> list[_R]:
    """Ordered map over independent units; thread count never affects results."""
    items = list(items)
    workers = min(_worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


class Regime(str, Enum):
    ADAPTIVE = "Adaptive"
    METASTABLE = "Metastable"
    COLLAPSED = "Collapsed"


def regime_severity(regime: Regime) -> int:
    """0 for Adaptive, 1 for Metastable, 2 for Collapsed."""
    return (Regime.ADAPTIVE, Regime.METASTABLE, Regime.COLLAPSED).index(regime)


@dataclass(frozen=True)
class SteadyState:
    reached: bool
    value: float
    band: float


def detect_steady_state(
    series: Sequence[float] | np.ndarray,
    window: int = DEFAULT_STEADY_WINDOW,
    tol: float = DEFAULT_STEADY_TOL,
) -> SteadyState:
    """Plateau test on the trailing window of a series.

    reached iff (max - min) over the last `window` values is below tol;
    value is the mean over that window either way.
    """
    if window < 2:
        raise ParameterError(f"window must be >= 2, got {window}")
    if not tol > 0.0:
        raise ParameterError(f"tol must be > 0, got {tol}")
    arr = np.asarray(series, dtype=np.float64)
    if arr.ndim != 1 or arr.size < window:
        raise ParameterError(f"series needs at least window={window} values, got {arr.size}")
    tail = arr[-window:]
    band = float(tail.max() - tail.min())
    return SteadyState(reached=band < tol, value=float(tail.mean()), band=band)


def classify_regime(value: float, reached: bool) -> Regime:
    """Regime from steady-state normalized entropy.

    Adaptive and Collapsed both require a reached plateau; everything else,
    including any non-converged trajectory, is Metastable.
    """
    if reached and value >= ADAPTIVE_MIN:
        return Regime.ADAPTIVE
    if reached and value <= COLLAPSED_MAX:
        return Regime.COLLAPSED
    return Regime.METASTABLE


def estimate_alpha_c(
    alphas: Sequence[float] | np.ndarray,
    steady_values: Sequence[float] | np.ndarray,
) -> float | None:
    """Threshold estimate: midpoint of the steepest drop between grid neighbors.

    Returns None when the values span less than MIN_TOTAL_DROP, meaning the
    sweep shows no transition to locate.
    """
    a = np.asarray(alphas, dtype=np.float64)
    v = np.asarray(steady_values, dtype=np.float64)
    if a.ndim != 1 or a.size < 3:
        raise ParameterError(f"need at least 3 sweep points, got {a.size}")
    if a.shape != v.shape:
        raise ParameterError(f"alphas and values disagree in length: {a.size} vs {v.size}")
    if np.any(np.diff(a) <= 0.0):
        raise ParameterError("alphas must be strictly increasing")
    if float(v.max() - v.min()) < MIN_TOTAL_DROP:
        return None
    drops = v[:-1] - v[1:]
    i = int(np.argmax(drops))
    return float((a[i] + a[i + 1]) / 2.0)


@dataclass(frozen=True)
class SweepPoint:
    alpha: float
    steady_mean: float
    steady_std: float
    reached: bool
    regime: Regime


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    alpha_c: float | None
    rule: UpdateRule
    beta: float
    n_states: int
    noise_sigma: float
    horizon: int
    replicates: int
    master_seed: int
    window: int
    tol: float
    measure_label: str
    trajectories: tuple[Trajectory, ...] | None = None

    def alphas(self) -> np.ndarray:
        return np.array([p.alpha for p in self.points])

    def means(self) -> np.ndarray:
        return np.array([p.steady_mean for p in self.points])

    def labels(self) -> tuple[str, ...]:
        return tuple(p.regime.value for p in self.points)


def sweep_alpha(
    alphas: Sequence[float] = DEFAULT_ALPHA_GRID,
    *,
    rule: UpdateRule | str = UpdateRule.MULTIPLICATIVE,
    beta: float = 0.003,
    n_states: int = 100,
    horizon: int = 500,
    noise_sigma: float = 0.0,
    replicates: int = 10,
    master_seed: int = 42,
    schedule: BetaSchedule | None = None,
    window: int = DEFAULT_STEADY_WINDOW,
    tol: float = DEFAULT_STEADY_TOL,
    measure: EntropyMeasure | None = None,
    stream_kind: str = "sweep",
    keep_trajectories: bool = False,
) -> SweepResult:
    """Steady-state entropy across an alpha grid, averaged over replicates.

    Each replicate draws its own flat-simplex initial state and evolves it
    for `horizon` steps; the steady value comes from the trailing window of
    the chosen entropy measure (Shannon by default).
    """
    alphas = [float(a) for a in alphas]
    if len(alphas) < 3:
        raise ParameterError(f"need at least 3 alphas, got {len(alphas)}")
    if replicates < 1:
        raise ParameterError(f"replicates must be >= 1, got {replicates}")
    rule = _coerce_rule(rule)
    schedule = schedule if schedule is not None else ConstantSchedule()
    eff_tol = max(tol, noise_sigma)
    observers: tuple[EntropyMeasure, ...] = ()
    column = "entropy_norm"
    if measure is not None and measure.label != "shannon":
        observers = (measure,)
        column = measure.label

    def unit(ij: tuple[int, int]) -> tuple[SteadyState, Trajectory]:
        i, r = ij
        params = DynamicsParams(
            alpha=alphas[i], beta=beta, rule=rule, noise_sigma=noise_sigma, schedule=schedule
        )
        rng = RngStream(master_seed, derive_stream_index(stream_kind, i, r)).generator()
        p0 = sample_dirichlet_uniform(n_states, rng)
        traj = evolve(p0, params, horizon, rng, observers)
        steady = detect_steady_state(traj.column(column), window, eff_tol)
        return steady, traj

    units = [(i, r) for i in range(len(alphas)) for r in range(replicates)]
    results = _parallel_map(unit, units)

    points = []
    kept = []
    for i, alpha in enumerate(alphas):
        block = results[i * replicates : (i + 1) * replicates]
        values = np.array([s.value for s, _ in block])
        reached = all(s.reached for s, _ in block)
        mean = float(values.mean())
        points.append(
            SweepPoint(
                alpha=alpha,
                steady_mean=mean,
                steady_std=float(values.std()),
                reached=reached,
                regime=classify_regime(mean, reached),
            )
        )
        if keep_trajectories:
            kept.append(block[0][1])

    alpha_c = estimate_alpha_c(alphas, [p.steady_mean for p in points])
    return SweepResult(
        points=tuple(points),
        alpha_c=alpha_c,
        rule=rule,
        beta=beta,
        n_states=n_states,
        noise_sigma=noise_sigma,
        horizon=horizon,
        replicates=replicates,
        master_seed=master_seed,
        window=window,
        tol=eff_tol,
        measure_label=(measure.label if measure is not None else "shannon"),
        trajectories=tuple(kept) if keep_trajectories else None,
    )


@dataclass(frozen=True)
class PhaseCell:
    alpha: float
    beta: float
    steady_entropy_norm: float
    regime: Regime


@dataclass(frozen=True)
class PhaseDiagram:
    cells: tuple[PhaseCell, ...]
    alphas: tuple[float, ...]
    betas: tuple[float, ...]
    rule: UpdateRule
    n_states: int
    noise_sigma: float
    horizon: int
    replicates: int
    master_seed: int

    def cell(self, alpha: float, beta: float) -> PhaseCell:
        for c in self.cells:
            if c.alpha == alpha and c.beta == beta:
                return c
        raise KeyError(f"no cell at alpha={alpha}, beta={beta}")


def run_phase_diagram(
    alphas: Sequence[float],
    betas: Sequence[float],
    *,
    rule: UpdateRule | str = UpdateRule.MULTIPLICATIVE,
    n_states: int = 100,
    horizon: int = 500,
    noise_sigma: float = 0.0,
    replicates: int = 10,
    master_seed: int = 42,
    window: int = DEFAULT_STEADY_WINDOW,
    tol: float = DEFAULT_STEADY_TOL,
) -> PhaseDiagram:
    """Regime classification over an (alpha, beta) grid."""
    alphas = [float(a) for a in alphas]
    betas = [float(b) for b in betas]
    if not alphas or not betas:
        raise ParameterError("phase grid needs at least one alpha and one beta")
    if replicates < 1:
        raise ParameterError(f"replicates must be >= 1, got {replicates}")
    rule = _coerce_rule(rule)
    eff_tol = max(tol, noise_sigma)

    def unit(ijr: tuple[int, int, int]) -> SteadyState:
        i, j, r = ijr
        params = DynamicsParams(alpha=alphas[i], beta=betas[j], rule=rule, noise_sigma=noise_sigma)
        rng = RngStream(master_seed, derive_stream_index("phase", i, j, r)).generator()
        p0 = sample_dirichlet_uniform(n_states, rng)
        traj = evolve(p0, params, horizon, rng)
        return detect_steady_state(traj.column("entropy_norm"), window, eff_tol)

    units = [(i, j, r) for i in range(len(alphas)) for j in range(len(betas)) for r in range(replicates)]
    results = _parallel_map(unit, units)

    cells = []
    for i, alpha in enumerate(alphas):
        for j, beta in enumerate(betas):
            base = (i * len(betas) + j) * replicates
            block = results[base : base + replicates]
            mean = float(np.mean([s.value for s in block]))
            reached = all(s.reached for s in block)
            cells.append(
                PhaseCell(
                    alpha=alpha,
                    beta=beta,
                    steady_entropy_norm=mean,
                    regime=classify_regime(mean, reached),
                )
            )
    return PhaseDiagram(
        cells=tuple(cells),
        alphas=tuple(alphas),
        betas=tuple(betas),
        rule=rule,
        n_states=n_states,
        noise_sigma=noise_sigma,
        horizon=horizon,
        replicates=replicates,
        master_seed=master_seed,
    )


@dataclass(frozen=True)
class IrreversibilityReport:
    alpha: float
    beta: float
    rule: UpdateRule
    n_states: int
    horizon: int
    shock_start: int
    shock_end: int
    shock_multiplier: float
    noise_sigma: float
    master_seed: int
    replicate: int
    baseline: float
    shock_peak: float
    post_shock_floor: float
    recovery_gap: float
    dominant_share_final: float
    top5_before: float
    top5_after: float
    trajectory: Trajectory


def run_irreversibility(
    *,
    alpha: float,
    beta: float = 0.003,
    rule: UpdateRule | str = UpdateRule.MULTIPLICATIVE,
    n_states: int = 100,
    horizon: int = 300,
    shock_start: int = 50,
    shock_end: int = 100,
    shock_multiplier: float = 15.0,
    noise_sigma: float = 0.0,
    master_seed: int = 42,
    replicate: int = 0,
) -> IrreversibilityReport:
    """Collapse, apply a transient novelty surge, and measure the rebound.

    baseline is the mean normalized entropy over the 20 steps before the
    shock window, shock_peak the maximum during it, post_shock_floor the
    mean over the final 50 steps. recovery_gap = floor - baseline: near zero
    means the surge did not durably restore diversity.
    """
    if shock_start < 20:
        raise ParameterError(f"shock_start must be >= 20 to fit the baseline window, got {shock_start}")
    if horizon < shock_end + 50:
        raise ParameterError(
            f"horizon must be >= shock_end + 50 to fit the floor window, got {horizon}"
        )
    shock = ShockSchedule(start=shock_start, end=shock_end, multiplier=shock_multiplier)
    params = DynamicsParams(
        alpha=alpha, beta=beta, rule=_coerce_rule(rule), noise_sigma=noise_sigma, schedule=shock
    )
    rng = RngStream(master_seed, derive_stream_index("irrev", replicate)).generator()
    p0 = sample_dirichlet_uniform(n_states, rng)
    traj = evolve(p0, params, horizon, rng)
    series = traj.column("entropy_norm")
    baseline = float(series[shock_start - 20 : shock_start].mean())
    shock_peak = float(series[shock_start : shock_end + 1].max())
    post_floor = float(series[-50:].mean())
    return IrreversibilityReport(
        alpha=alpha,
        beta=beta,
        rule=params.rule,
        n_states=n_states,
        horizon=horizon,
        shock_start=shock_start,
        shock_end=shock_end,
        shock_multiplier=shock_multiplier,
        noise_sigma=noise_sigma,
        master_seed=master_seed,
        replicate=replicate,
        baseline=baseline,
        shock_peak=shock_peak,
        post_shock_floor=post_floor,
        recovery_gap=post_floor - baseline,
        dominant_share_final=traj.steps[-1].dominant_share,
        top5_before=traj.steps[shock_start - 1].top5_mass,
        top5_after=traj.steps[-1].top5_mass,
        trajectory=traj,
    )


@dataclass(frozen=True)
class UniversalityReport:
    alpha: float
    beta: float
    n_states: int
    horizon: int
    master_seed: int
    rules: tuple[UpdateRule, ...]
    grid: np.ndarray
    curves: dict[str, np.ndarray]
    dilations: dict[str, float]
    max_pairwise_rms: float
    trajectories: dict[str, Trajectory]


_DILATION_CANDIDATES = np.geomspace(0.05, 20.0, 4000)


def run_universality(
    *,
    alpha: float = 1.5,
    beta: float = 0.003,
    n_states: int = 100,
    horizon: int = 300,
    master_seed: int = 42,
    rules: Sequence[UpdateRule | str] = tuple(UpdateRule),
    grid_points: int = 200,
) -> UniversalityReport:
    """Overlay collapse curves of all rules after a per-rule time dilation.

    All rules evolve the same initial state. The first rule is the reference
    with dilation 1; each other rule gets the scalar dilation of its time
    axis that best matches the reference curve (least squares over a fixed
    geometric scan), and the report carries the worst pairwise RMS distance
    between the aligned curves.
    """
    rules = tuple(_coerce_rule(r) for r in rules)
    if len(rules) < 2:
        raise ParameterError(f"need at least 2 rules to compare, got {len(rules)}")
    if grid_points < 10:
        raise ParameterError(f"grid_points must be >= 10, got {grid_points}")
    init_rng = RngStream(master_seed, derive_stream_index("universal", 0)).generator()
    p0 = sample_dirichlet_uniform(n_states, init_rng)

    def unit(k: int) -> Trajectory:
        params = DynamicsParams(alpha=alpha, beta=beta, rule=rules[k])
        return evolve(p0, params, horizon)

    trajs = _parallel_map(unit, range(len(rules)))

    # Common rescaled-time axis; the scaling t * beta / alpha * 100 is shared,
    # so fitting dilations on it is identical to fitting on raw steps.
    scale = beta / alpha * 100.0
    times = np.arange(horizon + 1) * scale
    grid = np.linspace(0.0, times[-1], grid_points)

    curves: dict[str, np.ndarray] = {}
    dilations: dict[str, float] = {}
    reference = None
    for k, rule in enumerate(rules):
        series = trajs[k].column("entropy_norm")
        if k == 0:
            dilations[rule.value] = 1.0
            curves[rule.value] = np.interp(grid, times, series)
            reference = curves[rule.value]
            continue
        best_d, best_rms, best_curve = None, None, None
        for d in _DILATION_CANDIDATES:
            candidate = np.interp(grid, times / d, series)
            rms = float(np.sqrt(np.mean((candidate - reference) ** 2)))
            if best_rms is None or rms < best_rms:
                best_d, best_rms, best_curve = float(d), rms, candidate
        dilations[rule.value] = best_d
        curves[rule.value] = best_curve

    labels = [r.value for r in rules]
    max_rms = 0.0
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            rms = float(np.sqrt(np.mean((curves[labels[i]] - curves[labels[j]]) ** 2)))
            max_rms = max(max_rms, rms)

    return UniversalityReport(
        alpha=alpha,
        beta=beta,
        n_states=n_states,
        horizon=horizon,
        master_seed=master_seed,
        rules=rules,
        grid=grid,
        curves=curves,
        dilations=dilations,
        max_pairwise_rms=max_rms,
        trajectories={labels[k]: trajs[k] for k in range(len(rules))},
    )


@dataclass(frozen=True)
class SensitivityAxisPoint:
    axis: str
    setting: str
    alpha_c: float | None
    regimes: tuple[str, ...]
    labels: tuple[str, ...]


@dataclass(frozen=True)
class SensitivityReport:
    n_axis: tuple[SensitivityAxisPoint, ...]
    sigma_axis: tuple[SensitivityAxisPoint, ...]
    q_axis: tuple[SensitivityAxisPoint, ...]
    schedule_axis: tuple[SensitivityAxisPoint, ...]
    alpha_c_over_beta_spread: float | None
    noisy_transient_mean: float
    noiseless_transient_mean: float
    beta: float
    base_n: int
    horizon: int
    replicates: int
    master_seed: int
    alphas: tuple[float, ...]

    def axis_points(self) -> tuple[SensitivityAxisPoint, ...]:
        return self.n_axis + self.sigma_axis + self.q_axis + self.schedule_axis


def _axis_point(axis: str, setting: str, sweep: SweepResult) -> SensitivityAxisPoint:
    labels = sweep.labels()
    return SensitivityAxisPoint(
        axis=axis,
        setting=setting,
        alpha_c=sweep.alpha_c,
        regimes=tuple(sorted(set(labels))),
        labels=labels,
    )


def run_sensitivity(
    *,
    beta: float = 0.003,
    base_n: int = 100,
    horizon: int = 500,
    replicates: int = 10,
    master_seed: int = 42,
    alphas: Sequence[float] = DEFAULT_ALPHA_GRID,
    n_values: Sequence[int] = (10, 50, 100, 500),
    sigma_values: Sequence[float] = (0.0, 0.05, 0.1),
    q_values: Sequence[float] = (0.5, 1.0, 2.0),
    transient_alpha: float = 2.0,
    transient_sigma: float = 0.1,
) -> SensitivityReport:
    """Robustness of the threshold picture across n, noise, entropy order and
    novelty schedule, all under the multiplicative rule.

    Also probes one supercritical alpha with and without noise: the noisy
    trajectory should hold a strictly higher mean entropy after the initial
    collapse because noise keeps reinjecting spread.
    """
    alphas = tuple(float(a) for a in alphas)

    def axis_sweep(kind: str, **overrides) -> SweepResult:
        kwargs = dict(
            beta=beta,
            n_states=base_n,
            horizon=horizon,
            replicates=replicates,
            master_seed=master_seed,
            stream_kind=kind,
        )
        kwargs.update(overrides)
        return sweep_alpha(alphas, **kwargs)

    n_axis = tuple(
        _axis_point("n_states", str(n), axis_sweep(f"sense-n-{n}", n_states=n)) for n in n_values
    )
    sigma_axis = tuple(
        _axis_point("noise_sigma", f"{s:g}", axis_sweep(f"sense-sigma-{s:g}", noise_sigma=s))
        for s in sigma_values
    )
    q_axis = tuple(
        _axis_point(
            "renyi_q",
            f"{q:g}",
            axis_sweep(f"sense-q-{q:g}", measure=EntropyMeasure("renyi", q)),
        )
        for q in q_values
    )
    schedule_axis = (
        _axis_point(
            "beta_schedule", "sinusoidal", axis_sweep("sense-schedule", schedule=SinusoidalSchedule())
        ),
    )

    ratios = [p.alpha_c / beta for p in n_axis if p.alpha_c is not None]
    if len(ratios) == len(n_axis) and ratios:
        spread = (max(ratios) - min(ratios)) / (sum(ratios) / len(ratios))
    else:
        spread = None

    # Post-collapse window mean at one supercritical alpha, with and without
    # noise, from matched initial draws.
    lo, hi = 50, 150
    if horizon < hi:
        raise ParameterError(f"horizon must be >= {hi} for the transient probe, got {horizon}")
    means = []
    for idx, sigma in enumerate((0.0, transient_sigma)):
        params = DynamicsParams(alpha=transient_alpha, beta=beta, noise_sigma=sigma)
        rng = RngStream(master_seed, derive_stream_index("sense-transient", idx)).generator()
        p0 = sample_dirichlet_uniform(base_n, rng)
        traj = evolve(p0, params, horizon, rng)
        means.append(float(traj.column("entropy_norm")[lo : hi + 1].mean()))

    return SensitivityReport(
        n_axis=n_axis,
        sigma_axis=sigma_axis,
        q_axis=q_axis,
        schedule_axis=schedule_axis,
        alpha_c_over_beta_spread=spread,
        noisy_transient_mean=means[1],
        noiseless_transient_mean=means[0],
        beta=beta,
        base_n=base_n,
        horizon=horizon,
        replicates=replicates,
        master_seed=master_seed,
        alphas=alphas,
    )
