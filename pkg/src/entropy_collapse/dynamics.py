"""The update map and trajectory evolution.

One step applies, in order:

1. feedback: self-reinforcement with strength alpha, which concentrates mass
   on already-likely states and strictly decreases entropy;
2. novelty: mixing toward uniform at rate beta, the only entropy source;
3. noise: optional per-coordinate Gaussian jitter of scale sigma/n.

Whether feedback or novelty wins is governed by the per-rule gain g(alpha):
near-uniform log-deviations grow by (1 + g(alpha)) * (1 - beta) per step, so
trajectories contract to uniform while g < beta and escape to a concentrated
attractor once g > beta. All three update rules share this local structure
and therefore cross the threshold at the same alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ParameterError
from .metrics import EntropyMeasure, _renyi, _shannon
from .simplex import EPS, StateDistribution, _renormalize


class UpdateRule(str, Enum):
    MULTIPLICATIVE = "multiplicative"
    SOFTMAX = "softmax"
    REPLICATOR = "replicator"


# Gain calibration. The steep rules share g(alpha) = GAIN_SCALE * alpha**10,
# which crosses a base novelty rate of 0.003 at alpha close to 1.2; the tenth
# power makes the crossing sharp on a 0.1-spaced alpha grid. The replicator
# uses a shallow 1.5 exponent: its contraction then stays slow enough that
# entropy keeps strictly decreasing in float arithmetic deep into collapse
# instead of snapping onto an exactly-fixed attractor.
GAIN_SCALE = 0.003 / 1.2**10
GAIN_EXPONENT = 10.0
REPLICATOR_SCALE = 0.027
REPLICATOR_EXPONENT = 1.5


def _coerce_rule(rule: UpdateRule | str) -> UpdateRule:
    if isinstance(rule, UpdateRule):
        return rule
    try:
        return UpdateRule(rule)
    except ValueError:
        names = ", ".join(r.value for r in UpdateRule)
        raise ParameterError(f"unknown update rule {rule!r}, expected one of: {names}") from None


def gain(alpha: float, rule: UpdateRule | str) -> float:
    """Feedback gain g(alpha) >= 0 for the given rule."""
    if alpha < 0.0 or not math.isfinite(alpha):
        raise ParameterError(f"alpha must be finite and >= 0, got {alpha}")
    if _coerce_rule(rule) is UpdateRule.REPLICATOR:
        return REPLICATOR_SCALE * alpha**REPLICATOR_EXPONENT
    return GAIN_SCALE * alpha**GAIN_EXPONENT


@dataclass(frozen=True)
class ConstantSchedule:
    """Novelty rate fixed at its base value."""

    def beta_at(self, t: int, beta0: float, horizon: int) -> float:
        return beta0


@dataclass(frozen=True)
class SinusoidalSchedule:
    """Novelty rate oscillating around its base value.

    period defaults to horizon / 4 when left as None.
    """

    amplitude: float = 0.5
    period: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.amplitude <= 1.0:
            raise ParameterError(f"amplitude must be in [0, 1], got {self.amplitude}")
        if self.period is not None and not self.period > 0.0:
            raise ParameterError(f"period must be > 0, got {self.period}")

    def beta_at(self, t: int, beta0: float, horizon: int) -> float:
        period = self.period if self.period is not None else horizon / 4.0
        return beta0 * (1.0 + self.amplitude * math.sin(2.0 * math.pi * t / period))


@dataclass(frozen=True)
class ShockSchedule:
    """Novelty rate multiplied by a factor on the half-open window [start, end)."""

    start: int
    end: int
    multiplier: float

    def __post_init__(self) -> None:
        if self.start < 0 or self.end <= self.start:
            raise ParameterError(
                f"shock window needs 0 <= start < end, got [{self.start}, {self.end})"
            )
        if self.multiplier < 0.0:
            raise ParameterError(f"multiplier must be >= 0, got {self.multiplier}")

    def beta_at(self, t: int, beta0: float, horizon: int) -> float:
        if self.start <= t < self.end:
            return beta0 * self.multiplier
        return beta0


BetaSchedule = ConstantSchedule | SinusoidalSchedule | ShockSchedule


@dataclass(frozen=True)
class DynamicsParams:
    alpha: float
    beta: float
    rule: UpdateRule = UpdateRule.MULTIPLICATIVE
    noise_sigma: float = 0.0
    schedule: BetaSchedule = field(default_factory=ConstantSchedule)

    def __post_init__(self) -> None:
        if self.alpha < 0.0 or not math.isfinite(self.alpha):
            raise ParameterError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ParameterError(f"beta must be in [0, 1], got {self.beta}")
        if self.noise_sigma < 0.0 or not math.isfinite(self.noise_sigma):
            raise ParameterError(f"noise_sigma must be finite and >= 0, got {self.noise_sigma}")
        object.__setattr__(self, "rule", _coerce_rule(self.rule))


def _feedback(p: np.ndarray, alpha: float, rule: UpdateRule) -> np.ndarray:
    # Identity cases are exact: no feedback strength, or nothing to amplify.
    if alpha == 0.0 or p.min() == p.max():
        return p
    if rule is UpdateRule.MULTIPLICATIVE:
        g = GAIN_SCALE * alpha**GAIN_EXPONENT
        # Work in log space anchored at the max entry, whose weight is then
        # exactly 1: the weights can never all underflow.
        with np.errstate(divide="ignore"):
            logp = np.log(p)
        w = np.exp((1.0 + g) * (logp - logp.max()))
    elif rule is UpdateRule.SOFTMAX:
        g = GAIN_SCALE * alpha**GAIN_EXPONENT
        z = g * p.size * p
        w = p * np.exp(z - z.max())
    else:
        g = REPLICATOR_SCALE * alpha**REPLICATOR_EXPONENT
        mean_fitness = float(np.sum(p * p))
        w = p * (1.0 + g * (p - mean_fitness) / p.max())
        # Large gains can push the least-fit entries slightly negative.
        w = np.where(w < 0.0, EPS, w)
    return _renormalize(w)


def _novelty(p: np.ndarray, beta: float) -> np.ndarray:
    if beta == 0.0:
        return p
    # Fused form p + beta * (u - p) is exact at beta = 0 and at p = u, and
    # moves total mass by at most a few ulps, so no renormalization here.
    return p + beta * (1.0 / p.size - p)


def _noise(p: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    if sigma == 0.0:
        return p
    jittered = p + rng.normal(0.0, sigma / p.size, p.size)
    return _renormalize(np.maximum(jittered, EPS))


def apply_feedback(state: StateDistribution, alpha: float, rule: UpdateRule | str) -> StateDistribution:
    """Self-reinforcement update; preserves the simplex and never raises entropy."""
    if alpha < 0.0 or not math.isfinite(alpha):
        raise ParameterError(f"alpha must be finite and >= 0, got {alpha}")
    return StateDistribution(_feedback(state.probs, alpha, _coerce_rule(rule)))


def inject_novelty(state: StateDistribution, beta: float) -> StateDistribution:
    """Mix toward uniform at rate beta; total variation moved is at most beta."""
    if not 0.0 <= beta <= 1.0:
        raise ParameterError(f"beta must be in [0, 1], got {beta}")
    return StateDistribution(_novelty(state.probs, beta))


def apply_noise(state: StateDistribution, sigma: float, rng: np.random.Generator | None = None) -> StateDistribution:
    """Gaussian perturbation of scale sigma/n, clamped away from zero, renormalized."""
    if sigma < 0.0 or not math.isfinite(sigma):
        raise ParameterError(f"sigma must be finite and >= 0, got {sigma}")
    if sigma > 0.0 and rng is None:
        raise ParameterError("sigma > 0 requires an rng")
    return StateDistribution(_noise(state.probs, sigma, rng))


def step(
    state: StateDistribution,
    params: DynamicsParams,
    rng: np.random.Generator | None = None,
    t: int = 0,
) -> StateDistribution:
    """One full update: feedback, then novelty at the scheduled rate, then noise."""
    if params.noise_sigma > 0.0 and rng is None:
        raise ParameterError("noise_sigma > 0 requires an rng")
    beta = _beta_checked(params, t, horizon=t + 1)
    p = _feedback(state.probs, params.alpha, params.rule)
    p = _novelty(p, beta)
    p = _noise(p, params.noise_sigma, rng)
    return StateDistribution(p)


def _beta_checked(params: DynamicsParams, t: int, horizon: int) -> float:
    beta = params.schedule.beta_at(t, params.beta, horizon)
    if not 0.0 <= beta <= 1.0:
        raise ParameterError(f"effective beta {beta} at step {t} is outside [0, 1]")
    return beta


@dataclass(frozen=True)
class TrajectoryStep:
    step: int
    beta_effective: float
    entropy: float
    entropy_norm: float
    dominant_share: float
    top5_mass: float
    eff_dim_order1: float
    eff_dim_order2: float
    extras: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class Trajectory:
    """Recorded evolution: one row per step from 0 (initial) to horizon.

    Row t's beta_effective is the novelty rate in force when leaving step t.
    extras holds observer columns keyed by the observer's label.
    """

    params: DynamicsParams
    n_states: int
    horizon: int
    steps: tuple[TrajectoryStep, ...]
    final_state: StateDistribution
    observer_labels: tuple[str, ...] = ()

    def column(self, name: str) -> np.ndarray:
        if self.steps and name in self.steps[0].extras:
            return np.array([s.extras[name] for s in self.steps])
        return np.array([getattr(s, name) for s in self.steps])


def _record(
    t: int,
    beta: float,
    p: np.ndarray,
    log_n: float,
    k_top: int,
    observers: tuple[EntropyMeasure, ...],
) -> TrajectoryStep:
    h = _shannon(p)
    h2 = _renyi(p, 2.0)
    top = float(np.sum(np.partition(p, p.size - k_top)[p.size - k_top :]))
    extras = {m.label: _renyi(p, m.q if m.kind == "renyi" else 1.0) / log_n for m in observers}
    return TrajectoryStep(
        step=t,
        beta_effective=beta,
        entropy=h,
        entropy_norm=h / log_n,
        dominant_share=float(p.max()),
        top5_mass=top,
        eff_dim_order1=math.exp(h),
        eff_dim_order2=math.exp(h2),
        extras=extras,
    )


def evolve(
    initial: StateDistribution,
    params: DynamicsParams,
    horizon: int,
    rng: np.random.Generator | None = None,
    observers: tuple[EntropyMeasure, ...] = (),
) -> Trajectory:
    """Run the update map for `horizon` steps, recording metrics at every step.

    With noise off the trajectory is a pure function of (initial, params,
    horizon); with noise on it additionally depends only on the generator's
    state, so callers seed one generator per trajectory for reproducibility.
    """
    if horizon < 1:
        raise ParameterError(f"horizon must be >= 1, got {horizon}")
    if params.noise_sigma > 0.0 and rng is None:
        raise ParameterError("noise_sigma > 0 requires an rng")
    n = initial.n_states
    log_n = math.log(n)
    k_top = min(5, n)
    p = initial.probs
    rows = [_record(0, _beta_checked(params, 0, horizon), p, log_n, k_top, observers)]
    for t in range(horizon):
        beta = _beta_checked(params, t, horizon)
        p = _feedback(p, params.alpha, params.rule)
        p = _novelty(p, beta)
        if params.noise_sigma > 0.0:
            p = _noise(p, params.noise_sigma, rng)
        rows.append(_record(t + 1, _beta_checked(params, t + 1, horizon), p, log_n, k_top, observers))
    return Trajectory(
        params=params,
        n_states=n,
        horizon=horizon,
        steps=tuple(rows),
        final_state=StateDistribution(p),
        observer_labels=tuple(m.label for m in observers),
    )


def expected_entropy_change(
    state: StateDistribution,
    params: DynamicsParams,
    rng: np.random.Generator | None = None,
    t: int = 0,
) -> float:
    """Entropy delta H(step(P)) - H(P) for one update from the given state."""
    before = _shannon(state.probs)
    after = _shannon(step(state, params, rng, t).probs)
    return after - before
