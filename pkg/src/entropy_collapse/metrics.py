"""Diversity metrics over state distributions.

Entropies are in nats. The 0*ln(0) terms are dropped, matching the
continuous-extension convention, so point masses have entropy exactly 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .simplex import StateDistribution


def _shannon(p: np.ndarray) -> float:
    live = p[p > 0.0]
    return float(-np.sum(live * np.log(live)))


def _renyi(p: np.ndarray, q: float) -> float:
    if q == 1.0:
        return _shannon(p)
    return math.log(float(np.sum(p**q))) / (1.0 - q)


def shannon_entropy(state: StateDistribution) -> float:
    return _shannon(state.probs)


def renyi_entropy(state: StateDistribution, q: float) -> float:
    """Renyi entropy of order q > 0; continuous at q=1 where it equals Shannon."""
    if not (q > 0.0) or not math.isfinite(q):
        raise ParameterError(f"renyi order q must be finite and > 0, got {q}")
    return _renyi(state.probs, q)


def normalized_entropy(state: StateDistribution, q: float = 1.0) -> float:
    """Entropy divided by ln(n): 1.0 at uniform, 0.0 at a point mass."""
    return renyi_entropy(state, q) / math.log(state.n_states)


def effective_dimension(state: StateDistribution, order: float = 1.0) -> float:
    """exp of the order-q entropy: the equivalent number of evenly used states.

    Order 1 is perplexity; order 2 is the inverse participation ratio.
    """
    return math.exp(renyi_entropy(state, order))


def dominant_share(state: StateDistribution) -> float:
    return float(state.probs.max())


def top_k_mass(state: StateDistribution, k: int) -> float:
    """Total probability of the k most likely states."""
    n = state.n_states
    if not 1 <= k <= n:
        raise ParameterError(f"k must be in [1, {n}], got {k}")
    if k == n:
        return 1.0
    top = np.partition(state.probs, n - k)[n - k :]
    return float(np.sum(top))


def rescale_time(t: float, alpha: float, beta0: float) -> float:
    """Dimensionless time t * beta0 / alpha * 100 used to overlay trajectories."""
    if not alpha > 0.0:
        raise ParameterError(f"alpha must be > 0 to rescale time, got {alpha}")
    if not 0.0 <= beta0 <= 1.0:
        raise ParameterError(f"beta0 must be in [0, 1], got {beta0}")
    if t < 0.0:
        raise ParameterError(f"t must be >= 0, got {t}")
    return t * beta0 / alpha * 100.0


@dataclass(frozen=True)
class EntropyMeasure:
    """A named entropy functional, usable as a trajectory observer.

    kind is "shannon" or "renyi"; q is only meaningful for "renyi".
    """

    kind: str = "shannon"
    q: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("shannon", "renyi"):
            raise ParameterError(f"unknown entropy measure kind {self.kind!r}")
        if self.kind == "renyi" and (not (self.q > 0.0) or not math.isfinite(self.q)):
            raise ParameterError(f"renyi order q must be finite and > 0, got {self.q}")

    @property
    def label(self) -> str:
        if self.kind == "shannon":
            return "shannon"
        return f"renyi_{self.q:g}"

    def entropy(self, state: StateDistribution) -> float:
        if self.kind == "shannon":
            return shannon_entropy(state)
        return renyi_entropy(state, self.q)

    def normalized(self, state: StateDistribution) -> float:
        return self.entropy(state) / math.log(state.n_states)
