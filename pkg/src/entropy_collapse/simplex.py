"""Probability simplex primitives: validated state vectors and seeded RNG streams.

All state in the package flows through ``StateDistribution``, which enforces
the simplex invariants at construction time (non-negative entries, total mass
1 within ``SUM_TOL``, at least two states). Randomness flows through
``RngStream`` so that every experiment unit draws from an independent,
reproducible generator regardless of execution order or thread count.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVectorError, InvalidDimensionError, ParameterError

# Floor used when clamping perturbed probabilities away from zero.
EPS = 1e-15

# Tolerance on total mass for a vector to count as on the simplex.
SUM_TOL = 1e-12

# Residual pinning in renormalize converges in <= 3 rounds in practice;
# the cap only guards against pathological inputs.
_PIN_ROUNDS = 32


@dataclass(frozen=True, eq=False)
class StateDistribution:
    """A probability vector over n >= 2 discrete states.

    The wrapped array is copied and frozen; constructing one validates the
    simplex invariants and raises if they fail.
    """

    probs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.probs, dtype=np.float64).copy()
        if arr.ndim != 1 or arr.size < 2:
            raise InvalidDimensionError(
                f"state needs a 1-d vector with at least 2 entries, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise DegenerateVectorError("state contains non-finite entries")
        if np.any(arr < 0.0):
            raise DegenerateVectorError("state contains negative entries")
        total = math.fsum(arr.tolist())
        if abs(total - 1.0) > SUM_TOL:
            raise DegenerateVectorError(f"state mass {total!r} deviates from 1 beyond {SUM_TOL}")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @property
    def n_states(self) -> int:
        return self.probs.size

    def __len__(self) -> int:
        return self.probs.size


def uniform(n: int) -> StateDistribution:
    """Uniform distribution over n states; every entry equals 1/n."""
    if n < 2:
        raise InvalidDimensionError(f"need at least 2 states, got {n}")
    return StateDistribution(np.full(n, 1.0 / n))


def delta(n: int, index: int) -> StateDistribution:
    """Point mass on one state."""
    if n < 2:
        raise InvalidDimensionError(f"need at least 2 states, got {n}")
    if not 0 <= index < n:
        raise IndexError(f"index {index} out of range for {n} states")
    v = np.zeros(n)
    v[index] = 1.0
    return StateDistribution(v)


def sample_dirichlet_uniform(n: int, rng: np.random.Generator) -> StateDistribution:
    """Draw uniformly from the simplex (flat Dirichlet) via exponential spacings."""
    if n < 2:
        raise InvalidDimensionError(f"need at least 2 states, got {n}")
    return renormalize(rng.standard_exponential(n))


def _renormalize(weights: np.ndarray) -> np.ndarray:
    """Scale non-negative weights to unit mass, exactly.

    ``math.fsum`` gives the correctly rounded total, and any rounding residue
    from the division is pinned onto the largest entry until the compensated
    sum is exactly 1.0. Already-normalized input returns a copy unchanged,
    which makes the operation idempotent bit-for-bit.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size < 2:
        raise InvalidDimensionError(
            f"weights need a 1-d vector with at least 2 entries, got shape {w.shape}"
        )
    if not np.all(np.isfinite(w)):
        raise DegenerateVectorError("weights contain non-finite entries")
    if np.any(w < 0.0):
        raise DegenerateVectorError("weights contain negative entries")
    total = math.fsum(w.tolist())
    if total <= 0.0:
        raise DegenerateVectorError("weights sum to zero, nothing to normalize")
    if total == 1.0:
        return w.copy()
    out = w / total
    for _ in range(_PIN_ROUNDS):
        residue = 1.0 - math.fsum(out.tolist())
        if residue == 0.0:
            return out
        out[np.argmax(out)] += residue
    raise DegenerateVectorError("normalization failed to converge")


def renormalize(weights: np.ndarray) -> StateDistribution:
    return StateDistribution(_renormalize(weights))


def derive_stream_index(kind: str, *indices: int) -> int:
    """Map an experiment unit to a stable 64-bit stream index.

    First 8 bytes (big-endian) of sha256 over "kind:i0:i1:...". Collisions
    across a battery of a few thousand units are negligible, and the result
    does not depend on execution order.
    """
    tag = ":".join([kind, *(str(i) for i in indices)])
    digest = hashlib.sha256(tag.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class RngStream:
    """A named draw position under one master seed.

    Two streams with different indices are statistically independent; the
    same (seed, index) pair always yields the same generator.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        if self.master_seed < 0:
            raise ParameterError(f"master_seed must be >= 0, got {self.master_seed}")
        if self.stream_index < 0:
            raise ParameterError(f"stream_index must be >= 0, got {self.stream_index}")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_index,))
        return np.random.default_rng(seq)
