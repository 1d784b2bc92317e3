"""Deterministic simulation engine for entropy collapse in self-reinforcing
probability dynamics: update rules, diversity metrics, and a reproducible
experiment battery with a CLI."""

from .config import ExperimentConfig, load_config, serialize_config
from .dynamics import (
    ConstantSchedule,
    DynamicsParams,
    ShockSchedule,
    SinusoidalSchedule,
    Trajectory,
    UpdateRule,
    apply_feedback,
    apply_noise,
    evolve,
    expected_entropy_change,
    inject_novelty,
    step,
)
from .errors import (
    ConfigError,
    DegenerateVectorError,
    EntropyCollapseError,
    InvalidDimensionError,
    ParameterError,
)
from .experiments import (
    Regime,
    classify_regime,
    detect_steady_state,
    estimate_alpha_c,
    run_irreversibility,
    run_phase_diagram,
    run_sensitivity,
    run_universality,
    sweep_alpha,
)
from .metrics import (
    EntropyMeasure,
    dominant_share,
    effective_dimension,
    normalized_entropy,
    renyi_entropy,
    rescale_time,
    shannon_entropy,
    top_k_mass,
)
from .simplex import (
    RngStream,
    StateDistribution,
    delta,
    derive_stream_index,
    renormalize,
    sample_dirichlet_uniform,
    uniform,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConstantSchedule",
    "DegenerateVectorError",
    "DynamicsParams",
    "EntropyCollapseError",
    "EntropyMeasure",
    "ExperimentConfig",
    "InvalidDimensionError",
    "ParameterError",
    "Regime",
    "RngStream",
    "ShockSchedule",
    "SinusoidalSchedule",
    "StateDistribution",
    "Trajectory",
    "UpdateRule",
    "apply_feedback",
    "apply_noise",
    "classify_regime",
    "delta",
    "derive_stream_index",
    "detect_steady_state",
    "dominant_share",
    "effective_dimension",
    "estimate_alpha_c",
    "evolve",
    "expected_entropy_change",
    "inject_novelty",
    "load_config",
    "normalized_entropy",
    "renormalize",
    "renyi_entropy",
    "rescale_time",
    "run_irreversibility",
    "run_phase_diagram",
    "run_sensitivity",
    "run_universality",
    "sample_dirichlet_uniform",
    "serialize_config",
    "shannon_entropy",
    "step",
    "sweep_alpha",
    "top_k_mass",
    "uniform",
]
