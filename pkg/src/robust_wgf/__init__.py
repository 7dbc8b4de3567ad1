"""Robust Bayesian inference with interacting Wasserstein gradient flows."""
from .cli import RunConfig, oracle_posterior_1d, parse_config, run, serialize_config
from .ensemble import (
    KernelConfig,
    ParticleEnsemble,
    Role,
    gaussian_kernel,
    kde_log_density,
    kde_score,
    median_bandwidth,
    sample_gaussian,
)
from .errors import (
    ConfigError,
    DegenerateEnsembleError,
    DivergenceError,
    FactorizationError,
    FarFieldError,
    ModelDomainError,
    ModelEvaluationError,
    RobustWGFError,
    ShapeError,
)
from .flow import (
    FlowConfig,
    FlowTrace,
    IterationRecord,
    functional_estimate,
    posterior_step,
    prior_displacement,
    prior_step,
    run_flow,
)
from .gradients import GaussianLikelihood, JacobianEstimate, ensemble_jacobian, log_likelihood, loglik_gradient
from .models import (
    REFERENCE_FREQUENCIES,
    BeamSpec,
    ForwardModel,
    ModalResult,
    beam_assemble,
    beam_frequencies,
    double_banana_forward,
    double_banana_model,
    double_beam_model,
    linear_model,
    mass_spring_forward,
    mass_spring_model,
    resolve_beam_configuration,
    synthesize_observation,
)
from .ratio import DensityRatioModel, RatioSettings, evaluate_ratio, fit_density_ratio
from .surrogate import GpSurrogate, gp_fit, gp_mean_gradient, potential
from .transport import AmbiguitySet, TransportPlan, w2_distance, within_ambiguity

__all__ = [
    "AmbiguitySet",
    "beam_assemble",
    "beam_frequencies",
    "BeamSpec",
    "ConfigError",
    "DegenerateEnsembleError",
    "DensityRatioModel",
    "DivergenceError",
    "double_banana_forward",
    "double_banana_model",
    "double_beam_model",
    "ensemble_jacobian",
    "evaluate_ratio",
    "FactorizationError",
    "FarFieldError",
    "fit_density_ratio",
    "FlowConfig",
    "FlowTrace",
    "ForwardModel",
    "functional_estimate",
    "gaussian_kernel",
    "GaussianLikelihood",
    "gp_fit",
    "gp_mean_gradient",
    "GpSurrogate",
    "IterationRecord",
    "JacobianEstimate",
    "kde_log_density",
    "kde_score",
    "KernelConfig",
    "linear_model",
    "log_likelihood",
    "loglik_gradient",
    "mass_spring_forward",
    "mass_spring_model",
    "median_bandwidth",
    "ModalResult",
    "ModelDomainError",
    "ModelEvaluationError",
    "oracle_posterior_1d",
    "parse_config",
    "ParticleEnsemble",
    "posterior_step",
    "potential",
    "prior_displacement",
    "prior_step",
    "RatioSettings",
    "REFERENCE_FREQUENCIES",
    "resolve_beam_configuration",
    "RobustWGFError",
    "Role",
    "run",
    "run_flow",
    "RunConfig",
    "sample_gaussian",
    "serialize_config",
    "ShapeError",
    "synthesize_observation",
    "TransportPlan",
    "w2_distance",
    "within_ambiguity",
]

__version__ = "0.1.0"
