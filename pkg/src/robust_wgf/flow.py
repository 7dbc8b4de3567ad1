"""Interacting particle flows for the posterior approximation and the prior.

One iteration moves the posterior ensemble along

    theta <- theta + alpha * (score_prior(theta) + grad loglik(theta) - score_post(theta))

and, once the warm-up phase is over, moves the prior ensemble by ``tau`` times a
ratio-weighted score difference. Prior proposals that leave the W2 ball around
the nominal ensemble are discarded and retried with a smaller ``tau``. Repeated
discards trigger a reset of the prior to an earlier snapshot.

Phases: 1 warm-up (static prior), 2 interacting, 3 cool-down (static prior).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .ensemble import KernelConfig, as_array, kde_log_density, kde_score, median_bandwidth
from .errors import (
    DivergenceError,
    FarFieldError,
    ModelDomainError,
    ModelEvaluationError,
    ShapeError,
)
from .gradients import GaussianLikelihood, ensemble_jacobian, log_likelihood, loglik_gradient
from .ratio import DensityRatioModel, RatioSettings, evaluate_ratio, fit_density_ratio
from .surrogate import gp_fit, gp_mean_gradient, potential
from .transport import AmbiguitySet, w2_distance

MODES = ("optimal", "worst_case")
GRADIENT_PROVIDERS = ("ensemble_jacobian", "gp_surrogate")
RATIO_ESTIMATORS = ("rulsif", "kde_ratio")


@dataclass(frozen=True)
class FlowConfig:
    alpha: float
    tau: float
    N0: int = 100
    Na: int = 50
    Nb: int = 5
    Nc: int = 10
    Nreset: int = 2
    Nmax: int = 400
    mode: str = "optimal"
    halving: float = 0.5
    min_tau: float = 1e-12
    gradient_provider: str = "ensemble_jacobian"
    ratio_estimator: str = "rulsif"
    seed: int = 0
    restore_tau: bool = True
    half_gradient: bool = False
    gp_hyper: str = "heuristic"
    workers: int | None = None

    def __post_init__(self):
        if not (self.alpha > 0 and np.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (self.tau >= 0 and np.isfinite(self.tau)):
            raise ValueError(f"tau must be non-negative, got {self.tau}")
        for name, low in (("N0", 2), ("Na", 1), ("Nb", 1), ("Nc", 1), ("Nreset", 0), ("Nmax", 1)):
            v = getattr(self, name)
            if int(v) != v or v < low:
                raise ValueError(f"{name} must be an integer >= {low}, got {v}")
        if not 0 < self.halving < 1:
            raise ValueError("halving factor must lie in (0, 1)")
        if not self.min_tau > 0:
            raise ValueError("min_tau must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.gradient_provider not in GRADIENT_PROVIDERS:
            raise ValueError(f"gradient_provider must be one of {GRADIENT_PROVIDERS}")
        if self.ratio_estimator not in RATIO_ESTIMATORS:
            raise ValueError(f"ratio_estimator must be one of {RATIO_ESTIMATORS}")
        if self.gp_hyper not in ("heuristic", "marginal_likelihood"):
            raise ValueError("gp_hyper must be 'heuristic' or 'marginal_likelihood'")


@dataclass(frozen=True)
class IterationRecord:
    index: int
    phase: int
    posterior: np.ndarray
    prior: np.ndarray
    tau_used: float
    alpha_used: float
    w2_nominal_prior: float
    w2_nominal_posterior: float
    w2_posterior_prior: float
    functional: float
    events: tuple = ()


@dataclass
class FlowTrace:
    records: list = field(default_factory=list)
    terminal_reason: str | None = None
    initial: IterationRecord | None = None
    nominal: np.ndarray | None = None
    model_runs: int = 0

    @property
    def events(self) -> list:
        return [dict(e, iteration=r.index) for r in self.records for e in r.events]

    def functional_at(self, k: int) -> float:
        """Functional of the state entering iteration ``k`` (``k = 0`` is the initial state)."""
        return self.initial.functional if k == 0 else self.records[k - 1].functional


# -- single steps ---------------------------------------------------------------


def _kernels(kernel, prior, posterior):
    """Resolve ``(prior_kernel, posterior_kernel)``; None means median heuristic per ensemble."""
    if isinstance(kernel, tuple):
        return kernel
    if kernel is not None:
        return kernel, kernel
    kp = KernelConfig(median_bandwidth(prior)) if prior is not None else None
    return kp, KernelConfig(median_bandwidth(posterior))


def _finite_or_raise(x, what, iteration):
    if not np.all(np.isfinite(x)):
        raise DivergenceError(f"{what} produced non-finite particles", iteration=iteration)
    return x


def posterior_step(posterior, prior, loglik_grads, alpha, kernel=None, iteration=None) -> np.ndarray:
    """One explicit Euler step of the posterior particles.

    ``prior=None`` drops the prior score; use it when ``loglik_grads`` already
    carries the full unnormalised-posterior gradient. ``kernel`` is a
    :class:`KernelConfig`, a ``(prior, posterior)`` pair of them, or None.
    """
    theta = as_array(posterior)
    grads = np.asarray(loglik_grads, dtype=float).reshape(theta.shape)
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if alpha == 0:
        return theta.copy()
    drift = grads.copy()
    if theta.shape[0] > 1:
        # A lone particle has zero self-score, and no bandwidth to estimate.
        kq = _kernels(kernel, None, theta)[1]
        drift -= kde_score(theta, theta, kq)
    if prior is not None:
        p = as_array(prior)
        if p.shape[1] != theta.shape[1]:
            raise ShapeError("prior and posterior dimensions differ")
        kp = _kernels(kernel, None, theta)[0] if kernel is not None else KernelConfig(median_bandwidth(p))
        drift += kde_score(theta, p, kp)
    with np.errstate(over="ignore", invalid="ignore"):
        out = theta + alpha * drift
    return _finite_or_raise(out, "posterior step", iteration)


def prior_displacement(prior, posterior, tau, mode, ratio_model, kernel=None) -> np.ndarray:
    """Signed prior update ``+-tau * g * (score_post - score_prior)`` at each prior particle.

    ``optimal`` moves particles towards regions of high posterior-approximation
    density; ``worst_case`` is the exact negation. ``ratio_model`` is a fitted
    :class:`DensityRatioModel`, a callable, or None for ``g = 1``.
    """
    p = as_array(prior)
    if tau < 0:
        raise ValueError("tau must be non-negative")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if tau == 0:
        return np.zeros_like(p)
    q = as_array(posterior)
    kp, kq = _kernels(kernel, p, q)
    if ratio_model is None:
        g = np.ones(p.shape[0])
    elif isinstance(ratio_model, DensityRatioModel):
        g = evaluate_ratio(ratio_model, p)
    else:
        g = np.asarray(ratio_model(p), dtype=float).ravel()
    step = tau * (g[:, None] * (kde_score(p, q, kq) - kde_score(p, p, kp)))
    return step if mode == "optimal" else -step


def prior_step(prior, posterior, tau, mode, ratio_model, kernel=None, iteration=None) -> np.ndarray:
    """Prior particles after one step; see :func:`prior_displacement`."""
    p = as_array(prior)
    if tau == 0:
        return p.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        out = p + prior_displacement(p, posterior, tau, mode, ratio_model, kernel)
    return _finite_or_raise(out, "prior step", iteration)


def functional_estimate(posterior, prior, loglik_values, kernel=None) -> float:
    """Monte Carlo estimate of ``E_q[log q - log p - log L]`` over the posterior particles."""
    q, p = as_array(posterior), as_array(prior)
    ll = np.asarray(loglik_values, dtype=float).ravel()
    if ll.size != q.shape[0]:
        raise ShapeError(f"{ll.size} log-likelihood values for {q.shape[0]} particles")
    kp, kq = _kernels(kernel, p, q)
    log_q = kde_log_density(q, q, kq)
    log_p = kde_log_density(q, p, kp)
    return float(np.mean(log_q - log_p - ll))


# -- driver ---------------------------------------------------------------------


def _evaluate(model, particles, iteration, trace, workers):
    try:
        out = model.evaluate_batch(particles, workers=workers)
    except (ModelDomainError, FloatingPointError, ValueError, ArithmeticError) as exc:
        bad = None
        for k, th in enumerate(particles):
            try:
                model.evaluate(th)
            except Exception:  # noqa: BLE001 - locating the failing particle only
                bad = k
                break
        raise ModelEvaluationError(
            f"model evaluation failed at iteration {iteration}, particle {bad}: {exc}",
            particle=None if bad is None else particles[bad].copy(),
            iteration=iteration,
            trace=trace,
        ) from exc
    if not np.all(np.isfinite(out)):
        bad = int(np.flatnonzero(~np.all(np.isfinite(out), axis=1))[0])
        raise ModelEvaluationError(
            f"model returned non-finite output at iteration {iteration}, particle {bad}",
            particle=particles[bad].copy(),
            iteration=iteration,
            trace=trace,
        )
    trace.model_runs += len(particles)
    return out


def _loglik_grad(config, lik, particles, outputs):
    if config.gradient_provider == "ensemble_jacobian":
        jac = ensemble_jacobian(particles, outputs)
        return loglik_gradient(lik, jac, outputs, half_gradient=config.half_gradient)
    gp = gp_fit(particles, potential(lik, outputs), config.gp_hyper)
    return -gp_mean_gradient(gp, particles)


def _record(index, phase, posterior, prior, nominal, tau, alpha, ll, events):
    posterior.setflags(write=False)
    prior.setflags(write=False)
    return IterationRecord(
        index=index,
        phase=phase,
        posterior=posterior,
        prior=prior,
        tau_used=float(tau),
        alpha_used=float(alpha),
        w2_nominal_prior=w2_distance(nominal, prior)[0],
        w2_nominal_posterior=w2_distance(nominal, posterior)[0],
        w2_posterior_prior=w2_distance(posterior, prior)[0],
        functional=functional_estimate(posterior, prior, ll),
        events=tuple(events),
    )


def run_flow(
    config: FlowConfig,
    model,
    lik: GaussianLikelihood,
    ambiguity: AmbiguitySet,
    rng: np.random.Generator | None = None,
) -> FlowTrace:
    """Run the three-phase interacting flow starting from the nominal particles.

    The nominal ensemble of ``ambiguity`` supplies the shared initial particles
    for both the prior and the posterior approximation. ``rng`` continues the
    generator that drew them; by default a fresh one is seeded from ``config``.
    """
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    nominal = as_array(ambiguity.nominal).copy()
    nominal.setflags(write=False)
    if nominal.shape[0] != config.N0:
        raise ShapeError(f"nominal ensemble has {nominal.shape[0]} particles, config says N0 = {config.N0}")
    if nominal.shape[1] != model.dim:
        raise ShapeError(f"nominal ensemble has dimension {nominal.shape[1]}, model expects {model.dim}")
    eps = ambiguity.radius

    trace = FlowTrace(nominal=nominal)
    prior = nominal.copy()
    posterior = nominal.copy()
    outputs = _evaluate(model, posterior, 0, trace, config.workers)
    ll = log_likelihood(lik, outputs)
    trace.initial = _record(-1, 1, posterior.copy(), prior.copy(), nominal, 0.0, 0.0, ll, ())

    history = [prior]  # history[j] is the prior entering iteration j
    phase = 1
    tau = config.tau
    discards = 0
    resets = 0
    cooldown_left = config.Na

    enter_cooldown = False

    for i in range(config.Nmax):
        events = []
        if phase == 1 and i >= config.Na:
            phase = 2 if config.Nreset > 0 else 3
            events.append({"type": "phase_change", "to": phase})
        elif enter_cooldown and phase == 2:
            phase = 3
            events.append({"type": "phase_change", "to": 3})
        tau_used = 0.0

        try:
            if phase == 2:
                ratio = fit_density_ratio(
                    posterior,
                    prior,
                    RatioSettings(method=config.ratio_estimator, seed=int(rng.integers(2**32))),
                )
                kernels = (KernelConfig(median_bandwidth(prior)), KernelConfig(median_bandwidth(posterior)))
                while True:
                    candidate = prior_step(prior, posterior, tau, config.mode, ratio, kernels, iteration=i)
                    dist, _ = w2_distance(nominal, candidate)
                    if dist <= eps:
                        prior, tau_used = candidate, tau
                        break
                    discards += 1
                    events.append({"type": "discarded", "tau": tau, "w2": dist})
                    if discards >= config.Nb:
                        back = max(i - config.Nc, 0)
                        prior = history[back]
                        resets += 1
                        discards = 0
                        if config.restore_tau:
                            tau = config.tau
                        events.append({"type": "reset", "to_iteration": back - 1, "resets": resets})
                        enter_cooldown = resets >= config.Nreset
                        break
                    tau *= config.halving
                    if tau < config.min_tau:
                        events.append({"type": "tau_floor", "tau": tau})
                        break
                    events.append({"type": "halved", "tau": tau})

            grads = _loglik_grad(config, lik, posterior, outputs)
            posterior = posterior_step(posterior, prior, grads, config.alpha, iteration=i)
        except FarFieldError as exc:
            raise DivergenceError(f"iteration {i}: {exc}", iteration=i, trace=trace) from exc
        except DivergenceError as exc:
            exc.trace = trace
            raise

        prior = np.array(prior, copy=True)
        history.append(prior)
        outputs = _evaluate(model, posterior, i + 1, trace, config.workers)
        ll = log_likelihood(lik, outputs)
        trace.records.append(
            _record(i, phase, posterior.copy(), prior.copy(), nominal, tau_used, config.alpha, ll, events)
        )

        if phase == 3:
            cooldown_left -= 1
            if cooldown_left == 0:
                trace.terminal_reason = "resets_exhausted_plus_cooldown"
                return trace

    trace.terminal_reason = "max_iterations"
    return trace


def with_mode(config: FlowConfig, mode: str) -> FlowConfig:
    return replace(config, mode=mode)
