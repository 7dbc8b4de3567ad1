"""Command-line runs driven by a JSON configuration file.

Configuration keys (unknown keys are rejected at every level)::

    {
      "model": "mass_spring" | "double_banana" | "double_beam" | "external",
      "model_params": {...},          # BeamSpec fields, or {"factory": "pkg.mod:attr", "kwargs": {...}}
      "prior": {"mean": [...], "cov": [[...]]} | {"mean": [...], "std": s} | {"particles": "file.csv"},
      "epsilon": 0.05,
      "seed": 0,
      "flow": {"alpha": ..., "tau": ..., "N0": 100, "Na": 50, ..., "mode": "optimal"},
      "observation": {"noise_std": s, "values": [...]}
                   | {"noise_std": s, "theta_true": [...] | "prior_draw", "seed": 7},
      "output_dir": "out"
    }

Everything except ``model`` has a per-model default. Subcommands: ``run``,
``validate`` and ``oracle``.
"""
from __future__ import annotations

import argparse
import csv
import importlib
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np
from scipy.integrate import trapezoid

from .ensemble import sample_gaussian
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
from .flow import FlowConfig, FlowTrace, run_flow
from .gradients import GaussianLikelihood
from .models import (
    REFERENCE_FREQUENCIES,
    BeamSpec,
    ForwardModel,
    double_banana_model,
    double_beam_model,
    mass_spring_model,
    synthesize_observation,
)
from .transport import AmbiguitySet

MODELS = ("mass_spring", "double_banana", "double_beam", "external")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MODEL = 3
EXIT_DIVERGENCE = 4
EXIT_NUMERICAL = 5
EXIT_IO = 6
EXIT_OTHER = 1

# Step sizes that depend on the mode when not given explicitly.
_PRESETS = {
    "mass_spring": {
        "prior": {"mean": [1.0], "cov": [[0.01]]},
        "epsilon": 0.005,
        "flow": {"alpha": 3e-3},
        "tau": {"optimal": 3e-4, "worst_case": 3e-4},
        "observation": {"noise_std": [math.sqrt(0.1)], "theta_true": [1.0]},
    },
    "double_banana": {
        "prior": {"mean": [0.0, 0.0], "cov": [[1.0, 0.0], [0.0, 1.0]]},
        "epsilon": 0.05,
        "flow": {"alpha": 3e-3},
        "tau": {"optimal": 1.5e-3, "worst_case": 3e-4},
        "observation": {"noise_std": [0.3], "theta_true": "prior_draw"},
    },
    "double_beam": {
        "prior": {"mean": [1.0] * 4, "cov": (0.03 * np.eye(4)).tolist()},
        "epsilon": 0.04,
        "flow": {"alpha": 5e-5, "gradient_provider": "gp_surrogate"},
        "tau": {"optimal": 2.5e-3, "worst_case": 5e-5},
        "observation": {
            "noise_std": (0.02 * REFERENCE_FREQUENCIES).tolist(),
            "values": REFERENCE_FREQUENCIES.tolist(),
        },
    },
}

_FLOW_KEYS = {f.name for f in fields(FlowConfig)} - {"seed"}
_TOP_KEYS = {"model", "model_params", "prior", "epsilon", "seed", "flow", "observation", "output_dir"}
_PRIOR_KEYS = {"mean", "cov", "std", "particles"}
_OBS_KEYS = {"noise_std", "values", "theta_true", "seed"}
_BEAM_KEYS = {f.name for f in fields(BeamSpec)}


@dataclass(frozen=True)
class RunConfig:
    model: str
    epsilon: float
    seed: int
    prior: dict
    flow: dict
    observation: dict
    model_params: dict = field(default_factory=dict)
    output_dir: str | None = None
    base_dir: str = field(default=".", compare=False, repr=False)

    @property
    def mode(self) -> str:
        return self.flow.get("mode", "optimal")

    def flow_config(self) -> FlowConfig:
        kw = dict(self.flow)
        if kw.get("tau") is None:
            kw["tau"] = _PRESETS[self.model]["tau"][self.mode] if self.model in _PRESETS else 0.0
        if kw.get("N0") is None:
            kw["N0"] = 100  # replaced by the particle-file size at run time
        return FlowConfig(seed=self.seed, **kw)

    def with_overrides(self, mode=None, seed=None, output_dir=None) -> "RunConfig":
        cfg = self
        if mode is not None:
            cfg = replace(cfg, flow={**cfg.flow, "mode": mode})
        if seed is not None:
            cfg = replace(cfg, seed=int(seed))
        if output_dir is not None:
            cfg = replace(cfg, output_dir=str(output_dir))
        return cfg

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        return d


@dataclass(frozen=True)
class RunSummary:
    status: str
    terminal_reason: str | None
    n_records: int
    final_w2: dict
    final_functional: float | None
    model_runs: int
    resolved: dict
    elapsed_seconds: float
    error: str | None = None


# -- parsing ----------------------------------------------------------------------


def _reject_unknown(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise ConfigError(f"unknown field {where}.{extra[0]}" if where else f"unknown field {extra[0]}")


def _floats(v, name):
    try:
        arr = np.asarray(v, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be numeric") from None
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} must be finite")
    return arr


def parse_config(text: str, base_dir: str | Path = ".") -> RunConfig:
    """Parse and validate a JSON run configuration, filling per-model defaults."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    _reject_unknown(raw, _TOP_KEYS, "")
    model = raw.get("model")
    if model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {model!r}")
    preset = _PRESETS.get(model, {})

    params = raw.get("model_params", {})
    if model == "double_beam":
        _reject_unknown(params, _BEAM_KEYS, "model_params")
        try:
            params = asdict(BeamSpec(**params))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"model_params: {exc}") from None
    elif model == "external":
        _reject_unknown(params, {"factory", "kwargs"}, "model_params")
        if not isinstance(params.get("factory"), str) or ":" not in params["factory"]:
            raise ConfigError("model_params.factory must be a 'module:attribute' string")
        params = {"factory": params["factory"], "kwargs": dict(params.get("kwargs", {}))}
    elif params:
        raise ConfigError(f"unknown field model_params.{sorted(params)[0]}")

    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed must be a non-negative integer")

    eps = raw.get("epsilon", preset.get("epsilon"))
    if eps is None:
        raise ConfigError("epsilon is required for this model")
    if not isinstance(eps, (int, float)) or isinstance(eps, bool) or not (eps >= 0 and math.isfinite(eps)):
        raise ConfigError("epsilon must be a finite number >= 0")

    prior = _parse_prior(raw.get("prior", preset.get("prior")), Path(base_dir))
    flow = _parse_flow(raw.get("flow", {}), preset.get("flow", {}), prior)
    obs = _parse_observation(raw.get("observation", preset.get("observation")))

    out = raw.get("output_dir")
    if out is not None and not isinstance(out, str):
        raise ConfigError("output_dir must be a string")

    cfg = RunConfig(model, float(eps), seed, prior, flow, obs, params, out, str(base_dir))
    _check_dimensions(cfg)
    return cfg


def _parse_prior(p, base: Path) -> dict:
    if p is None:
        raise ConfigError("prior is required for this model")
    _reject_unknown(p, _PRIOR_KEYS, "prior")
    if "particles" in p:
        if set(p) != {"particles"}:
            raise ConfigError("prior.particles cannot be combined with mean/cov/std")
        path = base / p["particles"]
        if not path.is_file():
            raise ConfigError(f"prior.particles: file not found: {path}")
        return {"particles": str(p["particles"])}
    if "mean" not in p:
        raise ConfigError("prior.mean is required")
    mean = np.atleast_1d(_floats(p["mean"], "prior.mean"))
    if mean.ndim != 1:
        raise ConfigError("prior.mean must be a vector")
    if ("cov" in p) == ("std" in p):
        raise ConfigError("give exactly one of prior.cov or prior.std")
    if "std" in p:
        std = np.broadcast_to(_floats(p["std"], "prior.std"), mean.shape)
        if np.any(std <= 0):
            raise ConfigError("prior.std must be positive")
        cov = np.diag(std**2)
    else:
        cov = np.atleast_2d(_floats(p["cov"], "prior.cov"))
    if cov.shape != (mean.size, mean.size):
        raise ConfigError(f"prior.cov must be {mean.size}x{mean.size}")
    if not np.allclose(cov, cov.T) or np.linalg.eigvalsh(cov).min() <= 0:
        raise ConfigError("prior.cov must be symmetric positive definite")
    return {"mean": mean.tolist(), "cov": cov.tolist()}


def _parse_flow(f, preset, prior) -> dict:
    _reject_unknown(f, _FLOW_KEYS, "flow")
    merged = {**preset, **f}
    if "alpha" not in merged:
        raise ConfigError("flow.alpha is required for this model")
    merged.setdefault("tau", None)
    if "particles" in prior:
        merged.setdefault("N0", None)
    trial = dict(merged)
    if trial["tau"] is None:
        trial["tau"] = 0.0
    if trial.get("N0") is None:
        trial["N0"] = 100
    try:
        resolved = asdict(FlowConfig(**trial))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"flow: {exc}") from None
    resolved.pop("seed")
    resolved["tau"] = merged["tau"]
    if merged.get("N0", 0) is None:
        resolved["N0"] = None
    return resolved


def _parse_observation(o) -> dict:
    if o is None:
        raise ConfigError("observation is required for this model")
    _reject_unknown(o, _OBS_KEYS, "observation")
    if "noise_std" not in o:
        raise ConfigError("observation.noise_std is required")
    std = np.atleast_1d(_floats(o["noise_std"], "observation.noise_std"))
    if np.any(std <= 0):
        raise ConfigError("observation.noise_std must be positive")
    out = {"noise_std": std.tolist()}
    if ("values" in o) == ("theta_true" in o):
        raise ConfigError("give exactly one of observation.values or observation.theta_true")
    if "values" in o:
        if "seed" in o:
            raise ConfigError("observation.seed only applies to synthesized observations")
        out["values"] = np.atleast_1d(_floats(o["values"], "observation.values")).tolist()
    else:
        t = o["theta_true"]
        out["theta_true"] = t if t == "prior_draw" else np.atleast_1d(_floats(t, "observation.theta_true")).tolist()
        s = o.get("seed")
        if s is not None and (not isinstance(s, int) or isinstance(s, bool) or s < 0):
            raise ConfigError("observation.seed must be a non-negative integer")
        out["seed"] = s
    return out


def _check_dimensions(cfg: RunConfig):
    if cfg.model == "external" or "particles" in cfg.prior:
        return
    dim = {"mass_spring": 1, "double_banana": 2, "double_beam": 4}[cfg.model]
    if len(cfg.prior["mean"]) != dim:
        raise ConfigError(f"prior.mean has length {len(cfg.prior['mean'])}, model {cfg.model} has {dim} parameters")


def serialize_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, base_dir=path.parent)


# -- run assembly -------------------------------------------------------------------


def build_model(cfg: RunConfig) -> ForwardModel:
    if cfg.model == "mass_spring":
        return mass_spring_model()
    if cfg.model == "double_banana":
        return double_banana_model()
    if cfg.model == "double_beam":
        return double_beam_model(BeamSpec(**cfg.model_params))
    mod, _, attr = cfg.model_params["factory"].partition(":")
    try:
        factory = getattr(importlib.import_module(mod), attr)
    except (ImportError, AttributeError) as exc:
        raise ConfigError(f"cannot load model factory {cfg.model_params['factory']}: {exc}") from None
    model = factory(**cfg.model_params["kwargs"])
    if not isinstance(model, ForwardModel):
        raise ConfigError("model factory must return a ForwardModel")
    return model


def read_particles(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ConfigError(f"particle file {path} is empty")
    header, body = rows[0], rows[1:]
    cols = [i for i, h in enumerate(header) if h.startswith("theta_")]
    if not cols:
        raise ConfigError(f"particle file {path} has no theta_* columns")
    try:
        return np.array([[float(r[i]) for i in cols] for r in body])
    except (ValueError, IndexError):
        raise ConfigError(f"particle file {path} has malformed rows") from None


def _nominal(cfg: RunConfig, rng: np.random.Generator, n0: int) -> np.ndarray:
    if "particles" in cfg.prior:
        return read_particles(Path(cfg.base_dir) / cfg.prior["particles"])
    return np.asarray(sample_gaussian(cfg.prior["mean"], cfg.prior["cov"], n0, rng))


def observation(cfg: RunConfig, model: ForwardModel) -> GaussianLikelihood:
    obs = cfg.observation
    std = np.broadcast_to(np.asarray(obs["noise_std"], dtype=float), (model.n_obs,))
    if "values" in obs:
        y = np.asarray(obs["values"], dtype=float)
        if y.shape != (model.n_obs,):
            raise ConfigError(f"observation.values has {y.size} entries, model outputs {model.n_obs}")
    else:
        # Without an explicit seed, use a stream independent of the particle draws.
        if obs.get("seed") is None:
            rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(1,)))
        else:
            rng = np.random.default_rng(obs["seed"])
        theta = obs["theta_true"]
        if theta == "prior_draw":
            if "mean" not in cfg.prior:
                raise ConfigError("theta_true = 'prior_draw' needs a Gaussian prior")
            theta = rng.multivariate_normal(cfg.prior["mean"], cfg.prior["cov"], method="cholesky")
        y = synthesize_observation(model, theta, std, rng)
    return GaussianLikelihood.diagonal(y, std)


def _write_outputs(out: Path, trace: FlowTrace, summary: RunSummary | None):
    out.mkdir(parents=True, exist_ok=True)
    d = trace.nominal.shape[1]
    with open(out / "particles.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "role", "particle"] + [f"theta_{k + 1}" for k in range(d)])
        blocks = [(-1, "nominal", trace.nominal)]
        if trace.initial is not None:
            blocks += [(-1, "prior", trace.initial.prior), (-1, "posterior_approx", trace.initial.posterior)]
        for r in trace.records:
            blocks += [(r.index, "prior", r.prior), (r.index, "posterior_approx", r.posterior)]
        for it, role, arr in blocks:
            for j, row in enumerate(arr):
                w.writerow([it, role, j] + ["%.17g" % v for v in row])

    with open(out / "events.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "event", "tau", "w2", "detail"])
        for e in trace.events:
            detail = {k: v for k, v in e.items() if k not in ("iteration", "type", "tau", "w2")}
            w.writerow(
                [
                    e["iteration"],
                    e["type"],
                    "" if "tau" not in e else "%.17g" % e["tau"],
                    "" if "w2" not in e else "%.17g" % e["w2"],
                    json.dumps(detail, sort_keys=True) if detail else "",
                ]
            )

    pairs = ("nominal_prior", "nominal_posterior", "posterior_prior")
    with open(out / "diagnostics.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(
            ["iteration", "phase", "tau_used", "alpha_used"]
            + [f"w2_{p}" for p in pairs]
            + [f"w2sq_{p}" for p in pairs]
            + ["functional"]
        )
        recs = ([trace.initial] if trace.initial is not None else []) + list(trace.records)
        for r in recs:
            dists = [getattr(r, f"w2_{p}") for p in pairs]
            w.writerow(
                [r.index, r.phase, "%.17g" % r.tau_used, "%.17g" % r.alpha_used]
                + ["%.17g" % v for v in dists]
                + ["%.17g" % (v * v) for v in dists]
                + ["%.17g" % r.functional]
            )

    if summary is not None:
        (out / "summary.json").write_text(json.dumps(asdict(summary), indent=2, sort_keys=True) + "\n")


def _summary(cfg, trace, status, t0, error=None):
    if not trace.records:
        return None
    last = trace.records[-1]
    resolved = {"config": cfg.to_dict(), "flow": asdict(cfg.flow_config())}
    if cfg.model == "double_beam":
        resolved["beam"] = BeamSpec(**cfg.model_params).to_dict()
    return RunSummary(
        status=status,
        terminal_reason=trace.terminal_reason,
        n_records=len(trace.records),
        final_w2={
            "nominal_prior": last.w2_nominal_prior,
            "nominal_posterior": last.w2_nominal_posterior,
            "posterior_prior": last.w2_posterior_prior,
        },
        final_functional=last.functional,
        model_runs=trace.model_runs,
        resolved=resolved,
        elapsed_seconds=round(time.perf_counter() - t0, 3),
        error=error,
    )


def run(cfg: RunConfig) -> tuple[FlowTrace, RunSummary | None]:
    """Execute a configured run; writes outputs when ``cfg.output_dir`` is set.

    On a flow failure the partial trace is flushed with a ``failed`` summary
    and the original exception is re-raised.
    """
    t0 = time.perf_counter()
    model = build_model(cfg)
    lik = observation(cfg, model)
    rng = np.random.default_rng(cfg.seed)
    n0 = cfg.flow.get("N0") or 100
    nominal = _nominal(cfg, rng, n0)
    flow_cfg = cfg.flow_config()
    if flow_cfg.N0 != nominal.shape[0]:
        flow_cfg = replace(flow_cfg, N0=nominal.shape[0])
    if nominal.shape[1] != model.dim:
        raise ConfigError(f"prior has dimension {nominal.shape[1]}, model has {model.dim}")
    ambiguity = AmbiguitySet(nominal, cfg.epsilon)
    out = Path(cfg.base_dir) / cfg.output_dir if cfg.output_dir else None
    try:
        trace = run_flow(flow_cfg, model, lik, ambiguity, rng)
    except (DivergenceError, ModelEvaluationError) as exc:
        if out is not None and exc.trace is not None and exc.trace.initial is not None:
            _write_outputs(out, exc.trace, _summary(cfg, exc.trace, "failed", t0, str(exc)))
        raise
    summary = _summary(cfg, trace, "ok", t0)
    if out is not None:
        _write_outputs(out, trace, summary)
    return trace, summary


def reconstruct(particles_csv, iteration: int, role: str) -> np.ndarray:
    """Rebuild one ensemble from a particle table."""
    with open(particles_csv, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        k = [i for i, h in enumerate(header) if h.startswith("theta_")]
        rows = [[float(r[i]) for i in k] for r in reader if int(r[0]) == iteration and r[1] == role]
    return np.array(rows)


# -- oracle -------------------------------------------------------------------------


@dataclass(frozen=True)
class OraclePosterior:
    grid: np.ndarray
    unnormalized: np.ndarray
    density: np.ndarray
    mean: float
    std: float


def oracle_posterior_1d(cfg: RunConfig, n_grid: int = 4001, span: float = 8.0, flat_prior: bool = False) -> OraclePosterior:
    """Posterior of a one-parameter model by trapezoid quadrature on a uniform grid."""
    model = build_model(cfg)
    if model.dim != 1:
        raise ConfigError(f"the quadrature oracle needs a 1-parameter model, {cfg.model} has {model.dim}")
    if "mean" not in cfg.prior:
        raise ConfigError("the quadrature oracle needs a Gaussian prior")
    mu = float(cfg.prior["mean"][0])
    sd = math.sqrt(float(cfg.prior["cov"][0][0]))
    lik = observation(cfg, model)
    grid = np.linspace(mu - span * sd, mu + span * sd, n_grid)
    logp = np.full(n_grid, -np.inf)
    for k, t in enumerate(grid):
        try:
            r = lik.residuals(model.evaluate([t]))
        except ModelDomainError:
            continue
        logp[k] = -0.5 * float(r @ lik.whiten(r))
    if not flat_prior:
        logp += -0.5 * ((grid - mu) / sd) ** 2
    unnorm = np.exp(logp - np.max(logp))
    density = unnorm / trapezoid(unnorm, grid)
    mean = float(trapezoid(grid * density, grid))
    std = float(math.sqrt(trapezoid((grid - mean) ** 2 * density, grid)))
    return OraclePosterior(grid, unnorm, density, mean, std)


# -- entry point --------------------------------------------------------------------


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, (ModelEvaluationError, ModelDomainError)):
        return EXIT_MODEL
    if isinstance(exc, DivergenceError):
        return EXIT_DIVERGENCE
    if isinstance(exc, (FactorizationError, DegenerateEnsembleError, FarFieldError, ShapeError)):
        return EXIT_NUMERICAL
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_OTHER


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="robust-wgf", description="Robust particle flows with a W2 ambiguity set.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, text in (
        ("run", "run a flow and write particle, event and diagnostic tables"),
        ("validate", "check a config and print it with defaults filled in"),
        ("oracle", "grid posterior of a one-parameter model"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--mode", choices=("optimal", "worst"), help="prior update direction")
        p.add_argument("--seed", type=int, help="overrides the config seed")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        if name == "oracle":
            p.add_argument("--points", type=int, default=4001)
            p.add_argument("--flat-prior", action="store_true")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        mode = {"optimal": "optimal", "worst": "worst_case"}.get(args.mode)
        out = None
        if args.out is not None:
            out = str(Path(args.out).resolve())
        cfg = cfg.with_overrides(mode=mode, seed=args.seed, output_dir=out)

        if args.command == "validate":
            cfg.flow_config()
            print(serialize_config(cfg))
        elif args.command == "oracle":
            res = oracle_posterior_1d(cfg, n_grid=args.points, flat_prior=args.flat_prior)
            if cfg.output_dir:
                dest = Path(cfg.base_dir) / cfg.output_dir
                dest.mkdir(parents=True, exist_ok=True)
                with open(dest / "oracle.csv", "w", newline="") as fh:
                    w = csv.writer(fh, lineterminator="\n")
                    w.writerow(["theta", "unnormalized", "density"])
                    for row in zip(res.grid, res.unnormalized, res.density):
                        w.writerow(["%.17g" % v for v in row])
            print(json.dumps({"mean": res.mean, "std": res.std}))
        else:
            if not cfg.output_dir:
                cfg = cfg.with_overrides(output_dir=str(Path("robust_wgf_out").resolve()))
            _, summary = run(cfg)
            print(json.dumps({"status": summary.status, "terminal_reason": summary.terminal_reason,
                              "n_records": summary.n_records, "output_dir": cfg.output_dir}))
    except (RobustWGFError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
