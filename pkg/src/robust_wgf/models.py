"""Forward models: 1-DOF mass-spring, log-Rosenbrock "double banana", and a
two-beam finite-element structure linked by spring fixtures.

Beam model
----------
Both beams share the axial coordinate ``x in [0, L]`` and are discretised with
cubic-Hermite Euler-Bernoulli elements (transverse deflection ``w`` and
rotation ``phi`` per node). Each fixture couples the two beams at one station
through three springs:

* ``k1`` on relative deflection ``w_A - w_B``;
* ``k2`` on relative rotation ``phi_A - phi_B``;
* ``k3`` on interface slip. With no axial DOFs the slip between the bottom fibre
  of beam A and the top fibre of beam B is ``(t_A / 2) phi_A + (t_B / 2) phi_B``
  (``"interlayer_slip"``). Two alternatives are kept for comparison:
  ``"parallel_translational"`` puts ``k3`` in parallel with ``k1`` and
  ``"rotational_lever"`` puts it on relative rotation with a unit lever arm.

Uncertain parameters scale the nominal properties as
``k2 = k2_0 theta_1``, ``k3 = k3_0 theta_2``, ``k1 = k1_0 theta_3`` and
``E = E_0 theta_4``.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.linalg import eigh, null_space

from .errors import FactorizationError, ModelDomainError, ShapeError

# Reference natural frequencies (Hz) of the coupled beams at theta = (1, 1, 1, 1).
REFERENCE_FREQUENCIES = np.array([16.0, 50.2, 92.8, 134.6, 245.3, 260.7, 428.0, 478.6])

RIGID_MODE_HZ = 1e-4


@dataclass(frozen=True)
class ForwardModel:
    """Deterministic map from a ``dim``-vector to an ``n_obs``-vector."""

    name: str
    dim: int
    n_obs: int
    func: Callable[[np.ndarray], np.ndarray]
    concurrency_safe: bool = True
    metadata: dict = field(default_factory=dict)

    def evaluate(self, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if theta.shape != (self.dim,):
            raise ShapeError(f"{self.name} expects a {self.dim}-vector, got shape {theta.shape}")
        out = np.atleast_1d(np.asarray(self.func(theta), dtype=float))
        if out.shape != (self.n_obs,):
            raise ShapeError(f"{self.name} returned shape {out.shape}, expected ({self.n_obs},)")
        return out

    __call__ = evaluate

    def evaluate_batch(self, thetas, workers: int | None = None) -> np.ndarray:
        """Evaluate row by row; threads are used only if the model declares itself safe."""
        thetas = np.asarray(thetas, dtype=float).reshape(-1, self.dim)
        if workers and workers > 1 and self.concurrency_safe:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(self.evaluate, thetas))
        else:
            rows = [self.evaluate(t) for t in thetas]
        return np.vstack(rows) if rows else np.empty((0, self.n_obs))


# -- analytic models ------------------------------------------------------------


def mass_spring_forward(theta) -> float:
    """Angular frequency ``sqrt(k / m)`` with ``m = 1`` and stiffness ``k = theta``."""
    k = float(np.ravel(theta)[0])
    if not k > 0:
        raise ModelDomainError(f"spring stiffness must be positive, got {k}")
    return np.sqrt(k)


def double_banana_forward(theta) -> float:
    t1, t2 = np.ravel(theta)[:2]
    arg = (1.0 - t1) ** 2 + 100.0 * (t2 - t1**2) ** 2
    if arg <= 0.0:
        raise ModelDomainError(f"log-Rosenbrock argument vanishes at theta = ({t1}, {t2})")
    return float(np.log(arg))


def mass_spring_model() -> ForwardModel:
    return ForwardModel("mass_spring", 1, 1, mass_spring_forward)


def double_banana_model() -> ForwardModel:
    return ForwardModel("double_banana", 2, 1, double_banana_forward)


def synthesize_observation(model: ForwardModel, theta_true, noise_sigma, seed) -> np.ndarray:
    """``PM(theta_true)`` plus one draw of independent zero-mean Gaussian noise."""
    clean = model.evaluate(theta_true)
    sigma = np.broadcast_to(np.asarray(noise_sigma, dtype=float), clean.shape)
    if np.any(sigma < 0):
        raise ValueError("noise standard deviations must be non-negative")
    rng = np.random.default_rng(seed)
    return clean + sigma * rng.standard_normal(clean.shape)


# -- coupled beams --------------------------------------------------------------

BOUNDARY_CONDITIONS = ("free-free", "clamped-clamped", "clamped-free")
FIXTURE_MAPPINGS = ("interlayer_slip", "parallel_translational", "rotational_lever")
ATTACHMENTS = ("conforming", "nearest_node")


@dataclass(frozen=True)
class BeamSpec:
    """Geometry, material and fixture data for the two-beam structure (SI units)."""

    thickness_a: float = 6e-3
    thickness_b: float = 3e-3
    width: float = 25e-3
    length: float = 0.6
    offset_1: float = 20e-3
    offset_2: float = 20e-3
    youngs_modulus: float = 210e9
    density: float = 7800.0
    k1: float = 100e6
    k2: float = 500.0
    k3: float = 10e6
    elements_per_beam: int = 200
    boundary: str = "free-free"
    fixture: str = "interlayer_slip"
    attachment: str = "conforming"

    def __post_init__(self):
        for name in ("thickness_a", "thickness_b", "width", "length", "youngs_modulus", "density"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("k1", "k2", "k3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not (0 <= self.offset_1 < self.length and 0 <= self.offset_2 < self.length):
            raise ValueError("fixture offsets must lie inside the beam")
        if int(self.elements_per_beam) < 4:
            raise ValueError("need at least 4 elements per beam")
        if self.boundary not in BOUNDARY_CONDITIONS:
            raise ValueError(f"boundary must be one of {BOUNDARY_CONDITIONS}")
        if self.fixture not in FIXTURE_MAPPINGS:
            raise ValueError(f"fixture must be one of {FIXTURE_MAPPINGS}")
        if self.attachment not in ATTACHMENTS:
            raise ValueError(f"attachment must be one of {ATTACHMENTS}")

    def to_dict(self) -> dict:
        return asdict(self)

    def scaled(self, theta) -> "BeamSpec":
        """Spec with the four uncertain parameters applied."""
        theta = np.asarray(theta, dtype=float).ravel()
        if theta.shape != (4,):
            raise ShapeError(f"beam model takes 4 parameters, got {theta.size}")
        if not np.all(theta > 0):
            raise ModelDomainError(f"beam parameters must be positive, got {theta.tolist()}")
        return replace(
            self,
            k2=self.k2 * theta[0],
            k3=self.k3 * theta[1],
            k1=self.k1 * theta[2],
            youngs_modulus=self.youngs_modulus * theta[3],
        )


@dataclass(frozen=True)
class ModalResult:
    frequencies: np.ndarray
    stiffness: np.ndarray
    mass: np.ndarray
    n_rigid: int = 0


def _mesh(spec: BeamSpec) -> tuple[np.ndarray, list[int]]:
    L = spec.length
    x = np.linspace(0.0, L, int(spec.elements_per_beam) + 1)
    stations = [spec.offset_1, L - spec.offset_2]
    if spec.attachment == "conforming":
        tol = 1e-9 * L
        for s in stations:
            if np.min(np.abs(x - s)) > tol:
                x = np.sort(np.append(x, s))
    nodes = [int(np.argmin(np.abs(x - s))) for s in stations]
    return x, nodes


def _element_matrices(E, I, rhoA, dx):
    k = (E * I / dx**3) * np.array(
        [
            [12.0, 6 * dx, -12.0, 6 * dx],
            [6 * dx, 4 * dx**2, -6 * dx, 2 * dx**2],
            [-12.0, -6 * dx, 12.0, -6 * dx],
            [6 * dx, 2 * dx**2, -6 * dx, 4 * dx**2],
        ]
    )
    m = (rhoA * dx / 420.0) * np.array(
        [
            [156.0, 22 * dx, 54.0, -13 * dx],
            [22 * dx, 4 * dx**2, 13 * dx, -3 * dx**2],
            [54.0, 13 * dx, 156.0, -22 * dx],
            [-13 * dx, -3 * dx**2, -22 * dx, 4 * dx**2],
        ]
    )
    return k, m


def _assemble_beam(x, thickness, spec):
    n = len(x)
    K = np.zeros((2 * n, 2 * n))
    M = np.zeros((2 * n, 2 * n))
    I = spec.width * thickness**3 / 12.0
    rhoA = spec.density * spec.width * thickness
    for e in range(n - 1):
        ke, me = _element_matrices(spec.youngs_modulus, I, rhoA, x[e + 1] - x[e])
        s = slice(2 * e, 2 * e + 4)
        K[s, s] += ke
        M[s, s] += me
    return K, M


def _fixed_dofs(spec, n_nodes):
    last = n_nodes - 1
    clamped = {"free-free": [], "clamped-free": [0], "clamped-clamped": [0, last]}[spec.boundary]
    fixed = []
    for base in (0, 2 * n_nodes):
        for node in clamped:
            fixed += [base + 2 * node, base + 2 * node + 1]
    return np.array(sorted(fixed), dtype=int)


def _assemble_full(spec: BeamSpec):
    x, stations = _mesh(spec)
    n = len(x)
    KA, MA = _assemble_beam(x, spec.thickness_a, spec)
    KB, MB = _assemble_beam(x, spec.thickness_b, spec)
    ndof = 4 * n
    K = np.zeros((ndof, ndof))
    M = np.zeros((ndof, ndof))
    K[: 2 * n, : 2 * n] = KA
    K[2 * n :, 2 * n :] = KB
    M[: 2 * n, : 2 * n] = MA
    M[2 * n :, 2 * n :] = MB

    ta, tb = spec.thickness_a, spec.thickness_b
    for j in stations:
        wa, pa, wb, pb = 2 * j, 2 * j + 1, 2 * n + 2 * j, 2 * n + 2 * j + 1
        springs = [({wa: 1.0, wb: -1.0}, spec.k1), ({pa: 1.0, pb: -1.0}, spec.k2)]
        if spec.fixture == "interlayer_slip":
            springs.append(({pa: ta / 2.0, pb: tb / 2.0}, spec.k3))
        elif spec.fixture == "parallel_translational":
            springs.append(({wa: 1.0, wb: -1.0}, spec.k3))
        else:
            springs.append(({pa: 1.0, pb: -1.0}, spec.k3))
        for coeffs, k in springs:
            idx = np.array(list(coeffs))
            c = np.array(list(coeffs.values()))
            K[np.ix_(idx, idx)] += k * np.outer(c, c)
    return K, M, x


def beam_assemble(spec: BeamSpec, theta) -> tuple[np.ndarray, np.ndarray]:
    """Global stiffness and mass matrices with boundary conditions applied."""
    K, M, x = _assemble_full(spec.scaled(theta))
    fixed = _fixed_dofs(spec, len(x))
    if fixed.size:
        keep = np.setdiff1d(np.arange(K.shape[0]), fixed)
        K, M = K[np.ix_(keep, keep)], M[np.ix_(keep, keep)]
    return K, M


def _rigid_candidates(x, spec):
    n = len(x)
    vecs = []
    for base in (0, 2 * n):
        t = np.zeros(4 * n)
        t[base : base + 2 * n : 2] = 1.0
        r = np.zeros(4 * n)
        r[base : base + 2 * n : 2] = x - x.mean()
        r[base + 1 : base + 2 * n : 2] = 1.0
        vecs += [t, r]
    R = np.column_stack(vecs)
    fixed = _fixed_dofs(spec, n)
    if fixed.size:
        R = np.delete(R, fixed, axis=0)
    return R


def beam_frequencies(spec: BeamSpec, theta, n_modes: int = 8) -> ModalResult:
    """Lowest ``n_modes`` elastic natural frequencies in Hz.

    The eigenproblem ``K phi = w^2 M phi`` is solved after symmetric diagonal
    scaling. Exact rigid-body motions are detected among the translation and
    rotation fields of each beam, removed by an M-orthogonal deflation, and not
    reported.
    """
    K, M = beam_assemble(spec, theta)
    if n_modes > K.shape[0]:
        raise ValueError(f"requested {n_modes} modes from a {K.shape[0]}-DOF model")
    x, _ = _mesh(spec)

    d = np.diag(M)
    if np.any(d <= 0):
        raise FactorizationError("mass matrix has a non-positive diagonal")
    s = 1.0 / np.sqrt(d)
    Ks = K * s[:, None] * s[None, :]
    Ms = M * s[:, None] * s[None, :]

    # Rigid-body subspace: combinations of candidate fields that K annihilates.
    R = _rigid_candidates(x, spec) / s[:, None]
    R /= np.linalg.norm(R, axis=0)
    KR = Ks @ R
    gram = KR.T @ KR
    evals, evecs = np.linalg.eigh(gram)
    scale = np.abs(Ks).max() ** 2
    rigid = R @ evecs[:, evals <= 1e-16 * scale]
    n_rigid = rigid.shape[1]

    if n_rigid:
        Q = null_space((Ms @ rigid).T)
        Kr, Mr = Q.T @ Ks @ Q, Q.T @ Ms @ Q
    else:
        Kr, Mr = Ks, Ms
    Kr = 0.5 * (Kr + Kr.T)
    Mr = 0.5 * (Mr + Mr.T)

    want = min(n_modes + 4, Kr.shape[0])
    try:
        w2 = eigh(Kr, Mr, eigvals_only=True, subset_by_index=[0, want - 1])
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(f"generalized eigenproblem failed: {exc}") from None
    freqs = np.sqrt(np.clip(w2, 0.0, None)) / (2.0 * np.pi)
    keep = freqs >= RIGID_MODE_HZ
    n_rigid += int((~keep).sum())
    freqs = freqs[keep][:n_modes]
    if freqs.size < n_modes:
        raise FactorizationError(f"only {freqs.size} elastic modes found below the search window")
    return ModalResult(freqs, K, M, n_rigid)


def double_beam_model(spec: BeamSpec | None = None, n_modes: int = 8) -> ForwardModel:
    spec = spec or BeamSpec()

    def f(theta):
        return beam_frequencies(spec, theta, n_modes).frequencies

    return ForwardModel("double_beam", 4, n_modes, f, metadata={"beam_spec": spec.to_dict()})


def resolve_beam_configuration(
    base: BeamSpec | None = None,
    reference=REFERENCE_FREQUENCIES,
    elements_per_beam: int = 50,
    k1_candidates=(100e6, 1e10),
):
    """Rank candidate fixture/boundary/k1 settings by worst relative error to ``reference``.

    Returns a list of ``(max_rel_error, spec)`` pairs, best first. Candidates
    whose eigen solution fails are skipped.
    """
    base = base or BeamSpec()
    reference = np.asarray(reference, dtype=float)
    results = []
    for fixture, boundary, k1 in itertools.product(FIXTURE_MAPPINGS, BOUNDARY_CONDITIONS, k1_candidates):
        spec = replace(base, fixture=fixture, boundary=boundary, k1=k1, elements_per_beam=elements_per_beam)
        try:
            f = beam_frequencies(spec, np.ones(4), len(reference)).frequencies
        except FactorizationError:
            continue
        results.append((float(np.max(np.abs(f / reference - 1.0))), spec))
    results.sort(key=lambda t: t[0])
    return results


def linear_model(matrix, offset=None) -> ForwardModel:
    """``PM(theta) = A theta + b``; handy as an oracle model with a known Jacobian."""
    A = np.atleast_2d(np.asarray(matrix, dtype=float))
    b = np.zeros(A.shape[0]) if offset is None else np.asarray(offset, dtype=float).ravel()
    return ForwardModel("linear", A.shape[1], A.shape[0], lambda t: A @ t + b, metadata={"matrix": A.tolist()})
