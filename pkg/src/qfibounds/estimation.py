"""Monte-Carlo verification layer.

Seeded multinomial sampling of measurement outcomes, maximum-likelihood
estimation by grid scan plus golden-section refinement, the adaptive
two-stage measurement, Cramér-Rao comparisons across replications, and
derivative-free optimization of the input state.

RNG contract: Philox (counter-based, 64-bit keys).  Replication r draws from
the stream keyed by seed XOR r, so replications are reproducible and
independent of execution order.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .bounds import (
    fisher_information,
    optimal_povm_from_sld,
    sld_information,
    sld_score,
    sm_bound_spectral,
    spectral_curve,
)
from .channels import ParametricChannel
from .errors import NumericError, SingularTermError, ValidationError
from .linalg import DEFAULT_DIFF, DiffConfig
from .quantum import (
    POVM,
    DensityMatrix,
    PureState,
    computational_basis_povm,
    measurement_distribution,
)

UNINFORMATIVE_FLOOR = 1e-9
_STAGE2_SALT = 0x9E3779B97F4A7C15  # fixed stream split for the second stage


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.uint64(seed & 0xFFFFFFFFFFFFFFFF)))


def replication_seed(seed: int, replication: int) -> int:
    return (seed ^ replication) & 0xFFFFFFFFFFFFFFFF


def sample_outcomes(rho: DensityMatrix, povm: POVM, shots: int, seed: int) -> np.ndarray:
    """Multinomial outcome counts; identical seeds give identical counts."""
    if shots < 1:
        raise ValidationError(f"shots must be positive, got {shots}")
    probs = measurement_distribution(rho, povm)
    probs = probs / probs.sum()
    return rng_from_seed(seed).multinomial(shots, probs)


@dataclass(frozen=True)
class MLEResult:
    theta_hat: float
    log_likelihood: float
    boundary: bool


def _golden_max(fun, lo: float, hi: float, tol: float) -> float:
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def mle_estimate(
    channel: ParametricChannel,
    povm: POVM,
    counts: np.ndarray,
    domain: tuple[float, float] | None = None,
    grid_points: int = 129,
    refine_tol: float = 1e-8,
) -> MLEResult:
    """Maximum-likelihood estimate by coarse grid scan and golden-section refinement.

    Exact ties on the grid break toward the domain center; estimates pinned
    to the boundary are flagged.
    """
    counts = np.asarray(counts)
    if counts.sum() < 1:
        raise ValidationError("counts are empty")
    if channel.param_count != 1:
        raise ValidationError("mle_estimate handles one-parameter channels")
    lo, hi = domain if domain is not None else channel.domain[0]

    observed = counts > 0

    def loglik(t: float) -> float:
        rho = channel.output_matrix(np.array([t]))
        probs = np.clip(np.real(np.einsum("ij,mji->m", rho, povm.elements)), 0.0, None)
        with np.errstate(divide="ignore"):
            return float(np.sum(counts[observed] * np.log(probs[observed])))

    grid = np.linspace(lo, hi, grid_points)
    values = np.array([loglik(t) for t in grid])
    if not np.any(np.isfinite(values)):
        raise NumericError("log-likelihood is -inf over the entire search domain")
    best = np.max(values)
    ties = np.flatnonzero(values == best)
    center = 0.5 * (lo + hi)
    pick = int(ties[np.argmin(np.abs(grid[ties] - center))])
    a = grid[max(pick - 1, 0)]
    b = grid[min(pick + 1, grid_points - 1)]
    theta_hat = _golden_max(loglik, a, b, refine_tol) if b > a else float(grid[pick])
    width = hi - lo
    boundary = bool((theta_hat - lo) < 1e-6 * width or (hi - theta_hat) < 1e-6 * width)
    return MLEResult(float(theta_hat), loglik(float(theta_hat)), boundary)


@dataclass(frozen=True)
class AdaptiveConfig:
    """Two-stage measurement settings: pilot size, pilot POVM, MLE grid."""

    n_pilot: int
    pilot_povm: POVM | None = None
    grid_points: int = 129

    def __post_init__(self):
        if self.n_pilot < 1:
            raise ValidationError(f"n_pilot must be positive, got {self.n_pilot}")


@dataclass(frozen=True)
class StageRecord:
    povm_id: str
    shots: int
    counts: tuple[int, ...]
    theta_hat: float
    boundary: bool


@dataclass(frozen=True)
class EstimationRun:
    """Seeded experiment record with bound comparisons."""

    channel_id: str
    theta_true: float
    povm_id: str
    shots: int
    seed: int
    counts: tuple[int, ...]
    theta_hat: float
    predicted_bounds: dict[str, float | None]
    empirical_variance: float | None = None
    variance_ratios: dict[str, float | None] = field(default_factory=dict)
    replications: int = 1
    theta_hats: tuple[float, ...] = ()
    bias: float | None = None
    stages: tuple[StageRecord, ...] = ()
    boundary: bool = False
    rng: str = "philox4x64"

    def __post_init__(self):
        if sum(self.counts) != self.shots:
            raise ValidationError(
                f"counts sum to {sum(self.counts)}, expected {self.shots} shots"
            )
        if self.empirical_variance is not None and self.empirical_variance < 0:
            raise ValidationError("variance must be nonnegative")

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["counts"] = list(self.counts)
        out["theta_hats"] = list(self.theta_hats)
        out["stages"] = [dataclasses.asdict(s) | {"counts": list(s.counts)} for s in self.stages]
        return out


def predicted_bounds(
    channel: ParametricChannel,
    theta_true: float,
    povm: POVM | None,
    shots: int,
    cfg: DiffConfig = DEFAULT_DIFF,
) -> tuple[dict[str, float | None], list[str]]:
    """Variance floors 1/(N F), 1/(N H), 1/(N C) at the true parameter."""
    warnings: list[str] = []
    curve = spectral_curve(channel, theta_true, cfg)
    h = sld_information(curve)
    c = sm_bound_spectral(curve)
    f = None
    if povm is not None:
        try:
            f = fisher_information(channel, povm, theta_true, cfg)
        except SingularTermError as exc:
            warnings.append(f"Fisher information singular: {exc}")
    bounds: dict[str, float | None] = {
        "fisher": None if f is None or f < UNINFORMATIVE_FLOOR else 1.0 / (shots * f),
        "sld": None if h < UNINFORMATIVE_FLOOR else 1.0 / (shots * h),
        "channel_bound": None if c < UNINFORMATIVE_FLOOR else 1.0 / (shots * c),
    }
    if f is not None and f < UNINFORMATIVE_FLOOR:
        warnings.append("measurement is uninformative at theta_true (Fisher information ~ 0)")
    return bounds, warnings


def cr_experiment(
    channel: ParametricChannel,
    theta_true: float,
    povm: POVM,
    shots: int,
    replications: int,
    seed: int,
    cfg: DiffConfig = DEFAULT_DIFF,
    povm_id: str = "custom",
) -> EstimationRun:
    """Replicated sampling + MLE, compared against the variance floors.

    Ratios are empirical variance divided by each floor; a floor is omitted
    when the corresponding information vanishes.
    """
    if replications < 2:
        raise ValidationError("need at least 2 replications for a variance")
    rho = channel.output_state(np.array([theta_true]))
    estimates = []
    first_counts = None
    for rep in range(replications):
        counts = sample_outcomes(rho, povm, shots, replication_seed(seed, rep))
        if first_counts is None:
            first_counts = counts
        estimates.append(mle_estimate(channel, povm, counts).theta_hat)
    estimates = np.array(estimates)
    variance = float(np.var(estimates, ddof=1))
    bounds, _ = predicted_bounds(channel, theta_true, povm, shots, cfg)
    ratios = {
        key: (None if floor is None else variance / floor) for key, floor in bounds.items()
    }
    return EstimationRun(
        channel_id=channel.name,
        theta_true=float(theta_true),
        povm_id=povm_id,
        shots=shots,
        seed=seed,
        counts=tuple(int(c) for c in first_counts),
        theta_hat=float(estimates[0]),
        predicted_bounds=bounds,
        empirical_variance=variance,
        variance_ratios=ratios,
        replications=replications,
        theta_hats=tuple(float(t) for t in estimates),
        bias=float(np.mean(estimates) - theta_true),
    )


def adaptive_two_stage(
    channel: ParametricChannel,
    theta_true: float,
    shots: int,
    config: AdaptiveConfig,
    seed: int,
    cfg: DiffConfig = DEFAULT_DIFF,
) -> EstimationRun:
    """Pilot measurement, then the SLD-optimal POVM at the pilot estimate.

    The final estimate uses the second-stage data only; both stages are
    recorded.  Bias of the pilot does not propagate beyond the choice of
    measurement basis.
    """
    if config.n_pilot >= shots:
        raise ValidationError(f"n_pilot {config.n_pilot} must be below shots {shots}")
    pilot_povm = config.pilot_povm or computational_basis_povm(channel.dim)
    rho_true = channel.output_state(np.array([theta_true]))
    pilot_counts = sample_outcomes(rho_true, pilot_povm, config.n_pilot, seed)
    pilot = mle_estimate(channel, pilot_povm, pilot_counts, grid_points=config.grid_points)
    lo, hi = channel.domain[0]
    margin = cfg.max_offset if channel.is_kraus_form else 0.0
    pivot = float(np.clip(pilot.theta_hat, lo + margin, hi - margin))
    curve = spectral_curve(channel, pivot, cfg)
    stage2_povm = optimal_povm_from_sld(sld_score(curve))
    n2 = shots - config.n_pilot
    counts2 = sample_outcomes(rho_true, stage2_povm, n2, seed ^ _STAGE2_SALT)
    final = mle_estimate(channel, stage2_povm, counts2, grid_points=config.grid_points)
    bounds, _ = predicted_bounds(channel, theta_true, stage2_povm, n2, cfg)
    stages = (
        StageRecord(
            "pilot", config.n_pilot, tuple(int(c) for c in pilot_counts),
            pilot.theta_hat, pilot.boundary,
        ),
        StageRecord(
            f"sld-optimal@{pivot:.6g}", n2, tuple(int(c) for c in counts2),
            final.theta_hat, final.boundary,
        ),
    )
    return EstimationRun(
        channel_id=channel.name,
        theta_true=float(theta_true),
        povm_id=f"adaptive({stages[1].povm_id})",
        shots=n2,
        seed=seed,
        counts=tuple(int(c) for c in counts2),
        theta_hat=final.theta_hat,
        predicted_bounds=bounds,
        stages=stages,
        boundary=final.boundary,
    )


def adaptive_experiment(
    channel: ParametricChannel,
    theta_true: float,
    shots: int,
    config: AdaptiveConfig,
    replications: int,
    seed: int,
    cfg: DiffConfig = DEFAULT_DIFF,
) -> EstimationRun:
    """Replicated adaptive runs with the variance compared to 1/((N - n) H)."""
    if replications < 2:
        raise ValidationError("need at least 2 replications for a variance")
    estimates = []
    first: EstimationRun | None = None
    for rep in range(replications):
        run = adaptive_two_stage(
            channel, theta_true, shots, config, replication_seed(seed, rep), cfg
        )
        if first is None:
            first = run
        estimates.append(run.theta_hat)
    estimates = np.array(estimates)
    variance = float(np.var(estimates, ddof=1))
    ratios = {
        key: (None if floor is None else variance / floor)
        for key, floor in first.predicted_bounds.items()
    }
    return dataclasses.replace(
        first,
        seed=seed,
        empirical_variance=variance,
        variance_ratios=ratios,
        replications=replications,
        theta_hats=tuple(float(t) for t in estimates),
        bias=float(np.mean(estimates) - theta_true),
    )


def _state_from_angles(x: np.ndarray, dim: int) -> PureState:
    mags = np.ones(dim)
    for i in range(dim - 1):
        mags[i] *= np.cos(x[i])
        mags[i + 1:] *= np.sin(x[i])
    phases = np.concatenate([[0.0], x[dim - 1:]])
    amps = mags * np.exp(1j * phases)
    return PureState(amps / np.linalg.norm(amps))


def optimize_input_state(
    channel: ParametricChannel,
    theta,
    objective: str = "sld",
    restarts: int = 8,
    seed: int = 0,
    cfg: DiffConfig = DEFAULT_DIFF,
) -> tuple[PureState, float]:
    """Maximize H or the channel bound over pure input states.

    Derivative-free simplex search over 2d - 2 angles (global phase and norm
    fixed), best of `restarts` seeded starts.  Candidates whose evaluation
    hits a degeneracy are rejected and the search continues.
    """
    if not channel.is_kraus_form:
        raise ValidationError("input-state optimization needs a Kraus-form channel")
    key = objective.strip().lower()
    if key in ("sld", "h"):
        evaluate = lambda curve: sld_information(curve)
    elif key in ("channel-bound", "sm", "c", "bound"):
        evaluate = lambda curve: sm_bound_spectral(curve)
    else:
        raise ValidationError(f"unknown objective {objective!r}; use 'sld' or 'channel-bound'")
    dim = channel.dim
    n_angles = 2 * dim - 2

    def cost(x: np.ndarray) -> float:
        try:
            candidate = channel.with_input_state(_state_from_angles(x, dim))
            return -evaluate(spectral_curve(candidate, theta, cfg))
        except (NumericError, ValidationError):
            return 1e9

    rng = rng_from_seed(seed)
    best_x, best_val = None, np.inf
    for _ in range(max(1, restarts)):
        x0 = np.concatenate(
            [rng.uniform(0.0, np.pi, dim - 1), rng.uniform(0.0, 2 * np.pi, dim - 1)]
        )
        res = minimize(
            cost,
            x0,
            method="Nelder-Mead",
            options={"maxiter": 4000, "xatol": 1e-10, "fatol": 1e-12},
        )
        if res.fun < best_val:
            best_x, best_val = res.x, float(res.fun)
    if best_x is None or best_val >= 1e9:
        raise NumericError("every optimization start failed to evaluate the objective")
    return _state_from_angles(best_x, dim), -best_val
