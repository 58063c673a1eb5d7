import logging
import math
import os
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import polars as pl

from gsregression.diagnostics.diagnostics import delta, delta_from_alpha, vif_from_decomposition
from gsregression.distributions.distributions import (
    Rng,
    noncentral_t_sf,
    sample_normal,
    t_quantile,
)
from gsregression.linalg.gram_schmidt import (
    DesignMatrix,
    center_vector,
    design_matrix,
    gram_schmidt,
    stack_replicates,
)
from gsregression.regression.regression import (
    MODEL_KINDS,
    gs_fit,
    gs_fit_decomposition,
    ols_fit,
    ridge_fit,
)
from gsregression.utils.custom_exceptions import (
    GsRegressionError,
    InvalidScenarioError,
    ReplicateFailureError,
    SameSignViolationError,
    UndefinedDeltaError,
)

logger = logging.getLogger(__name__)

DEFAULT_RHO_GRID = (-0.25, 0.25, 0.5)
DEFAULT_P_GRID = (3, 5, 15)
DEFAULT_N = 200
DEFAULT_REPLICATES = 1000
DEFAULT_LEVEL = 0.05
DEFAULT_GRID_POINTS = 12
MAX_DISCARD_FRACTION = 0.01
STREAM_BLOCK = 2**32
WORKERS_ENV = "GSREG_WORKERS"
RIDGE_NOTE = "approximate: ridge t referred to t_{n-p}"


@dataclass(frozen=True)
class PowerScenario:
    """
    One cell of the power study.

    Attributes:
        rho (float): Loading of Z_1 in M_2..M_p, in (-1, 1).
        sigma (float): Error standard deviation.
        p (int): Number of predictors, at least 2.
        n (int): Sample size, larger than p.
        replicates (int): Number of simulated studies N.
        level (float): Significance level of the one-sided tests.
        seed (int): Master seed.
        models (Tuple[str, ...]): Subset of ("naive", "gs", "ridge").
        null_first (bool): Evaluate every model under its own null for the first coefficient.
        stream_offset (int): First substream index; replicate j uses stream_offset + j.
    """

    rho: float
    sigma: float
    p: int
    n: int = DEFAULT_N
    replicates: int = DEFAULT_REPLICATES
    level: float = DEFAULT_LEVEL
    seed: int = 0
    models: Tuple[str, ...] = MODEL_KINDS
    null_first: bool = False
    stream_offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        if not -1.0 < self.rho < 1.0:
            raise InvalidScenarioError(f"rho must lie in (-1, 1), got {self.rho}")
        if not self.sigma > 0:
            raise InvalidScenarioError(f"sigma must be positive, got {self.sigma}")
        if self.p < 2:
            raise InvalidScenarioError(f"p must be at least 2, got {self.p}")
        if self.n <= self.p:
            raise InvalidScenarioError(f"n must exceed p, got n={self.n}, p={self.p}")
        if self.replicates < 1:
            raise InvalidScenarioError(f"replicates must be positive, got {self.replicates}")
        if not 0.0 < self.level < 1.0:
            raise InvalidScenarioError(f"level must lie in (0, 1), got {self.level}")
        unknown = set(self.models) - set(MODEL_KINDS)
        if unknown or not self.models:
            raise InvalidScenarioError(f"models must be a non-empty subset of {MODEL_KINDS}")


@dataclass(frozen=True)
class ModelPower:
    model: str
    empirical_power: float
    mc_se: float
    rejections: int
    analytic_power: Optional[float] = None


@dataclass(frozen=True)
class PowerResult:
    """
    Outcome of simulate_power.

    Attributes:
        scenario (PowerScenario): The simulated scenario.
        per_model (List[ModelPower]): Empirical power and Monte Carlo standard error per model.
        mean_delta_hat (float): Mean of the estimated Delta of M_1 over replicates where defined.
        median_delta_hat (float): Median of the same.
        mean_delta_true (float): Mean Delta of M_1 computed from the true coefficients.
        mean_vif (float): Mean VIF of M_1.
        completed (int): Replicates that entered the power estimates.
        discarded (int): Replicates dropped after a numerical failure.
    """

    scenario: PowerScenario
    per_model: List[ModelPower] = field(default_factory=list)
    mean_delta_hat: float = math.nan
    median_delta_hat: float = math.nan
    mean_delta_true: float = math.nan
    mean_vif: float = math.nan
    completed: int = 0
    discarded: int = 0

    def power_of(self, model: str) -> ModelPower:
        for entry in self.per_model:
            if entry.model == model:
                return entry
        raise KeyError(model)


@dataclass(frozen=True)
class _ReplicateOutcome:
    index: int
    rejected: Dict[str, bool] = field(default_factory=dict)
    analytic: Dict[str, float] = field(default_factory=dict)
    delta_hat: float = math.nan
    delta_true: float = math.nan
    vif: float = math.nan
    error: Optional[str] = None


def workers_from_env() -> int:
    """Worker count from GSREG_WORKERS: 0 means one per CPU, unset means 1."""
    value = int(os.environ.get(WORKERS_ENV, "1"))
    if value < 0:
        raise InvalidScenarioError(f"{WORKERS_ENV} must be >= 0, got {value}")
    return value if value > 0 else (os.cpu_count() or 1)


def inv_sigma_grid(points: int = DEFAULT_GRID_POINTS) -> List[float]:
    """`points` equispaced values of 1/sigma in (0, 1]."""
    if points < 1:
        raise InvalidScenarioError(f"grid needs at least one point, got {points}")
    return [k / points for k in range(1, points + 1)]


def _raw_scenario(rho: float, sigma: float, p: int, n: int, rng: Rng):
    draws = sample_normal(rng, n * (p + 1)).reshape(p + 1, n)
    z, epsilon = draws[:p], draws[p]
    raw = z.T.copy()
    raw[:, 1:] += rho * z[0][:, np.newaxis]
    return raw, sigma * epsilon


def generate_scenario(
    rho: float,
    sigma: float,
    p: int,
    n: int,
    rng: Rng,
    null_model: Optional[str] = None,
) -> Tuple[DesignMatrix, np.ndarray]:
    """
    Draw one simulated study.

    M_1 = Z_1, M_i = rho Z_1 + Z_i and Y = (M_1 + ... + M_p)/p + sigma eps with Z, eps i.i.d.
    standard normal; M is then centered and scaled, Y centered.

    Args:
        rho (float): Correlation loading.
        sigma (float): Error standard deviation.
        p (int): Number of predictors.
        n (int): Sample size.
        rng (Rng): Stream for the draws; the same Rng gives the same study.
        null_model (str, optional): "naive" drops the M_1 term from Y (alpha_1 = 0); "gs"
            removes the projection of the mean on x_1 (beta_1 = 0). None keeps the alternative.

    Returns:
        Tuple[DesignMatrix, np.ndarray]: The preprocessed design and centered response.
    """
    raw, noise = _raw_scenario(rho, sigma, p, n, rng)
    M = design_matrix(raw, [f"M{j + 1}" for j in range(p)], center=True, scale=True)
    weights = np.full(p, 1.0 / p)
    if null_model == "naive":
        weights[0] = 0.0
    mean = center_vector(raw @ weights)
    if null_model == "gs":
        x_1 = M.values[:, 0] / np.linalg.norm(M.values[:, 0])
        mean = mean - x_1 * (x_1 @ mean)
    elif null_model not in (None, "naive"):
        raise ValueError(f"null model must be None, 'naive' or 'gs', got {null_model!r}")
    return M, mean + center_vector(noise)


def true_alpha(M: DesignMatrix, raw_sd: np.ndarray, null_naive: bool = False) -> np.ndarray:
    """Generator coefficients 1/p expressed on the scale of the standardised columns."""
    alpha = raw_sd / M.p
    if null_naive:
        alpha = alpha.copy()
        alpha[0] = 0.0
    return alpha


def analytic_power(
    model: str,
    effect: float,
    sigma: float,
    q_norm: float,
    n: int,
    p: int,
    level: float = DEFAULT_LEVEL,
) -> float:
    """
    Exact power of the one-sided coefficient t-test.

    Model "B" (GS) has noncentrality effect/sigma because x_i has unit norm; model "A" (naive)
    has effect/(sigma ||q_i||). The critical value is the 1 - level quantile of t_{n-p}.

    Args:
        model (str): "A" or "B".
        effect (float): beta_i for model B, alpha_i for model A.
        sigma (float): Error standard deviation.
        q_norm (float): ||q_i||, ignored for model B.
        n (int): Sample size.
        p (int): Number of predictors.
        level (float): Significance level.

    Returns:
        float: Rejection probability.
    """
    if model not in ("A", "B"):
        raise InvalidScenarioError(f"model must be 'A' or 'B', got {model!r}")
    if not sigma > 0 or n <= p or not 0.0 < level < 1.0:
        raise InvalidScenarioError(
            f"need sigma > 0, n > p and 0 < level < 1; got sigma={sigma}, n={n}, p={p}"
        )
    if model == "A":
        if not q_norm > 0:
            raise InvalidScenarioError(f"q_norm must be positive, got {q_norm}")
        ncp = effect / (sigma * q_norm)
    else:
        ncp = effect / sigma
    df = n - p
    return noncentral_t_sf(t_quantile(1.0 - level, df), df, ncp)


def _replicate(scenario: PowerScenario, j: int) -> _ReplicateOutcome:
    rng = Rng(scenario.seed, scenario.stream_offset + j)
    s = scenario
    try:
        raw, _ = _raw_scenario(s.rho, s.sigma, s.p, s.n, rng)
        raw_sd = raw.std(axis=0, ddof=1)
        alternative_data = generate_scenario(s.rho, s.sigma, s.p, s.n, rng)
        M = alternative_data[0]
        if s.null_first:
            y_naive = generate_scenario(s.rho, s.sigma, s.p, s.n, rng, "naive")[1]
            y_gs = generate_scenario(s.rho, s.sigma, s.p, s.n, rng, "gs")[1]
        else:
            y_naive = y_gs = alternative_data[1]
        critical = t_quantile(1.0 - s.level, s.n - s.p)
        decomposition = gram_schmidt(M)
        alpha = true_alpha(M, raw_sd, null_naive=s.null_first)
        q_norm = float(decomposition.q_norms[0])
        rejected, analytic = {}, {}
        for model in s.models:
            if model == "naive":
                fit = ols_fit(M, y_naive)
                analytic[model] = analytic_power("A", alpha[0], s.sigma, q_norm, s.n, s.p, s.level)
            elif model == "gs":
                fit = gs_fit_decomposition(decomposition, y_gs, s.n)
                beta_1 = 0.0 if s.null_first else float(decomposition.Q[0] @ alpha)
                analytic[model] = analytic_power("B", beta_1, s.sigma, q_norm, s.n, s.p, s.level)
            else:
                fit = ridge_fit(M, y_naive, "auto")
            rejected[model] = bool(fit.t_stat[0] > critical)
        gs_coef = gs_fit_decomposition(decomposition, y_gs, s.n).coef
        try:
            delta_hat = delta(decomposition, gs_coef, 0)
        except UndefinedDeltaError:
            delta_hat = math.nan
        try:
            delta_true = delta_from_alpha(decomposition, alpha, 0)
        except UndefinedDeltaError:
            delta_true = math.nan
        return _ReplicateOutcome(
            index=j,
            rejected=rejected,
            analytic=analytic,
            delta_hat=delta_hat,
            delta_true=delta_true,
            vif=float(vif_from_decomposition(M, decomposition)[0]),
        )
    except GsRegressionError as error:
        return _ReplicateOutcome(index=j, error=f"{type(error).__name__}: {error}")


def _replicate_star(args: Tuple[PowerScenario, int]) -> _ReplicateOutcome:
    return _replicate(*args)


def _run_replicates(scenario: PowerScenario, workers: int) -> List[_ReplicateOutcome]:
    tasks = [(scenario, j) for j in range(scenario.replicates)]
    if workers <= 1:
        return [_replicate_star(task) for task in tasks]
    chunksize = max(1, scenario.replicates // (4 * workers))
    with Pool(processes=workers) as pool:
        return pool.map(_replicate_star, tasks, chunksize=chunksize)


def _nanmean(values: List[float]) -> float:
    finite = [v for v in values if math.isfinite(v)]
    return float(np.mean(finite)) if finite else math.nan


def _nanmedian(values: List[float]) -> float:
    finite = [v for v in values if math.isfinite(v)]
    return float(np.median(finite)) if finite else math.nan


def simulate_power(scenario: PowerScenario, workers: int = 1) -> PowerResult:
    """
    Monte Carlo power of the first-coefficient one-sided t-test for each requested model.

    Replicate j draws its data from Rng(seed, stream_offset + j), so the result does not depend
    on the number of workers. Replicates failing with a numerical error are discarded and
    logged; more than MAX_DISCARD_FRACTION of them fails the run.

    Args:
        scenario (PowerScenario): The scenario.
        workers (int): Worker processes; 1 runs in-process.

    Returns:
        PowerResult: Rejection rates with Monte Carlo standard errors and Delta/VIF summaries.

    Raises:
        ReplicateFailureError: If too many replicates were discarded.
    """
    logger.info(
        "simulating rho=%g sigma=%g p=%d n=%d with %d replicates on %d worker(s)",
        scenario.rho,
        scenario.sigma,
        scenario.p,
        scenario.n,
        scenario.replicates,
        workers,
    )
    outcomes = sorted(_run_replicates(scenario, workers), key=lambda outcome: outcome.index)
    failed = [outcome for outcome in outcomes if outcome.error is not None]
    for outcome in failed:
        logger.warning("discarded replicate %d: %s", outcome.index, outcome.error)
    if len(failed) > MAX_DISCARD_FRACTION * scenario.replicates:
        raise ReplicateFailureError(
            f"{len(failed)} of {scenario.replicates} replicates failed; first: {failed[0].error}"
        )
    kept = [outcome for outcome in outcomes if outcome.error is None]
    completed = len(kept)
    per_model = []
    for model in scenario.models:
        rejections = sum(outcome.rejected[model] for outcome in kept)
        power = rejections / completed
        analytic = [outcome.analytic[model] for outcome in kept if model in outcome.analytic]
        per_model.append(
            ModelPower(
                model=model,
                empirical_power=power,
                mc_se=math.sqrt(power * (1.0 - power) / completed),
                rejections=rejections,
                analytic_power=float(np.mean(analytic)) if analytic else None,
            )
        )
    return PowerResult(
        scenario=scenario,
        per_model=per_model,
        mean_delta_hat=_nanmean([outcome.delta_hat for outcome in kept]),
        median_delta_hat=_nanmedian([outcome.delta_hat for outcome in kept]),
        mean_delta_true=_nanmean([outcome.delta_true for outcome in kept]),
        mean_vif=_nanmean([outcome.vif for outcome in kept]),
        completed=completed,
        discarded=len(failed),
    )


def power_grid(
    rhos: Sequence[float] = DEFAULT_RHO_GRID,
    ps: Sequence[int] = DEFAULT_P_GRID,
    inv_sigmas: Optional[Sequence[float]] = None,
    n: int = DEFAULT_N,
    replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    models: Sequence[str] = MODEL_KINDS,
    level: float = DEFAULT_LEVEL,
    null_first: bool = False,
    workers: int = 1,
) -> pl.DataFrame:
    """
    Sweep simulate_power over rho x p x 1/sigma and return a tidy long-format table.

    Grid point g uses substreams starting at g * 2**32, so each point is reproducible on its
    own. One row per scenario, model and 1/sigma value.
    """
    if inv_sigmas is None:
        inv_sigmas = inv_sigma_grid()
    rows = []
    grid_index = 0
    for rho in rhos:
        for p in ps:
            for inv_sigma in inv_sigmas:
                if not inv_sigma > 0:
                    raise InvalidScenarioError(f"1/sigma must be positive, got {inv_sigma}")
                scenario = PowerScenario(
                    rho=rho,
                    sigma=1.0 / inv_sigma,
                    p=p,
                    n=n,
                    replicates=replicates,
                    level=level,
                    seed=seed,
                    models=tuple(models),
                    null_first=null_first,
                    stream_offset=grid_index * STREAM_BLOCK,
                )
                grid_index += 1
                result = simulate_power(scenario, workers)
                for entry in result.per_model:
                    rows.append(
                        {
                            "scenario": f"rho={rho:g},p={p}",
                            "rho": float(rho),
                            "p": int(p),
                            "n": int(n),
                            "model": entry.model,
                            "inv_sigma": float(inv_sigma),
                            "power": entry.empirical_power,
                            "mc_se": entry.mc_se,
                            "analytic_power": entry.analytic_power,
                            "mean_delta": result.mean_delta_hat,
                            "median_delta": result.median_delta_hat,
                            "delta_true": result.mean_delta_true,
                            "vif": result.mean_vif,
                            "note": RIDGE_NOTE if entry.model == "ridge" else "",
                        }
                    )
    return pl.DataFrame(rows, schema=POWER_TABLE_SCHEMA)


POWER_TABLE_SCHEMA = {
    "scenario": pl.Utf8,
    "rho": pl.Float64,
    "p": pl.Int64,
    "n": pl.Int64,
    "model": pl.Utf8,
    "inv_sigma": pl.Float64,
    "power": pl.Float64,
    "mc_se": pl.Float64,
    "analytic_power": pl.Float64,
    "mean_delta": pl.Float64,
    "median_delta": pl.Float64,
    "delta_true": pl.Float64,
    "vif": pl.Float64,
    "note": pl.Utf8,
}


def _stacked_rejection_rate(
    M: DesignMatrix,
    alpha: np.ndarray,
    sigma: float,
    model: str,
    order: Tuple[int, ...],
    position: int,
    direction: float,
    level: float,
    rng: Rng,
    stream_base: int,
    replicates: int,
) -> float:
    critical = t_quantile(1.0 - level, M.n - M.p)
    mean = M.values @ alpha
    rejections = 0
    for j in range(replicates):
        y = mean + sigma * sample_normal(rng.substream(stream_base + j), M.n)
        if model == "A":
            t_stat = ols_fit(M, y).t_stat[order[position]]
        else:
            t_stat = gs_fit(M, y, order).t_stat[position]
        rejections += bool(direction * t_stat > critical)
    return rejections / replicates


def stacked_power_experiment(
    M0: DesignMatrix,
    alpha: Sequence[float],
    sigma: float,
    k_grid: Sequence[int],
    level: float = DEFAULT_LEVEL,
    rng: Rng = Rng(0),
    delta_i: Optional[float] = None,
    position: int = 0,
    order: Optional[Sequence[int]] = None,
    replicates: int = DEFAULT_REPLICATES,
) -> pl.DataFrame:
    """
    Compare the power of the naive and GS tests on stacked copies of a pilot design.

    For each k_B in k_grid the GS study stacks the pilot k_B times and the naive study
    k_A = round(Delta_i^2 k_B) times, so that n_A / n_B = Delta_i^2. Data follow
    Y = M alpha + sigma eps in both studies.

    Args:
        M0 (DesignMatrix): Pilot design of full rank.
        alpha (Sequence[float]): Naive-model coefficients in column order.
        sigma (float): Error standard deviation.
        k_grid (Sequence[int]): Replicate counts of the GS study.
        level (float): Significance level of the one-sided tests.
        rng (Rng): Seed of the experiment.
        delta_i (float, optional): Delta of the tested position; computed from alpha if None.
        position (int): Zero-based GS position of the tested variable.
        order (Sequence[int], optional): Orthogonalisation order of the pilot.
        replicates (int): Simulated studies per design.

    Returns:
        pl.DataFrame: One row per k_B with both powers, their standard errors and the gap.

    Raises:
        SameSignViolationError: If alpha_i and beta_i have opposite signs (or one is zero).
    """
    if not sigma > 0:
        raise InvalidScenarioError(f"sigma must be positive, got {sigma}")
    alpha = np.asarray(alpha, dtype=float)
    decomposition = gram_schmidt(M0, order)
    order = decomposition.order
    alpha_gs = alpha[list(order)]
    beta = decomposition.Q @ alpha_gs
    if not alpha_gs[position] * beta[position] > 0:
        raise SameSignViolationError(
            f"alpha_i = {alpha_gs[position]:.4g} and beta_i = {beta[position]:.4g} "
            "must be non-zero with the same sign"
        )
    if delta_i is None:
        delta_i = delta(decomposition, beta, position)
    direction = math.copysign(1.0, alpha_gs[position])
    q_norm = float(decomposition.q_norms[position])
    rows = []
    for g, k_b in enumerate(k_grid):
        k_a = max(1, int(round(delta_i**2 * k_b)))
        design_a = stack_replicates(M0, k_a)
        design_b = stack_replicates(M0, k_b)
        power_a = _stacked_rejection_rate(
            design_a, alpha, sigma, "A", order, position, direction, level,
            rng, (2 * g) * STREAM_BLOCK, replicates,
        )
        power_b = _stacked_rejection_rate(
            design_b, alpha, sigma, "B", order, position, direction, level,
            rng, (2 * g + 1) * STREAM_BLOCK, replicates,
        )
        se_a = math.sqrt(power_a * (1.0 - power_a) / replicates)
        se_b = math.sqrt(power_b * (1.0 - power_b) / replicates)
        rows.append(
            {
                "k_b": int(k_b),
                "k_a": k_a,
                "n_b": design_b.n,
                "n_a": design_a.n,
                "power_a": power_a,
                "power_b": power_b,
                "mc_se_a": se_a,
                "mc_se_b": se_b,
                "gap": power_a - power_b,
                "combined_se": math.sqrt(se_a**2 + se_b**2),
                "analytic_a": analytic_power(
                    "A", abs(alpha_gs[position]), sigma, q_norm / math.sqrt(k_a),
                    design_a.n, M0.p, level,
                ),
                "analytic_b": analytic_power(
                    "B", abs(beta[position]) * math.sqrt(k_b), sigma, 1.0,
                    design_b.n, M0.p, level,
                ),
            }
        )
    return pl.DataFrame(rows)
