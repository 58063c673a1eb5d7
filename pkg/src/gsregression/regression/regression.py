import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from gsregression.distributions.distributions import p_values
from gsregression.linalg.gram_schmidt import (
    EPS_RANK,
    DesignMatrix,
    GsDecomposition,
    gram_schmidt,
)
from gsregression.utils.custom_exceptions import (
    DegenerateDirectionError,
    InvalidDesignError,
    NegativeRidgeError,
    NotCenteredError,
    ZeroCoefficientsError,
)

logger = logging.getLogger(__name__)

MODEL_KINDS = ("naive", "gs", "ridge")

RidgePolicy = Union[str, float, Callable[[DesignMatrix, np.ndarray], float]]


@dataclass(frozen=True)
class FitResult:
    """
    Coefficient estimates and t-tests of one of the three fitters.

    Attributes:
        model_kind (str): "naive", "gs" or "ridge".
        coef (np.ndarray): alpha-hat for naive and ridge fits, beta-hat for gs fits.
        se (np.ndarray): Standard errors of coef.
        t_stat (np.ndarray): coef / se, referred to t on df_resid degrees of freedom.
        p_one_sided (np.ndarray): One-sided p-values in the direction of `alternative`.
        p_two_sided (np.ndarray): Two-sided p-values.
        sse (float): Residual sum of squares.
        df_resid (int): n - p.
        sigma_hat2 (float): SSE / (n - p).
        col_names (Tuple[str, ...]): Labels of coef, in orthogonalisation order for gs fits.
        residuals (np.ndarray): y minus the fitted values.
        alternative (str): Direction used for p_one_sided.
        order (Tuple[int, ...], optional): GS permutation (gs only).
        Q (np.ndarray, optional): GS triangular factor (gs only).
        q_rows (np.ndarray, optional): Q^-1 (gs only).
        alpha (np.ndarray, optional): alpha-hat = Q^-1 beta-hat in GS order (gs only).
        ridge_k (float, optional): Shrinkage constant (ridge only).
    """

    model_kind: str
    coef: np.ndarray
    se: np.ndarray
    t_stat: np.ndarray
    p_one_sided: np.ndarray
    p_two_sided: np.ndarray
    sse: float
    df_resid: int
    sigma_hat2: float
    col_names: Tuple[str, ...]
    residuals: np.ndarray
    alternative: str = "greater"
    order: Optional[Tuple[int, ...]] = None
    Q: Optional[np.ndarray] = None
    q_rows: Optional[np.ndarray] = None
    alpha: Optional[np.ndarray] = None
    ridge_k: Optional[float] = None


@dataclass(frozen=True)
class EffectSize:
    """
    Effect of a unit intervention on the i-th orthogonalised direction.

    Attributes:
        index (int): Zero-based GS position.
        estimate (float): beta-hat_i / Q_ii.
        std_dev (float): s / Q_ii.
    """

    index: int
    estimate: float
    std_dev: float


def _response(M: DesignMatrix, y: Sequence[float]) -> np.ndarray:
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != M.n:
        raise InvalidDesignError(f"response has {y.shape[0]} values for {M.n} design rows")
    return y


def _t_statistics(coef: np.ndarray, se: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return coef / se


def _assemble(
    model_kind: str,
    coef: np.ndarray,
    se: np.ndarray,
    residuals: np.ndarray,
    df_resid: int,
    col_names: Tuple[str, ...],
    alternative: str,
    **extra,
) -> FitResult:
    sse = float(max(residuals @ residuals, 0.0))
    t_stat = _t_statistics(coef, se)
    p_one, p_two = p_values(t_stat, df_resid, alternative)
    return FitResult(
        model_kind=model_kind,
        coef=coef,
        se=se,
        t_stat=t_stat,
        p_one_sided=p_one,
        p_two_sided=p_two,
        sse=sse,
        df_resid=df_resid,
        sigma_hat2=sse / df_resid,
        col_names=col_names,
        residuals=residuals,
        alternative=alternative,
        **extra,
    )


def _residual_variance(residuals: np.ndarray, df_resid: int) -> float:
    return float(max(residuals @ residuals, 0.0)) / df_resid


def ols_fit(M: DesignMatrix, y: Sequence[float], alternative: str = "greater") -> FitResult:
    """
    Naive multiple regression (model A) without an implicit intercept.

    The solve goes through the Gram-Schmidt factorisation of M in column order:
    alpha-hat = Q^-1 X^T y and se(alpha-hat_i) = s ||q_i||.

    Args:
        M (DesignMatrix): The design, full column rank.
        y (Sequence[float]): Response of length n.
        alternative (str): Direction of the one-sided p-values.

    Returns:
        FitResult: The naive fit.
    """
    y = _response(M, y)
    decomposition = gram_schmidt(M)
    beta = decomposition.X.T @ y
    coef = decomposition.q_rows @ beta
    residuals = y - decomposition.X @ beta
    df_resid = M.n - M.p
    s = np.sqrt(_residual_variance(residuals, df_resid))
    return _assemble(
        "naive",
        coef,
        s * decomposition.q_norms,
        residuals,
        df_resid,
        M.col_names,
        alternative,
    )


def gs_fit_decomposition(
    decomposition: GsDecomposition, y: np.ndarray, n: int, alternative: str = "greater"
) -> FitResult:
    """Model B fit on an existing decomposition of an n-row design."""
    beta = decomposition.X.T @ y
    residuals = y - decomposition.X @ beta
    df_resid = n - decomposition.p
    s = np.sqrt(_residual_variance(residuals, df_resid))
    return _assemble(
        "gs",
        beta,
        np.full(decomposition.p, s),
        residuals,
        df_resid,
        decomposition.col_names,
        alternative,
        order=decomposition.order,
        Q=decomposition.Q,
        q_rows=decomposition.q_rows,
        alpha=decomposition.q_rows @ beta,
    )


def gs_fit(
    M: DesignMatrix,
    y: Sequence[float],
    order: Optional[Sequence[int]] = None,
    alternative: str = "greater",
) -> FitResult:
    """
    Gram-Schmidt regression (model B).

    Orthogonalises M in the given order and regresses y on the orthonormal basis, so
    beta-hat_i = x_i^T y and every standard error equals s = sqrt(SSE/(n-p)).

    Args:
        M (DesignMatrix): The design.
        y (Sequence[float]): Response of length n.
        order (Sequence[int], optional): Zero-based orthogonalisation order, identity if None.
        alternative (str): Direction of the one-sided p-values.

    Returns:
        FitResult: The gs fit, coefficients and labels in orthogonalisation order.
    """
    y = _response(M, y)
    return gs_fit_decomposition(gram_schmidt(M, order), y, M.n, alternative)


def marginal_fit(
    m: Sequence[float],
    y: Sequence[float],
    sigma_hat2: Optional[float] = None,
    df_resid: Optional[int] = None,
    alternative: str = "greater",
    name: str = "m",
) -> FitResult:
    """
    Simple regression of y on a single column without intercept.

    Args:
        m (Sequence[float]): The predictor.
        y (Sequence[float]): The response.
        sigma_hat2 (float, optional): Error variance to use instead of the simple-regression
            residual variance, e.g. the s^2 of a larger model.
        df_resid (int, optional): Degrees of freedom matching `sigma_hat2`.
        alternative (str): Direction of the one-sided p-values.
        name (str): Label of the predictor.

    Returns:
        FitResult: A one-coefficient naive fit.
    """
    m = np.asarray(m, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    norm2 = m @ m
    coef = np.array([(m @ y) / norm2])
    residuals = y - coef[0] * m
    if df_resid is None:
        df_resid = len(y) - 1
    if sigma_hat2 is None:
        sigma_hat2 = _residual_variance(residuals, df_resid)
    se = np.array([np.sqrt(sigma_hat2 / norm2)])
    t_stat = _t_statistics(coef, se)
    p_one, p_two = p_values(t_stat, df_resid, alternative)
    return FitResult(
        model_kind="naive",
        coef=coef,
        se=se,
        t_stat=t_stat,
        p_one_sided=p_one,
        p_two_sided=p_two,
        sse=float(residuals @ residuals),
        df_resid=df_resid,
        sigma_hat2=float(sigma_hat2),
        col_names=(name,),
        residuals=residuals,
        alternative=alternative,
    )


def gs_effect_size(fit: FitResult, i: int) -> EffectSize:
    """
    Effect size beta-hat_i / Q_ii of the i-th GS position, with its plug-in standard deviation.

    Raises:
        DegenerateDirectionError: If Q_ii <= EPS_RANK.
    """
    if fit.model_kind != "gs":
        raise ValueError(f"effect sizes need a gs fit, got {fit.model_kind}")
    q_ii = float(fit.Q[i, i])
    if q_ii <= EPS_RANK:
        raise DegenerateDirectionError(f"residual norm {q_ii:.3g} at position {i + 1}")
    return EffectSize(
        index=i,
        estimate=float(fit.coef[i]) / q_ii,
        std_dev=float(np.sqrt(fit.sigma_hat2)) / q_ii,
    )


def gs_effect_sizes(fit: FitResult) -> List[EffectSize]:
    return [gs_effect_size(fit, i) for i in range(len(fit.coef))]


def hkb_constant(p: int, sigma_hat2: float, coef: Sequence[float]) -> float:
    """
    Hoerl-Kennard-Baldwin shrinkage constant k = p s^2 / ||alpha-hat||^2.

    Raises:
        ZeroCoefficientsError: If the coefficients are all zero.
    """
    coef = np.asarray(coef, dtype=float)
    norm2 = float(coef @ coef)
    if norm2 == 0.0:
        raise ZeroCoefficientsError("OLS coefficients are all zero; k is undefined")
    return p * sigma_hat2 / norm2


def ridge_k_auto(M: DesignMatrix, y: Sequence[float]) -> float:
    """Default shrinkage constant, the Hoerl-Kennard-Baldwin value from the OLS fit of y on M."""
    ols = ols_fit(M, y)
    return hkb_constant(M.p, ols.sigma_hat2, ols.coef)


def _resolve_k(M: DesignMatrix, y: np.ndarray, k_policy: RidgePolicy) -> float:
    if callable(k_policy):
        k = float(k_policy(M, y))
    elif isinstance(k_policy, str):
        if k_policy != "auto":
            raise ValueError(f"unknown ridge policy {k_policy!r}")
        k = ridge_k_auto(M, y)
        logger.info("ridge k chosen automatically: %.6g", k)
    else:
        k = float(k_policy)
    if k < 0:
        raise NegativeRidgeError(f"ridge constant must be non-negative, got {k}")
    return k


def ridge_fit(
    M: DesignMatrix,
    y: Sequence[float],
    k_policy: RidgePolicy = "auto",
    alternative: str = "greater",
) -> FitResult:
    """
    Ridge regression (M^T M + k I)^-1 M^T y with coefficient t-tests on n - p degrees of freedom.

    The solve factorises the augmented design [M; sqrt(k) I], whose Gram matrix is M^T M + k I.
    The covariance is s^2 A^-1 M^T M A^-1 with A = M^T M + k I and s^2 the ridge residual
    variance SSE/(n - p).

    Args:
        M (DesignMatrix): Centered design.
        y (Sequence[float]): Response of length n.
        k_policy (RidgePolicy): "auto", a non-negative constant, or a callable (M, y) -> k.
        alternative (str): Direction of the one-sided p-values.

    Returns:
        FitResult: The ridge fit.
    """
    if not M.centered:
        raise NotCenteredError("ridge regression expects a centered design")
    y = _response(M, y)
    k = _resolve_k(M, y, k_policy)
    augmented = DesignMatrix(
        values=np.vstack([M.values, np.sqrt(k) * np.eye(M.p)]),
        col_names=M.col_names,
        centered=M.centered,
        scaled=M.scaled,
    )
    decomposition = gram_schmidt(augmented)
    # only the first n rows of X pair with y; the augmented rows have zero response
    coef = decomposition.q_rows @ (decomposition.X[: M.n].T @ y)
    a_inverse = decomposition.q_rows @ decomposition.q_rows.T
    gram = M.values.T @ M.values
    covariance = a_inverse @ gram @ a_inverse
    residuals = y - M.values @ coef
    df_resid = M.n - M.p
    sigma_hat2 = _residual_variance(residuals, df_resid)
    se = np.sqrt(sigma_hat2 * np.clip(np.diag(covariance), 0.0, None))
    return _assemble(
        "ridge", coef, se, residuals, df_resid, M.col_names, alternative, ridge_k=k
    )
