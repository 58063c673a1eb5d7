import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from gsregression.linalg.gram_schmidt import DesignMatrix, GsDecomposition, gram_schmidt
from gsregression.utils.custom_exceptions import (
    InvalidDeltaError,
    NotCenteredError,
    SingularMatrixError,
    UndefinedDeltaError,
)

logger = logging.getLogger(__name__)

BASES = ("true_beta", "estimated")

MODERATE_CN = 30.0
SEVERE_CN = 100.0


@dataclass(frozen=True)
class VariableDiagnostics:
    """
    Per-variable entry of a DeltaReport.

    Attributes:
        index (int): Zero-based GS position.
        name (str): Variable label.
        delta (float): Delta_i, +/-inf when q_i^T beta vanishes.
        vif (float): Variance inflation factor of the variable.
        note (str): Explanation attached to an infinite delta.
    """

    index: int
    name: str
    delta: float
    vif: float
    note: str = ""


@dataclass(frozen=True)
class DeltaReport:
    """
    Multicollinearity summary of a design and coefficient vector.

    Attributes:
        per_variable (List[VariableDiagnostics]): One entry per GS position.
        condition_number (float): sqrt(lambda_max / lambda_min) of M^T M.
        basis (str): "true_beta" for planning, "estimated" when beta-hat came from a gs fit.
    """

    per_variable: List[VariableDiagnostics] = field(default_factory=list)
    condition_number: float = 1.0
    basis: str = "estimated"

    @property
    def collinearity(self) -> str:
        return collinearity_label(self.condition_number)


def vif(M: DesignMatrix) -> np.ndarray:
    """
    Variance inflation factors 1/(1 - R_i^2) of the columns of a centered design.

    Each auxiliary regression reuses the Gram-Schmidt path with column i moved last: the last
    residual norm Q_pp is the norm of the residual of column i on all the others, so
    R_i^2 = 1 - Q_pp^2 / ||m_i||^2 and VIF_i = ||m_i||^2 / Q_pp^2.

    Args:
        M (DesignMatrix): Centered design of full column rank.

    Returns:
        np.ndarray: One VIF per column, in column order.
    """
    if not M.centered:
        raise NotCenteredError("VIF needs a centered design")
    factors = np.empty(M.p)
    for i in range(M.p):
        order = [j for j in range(M.p) if j != i] + [i]
        decomposition = gram_schmidt(M, order)
        column_norm2 = float(M.values[:, i] @ M.values[:, i])
        factors[i] = column_norm2 / decomposition.Q[-1, -1] ** 2
    return factors


def vif_from_decomposition(M: DesignMatrix, decomposition: GsDecomposition) -> np.ndarray:
    """
    VIFs in GS order from an existing decomposition: ||m_i||^2 ||q_i||^2.

    Equals `vif` reordered, because diag((M^T M)^-1) = ||q_i||^2 in any orthogonalisation order.
    """
    columns = M.values[:, list(decomposition.order)]
    return np.sum(columns * columns, axis=0) * decomposition.q_norms**2


def condition_number(M: DesignMatrix) -> float:
    """
    Condition number sqrt(lambda_max / lambda_min) of M^T M.

    Raises:
        SingularMatrixError: If the smallest eigenvalue is not positive.
    """
    eigenvalues = np.linalg.eigvalsh(M.values.T @ M.values)
    smallest, largest = float(eigenvalues[0]), float(eigenvalues[-1])
    if smallest <= 0.0 or smallest <= largest * np.finfo(float).eps:
        raise SingularMatrixError(f"M^T M has non-positive eigenvalue {smallest:.3g}")
    return math.sqrt(largest / smallest)


def collinearity_label(cn: float) -> str:
    if cn > SEVERE_CN:
        return "severe"
    if cn >= MODERATE_CN:
        return "moderate/strong"
    return "weak"


def delta(decomposition: GsDecomposition, beta: Sequence[float], i: int) -> float:
    """
    Delta_i = beta_i ||q_i|| / (q_i^T beta) for the i-th GS position.

    Args:
        decomposition (GsDecomposition): The decomposition defining Q.
        beta (Sequence[float]): GS coefficients, true (planning) or estimated.
        i (int): Zero-based GS position.

    Returns:
        float: Delta_i.

    Raises:
        UndefinedDeltaError: If q_i^T beta is zero relative to ||q_i|| ||beta||.
    """
    beta = np.asarray(beta, dtype=float)
    q_i = decomposition.q_rows[i]
    q_norm = float(np.linalg.norm(q_i))
    alpha_i = float(q_i @ beta)
    if abs(alpha_i) < 1e-14 * q_norm * float(np.linalg.norm(beta)) or alpha_i == 0.0:
        raise UndefinedDeltaError(
            f"q_{i + 1}^T beta = {alpha_i:.3g}: no signal in the naive parameterisation"
        )
    return float(beta[i]) * q_norm / alpha_i


def delta_from_alpha(decomposition: GsDecomposition, alpha: Sequence[float], i: int) -> float:
    """Delta_i from naive-model coefficients (in GS order), through beta = Q alpha."""
    return delta(decomposition, decomposition.Q @ np.asarray(alpha, dtype=float), i)


def equivalent_sample_size(delta_i: float, n_b: float) -> float:
    """
    Sample size n_A of a naive-regression study matching the power of a GS study of size n_B.

    Raises:
        InvalidDeltaError: If delta_i is zero or not finite.
    """
    if not math.isfinite(delta_i) or delta_i == 0.0:
        raise InvalidDeltaError(f"delta must be finite and non-zero, got {delta_i}")
    if n_b <= 0:
        raise InvalidDeltaError(f"n_B must be positive, got {n_b}")
    return delta_i**2 * n_b


def delta_report(
    M: DesignMatrix,
    beta: Sequence[float],
    order: Optional[Sequence[int]] = None,
    basis: str = "estimated",
) -> DeltaReport:
    """
    Build the DeltaReport for every GS position of M in the given order.

    Positions where q_i^T beta vanishes get an infinite delta carrying the sign of beta_i and a
    note instead of failing the report.

    Args:
        M (DesignMatrix): Centered design.
        beta (Sequence[float]): GS coefficients in orthogonalisation order.
        order (Sequence[int], optional): Zero-based orthogonalisation order.
        basis (str): "true_beta" or "estimated".

    Returns:
        DeltaReport: Deltas, VIFs and condition number.
    """
    if basis not in BASES:
        raise ValueError(f"basis must be one of {BASES}, got {basis!r}")
    decomposition = gram_schmidt(M, order)
    factors = vif(M)[list(decomposition.order)]
    entries = []
    for i, name in enumerate(decomposition.col_names):
        note = ""
        try:
            value = delta(decomposition, beta, i)
        except UndefinedDeltaError:
            value = math.copysign(math.inf, float(beta[i])) if beta[i] != 0 else math.nan
            note = "q_i^T beta = 0: GS test has power, naive test only its size"
            logger.warning("delta undefined for %s; reported as %s", name, value)
        entries.append(
            VariableDiagnostics(index=i, name=name, delta=value, vif=float(factors[i]), note=note)
        )
    return DeltaReport(
        per_variable=entries, condition_number=condition_number(M), basis=basis
    )
