import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import solve_triangular

from gsregression.utils.custom_exceptions import (
    InvalidDesignError,
    InvalidOrderError,
    RankDeficientError,
    SingularMatrixError,
)

logger = logging.getLogger(__name__)

EPS_RANK = 1e-10
REORTHOGONALISE_RATIO = 0.1


def _frozen(values: np.ndarray) -> np.ndarray:
    array = np.array(values, dtype=float, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class DesignMatrix:
    """
    An n x p design matrix with column labels and preprocessing flags.

    Attributes:
        values (np.ndarray): The n x p matrix, read-only.
        col_names (Tuple[str, ...]): One label per column.
        centered (bool): Whether every column has been centered.
        scaled (bool): Whether every column has been scaled to unit sample standard deviation.
    """

    values: np.ndarray
    col_names: Tuple[str, ...]
    centered: bool = False
    scaled: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise InvalidDesignError(f"design matrix must be two-dimensional, got {values.ndim}")
        n, p = values.shape
        if p < 1 or n <= p:
            raise InvalidDesignError(f"design matrix needs n > p >= 1, got n={n}, p={p}")
        if len(self.col_names) != p:
            raise InvalidDesignError(f"{len(self.col_names)} column names given for {p} columns")
        if not np.all(np.isfinite(values)):
            raise InvalidDesignError("design matrix contains non-finite values")
        for j in range(p):
            if not np.any(values[:, j]):
                raise RankDeficientError(j + 1, self.col_names[j])
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "col_names", tuple(self.col_names))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def permuted(self, order: Sequence[int]) -> "DesignMatrix":
        """
        Return the design with its columns rearranged.

        Args:
            order (Sequence[int]): Zero-based column indices, a permutation of range(p).

        Returns:
            DesignMatrix: The design whose k-th column is column order[k] of this one.
        """
        order = validate_order(order, self.p)
        return DesignMatrix(
            values=self.values[:, list(order)],
            col_names=tuple(self.col_names[i] for i in order),
            centered=self.centered,
            scaled=self.scaled,
        )


@dataclass(frozen=True)
class GsDecomposition:
    """
    Gram-Schmidt decomposition M_pi = X Q of a design matrix.

    Attributes:
        X (np.ndarray): n x p matrix with orthonormal columns x_1..x_p.
        Q (np.ndarray): p x p upper-triangular matrix, Q_kk = norm of the k-th residual.
        order (Tuple[int, ...]): Zero-based permutation pi; position k holds column order[k] of M.
        q_rows (np.ndarray): Q^-1; row i is the vector q_i.
        col_names (Tuple[str, ...]): Column labels in orthogonalisation order.
    """

    X: np.ndarray
    Q: np.ndarray
    order: Tuple[int, ...]
    q_rows: np.ndarray
    col_names: Tuple[str, ...]

    @property
    def p(self) -> int:
        return self.Q.shape[0]

    @property
    def q_norms(self) -> np.ndarray:
        """Euclidean norms of the rows of Q^-1."""
        return np.linalg.norm(self.q_rows, axis=1)


def validate_order(order: Optional[Sequence[int]], p: int) -> Tuple[int, ...]:
    """
    Check that `order` is a permutation of range(p); None means the identity.

    Raises:
        InvalidOrderError: If the order is not a permutation of range(p).
    """
    if order is None:
        return tuple(range(p))
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(p)):
        raise InvalidOrderError(f"order {order} is not a permutation of 0..{p - 1}")
    return order


def center_vector(y: Sequence[float]) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return y - y.mean()


def design_matrix(
    values: np.ndarray,
    col_names: Optional[Sequence[str]] = None,
    center: bool = False,
    scale: bool = False,
) -> DesignMatrix:
    """
    Build a DesignMatrix, optionally centering and scaling the columns.

    Scaling divides each column by its sample standard deviation (ddof=1), computed after
    centering when both flags are set.

    Args:
        values (np.ndarray): The raw n x p matrix.
        col_names (Sequence[str], optional): Column labels, defaulting to m1..mp.
        center (bool): Subtract the column means.
        scale (bool): Divide by the column standard deviations.

    Returns:
        DesignMatrix: The preprocessed design.
    """
    values = np.array(values, dtype=float, copy=True)
    if values.ndim == 1:
        values = values[:, np.newaxis]
    if col_names is None:
        col_names = [f"m{j + 1}" for j in range(values.shape[1])]
    if center:
        values = values - values.mean(axis=0)
    if scale:
        sd = values.std(axis=0, ddof=1)
        for j in np.flatnonzero(sd == 0):
            raise RankDeficientError(int(j) + 1, col_names[j])
        values = values / sd
    return DesignMatrix(values=values, col_names=tuple(col_names), centered=center, scaled=scale)


def invert_upper_triangular(Q: np.ndarray) -> np.ndarray:
    """
    Invert an upper-triangular matrix by back-substitution.

    Args:
        Q (np.ndarray): p x p upper-triangular matrix.

    Returns:
        np.ndarray: Q^-1, also upper triangular; its rows are the vectors q_i.

    Raises:
        SingularMatrixError: If a diagonal entry is below EPS_RANK in magnitude.
    """
    Q = np.asarray(Q, dtype=float)
    diagonal = np.abs(np.diag(Q))
    if np.any(diagonal < EPS_RANK):
        raise SingularMatrixError(
            f"triangular matrix has a diagonal entry of magnitude {diagonal.min():.3g}"
        )
    inverse = solve_triangular(Q, np.eye(Q.shape[0]), lower=False)
    return np.triu(inverse)


def gram_schmidt(M: DesignMatrix, order: Optional[Sequence[int]] = None) -> GsDecomposition:
    """
    Orthogonalise the columns of M in the given order with modified Gram-Schmidt.

    Column k of X is the normalised residual of column order[k] after removing its projections
    on x_1..x_{k-1}; column k of Q holds those projection coefficients above the diagonal and
    the residual norm on it. A second pass is made whenever the residual keeps less than
    REORTHOGONALISE_RATIO of the original norm.

    Args:
        M (DesignMatrix): The design.
        order (Sequence[int], optional): Zero-based permutation of the columns (identity if None).

    Returns:
        GsDecomposition: X, Q, the order and Q^-1.

    Raises:
        RankDeficientError: If a column is numerically in the span of its predecessors.
    """
    order = validate_order(order, M.p)
    A = M.values[:, list(order)]
    n, p = A.shape
    X = np.zeros((n, p))
    Q = np.zeros((p, p))
    names = tuple(M.col_names[i] for i in order)
    for k in range(p):
        v = A[:, k].copy()
        original_norm = np.linalg.norm(v)
        for j in range(k):
            coefficient = X[:, j] @ v
            Q[j, k] = coefficient
            v -= coefficient * X[:, j]
        residual_norm = np.linalg.norm(v)
        if residual_norm < REORTHOGONALISE_RATIO * original_norm:
            logger.debug("re-orthogonalising column %s at position %d", names[k], k + 1)
            for j in range(k):
                correction = X[:, j] @ v
                Q[j, k] += correction
                v -= correction * X[:, j]
            residual_norm = np.linalg.norm(v)
        if residual_norm <= EPS_RANK * original_norm:
            raise RankDeficientError(k + 1, names[k])
        X[:, k] = v / residual_norm
        Q[k, k] = residual_norm
    return GsDecomposition(
        X=_frozen(X),
        Q=_frozen(Q),
        order=order,
        q_rows=_frozen(invert_upper_triangular(Q)),
        col_names=names,
    )


def stack_replicates(M: DesignMatrix, k: int) -> DesignMatrix:
    """
    Stack k copies of the design on top of each other.

    Args:
        M (DesignMatrix): The pilot design.
        k (int): Number of copies, at least 1.

    Returns:
        DesignMatrix: The (k n) x p design [M; M; ...; M].
    """
    if int(k) != k or k < 1:
        raise InvalidDesignError(f"replicate count must be a positive integer, got {k}")
    return DesignMatrix(
        values=np.tile(M.values, (int(k), 1)),
        col_names=M.col_names,
        centered=M.centered,
        scaled=M.scaled,
    )
