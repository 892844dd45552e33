"""
Subspace accuracy and direction relevance metrics.
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from domain.errors import InvalidBasisError, InvalidInputError, UndefinedCorrelationError
from domain.estimate import EdrEstimate
from domain.matrices import as_matrix


RANK_TOLERANCE = 1e-10


@dataclass(frozen=True)
class SubspaceBasis:
    """
    Value Object: K linearly independent columns spanning a subspace of R^p.
    """
    columns: np.ndarray

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=float)
        if cols.ndim == 1:
            cols = cols[:, None]
        cols = as_matrix(cols, "basis")
        if cols.shape[1] > cols.shape[0]:
            raise InvalidBasisError(f"{cols.shape[1]} columns cannot be independent in R^{cols.shape[0]}")
        singular = np.linalg.svd(cols, compute_uv=False)
        if singular[-1] < RANK_TOLERANCE * singular[0]:
            raise InvalidBasisError(
                f"Basis is rank deficient (singular values {singular[0]:.3e} .. {singular[-1]:.3e})"
            )
        cols.setflags(write=False)
        object.__setattr__(self, 'columns', cols)

    @property
    def p(self) -> int:
        return self.columns.shape[0]

    @property
    def k(self) -> int:
        return self.columns.shape[1]

    @classmethod
    def coordinate(cls, p: int, axes: tuple[int, ...]) -> 'SubspaceBasis':
        """Span of the standard basis vectors with the given 0-based indices."""
        return cls(np.eye(p)[:, list(axes)])


def projection_matrix(basis: SubspaceBasis) -> np.ndarray:
    """Orthogonal projector B (B^T B)^-1 B^T, computed from a QR factor."""
    q, _ = np.linalg.qr(basis.columns)
    projector = q @ q.T
    return 0.5 * (projector + projector.T)


def trace_correlation(true_basis: SubspaceBasis, estimated_basis: SubspaceBasis) -> float:
    """
    r(K) = trace(P_B P_Bhat) / K, in [0, 1].

    Raises:
        InvalidInputError: if ambient or subspace dimensions differ
    """
    if true_basis.p != estimated_basis.p or true_basis.k != estimated_basis.k:
        raise InvalidInputError(
            f"Bases differ in shape: {true_basis.columns.shape} vs {estimated_basis.columns.shape}"
        )
    value = np.trace(projection_matrix(true_basis) @ projection_matrix(estimated_basis)) / true_basis.k
    return float(np.clip(value, 0.0, 1.0))


def projector_distance(first: SubspaceBasis, second: SubspaceBasis) -> float:
    """Frobenius norm of P_1 - P_2."""
    if first.p != second.p:
        raise InvalidInputError(f"Ambient dimensions differ: {first.p} vs {second.p}")
    return float(np.linalg.norm(projection_matrix(first) - projection_matrix(second)))


@dataclass(frozen=True)
class DirectionCorrelations:
    """
    Value Object: |corr(beta_k^T x, y)| per retained direction and their
    eigenvalue-weighted average (weights normalized to sum to one).
    """
    per_direction: tuple[float, ...]
    weights: tuple[float, ...]
    weighted_average: float

    def to_dict(self) -> dict:
        return {
            'per_direction': list(self.per_direction),
            'weights': list(self.weights),
            'weighted_average': self.weighted_average,
        }


def _abs_correlation(a: np.ndarray, b: np.ndarray) -> float:
    if np.std(a) == 0 or np.std(b) == 0:
        raise UndefinedCorrelationError("Correlation is undefined for a zero-variance series")
    return float(abs(np.corrcoef(a, b)[0, 1]))


def direction_response_correlations(estimate: EdrEstimate, X, y) -> DirectionCorrelations:
    """
    Absolute Pearson correlation between each projected predictor and y.

    Raises:
        UndefinedCorrelationError: if a projection or y has zero variance
    """
    X = as_matrix(X)
    y = np.asarray(y, dtype=float).ravel()
    if X.shape != (y.size, estimate.p):
        raise InvalidInputError(f"X shape {X.shape} does not match estimate (p={estimate.p}) and y")

    projected = estimate.project(X)
    correlations = tuple(_abs_correlation(projected[:, k], y) for k in range(estimate.dimension))

    retained = np.clip(estimate.retained_eigenvalues, 0.0, None)
    if retained.sum() > 0:
        weights = retained / retained.sum()
    else:
        weights = np.full(estimate.dimension, 1.0 / estimate.dimension)

    return DirectionCorrelations(
        per_direction=correlations,
        weights=tuple(float(w) for w in weights),
        weighted_average=float(weights @ np.asarray(correlations)),
    )


def paired_sign_test(first, second) -> float:
    """
    One-sided sign test p-value for "first exceeds second" over matched pairs.

    Ties are dropped; returns 1.0 when every pair ties.
    """
    diff = np.asarray(first, dtype=float) - np.asarray(second, dtype=float)
    wins = int(np.count_nonzero(diff > 0))
    trials = wins + int(np.count_nonzero(diff < 0))
    if trials == 0:
        return 1.0
    return float(stats.binomtest(wins, trials, 0.5, alternative='greater').pvalue)
