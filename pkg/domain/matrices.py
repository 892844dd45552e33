"""
Dense symmetric linear algebra shared by every estimator.

Matrices are plain float64 numpy arrays; observations are stored as rows.
All functions are pure and return fresh read-only arrays.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from domain.errors import InvalidInputError, SingularCovarianceError


logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12
PIVOT_TOLERANCE = 1e-12


def as_matrix(X, name: str = "X") -> np.ndarray:
    """
    Validate and convert input to a finite 2-D float array.

    Raises:
        InvalidInputError: if the input is empty, not 2-D or not finite
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise InvalidInputError(f"{name} must be a 2-D matrix, got {X.ndim} dimension(s)")
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise InvalidInputError(f"{name} must be non-empty, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return X


def as_symmetric(A, name: str = "matrix") -> np.ndarray:
    """Validate a square, finite, numerically symmetric matrix."""
    A = as_matrix(A, name)
    if A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {A.shape}")

    scale = max(np.max(np.abs(A)), 1.0)
    if np.max(np.abs(A - A.T)) > SYMMETRY_TOLERANCE * scale:
        raise InvalidInputError(f"{name} is not symmetric")
    return 0.5 * (A + A.T)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def sample_mean(X) -> np.ndarray:
    """Coordinate-wise arithmetic mean of the rows of X."""
    X = as_matrix(X)
    return _frozen(X.mean(axis=0))


def sample_covariance(X) -> np.ndarray:
    """
    Sample covariance with divisor n.

    Sigma = (1/n) sum (x_i - xbar)(x_i - xbar)^T
    """
    X = as_matrix(X)
    centered = X - X.mean(axis=0)
    cov = centered.T @ centered / X.shape[0]
    return _frozen(0.5 * (cov + cov.T))


@dataclass(frozen=True)
class GeneralizedEigenResult:
    """
    Value Object: solution of the symmetric-definite pencil Gamma v = lambda Sigma v.

    Eigenvalues are sorted descending; eigenvectors are the matching columns,
    Sigma-orthonormal, with the largest-magnitude coordinate nonnegative.
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        if self.eigenvalues.ndim != 1:
            raise InvalidInputError("Eigenvalues must be a vector")
        if self.eigenvectors.shape != (self.eigenvalues.size, self.eigenvalues.size):
            raise InvalidInputError(
                f"Eigenvector matrix shape {self.eigenvectors.shape} does not match "
                f"{self.eigenvalues.size} eigenvalues"
            )

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def leading(self, k: int) -> np.ndarray:
        """First k eigenvector columns."""
        return self.eigenvectors[:, :k]


def apply_sign_convention(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its first largest-magnitude coordinate is nonnegative."""
    vectors = np.array(vectors, dtype=float)
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def generalized_eigen(gamma, sigma, ridge: float = 0.0) -> GeneralizedEigenResult:
    """
    Solve Gamma v = lambda (Sigma + ridge I) v.

    The pencil is reduced to a standard symmetric problem by whitening with
    the Cholesky factor L of Sigma + ridge I:
        C = L^-1 Gamma L^-T,  C u = lambda u,  v = L^-T u

    Args:
        gamma: symmetric candidate matrix (p x p)
        sigma: positive semidefinite covariance (p x p)
        ridge: nonnegative diagonal regularization

    Returns:
        GeneralizedEigenResult with descending eigenvalues

    Raises:
        InvalidInputError: on shape mismatch, asymmetry or negative ridge
        SingularCovarianceError: if Sigma + ridge I cannot be factored
    """
    gamma = as_symmetric(gamma, "gamma")
    sigma = as_symmetric(sigma, "sigma")
    if gamma.shape != sigma.shape:
        raise InvalidInputError(
            f"gamma {gamma.shape} and sigma {sigma.shape} must have the same dimension"
        )
    if ridge < 0 or not np.isfinite(ridge):
        raise InvalidInputError(f"Ridge must be a finite nonnegative number, got {ridge}")

    p = sigma.shape[0]
    regularized = sigma + ridge * np.eye(p)
    threshold = PIVOT_TOLERANCE * np.trace(regularized) / p

    try:
        factor = linalg.cholesky(regularized, lower=True)
    except linalg.LinAlgError as e:
        raise SingularCovarianceError(
            f"Covariance is not positive definite ({e}); increase the ridge"
        ) from e

    pivots = np.diag(factor) ** 2
    if threshold <= 0 or np.min(pivots) < threshold:
        raise SingularCovarianceError(
            f"Covariance is numerically singular (smallest pivot {np.min(pivots):.3e}, "
            f"threshold {threshold:.3e}); increase the ridge"
        )

    half = linalg.solve_triangular(factor, gamma, lower=True)
    whitened = linalg.solve_triangular(factor, half.T, lower=True)
    whitened = 0.5 * (whitened + whitened.T)

    values, vectors = linalg.eigh(whitened)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = linalg.solve_triangular(factor.T, vectors[:, order], lower=False)

    logger.debug(f"Solved {p}x{p} pencil, leading eigenvalue {values[0]:.6g}")
    return GeneralizedEigenResult(
        eigenvalues=_frozen(values),
        eigenvectors=_frozen(apply_sign_convention(vectors)),
    )
