"""
Structural dimension selection by the modified BIC criterion.

    G(k) = n sum_{i<=k} lambda_i^2 / sum_{i<=p} lambda_i^2 - C_n k(k+1)/2
    K = argmax_k G(k)
"""

import numpy as np

from domain.errors import DegenerateSpectrumError, InvalidInputError
from domain.estimate import BicCurve, Method


def penalty_constant(n: int, p: int, slices: int, level: int, method: Method) -> float:
    """
    Default penalty C_n.

    SIR/OSIR: 2 n^(3/4) / (p (L+1) sqrt(H)), with L = 0 for SIR.
    CUME:     2 n^(3/4) / p.
    """
    if n < 1 or p < 1:
        raise InvalidInputError(f"n and p must be positive, got n={n}, p={p}")
    if method is Method.CUME:
        return 2.0 * n ** 0.75 / p
    if slices < 1 or level < 0:
        raise InvalidInputError(f"Invalid slices={slices} or level={level}")
    return 2.0 * n ** 0.75 / (p * (level + 1) * np.sqrt(slices))


def modified_bic(eigenvalues, cn: float, n: int) -> BicCurve:
    """
    Evaluate G(k) for k = 1..p and pick the first maximizer.

    Negative eigenvalues (round-off) are clamped to zero.

    Raises:
        DegenerateSpectrumError: if every eigenvalue is zero
    """
    values = np.clip(np.asarray(eigenvalues, dtype=float).ravel(), 0.0, None)
    if values.size == 0:
        raise InvalidInputError("At least one eigenvalue is required")
    if np.any(np.diff(values) > 1e-12 * max(values[0], 1.0)):
        raise InvalidInputError("Eigenvalues must be sorted in descending order")

    squares = values ** 2
    total = squares.sum()
    if total <= 0:
        raise DegenerateSpectrumError("All eigenvalues are zero; dimension is undefined")

    k = np.arange(1, values.size + 1)
    curve = n * np.cumsum(squares) / total - cn * k * (k + 1) / 2.0
    curve.setflags(write=False)
    return BicCurve(values=curve, argmax=int(np.argmax(curve)) + 1, cn=float(cn))
