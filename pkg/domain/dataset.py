"""
Domain model for a regression sample.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from domain.errors import InvalidInputError
from domain.matrices import as_matrix


@dataclass(frozen=True)
class Dataset:
    """
    Value Object: predictor matrix X (n x p) with response y (n).

    Column names are optional; when present they label the predictors
    in order and `response` names y.
    """
    X: np.ndarray
    y: np.ndarray
    columns: Optional[tuple[str, ...]] = None
    response: str = "y"

    def __post_init__(self):
        X = as_matrix(self.X, "X")
        y = np.asarray(self.y, dtype=float).ravel()
        if y.size != X.shape[0]:
            raise InvalidInputError(f"X has {X.shape[0]} rows but y has {y.size} values")
        if not np.all(np.isfinite(y)):
            raise InvalidInputError("Response contains non-finite values")
        if self.columns is not None and len(self.columns) != X.shape[1]:
            raise InvalidInputError(
                f"{len(self.columns)} column names for {X.shape[1]} predictors"
            )
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, 'X', X)
        object.__setattr__(self, 'y', y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def column_names(self) -> tuple[str, ...]:
        """Predictor names, generated as x1..xp when absent."""
        if self.columns is not None:
            return self.columns
        return tuple(f"x{j + 1}" for j in range(self.p))

    def column(self, name: str) -> np.ndarray:
        """Predictor column by name, or the response."""
        if name == self.response:
            return self.y
        try:
            return self.X[:, self.column_names.index(name)]
        except ValueError:
            raise InvalidInputError(f"Unknown column '{name}'") from None

    def subset(self, rows) -> 'Dataset':
        """Dataset restricted to the given row indices."""
        rows = np.asarray(rows)
        return Dataset(self.X[rows], self.y[rows], self.columns, self.response)

    def __str__(self) -> str:
        return f"Dataset(n={self.n}, p={self.p}, response={self.response})"
