"""
Equal-count slicing of observations by their response values.
"""

from dataclasses import dataclass

import numpy as np

from domain.errors import InvalidInputError
from domain.matrices import as_matrix


@dataclass(frozen=True)
class SliceAssignment:
    """
    Value Object: partition of n observations into H response-ordered slices.

    Slice indices are 0-based. Slices are contiguous in sorted-y order and
    their sizes differ by at most one, larger slices first.
    """
    n_slices: int
    membership: np.ndarray  # slice index per observation
    counts: tuple[int, ...]
    order: np.ndarray  # observation indices in sorted-y order

    def __post_init__(self):
        if self.n_slices < 1:
            raise InvalidInputError(f"Number of slices must be positive, got {self.n_slices}")
        if len(self.counts) != self.n_slices:
            raise InvalidInputError("One count per slice is required")
        if min(self.counts) < 1:
            raise InvalidInputError("Every slice must contain at least one observation")
        if sum(self.counts) != self.membership.size:
            raise InvalidInputError(
                f"Slice counts sum to {sum(self.counts)}, expected {self.membership.size}"
            )

    @property
    def n(self) -> int:
        return self.membership.size

    def members(self, h: int) -> np.ndarray:
        """Observation indices in slice h, in sorted-y order."""
        start = sum(self.counts[:h])
        return self.order[start:start + self.counts[h]]


@dataclass(frozen=True)
class SliceStats:
    """
    Value Object: per-slice probabilities p_h = n_h / n and mean vectors m_h.
    """
    probs: np.ndarray  # (H,)
    means: np.ndarray  # (H, p)

    def __post_init__(self):
        if self.probs.ndim != 1 or self.means.ndim != 2:
            raise InvalidInputError("Slice probabilities must be a vector and means a matrix")
        if self.means.shape[0] != self.probs.size:
            raise InvalidInputError(
                f"{self.means.shape[0]} slice means for {self.probs.size} probabilities"
            )
        if abs(self.probs.sum() - 1.0) > 1e-12:
            raise InvalidInputError(f"Slice probabilities sum to {self.probs.sum()}, not 1")

    @property
    def n_slices(self) -> int:
        return self.probs.size

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def mixture_mean(self) -> np.ndarray:
        """sum_h p_h m_h, which equals the overall sample mean."""
        return self.probs @ self.means


def assign_slices(y, n_slices: int) -> SliceAssignment:
    """
    Bin observations into equal-count slices of sorted responses.

    Ties are broken by original index. The first n mod H slices receive
    ceil(n/H) observations, the rest floor(n/H).

    Raises:
        InvalidInputError: if H < 1 or H > n
    """
    y = np.asarray(y, dtype=float).ravel()
    n = y.size
    if n_slices < 1 or n_slices > n:
        raise InvalidInputError(f"Number of slices must be in [1, {n}], got {n_slices}")

    order = np.argsort(y, kind="stable")
    base, remainder = divmod(n, n_slices)
    counts = tuple(base + 1 if h < remainder else base for h in range(n_slices))

    membership = np.empty(n, dtype=int)
    membership[order] = np.repeat(np.arange(n_slices), counts)
    membership.setflags(write=False)
    order.setflags(write=False)

    return SliceAssignment(n_slices=n_slices, membership=membership, counts=counts, order=order)


def slice_stats(X, assignment: SliceAssignment) -> SliceStats:
    """Empirical probability and predictor mean of every slice."""
    X = as_matrix(X)
    if X.shape[0] != assignment.n:
        raise InvalidInputError(
            f"Assignment covers {assignment.n} observations, X has {X.shape[0]} rows"
        )

    counts = np.asarray(assignment.counts, dtype=float)
    sums = np.zeros((assignment.n_slices, X.shape[1]))
    np.add.at(sums, assignment.membership, X)

    probs = counts / X.shape[0]
    means = sums / counts[:, None]
    probs.setflags(write=False)
    means.setflags(write=False)
    return SliceStats(probs=probs, means=means)
