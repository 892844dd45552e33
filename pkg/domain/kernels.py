"""
Candidate kernel matrices paired with the sample covariance.

SIR uses the weighted covariance of slice means, OSIR the covariance of
overlapping bundle means (level L bundles join L+1 adjacent slices), and
CUME the covariance of cumulative means, either normalized per cumulative
set or as cumulative sums over n. The difference forms express the
level-1 and level-2 OSIR kernels as corrections of the SIR kernel and are
kept as independent cross-checks of the bundle construction.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from domain.errors import InvalidInputError, UnsupportedLevelError
from domain.estimate import Method
from domain.matrices import as_matrix
from domain.slicing import SliceStats


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelMatrix:
    """
    Value Object: symmetric PSD candidate matrix with its provenance.
    """
    matrix: np.ndarray
    method: Method
    slices: Optional[int] = None
    level: Optional[int] = None

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInputError(f"Kernel must be square, got shape {m.shape}")
        if not np.allclose(m, m.T, rtol=0, atol=1e-12 * max(np.max(np.abs(m)), 1.0)):
            raise InvalidInputError("Kernel must be symmetric")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _outer_sum(weights: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """sum_i w_i v_i v_i^T, symmetrized."""
    out = (vectors.T * weights) @ vectors
    out = 0.5 * (out + out.T)
    out.setflags(write=False)
    return out


def _check_center(stats: SliceStats, xbar) -> np.ndarray:
    xbar = np.asarray(xbar, dtype=float).ravel()
    if xbar.size != stats.dim:
        raise InvalidInputError(f"Mean has length {xbar.size}, slices have dimension {stats.dim}")
    return xbar


def sir_kernel(stats: SliceStats, xbar) -> KernelMatrix:
    """Gamma_H = sum_h p_h (m_h - xbar)(m_h - xbar)^T."""
    xbar = _check_center(stats, xbar)
    matrix = _outer_sum(stats.probs, stats.means - xbar)
    return KernelMatrix(matrix, Method.SIR, slices=stats.n_slices, level=0)


def bundle_moments(stats: SliceStats, level: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Probabilities and means of all level-L bundles, ghost slices included.

    Bundles start at slice h = -L+1 .. H (1-based); slices outside 1..H are
    ghosts with zero probability and zero mean. Bundle probability is the
    member total divided by L+1. Bundles with zero total get a zero mean.

    Returns:
        (bundle_probs of length H+L, bundle_means of shape (H+L, p))
    """
    H = stats.n_slices
    weighted = stats.probs[:, None] * stats.means

    # cumulative sums padded with L ghost slices on each side
    cum_p = np.concatenate([np.zeros(level + 1), np.cumsum(stats.probs), np.full(level, 1.0)])
    cum_p[H + level + 1:] = cum_p[H + level]
    cum_m = np.zeros((H + 2 * level + 1, stats.dim))
    cum_m[level + 1:H + level + 1] = np.cumsum(weighted, axis=0)
    cum_m[H + level + 1:] = cum_m[H + level]

    starts = np.arange(H + level)
    totals = cum_p[starts + level + 1] - cum_p[starts]
    sums = cum_m[starts + level + 1] - cum_m[starts]

    means = np.zeros_like(sums)
    nonzero = totals > 0
    if not np.all(nonzero):
        logger.debug(f"{np.count_nonzero(~nonzero)} zero-probability bundle(s) contribute nothing")
    means[nonzero] = sums[nonzero] / totals[nonzero, None]
    return totals / (level + 1), means


def osir_kernel(stats: SliceStats, xbar, level: int) -> KernelMatrix:
    """
    Level-L overlapping kernel.

    Gamma_H^(L) = sum_{h=-L+1}^{H} p_{h:h+L} (m_{h:h+L} - xbar)(m_{h:h+L} - xbar)^T

    Level 0 returns the SIR kernel.

    Raises:
        InvalidInputError: if L < 0 or L >= H (L = 0 is always allowed)
    """
    H = stats.n_slices
    if level < 0:
        raise InvalidInputError(f"Overlap level must be nonnegative, got {level}")
    if level == 0:
        sir = sir_kernel(stats, xbar)
        return KernelMatrix(sir.matrix, Method.OSIR, slices=H, level=0)
    if level >= H:
        raise InvalidInputError(f"Overlap level must be at most H-1 = {H - 1}, got {level}")

    xbar = _check_center(stats, xbar)
    probs, means = bundle_moments(stats, level)
    matrix = _outer_sum(probs, np.where(probs[:, None] > 0, means - xbar, 0.0))
    return KernelMatrix(matrix, Method.OSIR, slices=H, level=level)


def _padded(stats: SliceStats, ghosts: int) -> tuple[np.ndarray, np.ndarray]:
    probs = np.concatenate([np.zeros(ghosts), stats.probs, np.zeros(ghosts)])
    means = np.vstack([np.zeros((ghosts, stats.dim)), stats.means, np.zeros((ghosts, stats.dim))])
    return probs, means


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def osir_difference_form(stats: SliceStats, xbar, level: int) -> KernelMatrix:
    """
    Level-1 or level-2 kernel written as a correction of the SIR kernel.

    Level 1:
        Gamma_H - 1/2 sum_{h=1}^{H-1} p_h p_{h+1} / (p_h + p_{h+1}) d_h d_h^T
    Level 2 (ghost slices at h = -1, 0 and H+1, H+2):
        Gamma_H - 1/3 sum_{h=-1}^{H} [ a_h d_h d_h^T + b_h d_{h+1} d_{h+1}^T ]
                + 1/3 sum_{h=-1}^{H} c_h s_h s_h^T
    with d_h = m_{h+1} - m_h, s_h = m_{h+2} - 2 m_{h+1} + m_h, and
        a_h = (p_h p_{h+1} + 2 p_h p_{h+2}) / P_h
        b_h = (p_{h+1} p_{h+2} + 2 p_h p_{h+2}) / P_h
        c_h = p_h p_{h+2} / P_h,      P_h = p_h + p_{h+1} + p_{h+2}

    Raises:
        UnsupportedLevelError: for levels other than 1 and 2
    """
    if level not in (1, 2):
        raise UnsupportedLevelError(f"Difference form exists for levels 1 and 2, got {level}")
    H = stats.n_slices
    if level >= H:
        raise InvalidInputError(f"Overlap level must be at most H-1 = {H - 1}, got {level}")

    gamma = np.array(sir_kernel(stats, xbar).matrix)
    p, m = stats.probs, stats.means

    if level == 1:
        weights = p[:-1] * p[1:] / (p[:-1] + p[1:])
        gamma -= 0.5 * _outer_sum(weights, np.diff(m, axis=0))
    else:
        pp, mm = _padded(stats, 2)
        for h in range(H + 2):  # padded index h <-> slice h-1 (1-based)
            p0, p1, p2 = pp[h], pp[h + 1], pp[h + 2]
            total = p0 + p1 + p2
            d0 = mm[h + 1] - mm[h]
            d1 = mm[h + 2] - mm[h + 1]
            s = mm[h + 2] - 2.0 * mm[h + 1] + mm[h]
            gamma -= _ratio(p0 * p1 + 2.0 * p0 * p2, total) / 3.0 * np.outer(d0, d0)
            gamma -= _ratio(p1 * p2 + 2.0 * p0 * p2, total) / 3.0 * np.outer(d1, d1)
            gamma += _ratio(p0 * p2, total) / 3.0 * np.outer(s, s)

    gamma = 0.5 * (gamma + gamma.T)
    gamma.setflags(write=False)
    return KernelMatrix(gamma, Method.OSIR, slices=H, level=level)


def level_two_equal_count_form(
    stats: SliceStats,
    xbar,
    edge_weight: Optional[float] = None
) -> KernelMatrix:
    """
    Level-2 kernel for equal slice counts (p_h = 1/H).

        Gamma_H - 2/(3H) sum_{h=1}^{H-1} d_h d_h^T
                + 1/(9H) sum_{h=1}^{H-2} s_h s_h^T
                + w (d_1 d_1^T + d_{H-1} d_{H-1}^T)

    Specializing the general level-2 form gives the edge weight
    w = 1/(6H): the first and last differences appear in one interior
    bundle (1/(3H)) and one boundary bundle (1/(6H)) only. Pass another
    `edge_weight` to evaluate alternative boundary conventions.

    Raises:
        InvalidInputError: if slice counts differ or H < 3
    """
    H = stats.n_slices
    if H < 3:
        raise InvalidInputError(f"Level-2 overlap needs at least 3 slices, got {H}")
    if not np.allclose(stats.probs, 1.0 / H, rtol=0, atol=1e-12):
        raise InvalidInputError("Equal-count form requires equal slice probabilities")
    if edge_weight is None:
        edge_weight = 1.0 / (6.0 * H)

    d = np.diff(stats.means, axis=0)
    s = np.diff(stats.means, n=2, axis=0)

    gamma = np.array(sir_kernel(stats, xbar).matrix)
    gamma -= 2.0 / (3.0 * H) * _outer_sum(np.ones(H - 1), d)
    gamma += 1.0 / (9.0 * H) * _outer_sum(np.ones(H - 2), s)
    gamma += edge_weight * (np.outer(d[0], d[0]) + np.outer(d[-1], d[-1]))
    gamma = 0.5 * (gamma + gamma.T)
    gamma.setflags(write=False)
    return KernelMatrix(gamma, Method.OSIR, slices=H, level=2)


def _cumulative_means(X: np.ndarray, y: np.ndarray, ties_share: bool) -> np.ndarray:
    """Means of x over {j: y_j <= y_i} in sorted-y order."""
    order = np.argsort(y, kind="stable")
    sums = np.cumsum(X[order], axis=0)
    ends = np.arange(y.size)
    if ties_share:
        sorted_y = y[order]
        ends = np.searchsorted(sorted_y, sorted_y, side="right") - 1
    return sums[ends] / (ends + 1)[:, None]


def _check_xy(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = as_matrix(X)
    y = np.asarray(y, dtype=float).ravel()
    if y.size != X.shape[0]:
        raise InvalidInputError(f"X has {X.shape[0]} rows but y has {y.size} values")
    return X, y


def cume_kernel(X, y) -> KernelMatrix:
    """
    Cumulative slicing kernel.

    M(y_i) = mean of x_j over {j: y_j <= y_i}
    Xi = 1/n sum_i (M(y_i) - xbar)(M(y_i) - xbar)^T

    Tied responses share the same M value.
    """
    X, y = _check_xy(X, y)
    centered = _cumulative_means(X, y, ties_share=True) - X.mean(axis=0)
    matrix = _outer_sum(np.full(y.size, 1.0 / y.size), centered)
    return KernelMatrix(matrix, Method.CUME)


def cumulative_slicing_kernel(X, y) -> KernelMatrix:
    """
    Cumulative slicing kernel built from unnormalized cumulative sums.

    m(y_i) = 1/n sum_j (x_j - xbar) 1(y_j <= y_i)
    Xi = 1/n sum_i m(y_i) m(y_i)^T

    m(y_i) is the cumulative-mean deviation scaled by the share
    |{j: y_j <= y_i}| / n, so small cumulative sets are down-weighted.
    Tied responses share the same m value.
    """
    X, y = _check_xy(X, y)
    n = y.size
    order = np.argsort(y, kind="stable")
    sorted_y = y[order]
    sums = np.cumsum(X[order] - X.mean(axis=0), axis=0)
    ends = np.searchsorted(sorted_y, sorted_y, side="right") - 1
    matrix = _outer_sum(np.full(n, 1.0 / n), sums[ends] / n)
    return KernelMatrix(matrix, Method.CUME)


def cumulative_overlap_kernel(X, y) -> KernelMatrix:
    """
    Closed form of the one-point-per-slice, maximal-overlap kernel
    (H = n, L = n-1) in terms of prefix means M_k of the sorted sample:

        sum_{k=1}^{n-1} k / (n (n-k)) (M_k - xbar)(M_k - xbar)^T

    Each suffix bundle mean is a multiple of the complementary prefix
    deviation, which folds the two bundle families into one sum.
    """
    X, y = _check_xy(X, y)
    n = y.size
    if n == 1:
        return KernelMatrix(np.zeros((X.shape[1], X.shape[1])), Method.OSIR, slices=1, level=0)
    centered = _cumulative_means(X, y, ties_share=False)[:-1] - X.mean(axis=0)
    k = np.arange(1, n, dtype=float)
    matrix = _outer_sum(k / (n * (n - k)), centered)
    return KernelMatrix(matrix, Method.OSIR, slices=n, level=n - 1)
