"""
Application layer: fit an EDR subspace with SIR, OSIR or CUME.
"""

import logging
from typing import Optional, Union

import numpy as np

from domain.dataset import Dataset
from domain.dimension import modified_bic, penalty_constant
from domain.errors import InvalidInputError
from domain.estimate import CumulativeForm, EdrEstimate, EstimatorConfig, Method
from domain.kernels import (
    KernelMatrix, cume_kernel, cumulative_slicing_kernel, osir_kernel, sir_kernel
)
from domain.matrices import GeneralizedEigenResult, generalized_eigen, sample_covariance, sample_mean
from domain.slicing import assign_slices, slice_stats


logger = logging.getLogger(__name__)

AUTO = "auto"


def build_kernel(data: Dataset, config: EstimatorConfig, xbar: Optional[np.ndarray] = None) -> KernelMatrix:
    """Kernel matrix of the configured method for a dataset."""
    if config.method is Method.CUME:
        if config.resolved_form is CumulativeForm.MEAN:
            return cume_kernel(data.X, data.y)
        return cumulative_slicing_kernel(data.X, data.y)

    if config.slices > data.n:
        raise InvalidInputError(f"Cannot form {config.slices} slices from {data.n} observations")
    if xbar is None:
        xbar = sample_mean(data.X)
    stats = slice_stats(data.X, assign_slices(data.y, config.slices))
    if config.method is Method.SIR:
        return sir_kernel(stats, xbar)
    return osir_kernel(stats, xbar, config.resolved_level)


def solve(data: Dataset, config: EstimatorConfig, ridge: float = 0.0) -> GeneralizedEigenResult:
    """Full spectrum of the kernel against the sample covariance."""
    xbar = sample_mean(data.X)
    kernel = build_kernel(data, config, xbar)
    return generalized_eigen(kernel.matrix, sample_covariance(data.X), ridge)


def fit_edr(
    data: Dataset,
    config: EstimatorConfig,
    dimension: Union[int, str] = AUTO,
    ridge: float = 0.0,
    cn: Optional[float] = None
) -> EdrEstimate:
    """
    Fit the EDR subspace.

    The sample mean and covariance are computed from the raw data; the
    kernel is solved against the covariance and the leading directions
    are kept.

    Args:
        data: predictors and response
        config: method with its slice count and overlap level
        dimension: number of directions, or "auto" for the modified BIC
        ridge: diagonal regularization of the covariance
        cn: BIC penalty override (default: the method's penalty constant)

    Returns:
        EdrEstimate with the selected basis and, when auto, the BIC curve
    """
    result = solve(data, config, ridge)

    bic = None
    if dimension == AUTO:
        if cn is None:
            cn = penalty_constant(
                data.n, data.p, config.slices or 1, config.resolved_level, config.method
            )
        bic = modified_bic(result.eigenvalues, cn, data.n)
        k = bic.argmax
    else:
        k = int(dimension)
        if not 1 <= k <= data.p:
            raise InvalidInputError(f"Dimension must be in 1..{data.p}, got {dimension}")

    logger.debug(f"{config.label}: n={data.n}, p={data.p}, K={k}, lambda_1={result.eigenvalues[0]:.4g}")
    return EdrEstimate(
        eigenvalues=result.eigenvalues,
        basis=result.leading(k),
        dimension=k,
        config=config,
        ridge=ridge,
        bic_curve=bic,
        n=data.n,
    )
