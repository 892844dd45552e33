"""
Application layer: replicated Monte Carlo experiments on the benchmark models.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from application.estimation import solve
from domain.dimension import modified_bic, penalty_constant
from domain.errors import InvalidInputError
from domain.estimate import EstimatorConfig
from domain.metrics import SubspaceBasis, trace_correlation
from domain.models import ModelSpec, generate_model
from infrastructure.worker_pool import WorkerPool


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConfigurationResult:
    """
    Aggregated replications for one (model, method, H, L) configuration.

    Trace correlations use K fixed at the truth; the frequency triple
    comes from the BIC-selected dimension of the same fits.
    """
    model_id: int
    n: int
    p: int
    true_dimension: int
    config: EstimatorConfig
    reps: int
    seed: int
    mean_r: float
    sd_r: float
    se_r: float
    freq_under: float
    freq_exact: float
    freq_over: float
    trace_correlations: tuple[float, ...] = field(default=(), repr=False)
    selected_dimensions: tuple[int, ...] = field(default=(), repr=False)

    def __post_init__(self):
        total = self.freq_under + self.freq_exact + self.freq_over
        if abs(total - 1.0) > 1e-12:
            raise InvalidInputError(f"Dimension frequencies sum to {total}, not 1")
        if self.sd_r < 0 or self.se_r < 0:
            raise InvalidInputError("Deviations must be nonnegative")

    @property
    def label(self) -> str:
        return self.config.label

    def to_dict(self) -> dict:
        return {
            'model': self.model_id,
            'n': self.n,
            'p': self.p,
            'true_dimension': self.true_dimension,
            **self.config.to_dict(),
            'reps': self.reps,
            'seed': self.seed,
            'mean_r': self.mean_r,
            'sd_r': self.sd_r,
            'se_r': self.se_r,
            'freq_under': self.freq_under,
            'freq_exact': self.freq_exact,
            'freq_over': self.freq_over,
        }

    def __str__(self) -> str:
        H = self.config.slices if self.config.slices is not None else "-"
        return (
            f"model {self.model_id} {self.label:<8} H={H}: r={self.mean_r:.4f} "
            f"({self.se_r:.4f}) K: {self.freq_under:.3f}/{self.freq_exact:.3f}/{self.freq_over:.3f}"
        )


@dataclass(frozen=True)
class SimulationReport:
    """Results of one Monte Carlo run, in (model, configuration) order."""
    results: tuple[ConfigurationResult, ...]
    reps: int
    seed: int

    def find(self, model_id: int, label: str, slices: Optional[int] = None) -> ConfigurationResult:
        for result in self.results:
            if (
                result.model_id == model_id
                and result.label == label
                and (slices is None or result.config.slices == slices)
            ):
                return result
        raise KeyError(f"No result for model {model_id}, {label}, H={slices}")

    def to_dict(self) -> dict:
        return {
            'reps': self.reps,
            'seed': self.seed,
            'results': [r.to_dict() for r in self.results],
        }

    def csv_rows(self) -> list[dict]:
        """One row per (model, method, H, L)."""
        columns = (
            'mean_r', 'sd_r', 'se_r', 'freq_under', 'freq_exact', 'freq_over', 'reps', 'seed'
        )
        rows = []
        for result in self.results:
            values = result.to_dict()
            row = {
                'model': result.model_id,
                'method': result.config.method.value,
                'H': values['slices'],
                'L': values['level'],
            }
            row.update({c: values[c] for c in columns})
            rows.append(row)
        return rows


def _replicate(task: tuple) -> list[tuple[float, int]]:
    """One replication of one model: (r, K_hat) for every configuration."""
    model_id, n, p, seed, rep, configs, ridge = task
    spec = ModelSpec(model_id, n, p, seed, rep)
    data, truth = generate_model(spec)

    outcomes = []
    for config in configs:
        result = solve(data, config, ridge)
        estimated = SubspaceBasis(result.leading(spec.true_dimension))
        cn = penalty_constant(n, p, config.slices or 1, config.resolved_level, config.method)
        selected = modified_bic(result.eigenvalues, cn, n).argmax
        outcomes.append((trace_correlation(truth, estimated), selected))
    return outcomes


def _aggregate(spec: ModelSpec, config: EstimatorConfig, r: np.ndarray, k: np.ndarray, seed: int) -> ConfigurationResult:
    reps = r.size
    sd = float(np.std(r, ddof=1)) if reps > 1 else 0.0
    truth = spec.true_dimension
    return ConfigurationResult(
        model_id=spec.model_id,
        n=spec.n,
        p=spec.p,
        true_dimension=truth,
        config=config,
        reps=reps,
        seed=seed,
        mean_r=float(np.mean(r)),
        sd_r=sd,
        se_r=sd / np.sqrt(reps),
        freq_under=np.count_nonzero(k < truth) / reps,
        freq_exact=np.count_nonzero(k == truth) / reps,
        freq_over=np.count_nonzero(k > truth) / reps,
        trace_correlations=tuple(float(v) for v in r),
        selected_dimensions=tuple(int(v) for v in k),
    )


def run_monte_carlo(
    models: Sequence[int],
    configs: Sequence[EstimatorConfig],
    reps: int,
    seed: int = 0,
    workers: Optional[int] = 1,
    n: Optional[int] = None,
    p: Optional[int] = None,
    ridge: float = 0.0
) -> SimulationReport:
    """
    Replicate every configuration on every model.

    Replication i of a model draws its data from the stream (seed, model, i),
    so all configurations are compared on matched samples and the report is
    identical for any worker count.

    Args:
        models: benchmark model ids
        configs: estimator configurations to compare
        reps: replications per model
        seed: base seed
        workers: process count for the replication loop
        n, p: overrides of the published sample size and dimension
        ridge: covariance regularization

    Returns:
        SimulationReport with one result per (model, configuration)
    """
    if reps < 1:
        raise InvalidInputError(f"Replication count must be positive, got {reps}")
    if not configs:
        raise InvalidInputError("At least one estimator configuration is required")

    pool = WorkerPool(workers)
    configs = tuple(configs)
    results = []

    logger.info("=" * 60)
    logger.info(f"Monte Carlo: models {list(models)}, {len(configs)} configurations, {reps} reps")
    logger.info("=" * 60)

    for i, model_id in enumerate(models, 1):
        spec = ModelSpec.published(model_id, seed=seed, n=n, p=p)
        for config in configs:
            if config.slices is not None and config.slices > spec.n:
                raise InvalidInputError(f"H={config.slices} exceeds n={spec.n} for model {model_id}")

        logger.info(f"[{i}/{len(models)}] Model {model_id}: n={spec.n}, p={spec.p}, K={spec.true_dimension}")
        tasks = [(model_id, spec.n, spec.p, seed, rep, configs, ridge) for rep in range(reps)]
        outcomes = pool.map(_replicate, tasks)

        for j, config in enumerate(configs):
            r = np.array([outcome[j][0] for outcome in outcomes])
            k = np.array([outcome[j][1] for outcome in outcomes])
            result = _aggregate(spec, config, r, k, seed)
            logger.info(f"  → {result}")
            results.append(result)

    return SimulationReport(results=tuple(results), reps=reps, seed=seed)


@dataclass(frozen=True)
class RateCheck:
    """Mean subspace error 1 - r at increasing sample sizes."""
    sizes: tuple[int, ...]
    mean_errors: tuple[float, ...]

    @property
    def ratios(self) -> tuple[float, ...]:
        """Successive shrink factors error(n_i) / error(n_{i+1})."""
        return tuple(
            a / b if b > 0 else float('inf')
            for a, b in zip(self.mean_errors[:-1], self.mean_errors[1:])
        )

    def to_dict(self) -> dict:
        return {
            'sizes': list(self.sizes),
            'mean_errors': list(self.mean_errors),
            'ratios': list(self.ratios),
        }


def root_n_rate(
    model_id: int,
    config: EstimatorConfig,
    sizes: Sequence[int] = (100, 400, 1600),
    reps: int = 500,
    seed: int = 0,
    workers: Optional[int] = 1
) -> RateCheck:
    """
    Empirical convergence check: mean (1 - r) at each sample size.

    For a root-n consistent estimator the error shrinks roughly fourfold
    per fourfold increase of n.
    """
    errors = []
    for size in sizes:
        report = run_monte_carlo([model_id], [config], reps, seed, workers, n=size)
        errors.append(1.0 - report.results[0].mean_r)
        logger.info(f"n={size}: mean 1-r = {errors[-1]:.5f}")
    return RateCheck(sizes=tuple(sizes), mean_errors=tuple(errors))
