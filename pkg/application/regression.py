"""
Application layer: nearest-neighbor regression and the housing evaluation pipeline.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import linalg
from scipy.spatial import distance
from sklearn.model_selection import train_test_split
from sklearn.preprocessing import StandardScaler

from application.estimation import fit_edr
from domain.dataset import Dataset
from domain.errors import IngestionError, InvalidInputError
from domain.estimate import EstimatorConfig
from domain.matrices import as_matrix
from domain.metrics import DirectionCorrelations, direction_response_correlations, paired_sign_test
from domain.models import replication_rng
from infrastructure.worker_pool import WorkerPool


logger = logging.getLogger(__name__)

HOUSING_COLUMNS = (
    'crim', 'zn', 'indus', 'chas', 'nox', 'rm', 'age',
    'dis', 'rad', 'tax', 'ptratio', 'b', 'lstat', 'medv',
)
HOUSING_RESPONSE = 'medv'
HOUSING_LEVELS = (1, 2, 3, 5, 10, 15, 19)


def knn_predict(train: Dataset, queries, k: int) -> np.ndarray:
    """
    Mean response of the k nearest training points (Euclidean).

    Distance ties go to the lower training index.

    Raises:
        InvalidInputError: if k is outside 1..n_train
    """
    if not 1 <= k <= train.n:
        raise InvalidInputError(f"k must be in 1..{train.n}, got {k}")
    queries = as_matrix(queries, "queries")
    if queries.shape[1] != train.p:
        raise InvalidInputError(f"Queries have {queries.shape[1]} columns, training data {train.p}")

    dists = distance.cdist(queries, train.X, 'euclidean')
    neighbors = np.argsort(dists, axis=1, kind='stable')[:, :k]
    return train.y[neighbors].mean(axis=1)


@dataclass(frozen=True)
class LinearFit:
    """Least-squares coefficients with intercept."""
    coef: np.ndarray
    intercept: float
    ridge_used: bool = False

    def predict(self, X) -> np.ndarray:
        return as_matrix(X) @ self.coef + self.intercept


def fit_linear_regression(train: Dataset) -> LinearFit:
    """
    Ordinary least squares with intercept via the normal equations.

    A singular design falls back to a ridge of 1e-8 trace(S).
    """
    xbar = train.X.mean(axis=0)
    ybar = float(train.y.mean())
    centered = train.X - xbar
    gram = centered.T @ centered / train.n
    rhs = centered.T @ (train.y - ybar) / train.n

    ridge_used = False
    try:
        factor = linalg.cho_factor(gram)
        if np.min(np.abs(np.diag(factor[0]))) ** 2 < 1e-12 * max(np.trace(gram), 1e-300) / train.p:
            raise linalg.LinAlgError("near-singular pivot")
    except linalg.LinAlgError:
        ridge = 1e-8 * np.trace(gram)
        logger.warning(f"Singular regression design, falling back to ridge {ridge:.3e}")
        factor = linalg.cho_factor(gram + max(ridge, 1e-300) * np.eye(train.p))
        ridge_used = True

    coef = linalg.cho_solve(factor, rhs)
    return LinearFit(coef=coef, intercept=ybar - float(xbar @ coef), ridge_used=ridge_used)


@dataclass(frozen=True)
class BaselineResult:
    mse: float
    ridge_used: bool = False


def linear_regression_baseline(
    train: Dataset,
    test: Dataset,
    inverse_transform: Optional[Callable[[np.ndarray], np.ndarray]] = None
) -> BaselineResult:
    """
    Test mean squared error of least squares fitted on train.

    Args:
        train: training sample
        test: evaluation sample
        inverse_transform: maps responses back to the scale the error is
            measured on (applied to predictions and test responses alike)
    """
    model = fit_linear_regression(train)
    predicted, actual = model.predict(test.X), test.y
    if inverse_transform is not None:
        predicted, actual = inverse_transform(predicted), inverse_transform(actual)
    return BaselineResult(mse=float(np.mean((predicted - actual) ** 2)), ridge_used=model.ridge_used)


@dataclass(frozen=True)
class SplitSpec:
    """Value Object: random train/test partition sizes and seed."""
    train_size: int
    test_size: int
    seed: int = 0

    def __post_init__(self):
        if self.train_size < 1 or self.test_size < 1:
            raise InvalidInputError(
                f"Split sizes must be positive, got {self.train_size}/{self.test_size}"
            )

    @property
    def total(self) -> int:
        return self.train_size + self.test_size

    def indices(self, repetition: int) -> tuple[np.ndarray, np.ndarray]:
        """(train, test) row indices for one repetition, drawn from its own stream."""
        state = int(replication_rng(self.seed, repetition).integers(2 ** 32))
        train, test = train_test_split(
            np.arange(self.total), train_size=self.train_size, test_size=self.test_size, random_state=state
        )
        return np.sort(train), np.sort(test)


def transform_housing(raw: Dataset) -> Dataset:
    """
    Apply the distribution-shape transforms.

    log: crim, nox, dis and the response; log(1 + zn) since zn has zeros;
    square: ptratio. Other predictors are unchanged.

    Raises:
        IngestionError: naming the first missing column
    """
    names = set(raw.column_names) | {raw.response}
    for column in HOUSING_COLUMNS:
        if column not in names:
            raise IngestionError(f"Housing data is missing column '{column}'")
    if raw.response != HOUSING_RESPONSE:
        raise IngestionError(f"Housing response must be '{HOUSING_RESPONSE}', got '{raw.response}'")

    predictors = [c for c in HOUSING_COLUMNS if c != HOUSING_RESPONSE]
    transforms = {
        'crim': np.log,
        'zn': np.log1p,
        'nox': np.log,
        'dis': np.log,
        'ptratio': np.square,
    }
    X = np.column_stack([transforms.get(c, lambda v: v)(raw.column(c)) for c in predictors])
    return Dataset(X, np.log(raw.y), tuple(predictors), HOUSING_RESPONSE)


def standardize(train_X: np.ndarray, other_X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale both matrices with the training mean and standard deviation."""
    scaler = StandardScaler().fit(train_X)
    return scaler.transform(train_X), scaler.transform(other_X)


@dataclass(frozen=True)
class MethodScore:
    """Test MSE over repetitions plus full-sample direction correlations."""
    label: str
    mse_mean: float
    mse_sd: float
    mse_se: float
    correlations: Optional[DirectionCorrelations] = None
    mse_values: tuple[float, ...] = field(default=(), repr=False)

    @classmethod
    def from_errors(cls, label: str, errors, correlations=None) -> 'MethodScore':
        errors = np.asarray(errors, dtype=float)
        sd = float(np.std(errors, ddof=1)) if errors.size > 1 else 0.0
        return cls(
            label=label,
            mse_mean=float(errors.mean()),
            mse_sd=sd,
            mse_se=sd / np.sqrt(errors.size),
            correlations=correlations,
            mse_values=tuple(float(e) for e in errors),
        )

    def to_dict(self) -> dict:
        return {
            'label': self.label,
            'mse_mean': self.mse_mean,
            'mse_sd': self.mse_sd,
            'mse_se': self.mse_se,
            'correlations': self.correlations.to_dict() if self.correlations else None,
        }


@dataclass(frozen=True)
class PairedComparison:
    """SIR against one overlapping estimator on matched splits."""
    baseline: str
    challenger: str
    mean_difference: float  # mean of MSE_baseline - MSE_challenger
    p_value: float  # one-sided sign test for baseline MSE exceeding challenger MSE

    @classmethod
    def from_scores(cls, baseline: MethodScore, challenger: MethodScore) -> 'PairedComparison':
        diff = np.asarray(baseline.mse_values) - np.asarray(challenger.mse_values)
        return cls(
            baseline=baseline.label,
            challenger=challenger.label,
            mean_difference=float(diff.mean()),
            p_value=paired_sign_test(baseline.mse_values, challenger.mse_values),
        )

    def significant(self, alpha: float = 0.05) -> bool:
        return self.mean_difference > 0 and self.p_value < alpha

    def to_dict(self) -> dict:
        return {
            'baseline': self.baseline,
            'challenger': self.challenger,
            'mean_difference': self.mean_difference,
            'p_value': self.p_value,
        }


@dataclass(frozen=True)
class HousingReport:
    """
    Value Object: per-method test errors and direction correlations with
    the linear-regression and raw-kNN baselines.
    """
    methods: tuple[MethodScore, ...]
    baselines: tuple[MethodScore, ...]
    repetitions: int
    knn_k: int
    slices: int
    dimension: int
    split: SplitSpec
    standardized: bool = True
    ridge_fallback: bool = False
    comparisons: tuple[PairedComparison, ...] = ()

    def find(self, label: str) -> MethodScore:
        for score in self.methods + self.baselines:
            if score.label == label:
                return score
        raise KeyError(f"No score for {label}")

    def comparison(self, challenger: str) -> PairedComparison:
        for item in self.comparisons:
            if item.challenger == challenger:
                return item
        raise KeyError(f"No paired comparison for {challenger}")

    def to_dict(self) -> dict:
        return {
            'repetitions': self.repetitions,
            'knn_k': self.knn_k,
            'slices': self.slices,
            'dimension': self.dimension,
            'train_size': self.split.train_size,
            'test_size': self.split.test_size,
            'seed': self.split.seed,
            'standardized': self.standardized,
            'mlr_ridge_fallback': self.ridge_fallback,
            'methods': [m.to_dict() for m in self.methods],
            'baselines': [b.to_dict() for b in self.baselines],
            'paired_sign_tests': [c.to_dict() for c in self.comparisons],
        }


def _housing_repetition(task: tuple) -> tuple[list[float], float, float, bool]:
    """Test errors of every method and both baselines on one split."""
    data, split, repetition, configs, k, dimension, ridge = task
    train_rows, test_rows = split.indices(repetition)
    train, test = data.subset(train_rows), data.subset(test_rows)
    medv_test = np.exp(test.y)

    def error(log_predictions: np.ndarray) -> float:
        return float(np.mean((np.exp(log_predictions) - medv_test) ** 2))

    train_X, test_X = standardize(train.X, test.X)
    scaled_train = Dataset(train_X, train.y, train.columns, train.response)

    method_errors = []
    for config in configs:
        estimate = fit_edr(scaled_train, config, dimension=dimension, ridge=ridge)
        reduced = Dataset(estimate.project(train_X), train.y)
        method_errors.append(error(knn_predict(reduced, estimate.project(test_X), k)))

    mlr = linear_regression_baseline(train, test, inverse_transform=np.exp)
    raw_knn = error(knn_predict(train, test.X, k))
    return method_errors, mlr.mse, raw_knn, mlr.ridge_used


def paired_comparisons(methods: Sequence[MethodScore]) -> tuple[PairedComparison, ...]:
    """SIR against every other method on the same splits; empty without SIR."""
    sir = next((m for m in methods if m.label == "SIR"), None)
    if sir is None:
        return ()
    return tuple(PairedComparison.from_scores(sir, m) for m in methods if m is not sir)


def default_housing_configs(slices: int = 20) -> list[EstimatorConfig]:
    return [EstimatorConfig.sir(slices)] + [
        EstimatorConfig.osir(slices, level) for level in HOUSING_LEVELS if level < slices
    ]


def housing_pipeline(
    raw: Dataset,
    repetitions: int = 100,
    k: int = 5,
    configs: Optional[Sequence[EstimatorConfig]] = None,
    dimension: int = 4,
    train_size: int = 200,
    seed: int = 0,
    workers: Optional[int] = 1,
    ridge: float = 0.0
) -> HousingReport:
    """
    Repeated split evaluation of dimension reduction followed by kNN.

    Each repetition draws a random train/test split, standardizes the
    predictors with training statistics, fits every method on the training
    part, projects both parts onto the fitted directions and scores kNN on
    the test part. Errors are measured on the original response scale.
    Direction correlations come from a fit on the full sample.

    Args:
        raw: untransformed housing data with the 14 canonical columns
        repetitions: number of random splits
        k: neighbors for kNN
        configs: estimators to compare (default SIR and OSIR sweep, H=20)
        dimension: number of retained directions
        train_size: training observations per split
        seed: split seed
        workers: process count for the repetition loop
        ridge: covariance regularization

    Returns:
        HousingReport
    """
    data = transform_housing(raw)
    configs = tuple(configs or default_housing_configs())
    if repetitions < 1:
        raise InvalidInputError(f"Repetitions must be positive, got {repetitions}")
    if not 1 <= train_size < data.n:
        raise InvalidInputError(f"Training size must be in 1..{data.n - 1}, got {train_size}")
    split = SplitSpec(train_size, data.n - train_size, seed)

    logger.info("=" * 60)
    logger.info(f"Housing pipeline: {data}, {len(configs)} methods, {repetitions} splits, k={k}")
    logger.info("=" * 60)

    tasks = [(data, split, rep, configs, k, dimension, ridge) for rep in range(repetitions)]
    outcomes = WorkerPool(workers).map(_housing_repetition, tasks)

    full_X, _ = standardize(data.X, data.X)
    full = Dataset(full_X, data.y, data.columns, data.response)

    methods = []
    for j, config in enumerate(configs):
        estimate = fit_edr(full, config, dimension=dimension, ridge=ridge)
        correlations = direction_response_correlations(estimate, full.X, full.y)
        score = MethodScore.from_errors(config.label, [o[0][j] for o in outcomes], correlations)
        logger.info(
            f"  → {score.label:<8} MSE {score.mse_mean:.2f} ({score.mse_se:.2f}), "
            f"corr_1 {correlations.per_direction[0]:.4f}, weighted {correlations.weighted_average:.4f}"
        )
        methods.append(score)

    baselines = (
        MethodScore.from_errors("MLR", [o[1] for o in outcomes]),
        MethodScore.from_errors("kNN", [o[2] for o in outcomes]),
    )
    for baseline in baselines:
        logger.info(f"  → {baseline.label:<8} MSE {baseline.mse_mean:.2f} ({baseline.mse_se:.2f})")

    comparisons = paired_comparisons(methods)
    for item in comparisons:
        logger.info(
            f"  {item.baseline} - {item.challenger}: mean {item.mean_difference:+.3f}, "
            f"sign test p={item.p_value:.4g}"
        )

    return HousingReport(
        methods=tuple(methods),
        baselines=baselines,
        repetitions=repetitions,
        knn_k=k,
        slices=configs[0].slices or 0,
        dimension=dimension,
        split=split,
        standardized=True,
        ridge_fallback=any(o[3] for o in outcomes),
        comparisons=comparisons,
    )
