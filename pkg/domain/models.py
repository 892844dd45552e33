"""
Benchmark regression models with known EDR spaces.

    1: y = x1 + x2 + x3 + x4 + 0 x5 + e            K=1, beta=(.5,.5,.5,.5,0)
    2: y = exp(x1 + 2 e)                           K=1, beta=e1
    3: y = x1 (x1 + x2 + 1) + e                    K=2, beta=(e1, e2)
    4: y = x1 / (0.5 + (x2 + 1.5)^2) + e           K=2, beta=(e1, e2)

x ~ N(0, I_p) and e ~ N(0, 1) independent.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from domain.dataset import Dataset
from domain.errors import InvalidInputError
from domain.metrics import SubspaceBasis


# model id -> (n, p, K) of the published experiment
PUBLISHED_SETTINGS = {
    1: (100, 5, 1),
    2: (100, 5, 1),
    3: (400, 10, 2),
    4: (400, 10, 2),
}

# smallest p each model equation needs
_MIN_P = {1: 4, 2: 1, 3: 2, 4: 2}


def replication_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent PCG64 stream addressed by (seed, keys...)."""
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(sequence))


@dataclass(frozen=True)
class ModelSpec:
    """
    Value Object: one draw request from a benchmark model.

    `replication` selects the random stream, so replications can be
    generated in any order.
    """
    model_id: int
    n: int
    p: int
    seed: int = 0
    replication: int = 0

    def __post_init__(self):
        if self.model_id not in PUBLISHED_SETTINGS:
            raise InvalidInputError(
                f"Model id must be one of {sorted(PUBLISHED_SETTINGS)}, got {self.model_id}"
            )
        if self.n < 2:
            raise InvalidInputError(f"Sample size must be at least 2, got {self.n}")
        if self.p < _MIN_P[self.model_id]:
            raise InvalidInputError(
                f"Model {self.model_id} needs p >= {_MIN_P[self.model_id]}, got {self.p}"
            )
        if self.seed < 0:
            raise InvalidInputError(f"Seed must be nonnegative, got {self.seed}")

    @classmethod
    def published(
        cls,
        model_id: int,
        seed: int = 0,
        replication: int = 0,
        n: Optional[int] = None,
        p: Optional[int] = None
    ) -> 'ModelSpec':
        """Spec with the published n and p unless overridden."""
        if model_id not in PUBLISHED_SETTINGS:
            raise InvalidInputError(
                f"Model id must be one of {sorted(PUBLISHED_SETTINGS)}, got {model_id}"
            )
        default_n, default_p, _ = PUBLISHED_SETTINGS[model_id]
        return cls(model_id, n or default_n, p or default_p, seed, replication)

    @property
    def true_dimension(self) -> int:
        return PUBLISHED_SETTINGS[self.model_id][2]

    def true_basis(self) -> SubspaceBasis:
        if self.model_id == 1:
            beta = np.zeros(self.p)
            beta[:4] = 0.5
            return SubspaceBasis(beta[:, None])
        if self.model_id == 2:
            return SubspaceBasis.coordinate(self.p, (0,))
        return SubspaceBasis.coordinate(self.p, (0, 1))

    def rng(self) -> np.random.Generator:
        return replication_rng(self.seed, self.model_id, self.replication)


def response(model_id: int, X: np.ndarray, noise: np.ndarray) -> np.ndarray:
    """Evaluate a model equation on predictors X and noise e."""
    x1 = X[:, 0]
    if model_id == 1:
        return X[:, :4].sum(axis=1) + noise
    if model_id == 2:
        return np.exp(x1 + 2.0 * noise)
    x2 = X[:, 1]
    if model_id == 3:
        return x1 * (x1 + x2 + 1.0) + noise
    if model_id == 4:
        return x1 / (0.5 + (x2 + 1.5) ** 2) + noise
    raise InvalidInputError(f"Unknown model id {model_id}")


def generate_model(spec: ModelSpec, noise_scale: float = 1.0) -> tuple[Dataset, SubspaceBasis]:
    """
    Draw a dataset from the model and return it with the true basis.

    Args:
        spec: model id, size and random stream
        noise_scale: multiplier on e (0 gives the noise-free response)
    """
    rng = spec.rng()
    X = rng.standard_normal((spec.n, spec.p))
    noise = noise_scale * rng.standard_normal(spec.n)
    return Dataset(X, response(spec.model_id, X, noise)), spec.true_basis()
