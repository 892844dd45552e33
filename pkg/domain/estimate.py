"""
Domain models for estimator configurations and fitted EDR estimates.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from domain.errors import InvalidInputError


class Method(Enum):
    """Value Object: kernel-matrix families"""
    SIR = "sir"
    OSIR = "osir"
    CUME = "cume"

    @classmethod
    def parse(cls, name: str) -> 'Method':
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise InvalidInputError(f"Unknown method '{name}' (expected one of: {valid})") from None


class CumulativeForm(Enum):
    """Value Object: CUME kernel variants"""
    SUM = "sum"    # cumulative sums over n
    MEAN = "mean"  # cumulative means, each set normalized by its size

    @classmethod
    def parse(cls, name: str) -> 'CumulativeForm':
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(f.value for f in cls)
            raise InvalidInputError(f"Unknown CUME form '{name}' (expected one of: {valid})") from None


def default_level(n_slices: int) -> int:
    """Balanced overlap level floor(H/2)."""
    return n_slices // 2


@dataclass(frozen=True)
class EstimatorConfig:
    """
    Value Object: one (method, H, L) configuration.

    SIR is stored with level 0; CUME carries neither slices nor level,
    only its kernel form (cumulative sums unless stated otherwise).
    """
    method: Method
    slices: Optional[int] = None
    level: Optional[int] = None
    form: Optional[CumulativeForm] = None

    def __post_init__(self):
        if self.method is Method.CUME:
            if self.slices is not None or self.level is not None:
                raise InvalidInputError("CUME takes no slice count or overlap level")
            return
        if self.form is not None:
            raise InvalidInputError(f"Kernel form applies to CUME only, not {self.method.name}")

        if self.slices is None or self.slices < 1:
            raise InvalidInputError(f"Slice count must be a positive integer, got {self.slices}")
        if self.method is Method.SIR and self.level not in (None, 0):
            raise InvalidInputError(f"SIR has overlap level 0, got {self.level}")
        if self.level is not None and not 0 <= self.level <= max(self.slices - 1, 0):
            raise InvalidInputError(
                f"Overlap level must satisfy 0 <= L <= H-1 = {self.slices - 1}, got {self.level}"
            )

    @classmethod
    def sir(cls, slices: int) -> 'EstimatorConfig':
        return cls(Method.SIR, slices, 0)

    @classmethod
    def osir(cls, slices: int, level: Optional[int] = None) -> 'EstimatorConfig':
        return cls(Method.OSIR, slices, default_level(slices) if level is None else level)

    @classmethod
    def cume(cls, form: CumulativeForm = CumulativeForm.SUM) -> 'EstimatorConfig':
        return cls(Method.CUME, form=form)

    @property
    def resolved_form(self) -> Optional[CumulativeForm]:
        if self.method is not Method.CUME:
            return None
        return self.form or CumulativeForm.SUM

    @property
    def resolved_level(self) -> int:
        """Overlap level used for the kernel and the BIC penalty."""
        if self.method is Method.CUME:
            return 0
        if self.level is None:
            return 0 if self.method is Method.SIR else default_level(self.slices)
        return self.level

    @property
    def label(self) -> str:
        """Display name, e.g. SIR, OSIR_5, CUME, CUME_mean."""
        if self.method is Method.OSIR:
            return f"OSIR_{self.resolved_level}"
        if self.resolved_form is CumulativeForm.MEAN:
            return "CUME_mean"
        return self.method.name

    def to_dict(self) -> dict:
        form = self.resolved_form
        return {
            'method': self.method.value,
            'slices': self.slices,
            'level': None if self.method is Method.CUME else self.resolved_level,
            'form': form.value if form else None,
            'label': self.label,
        }


@dataclass(frozen=True)
class BicCurve:
    """
    Value Object: modified BIC values G(k), k = 1..p.

    `argmax` is the selected dimension (1-based, smallest k on ties).
    """
    values: np.ndarray
    argmax: int
    cn: float

    def __post_init__(self):
        if not 1 <= self.argmax <= self.values.size:
            raise InvalidInputError(
                f"Selected dimension {self.argmax} outside 1..{self.values.size}"
            )

    def to_dict(self) -> dict:
        return {'values': self.values.tolist(), 'argmax': self.argmax, 'cn': self.cn}


@dataclass(frozen=True)
class EdrEstimate:
    """
    Value Object: fitted effective dimension reduction subspace.

    `basis` holds the leading `dimension` eigenvectors of the pencil
    (Sigma-orthonormal columns); `eigenvalues` holds the full spectrum.
    """
    eigenvalues: np.ndarray
    basis: np.ndarray
    dimension: int
    config: EstimatorConfig
    ridge: float = 0.0
    bic_curve: Optional[BicCurve] = None
    n: int = 0

    def __post_init__(self):
        if self.dimension < 1:
            raise InvalidInputError(f"Dimension must be at least 1, got {self.dimension}")
        if self.basis.shape[1] != self.dimension:
            raise InvalidInputError(
                f"Basis has {self.basis.shape[1]} columns for dimension {self.dimension}"
            )

    @property
    def p(self) -> int:
        return self.basis.shape[0]

    @property
    def retained_eigenvalues(self) -> np.ndarray:
        return self.eigenvalues[:self.dimension]

    def project(self, X) -> np.ndarray:
        """Reduced predictors X B."""
        return np.asarray(X, dtype=float) @ self.basis

    def to_dict(self) -> dict:
        return {
            'method': self.config.to_dict(),
            'n': self.n,
            'p': self.p,
            'dimension': self.dimension,
            'ridge': self.ridge,
            'eigenvalues': self.eigenvalues.tolist(),
            'basis': self.basis.tolist(),
            'bic_curve': self.bic_curve.to_dict() if self.bic_curve else None,
        }
