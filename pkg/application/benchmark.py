"""
Application layer: benchmark suites comparing Monte Carlo runs against
published accuracy and dimension-selection results.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

from application.simulation import SimulationReport, run_monte_carlo
from domain.errors import InvalidInputError
from domain.estimate import EstimatorConfig, Method
from domain.metrics import paired_sign_test
from domain.reference_values import (
    accuracy_divergence, dimension_divergence, dimension_reference, trace_correlation_reference
)


logger = logging.getLogger(__name__)

SUITES = ('table1', 'table2', 'table3', 'all')
FULL_REPS = 1000
DEFAULT_REPS = 200
SIGNIFICANCE = 0.05

# Half-widths of the acceptance bands at FULL_REPS replications
ACCURACY_BAND = {1: 0.01, 2: 0.02, 3: 0.02, 4: 0.02}
SIR_FREQUENCY_BAND = 0.06
FREQUENCY_BAND = 0.03

FREQUENCY_NAMES = ('freq_under', 'freq_exact', 'freq_over')


def accuracy_configs() -> list[EstimatorConfig]:
    """Accuracy sweep: SIR and every OSIR level at H=5 and H=10, then CUME."""
    configs = []
    for slices in (5, 10):
        configs.append(EstimatorConfig.sir(slices))
        configs.extend(EstimatorConfig.osir(slices, level) for level in range(1, slices))
    configs.append(EstimatorConfig.cume())
    return configs


def dimension_configs() -> list[EstimatorConfig]:
    """Dimension-selection sweep at H=10."""
    return (
        [EstimatorConfig.sir(10)]
        + [EstimatorConfig.osir(10, level) for level in range(1, 10)]
        + [EstimatorConfig.cume()]
    )


def band_scale(reps: int) -> float:
    """Widening factor for bands checked with fewer than FULL_REPS replications."""
    return math.sqrt(FULL_REPS / reps) if reps < FULL_REPS else 1.0


@dataclass(frozen=True)
class BenchCheck:
    """One observed quantity held against its published value."""
    model_id: int
    label: str
    slices: Optional[int]
    quantity: str
    observed: float
    expected: float
    tolerance: float
    divergence: Optional[str] = None

    @property
    def passed(self) -> bool:
        if self.quantity == 'sign_test_p':
            return self.observed < self.expected
        return abs(self.observed - self.expected) <= self.tolerance

    @property
    def gating(self) -> bool:
        """Whether this check decides the suite outcome."""
        return self.divergence is None

    def to_dict(self) -> dict:
        return {
            'model': self.model_id,
            'label': self.label,
            'H': self.slices,
            'quantity': self.quantity,
            'observed': self.observed,
            'expected': self.expected,
            'tolerance': self.tolerance,
            'passed': self.passed,
            'known_divergent': self.divergence is not None,
        }


@dataclass(frozen=True)
class BenchReport:
    suite: str
    reps: int
    seed: int
    checks: tuple[BenchCheck, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def failures(self) -> list[BenchCheck]:
        return [check for check in self.checks if check.gating and not check.passed]

    @property
    def divergences(self) -> list[BenchCheck]:
        return [check for check in self.checks if not check.gating]

    def to_dict(self) -> dict:
        return {
            'suite': self.suite,
            'reps': self.reps,
            'seed': self.seed,
            'passed': self.passed,
            'checks': [check.to_dict() for check in self.checks],
            'known_divergences': sorted({check.divergence for check in self.divergences}),
        }

    def csv_rows(self) -> list[dict]:
        return [check.to_dict() for check in self.checks]


def accuracy_checks(report: SimulationReport, models, scale: float) -> list[BenchCheck]:
    """Mean trace correlation of every accuracy configuration."""
    checks = []
    for model_id in models:
        for config in accuracy_configs():
            result = report.find(model_id, config.label, config.slices)
            expected, _ = trace_correlation_reference(config.slices, config.label, model_id)
            checks.append(BenchCheck(
                model_id, config.label, config.slices, 'mean_r',
                result.mean_r, expected, ACCURACY_BAND[model_id] * scale,
                accuracy_divergence(config.slices, config.label, model_id),
            ))
    return checks


def ordering_checks(report: SimulationReport, models) -> list[BenchCheck]:
    """OSIR_1 beats SIR at H=10 on matched replications (one-sided sign test)."""
    checks = []
    for model_id in models:
        if model_id == 1:
            continue
        osir = report.find(model_id, "OSIR_1", 10)
        sir = report.find(model_id, "SIR", 10)
        p_value = paired_sign_test(osir.trace_correlations, sir.trace_correlations)
        checks.append(BenchCheck(model_id, "OSIR_1>SIR", 10, 'sign_test_p', p_value, SIGNIFICANCE, 0.0))
    return checks


def dimension_checks(report: SimulationReport, models, scale: float) -> list[BenchCheck]:
    """Under/exact/over frequencies of the BIC-selected dimension."""
    checks = []
    for model_id in models:
        for config in dimension_configs():
            result = report.find(model_id, config.label, config.slices)
            base = SIR_FREQUENCY_BAND if config.method is Method.SIR else FREQUENCY_BAND
            reference = dimension_reference(config.label, model_id)
            divergence = dimension_divergence(config.label, model_id)
            for name, expected in zip(FREQUENCY_NAMES, reference):
                checks.append(BenchCheck(
                    model_id, config.label, config.slices, name,
                    getattr(result, name), expected, base * scale, divergence,
                ))
    return checks


def run_bench(
    suite: str = 'table1',
    reps: Optional[int] = None,
    seed: int = 0,
    workers: Optional[int] = 1,
    full: bool = False
) -> BenchReport:
    """
    Run a benchmark suite and compare against the published values.

    table1 checks mean trace correlations on models 1-4 plus the OSIR_1
    versus SIR ordering, table2 the dimension frequencies on models 1-2,
    table3 those on models 3-4; all runs everything from one simulation.
    Bands are widened by sqrt(1000 / reps) below 1000 replications.

    Args:
        suite: one of SUITES
        reps: replications (default 200, or 1000 with full)
        seed: base seed
        workers: process count
        full: use the full 1000 replications
    """
    if suite not in SUITES:
        raise InvalidInputError(f"Unknown suite '{suite}' (expected one of: {', '.join(SUITES)})")
    if reps is None:
        reps = FULL_REPS if full else DEFAULT_REPS
    scale = band_scale(reps)

    if suite == 'table2':
        models, configs = (1, 2), dimension_configs()
    elif suite == 'table3':
        models, configs = (3, 4), dimension_configs()
    else:
        models, configs = (1, 2, 3, 4), accuracy_configs()

    logger.info(f"Bench suite {suite}: {reps} reps, seed {seed}, band scale {scale:.2f}")
    report = run_monte_carlo(models, configs, reps, seed=seed, workers=workers)

    checks = []
    if suite in ('table1', 'all'):
        checks += accuracy_checks(report, models, scale)
        checks += ordering_checks(report, models)
    if suite in ('table2', 'all'):
        checks += dimension_checks(report, (1, 2), scale)
    if suite in ('table3', 'all'):
        checks += dimension_checks(report, (3, 4), scale)

    bench = BenchReport(suite=suite, reps=reps, seed=seed, checks=tuple(checks))
    failed = bench.failures
    gating = sum(1 for check in checks if check.gating)
    logger.info(f"Bench {suite}: {gating - len(failed)}/{gating} checks passed")
    for check in bench.divergences:
        logger.info(
            f"  - model {check.model_id} {check.label} H={check.slices} {check.quantity}: "
            f"{check.observed:.4f} vs {check.expected:.4f} (known divergence, not gating)"
        )
    for check in failed:
        logger.warning(
            f"  ✗ model {check.model_id} {check.label} H={check.slices} {check.quantity}: "
            f"{check.observed:.4f} vs {check.expected:.4f} ± {check.tolerance:.4f}"
        )
    return bench
