#!/usr/bin/env python3
"""
OSIR toolkit command line.

Sub-commands: fit, simulate, bench, housing, generate, config.
"""

import sys
import argparse
import logging
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from application.benchmark import SUITES, run_bench
from application.estimation import AUTO, fit_edr
from application.regression import HOUSING_RESPONSE, default_housing_configs, housing_pipeline
from application.simulation import run_monte_carlo
from domain.errors import SdrError, UsageError
from domain.estimate import CumulativeForm, EstimatorConfig, Method
from domain.models import PUBLISHED_SETTINGS, ModelSpec, generate_model
from infrastructure.config import OUTPUT_FORMATS, AppConfiguration, ConfigManager
from infrastructure.csv_loader import ingest_csv, write_dataset_csv
from infrastructure.report_writer import ReportEnvelope, write_report


logger = logging.getLogger(__name__)

COMMANDS = ('fit', 'simulate', 'bench', 'housing', 'generate')
HOUSING_SLICES = 20
HOUSING_DIMENSION = 4
HOUSING_REPS = 100
HOUSING_TRAIN_SIZE = 200


def setup_logging(verbose: bool = False):
    """Configure logging on stderr; stdout carries the report."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%H:%M:%S',
        stream=sys.stderr
    )


@dataclass
class RunConfig:
    """
    Fully resolved parameters of one invocation.

    Every report embeds this, so a run can be repeated exactly.
    """
    command: str
    methods: list[str] = field(default_factory=lambda: ['osir'])
    slices: Optional[int] = 10
    level: Optional[int] = None
    cume_form: str = 'sum'
    dimension: str = AUTO
    ridge: float = 0.0
    seed: int = 0
    reps: int = 1000
    models: list[int] = field(default_factory=lambda: [1, 2, 3, 4])
    n: Optional[int] = None
    p: Optional[int] = None
    suite: str = 'table1'
    full: bool = False
    input: Optional[str] = None
    response: str = 'y'
    output: Optional[str] = None
    output_format: str = 'json'
    workers: int = 0  # 0 uses all CPUs
    knn_k: int = 5
    train_size: int = HOUSING_TRAIN_SIZE
    replication: int = 0

    def validate(self) -> None:
        """Check parameter combinations before any computation."""
        if self.command not in COMMANDS:
            raise UsageError(f"Unknown command '{self.command}'")
        if self.output_format not in OUTPUT_FORMATS:
            raise UsageError(f"--format must be one of {', '.join(OUTPUT_FORMATS)}")
        if self.seed < 0:
            raise UsageError(f"--seed must be an unsigned integer, got {self.seed}")
        if self.ridge < 0:
            raise UsageError(f"--ridge must be nonnegative, got {self.ridge}")
        if self.workers < 0:
            raise UsageError(f"--workers must be nonnegative, got {self.workers}")
        if self.reps < 1:
            raise UsageError(f"--reps must be positive, got {self.reps}")
        if self.knn_k < 1:
            raise UsageError(f"--knn-k must be positive, got {self.knn_k}")
        for model_id in self.models:
            if model_id not in PUBLISHED_SETTINGS:
                raise UsageError(f"--model must be one of {sorted(PUBLISHED_SETTINGS)}, got {model_id}")
        if self.dimension != AUTO:
            try:
                if int(self.dimension) < 1:
                    raise ValueError
            except ValueError:
                raise UsageError(f"--dim must be 'auto' or a positive integer, got '{self.dimension}'") from None
        if self.command in ('fit', 'housing') and not self.input:
            raise UsageError(f"{self.command} requires --input")
        if self.command == 'housing' and self.dimension == AUTO:
            raise UsageError("housing needs a fixed --dim")
        if self.command == 'bench' and self.suite not in SUITES:
            raise UsageError(f"--suite must be one of {', '.join(SUITES)}")
        if self.command in ('fit', 'simulate', 'housing'):
            self.estimator_configs()

    def estimator_configs(self) -> list[EstimatorConfig]:
        """Estimator configurations for the requested methods."""
        configs = []
        for name in self.methods:
            try:
                method = Method.parse(name)
            except SdrError as e:
                raise UsageError(str(e)) from None
            if method is Method.CUME:
                try:
                    form = CumulativeForm.parse(self.cume_form)
                except SdrError as e:
                    raise UsageError(str(e)) from None
                configs.append(EstimatorConfig.cume(form))
                continue
            if self.slices is None or self.slices < 1:
                raise UsageError(f"--slices must be positive, got {self.slices}")
            if method is Method.SIR:
                if self.level not in (None, 0) and len(self.methods) == 1:
                    raise UsageError("--level applies to osir only")
                configs.append(EstimatorConfig.sir(self.slices))
                continue
            if self.level is not None and not 0 <= self.level < self.slices:
                raise UsageError(f"--level must satisfy 0 <= L < H = {self.slices}, got {self.level}")
            configs.append(EstimatorConfig.osir(self.slices, self.level))
        return configs

    def to_dict(self) -> dict:
        resolved = asdict(self)
        if self.command in ('fit', 'simulate', 'housing'):
            resolved['estimators'] = [c.to_dict() for c in self.estimator_configs()]
        return resolved


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help='Path to config file (default: ~/.config/osir-toolkit/config.yaml)')
    common.add_argument('--format', dest='output_format', choices=OUTPUT_FORMATS, help='Report format')
    common.add_argument('--output', help='Output path (default: stdout)')
    common.add_argument('--workers', type=int, help='Worker processes (0 uses all CPUs)')
    common.add_argument('--seed', type=int, help='Base random seed')
    common.add_argument('--ridge', type=float, help='Covariance ridge (>= 0)')
    common.add_argument('--verbose', '-v', action='store_true', help='Verbose output')

    estimator = argparse.ArgumentParser(add_help=False)
    estimator.add_argument('--method', action='append', dest='methods', help='sir, osir or cume (repeatable)')
    estimator.add_argument('--slices', '-H', type=int, help='Number of slices H')
    estimator.add_argument('--level', '-L', type=int, help='Overlap level L (default floor(H/2))')
    estimator.add_argument(
        '--cume-form', choices=tuple(f.value for f in CumulativeForm),
        help='CUME kernel: cumulative sums over n (default) or per-set cumulative means',
    )

    parser = argparse.ArgumentParser(
        prog='osir-toolkit',
        description='Sliced inverse regression with overlapping slices: fitting, simulation and benchmarks',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Fit OSIR with BIC-selected dimension
  %(prog)s fit --input data.csv --response y --method osir --slices 10 --level 5 --dim auto

  # Monte Carlo on model 1
  %(prog)s simulate --model 1 --method sir --slices 10 --reps 1000 --seed 7

  # Accuracy benchmark at reduced replications
  %(prog)s bench --suite table1 --reps 200 --seed 1

  # Save defaults to the config file
  %(prog)s config --slices 12 --workers 4
        """
    )
    sub = parser.add_subparsers(dest='command', required=True)

    fit = sub.add_parser('fit', parents=[common, estimator], help='Fit an EDR subspace to a CSV dataset')
    fit.add_argument('--input', required=True, help='CSV file with a header row')
    fit.add_argument('--response', default='y', help='Response column (default: %(default)s)')
    fit.add_argument('--dim', default=AUTO, help="Number of directions or 'auto' (default: %(default)s)")

    simulate = sub.add_parser('simulate', parents=[common, estimator], help='Monte Carlo on the benchmark models')
    simulate.add_argument('--model', type=int, action='append', dest='models', help='Model id 1-4 (repeatable)')
    simulate.add_argument('--reps', type=int, help='Replications')
    simulate.add_argument('--n', type=int, help='Sample size override')
    simulate.add_argument('--p', type=int, help='Dimension override')

    bench = sub.add_parser('bench', parents=[common], help='Compare against published results')
    bench.add_argument('--suite', choices=SUITES, default='table1', help='Benchmark suite (default: %(default)s)')
    bench.add_argument('--reps', type=int, help='Replications (default: 200)')
    bench.add_argument('--full', action='store_true', help='Use 1000 replications')

    housing = sub.add_parser('housing', parents=[common, estimator], help='Housing regression pipeline')
    housing.add_argument('--input', required=True, help='Housing CSV with the 14 canonical columns')
    housing.add_argument('--reps', type=int, help=f'Random splits (default: {HOUSING_REPS})')
    housing.add_argument('--knn-k', type=int, help='Neighbors for kNN')
    housing.add_argument('--dim', default=str(HOUSING_DIMENSION), help='Number of directions (default: %(default)s)')
    housing.add_argument('--train-size', type=int, default=HOUSING_TRAIN_SIZE, help='Training rows per split (default: %(default)s)')

    generate = sub.add_parser('generate', parents=[common], help='Write a benchmark model dataset as CSV')
    generate.add_argument('--model', type=int, default=1, dest='model', help='Model id 1-4 (default: %(default)s)')
    generate.add_argument('--n', type=int, help='Sample size override')
    generate.add_argument('--p', type=int, help='Dimension override')
    generate.add_argument('--replication', type=int, default=0, help='Random stream index (default: %(default)s)')

    settings = sub.add_parser('config', help='Save default settings to the config file')
    settings.add_argument('--config', type=Path, help='Path to config file (default: ~/.config/osir-toolkit/config.yaml)')
    settings.add_argument('--slices', '-H', type=int, help='Default number of slices')
    settings.add_argument('--level', '-L', type=int, help='Default overlap level')
    settings.add_argument('--ridge', type=float, help='Default covariance ridge')
    settings.add_argument('--reps', type=int, help='Default simulation replications')
    settings.add_argument('--bench-reps', type=int, help='Default bench replications')
    settings.add_argument('--seed', type=int, help='Default base seed')
    settings.add_argument('--workers', type=int, help='Default worker processes (0 uses all CPUs)')
    settings.add_argument('--knn-k', type=int, help='Default kNN neighbors')
    settings.add_argument('--format', dest='output_format', choices=OUTPUT_FORMATS, help='Default report format')
    settings.add_argument('--verbose', '-v', action='store_true', help='Verbose output')

    return parser


def _pick(value, default):
    return default if value is None else value


def resolve_config(args: argparse.Namespace, defaults: AppConfiguration) -> RunConfig:
    """Merge command-line flags over config-file values."""
    command = args.command
    config = RunConfig(
        command=command,
        ridge=_pick(args.ridge, defaults.ridge),
        seed=_pick(args.seed, defaults.seed),
        output=args.output,
        output_format=_pick(args.output_format, defaults.output_format),
        workers=_pick(args.workers, defaults.workers),
        knn_k=_pick(getattr(args, 'knn_k', None), defaults.knn_k),
    )

    if command in ('fit', 'simulate', 'housing'):
        config.methods = args.methods or (['sir', 'osir'] if command == 'housing' else ['osir'])
        default_slices = HOUSING_SLICES if command == 'housing' else defaults.slices
        config.slices = _pick(args.slices, default_slices)
        config.level = _pick(args.level, defaults.level if args.slices is None and command != 'housing' else None)
        config.cume_form = args.cume_form or CumulativeForm.SUM.value
    if command in ('fit', 'housing'):
        config.input = args.input
        config.dimension = str(args.dim).strip().lower()
    if command == 'fit':
        config.response = args.response
    if command == 'simulate':
        config.models = args.models or [1, 2, 3, 4]
        config.reps = _pick(args.reps, defaults.reps)
        config.n, config.p = args.n, args.p
    if command == 'bench':
        config.suite = args.suite
        config.full = args.full
        config.reps = _pick(args.reps, 1000 if args.full else defaults.bench_reps)
    if command == 'housing':
        config.response = HOUSING_RESPONSE
        config.reps = _pick(args.reps, HOUSING_REPS)
        config.train_size = args.train_size
    if command == 'generate':
        config.models = [args.model]
        config.n, config.p = args.n, args.p
        config.replication = args.replication

    config.validate()
    return config


def _housing_configs(config: RunConfig) -> Optional[list[EstimatorConfig]]:
    """Default sweep unless a single explicit level was asked for."""
    if config.level is None and sorted(config.methods) == ['osir', 'sir']:
        return default_housing_configs(config.slices)
    return config.estimator_configs()


def run(config: RunConfig) -> tuple[ReportEnvelope, bool]:
    """
    Execute a validated configuration.

    Returns:
        The report envelope and whether the run succeeded (bench bands passed)
    """
    started_at = datetime.now(timezone.utc).isoformat()
    clock = time.perf_counter()
    ok = True
    rows = []

    if config.command == 'fit':
        data = ingest_csv(config.input, config.response)
        if config.dimension != AUTO and int(config.dimension) > data.p:
            raise UsageError(f"--dim {config.dimension} exceeds p = {data.p}")
        estimator = config.estimator_configs()[0]
        estimate = fit_edr(data, estimator, dimension=config.dimension, ridge=config.ridge)
        payload = {'columns': list(data.column_names), 'response': data.response, **estimate.to_dict()}
        rows = [
            {'direction': k + 1, 'eigenvalue': float(estimate.eigenvalues[k]),
             **{name: float(estimate.basis[j, k]) for j, name in enumerate(data.column_names)}}
            for k in range(estimate.dimension)
        ]
    elif config.command == 'simulate':
        report = run_monte_carlo(
            config.models, config.estimator_configs(), config.reps,
            seed=config.seed, workers=config.workers, n=config.n, p=config.p, ridge=config.ridge,
        )
        payload, rows = report.to_dict(), report.csv_rows()
    elif config.command == 'bench':
        report = run_bench(config.suite, config.reps, config.seed, config.workers, config.full)
        payload, rows, ok = report.to_dict(), report.csv_rows(), report.passed
    elif config.command == 'housing':
        raw = ingest_csv(config.input, HOUSING_RESPONSE)
        report = housing_pipeline(
            raw,
            repetitions=config.reps,
            k=config.knn_k,
            configs=_housing_configs(config),
            dimension=int(config.dimension),
            train_size=config.train_size,
            seed=config.seed,
            workers=config.workers,
            ridge=config.ridge,
        )
        payload = report.to_dict()
        rows = [
            {'label': m['label'], 'mse_mean': m['mse_mean'], 'mse_se': m['mse_se'],
             'weighted_correlation': m['correlations']['weighted_average'] if m['correlations'] else None}
            for m in payload['methods'] + payload['baselines']
        ]
    else:
        spec = ModelSpec.published(config.models[0], config.seed, config.replication, config.n, config.p)
        data, truth = generate_model(spec)
        write_dataset_csv(data, config.output or sys.stdout)
        payload = {'model': spec.model_id, 'n': spec.n, 'p': spec.p, 'true_basis': truth.columns.tolist()}

    envelope = ReportEnvelope(
        command=config.command,
        config=config.to_dict(),
        payload=payload,
        started_at=started_at,
        elapsed_seconds=time.perf_counter() - clock,
        rows=rows,
    )
    return envelope, ok


SETTING_FLAGS = ('slices', 'level', 'ridge', 'reps', 'bench_reps', 'seed', 'workers', 'knn_k', 'output_format')


def save_settings(args: argparse.Namespace) -> AppConfiguration:
    """Merge the given flags into the config file and write it back."""
    manager = ConfigManager(args.config)
    settings = manager.load()
    for name in SETTING_FLAGS:
        value = getattr(args, name)
        if value is not None:
            setattr(settings, name, value)
    settings.validate()
    manager.save(settings)
    logger.info(f"✓ Saved configuration to {manager.config_path}")
    return settings


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code is None else int(e.code)

    setup_logging(args.verbose)

    try:
        if args.command == 'config':
            save_settings(args)
            return 0
        defaults = ConfigManager(args.config).load()
        config = resolve_config(args, defaults)
        envelope, ok = run(config)
        if config.command != 'generate':
            write_report(envelope, config.output_format, config.output)
    except UsageError as e:
        print(f"✗ Usage error: {e}", file=sys.stderr)
        return 2
    except SdrError as e:
        print(f"✗ Error: {e}", file=sys.stderr)
        return 1

    if not ok:
        print("✗ Benchmark bands failed", file=sys.stderr)
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
