"""
Configuration management for the OSIR toolkit.
Infrastructure layer - handles config file I/O.
"""

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional
import yaml

from domain.errors import UsageError


OUTPUT_FORMATS = ('json', 'csv', 'table')


@dataclass
class AppConfiguration:
    """
    Toolkit defaults, overridable from the config file and then the command line.
    """
    # Estimation
    slices: int = 10
    level: Optional[int] = None  # None means floor(H/2)
    ridge: float = 0.0

    # Simulation
    reps: int = 1000
    bench_reps: int = 200
    seed: int = 0
    workers: int = 0  # 0 uses all CPUs

    # Regression
    knn_k: int = 5

    # Output
    output_format: str = 'json'

    def validate(self) -> None:
        """Raise UsageError on values no command can run with."""
        if self.slices < 1:
            raise UsageError(f"slices must be positive, got {self.slices}")
        if self.level is not None and not 0 <= self.level < self.slices:
            raise UsageError(f"level must satisfy 0 <= L < H = {self.slices}, got {self.level}")
        if self.ridge < 0:
            raise UsageError(f"ridge must be nonnegative, got {self.ridge}")
        if self.reps < 1 or self.bench_reps < 1:
            raise UsageError("replication counts must be positive")
        if self.seed < 0:
            raise UsageError(f"seed must be an unsigned integer, got {self.seed}")
        if self.workers < 0:
            raise UsageError(f"workers must be nonnegative, got {self.workers}")
        if self.knn_k < 1:
            raise UsageError(f"knn_k must be positive, got {self.knn_k}")
        if self.output_format not in OUTPUT_FORMATS:
            raise UsageError(
                f"output format must be one of {', '.join(OUTPUT_FORMATS)}, got '{self.output_format}'"
            )


# YAML section -> (file key, attribute)
SECTIONS = {
    'estimation': (('slices', 'slices'), ('level', 'level'), ('ridge', 'ridge')),
    'simulation': (
        ('reps', 'reps'), ('bench_reps', 'bench_reps'), ('seed', 'seed'), ('workers', 'workers'),
    ),
    'regression': (('knn_k', 'knn_k'),),
    'output': (('format', 'output_format'),),
}


class ConfigManager:
    """
    Manages toolkit configuration with XDG compliance.

    Configuration file location follows XDG Base Directory specification:
    - Default: ~/.config/osir-toolkit/config.yaml
    - Override with XDG_CONFIG_HOME environment variable
    """

    def __init__(self, config_path: Optional[Path] = None):
        """
        Initialize config manager.

        Args:
            config_path: Optional custom path. If None, uses XDG default.
        """
        if config_path:
            self.config_path = Path(config_path)
        else:
            self.config_path = self._get_default_config_path()

    def _get_default_config_path(self) -> Path:
        """Get XDG-compliant default config path."""
        xdg_config_home = os.environ.get('XDG_CONFIG_HOME')

        if xdg_config_home:
            base_dir = Path(xdg_config_home)
        else:
            base_dir = Path.home() / '.config'

        return base_dir / 'osir-toolkit' / 'config.yaml'

    def load(self) -> AppConfiguration:
        """
        Load configuration from file.

        Returns default configuration if file doesn't exist.
        """
        if not self.config_path.exists():
            return AppConfiguration()

        with open(self.config_path, 'r') as f:
            try:
                data = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise UsageError(f"Malformed config file {self.config_path}: {e}") from e

        if not isinstance(data, dict):
            raise UsageError(f"Config file {self.config_path} must hold a mapping")
        return self._parse_config(data)

    def _parse_config(self, data: dict) -> AppConfiguration:
        """Parse YAML data into AppConfiguration."""
        config = AppConfiguration()
        types = {f.name: f.type for f in fields(AppConfiguration)}

        for section, keys in SECTIONS.items():
            values = data.get(section) or {}
            for key, attribute in keys:
                if key not in values:
                    continue
                value = values[key]
                if value is not None and types[attribute] in (int, float, Optional[int]):
                    if isinstance(value, bool) or not isinstance(value, (int, float)):
                        raise UsageError(f"{section}.{key} must be numeric, got {value!r}")
                    value = float(value) if types[attribute] is float else int(value)
                setattr(config, attribute, value)

        config.validate()
        return config

    def save(self, config: AppConfiguration) -> None:
        """
        Save configuration to file, writing only values that differ from the defaults.

        Args:
            config: Configuration to save
        """
        defaults = AppConfiguration()
        data = {}
        for section, keys in SECTIONS.items():
            changed = {
                key: getattr(config, attribute)
                for key, attribute in keys
                if getattr(config, attribute) != getattr(defaults, attribute)
            }
            if changed:
                data[section] = changed

        self.config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.config_path, 'w') as f:
            yaml.safe_dump(data, f, default_flow_style=False)
