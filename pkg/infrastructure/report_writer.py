"""
Report envelope and its JSON, CSV and aligned-table renderings.
Infrastructure layer - handles report output.
"""

import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
import pandas as pd

from domain.errors import IngestionError


logger = logging.getLogger(__name__)

TOOLKIT_VERSION = "1.0.0"
SCHEMA_VERSION = 1


def _to_builtin(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


@dataclass(frozen=True)
class ReportEnvelope:
    """
    Value Object: one command's result with everything needed to rerun it.

    `payload` is the canonical JSON form of the result; `rows` is its
    tabular projection used by the CSV and table renderings.
    """
    command: str
    config: dict
    payload: dict
    started_at: str
    elapsed_seconds: float
    rows: list[dict] = field(default_factory=list)
    toolkit_version: str = TOOLKIT_VERSION
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            'schema_version': self.schema_version,
            'toolkit_version': self.toolkit_version,
            'command': self.command,
            'config': self.config,
            'timing': {'started_at': self.started_at, 'elapsed_seconds': self.elapsed_seconds},
            'payload': self.payload,
            'rows': self.rows,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_to_builtin)

    @classmethod
    def from_json(cls, text: str) -> 'ReportEnvelope':
        try:
            data = json.loads(text)
            return cls(
                command=data['command'],
                config=data['config'],
                payload=data['payload'],
                started_at=data['timing']['started_at'],
                elapsed_seconds=data['timing']['elapsed_seconds'],
                rows=data.get('rows', []),
                toolkit_version=data['toolkit_version'],
                schema_version=data['schema_version'],
            )
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise IngestionError(f"Not a toolkit report: {e}") from e

    def frame(self) -> pd.DataFrame:
        """Rows as a DataFrame; single-record reports use the flattened payload."""
        if self.rows:
            return pd.DataFrame(self.rows)
        return pd.json_normalize(json.loads(json.dumps(self.payload, default=_to_builtin)))

    def to_csv(self) -> str:
        return self.frame().to_csv(index=False, float_format='%.17g')

    def to_table(self) -> str:
        header = f"{self.command} (toolkit {self.toolkit_version}, {self.elapsed_seconds:.2f}s)"
        with pd.option_context('display.max_columns', None, 'display.width', 200):
            body = self.frame().to_string(index=False, float_format=lambda v: f"{v:.4f}")
        return f"{header}\n{body}\n"

    def render(self, output_format: str) -> str:
        if output_format == 'csv':
            return self.to_csv()
        if output_format == 'table':
            return self.to_table()
        return self.to_json() + "\n"


def write_report(envelope: ReportEnvelope, output_format: str, output: Optional[Union[str, Path]] = None) -> None:
    """Write the rendered report to a file, or stdout when no path is given."""
    text = envelope.render(output_format)
    if output is None or str(output) == '-':
        sys.stdout.write(text)
        return
    try:
        Path(output).write_text(text)
    except OSError as e:
        raise IngestionError(f"Cannot write report to {output}: {e}") from e
    logger.info(f"Report written to {output}")
