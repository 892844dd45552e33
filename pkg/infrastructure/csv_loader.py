"""
CSV ingestion and emission of numeric datasets.
Infrastructure layer - handles file I/O with pandas.
"""

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from domain.dataset import Dataset
from domain.errors import IngestionError, InvalidInputError


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _read_frame(path: PathLike) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except FileNotFoundError as e:
        raise IngestionError(f"No such file: {path}") from e
    except pd.errors.EmptyDataError as e:
        raise IngestionError(f"{path} is empty") from e
    except (pd.errors.ParserError, UnicodeDecodeError, OSError) as e:
        raise IngestionError(f"Cannot parse {path}: {e}") from e

    if frame.empty:
        raise IngestionError(f"{path} has a header but no data rows")
    return frame


def _numeric(frame: pd.DataFrame, path: PathLike) -> pd.DataFrame:
    """Convert every cell, reporting the first bad one by data row (1-based) and column."""
    converted = {}
    for column in frame.columns:
        raw = frame[column].str.strip()
        values = pd.to_numeric(raw, errors='coerce')
        bad = values.isna() | ~np.isfinite(values)
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise IngestionError(
                f"{path}: non-numeric value {raw.iloc[row]!r} at row {row + 1}, column '{column}'"
            )
        # correctly rounded parse of the validated strings
        converted[column] = raw.astype(float)
    return pd.DataFrame(converted)


def ingest_csv(path: PathLike, response_column: str, predictors: Optional[list[str]] = None) -> Dataset:
    """
    Load a numeric CSV with a header row.

    Args:
        path: CSV file
        response_column: column holding y
        predictors: predictor columns in order (default: all other columns)

    Returns:
        Dataset with the column names preserved

    Raises:
        IngestionError: missing file or column, empty file, non-numeric cell
    """
    frame = _read_frame(path)
    header = [str(c).strip() for c in frame.columns]
    frame.columns = header

    if len(set(header)) != len(header):
        raise IngestionError(f"{path}: duplicate column names in header")
    if response_column not in header:
        raise IngestionError(f"{path}: missing response column '{response_column}'")
    if predictors is None:
        predictors = [c for c in header if c != response_column]
    for column in predictors:
        if column not in header:
            raise IngestionError(f"{path}: missing column '{column}'")
    if not predictors:
        raise IngestionError(f"{path}: no predictor columns")

    numeric = _numeric(frame[predictors + [response_column]], path)
    try:
        data = Dataset(
            numeric[predictors].to_numpy(dtype=float),
            numeric[response_column].to_numpy(dtype=float),
            tuple(predictors),
            response_column,
        )
    except InvalidInputError as e:
        raise IngestionError(f"{path}: {e}") from e

    logger.info(f"Loaded {data} from {path}")
    return data


def write_dataset_csv(data: Dataset, path: PathLike) -> None:
    """Write predictors then the response with round-trip float precision."""
    frame = pd.DataFrame(np.asarray(data.X), columns=list(data.column_names))
    frame[data.response] = np.asarray(data.y)
    try:
        frame.to_csv(path, index=False, float_format='%.17g')
    except OSError as e:
        raise IngestionError(f"Cannot write {path}: {e}") from e
    logger.debug(f"Wrote {data} to {path}")
