"""
CSV writers for metrics, loss history and ablation tables.

Floats are written with round-trip precision; +inf as ``inf`` and NaN as
``nan``.
"""

from pathlib import Path
from typing import Iterable, List, Type, Union

import pandas as pd
import structlog
from pydantic import BaseModel

from ..schemas import (
    ABLATION_COLUMNS,
    HISTORY_COLUMNS,
    METRICS_COLUMNS,
    AblationRow,
    HistoryRow,
    MetricsRow,
)

logger = structlog.get_logger(__name__)

PathLike = Union[str, Path]


def _write(rows: Iterable, schema: Type[BaseModel], columns: List[str], path: PathLike) -> Path:
    records = [schema.model_validate(row, from_attributes=True).model_dump() for row in rows]
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(records, columns=columns).to_csv(path, index=False, na_rep="nan")
    logger.info("csv_written", path=str(path), rows=len(records))
    return path


def write_metrics(rows: Iterable, path: PathLike) -> Path:
    """Columns case,method,psnr,ssim,ms_ssim."""
    return _write(rows, MetricsRow, METRICS_COLUMNS, path)


def write_history(records: Iterable, path: PathLike) -> Path:
    """Columns epoch,step,loss from (epoch, step, loss) tuples or HistoryRow values."""
    rows = [
        HistoryRow(epoch=r[0], step=r[1], loss=r[2]) if isinstance(r, tuple) else r
        for r in records
    ]
    return _write(rows, HistoryRow, HISTORY_COLUMNS, path)


def write_ablation(rows: Iterable, path: PathLike) -> Path:
    """Columns method,trajectory,psnr,ssim,n_parameters."""
    return _write(rows, AblationRow, ABLATION_COLUMNS, path)


def read_table(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")
