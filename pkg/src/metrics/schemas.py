"""
Pydantic schemas for metric tables.

Rows are validated before they are written so every CSV has a fixed
column set and order.
"""

from pydantic import BaseModel, Field


class MetricsRow(BaseModel):
    """One evaluated case. psnr may be inf, ms_ssim nan when the image is too small."""
    case: str
    method: str
    psnr: float
    ssim: float = Field(ge=-1.0, le=1.0)
    ms_ssim: float


class HistoryRow(BaseModel):
    """One training step."""
    epoch: int = Field(ge=1)
    step: int = Field(ge=1)
    loss: float


class AblationRow(BaseModel):
    """One method of the comparison table."""
    method: str
    trajectory: str
    psnr: float
    ssim: float
    n_parameters: int = Field(ge=0)


METRICS_COLUMNS = list(MetricsRow.model_fields)
HISTORY_COLUMNS = list(HistoryRow.model_fields)
ABLATION_COLUMNS = list(AblationRow.model_fields)
