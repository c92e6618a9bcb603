"""
Per-trial metric reports and their CSV / table forms
"""

import csv
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

from rich.table import Table

from ..codec.reed_solomon import BitMessage
from ..errors import ValidationError
from .quality import ImageLike, bit_accuracy, cross_correlation, mse_metric, payload, psnr_from_mse

# field -> row name used in tables and CSV headers
ROW_NAMES = {
    "payload": "Max. payload (bits/pixels)",
    "t2e": "Time to Encode (secs)",
    "t2d": "Time to Decode (secs)",
    "mse": "Mean Squared Error(MSE)",
    "mse_unit": "Mean Squared Error(MSE), unit scale",
    "psnr": "PSNR (dB)",
    "r": "Cross-Correlation coefficient",
    "bit_accuracy": "Bit accuracy",
    "security": "Security",
}
LABEL_COLUMN = "Method"


@dataclass
class MetricsReport:
    """Quality numbers of one encode/decode trial (MSE at byte scale, PSNR with n = 8)"""

    payload: float
    mse: float
    mse_unit: float
    psnr: float
    r: float
    t2e: Optional[float] = None
    t2d: Optional[float] = None
    bit_accuracy: Optional[float] = None
    security: str = "not assessed"

    def __post_init__(self):
        if self.mse < 0 or self.mse_unit < 0:
            raise ValidationError("MSE must be non-negative")
        if not -1.0 <= self.r <= 1.0:
            raise ValidationError(f"Correlation must lie in [-1, 1], got {self.r}")
        if self.bit_accuracy is not None and not 0.0 <= self.bit_accuracy <= 1.0:
            raise ValidationError(f"Bit accuracy must lie in [0, 1], got {self.bit_accuracy}")
        for name in ("t2e", "t2d"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValidationError(f"{name} must be non-negative, got {value}")

    def rows(self) -> Dict[str, str]:
        """Row name -> display string"""
        return {ROW_NAMES[f.name]: format_value(f.name, getattr(self, f.name)) for f in fields(self)}


def format_value(name: str, value) -> str:
    if value is None:
        return "-"
    if name == "security":
        return str(value)
    if math.isinf(value):
        return "inf"
    if name in ("t2e", "t2d"):
        return f"{value:.4g}"
    if name in ("mse", "mse_unit"):
        return f"{value:.6g}"
    return f"{value:.5f}" if name in ("r", "bit_accuracy") else f"{value:.4f}"


def build_report(
    cover: ImageLike,
    stego: ImageLike,
    bit_count: int,
    sent: Optional[BitMessage] = None,
    received: Optional[BitMessage] = None,
    t2e: Optional[float] = None,
    t2d: Optional[float] = None,
) -> MetricsReport:
    """Compute every report field for one cover/stego pair"""
    mse = mse_metric(cover, stego, scale="byte")
    height, width = (cover.height, cover.width) if hasattr(cover, "height") else cover.shape[:2]
    accuracy = None
    if sent is not None and received is not None:
        accuracy = bit_accuracy(sent, received)
    return MetricsReport(
        payload=payload(bit_count, height, width),
        mse=mse,
        mse_unit=mse_metric(cover, stego, scale="unit"),
        psnr=psnr_from_mse(mse, n=8),
        r=cross_correlation(cover, stego),
        t2e=t2e,
        t2d=t2d,
        bit_accuracy=accuracy,
    )


def report_table(reports: Dict[str, MetricsReport], title: str = "Quantitative result") -> Table:
    """One column per method, one row per metric"""
    table = Table(title=title)
    table.add_column("Metric", style="cyan", no_wrap=True)
    for label in reports:
        table.add_column(label, justify="right")
    for name, row_name in ROW_NAMES.items():
        table.add_row(row_name, *(format_value(name, getattr(r, name)) for r in reports.values()))
    return table


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_reports_csv(path: Union[str, Path], reports: Dict[str, MetricsReport], comment: Optional[str] = None) -> Path:
    """One line per method with the row names as column headers; ``comment`` lines are prefixed with '#'"""
    path = Path(path)
    with open(path, 'w', newline='') as f:
        if comment:
            for line in comment.splitlines():
                f.write(f"# {line}\n")
        writer = csv.writer(f)
        writer.writerow([LABEL_COLUMN] + list(ROW_NAMES.values()))
        for label, report in reports.items():
            writer.writerow([label] + [_csv_cell(getattr(report, name)) for name in ROW_NAMES])
    return path


def read_reports_csv(path: Union[str, Path]) -> Dict[str, MetricsReport]:
    by_row = {row_name: name for name, row_name in ROW_NAMES.items()}
    with open(path, newline='') as f:
        lines = [line for line in f if not line.startswith("#")]
    reports = {}
    for record in csv.DictReader(lines):
        values = {}
        for row_name, cell in record.items():
            if row_name == LABEL_COLUMN:
                continue
            if row_name not in by_row:
                raise ValidationError(f"Unknown report column '{row_name}'")
            name = by_row[row_name]
            if name == "security":
                values[name] = cell
            else:
                values[name] = float(cell) if cell != "" else None
        reports[record[LABEL_COLUMN]] = MetricsReport(**values)
    return reports


def mean_report(reports: Iterable[MetricsReport], security: str = "not assessed") -> MetricsReport:
    """Field-wise mean; optional fields stay None unless every report carries them"""
    reports = list(reports)
    if not reports:
        raise ValidationError("Cannot aggregate zero reports")
    values = {}
    for f in fields(MetricsReport):
        if f.name == "security":
            continue
        column: List[Optional[float]] = [getattr(r, f.name) for r in reports]
        if any(v is None for v in column):
            values[f.name] = None
        else:
            values[f.name] = math.fsum(column) / len(column)
    return MetricsReport(security=security, **values)
