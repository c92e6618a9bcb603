"""
Quality metrics and reports
"""

from .quality import (
    PSNR_INFINITY,
    SCALES,
    bit_accuracy,
    cross_correlation,
    mse_metric,
    payload,
    psnr,
    psnr_from_mse,
    timed,
    timed_decode,
    timed_encode,
)
from .report import (
    ROW_NAMES,
    MetricsReport,
    build_report,
    mean_report,
    read_reports_csv,
    report_table,
    write_reports_csv,
)

__all__ = [
    'PSNR_INFINITY', 'SCALES', 'bit_accuracy', 'cross_correlation', 'mse_metric', 'payload', 'psnr',
    'psnr_from_mse', 'timed', 'timed_decode', 'timed_encode',
    'ROW_NAMES', 'MetricsReport', 'build_report', 'mean_report', 'read_reports_csv', 'report_table',
    'write_reports_csv',
]
