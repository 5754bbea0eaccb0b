"""
Metric exporters.
"""

from .csv_reporter import read_table, write_ablation, write_history, write_metrics

__all__ = ["read_table", "write_ablation", "write_history", "write_metrics"]
