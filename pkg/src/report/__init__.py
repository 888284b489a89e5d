"""
Reports: per-image JSON documents and corpus summary tables.
"""

from .errors import EmptyCorpus, ReportError, SchemaError
from .json_report import SCHEMA_VERSION, from_json, matrix_from_dict, matrix_to_dict, to_json
from .summary import (
    CorpusSummary,
    GroupSummary,
    RowCounts,
    aggregate,
    format_percentage,
    format_ratio,
    merge,
    percentage,
    summarize_matrix,
    summary_to_dict,
)
from .table import matrix_summary, to_table

__all__ = [
    "CorpusSummary",
    "EmptyCorpus",
    "GroupSummary",
    "ReportError",
    "RowCounts",
    "SCHEMA_VERSION",
    "SchemaError",
    "aggregate",
    "format_percentage",
    "format_ratio",
    "from_json",
    "matrix_from_dict",
    "matrix_summary",
    "matrix_to_dict",
    "merge",
    "percentage",
    "summarize_matrix",
    "summary_to_dict",
    "to_json",
    "to_table",
]
