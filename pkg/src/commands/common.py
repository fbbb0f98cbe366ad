"""
Helpers shared by the command handlers
"""

from ..config import RunConfig
from ..display import ReportFormatter
from ..pipeline import Pipeline


def pipeline_from_args(args) -> Pipeline:
    """Resolve the run configuration from --config and flags"""
    return Pipeline(RunConfig.from_args(args))


def formatter_from_args(args) -> ReportFormatter:
    return ReportFormatter(color=not getattr(args, "no_color", False))
