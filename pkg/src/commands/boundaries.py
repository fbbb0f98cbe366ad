"""
Boundary comparison command handler for behaviorprint
"""

from ..pipeline import compare_boundaries, write_boundaries
from .common import formatter_from_args, pipeline_from_args


def handle_compare_boundaries(args):
    """Handle the compare-boundaries command"""
    pipeline = pipeline_from_args(args)
    outcomes = compare_boundaries(pipeline)
    path = pipeline.output_dir / "boundaries.csv"
    pipeline.output_dir.mkdir(parents=True, exist_ok=True)
    write_boundaries(outcomes, path)

    formatter = formatter_from_args(args)
    formatter.display_boundaries(outcomes)
    formatter.display_files({"boundaries.csv": str(path)})
