"""
Run command handler for behaviorprint
"""

from ..pipeline import REPORT_FILES, run_pipeline
from ..config import RunConfig
from .common import formatter_from_args


def handle_run(args):
    """Handle the run command: every stage, every report file"""
    formatter = formatter_from_args(args)
    pipeline = run_pipeline(RunConfig.from_args(args))

    formatter.display_stats(pipeline.stats)
    formatter.display_patterns(pipeline.patterns, pipeline.config.top)
    formatter.display_stability(pipeline.stability)
    formatter.display_clusters(pipeline.cluster_report)
    formatter.display_files({
        name: str(pipeline.output_dir / name) for name in REPORT_FILES + ("manifest.json",)
    })
