"""
Ingest command handler for behaviorprint
"""

from .common import formatter_from_args, pipeline_from_args


def handle_ingest(args):
    """Handle the ingest command: parse the log and report its shape"""
    pipeline = pipeline_from_args(args)
    pipeline.write_ingest()
    formatter_from_args(args).display_stats(pipeline.stats)
