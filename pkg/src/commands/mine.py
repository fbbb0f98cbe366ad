"""
Mine command handler for behaviorprint
"""

from .common import formatter_from_args, pipeline_from_args


def handle_mine(args):
    """Handle the mine command: frequent patterns over the labeled sequences"""
    pipeline = pipeline_from_args(args)
    pipeline.write_patterns()
    formatter_from_args(args).display_patterns(pipeline.patterns, pipeline.config.top)
