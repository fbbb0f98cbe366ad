"""
Stability command handler for behaviorprint
"""

from .common import formatter_from_args, pipeline_from_args


def handle_stability(args):
    """Handle the stability command: split-half identifiability test"""
    pipeline = pipeline_from_args(args)
    pipeline.write_stability()
    formatter_from_args(args).display_stability(pipeline.stability)
