"""
Sequence command handler for behaviorprint
"""

from .common import formatter_from_args, pipeline_from_args


def handle_sequence(args):
    """Handle the sequence command: label activities and export sequences"""
    pipeline = pipeline_from_args(args)
    pipeline.write_sequences()
    formatter_from_args(args).display_sequences(len(pipeline.sequences), len(pipeline.per_user))
