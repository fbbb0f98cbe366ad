"""
Profile command handler for behaviorprint
"""

from .common import formatter_from_args, pipeline_from_args


def handle_profile(args):
    """Handle the profile command: per-user pattern distributions"""
    pipeline = pipeline_from_args(args)
    pipeline.write_profiles()
    formatter_from_args(args).display_profiles(len(pipeline.profiles), len(pipeline.vocabulary))
