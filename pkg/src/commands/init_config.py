"""
Configuration setup command handler for behaviorprint
"""

from ..config import init_config
from .common import formatter_from_args


def handle_init_config(args):
    """Handle the init-config command"""
    path = init_config(args.path, overwrite=args.force)
    formatter_from_args(args).display_files({"config": str(path)})
    print("Edit the file, then run 'behaviorprint run --config <file>'.")
