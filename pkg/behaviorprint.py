#!/usr/bin/env python3
"""
behaviorprint - behavioral fingerprints from learning-activity logs
Mines frequent activity patterns, tests whether students are identifiable
from them and clusters students by pattern profile
"""

import sys
import argparse

from src import __version__
from src.commands import (
    boundaries, cluster, ingest, init_config, mine, profile, run, sequence, stability, synth,
)
from src.display import ReportFormatter
from src.errors import BehaviorPrintError
from src.log import setup_logging


def _run_options() -> argparse.ArgumentParser:
    """Flags shared by every pipeline command; unset flags leave the config value alone"""
    parent = argparse.ArgumentParser(add_help=False)

    io = parent.add_argument_group('input/output')
    io.add_argument('-c', '--config', help='YAML config file (a manifest.json also works)')
    io.add_argument('-i', '--input', help='event-log CSV')
    io.add_argument('-o', '--output-dir', dest='output_dir', help='directory for report files')

    mining = parent.add_argument_group('mining')
    mining.add_argument('--minsup', type=float, help='minimum support fraction (default: 0.04)')
    mining.add_argument('--maxgap', type=int, help='maximum position gap (default: 1)')
    mining.add_argument('--unbounded-gap', dest='unbounded_gap', action='store_true',
                        help='no gap constraint')
    mining.add_argument('--minlen', type=int, help='minimum pattern length (default: 2)')
    mining.add_argument('--maxlen', type=int, help='maximum pattern length (default: unbounded)')
    mining.add_argument('--n-jobs', dest='n_jobs', type=int, help='parallel workers for mining')

    labeling = parent.add_argument_group('labeling')
    labeling.add_argument('--example-casing', dest='example_casing', choices=['long_lower', 'long_upper'])
    labeling.add_argument('--require-gap-below-median', dest='require_gap_below_median',
                          action='store_true', default=None)
    labeling.add_argument('--require-mixed-activity', dest='require_mixed_activity',
                          action='store_true', default=None)
    labeling.add_argument('--require-exercise-ending', dest='require_exercise_ending',
                          action='store_true', default=None)
    labeling.add_argument('--gap-reference', dest='gap_reference', choices=['gaps', 'activity_median'])

    analysis = parent.add_argument_group('analysis')
    analysis.add_argument('--epsilon', type=float, help='smoothing for zero counts (default: 0.0001)')
    analysis.add_argument('--seed', type=int, help='seed for the split-half shuffle (default: 0)')
    analysis.add_argument('--measures', type=lambda s: [m.strip() for m in s.split(',') if m.strip()],
                          help='comma-separated: js_divergence,cosine_distance')
    analysis.add_argument('--log-base', dest='log_base', choices=['2', 'e'])
    analysis.add_argument('--other-pairing', dest='other_pairing', choices=['cross', 'whole'])
    analysis.add_argument('--k', type=int, help='number of clusters (default: 2)')
    analysis.add_argument('--top', type=int, help='patterns shown in the summary (default: 15)')
    return parent


def main(argv=None):
    """Main entry point for the application"""
    parser = argparse.ArgumentParser(
        prog="behaviorprint",
        description="behavioral fingerprints from learning-activity logs",
        epilog="Mine activity patterns, test student identifiability and cluster students"
    )

    parser.add_argument('--version', action='version', version=f'behaviorprint {__version__}')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='-v info, -vv debug')
    parser.add_argument('--no-color', dest='no_color', action='store_true', help='plain output')

    subparsers = parser.add_subparsers(dest='command', help='Available commands')
    options = _run_options()

    stages = [
        ('run', 'Run the whole pipeline and write every report', run.handle_run),
        ('ingest', 'Parse an event log and report dataset statistics', ingest.handle_ingest),
        ('sequence', 'Label activities and build sequences', sequence.handle_sequence),
        ('mine', 'Mine frequent sequential patterns', mine.handle_mine),
        ('profile', 'Build per-user pattern profiles', profile.handle_profile),
        ('stability', 'Run the split-half stability experiment', stability.handle_stability),
        ('cluster', 'Ward clustering of user profiles', cluster.handle_cluster),
        ('compare-boundaries', 'Compare sequence boundary rules', boundaries.handle_compare_boundaries),
    ]
    for name, help_text, handler in stages:
        stage_parser = subparsers.add_parser(name, help=help_text, parents=[options])
        stage_parser.set_defaults(func=handler)

    # Synth command
    synth_parser = subparsers.add_parser('synth', help='Generate a synthetic event log')
    synth_parser.add_argument('-o', '--output', required=True, help='event-log CSV to write')
    synth_parser.add_argument('--cohort', help='cohort spec YAML file')
    synth_parser.add_argument('--seed', type=int, default=0, help='generator seed (default: 0)')
    synth_parser.add_argument('--users', type=int, help='override the number of users')
    synth_parser.add_argument('--distinctness', type=float, help='override distinctness in [0, 1]')
    synth_parser.set_defaults(func=synth.handle_synth)

    # Init-config command
    init_parser = subparsers.add_parser('init-config', help='Write a documented default config')
    init_parser.add_argument('path', nargs='?', default='behaviorprint.yaml', help='file to create')
    init_parser.add_argument('--force', action='store_true', help='overwrite an existing file')
    init_parser.set_defaults(func=init_config.handle_init_config)

    # Parse arguments
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    # Execute command
    if hasattr(args, 'func'):
        try:
            args.func(args)
        except KeyboardInterrupt:
            print("\nOperation cancelled.")
            sys.exit(130)
        except BehaviorPrintError as e:
            ReportFormatter(color=not args.no_color).display_error(str(e))
            sys.exit(1)
        except OSError as e:
            ReportFormatter(color=not args.no_color).display_error(f"{e.strerror or e}: {e.filename}")
            sys.exit(1)
    else:
        parser.print_help()


if __name__ == "__main__":
    main()
