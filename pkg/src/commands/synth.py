"""
Synth command handler for behaviorprint
"""

from dataclasses import replace
from pathlib import Path

from ..ingest import dataset_stats, write_event_log
from ..synth import CohortSpec, generate_cohort, load_cohort_spec
from .common import formatter_from_args


def handle_synth(args):
    """Handle the synth command: write a seeded synthetic event log"""
    spec = load_cohort_spec(args.cohort) if args.cohort else CohortSpec()
    if args.users is not None:
        spec = replace(spec, n_users=args.users)
    if args.distinctness is not None:
        spec = replace(spec, distinctness=args.distinctness)

    records = generate_cohort(spec, args.seed)
    output = Path(args.output)
    output.parent.mkdir(parents=True, exist_ok=True)
    write_event_log(records, output)

    formatter = formatter_from_args(args)
    formatter.display_stats(dataset_stats(records))
    formatter.display_files({"events": str(output)})
