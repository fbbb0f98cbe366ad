"""
End-to-end pipeline for behaviorprint
ingest -> sequencer -> miner -> profiles -> stats -> cluster, with every
stage computed once and tagged in error messages
"""

import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterator, List

import pandas as pd

from . import __version__
from .cluster import (
    ClusterReport, Dendrogram, cluster_report, cut_tree, to_dot, to_newick, ward_cluster,
    write_assignments, write_cluster_report,
)
from .config import RunConfig
from .errors import ConfigError, StageError
from .ingest import DatasetStats, EventRecord, dataset_stats, parse_event_log, write_stats
from .miner import Pattern, SequenceDatabase, mine, write_patterns
from .profiles import PatternProfile, PatternVocabulary, build_profiles, write_profiles
from .sequencer import (
    BoundaryConfig, LabeledSequence, MedianTable, build_sequences, compute_medians,
    filter_sequences, label_table, sequences_by_user, write_sequences,
)
from .stats import StabilityReport, stability_experiment, write_stability_rows, write_stability_summary

logger = logging.getLogger(__name__)

REPORT_FILES = (
    "stats.json",
    "sequences.csv",
    "patterns.csv",
    "profiles.csv",
    "stability.csv",
    "stability_summary.json",
    "dendrogram.nwk",
    "dendrogram.dot",
    "assignments.csv",
    "cluster_report.csv",
)


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Tag any error raised inside with the stage name"""
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        raise StageError(name, e) from e


class Pipeline:
    """Lazily computed pipeline stages for one RunConfig"""

    def __init__(self, config: RunConfig):
        self.config = config.validate()
        self.output_dir = Path(config.output_dir)

    @cached_property
    def records(self) -> List[EventRecord]:
        with stage("ingest"):
            if not self.config.input:
                raise ConfigError("input", "no event log given")
            with open(self.config.input, "rb") as f:
                return parse_event_log(f)

    @cached_property
    def stats(self) -> DatasetStats:
        with stage("ingest"):
            return dataset_stats(self.records)

    @cached_property
    def medians(self) -> MedianTable:
        with stage("sequence"):
            medians = compute_medians(self.records)
        logger.info("median durations: %s", medians.to_dict())
        return medians

    @cached_property
    def baseline_sequences(self) -> List[LabeledSequence]:
        with stage("sequence"):
            return build_sequences(self.records, self.medians, label_table(self.config.example_casing))

    @cached_property
    def sequences(self) -> List[LabeledSequence]:
        return self.sequences_for(self.config.boundary_config())

    def sequences_for(self, boundaries: BoundaryConfig) -> List[LabeledSequence]:
        with stage("sequence"):
            return filter_sequences(self.baseline_sequences, self.records, self.medians, boundaries)

    @cached_property
    def patterns(self) -> List[Pattern]:
        with stage("mine"):
            return mine(SequenceDatabase.from_labeled(self.sequences), self.config.mining_params(),
                        n_jobs=self.config.n_jobs)

    @cached_property
    def vocabulary(self) -> PatternVocabulary:
        return PatternVocabulary.from_patterns(self.patterns)

    @cached_property
    def per_user(self) -> Dict[str, List[LabeledSequence]]:
        return sequences_by_user(self.sequences)

    @cached_property
    def profiles(self) -> List[PatternProfile]:
        with stage("profile"):
            return build_profiles(self.per_user, self.vocabulary, self.config.maxgap, self.config.epsilon)

    @cached_property
    def stability(self) -> StabilityReport:
        with stage("stability"):
            return stability_experiment(
                self.per_user,
                self.vocabulary,
                maxgap=self.config.maxgap,
                epsilon=self.config.epsilon,
                seed=self.config.seed,
                measures=self.config.measures,
                log_base=self.config.log_base_value,
                pairing=self.config.other_pairing,
            )

    @cached_property
    def dendrogram(self) -> Dendrogram:
        with stage("cluster"):
            return ward_cluster(self.profiles)

    @cached_property
    def assignment(self) -> Dict[str, int]:
        with stage("cluster"):
            return cut_tree(self.dendrogram, self.config.k)

    @cached_property
    def cluster_report(self) -> ClusterReport:
        with stage("cluster"):
            return cluster_report(self.assignment, self.profiles, self.vocabulary)

    def _path(self, name: str) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir / name

    def write_ingest(self) -> None:
        with stage("ingest"):
            write_stats(self.stats, self._path("stats.json"))

    def write_sequences(self) -> None:
        with stage("sequence"):
            write_sequences(self.sequences, self._path("sequences.csv"))

    def write_patterns(self) -> None:
        with stage("mine"):
            write_patterns(self.patterns, self._path("patterns.csv"))

    def write_profiles(self) -> None:
        with stage("profile"):
            write_profiles(self.profiles, self.vocabulary, self._path("profiles.csv"))

    def write_stability(self) -> None:
        with stage("stability"):
            write_stability_rows(self.stability, self._path("stability.csv"))
            write_stability_summary(self.stability, self._path("stability_summary.json"))

    def write_cluster(self) -> None:
        with stage("cluster"):
            self._path("dendrogram.nwk").write_text(to_newick(self.dendrogram), encoding="utf-8")
            self._path("dendrogram.dot").write_text(to_dot(self.dendrogram), encoding="utf-8")
            write_assignments(self.assignment, self._path("assignments.csv"))
            write_cluster_report(self.cluster_report, self._path("cluster_report.csv"))

    def write_manifest(self) -> None:
        manifest = {
            "version": __version__,
            "config": self.config.to_dict(),
            "files": list(REPORT_FILES),
        }
        with open(self._path("manifest.json"), "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")


def run_pipeline(config: RunConfig) -> Pipeline:
    """Run every stage and write the ten report files plus manifest.json"""
    pipeline = Pipeline(config)
    pipeline.write_ingest()
    pipeline.write_sequences()
    pipeline.write_patterns()
    pipeline.write_profiles()
    pipeline.write_stability()
    pipeline.write_cluster()
    pipeline.write_manifest()
    logger.info("wrote %d report files to %s", len(REPORT_FILES), pipeline.output_dir)
    return pipeline


BOUNDARY_VARIANTS = {
    "baseline": {},
    "gap_below_median": {"require_gap_below_median": True},
    "mixed_activity": {"require_mixed_activity": True},
    "exercise_ending": {"require_exercise_ending": True},
    "all_rules": {
        "require_gap_below_median": True,
        "require_mixed_activity": True,
        "require_exercise_ending": True,
    },
}


@dataclass(frozen=True)
class BoundaryOutcome:
    variant: str
    n_sequences: int
    mean_length: float
    n_patterns: int


def compare_boundaries(pipeline: Pipeline) -> List[BoundaryOutcome]:
    """Sequence and pattern counts under the baseline and each boundary rule"""
    base = BoundaryConfig(gap_reference=pipeline.config.gap_reference)
    params = pipeline.config.mining_params()
    outcomes = []
    for variant, flags in BOUNDARY_VARIANTS.items():
        seqs = pipeline.sequences_for(replace(base, **flags))
        with stage("mine"):
            patterns = mine(SequenceDatabase.from_labeled(seqs), params, n_jobs=pipeline.config.n_jobs)
        mean_length = sum(len(s) for s in seqs) / len(seqs) if seqs else 0.0
        outcomes.append(BoundaryOutcome(variant, len(seqs), mean_length, len(patterns)))
        logger.info("boundary variant %s: %d sequences, %d patterns", variant, len(seqs), len(patterns))
    return outcomes


def write_boundaries(outcomes: List[BoundaryOutcome], path: Path) -> None:
    frame = pd.DataFrame(
        [(o.variant, o.n_sequences, f"{o.mean_length:.4f}", o.n_patterns) for o in outcomes],
        columns=["variant", "n_sequences", "mean_length", "n_patterns"],
    )
    frame.to_csv(path, index=False, lineterminator="\n")
