"""
Activity labeling and sequence construction for behaviorprint
Maps each activity to one of eight labels and segments records into
per-(user, session, topic) labeled sequences
"""

import logging
from dataclasses import dataclass
from enum import Enum
from itertools import groupby
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .errors import ConfigError, MissingMedianError
from .ingest import ActivityKind, EventRecord, Outcome

logger = logging.getLogger(__name__)


class Label(str, Enum):
    """Activity label; the value is the canonical rendering"""
    ANEX_LONG = "AnEx"
    ANEX_SHORT = "anex"
    EX_LONG = "ex"
    EX_SHORT = "Ex"
    PASS_LONG = "P"
    PASS_SHORT = "p"
    FAIL_LONG = "F"
    FAIL_SHORT = "f"

    def __str__(self) -> str:
        return self.value


EXERCISE_LABELS = frozenset({Label.PASS_LONG, Label.PASS_SHORT, Label.FAIL_LONG, Label.FAIL_SHORT})
EXAMPLE_LABELS = frozenset({Label.ANEX_LONG, Label.ANEX_SHORT, Label.EX_LONG, Label.EX_SHORT})

LABEL_KIND: Dict[Label, ActivityKind] = {
    Label.ANEX_LONG: ActivityKind.ANIMATED_EXAMPLE,
    Label.ANEX_SHORT: ActivityKind.ANIMATED_EXAMPLE,
    Label.EX_LONG: ActivityKind.BASIC_EXAMPLE,
    Label.EX_SHORT: ActivityKind.BASIC_EXAMPLE,
    Label.PASS_LONG: ActivityKind.PARAMETERIZED_EXERCISE,
    Label.PASS_SHORT: ActivityKind.PARAMETERIZED_EXERCISE,
    Label.FAIL_LONG: ActivityKind.PARAMETERIZED_EXERCISE,
    Label.FAIL_SHORT: ActivityKind.PARAMETERIZED_EXERCISE,
}

# (kind, duration > median, outcome) -> label
LabelTable = Dict[Tuple[ActivityKind, bool, Outcome], Label]

CASINGS = ("long_lower", "long_upper")


def label_table(casing: str = "long_lower") -> LabelTable:
    """
    Build the labeling table.

    "long_lower" renders a long basic example as `ex` and a short one as `Ex`;
    "long_upper" swaps the two. Everything else is identical.
    """
    if casing not in CASINGS:
        raise ConfigError("example_casing", f"expected one of {', '.join(CASINGS)}, got '{casing}'")

    example_long, example_short = Label.EX_LONG, Label.EX_SHORT
    if casing == "long_upper":
        example_long, example_short = example_short, example_long

    animated = ActivityKind.ANIMATED_EXAMPLE
    basic = ActivityKind.BASIC_EXAMPLE
    exercise = ActivityKind.PARAMETERIZED_EXERCISE
    return {
        (animated, True, Outcome.NONE): Label.ANEX_LONG,
        (animated, False, Outcome.NONE): Label.ANEX_SHORT,
        (basic, True, Outcome.NONE): example_long,
        (basic, False, Outcome.NONE): example_short,
        (exercise, True, Outcome.PASS): Label.PASS_LONG,
        (exercise, False, Outcome.PASS): Label.PASS_SHORT,
        (exercise, True, Outcome.FAIL): Label.FAIL_LONG,
        (exercise, False, Outcome.FAIL): Label.FAIL_SHORT,
    }


DEFAULT_LABELS = label_table()


@dataclass(frozen=True)
class MedianTable:
    """Per-kind median duration in seconds"""
    medians: Dict[ActivityKind, float]

    def __getitem__(self, kind: ActivityKind) -> float:
        try:
            return self.medians[kind]
        except KeyError:
            raise MissingMedianError(kind.value) from None

    def to_dict(self) -> Dict[str, float]:
        return {kind.value: value for kind, value in sorted(self.medians.items(), key=lambda kv: kv[0].value)}


@dataclass(frozen=True)
class LabeledSequence:
    """Ordered labels of one (user, session, topic) episode"""
    user_id: str
    session_id: str
    topic_id: str
    labels: Tuple[Label, ...]
    starts: Tuple[int, ...]
    durations: Tuple[int, ...]

    def __post_init__(self):
        if not self.labels:
            raise ValueError("a labeled sequence needs at least one label")
        if not len(self.labels) == len(self.starts) == len(self.durations):
            raise ValueError("labels, starts and durations must be aligned")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def key(self) -> Tuple[str, str, str]:
        return (self.user_id, self.session_id, self.topic_id)

    def render(self) -> str:
        return " ".join(label.value for label in self.labels)

    def gaps(self) -> List[int]:
        """Idle time between consecutive activities"""
        return [
            self.starts[i + 1] - (self.starts[i] + self.durations[i])
            for i in range(len(self.labels) - 1)
        ]

    def slice(self, lo: int, hi: int) -> "LabeledSequence":
        return LabeledSequence(
            self.user_id, self.session_id, self.topic_id,
            self.labels[lo:hi], self.starts[lo:hi], self.durations[lo:hi],
        )


@dataclass(frozen=True)
class BoundaryConfig:
    """Optional sequence-boundary rules; all off reproduces the baseline segmentation"""
    require_gap_below_median: bool = False
    require_mixed_activity: bool = False
    require_exercise_ending: bool = False
    gap_reference: str = "gaps"

    @property
    def any_enabled(self) -> bool:
        return self.require_gap_below_median or self.require_mixed_activity or self.require_exercise_ending


GAP_REFERENCES = ("gaps", "activity_median")


def compute_medians(
    records: Iterable[EventRecord],
    kinds: Optional[Sequence[ActivityKind]] = None,
) -> MedianTable:
    """
    Median duration per activity kind over the whole corpus.

    Exercise durations pool passes and failures. With `kinds` given, every
    listed kind must have at least one record.
    """
    durations: Dict[ActivityKind, List[int]] = {}
    for record in records:
        durations.setdefault(record.kind, []).append(record.duration)

    if kinds is not None:
        for kind in kinds:
            if kind not in durations:
                raise MissingMedianError(kind.value)
        durations = {kind: durations[kind] for kind in kinds}

    # np.median averages the two middle values on even counts
    return MedianTable({kind: float(np.median(values)) for kind, values in durations.items()})


def label_activity(record: EventRecord, medians: MedianTable, table: LabelTable = DEFAULT_LABELS) -> Label:
    """Label a single activity; ties with the median fall on the short side"""
    is_long = record.duration > medians[record.kind]
    return table[(record.kind, is_long, record.outcome)]


def _group_key(record: EventRecord) -> Tuple[str, str, str]:
    return (record.user_id, record.session_id, record.topic_id)


def group_records(records: Iterable[EventRecord]) -> Dict[Tuple[str, str, str], List[EventRecord]]:
    """Records per (user, session, topic), each group in chronological order"""
    groups: Dict[Tuple[str, str, str], List[EventRecord]] = {}
    for record in records:
        groups.setdefault(_group_key(record), []).append(record)
    # stable sort keeps file order for equal start times
    return {key: sorted(group, key=lambda r: r.start) for key, group in sorted(groups.items())}


def build_sequences(
    records: Iterable[EventRecord],
    medians: MedianTable,
    table: LabelTable = DEFAULT_LABELS,
) -> List[LabeledSequence]:
    """One labeled sequence per (user, session, topic), sorted by that key"""
    sequences = []
    for (user_id, session_id, topic_id), group in group_records(records).items():
        sequences.append(LabeledSequence(
            user_id=user_id,
            session_id=session_id,
            topic_id=topic_id,
            labels=tuple(label_activity(r, medians, table) for r in group),
            starts=tuple(r.start for r in group),
            durations=tuple(r.duration for r in group),
        ))

    logger.info("built %d sequences", len(sequences))
    return sequences


def gap_median(records: Iterable[EventRecord]) -> Optional[float]:
    """Median idle gap between consecutive activities of the same episode"""
    gaps = []
    for group in group_records(records).values():
        gaps.extend(group[i + 1].start - group[i].end for i in range(len(group) - 1))
    if not gaps:
        return None
    return float(np.median(gaps))


def _split_on_gaps(
    seq: LabeledSequence,
    medians: MedianTable,
    cfg: BoundaryConfig,
    threshold: Optional[float],
) -> List[LabeledSequence]:
    cuts = []
    for i, gap in enumerate(seq.gaps()):
        if cfg.gap_reference == "activity_median":
            limit = medians[LABEL_KIND[seq.labels[i]]]
        else:
            limit = threshold
        if limit is not None and gap >= limit:
            cuts.append(i + 1)

    bounds = [0] + cuts + [len(seq)]
    return [seq.slice(lo, hi) for lo, hi in zip(bounds, bounds[1:])]


def _is_mixed(seq: LabeledSequence) -> bool:
    labels = set(seq.labels)
    return not (labels <= EXERCISE_LABELS or labels <= EXAMPLE_LABELS)


def filter_sequences(
    seqs: List[LabeledSequence],
    records: Iterable[EventRecord],
    medians: MedianTable,
    cfg: BoundaryConfig,
) -> List[LabeledSequence]:
    """
    Apply the enabled boundary rules in order: gap split, mixed-activity, exercise ending.

    The gap rule splits a sequence wherever the idle gap reaches the threshold
    (the corpus-wide median gap, or the preceding kind's median duration when
    `gap_reference` is "activity_median") and keeps every fragment.
    """
    if cfg.gap_reference not in GAP_REFERENCES:
        raise ConfigError("gap_reference", f"expected one of {', '.join(GAP_REFERENCES)}, got '{cfg.gap_reference}'")
    if not cfg.any_enabled:
        return list(seqs)

    result = list(seqs)
    if cfg.require_gap_below_median:
        threshold = gap_median(records) if cfg.gap_reference == "gaps" else None
        result = [part for seq in result for part in _split_on_gaps(seq, medians, cfg, threshold)]
    if cfg.require_mixed_activity:
        result = [seq for seq in result if _is_mixed(seq)]
    if cfg.require_exercise_ending:
        result = [seq for seq in result if seq.labels[-1] in EXERCISE_LABELS]

    if not result:
        logger.warning("boundary rules removed every sequence")
    logger.info("boundary rules kept %d of %d sequences", len(result), len(seqs))
    return result


def sequences_by_user(seqs: Iterable[LabeledSequence]) -> Dict[str, List[LabeledSequence]]:
    """Sequences grouped per user, users in sorted order"""
    ordered = sorted(seqs, key=lambda s: s.key)
    return {user: list(group) for user, group in groupby(ordered, key=lambda s: s.user_id)}


def write_sequences(seqs: Iterable[LabeledSequence], path: Union[str, Path]) -> None:
    """Export sequences as user_id,session_id,topic_id,labels"""
    frame = pd.DataFrame(
        [(s.user_id, s.session_id, s.topic_id, s.render()) for s in seqs],
        columns=["user_id", "session_id", "topic_id", "labels"],
    )
    frame.to_csv(path, index=False, lineterminator="\n")
