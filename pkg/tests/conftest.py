"""
Shared fixtures for the behaviorprint test suite
"""

from typing import Sequence

import pytest

from src.ingest import ActivityKind, EventRecord, Outcome, write_event_log
from src.sequencer import Label, LabeledSequence
from src.synth import CohortSpec, generate_cohort

HEADER = "user_id,session_id,topic_id,kind,start,duration,outcome\n"


@pytest.fixture
def make_record():
    """Factory for EventRecords with sensible defaults"""
    def make(user="u1", session="s1", topic="t1", kind=ActivityKind.ANIMATED_EXAMPLE,
             start=0, duration=10, outcome=Outcome.NONE) -> EventRecord:
        return EventRecord(user, session, topic, ActivityKind(kind), start, duration, Outcome(outcome))
    return make


@pytest.fixture
def make_seq():
    """Factory for LabeledSequences from label strings, one second per activity"""
    def make(labels: Sequence[str], user="u1", session="s1", topic="t1") -> LabeledSequence:
        labels = tuple(Label(label) for label in labels)
        n = len(labels)
        return LabeledSequence(user, session, topic, labels, tuple(range(0, 2 * n, 2)), (1,) * n)
    return make


@pytest.fixture
def csv_bytes():
    """Event-log bytes from data rows (header added)"""
    def make(*rows: str) -> bytes:
        return (HEADER + "".join(row + "\n" for row in rows)).encode("utf-8")
    return make


@pytest.fixture
def small_cohort():
    return CohortSpec(n_users=8, sessions=(3, 5), n_topics=6)


@pytest.fixture
def event_log(tmp_path, small_cohort):
    """A small synthetic event log on disk"""
    path = tmp_path / "events.csv"
    write_event_log(generate_cohort(small_cohort, seed=7), path)
    return path
