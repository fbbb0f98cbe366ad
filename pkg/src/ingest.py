"""
Event log ingestion for behaviorprint
Parses, validates and summarizes raw learning-activity logs
"""

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, asdict
from enum import Enum
from pathlib import Path
from typing import BinaryIO, Dict, Iterable, List, Set, Union

import pandas as pd

from .errors import EventLogError, EventValidationError

logger = logging.getLogger(__name__)

COLUMNS = ["user_id", "session_id", "topic_id", "kind", "start", "duration", "outcome"]

Source = Union[str, Path, BinaryIO]


class ActivityKind(str, Enum):
    """The three activity types offered by the learning platform"""
    ANIMATED_EXAMPLE = "animated_example"
    BASIC_EXAMPLE = "basic_example"
    PARAMETERIZED_EXERCISE = "parameterized_exercise"


class Outcome(str, Enum):
    """Exercise result; NONE for examples"""
    PASS = "pass"
    FAIL = "fail"
    NONE = "none"


@dataclass(frozen=True)
class EventRecord:
    """One logged activity"""
    user_id: str
    session_id: str
    topic_id: str
    kind: ActivityKind
    start: int
    duration: int
    outcome: Outcome = Outcome.NONE

    @property
    def end(self) -> int:
        return self.start + self.duration


@dataclass(frozen=True)
class DatasetStats:
    """Corpus shape summary"""
    n_students: int
    n_topics: int
    max_sessions_per_student: int
    n_records: int

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)


def _parse_seconds(value: str, field: str, row: int) -> float:
    try:
        seconds = float(value)
    except ValueError:
        raise EventLogError(row, f"{field} is not a number: '{value}'") from None
    if not math.isfinite(seconds):
        raise EventLogError(row, f"{field} must be finite, got '{value}'")
    return seconds


def _parse_row(values: Dict[str, str], row: int) -> EventRecord:
    """Turn one CSV row into a validated EventRecord"""
    user_id = values["user_id"].strip()
    session_id = values["session_id"].strip()
    topic_id = values["topic_id"].strip()
    if not user_id or not session_id or not topic_id:
        raise EventLogError(row, "user_id, session_id and topic_id must be non-empty")

    try:
        kind = ActivityKind(values["kind"].strip().lower())
    except ValueError:
        raise EventLogError(row, f"unknown activity kind '{values['kind']}'") from None

    start = _parse_seconds(values["start"].strip(), "start", row)
    duration = _parse_seconds(values["duration"].strip(), "duration", row)
    if duration < 0:
        raise EventValidationError(row, f"negative duration {values['duration']}")

    raw_outcome = values["outcome"].strip().lower()
    try:
        outcome = Outcome(raw_outcome) if raw_outcome else Outcome.NONE
    except ValueError:
        raise EventLogError(row, f"unknown outcome '{values['outcome']}'") from None

    if kind is ActivityKind.PARAMETERIZED_EXERCISE and outcome is Outcome.NONE:
        raise EventValidationError(row, "parameterized_exercise requires a pass/fail outcome")
    if kind is not ActivityKind.PARAMETERIZED_EXERCISE and outcome is not Outcome.NONE:
        raise EventValidationError(row, f"outcome '{outcome.value}' on non-exercise kind '{kind.value}'")

    # sub-second precision is truncated
    return EventRecord(user_id, session_id, topic_id, kind, int(start), int(duration), outcome)


def _read_text(source: Source) -> str:
    if hasattr(source, "read"):
        data = source.read()
    else:
        data = Path(source).read_bytes()
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        line = data[:e.start].count(b"\n") + 1
        raise EventLogError(line, f"invalid UTF-8 at byte {e.start}") from None


def _data_lines(text: str) -> List[int]:
    """Check the header and field counts, returning the file line of each data row"""
    reader = csv.reader(io.StringIO(text), skipinitialspace=True)
    lines: List[int] = []
    header_seen = False
    try:
        for fields in reader:
            if not fields:
                continue
            if not header_seen:
                header = [f.strip() for f in fields]
                if header != COLUMNS:
                    raise EventLogError(
                        reader.line_num, f"expected header {','.join(COLUMNS)}, got {','.join(header)}"
                    )
                header_seen = True
                continue
            if len(fields) != len(COLUMNS):
                raise EventLogError(reader.line_num, f"expected {len(COLUMNS)} fields, got {len(fields)}")
            lines.append(reader.line_num)
    except csv.Error as e:
        raise EventLogError(reader.line_num, f"malformed CSV: {e}") from None
    if not header_seen:
        raise EventLogError(1, "empty input, header row expected")
    return lines


def parse_event_log(source: Source) -> List[EventRecord]:
    """Parse a UTF-8 CSV event log into records, in file order

    Row numbers in errors are file lines, header = line 1, blank lines counted.
    """
    text = _read_text(source)
    lines = _data_lines(text)
    if not lines:
        return []

    try:
        frame = pd.read_csv(
            io.StringIO(text),
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            skipinitialspace=True,
        )
    except pd.errors.ParserError as e:
        raise EventLogError(_parser_error_line(str(e)), f"malformed CSV: {e}") from None
    frame.columns = COLUMNS

    records = [
        _parse_row(values, row=line)
        for line, values in zip(lines, frame.to_dict(orient="records"))
    ]
    logger.info("parsed %d event records", len(records))
    return records


def _parser_error_line(message: str) -> int:
    """Pull the line number out of a pandas tokenizer message"""
    marker = "line "
    if marker in message:
        digits = message.split(marker, 1)[1].split(",")[0].split()[0]
        if digits.isdigit():
            return int(digits)
    return 0


def records_frame(records: Iterable[EventRecord]) -> pd.DataFrame:
    """Records as a DataFrame in the canonical column order"""
    rows = [
        {
            "user_id": r.user_id,
            "session_id": r.session_id,
            "topic_id": r.topic_id,
            "kind": r.kind.value,
            "start": r.start,
            "duration": r.duration,
            "outcome": "" if r.outcome is Outcome.NONE else r.outcome.value,
        }
        for r in records
    ]
    return pd.DataFrame(rows, columns=COLUMNS)


def write_event_log(records: Iterable[EventRecord], path: Union[str, Path]) -> None:
    """Serialize records to the CSV format accepted by parse_event_log"""
    records_frame(records).to_csv(path, index=False, lineterminator="\n")


def dataset_stats(records: Iterable[EventRecord]) -> DatasetStats:
    """Count students, topics, records and the largest per-student session count"""
    users: Set[str] = set()
    topics: Set[str] = set()
    sessions: Dict[str, Set[str]] = {}
    n_records = 0

    for record in records:
        n_records += 1
        users.add(record.user_id)
        topics.add(record.topic_id)
        sessions.setdefault(record.user_id, set()).add(record.session_id)

    max_sessions = max((len(s) for s in sessions.values()), default=0)
    return DatasetStats(len(users), len(topics), max_sessions, n_records)


def write_stats(stats: DatasetStats, path: Union[str, Path]) -> None:
    """Write dataset stats as a JSON object"""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(stats.to_dict(), f, indent=2, sort_keys=False)
        f.write("\n")
