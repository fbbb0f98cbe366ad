"""
Per-user pattern profiles for behaviorprint
Counts pattern occurrences per user and turns them into smoothed distributions
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .errors import ConfigError, InsufficientDataError
from .miner import Items, Pattern
from .sequencer import LabeledSequence

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 0.0001


@dataclass(frozen=True)
class PatternVocabulary:
    """Mined patterns in a fixed order"""
    patterns: tuple

    def __post_init__(self):
        if len(set(self.patterns)) != len(self.patterns):
            raise ValueError("duplicate pattern in vocabulary")

    @classmethod
    def from_patterns(cls, patterns: Iterable[Pattern]) -> "PatternVocabulary":
        return cls(tuple(p.items for p in patterns))

    def __len__(self) -> int:
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def names(self) -> List[str]:
        return [" ".join(items) for items in self.patterns]


@dataclass(frozen=True)
class PatternProfile:
    """A user's smoothed, normalized pattern frequencies"""
    user_id: str
    weights: np.ndarray


def occurrences(items: Sequence[str], pattern: Items, maxgap: Optional[int]) -> int:
    """
    Number of gap-respecting position tuples of `pattern` in `items`.

    ways[j] holds the number of partial occurrences ending at position j;
    overlapping occurrences each count.
    """
    n = len(items)
    if not pattern or len(pattern) > n:
        return 0

    ways = [1 if item == pattern[0] else 0 for item in items]
    for symbol in pattern[1:]:
        nxt = [0] * n
        for j in range(n):
            if items[j] != symbol:
                continue
            lo = 0 if maxgap is None else max(0, j - maxgap)
            nxt[j] = sum(ways[lo:j])
        ways = nxt
    return sum(ways)


def count_occurrences(
    seqs: Iterable[LabeledSequence],
    vocab: PatternVocabulary,
    maxgap: Optional[int],
) -> Dict[str, np.ndarray]:
    """Total occurrences of every vocabulary pattern per user"""
    if len(vocab) == 0:
        raise InsufficientDataError("pattern vocabulary is empty")

    counts: Dict[str, np.ndarray] = {}
    for seq in seqs:
        items = [label.value for label in seq.labels]
        row = counts.setdefault(seq.user_id, np.zeros(len(vocab), dtype=np.int64))
        for v, pattern in enumerate(vocab):
            row[v] += occurrences(items, pattern, maxgap)
    return dict(sorted(counts.items()))


def build_profile(counts: np.ndarray, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Replace zero counts by epsilon, then normalize to sum 1"""
    counts = np.asarray(counts, dtype=float)
    if counts.size == 0:
        raise InsufficientDataError("cannot build a profile from an empty count vector")
    if epsilon <= 0:
        raise ConfigError("epsilon", f"must be positive, got {epsilon}")

    smoothed = np.where(counts == 0, epsilon, counts)
    return smoothed / smoothed.sum()


def build_profiles(
    per_user: Mapping[str, Sequence[LabeledSequence]],
    vocab: PatternVocabulary,
    maxgap: Optional[int],
    epsilon: float = DEFAULT_EPSILON,
) -> List[PatternProfile]:
    """Profiles for every user, in user order"""
    profiles = []
    for user_id in sorted(per_user):
        counts = count_occurrences(per_user[user_id], vocab, maxgap)
        row = counts.get(user_id, np.zeros(len(vocab), dtype=np.int64))
        profiles.append(PatternProfile(user_id, build_profile(row, epsilon)))
    logger.info("built %d profiles over %d patterns", len(profiles), len(vocab))
    return profiles


def profiles_frame(profiles: Iterable[PatternProfile], vocab: PatternVocabulary) -> pd.DataFrame:
    profiles = list(profiles)
    frame = pd.DataFrame(
        np.vstack([p.weights for p in profiles]) if profiles else np.empty((0, len(vocab))),
        columns=vocab.names(),
    )
    frame.insert(0, "user_id", [p.user_id for p in profiles])
    return frame


def write_profiles(profiles: Iterable[PatternProfile], vocab: PatternVocabulary, path: Union[str, Path]) -> None:
    """One row per user, one column per pattern in vocabulary order"""
    profiles_frame(profiles, vocab).to_csv(path, index=False, float_format="%.10f", lineterminator="\n")
