"""
Sequential pattern mining for behaviorprint
SPAM-style depth-first search over vertical bitmaps with support,
gap and length constraints, plus a brute-force oracle
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import pandas as pd
from joblib import Parallel, delayed

from .errors import ConfigError
from .sequencer import LabeledSequence

logger = logging.getLogger(__name__)

Items = Tuple[str, ...]


@dataclass(frozen=True)
class SequenceDatabase:
    """Sequences to mine, keyed by a unique id"""
    sequences: Tuple[Tuple[int, Items], ...]

    def __post_init__(self):
        ids = [sid for sid, _ in self.sequences]
        if len(set(ids)) != len(ids):
            raise ValueError("sequence ids must be unique")
        if any(len(items) == 0 for _, items in self.sequences):
            raise ValueError("sequences must be non-empty")

    @classmethod
    def from_lists(cls, sequences: Iterable[Sequence[str]]) -> "SequenceDatabase":
        return cls(tuple((i, tuple(items)) for i, items in enumerate(sequences)))

    @classmethod
    def from_labeled(cls, seqs: Iterable[LabeledSequence]) -> "SequenceDatabase":
        return cls.from_lists([label.value for label in s.labels] for s in seqs)

    def __len__(self) -> int:
        return len(self.sequences)


@dataclass(frozen=True)
class MiningParams:
    """Support, gap and length constraints; None means unbounded"""
    minsup: float = 0.04
    maxgap: Optional[int] = 1
    minlen: int = 2
    maxlen: Optional[int] = None

    def validate(self) -> "MiningParams":
        if not 0 < self.minsup <= 1:
            raise ConfigError("minsup", f"must be in (0, 1], got {self.minsup}")
        if self.maxgap is not None and self.maxgap < 1:
            raise ConfigError("maxgap", f"must be a positive integer or unbounded, got {self.maxgap}")
        if self.minlen < 1:
            raise ConfigError("minlen", f"must be >= 1, got {self.minlen}")
        if self.maxlen is not None and self.maxlen < self.minlen:
            raise ConfigError("maxlen", f"must be >= minlen ({self.minlen}), got {self.maxlen}")
        return self


@dataclass(frozen=True)
class Pattern:
    """A frequent sequence of labels with its sequence-level support"""
    items: Items
    count: int
    support: float

    def render(self) -> str:
        return " ".join(self.items)


def min_support_count(minsup: float, n_sequences: int) -> int:
    """Absolute threshold ceil(minsup * n); the small slack absorbs float error like 0.1 * 30"""
    return max(1, math.ceil(minsup * n_sequences - 1e-9))


def _ordered(patterns: Iterable[Pattern]) -> List[Pattern]:
    return sorted(patterns, key=lambda p: (-p.count, p.items))


@dataclass(frozen=True)
class BitmapLayout:
    """
    Bit positions of every sequence in one shared bit space.

    Sequence s occupies bits offsets[s] .. offsets[s] + lengths[s] - 1, position j
    (1-indexed) of the sequence living at offsets[s] + j - 1.
    """
    lengths: Tuple[int, ...]
    offsets: Tuple[int, ...]
    sequence_masks: Tuple[int, ...]
    starts_mask: int
    full_mask: int

    @classmethod
    def for_lengths(cls, lengths: Sequence[int]) -> "BitmapLayout":
        offsets, masks = [], []
        starts_mask = 0
        offset = 0
        for length in lengths:
            offsets.append(offset)
            masks.append(((1 << length) - 1) << offset)
            starts_mask |= 1 << offset
            offset += length
        return cls(tuple(lengths), tuple(offsets), tuple(masks), starts_mask, (1 << offset) - 1)

    @property
    def max_length(self) -> int:
        return max(self.lengths, default=0)


@dataclass(frozen=True)
class VerticalBitmap:
    """Bits over all sequences; a set bit marks a match ending at that position"""
    layout: BitmapLayout
    bits: int = 0

    def __and__(self, other: "VerticalBitmap") -> "VerticalBitmap":
        return VerticalBitmap(self.layout, self.bits & other.bits)

    def sequence_bits(self, s: int) -> str:
        """Bits of sequence s rendered left-to-right by position"""
        length = self.layout.lengths[s]
        chunk = (self.bits >> self.layout.offsets[s]) & ((1 << length) - 1)
        return "".join("1" if chunk >> j & 1 else "0" for j in range(length))

    def support_count(self) -> int:
        """Number of sequences with at least one set bit"""
        if not self.bits:
            return 0
        return sum(1 for mask in self.layout.sequence_masks if self.bits & mask)


def build_vertical_bitmaps(db: SequenceDatabase) -> Dict[str, VerticalBitmap]:
    """One bitmap per item: bit (s, j) set iff sequence s holds the item at position j"""
    layout = BitmapLayout.for_lengths([len(items) for _, items in db.sequences])
    bits: Dict[str, int] = {}
    for offset, (_, items) in zip(layout.offsets, db.sequences):
        for j, item in enumerate(items):
            bits[item] = bits.get(item, 0) | (1 << (offset + j))
    return {item: VerticalBitmap(layout, bits[item]) for item in sorted(bits)}


def s_step(prefix: VerticalBitmap, maxgap: Optional[int]) -> VerticalBitmap:
    """
    Sequence-extension transform.

    From every set bit at position j mark positions j+1 .. j+maxgap within the
    same sequence; the original bits are cleared. Unbounded maxgap marks every
    later position.
    """
    layout = prefix.layout
    steps = layout.max_length if maxgap is None else maxgap
    keep = layout.full_mask & ~layout.starts_mask

    result = 0
    frontier = prefix.bits
    for _ in range(steps):
        # a shift past the last position lands on the next sequence's first bit, which is masked
        frontier = (frontier << 1) & keep
        if not frontier:
            break
        result |= frontier
    return VerticalBitmap(layout, result)


def _extend(
    prefix: Items,
    bitmap: VerticalBitmap,
    item_bitmaps: Dict[str, VerticalBitmap],
    params: MiningParams,
    threshold: int,
    n_sequences: int,
    found: List[Pattern],
) -> None:
    if params.maxlen is not None and len(prefix) >= params.maxlen:
        return

    candidates = s_step(bitmap, params.maxgap)
    if not candidates.bits:
        return

    for item, item_bitmap in item_bitmaps.items():
        extended = candidates & item_bitmap
        count = extended.support_count()
        if count < threshold:
            continue
        items = prefix + (item,)
        if len(items) >= params.minlen:
            found.append(Pattern(items, count, count / n_sequences))
        _extend(items, extended, item_bitmaps, params, threshold, n_sequences, found)


def _mine_root(
    item: str,
    item_bitmaps: Dict[str, VerticalBitmap],
    params: MiningParams,
    threshold: int,
    n_sequences: int,
) -> List[Pattern]:
    found: List[Pattern] = []
    root = item_bitmaps[item]
    count = root.support_count()
    if params.minlen <= 1:
        found.append(Pattern((item,), count, count / n_sequences))
    _extend((item,), root, item_bitmaps, params, threshold, n_sequences, found)
    return found


def mine(db: SequenceDatabase, params: MiningParams, n_jobs: int = 1) -> List[Pattern]:
    """
    Frequent patterns with length in [minlen, maxlen] and support >= minsup.

    Root items are searched independently (in parallel with n_jobs != 1); the
    merged result is ordered by descending support, then items.
    """
    params.validate()
    if len(db) == 0:
        return []

    n = len(db)
    threshold = min_support_count(params.minsup, n)
    item_bitmaps = build_vertical_bitmaps(db)
    roots = [item for item, bitmap in item_bitmaps.items() if bitmap.support_count() >= threshold]
    logger.debug("mining %d sequences, threshold %d, %d frequent items", n, threshold, len(roots))

    if n_jobs == 1:
        branches = [_mine_root(item, item_bitmaps, params, threshold, n) for item in roots]
    else:
        branches = Parallel(n_jobs=n_jobs)(
            delayed(_mine_root)(item, item_bitmaps, params, threshold, n) for item in roots
        )

    patterns = _ordered(p for branch in branches for p in branch)
    logger.info("mined %d patterns (minsup=%s, maxgap=%s, minlen=%d)",
                len(patterns), params.minsup, params.maxgap, params.minlen)
    return patterns


def _occurring(items: Items, maxgap: Optional[int], maxlen: int) -> Set[Items]:
    """Every pattern with a gap-respecting occurrence in one sequence, by position enumeration"""
    found: Set[Items] = set()
    n = len(items)

    def walk(pos: int, pattern: Items) -> None:
        found.add(pattern)
        if len(pattern) == maxlen:
            return
        last = n - 1 if maxgap is None else min(n - 1, pos + maxgap)
        for nxt in range(pos + 1, last + 1):
            walk(nxt, pattern + (items[nxt],))

    for start in range(n):
        walk(start, (items[start],))
    return found


def brute_force_mine(db: SequenceDatabase, params: MiningParams) -> List[Pattern]:
    """
    Reference miner for small databases.

    Collects, per sequence, every label list with a gap-respecting occurrence and
    counts containing sequences directly; same contract as mine.
    """
    params.validate()
    if len(db) == 0:
        return []

    n = len(db)
    threshold = min_support_count(params.minsup, n)
    maxlen = params.maxlen if params.maxlen is not None else max(len(items) for _, items in db.sequences)

    counts: Counter = Counter()
    for _, items in db.sequences:
        counts.update(_occurring(items, params.maxgap, maxlen))

    return _ordered(
        Pattern(items, count, count / n)
        for items, count in counts.items()
        if count >= threshold and len(items) >= params.minlen
    )


def write_patterns(patterns: Iterable[Pattern], path: Union[str, Path]) -> None:
    """Export patterns as pattern,support with six fractional digits"""
    frame = pd.DataFrame(
        [(p.render(), f"{p.support:.6f}") for p in patterns],
        columns=["pattern", "support"],
    )
    frame.to_csv(path, index=False, lineterminator="\n")
