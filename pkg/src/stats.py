"""
Distances, paired t-test and the split-half stability experiment
"""

import json
import logging
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.special import betainc
from scipy.stats import entropy

from .errors import ConfigError, InsufficientDataError, InvalidDistributionError
from .profiles import PatternVocabulary, build_profile, count_occurrences
from .sequencer import LabeledSequence

logger = logging.getLogger(__name__)

SUM_TOLERANCE = 1e-9
MEASURES = ("js_divergence", "cosine_distance")
PAIRINGS = ("cross", "whole")


def _as_distribution(p, name: str = "P") -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvalidDistributionError(f"{name} must be a non-empty vector")
    if np.any(p < 0):
        raise InvalidDistributionError(f"{name} has negative entries")
    if abs(p.sum() - 1.0) > SUM_TOLERANCE:
        raise InvalidDistributionError(f"{name} sums to {p.sum()}, expected 1")
    return p


def shannon_entropy(p, base: float = 2) -> float:
    """H(P) = -sum p log p; zero entries contribute nothing"""
    return float(entropy(_as_distribution(p), base=base))


def js_divergence(p, q, base: float = 2) -> float:
    """Jensen-Shannon divergence H(M) - (H(P) + H(Q)) / 2, bounded by 1 in base 2"""
    p = _as_distribution(p, "P")
    q = _as_distribution(q, "Q")
    if p.shape != q.shape:
        raise InvalidDistributionError(f"length mismatch: {p.size} vs {q.size}")

    m = (p + q) / 2
    value = entropy(m, base=base) - (entropy(p, base=base) + entropy(q, base=base)) / 2
    upper = np.log(2) / np.log(base)
    return float(min(max(value, 0.0), upper))


def cosine_distance(p, q) -> float:
    """1 - cos(P, Q)"""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise InvalidDistributionError(f"length mismatch: {p.size} vs {q.size}")

    norm_p = np.linalg.norm(p)
    norm_q = np.linalg.norm(q)
    if norm_p == 0 or norm_q == 0:
        raise InvalidDistributionError("cosine distance is undefined for a zero vector")
    return float(max(0.0, 1.0 - np.dot(p, q) / (norm_p * norm_q)))


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p: float


def paired_t_test(xs: Sequence[float], ys: Sequence[float]) -> TTestResult:
    """
    Paired-samples t-test on xs - ys with a two-sided p-value.

    The Student-t tail comes from the regularized incomplete beta function:
    p = I_{df/(df+t^2)}(df/2, 1/2).
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise InsufficientDataError(f"paired samples differ in length: {xs.size} vs {ys.size}")
    n = xs.size
    if n < 2:
        raise InsufficientDataError("paired t-test needs at least 2 pairs")

    d = xs - ys
    df = n - 1
    mean = d.mean()
    sd = d.std(ddof=1)

    if sd == 0:
        if mean == 0:
            return TTestResult(0.0, df, 1.0)
        return TTestResult(float(np.copysign(np.inf, mean)), df, 0.0)

    t = mean / (sd / np.sqrt(n))
    p = betainc(df / 2.0, 0.5, df / (df + t * t))
    return TTestResult(float(t), df, float(min(max(p, 0.0), 1.0)))


def user_seed(seed: int, user_id: str) -> np.random.SeedSequence:
    """RNG seed for one user, independent of processing order"""
    return np.random.SeedSequence([seed, zlib.crc32(user_id.encode("utf-8"))])


def split_halves(
    seqs: Sequence[LabeledSequence],
    seed: Union[int, np.random.SeedSequence],
) -> Tuple[List[LabeledSequence], List[LabeledSequence]]:
    """Seeded shuffle; the first ceil(n/2) sequences form half A"""
    n = len(seqs)
    if n < 2:
        raise InsufficientDataError(f"cannot split {n} sequence(s) into two halves")

    order = np.random.default_rng(seed).permutation(n)
    cut = (n + 1) // 2
    return [seqs[i] for i in order[:cut]], [seqs[i] for i in order[cut:]]


@dataclass(frozen=True)
class MeasureSummary:
    """Mean distances and paired t-test for one measure"""
    measure: str
    self_distance: float
    distance_to_other: float
    t: float
    df: int
    p: float

    def to_dict(self) -> Dict[str, Union[str, float, int]]:
        return {
            "measure": self.measure,
            "self_distance": round(self.self_distance, 6),
            "distance_to_other": round(self.distance_to_other, 6),
            "t": round(self.t, 6) if np.isfinite(self.t) else ("inf" if self.t > 0 else "-inf"),
            "df": self.df,
            "p": float(f"{self.p:.6g}"),
        }


@dataclass(frozen=True)
class UserDistances:
    user_id: str
    self_distance: Dict[str, float]
    distance_to_other: Dict[str, float]


@dataclass
class StabilityReport:
    summaries: Dict[str, MeasureSummary]
    rows: List[UserDistances]
    excluded: List[str] = field(default_factory=list)
    pairing: str = "cross"


def _measure_functions(measures: Sequence[str], log_base: float) -> Dict[str, Callable]:
    functions = {
        "js_divergence": lambda p, q: js_divergence(p, q, base=log_base),
        "cosine_distance": cosine_distance,
    }
    unknown = [m for m in measures if m not in functions]
    if unknown:
        raise ConfigError("measures", f"unknown measure(s) {', '.join(unknown)}")
    return {m: functions[m] for m in measures}


def _profile(seqs: Sequence[LabeledSequence], user_id: str, vocab: PatternVocabulary,
             maxgap: Optional[int], epsilon: float) -> np.ndarray:
    counts = count_occurrences(seqs, vocab, maxgap)
    return build_profile(counts.get(user_id, np.zeros(len(vocab))), epsilon)


def stability_experiment(
    per_user: Mapping[str, Sequence[LabeledSequence]],
    vocab: PatternVocabulary,
    maxgap: Optional[int],
    epsilon: float,
    seed: int,
    measures: Sequence[str] = MEASURES,
    log_base: float = 2,
    pairing: str = "cross",
) -> StabilityReport:
    """
    Split each user's sequences in two, profile both halves and compare the
    self-distance d(A_i, B_i) with the mean distance to other users.

    With pairing "cross" the other side is B_j; with "whole" it is the profile
    of all of user j's sequences.
    """
    if pairing not in PAIRINGS:
        raise ConfigError("other_pairing", f"expected one of {', '.join(PAIRINGS)}, got '{pairing}'")
    distance = _measure_functions(measures, log_base)

    halves_a: Dict[str, np.ndarray] = {}
    halves_b: Dict[str, np.ndarray] = {}
    others: Dict[str, np.ndarray] = {}
    excluded = []
    for user_id in sorted(per_user):
        seqs = per_user[user_id]
        try:
            half_a, half_b = split_halves(seqs, user_seed(seed, user_id))
        except InsufficientDataError:
            logger.warning("user %s has %d sequence(s); excluded from the stability experiment",
                           user_id, len(seqs))
            excluded.append(user_id)
            continue
        halves_a[user_id] = _profile(half_a, user_id, vocab, maxgap, epsilon)
        halves_b[user_id] = _profile(half_b, user_id, vocab, maxgap, epsilon)
        if pairing == "cross":
            others[user_id] = halves_b[user_id]
        else:
            others[user_id] = _profile(seqs, user_id, vocab, maxgap, epsilon)

    users = list(halves_a)
    if len(users) < 2:
        raise InsufficientDataError(f"stability experiment needs 2 eligible users, got {len(users)}")
    logger.info("stability experiment over %d users (%d excluded)", len(users), len(excluded))

    rows = []
    for user_id in users:
        a = halves_a[user_id]
        self_distance = {}
        to_other = {}
        for name, fn in distance.items():
            self_distance[name] = fn(a, halves_b[user_id])
            to_other[name] = float(np.mean([fn(a, others[j]) for j in users if j != user_id]))
        rows.append(UserDistances(user_id, self_distance, to_other))

    summaries = {}
    for name in distance:
        selfs = [r.self_distance[name] for r in rows]
        to_others = [r.distance_to_other[name] for r in rows]
        test = paired_t_test(selfs, to_others)
        summaries[name] = MeasureSummary(name, float(np.mean(selfs)), float(np.mean(to_others)),
                                         test.t, test.df, test.p)

    return StabilityReport(summaries, rows, excluded, pairing)


def write_stability_rows(report: StabilityReport, path: Union[str, Path]) -> None:
    """Per-user distances, one column pair per measure"""
    measures = list(report.summaries)
    columns = ["user_id"]
    for name in measures:
        columns += [f"{name}_self", f"{name}_other"]

    data = []
    for row in report.rows:
        values = [row.user_id]
        for name in measures:
            values += [row.self_distance[name], row.distance_to_other[name]]
        data.append(values)
    pd.DataFrame(data, columns=columns).to_csv(path, index=False, float_format="%.8f", lineterminator="\n")


def write_stability_summary(report: StabilityReport, path: Union[str, Path]) -> None:
    """Per-measure summary as JSON"""
    payload = {
        "pairing": report.pairing,
        "n_users": len(report.rows),
        "excluded_users": report.excluded,
        "measures": [s.to_dict() for s in report.summaries.values()],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")
