"""
Synthetic cohort generator for behaviorprint
Seeded event logs with controllable per-user behavioral distinctness
"""

import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union, get_type_hints

import numpy as np

from .config import coerce_value, load_yaml_mapping
from .errors import ConfigError
from .ingest import ActivityKind, EventRecord, Outcome

logger = logging.getLogger(__name__)

KINDS = (
    ActivityKind.ANIMATED_EXAMPLE,
    ActivityKind.BASIC_EXAMPLE,
    ActivityKind.PARAMETERIZED_EXERCISE,
)
EXERCISE = KINDS.index(ActivityKind.PARAMETERIZED_EXERCISE)

ROW_TOLERANCE = 1e-9


@dataclass(frozen=True)
class BehaviorProfile:
    """
    First-order Markov chain over activity kinds with log-normal durations.

    Vectors and matrix rows follow KINDS order.
    """
    transition: Tuple[Tuple[float, ...], ...] = (
        (0.20, 0.40, 0.40),
        (0.15, 0.35, 0.50),
        (0.10, 0.20, 0.70),
    )
    initial: Tuple[float, ...] = (0.30, 0.40, 0.30)
    duration_median: Tuple[float, ...] = (90.0, 60.0, 45.0)
    duration_dispersion: Tuple[float, ...] = (0.5, 0.5, 0.5)
    pass_probability: float = 0.6

    def validate(self, prefix: str = "base") -> "BehaviorProfile":
        matrix = np.asarray(self.transition, dtype=float)
        if matrix.shape != (3, 3) or np.any(matrix < 0):
            raise ConfigError(f"{prefix}.transition", "must be a non-negative 3x3 matrix")
        if np.any(np.abs(matrix.sum(axis=1) - 1) > ROW_TOLERANCE):
            raise ConfigError(f"{prefix}.transition", "rows must sum to 1")
        initial = np.asarray(self.initial, dtype=float)
        if initial.shape != (3,) or np.any(initial < 0) or abs(initial.sum() - 1) > ROW_TOLERANCE:
            raise ConfigError(f"{prefix}.initial", "must be a distribution over 3 kinds")
        if len(self.duration_median) != 3 or min(self.duration_median) <= 0:
            raise ConfigError(f"{prefix}.duration_median", "needs 3 positive medians")
        if len(self.duration_dispersion) != 3 or min(self.duration_dispersion) <= 0:
            raise ConfigError(f"{prefix}.duration_dispersion", "needs 3 positive dispersions")
        if not 0 <= self.pass_probability <= 1:
            raise ConfigError(f"{prefix}.pass_probability", "must be in [0, 1]")
        return self


@dataclass(frozen=True)
class CohortSpec:
    """Shape of a synthetic cohort; ranges are inclusive (lo, hi)"""
    n_users: int = 44
    sessions: Tuple[int, int] = (3, 12)
    topics_per_session: Tuple[int, int] = (1, 3)
    activities_per_episode: Tuple[int, int] = (3, 10)
    n_topics: int = 21
    distinctness: float = 1.0
    mean_gap: float = 20.0
    session_spacing: int = 86400
    start_epoch: int = 1546300800
    base: BehaviorProfile = field(default_factory=BehaviorProfile)

    def validate(self) -> "CohortSpec":
        if self.n_users < 1:
            raise ConfigError("n_users", "must be >= 1")
        for name in ("sessions", "topics_per_session", "activities_per_episode"):
            lo, hi = getattr(self, name)
            if lo < 1 or hi < lo:
                raise ConfigError(name, f"range ({lo}, {hi}) is empty or non-positive")
        if self.n_topics < self.topics_per_session[1]:
            raise ConfigError("n_topics", "must cover the largest topics_per_session")
        if not 0 <= self.distinctness <= 1:
            raise ConfigError("distinctness", "must be in [0, 1]")
        if self.mean_gap <= 0:
            raise ConfigError("mean_gap", "must be positive")
        if self.session_spacing <= 0:
            raise ConfigError("session_spacing", "must be positive")
        self.base.validate()
        return self


def _sample_profile(rng: np.random.Generator, base: BehaviorProfile) -> BehaviorProfile:
    """An independent profile, far from the base in every component"""
    return BehaviorProfile(
        transition=tuple(tuple(row) for row in rng.dirichlet(np.full(3, 0.5), size=3)),
        initial=tuple(rng.dirichlet(np.full(3, 0.5))),
        duration_median=tuple(np.asarray(base.duration_median) * np.exp(rng.normal(0.0, 1.0, size=3))),
        duration_dispersion=base.duration_dispersion,
        pass_probability=float(rng.beta(0.7, 0.7)),
    )


def user_profile(base: BehaviorProfile, distinctness: float, rng: np.random.Generator) -> BehaviorProfile:
    """Interpolate between the shared base and an independently sampled profile"""
    if distinctness == 0:
        return base

    own = _sample_profile(rng, base)
    lam = distinctness
    transition = (1 - lam) * np.asarray(base.transition) + lam * np.asarray(own.transition)
    transition /= transition.sum(axis=1, keepdims=True)
    initial = (1 - lam) * np.asarray(base.initial) + lam * np.asarray(own.initial)
    initial /= initial.sum()
    log_median = (1 - lam) * np.log(base.duration_median) + lam * np.log(own.duration_median)

    return BehaviorProfile(
        transition=tuple(tuple(float(v) for v in row) for row in transition),
        initial=tuple(float(v) for v in initial),
        duration_median=tuple(float(v) for v in np.exp(log_median)),
        duration_dispersion=base.duration_dispersion,
        pass_probability=(1 - lam) * base.pass_probability + lam * own.pass_probability,
    )


def _user_records(spec: CohortSpec, index: int, profile: BehaviorProfile,
                  rng: np.random.Generator) -> List[EventRecord]:
    user_id = f"u{index + 1:03d}"
    transition = np.asarray(profile.transition)
    records = []

    n_sessions = int(rng.integers(spec.sessions[0], spec.sessions[1] + 1))
    for s in range(n_sessions):
        clock = spec.start_epoch + s * spec.session_spacing + int(rng.integers(0, 3600))
        n_topics = int(rng.integers(spec.topics_per_session[0], spec.topics_per_session[1] + 1))
        topics = sorted(rng.choice(spec.n_topics, size=n_topics, replace=False))

        for topic in topics:
            length = int(rng.integers(spec.activities_per_episode[0], spec.activities_per_episode[1] + 1))
            kind = int(rng.choice(3, p=profile.initial))
            for _ in range(length):
                sigma = profile.duration_dispersion[kind]
                duration = int(round(profile.duration_median[kind] * np.exp(rng.normal(0.0, sigma))))
                outcome = Outcome.NONE
                if kind == EXERCISE:
                    outcome = Outcome.PASS if rng.random() < profile.pass_probability else Outcome.FAIL
                records.append(EventRecord(
                    user_id=user_id,
                    session_id=f"s{s + 1:02d}",
                    topic_id=f"t{topic + 1:02d}",
                    kind=KINDS[kind],
                    start=clock,
                    duration=duration,
                    outcome=outcome,
                ))
                clock += duration + 1 + int(rng.exponential(spec.mean_gap))
                kind = int(rng.choice(3, p=transition[kind]))
    return records


def generate_cohort(spec: CohortSpec, seed: int) -> List[EventRecord]:
    """Event records for every user, each user drawn from its own (seed, index) stream"""
    spec.validate()
    records = []
    for index in range(spec.n_users):
        rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
        profile = user_profile(spec.base, spec.distinctness, rng)
        records.extend(_user_records(spec, index, profile, rng))

    logger.info("generated %d records for %d users (distinctness %.2f)",
                len(records), spec.n_users, spec.distinctness)
    return records


def _pair(value: Any, name: str) -> Tuple[int, int]:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return (coerce_value(name, value[0], int), coerce_value(name, value[1], int))
    if not isinstance(value, (list, tuple)):
        single = coerce_value(name, value, int)
        return (single, single)
    raise ConfigError(name, "expected an integer or a [lo, hi] pair")


def _numbers(value: Any, name: str) -> Tuple[float, ...]:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(name, f"expected a list of numbers, got {value!r}")
    return tuple(coerce_value(name, v, float) for v in value)


def _kind_vector(value: Any, name: str) -> Tuple[float, ...]:
    """Accept either a 3-list in KINDS order or a mapping keyed by kind name"""
    if isinstance(value, dict):
        unknown = set(value) - {k.value for k in KINDS}
        if unknown:
            raise ConfigError(name, f"unknown kind(s) {', '.join(sorted(unknown))}")
        try:
            return tuple(coerce_value(name, value[k.value], float) for k in KINDS)
        except KeyError as e:
            raise ConfigError(name, f"missing kind {e}") from None
    return _numbers(value, name)


def cohort_spec_from_dict(data: Dict[str, Any]) -> CohortSpec:
    """Build a CohortSpec from a parsed key-value mapping"""
    known = {f.name for f in fields(CohortSpec)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown cohort key")

    hints = get_type_hints(CohortSpec)
    values: Dict[str, Any] = {}
    for name, value in data.items():
        if name in ("sessions", "topics_per_session", "activities_per_episode"):
            values[name] = _pair(value, name)
        elif name != "base":
            values[name] = coerce_value(name, value, hints[name])

    if "base" in data:
        base_data = data["base"] or {}
        if not isinstance(base_data, dict):
            raise ConfigError("base", "must be a key-value mapping")
        base_known = {f.name for f in fields(BehaviorProfile)}
        base_unknown = set(base_data) - base_known
        if base_unknown:
            raise ConfigError(f"base.{sorted(base_unknown)[0]}", "unknown profile key")
        base = BehaviorProfile()
        if "transition" in base_data:
            rows = base_data["transition"]
            if not isinstance(rows, (list, tuple)):
                raise ConfigError("base.transition", "expected a 3x3 list of numbers")
            base = replace(base, transition=tuple(_numbers(row, "base.transition") for row in rows))
        for name in ("initial", "duration_median", "duration_dispersion"):
            if name in base_data:
                base = replace(base, **{name: _kind_vector(base_data[name], f"base.{name}")})
        if "pass_probability" in base_data:
            base = replace(base, pass_probability=coerce_value(
                "base.pass_probability", base_data["pass_probability"], float))
        values["base"] = base

    return CohortSpec(**values).validate()


def load_cohort_spec(path: Union[str, Path]) -> CohortSpec:
    """Read a cohort spec from a YAML key-value file"""
    return cohort_spec_from_dict(load_yaml_mapping(path, "cohort"))
