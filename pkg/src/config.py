"""
Configuration management for behaviorprint
Run parameters, YAML config files and command-line overrides
"""

import math
from argparse import Namespace
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union, get_args, get_origin, get_type_hints

import yaml

from .errors import ConfigError
from .miner import MiningParams
from .sequencer import CASINGS, GAP_REFERENCES, BoundaryConfig
from .stats import MEASURES, PAIRINGS

LOG_BASES = {"2": 2.0, "e": math.e}

DEFAULT_CONFIG_TEMPLATE = """\
# behaviorprint run configuration
# Every key is optional; command-line flags override the values below.

# input: path to the event-log CSV (user_id,session_id,topic_id,kind,start,duration,outcome)
input: events.csv
# output_dir: directory receiving every report file
output_dir: out

# Pattern mining
minsup: 0.04          # minimum support, fraction of sequences in (0, 1]
maxgap: 1             # 1 = consecutive positions only; null = unbounded
minlen: 2             # shortest pattern kept
maxlen: null          # longest pattern kept; null = unbounded
n_jobs: 1             # joblib workers for the root-item search; -1 = all cores

# Labeling and segmentation
example_casing: long_lower        # long_lower (long = ex) or long_upper (long = Ex)
require_gap_below_median: false   # split episodes at idle gaps >= the median
require_mixed_activity: false     # drop episodes with only examples or only exercises
require_exercise_ending: false    # drop episodes not ending with an exercise
gap_reference: gaps               # gaps (median idle gap) or activity_median

# Profiles and stability experiment
epsilon: 0.0001       # replaces zero pattern counts before normalizing
measures: [js_divergence, cosine_distance]
log_base: "2"         # "2" or "e" for the JS divergence
other_pairing: cross  # cross = other users' second halves; whole = their full profiles
seed: 0

# Clustering
k: 2

# Terminal summary
top: 15
"""


def load_yaml_mapping(path: Union[str, Path], field_name: str = "config") -> Dict[str, Any]:
    """Read a YAML file that must hold a key-value mapping"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(field_name, f"{path} is not valid YAML: {e}") from None
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(field_name, f"cannot read {path}: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError(field_name, f"{path} must hold a key-value mapping")
    return data


def coerce_value(name: str, value: Any, hint: Any) -> Any:
    """Check a parsed value against a dataclass field type; numeric strings are converted"""
    if get_origin(hint) is Union:
        if value is None:
            return None
        hint = next(arg for arg in get_args(hint) if arg is not type(None))

    if hint is bool:
        if isinstance(value, bool):
            return value
        raise ConfigError(name, f"expected true or false, got {value!r}")
    if hint is int:
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if isinstance(value, str):
            try:
                value = int(value.strip())
            except ValueError:
                pass
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        raise ConfigError(name, f"expected an integer, got {value!r}")
    if hint is float:
        if isinstance(value, str):
            try:
                value = float(value.strip())
            except ValueError:
                pass
        if isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value):
            return float(value)
        raise ConfigError(name, f"expected a finite number, got {value!r}")
    if hint is str:
        if isinstance(value, str):
            return value
        raise ConfigError(name, f"expected a string, got {value!r}")
    if get_origin(hint) is list:
        if isinstance(value, (list, tuple)) and all(isinstance(v, str) for v in value):
            return list(value)
        raise ConfigError(name, f"expected a list of strings, got {value!r}")
    return value


@dataclass
class RunConfig:
    """Every parameter of a pipeline run"""
    input: Optional[str] = None
    output_dir: str = "out"
    minsup: float = 0.04
    maxgap: Optional[int] = 1
    minlen: int = 2
    maxlen: Optional[int] = None
    epsilon: float = 0.0001
    require_gap_below_median: bool = False
    require_mixed_activity: bool = False
    require_exercise_ending: bool = False
    gap_reference: str = "gaps"
    example_casing: str = "long_lower"
    k: int = 2
    seed: int = 0
    measures: List[str] = field(default_factory=lambda: list(MEASURES))
    log_base: str = "2"
    other_pairing: str = "cross"
    n_jobs: int = 1
    top: int = 15

    @classmethod
    def field_names(cls) -> List[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """Build a config from a key-value mapping; unknown keys are rejected"""
        known = set(cls.field_names())
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown configuration key")
        values = dict(data)
        if "log_base" in values:
            values["log_base"] = str(values["log_base"])
        if "measures" in values and isinstance(values["measures"], str):
            values["measures"] = [m.strip() for m in values["measures"].split(",") if m.strip()]
        hints = get_type_hints(cls)
        return cls(**{name: coerce_value(name, value, hints[name]) for name, value in values.items()})

    @classmethod
    def load_config(cls, path: Union[str, Path]) -> "RunConfig":
        """Load configuration from a YAML (or JSON) file"""
        config_file = Path(path)
        if not config_file.exists():
            raise ConfigError("config", f"file not found: {config_file}")
        data = load_yaml_mapping(config_file)
        # a manifest nests the run values under "config"
        if "config" in data and isinstance(data["config"], dict):
            data = data["config"]
        return cls.from_dict(data)

    @classmethod
    def from_args(cls, args: Namespace) -> "RunConfig":
        """Defaults, then the --config file, then every flag that was given"""
        config = cls.load_config(args.config) if getattr(args, "config", None) else cls()
        for name in cls.field_names():
            value = getattr(args, name, None)
            if value is not None:
                setattr(config, name, value)
        if getattr(args, "unbounded_gap", False):
            config.maxgap = None
        return config.validate()

    def validate(self) -> "RunConfig":
        """Check every field before any work is done"""
        self.mining_params().validate()
        if self.epsilon <= 0:
            raise ConfigError("epsilon", f"must be positive, got {self.epsilon}")
        if self.k < 1:
            raise ConfigError("k", f"must be >= 1, got {self.k}")
        if self.n_jobs == 0 or self.n_jobs < -1:
            raise ConfigError("n_jobs", f"must be >= 1 or -1, got {self.n_jobs}")
        if self.top < 0:
            raise ConfigError("top", f"must be >= 0, got {self.top}")
        if self.example_casing not in CASINGS:
            raise ConfigError("example_casing", f"expected one of {', '.join(CASINGS)}")
        if self.gap_reference not in GAP_REFERENCES:
            raise ConfigError("gap_reference", f"expected one of {', '.join(GAP_REFERENCES)}")
        if self.other_pairing not in PAIRINGS:
            raise ConfigError("other_pairing", f"expected one of {', '.join(PAIRINGS)}")
        if self.log_base not in LOG_BASES:
            raise ConfigError("log_base", f"expected one of {', '.join(LOG_BASES)}")
        if not self.measures:
            raise ConfigError("measures", "at least one measure is required")
        unknown = [m for m in self.measures if m not in MEASURES]
        if unknown:
            raise ConfigError("measures", f"unknown measure(s) {', '.join(unknown)}")
        return self

    def mining_params(self) -> MiningParams:
        return MiningParams(self.minsup, self.maxgap, self.minlen, self.maxlen)

    def boundary_config(self) -> BoundaryConfig:
        return BoundaryConfig(
            require_gap_below_median=self.require_gap_below_median,
            require_mixed_activity=self.require_mixed_activity,
            require_exercise_ending=self.require_exercise_ending,
            gap_reference=self.gap_reference,
        )

    @property
    def log_base_value(self) -> float:
        return LOG_BASES[self.log_base]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def init_config(path: Union[str, Path], overwrite: bool = False) -> Path:
    """Write the documented default configuration file"""
    config_file = Path(path)
    if config_file.exists() and not overwrite:
        raise ConfigError("config", f"{config_file} already exists (use --force to replace it)")
    config_file.parent.mkdir(parents=True, exist_ok=True)
    config_file.write_text(DEFAULT_CONFIG_TEMPLATE, encoding="utf-8")
    return config_file
