import json
import math
from argparse import Namespace

import pytest

from src.config import RunConfig, init_config
from src.errors import ConfigError
from src.miner import MiningParams
from src.sequencer import BoundaryConfig


def namespace(**values):
    base = {name: None for name in RunConfig.field_names()}
    base.update(config=None, unbounded_gap=False)
    base.update(values)
    return Namespace(**base)


def test_defaults():
    config = RunConfig().validate()
    assert config.mining_params() == MiningParams(minsup=0.04, maxgap=1, minlen=2, maxlen=None)
    assert config.boundary_config() == BoundaryConfig()
    assert config.epsilon == 0.0001
    assert config.k == 2
    assert config.measures == ["js_divergence", "cosine_distance"]
    assert config.log_base_value == 2.0


@pytest.mark.parametrize("values, field", [
    ({"minsup": 1.01}, "minsup"),
    ({"minsup": 0.0}, "minsup"),
    ({"maxgap": 0}, "maxgap"),
    ({"minlen": 0}, "minlen"),
    ({"maxlen": 1}, "maxlen"),
    ({"epsilon": 0.0}, "epsilon"),
    ({"k": 0}, "k"),
    ({"n_jobs": 0}, "n_jobs"),
    ({"top": -1}, "top"),
    ({"example_casing": "upper"}, "example_casing"),
    ({"gap_reference": "clock"}, "gap_reference"),
    ({"other_pairing": "both"}, "other_pairing"),
    ({"log_base": "10"}, "log_base"),
    ({"measures": []}, "measures"),
    ({"measures": ["euclidean"]}, "measures"),
])
def test_validation_names_the_field(values, field):
    with pytest.raises(ConfigError) as excinfo:
        RunConfig(**values).validate()
    assert excinfo.value.field == field


def test_unknown_key():
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.from_dict({"min_support": 0.1})
    assert excinfo.value.field == "min_support"


def test_from_dict_normalizes_values():
    config = RunConfig.from_dict({"log_base": 2, "measures": "cosine_distance, js_divergence"})
    assert config.log_base == "2"
    assert config.measures == ["cosine_distance", "js_divergence"]


@pytest.mark.parametrize("values, field", [
    ({"k": "two"}, "k"),
    ({"k": True}, "k"),
    ({"minsup": "lots"}, "minsup"),
    ({"epsilon": float("nan")}, "epsilon"),
    ({"maxgap": [1]}, "maxgap"),
    ({"require_mixed_activity": "yes please"}, "require_mixed_activity"),
    ({"gap_reference": 3}, "gap_reference"),
    ({"measures": [1, 2]}, "measures"),
])
def test_from_dict_rejects_wrong_types(values, field):
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.from_dict(values)
    assert excinfo.value.field == field


def test_from_dict_converts_numeric_text():
    config = RunConfig.from_dict({"epsilon": "1e-4", "k": "3", "minsup": 1, "maxgap": None})
    assert (config.epsilon, config.k, config.minsup, config.maxgap) == (0.0001, 3, 1.0, None)
    assert isinstance(config.minsup, float)


def test_invalid_yaml_is_a_config_error(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("k: [2\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        RunConfig.load_config(path)


def test_load_yaml(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("minsup: 0.1\nmaxgap: null\nlog_base: e\nrequire_mixed_activity: true\n", encoding="utf-8")
    config = RunConfig.load_config(path).validate()
    assert config.minsup == 0.1
    assert config.maxgap is None
    assert config.log_base_value == pytest.approx(math.e)
    assert config.boundary_config().require_mixed_activity


def test_load_manifest(tmp_path):
    original = RunConfig(input="events.csv", minsup=0.2, seed=42, maxlen=4)
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"version": "1.0.0", "config": original.to_dict(), "files": []}), encoding="utf-8")
    assert RunConfig.load_config(path) == original


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.load_config(tmp_path / "nope.yaml")


def test_config_must_be_a_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        RunConfig.load_config(path)


def test_flags_override_file(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("minsup: 0.1\nk: 3\nrequire_exercise_ending: true\n", encoding="utf-8")
    config = RunConfig.from_args(namespace(config=str(path), k=4, input="log.csv"))
    assert config.minsup == 0.1
    assert config.k == 4
    assert config.input == "log.csv"
    assert config.require_exercise_ending


def test_unset_flags_keep_defaults():
    config = RunConfig.from_args(namespace())
    assert config == RunConfig()


def test_unbounded_gap_flag():
    assert RunConfig.from_args(namespace(maxgap=3, unbounded_gap=True)).maxgap is None


def test_from_args_validates():
    with pytest.raises(ConfigError):
        RunConfig.from_args(namespace(minsup=1.01))


def test_init_config_round_trip(tmp_path):
    path = init_config(tmp_path / "behaviorprint.yaml")
    config = RunConfig.load_config(path).validate()
    assert config == RunConfig(input="events.csv")


def test_init_config_keeps_existing_file(tmp_path):
    path = tmp_path / "behaviorprint.yaml"
    path.write_text("k: 5\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        init_config(path)
    init_config(path, overwrite=True)
    assert RunConfig.load_config(path).k == 2
