import json

import pytest

from conftest import DESK
from qgir.config import EngineConfig, Scorer, config_from_dict, default_config_dict, load_config
from qgir.errors import ConfigError
from qgir.kb import Normalization


def test_defaults_match_engine_defaults():
    assert config_from_dict(default_config_dict()) == EngineConfig()


def test_desk_config_resolves_relative_paths():
    cfg = load_config(DESK / "engine.json")
    assert cfg.paths.ontology == DESK / "ontology.json"
    assert cfg.paths.corpus.exists()
    assert cfg.weights.normalization is Normalization.LOG
    assert cfg.scorer is Scorer.BEL_T
    assert cfg.candidate_floor is None


@pytest.mark.parametrize("patch", [
    {"colour": {}},
    {"spatial": {"b_loc": 0.5, "bogus": 1}},
    {"ontology_weights": {"w_nt": 0.7}},
    {"spatial": {"w_g": 0.9}},
    {"scorer": {"kind": "MAGIC"}},
    {"predicates": {"compat": [["IN", "NEAR"]]}},
    {"predicates": {"compat": [["IN", "BESIDE", 0.2]]}},
    {"spatial": []},
])
def test_invalid_configs_fail_fast(patch):
    with pytest.raises(ConfigError):
        config_from_dict({**default_config_dict(), **patch})


def test_missing_referenced_file(tmp_path):
    p = tmp_path / "engine.json"
    p.write_text(json.dumps({"paths": {"ontology": "nope.json", "gazetteer": "nope.json"}}))
    with pytest.raises(ConfigError, match="does not exist"):
        load_config(p)
    assert load_config(p, check_paths=False).paths.ontology == tmp_path / "nope.json"


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ConfigError, match="JSON"):
        load_config(tmp_path / "bad.json")


def test_custom_compat_replaces_defaults():
    cfg = config_from_dict({"predicates": {"compat": [["IN", "NEAR", 0.8]], "default_compat": 0.1}})
    assert cfg.predicates.compat("NEAR", "IN") == 0.8
    assert cfg.predicates.compat("NORTH_OF", "SOUTH_OF") == 0.1
