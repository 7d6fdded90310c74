"""Engine configuration: one JSON file with explicit defaults for every coefficient."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError
from .kb import Level, Normalization, OntologyWeights
from .propositions import DEFAULT_PREDICATES
from .sim_spatial import PredicateTable, SpatialCoefficients, SurrogateTable


class Combination(str, enum.Enum):
    GEOMETRIC = "GEOMETRIC"
    ARITHMETIC = "ARITHMETIC"
    PRODUCT = "PRODUCT"
    WEIGHTED = "WEIGHTED"


class Scorer(str, enum.Enum):
    BEL_T = "BEL_T"
    BELIEF_RATIO = "BELIEF_RATIO"  # Bel(T) / Bel(F)
    LOG_BELIEF_RATIO = "LOG_BELIEF_RATIO"  # 1 - 1 / ln(e + Bel(T) / Bel(F))


class Overlap(str, enum.Enum):
    JACCARD = "JACCARD"
    QUERY_NORMALIZED = "QUERY_NORMALIZED"


@dataclass(frozen=True)
class UnitCombination:
    method: Combination = Combination.GEOMETRIC
    theme_weight: float = 0.5  # WEIGHTED only; the geo weight is 1 - theme_weight

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", Combination(self.method))
        if not 0.0 <= self.theme_weight <= 1.0:
            raise ValueError(f"theme_weight must lie in [0, 1], got {self.theme_weight}")


@dataclass(frozen=True)
class Paths:
    ontology: Path
    gazetteer: Path
    corpus: Path | None = None
    index_dir: Path | None = None


@dataclass(frozen=True)
class EngineConfig:
    paths: Paths | None = None
    weights: OntologyWeights = OntologyWeights()
    spatial: SpatialCoefficients = SpatialCoefficients()
    predicates: PredicateTable = field(default_factory=PredicateTable)
    combination: UnitCombination = UnitCombination()
    scorer: Scorer = Scorer.BEL_T
    ratio_epsilon: float = 1e-6
    baseline_overlap: Overlap = Overlap.JACCARD
    candidate_floor: float | None = None
    max_unresolved_fraction: float = 0.5

    def __post_init__(self) -> None:
        object.__setattr__(self, "scorer", Scorer(self.scorer))
        object.__setattr__(self, "baseline_overlap", Overlap(self.baseline_overlap))
        if self.ratio_epsilon <= 0:
            raise ValueError("ratio epsilon must be positive")
        if not 0.0 <= self.max_unresolved_fraction <= 1.0:
            raise ValueError("max_unresolved_fraction must lie in [0, 1]")


_SECTIONS = {
    "paths": {"ontology", "gazetteer", "corpus", "index_dir"},
    "ontology_weights": {"w_nt", "w_bt", "w_rt", "max_distance", "normalization"},
    "spatial": {"alpha", "beta", "gamma_sibling", "b_loc", "w_g", "w_h", "large_extent_levels", "surrogate"},
    "predicates": {"lexicon", "default_compat", "compat"},
    "unit_combination": {"method", "theme_weight"},
    "scorer": {"kind", "epsilon"},
    "baseline": {"overlap"},
    "ranking": {"candidate_floor"},
    "index": {"max_unresolved_fraction"},
}


def _section(data: Mapping[str, Any], name: str) -> dict[str, Any]:
    sec = data.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    unknown = set(sec) - _SECTIONS[name]
    if unknown:
        raise ConfigError(f"unknown keys in config section {name!r}: {sorted(unknown)}")
    return sec


def config_from_dict(data: Mapping[str, Any], base_dir: Path | None = None,
                     check_paths: bool = True) -> EngineConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    try:
        paths = _paths(_section(data, "paths"), base_dir, check_paths) if "paths" in data else None

        ow = _section(data, "ontology_weights")
        weights = OntologyWeights(**{**ow, "normalization": Normalization(ow.get("normalization", "LOG"))})

        sp = dict(_section(data, "spatial"))
        surrogate = sp.pop("surrogate", {})
        if not isinstance(surrogate, dict):
            raise ConfigError("spatial.surrogate must be an object")
        if "large_extent_levels" in sp:
            sp["large_extent_levels"] = frozenset(Level[str(v).upper()] for v in sp["large_extent_levels"])
        spatial = SpatialCoefficients(**sp, surrogate=SurrogateTable(**surrogate))

        pr = _section(data, "predicates")
        lexicon = frozenset(pr.get("lexicon", DEFAULT_PREDICATES))
        pairs = PredicateTable().pairs if "compat" not in pr else {}
        for entry in pr.get("compat", []):
            if not (isinstance(entry, list) and len(entry) == 3):
                raise ConfigError(f"predicates.compat entries must be [doc_pred, query_pred, value]: {entry!r}")
            pairs[(entry[0], entry[1])] = float(entry[2])
        predicates = PredicateTable(lexicon, float(pr.get("default_compat", 0.5)), pairs)

        combination = UnitCombination(**_section(data, "unit_combination"))
        sc = _section(data, "scorer")
        floor = _section(data, "ranking").get("candidate_floor")
        return EngineConfig(
            paths=paths,
            weights=weights,
            spatial=spatial,
            predicates=predicates,
            combination=combination,
            scorer=Scorer(sc.get("kind", "BEL_T")),
            ratio_epsilon=float(sc.get("epsilon", 1e-6)),
            baseline_overlap=Overlap(_section(data, "baseline").get("overlap", "JACCARD")),
            candidate_floor=None if floor is None else float(floor),
            max_unresolved_fraction=float(
                _section(data, "index").get("max_unresolved_fraction", 0.5)
            ),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def _paths(sec: Mapping[str, Any], base_dir: Path | None, check: bool) -> Paths:
    def resolve(key: str, required: bool, must_exist: bool) -> Path | None:
        value = sec.get(key)
        if value is None:
            if required:
                raise ConfigError(f"paths.{key} is required")
            return None
        p = Path(value)
        if base_dir is not None and not p.is_absolute():
            p = base_dir / p
        if check and must_exist and not p.exists():
            raise ConfigError(f"paths.{key} does not exist: {p}")
        return p

    return Paths(
        ontology=resolve("ontology", True, True),
        gazetteer=resolve("gazetteer", True, True),
        corpus=resolve("corpus", False, True),
        index_dir=resolve("index_dir", False, False),
    )


def load_config(path: str | Path, check_paths: bool = True) -> EngineConfig:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: JSON parse error: {exc}") from None
    return config_from_dict(data, path.parent, check_paths)


def default_config_dict() -> dict[str, Any]:
    """Every coefficient at its default, in config-file form."""
    return {
        "ontology_weights": {"w_nt": 0.4, "w_bt": 0.6, "w_rt": 0.8, "max_distance": None,
                             "normalization": "LOG"},
        "spatial": {"alpha": 1.0, "beta": 1.0, "gamma_sibling": 1.0, "b_loc": 0.5,
                    "w_g": 0.6, "w_h": 0.4, "large_extent_levels": ["COUNTRY", "PROVINCE"],
                    "surrogate": {"adjacent": 0.6, "sibling_disjoint": 0.4, "other": 0.2}},
        "predicates": {"lexicon": sorted(DEFAULT_PREDICATES), "default_compat": 0.5,
                       "compat": [["NORTH_OF", "SOUTH_OF", 0.0], ["EAST_OF", "WEST_OF", 0.0]]},
        "unit_combination": {"method": "GEOMETRIC", "theme_weight": 0.5},
        "scorer": {"kind": "BEL_T", "epsilon": 1e-6},
        "baseline": {"overlap": "JACCARD"},
        "ranking": {"candidate_floor": None},
        "index": {"max_unresolved_fraction": 0.5},
    }
