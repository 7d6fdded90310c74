"""Qualitative geographic information retrieval.

Documents and queries are propositional (theme, geo) information units.
Units are scored with max-min fuzzy similarity over a domain ontology and a
gazetteer, and per-unit scores are fused into a document score with
Dempster's rule of combination.
"""

from .config import EngineConfig, load_config
from .kb import Gazetteer, Ontology, OntologyWeights, load_gazetteer, load_ontology
from .propositions import Document, InformationUnit, Query, parse_query
from .ranking import DocScore, Engine, rank_corpus

__version__ = "0.1.0"

__all__ = [
    "DocScore",
    "Document",
    "Engine",
    "EngineConfig",
    "Gazetteer",
    "InformationUnit",
    "Ontology",
    "OntologyWeights",
    "Query",
    "load_config",
    "load_gazetteer",
    "load_ontology",
    "parse_query",
    "rank_corpus",
]
