"""Directional thematic similarity over the domain ontology.

The first argument of every comparison is the document side, the second the
query side: ``keyword_sim(doc_kw, query_kw)`` measures how well the document
term satisfies the query term, which is not symmetric.
"""

from __future__ import annotations

import logging
import math
from typing import Iterable, Sequence

from .errors import UnknownConceptError
from .fuzzy import NO_EVIDENCE, Score, fuzzy_eval
from .kb import Normalization, Ontology, OntologyWeights
from .propositions import PropExpr, ThematicAtom

log = logging.getLogger(__name__)


def similarity_from_distance(td: float, md: float, normalization: Normalization) -> float:
    if math.isinf(td):
        return 0.0
    if normalization is Normalization.LINEAR:
        if md <= 0.0:
            return 1.0 if td == 0.0 else 0.0
        return min(1.0, max(0.0, 1.0 - td / md))
    return 1.0 / (1.0 + math.log1p(td))


class ThematicSimilarity:
    """Keyword and keyword-set similarity bound to one ontology and weight set."""

    def __init__(self, ontology: Ontology, weights: OntologyWeights | None = None):
        self.ontology = ontology
        self.weights = weights or OntologyWeights()
        self._doc_ids: dict[str, str | None] = {}

    @property
    def max_distance(self) -> float:
        if self.weights.max_distance is not None:
            return self.weights.max_distance
        return self.ontology.max_distance(self.weights)

    def concept_sim(self, a: str, b: str) -> float:
        """Similarity between two concept ids; unreachable pairs score 0."""
        td = self.ontology.distances_from(a, self.weights).get(b, math.inf)
        return similarity_from_distance(td, self.max_distance, self.weights.normalization)

    def keyword_sim(self, a: str, b: str) -> float:
        """h(a, b) with both keywords resolved strictly."""
        return self.concept_sim(self.ontology.resolve(a), self.ontology.resolve(b))

    def resolve_document_keyword(self, keyword: str) -> str | None:
        if keyword not in self._doc_ids:
            try:
                self._doc_ids[keyword] = self.ontology.resolve(keyword)
            except UnknownConceptError:
                log.warning("document keyword %r is not in the ontology; it scores 0", keyword)
                self._doc_ids[keyword] = None
        return self._doc_ids[keyword]

    def member_scores(self, X: Iterable[ThematicAtom | str], query_keyword: str) -> list[float]:
        target = self.ontology.resolve(query_keyword)
        scores = []
        for x in X:
            cid = self.resolve_document_keyword(x.keyword if isinstance(x, ThematicAtom) else x)
            scores.append(0.0 if cid is None else self.concept_sim(cid, target))
        return scores

    def set_vs_atom(self, X: Sequence[ThematicAtom | str], atom: ThematicAtom | str,
                    negated: bool = False) -> float:
        """Disjunctive keyword set against one (possibly negated) query keyword.

        Positive: the best member.  Negated: one minus the worst member.  An
        empty set scores 0.
        """
        if not X:
            return 0.0
        kw = atom.keyword if isinstance(atom, ThematicAtom) else atom
        scores = self.member_scores(X, kw)
        return 1.0 - min(scores) if negated else max(scores)

    def unit_vs_query(self, X: Sequence[ThematicAtom | str], H: PropExpr) -> Score:
        if not X:
            return NO_EVIDENCE
        value = fuzzy_eval(
            H,
            lambda a: self.set_vs_atom(X, a),
            lambda a: self.set_vs_atom(X, a, negated=True),
        )
        return Score(value)


def keyword_sim(ont: Ontology, w: OntologyWeights, a: str, b: str) -> float:
    return ThematicSimilarity(ont, w).keyword_sim(a, b)


def theme_set_vs_atom(ont: Ontology, w: OntologyWeights, X: Sequence[str], a: str,
                      negated: bool = False) -> float:
    return ThematicSimilarity(ont, w).set_vs_atom(X, a, negated)


def theme_unit_vs_query(ont: Ontology, w: OntologyWeights, X: Sequence[str], H: PropExpr) -> Score:
    return ThematicSimilarity(ont, w).unit_vs_query(X, H)
