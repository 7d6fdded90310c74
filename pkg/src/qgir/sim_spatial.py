"""Semantic similarity between place names and geo propositions.

Place similarity fuses a conceptual part, computed from the gazetteer's
part-of hierarchy, with a locational part built from containment, centroid
proximity and sibling status.  When both places are large (province or
coarser by default) a topological surrogate table is used instead.

Orientation: ``place_sim(doc_place, query_place)``.  The locational part
treats the query place as the reference region, so containment asks
whether the document place lies inside the query place and the proximity
ratio is scaled by the query place's diagonal.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import AmbiguousPlaceError, UnknownPlaceError
from .fuzzy import NO_EVIDENCE, Score, fuzzy_eval
from .kb import Gazetteer, Level
from .propositions import DEFAULT_PREDICATES, EQ, GeoAtom, PropExpr

log = logging.getLogger(__name__)


def _unit_interval(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


@dataclass(frozen=True)
class SurrogateTable:
    """Scores for the large-extent branch; equality and containment are fixed."""

    adjacent: float = 0.6
    sibling_disjoint: float = 0.4
    other: float = 0.2

    def __post_init__(self) -> None:
        for name in ("adjacent", "sibling_disjoint", "other"):
            _unit_interval(name, getattr(self, name))


@dataclass(frozen=True)
class SpatialCoefficients:
    alpha: float = 1.0
    beta: float = 1.0
    gamma_sibling: float = 1.0
    b_loc: float = 0.5
    w_g: float = 0.6
    w_h: float = 0.4
    large_extent_levels: frozenset[Level] = frozenset({Level.COUNTRY, Level.PROVINCE})
    surrogate: SurrogateTable = SurrogateTable()

    def __post_init__(self) -> None:
        for name in ("b_loc", "w_g", "w_h"):
            _unit_interval(name, getattr(self, name))
        if not math.isclose(self.w_g + self.w_h, 1.0, abs_tol=1e-9):
            raise ValueError(f"w_g + w_h must equal 1, got {self.w_g} + {self.w_h}")
        object.__setattr__(
            self, "large_extent_levels", frozenset(Level[l] if isinstance(l, str) else Level(l)
                                                   for l in self.large_extent_levels)
        )


_OPPOSITES = (("NORTH_OF", "SOUTH_OF"), ("EAST_OF", "WEST_OF"))


@dataclass(frozen=True)
class PredicateTable:
    """Predicate lexicon plus the compatibility of document vs query predicates.

    Identical predicates and anything paired with EQ are fully compatible.
    Other pairs are looked up in both orders, falling back to ``default``.
    """

    lexicon: frozenset[str] = DEFAULT_PREDICATES
    default: float = 0.5
    pairs: Mapping[tuple[str, str], float] = field(
        default_factory=lambda: {pair: 0.0 for pair in _OPPOSITES}
    )

    def __post_init__(self) -> None:
        object.__setattr__(self, "lexicon", frozenset(self.lexicon) | {EQ})
        _unit_interval("default", self.default)
        for (a, b), v in self.pairs.items():
            if a not in self.lexicon or b not in self.lexicon:
                raise ValueError(f"compatibility pair ({a}, {b}) uses a predicate outside the lexicon")
            _unit_interval(f"compat({a}, {b})", v)

    def compat(self, doc_pred: str, query_pred: str) -> float:
        if doc_pred == query_pred or EQ in (doc_pred, query_pred):
            return 1.0
        if (doc_pred, query_pred) in self.pairs:
            return self.pairs[(doc_pred, query_pred)]
        return self.pairs.get((query_pred, doc_pred), self.default)


# ---------------------------------------------------------------------------
# place-level measures (arguments are place ids)
# ---------------------------------------------------------------------------


def conceptual_sim(gaz: Gazetteer, coeffs: SpatialCoefficients, p: str, o: str) -> float:
    """Depth-weighted distance between the part-of closures of two places."""
    p_up, o_up = set(gaz.part_of(p)), set(gaz.part_of(o))
    penalty = sum(coeffs.alpha / gaz[x].depth for x in p_up - o_up)
    penalty += sum(coeffs.beta / gaz[y].depth for y in o_up - p_up)
    if gaz.siblings(p, o):
        penalty += coeffs.gamma_sibling / gaz[p].depth + coeffs.gamma_sibling / gaz[o].depth
    return _clamp(1.0 - penalty)


def inclusion(gaz: Gazetteer, p: str, o: str) -> float:
    """Share of p's subtree taken up by o, when o lies inside p; else 0."""
    if not gaz.within(o, p):
        return 0.0
    return (gaz.num_descendants(o) + 1) / (gaz.num_descendants(p) + 1)


def proximity(gaz: Gazetteer, p: str, o: str) -> float:
    (px, py), (ox, oy) = gaz[p].centroid, gaz[o].centroid
    return 1.0 / (1.0 + math.hypot(px - ox, py - oy) / gaz[p].diagonal)


def sibling(gaz: Gazetteer, p: str, o: str) -> float:
    return 1.0 if gaz.siblings(p, o) else 0.0


def locational_sim(gaz: Gazetteer, coeffs: SpatialCoefficients, p: str, o: str) -> float:
    """Topology-then-metric similarity with ``p`` as the reference region."""
    b = coeffs.b_loc
    return _clamp(b * (inclusion(gaz, p, o) + proximity(gaz, p, o)) + (1.0 - b) * sibling(gaz, p, o))


def _boxes_intersect(a, b) -> bool:
    return a[0] <= b[2] and b[0] <= a[2] and a[1] <= b[3] and b[1] <= a[3]


def surrogate_sim(gaz: Gazetteer, coeffs: SpatialCoefficients, p: str, o: str) -> float:
    """Purely topological score used when both places are large."""
    if p == o:
        return 1.0
    if gaz.within(o, p):
        return inclusion(gaz, p, o)
    if gaz.within(p, o):
        return inclusion(gaz, o, p)
    table = coeffs.surrogate
    if _boxes_intersect(gaz[p].mbr, gaz[o].mbr):
        return table.adjacent
    if gaz.siblings(p, o):
        return table.sibling_disjoint
    return table.other


def place_sim(gaz: Gazetteer, coeffs: SpatialCoefficients, d: str, q: str) -> float:
    """g(d, q) for a document place ``d`` and a query place ``q``."""
    large = coeffs.large_extent_levels
    if gaz[d].level in large and gaz[q].level in large:
        return surrogate_sim(gaz, coeffs, q, d)
    ls = locational_sim(gaz, coeffs, q, d)
    cs = conceptual_sim(gaz, coeffs, d, q)
    return _clamp(coeffs.w_g * ls + coeffs.w_h * cs)


# ---------------------------------------------------------------------------
# propositions
# ---------------------------------------------------------------------------


class SpatialSimilarity:
    """Geo atom and geo-set similarity bound to one gazetteer and configuration."""

    def __init__(self, gazetteer: Gazetteer, coeffs: SpatialCoefficients | None = None,
                 predicates: PredicateTable | None = None):
        self.gazetteer = gazetteer
        self.coeffs = coeffs or SpatialCoefficients()
        self.predicates = predicates or PredicateTable()
        self._doc_ids: dict[str, str | None] = {}
        self._pair_cache: dict[tuple[str, str], float] = {}

    def resolve_document_place(self, name: str) -> str | None:
        if name not in self._doc_ids:
            try:
                self._doc_ids[name] = self.gazetteer.resolve(name).id
            except (UnknownPlaceError, AmbiguousPlaceError) as exc:
                log.warning("document place %s; it scores 0", exc)
                self._doc_ids[name] = None
        return self._doc_ids[name]

    def place_sim(self, d: str, q: str) -> float:
        key = (d, q)
        if key not in self._pair_cache:
            self._pair_cache[key] = place_sim(self.gazetteer, self.coeffs, d, q)
        return self._pair_cache[key]

    def atom_sim(self, d: GeoAtom, q: GeoAtom) -> float:
        """Document atom against query atom; the query place must resolve."""
        qid = self.gazetteer.resolve(q.place).id
        did = self.resolve_document_place(d.place)
        if did is None:
            return 0.0
        return self.place_sim(did, qid) * self.predicates.compat(d.predicate, q.predicate)

    def set_vs_atom(self, S: Sequence[GeoAtom], atom: GeoAtom, negated: bool = False) -> float:
        if not S:
            return 0.0
        scores = [self.atom_sim(s, atom) for s in S]
        return 1.0 - min(scores) if negated else max(scores)

    def unit_vs_query(self, S: Sequence[GeoAtom], G: PropExpr) -> Score:
        if not S:
            return NO_EVIDENCE
        value = fuzzy_eval(
            G,
            lambda a: self.set_vs_atom(S, a),
            lambda a: self.set_vs_atom(S, a, negated=True),
        )
        return Score(value)


def geo_atom_sim(gaz: Gazetteer, coeffs: SpatialCoefficients, predicates: PredicateTable,
                 d: GeoAtom, q: GeoAtom) -> float:
    return SpatialSimilarity(gaz, coeffs, predicates).atom_sim(d, q)


def geo_unit_vs_query(gaz: Gazetteer, coeffs: SpatialCoefficients, predicates: PredicateTable,
                      S: Sequence[GeoAtom], G: PropExpr) -> Score:
    return SpatialSimilarity(gaz, coeffs, predicates).unit_vs_query(S, G)
