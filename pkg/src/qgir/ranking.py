"""Unit scoring, Dempster-Shafer evidence fusion and document ranking.

Each information unit of a document is scored against the query, the score
``alpha`` becomes a simple support function (mass ``alpha`` on {T}, the
rest on {T, F}), and the units are combined with Dempster's rule.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Sequence

from .config import Combination, EngineConfig, Scorer, UnitCombination
from .errors import QgirError, TotalConflictError, UnsupportedExpressionError
from .fuzzy import Score
from .kb import Gazetteer, Ontology
from .propositions import (
    Document,
    InformationUnit,
    Nested,
    PropExpr,
    Query,
    leaves,
)
from .sim_spatial import SpatialSimilarity
from .sim_thematic import ThematicSimilarity

log = logging.getLogger(__name__)

MASS_TOL = 1e-9


@dataclass(frozen=True)
class MassFunction:
    """Basic probability assignment over the frame {T, F}; m(empty set) is always 0."""

    m_T: float
    m_F: float = 0.0
    m_TF: float = 1.0

    def __post_init__(self) -> None:
        for name in ("m_T", "m_F", "m_TF"):
            v = getattr(self, name)
            if not v >= -MASS_TOL:
                raise ValueError(f"{name} must be non-negative, got {v}")
        total = self.m_T + self.m_F + self.m_TF
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"masses must sum to 1, got {total}")

    @property
    def bel_T(self) -> float:
        return self.m_T

    @property
    def pl_T(self) -> float:
        # 1 - m(F) rather than m(T) + m(T,F): same value, but exactly 1 when m(F) is 0
        return 1.0 - self.m_F

    @property
    def bel_F(self) -> float:
        return self.m_F

    @property
    def pl_F(self) -> float:
        return 1.0 - self.m_T


VACUOUS = MassFunction(0.0, 0.0, 1.0)


def evidence_from_alpha(alpha: float) -> MassFunction:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return MassFunction(alpha, 0.0, 1.0 - alpha)


def ds_combine(a: MassFunction, b: MassFunction) -> MassFunction:
    """Dempster's rule on the frame {T, F}."""
    t = a.m_T * b.m_T + a.m_T * b.m_TF + a.m_TF * b.m_T
    f = a.m_F * b.m_F + a.m_F * b.m_TF + a.m_TF * b.m_F
    tf = a.m_TF * b.m_TF
    # Dividing by the surviving mass equals dividing by 1 - conflict, with less rounding.
    norm = t + f + tf
    if norm <= 0.0:
        raise TotalConflictError("evidence is in total conflict; Dempster's rule is undefined")
    if norm != 1.0:
        t, f, tf = t / norm, f / norm, tf / norm
    # rounding can push a mass a hair past its bound; pin it so Bel <= Pl holds exactly
    t = min(max(t, 0.0), 1.0 - f)
    f = min(max(f, 0.0), 1.0 - t)
    return MassFunction(t, f, max(tf, 0.0))


def fold_evidence(alphas: Iterable[float]) -> MassFunction:
    m = VACUOUS
    for alpha in alphas:
        m = ds_combine(m, evidence_from_alpha(alpha))
    return m


def unit_sim(ru_t: float | None, ru_g: float | None,
             combination: UnitCombination = UnitCombination()) -> float:
    """Combine thematic and spatial unit scores; a missing side passes the other through."""
    if ru_t is None and ru_g is None:
        raise ValueError("unit_sim needs at least one of the thematic and spatial scores")
    if ru_t is None:
        return ru_g
    if ru_g is None:
        return ru_t
    method = combination.method
    if method is Combination.GEOMETRIC:
        return math.sqrt(ru_t * ru_g)
    if method is Combination.ARITHMETIC:
        return (ru_t + ru_g) / 2.0
    if method is Combination.PRODUCT:
        return ru_t * ru_g
    w = combination.theme_weight
    return w * ru_t + (1.0 - w) * ru_g


@dataclass(frozen=True)
class DocScore:
    bel_T: float
    pl_T: float
    bel_F: float
    pl_F: float
    score: float


def doc_score_from_mass(m: MassFunction, scorer: Scorer = Scorer.BEL_T, epsilon: float = 1e-6) -> DocScore:
    if scorer is Scorer.BEL_T:
        score = m.bel_T
    else:
        # Bel(F) is identically 0 under simple support evidence, hence the floor.
        ratio = m.bel_T / max(m.bel_F, epsilon)
        score = ratio if scorer is Scorer.BELIEF_RATIO else 1.0 - 1.0 / math.log(math.e + ratio)
    return DocScore(m.bel_T, m.pl_T, m.bel_F, m.pl_F, score)


@dataclass(frozen=True)
class UnitTrace:
    theme: Score | None
    geo: Score | None
    alpha: float
    mass: MassFunction  # after folding this unit in


@dataclass(frozen=True)
class Explanation:
    doc_id: str
    units: tuple[UnitTrace, ...]
    score: DocScore

    def lines(self) -> list[str]:
        out = [f"document {self.doc_id}: {len(self.units)} unit(s)"]
        for i, u in enumerate(self.units, 1):
            t = "-" if u.theme is None else f"{u.theme.value:.6f}"
            g = "-" if u.geo is None else f"{u.geo.value:.6f}"
            m = u.mass
            out.append(
                f"  unit {i}: theme={t} geo={g} alpha={u.alpha:.6f} -> "
                f"m(T)={m.m_T:.6f} m(F)={m.m_F:.6f} m(T,F)={m.m_TF:.6f}"
            )
        s = self.score
        out.append(f"  Bel(T)={s.bel_T:.6f} Pl(T)={s.pl_T:.6f} score={s.score:.6f}")
        return out


@dataclass
class Ranking:
    hits: list[tuple[str, DocScore]]
    failures: dict[str, str] = field(default_factory=dict)

    def __iter__(self) -> Iterator[tuple[str, DocScore]]:
        return iter(self.hits)

    def __len__(self) -> int:
        return len(self.hits)

    @property
    def doc_ids(self) -> list[str]:
        return [d for d, _ in self.hits]


def sort_hits(scored: Iterable[tuple[str, DocScore]]) -> list[tuple[str, DocScore]]:
    return sorted(scored, key=lambda item: (-item[1].score, item[0]))


class Engine:
    """The qualitative scorer: knowledge bases plus configuration."""

    def __init__(self, ontology: Ontology, gazetteer: Gazetteer, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        self.ontology = ontology
        self.gazetteer = gazetteer
        self.thematic = ThematicSimilarity(ontology, self.config.weights)
        self.spatial = SpatialSimilarity(gazetteer, self.config.spatial, self.config.predicates)

    def validate_query(self, q: Query) -> None:
        """Fail early if any query atom cannot be resolved or scored."""
        for expr in (q.theme, q.geo):
            if expr is not None and _has_nested(expr):
                raise UnsupportedExpressionError("nested spatial operators cannot be scored")
        if q.theme is not None:
            for atom, _ in leaves(q.theme):
                self.ontology.resolve(atom.keyword)
        if q.geo is not None:
            for atom, _ in leaves(q.geo):
                self.gazetteer.resolve(atom.place)

    def unit_scores(self, unit: InformationUnit, q: Query) -> tuple[Score | None, Score | None]:
        theme = None if q.theme is None else self.thematic.unit_vs_query(unit.theme, q.theme)
        geo = None if q.geo is None else self.spatial.unit_vs_query(unit.geo, q.geo)
        return theme, geo

    def unit_alpha(self, unit: InformationUnit, q: Query) -> float:
        return _alpha(*self.unit_scores(unit, q), self.config.combination)

    def explain(self, d: Document, q: Query) -> Explanation:
        traces = []
        m = VACUOUS
        for unit in d.units:
            theme, geo = self.unit_scores(unit, q)
            alpha = _alpha(theme, geo, self.config.combination)
            m = ds_combine(m, evidence_from_alpha(alpha))
            traces.append(UnitTrace(theme, geo, alpha, m))
        return Explanation(d.id, tuple(traces), self._finish(m))

    def doc_score(self, d: Document, q: Query) -> DocScore:
        return self._finish(fold_evidence(self.unit_alpha(u, q) for u in d.units))

    def _finish(self, m: MassFunction) -> DocScore:
        return doc_score_from_mass(m, self.config.scorer, self.config.ratio_epsilon)

    def rank(self, docs: Sequence[Document], q: Query) -> Ranking:
        self.validate_query(q)
        floor = self.config.candidate_floor
        scored, failures = [], {}
        for d in docs:
            try:
                alphas = [self.unit_alpha(u, q) for u in d.units]
            except QgirError as exc:
                log.warning("document %s failed to score: %s", d.id, exc)
                failures[d.id] = str(exc)
                continue
            if floor is not None and not any(a > floor for a in alphas):
                continue
            scored.append((d.id, self._finish(fold_evidence(alphas))))
        return Ranking(sort_hits(scored), failures)


def _alpha(theme: Score | None, geo: Score | None, combination: UnitCombination) -> float:
    ru_t = theme.value if theme is not None and theme.evidence else None
    ru_g = geo.value if geo is not None and geo.evidence else None
    if ru_t is None and ru_g is None:
        # nothing in this unit speaks to the query: vacuous evidence
        return 0.0
    return unit_sim(ru_t, ru_g, combination)


def _has_nested(expr: PropExpr) -> bool:
    if isinstance(expr, Nested):
        return True
    return any(_has_nested(getattr(expr, f)) for f in ("operand", "left", "right") if hasattr(expr, f))


def doc_score(d: Document, q: Query, engine: Engine) -> DocScore:
    engine.validate_query(q)
    return engine.doc_score(d, q)


def rank_corpus(docs: Sequence[Document], q: Query, engine: Engine) -> Ranking:
    return engine.rank(docs, q)


# ---------------------------------------------------------------------------
# output formats
# ---------------------------------------------------------------------------


def write_jsonl(ranking: Iterable[tuple[str, DocScore]], query_id: str, fh: IO[str]) -> None:
    for rank, (doc_id, s) in enumerate(ranking, 1):
        row = {"query_id": query_id, "doc_id": doc_id, "rank": rank, "score": s.score,
               "bel_T": s.bel_T, "pl_T": s.pl_T}
        fh.write(json.dumps(row) + "\n")


def write_trec(ranking: Iterable[tuple[str, DocScore]], query_id: str, fh: IO[str],
               tag: str = "qgir") -> None:
    for rank, (doc_id, s) in enumerate(ranking, 1):
        fh.write(f"{query_id} Q0 {doc_id} {rank} {s.score:.10f} {tag}\n")


def read_trec(lines: Iterable[str]) -> dict[str, list[str]]:
    """Ranked doc ids per query from a TREC run file (ordered by the rank column)."""
    rows: dict[str, list[tuple[int, str]]] = {}
    for line in lines:
        if not line.strip():
            continue
        qid, _, doc_id, rank, _score, _tag = line.split()
        rows.setdefault(qid, []).append((int(rank), doc_id))
    return {qid: [d for _, d in sorted(r)] for qid, r in rows.items()}

