"""Conventional baseline scorer and 11-point interpolated precision.

The baseline is the usual quantitative GIR recipe: TF-IDF cosine for the
theme, bounding-box overlap for the geography, combined by geometric mean.
It ignores unit structure entirely.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Collection, Iterable, Mapping, Sequence

from .config import Overlap, UnitCombination
from .errors import AmbiguousPlaceError, EvaluationError, UnknownPlaceError
from .kb import Gazetteer
from .propositions import Document, Query, positive_atoms
from .ranking import DocScore, Ranking, sort_hits, unit_sim

log = logging.getLogger(__name__)

RECALL_LEVELS = tuple(j / 10 for j in range(11))

Box = tuple[float, float, float, float]


# ---------------------------------------------------------------------------
# baseline
# ---------------------------------------------------------------------------


def _term(keyword: str) -> str:
    return " ".join(keyword.split()).casefold()


def document_terms(d: Document) -> list[str]:
    return [_term(a.keyword) for u in d.units for a in u.theme]


@dataclass(frozen=True)
class CorpusStats:
    num_docs: int
    df: Mapping[str, int]

    @classmethod
    def build(cls, docs: Iterable[Document]) -> "CorpusStats":
        df: Counter[str] = Counter()
        n = 0
        for d in docs:
            n += 1
            df.update(set(document_terms(d)))
        return cls(n, dict(sorted(df.items())))

    def idf(self, term: str) -> float:
        df = self.df.get(term, 0)
        return math.log(self.num_docs / df) if df else 0.0

    def vector(self, terms: Iterable[str]) -> dict[str, float]:
        """ln-scaled TF times ln(N/df) IDF."""
        tf = Counter(terms)
        vec = {t: (1.0 + math.log(c)) * self.idf(t) for t, c in tf.items()}
        return {t: w for t, w in vec.items() if w > 0.0}

    def to_json(self) -> dict:
        return {"num_docs": self.num_docs, "df": dict(self.df)}

    @classmethod
    def from_json(cls, obj: Mapping) -> "CorpusStats":
        return cls(int(obj["num_docs"]), dict(obj["df"]))


def cosine(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    if not a or not b:
        return 0.0
    dot = sum(w * b.get(t, 0.0) for t, w in a.items())
    na = math.sqrt(sum(w * w for w in a.values()))
    nb = math.sqrt(sum(w * w for w in b.values()))
    return min(1.0, dot / (na * nb))


def enclosing_box(boxes: Iterable[Box]) -> Box | None:
    boxes = list(boxes)
    if not boxes:
        return None
    return (min(b[0] for b in boxes), min(b[1] for b in boxes),
            max(b[2] for b in boxes), max(b[3] for b in boxes))


def _area(b: Box) -> float:
    return max(0.0, b[2] - b[0]) * max(0.0, b[3] - b[1])


def box_overlap(q: Box, d: Box, mode: Overlap = Overlap.JACCARD) -> float:
    inter = _area((max(q[0], d[0]), max(q[1], d[1]), min(q[2], d[2]), min(q[3], d[3])))
    if mode is Overlap.QUERY_NORMALIZED:
        return inter / _area(q)
    return inter / (_area(q) + _area(d) - inter)


class Baseline:
    """TF-IDF cosine and bounding-box overlap, fused by geometric mean."""

    def __init__(self, gazetteer: Gazetteer, stats: CorpusStats, overlap: Overlap = Overlap.JACCARD):
        if stats.num_docs == 0:
            raise EvaluationError("baseline needs corpus statistics from at least one document")
        self.gazetteer = gazetteer
        self.stats = stats
        self.overlap = Overlap(overlap)
        self._combo = UnitCombination()

    def query_box(self, q: Query) -> Box | None:
        return enclosing_box(self.gazetteer.resolve(a.place).mbr for a in positive_atoms(q.geo))

    def document_box(self, d: Document) -> Box | None:
        boxes = []
        for u in d.units:
            for a in u.geo:
                try:
                    boxes.append(self.gazetteer.resolve(a.place).mbr)
                except (UnknownPlaceError, AmbiguousPlaceError) as exc:
                    log.warning("baseline skips document %s place: %s", d.id, exc)
        return enclosing_box(boxes)

    def thematic(self, d: Document, q: Query) -> float | None:
        if q.theme is None:
            return None
        terms = document_terms(d)
        if not terms:
            return None
        qvec = self.stats.vector(_term(a.keyword) for a in positive_atoms(q.theme))
        return cosine(qvec, self.stats.vector(terms))

    def geographic(self, d: Document, q: Query) -> float | None:
        if q.geo is None:
            return None
        qbox = self.query_box(q)
        dbox = self.document_box(d)
        if qbox is None or dbox is None:
            return None
        return box_overlap(qbox, dbox, self.overlap)

    def score(self, d: Document, q: Query) -> float:
        t, g = self.thematic(d, q), self.geographic(d, q)
        if t is None and g is None:
            return 0.0
        return unit_sim(t, g, self._combo)

    def rank(self, docs: Sequence[Document], q: Query) -> Ranking:
        # A baseline score is a point value, so the belief interval collapses onto it.
        scored = []
        for d in docs:
            s = self.score(d, q)
            scored.append((d.id, DocScore(s, s, 1.0 - s, 1.0 - s, s)))
        return Ranking(sort_hits(scored))


def baseline_score(d: Document, q: Query, stats: CorpusStats, gazetteer: Gazetteer,
                   overlap: Overlap = Overlap.JACCARD) -> float:
    return Baseline(gazetteer, stats, overlap).score(d, q)


# ---------------------------------------------------------------------------
# relevance judgements and the 11-point curve
# ---------------------------------------------------------------------------

Qrels = dict[str, dict[str, int]]


def parse_qrels(lines: Iterable[str]) -> Qrels:
    qrels: Qrels = {}
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 3:
            raise EvaluationError(f"qrels line {lineno}: expected query_id<TAB>doc_id<TAB>grade")
        qid, doc_id, grade = parts
        try:
            g = int(grade)
        except ValueError:
            raise EvaluationError(f"qrels line {lineno}: grade {grade!r} is not an integer") from None
        if g < 0:
            raise EvaluationError(f"qrels line {lineno}: negative grade")
        per_query = qrels.setdefault(qid, {})
        if doc_id in per_query:
            raise EvaluationError(f"qrels line {lineno}: duplicate judgement for ({qid}, {doc_id})")
        per_query[doc_id] = g
    return qrels


def load_qrels(path) -> Qrels:
    with open(path, encoding="utf-8") as fh:
        return parse_qrels(fh)


def relevant_set(judgements: Mapping[str, int] | Collection[str]) -> set[str]:
    if isinstance(judgements, Mapping):
        return {d for d, g in judgements.items() if g > 0}
    return set(judgements)


def interp_precision_11pt(run: Sequence[str], judgements: Mapping[str, int] | Collection[str]) -> tuple[float, ...]:
    """Interpolated precision at recall 0.0, 0.1, ..., 1.0.

    P(r_j) is the best precision at any rank whose recall is at least r_j;
    levels beyond the recall the run reaches get 0.
    """
    relevant = relevant_set(judgements)
    total = len(relevant)
    if total == 0:
        raise EvaluationError("no relevant documents for this query")
    points: list[tuple[int, float]] = []  # (relevant retrieved, precision) at each hit
    hits = 0
    seen: set[str] = set()
    rank = 0
    for doc_id in run:
        if doc_id in seen:
            continue
        seen.add(doc_id)
        rank += 1
        if doc_id in relevant:
            hits += 1
            points.append((hits, hits / rank))
    curve = []
    best = 0.0
    idx = len(points) - 1
    # sweep levels high to low, extending the suffix max as recall thresholds drop
    for j in range(10, -1, -1):
        while idx >= 0 and 10 * points[idx][0] >= j * total:
            best = max(best, points[idx][1])
            idx -= 1
        curve.append(best)
    return tuple(reversed(curve))


@dataclass(frozen=True)
class EvalReport:
    per_query: dict[str, tuple[float, ...]]
    mean_curve: tuple[float, ...]
    miap: float  # mean over queries of the mean of the 11 points

    def to_json(self) -> dict:
        return {
            "per_query": {q: list(c) for q, c in sorted(self.per_query.items())},
            "mean_curve": list(self.mean_curve),
            "miap": self.miap,
        }

    def table(self) -> str:
        return comparison_table({"precision": self})


def evaluate_run(runs: Mapping[str, Sequence[str]], qrels: Qrels) -> EvalReport:
    if not runs:
        raise EvaluationError("no queries to evaluate")
    per_query = {}
    for qid in sorted(runs):
        if qid not in qrels:
            raise EvaluationError(f"query {qid!r} has no relevance judgements")
        try:
            per_query[qid] = interp_precision_11pt(runs[qid], qrels[qid])
        except EvaluationError as exc:
            raise EvaluationError(f"query {qid!r}: {exc}") from None
    n = len(per_query)
    mean_curve = tuple(sum(c[j] for c in per_query.values()) / n for j in range(11))
    miap = sum(sum(c) / 11 for c in per_query.values()) / n
    return EvalReport(per_query, mean_curve, miap)


def comparison_table(reports: Mapping[str, EvalReport]) -> str:
    names = list(reports)
    width = max(10, *(len(n) for n in names))
    lines = ["recall  " + "  ".join(f"{n:>{width}}" for n in names)]
    for j, level in enumerate(RECALL_LEVELS):
        lines.append(f"{level:6.1f}  " + "  ".join(f"{reports[n].mean_curve[j]:>{width}.4f}" for n in names))
    lines.append("MIAP    " + "  ".join(f"{reports[n].miap:>{width}.4f}" for n in names))
    return "\n".join(lines) + "\n"


def curve_csv(report: EvalReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["recall", "precision"])
    for level, p in zip(RECALL_LEVELS, report.mean_curve):
        w.writerow([f"{level:.1f}", f"{p:.10f}"])
    return buf.getvalue()


def dump_report(reports: Mapping[str, EvalReport]) -> str:
    return json.dumps({name: r.to_json() for name, r in reports.items()}, indent=2, sort_keys=True) + "\n"
