"""Command-line front end.

    qgir --config engine.json kb-validate
    qgir --config engine.json index
    qgir --config engine.json query 'theme:(precious metal) geo:(IN "Hebei")' --top 10
    qgir --config engine.json eval queries.tsv qrels.tsv --out results/

Exit codes: 0 success, 1 validation failure, 2 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import IO, Sequence

from .config import EngineConfig, load_config
from .errors import (
    ConfigError,
    CorpusError,
    EvaluationError,
    KBError,
    QgirError,
    QuerySyntaxError,
    UnknownConceptError,
    UnknownPlaceError,
    AmbiguousPlaceError,
    UnsupportedExpressionError,
)
from .evaluation import Baseline, EvalReport, comparison_table, curve_csv, dump_report, evaluate_run, load_qrels
from .index import CorpusIndex, index_corpus, load_index
from .kb import load_gazetteer, load_ontology
from .propositions import Query, parse_query
from .ranking import Engine, Ranking, write_jsonl, write_trec

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2

VALIDATION_ERRORS = (
    ConfigError, KBError, QuerySyntaxError, CorpusError, EvaluationError,
    UnknownConceptError, UnknownPlaceError, AmbiguousPlaceError, UnsupportedExpressionError,
)

METHODS = ("qualitative", "baseline")


def _require(value, what: str):
    if value is None:
        raise ConfigError(f"config has no paths.{what}")
    return value


def cmd_kb_validate(cfg: EngineConfig, out: IO[str]) -> int:
    paths = _require(cfg.paths, "ontology")
    errors = 0
    try:
        ont = load_ontology(paths.ontology)
    except KBError as exc:
        errors += 1
        print(f"ontology error: {exc}", file=out)
        if exc.related:
            print(f"  involved: {', '.join(exc.related)}", file=out)
        ont = None
    try:
        gaz = load_gazetteer(paths.gazetteer)
    except KBError as exc:
        errors += 1
        print(f"gazetteer error: {exc}", file=out)
        if exc.related:
            print(f"  involved: {', '.join(exc.related)}", file=out)
        gaz = None

    warnings: list[str] = []
    if ont is not None:
        print(f"ontology: {len(ont)} concepts, 1 root ({ont.root})", file=out)
        for depth, n in ont.depth_histogram().items():
            print(f"  depth {depth}: {n}", file=out)
        warnings += ont.warnings
    if gaz is not None:
        roots = sum(1 for p in gaz if p.parent is None)
        print(f"gazetteer: {len(gaz)} places, {roots} root(s)", file=out)
        for level, n in gaz.level_counts().items():
            print(f"  {level}: {n}", file=out)
        warnings += gaz.warnings
    print(f"{len(warnings)} warning(s)", file=out)
    for w in warnings:
        print(f"  - {w}", file=out)
    print(f"{errors} error(s)", file=out)
    return EXIT_OK if errors == 0 else EXIT_INVALID


def _load_kbs(cfg: EngineConfig):
    paths = _require(cfg.paths, "ontology")
    return load_ontology(paths.ontology), load_gazetteer(paths.gazetteer)


def cmd_index(cfg: EngineConfig, out: IO[str]) -> int:
    paths = _require(cfg.paths, "corpus")
    corpus = _require(paths.corpus, "corpus")
    index_dir = _require(paths.index_dir, "index_dir")
    ont, gaz = _load_kbs(cfg)
    index, written = index_corpus(
        corpus, paths.ontology, paths.gazetteer, index_dir, ont, gaz,
        cfg.predicates.lexicon, cfg.max_unresolved_fraction,
    )
    if not index.documents:
        print("warning: corpus is empty", file=out)
    units = sum(len(d.units) for d in index.documents)
    print(f"indexed {len(index.documents)} document(s), {units} unit(s), "
          f"{index.unresolved_fraction:.1%} unresolved atoms", file=out)
    print(("wrote " if written else "unchanged ") + str(index_dir), file=out)
    return EXIT_OK


def _open_index(cfg: EngineConfig) -> CorpusIndex:
    paths = _require(cfg.paths, "index_dir")
    return load_index(_require(paths.index_dir, "index_dir"), cfg.predicates.lexicon)


def run_method(method: str, engine: Engine, index: CorpusIndex, q: Query) -> Ranking:
    if method == "baseline":
        return Baseline(engine.gazetteer, index.stats, engine.config.baseline_overlap).rank(index.documents, q)
    return engine.rank(index.documents, q)


def cmd_query(cfg: EngineConfig, text: str, top_k: int, method: str, explain: str | None,
              jsonl: bool, out: IO[str]) -> int:
    q = parse_query(text, cfg.predicates.lexicon)
    index = _open_index(cfg)
    engine = Engine(*_load_kbs(cfg), cfg)
    if explain is not None:
        docs = {d.id: d for d in index.documents}
        if explain not in docs:
            print(f"error: no document {explain!r} in the index", file=out)
            return EXIT_INVALID
        engine.validate_query(q)
        for line in engine.explain(docs[explain], q).lines():
            print(line, file=out)
        return EXIT_OK
    ranking = run_method(method, engine, index, q)
    top = ranking.hits[:top_k]
    if jsonl:
        write_jsonl(top, "q", out)
    else:
        print(f"{'rank':>4}  {'doc_id':<16} {'score':>10} {'bel_T':>10} {'pl_T':>10}", file=out)
        for rank, (doc_id, s) in enumerate(top, 1):
            print(f"{rank:>4}  {doc_id:<16} {s.score:>10.6f} {s.bel_T:>10.6f} {s.pl_T:>10.6f}", file=out)
    for doc_id, reason in sorted(ranking.failures.items()):
        print(f"warning: {doc_id} not scored: {reason}", file=sys.stderr)
    return EXIT_OK


def parse_queries_file(path: Path, lexicon) -> dict[str, Query]:
    queries: dict[str, Query] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.startswith("#"):
                continue
            qid, sep, text = line.rstrip("\n").partition("\t")
            if not sep:
                raise QuerySyntaxError(f"{path}:{lineno}: expected id<TAB>query")
            if qid in queries:
                raise QuerySyntaxError(f"{path}:{lineno}: duplicate query id {qid!r}")
            try:
                queries[qid] = parse_query(text, lexicon)
            except QuerySyntaxError as exc:
                raise QuerySyntaxError(f"{path}:{lineno}: {exc}") from None
    return queries


def run_eval(cfg: EngineConfig, queries: dict[str, Query], qrels, index: CorpusIndex,
             engine: Engine) -> tuple[dict[str, EvalReport], dict[str, dict[str, Ranking]]]:
    missing = sorted(set(queries) - set(qrels))
    if missing:
        raise EvaluationError(f"queries without relevance judgements: {', '.join(missing)}")
    rankings = {m: {qid: run_method(m, engine, index, q) for qid, q in sorted(queries.items())}
                for m in METHODS}
    reports = {m: evaluate_run({qid: r.doc_ids for qid, r in rankings[m].items()}, qrels)
               for m in METHODS}
    return reports, rankings


def cmd_eval(cfg: EngineConfig, queries_path: Path, qrels_path: Path, out_dir: Path | None,
             emit_csv: bool, out: IO[str]) -> int:
    queries = parse_queries_file(queries_path, cfg.predicates.lexicon)
    qrels = load_qrels(qrels_path)
    index = _open_index(cfg)
    engine = Engine(*_load_kbs(cfg), cfg)
    reports, rankings = run_eval(cfg, queries, qrels, index, engine)
    if out_dir is None:
        out_dir = Path(cfg.paths.index_dir) / "eval"
    out_dir.mkdir(parents=True, exist_ok=True)
    table = comparison_table(reports)
    (out_dir / "report.json").write_text(dump_report(reports), encoding="utf-8")
    (out_dir / "table.txt").write_text(table, encoding="utf-8")
    for m in METHODS:
        with open(out_dir / f"{m}.run", "w", encoding="utf-8") as fh:
            for qid, ranking in rankings[m].items():
                write_trec(ranking, qid, fh, tag=m)
        with open(out_dir / f"{m}.jsonl", "w", encoding="utf-8") as fh:
            for qid, ranking in rankings[m].items():
                write_jsonl(ranking, qid, fh)
        if emit_csv:
            (out_dir / f"curve_{m}.csv").write_text(curve_csv(reports[m]), encoding="utf-8")
    out.write(table)
    print(f"wrote {out_dir}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qgir", description="Qualitative geographic information retrieval.")
    ap.add_argument("--config", required=True, type=Path, help="engine config JSON")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("kb-validate", help="load and check both knowledge bases")
    sub.add_parser("index", help="parse, resolve and persist the corpus")

    q = sub.add_parser("query", help="rank the indexed corpus for one query")
    q.add_argument("query")
    q.add_argument("--top", type=int, default=10)
    q.add_argument("--method", choices=METHODS, default="qualitative")
    q.add_argument("--explain", metavar="DOC_ID", help="show the per-unit scoring trace for one document")
    q.add_argument("--jsonl", action="store_true", help="emit JSON Lines instead of a table")

    e = sub.add_parser("eval", help="compare both methods with 11-point interpolated precision")
    e.add_argument("queries", type=Path, help="TSV: id<TAB>query")
    e.add_argument("qrels", type=Path, help="TSV: query_id<TAB>doc_id<TAB>grade")
    e.add_argument("--out", type=Path, default=None)
    e.add_argument("--emit-curve-csv", action="store_true")
    return ap


def main(argv: Sequence[str] | None = None, out: IO[str] | None = None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.command == "kb-validate":
            return cmd_kb_validate(cfg, out)
        if args.command == "index":
            return cmd_index(cfg, out)
        if args.command == "query":
            if args.top < 1:
                raise ConfigError("--top must be a positive integer")
            return cmd_query(cfg, args.query, args.top, args.method, args.explain, args.jsonl, out)
        return cmd_eval(cfg, args.queries, args.qrels, args.out, args.emit_curve_csv, out)
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (QgirError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
