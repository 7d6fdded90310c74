"""Persisted corpus index: the parsed corpus, its KB resolution and baseline statistics."""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Collection

from .errors import AmbiguousPlaceError, CorpusError, QgirError, UnknownConceptError, UnknownPlaceError
from .evaluation import CorpusStats
from .kb import Gazetteer, Ontology
from .propositions import DEFAULT_PREDICATES, Document, document_from_json, document_to_json, parse_corpus

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
INDEX_FILE = "index.json"


class IndexMissingError(QgirError):
    pass


@dataclass(frozen=True)
class CorpusIndex:
    documents: list[Document]
    stats: CorpusStats
    keywords: dict[str, str | None]
    places: dict[str, str | None]
    unresolved_fraction: float
    content_hash: str

    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "content_hash": self.content_hash,
            "documents": [document_to_json(d) for d in self.documents],
            "resolution": {"keywords": self.keywords, "places": self.places},
            "unresolved_fraction": self.unresolved_fraction,
            "stats": self.stats.to_json(),
        }


def content_hash(*blobs: bytes, lexicon: Collection[str] = DEFAULT_PREDICATES) -> str:
    h = hashlib.sha256(f"qgir-index-v{FORMAT_VERSION}\0".encode())
    for blob in blobs:
        h.update(len(blob).to_bytes(8, "big"))
        h.update(blob)
    h.update("\0".join(sorted(lexicon)).encode())
    return h.hexdigest()


def build_index(docs: list[Document], ontology: Ontology, gazetteer: Gazetteer,
                digest: str = "", max_unresolved_fraction: float = 1.0) -> CorpusIndex:
    keywords: dict[str, str | None] = {}
    places: dict[str, str | None] = {}
    total = unresolved = 0
    for d in docs:
        for u in d.units:
            for a in u.theme:
                if a.keyword not in keywords:
                    try:
                        keywords[a.keyword] = ontology.resolve(a.keyword)
                    except UnknownConceptError:
                        keywords[a.keyword] = None
                total += 1
                unresolved += keywords[a.keyword] is None
            for g in u.geo:
                if g.place not in places:
                    try:
                        places[g.place] = gazetteer.resolve(g.place).id
                    except (UnknownPlaceError, AmbiguousPlaceError):
                        places[g.place] = None
                total += 1
                unresolved += places[g.place] is None
    fraction = unresolved / total if total else 0.0
    if fraction > max_unresolved_fraction:
        bad = sorted([k for k, v in keywords.items() if v is None] + [p for p, v in places.items() if v is None])
        raise CorpusError(
            f"{fraction:.1%} of document atoms are unresolved (limit {max_unresolved_fraction:.1%}): "
            + ", ".join(bad[:10])
        )
    for name, v in sorted({**keywords, **places}.items()):
        if v is None:
            log.warning("unresolved document atom %r", name)
    return CorpusIndex(docs, CorpusStats.build(docs), dict(sorted(keywords.items())),
                       dict(sorted(places.items())), fraction, digest)


def index_path(index_dir: Path) -> Path:
    return Path(index_dir) / INDEX_FILE


def write_index(index: CorpusIndex, index_dir: Path) -> bool:
    """Write the index unless an identical one is already there; True if written."""
    path = index_path(index_dir)
    if path.exists():
        try:
            with open(path, encoding="utf-8") as fh:
                if json.load(fh).get("content_hash") == index.content_hash:
                    return False
        except (OSError, json.JSONDecodeError):
            pass
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(index.to_json(), fh, indent=1, sort_keys=True, ensure_ascii=False)
        fh.write("\n")
    tmp.replace(path)
    return True


def index_corpus(corpus_path: Path, ontology_path: Path, gazetteer_path: Path, index_dir: Path,
                 ontology: Ontology, gazetteer: Gazetteer,
                 lexicon: Collection[str] = DEFAULT_PREDICATES,
                 max_unresolved_fraction: float = 1.0) -> tuple[CorpusIndex, bool]:
    raw = Path(corpus_path).read_bytes()
    digest = content_hash(raw, Path(ontology_path).read_bytes(), Path(gazetteer_path).read_bytes(),
                          lexicon=lexicon)
    docs = parse_corpus(raw.decode("utf-8").splitlines(), lexicon)
    if not docs:
        log.warning("corpus %s is empty", corpus_path)
    index = build_index(docs, ontology, gazetteer, digest, max_unresolved_fraction)
    return index, write_index(index, index_dir)


def load_index(index_dir: Path, lexicon: Collection[str] = DEFAULT_PREDICATES) -> CorpusIndex:
    path = index_path(index_dir)
    if not path.exists():
        raise IndexMissingError(f"no index at {path}; run the 'index' command first")
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if obj.get("format_version") != FORMAT_VERSION:
        raise IndexMissingError(f"index at {path} has format {obj.get('format_version')}, "
                                f"expected {FORMAT_VERSION}; re-run 'index'")
    return CorpusIndex(
        documents=[document_from_json(d, lexicon) for d in obj["documents"]],
        stats=CorpusStats.from_json(obj["stats"]),
        keywords=obj["resolution"]["keywords"],
        places=obj["resolution"]["places"],
        unresolved_fraction=obj["unresolved_fraction"],
        content_hash=obj["content_hash"],
    )
