import json

import pytest

from conftest import DESK
from qgir.errors import CorpusError
from qgir.index import FORMAT_VERSION, IndexMissingError, build_index, index_corpus, index_path, load_index


def _index(tmp_path, ont, gaz, corpus=DESK / "corpus.jsonl", **kw):
    return index_corpus(corpus, DESK / "ontology.json", DESK / "gazetteer.json", tmp_path / "idx", ont, gaz, **kw)


def test_index_round_trip(tmp_path, desk_ontology, desk_gazetteer, desk_docs):
    idx, written = _index(tmp_path, desk_ontology, desk_gazetteer)
    assert written
    assert len(idx.documents) == 20
    units = sum(len(d.units) for d in idx.documents)
    assert 2.0 <= units / 20 <= 3.0
    assert idx.unresolved_fraction == 0.0
    assert idx.keywords["precious metal"] == "precious"
    loaded = load_index(tmp_path / "idx")
    assert loaded.documents == desk_docs
    assert loaded.stats == idx.stats
    assert loaded.content_hash == idx.content_hash


def test_reindex_is_idempotent(tmp_path, desk_ontology, desk_gazetteer):
    _index(tmp_path, desk_ontology, desk_gazetteer)
    before = index_path(tmp_path / "idx").read_bytes()
    _, written = _index(tmp_path, desk_ontology, desk_gazetteer)
    assert not written
    assert index_path(tmp_path / "idx").read_bytes() == before


def test_changed_corpus_rewrites(tmp_path, desk_ontology, desk_gazetteer):
    _index(tmp_path, desk_ontology, desk_gazetteer)
    corpus = tmp_path / "c.jsonl"
    corpus.write_text((DESK / "corpus.jsonl").read_text().splitlines()[0] + "\n")
    idx, written = _index(tmp_path, desk_ontology, desk_gazetteer, corpus=corpus)
    assert written and len(load_index(tmp_path / "idx").documents) == 1


def test_unresolved_threshold(desk_ontology, desk_gazetteer, desk_docs):
    from qgir.propositions import Document, GeoAtom, InformationUnit, ThematicAtom
    bad = Document("x", (InformationUnit((ThematicAtom("platinum"),), (GeoAtom("EQ", "Atlantis"),)),))
    with pytest.raises(CorpusError, match="Atlantis"):
        build_index([bad], desk_ontology, desk_gazetteer, max_unresolved_fraction=0.5)
    idx = build_index([bad, *desk_docs], desk_ontology, desk_gazetteer, max_unresolved_fraction=0.5)
    assert idx.places["Atlantis"] is None
    assert 0 < idx.unresolved_fraction < 0.5


def test_missing_or_stale_index(tmp_path):
    with pytest.raises(IndexMissingError):
        load_index(tmp_path)
    index_path(tmp_path).write_text(json.dumps({"format_version": FORMAT_VERSION + 1}))
    with pytest.raises(IndexMissingError, match="format"):
        load_index(tmp_path)
