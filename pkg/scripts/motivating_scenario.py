"""Two traffic-accident reports, one in Miyun and one in Jixian, queried "near Pinggu".

Miyun shares Pinggu's parent region; Jixian is across the provincial border
but its centroid is closer.  The qualitative engine prefers Miyun, the
box-overlap baseline prefers Jixian.

    python scripts/motivating_scenario.py
"""

from pathlib import Path

from qgir.evaluation import Baseline, CorpusStats
from qgir.kb import load_gazetteer, load_ontology
from qgir.propositions import load_corpus, parse_query
from qgir.ranking import Engine

DATA = Path(__file__).resolve().parents[1] / "data"


def main() -> None:
    gaz = load_gazetteer(DATA / "desk" / "gazetteer.json")
    ont = load_ontology(DATA / "scenario" / "ontology.json")
    docs = load_corpus(DATA / "scenario" / "corpus.jsonl")
    q = parse_query('theme:(traffic accident) geo:(NEAR "Pinggu")')

    engine = Engine(ont, gaz)
    baseline = Baseline(gaz, CorpusStats.build(docs))
    for name, ranking in (("qualitative", engine.rank(docs, q)), ("baseline", baseline.rank(docs, q))):
        print(f"{name}:")
        for rank, (doc_id, s) in enumerate(ranking, 1):
            print(f"  {rank}. {doc_id}  score={s.score:.4f}")
    print()
    for d in docs[:2]:
        print("\n".join(engine.explain(d, q).lines()))


if __name__ == "__main__":
    main()
