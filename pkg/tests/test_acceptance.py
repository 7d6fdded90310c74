"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected into an "acceptance criteria" section of the
terminal summary.
"""

import io
import json
import math
import random
import time

import pytest

import property_suites
from conftest import SCENARIO
from oracles import brute_force_11pt, support_fold_belief
from qgir.cli import main
from qgir.evaluation import Baseline, interp_precision_11pt
from qgir.index import build_index
from qgir.kb import OntologyWeights, load_gazetteer, load_ontology, ontology_from_dict, weighted_shortest_path
from qgir.propositions import load_corpus, parse_query
from qgir.ranking import Engine, fold_evidence
from qgir.sim_spatial import SpatialCoefficients, conceptual_sim, inclusion, locational_sim, place_sim, proximity
from qgir.sim_thematic import keyword_sim


def test_ds_fold_matches_closed_form(criterion):
    with criterion(1, "D-S fold equals 1 - prod(1 - alpha) on 1000 random vectors, < 1 s"):
        rng = random.Random(20261015)
        vectors = [[rng.random() for _ in range(rng.randint(1, 8))] for _ in range(1000)]
        t0 = time.perf_counter()
        worst = max(abs(fold_evidence(v).bel_T - support_fold_belief(v)) for v in vectors)
        elapsed = time.perf_counter() - t0
        assert worst <= 1e-12, f"max deviation {worst:.3e}"
        assert elapsed < 1.0, f"took {elapsed:.3f}s"


def test_hand_derived_fixtures(criterion, desk_gazetteer):
    with criterion(2, "hand-derived fixtures within 1e-6"):
        w = OntologyWeights()
        ont = ontology_from_dict({"concepts": [
            {"id": "mineral"}, {"id": "metal", "parent": "mineral"}, {"id": "gold", "parent": "metal"},
        ]})
        # narrower hop into depth 3, broader hop into depth 2
        td_down, td_up = 0.4 / 3, 0.6 / 2
        assert weighted_shortest_path(ont, w, "metal", "gold") == pytest.approx(td_down, abs=1e-6)
        assert weighted_shortest_path(ont, w, "gold", "metal") == pytest.approx(td_up, abs=1e-6)
        h = keyword_sim(ont, w, "metal", "gold")
        assert h == pytest.approx(1 / (1 + math.log(1 + td_down)), abs=1e-6)
        assert h == pytest.approx(0.888760, abs=1e-6)
        assert keyword_sim(ont, w, "gold", "metal") == pytest.approx(1 / (1 + math.log(1.3)), abs=1e-6)

        g, c = desk_gazetteer, SpatialCoefficients()
        assert conceptual_sim(g, c, "miyun", "pinggu") == pytest.approx(1 - 1 / 3 - 1 / 3, abs=1e-6)
        assert conceptual_sim(g, c, "jixian", "pinggu") == pytest.approx(1 - 1 / 2 - 1 / 2, abs=1e-6)
        # Beijing has exactly two descendants
        assert inclusion(g, "beijing", "pinggu") == pytest.approx((0 + 1) / (2 + 1), abs=1e-6)

        # Pinggu [117.0,40.0,117.4,40.3], Miyun [116.8,40.3,117.2,40.7]
        dist = math.hypot(117.2 - 117.0, 40.15 - 40.5)
        prox = 1 / (1 + dist / math.hypot(0.4, 0.3))
        ls = 0.5 * (0 + prox) + 0.5 * 1
        assert proximity(g, "pinggu", "miyun") == pytest.approx(prox, abs=1e-6)
        assert prox == pytest.approx(0.553641, abs=1e-6)
        assert locational_sim(g, c, "pinggu", "miyun") == pytest.approx(ls, abs=1e-6)
        assert ls == pytest.approx(0.776820, abs=1e-6)
        assert place_sim(g, c, "miyun", "pinggu") == pytest.approx(0.6 * ls + 0.4 / 3, abs=1e-6)
        assert place_sim(g, c, "miyun", "pinggu") == pytest.approx(0.599425, abs=1e-6)

        assert fold_evidence([0.6, 0.5]).bel_T == pytest.approx(1 - 0.4 * 0.5, abs=1e-6)


def test_motivating_scenario(criterion, desk_gazetteer):
    with criterion(3, "Miyun beats Jixian qualitatively, Jixian beats Miyun on the baseline"):
        g = desk_gazetteer
        pinggu = g["pinggu"].centroid

        def dist(pid):
            x, y = g[pid].centroid
            return math.hypot(x - pinggu[0], y - pinggu[1])

        assert dist("jixian") < dist("miyun"), "scenario needs Jixian's centroid nearer Pinggu"
        ont = load_ontology(SCENARIO / "ontology.json")
        docs = load_corpus(SCENARIO / "corpus.jsonl")
        q = parse_query('theme:(traffic accident) geo:(NEAR "Pinggu")')

        qual = Engine(ont, g).rank(docs, q)
        pos = {d: i for i, d in enumerate(qual.doc_ids)}
        assert pos["A"] < pos["B"], f"qualitative order {qual.doc_ids}"
        score = dict(qual.hits)
        assert score["A"].score > score["B"].score

        base = Baseline(g, build_index(docs, ont, g).stats).rank(docs, q)
        assert base.doc_ids[0] == "B", f"baseline order {base.doc_ids}"
        bscore = dict(base.hits)
        assert bscore["B"].score > bscore["A"].score


def test_property_suites(criterion):
    with criterion(4, f"{len(property_suites.SUITES)} property suites x >=1000 cases, < 30 s total"):
        failures = []
        t0 = time.perf_counter()
        for suite in property_suites.SUITES:
            cfg = getattr(suite, "_hypothesis_internal_use_settings", None)
            assert cfg is not None and cfg.max_examples >= 1000, f"{suite.__name__} runs too few cases"
            try:
                suite()
            except Exception as exc:
                failures.append((suite.__name__, exc))
        elapsed = time.perf_counter() - t0
        if failures:
            names = ", ".join(n for n, _ in failures)
            raise AssertionError(f"failing suites: {names}") from failures[0][1]
        assert elapsed < 30.0, f"took {elapsed:.1f}s"


def test_eleven_point_oracle(criterion):
    with criterion(5, "11-point precision equals the brute-force reference on 500 runs"):
        assert interp_precision_11pt(["r1", "n", "r2", "r3"], {"r1", "r2", "r3"}) == (1.0,) * 4 + (0.75,) * 7
        rng = random.Random(11)
        for _ in range(500):
            n = rng.randint(1, 50)
            docs = [f"d{i}" for i in range(n)]
            relevant = set(rng.sample(docs, rng.randint(1, min(10, n))))
            run = rng.sample(docs, rng.randint(0, n))
            assert interp_precision_11pt(run, relevant) == brute_force_11pt(run, relevant), (run, relevant)


def test_desk_experiment(criterion, desk_config_path, tmp_path):
    with criterion(6, "desk run: qualitative MIAP >= baseline MIAP, index + eval < 10 s"):
        out = io.StringIO()
        t0 = time.perf_counter()
        assert main(["--config", str(desk_config_path), "index"], out=out) == 0
        assert main(["--config", str(desk_config_path), "eval", str(tmp_path / "queries.tsv"),
                     str(tmp_path / "qrels.tsv"), "--out", str(tmp_path / "eval")], out=out) == 0
        elapsed = time.perf_counter() - t0
        report = json.loads((tmp_path / "eval" / "report.json").read_text())
        qual, base = report["qualitative"], report["baseline"]
        assert len(qual["per_query"]) == 5
        print(out.getvalue())
        assert qual["miap"] >= base["miap"], f"qualitative {qual['miap']:.4f} < baseline {base['miap']:.4f}"
        ahead = sum(a >= b for a, b in zip(qual["mean_curve"], base["mean_curve"]))
        assert ahead >= 6, f"qualitative ahead at only {ahead} of 11 recall levels"
        assert elapsed < 10.0, f"took {elapsed:.2f}s"
