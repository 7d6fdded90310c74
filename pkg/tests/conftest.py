import json
import shutil
import time
from contextlib import contextmanager
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from qgir.config import load_config
from qgir.kb import load_gazetteer, load_ontology
from qgir.propositions import load_corpus
from qgir.ranking import Engine

ROOT = Path(__file__).resolve().parents[1]
DESK = ROOT / "data" / "desk"
SCENARIO = ROOT / "data" / "scenario"

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = config.stash.get(_ACCEPTANCE, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(rows):
        terminalreporter.write_line(line[1])


@pytest.fixture
def criterion(request):
    """Context manager that records one PASS/FAIL line per acceptance criterion."""
    rows = request.config.stash[_ACCEPTANCE]

    @contextmanager
    def run(number: int, title: str):
        t0 = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            reason = (str(exc).strip().splitlines() or [type(exc).__name__])[0]
            line = f"criterion {number} FAIL  {title}  ({reason})"
            rows.append((number, line))
            print(line)
            raise
        line = f"criterion {number} PASS  {title}  [{time.perf_counter() - t0:.2f}s]"
        rows.append((number, line))
        print(line)

    return run


@pytest.fixture(scope="session")
def desk_ontology():
    return load_ontology(DESK / "ontology.json")


@pytest.fixture(scope="session")
def desk_gazetteer():
    return load_gazetteer(DESK / "gazetteer.json")


@pytest.fixture(scope="session")
def desk_docs():
    return load_corpus(DESK / "corpus.jsonl")


@pytest.fixture(scope="session")
def desk_engine(desk_ontology, desk_gazetteer):
    return Engine(desk_ontology, desk_gazetteer)


def _copy_config(src_dir: Path, dst: Path, extra_files=()) -> Path:
    """Copy a data directory's config into ``dst`` with the index kept inside ``dst``."""
    data = json.loads((src_dir / "engine.json").read_text())
    for key in ("ontology", "gazetteer", "corpus"):
        data["paths"][key] = str((src_dir / data["paths"][key]).resolve())
    data["paths"]["index_dir"] = str(dst / "index")
    for name in extra_files:
        shutil.copy(src_dir / name, dst / name)
    path = dst / "engine.json"
    path.write_text(json.dumps(data, indent=2))
    return path


@pytest.fixture
def desk_config_path(tmp_path):
    return _copy_config(DESK, tmp_path, ("queries.tsv", "qrels.tsv"))


@pytest.fixture
def scenario_config_path(tmp_path):
    return _copy_config(SCENARIO, tmp_path, ("queries.tsv", "qrels.tsv"))


@pytest.fixture
def desk_config(desk_config_path):
    return load_config(desk_config_path)
