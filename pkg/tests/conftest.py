from __future__ import annotations

import copy
from pathlib import Path

import pytest

from claimlogic.adjudicator import compile_benchmark
from claimlogic.corpus import DOC_TYPE, SUBTYPES, load_benchmark_source
from claimlogic.lexicon import load_lexicon
from claimlogic.ontology import load_ontology
from claimlogic.store import Store

ASSETS = Path(__file__).resolve().parent.parent / "src" / "claimlogic" / "assets"


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon(ASSETS / "demo_lexicon.txt")


@pytest.fixture(scope="session")
def discourse_ontology():
    return load_ontology(ASSETS / "demo.ont")


@pytest.fixture(scope="session")
def glass_ontology():
    return load_ontology(ASSETS / "car_glass.ont")


@pytest.fixture(scope="session")
def benchmark_payloads(lexicon, glass_ontology):
    """Compiled benchmark JSON per subtype; compiling runs the full text
    pipeline, so do it once per session and hand out deep copies."""
    return {
        subtype: compile_benchmark(load_benchmark_source(subtype), lexicon, glass_ontology)
        for subtype in SUBTYPES
    }


@pytest.fixture()
def kb(tmp_path, benchmark_payloads):
    store = Store(tmp_path / "kb")
    store.initialize()
    for subtype, payload in benchmark_payloads.items():
        store.put_benchmark(DOC_TYPE, subtype, copy.deepcopy(payload))
    return store


@pytest.fixture()
def workdir(tmp_path, benchmark_payloads):
    """On-disk layout `claims validate` expects: kb, assets, config.json."""
    import json
    import shutil

    shutil.copyfile(ASSETS / "demo_lexicon.txt", tmp_path / "lexicon.txt")
    shutil.copyfile(ASSETS / "car_glass.ont", tmp_path / "ontology.ont")
    store = Store(tmp_path / "kb")
    store.initialize()
    for subtype, payload in benchmark_payloads.items():
        store.put_benchmark(DOC_TYPE, subtype, copy.deepcopy(payload))
    (tmp_path / "escalations").mkdir()
    config = {
        "budget_ms": 500,
        "max_clauses": 20000,
        "match_budget_ms": 150,
        "max_edit": 1,
        "lexicon_path": "lexicon.txt",
        "ontology_path": "ontology.ont",
        "kb_path": "kb",
        "escalation_dir": "escalations",
    }
    (tmp_path / "config.json").write_text(json.dumps(config, indent=2) + "\n")
    return tmp_path


# ---------------------------------------------------------------------------
# acceptance summary: one line per criterion at the end of the run

_CRITERIA: list[tuple[int, str, bool, str]] = []


def record_criterion(number: int, name: str, passed: bool, detail: str = "") -> None:
    _CRITERIA.append((number, name, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number, name, passed, detail in sorted(_CRITERIA):
        status = "PASS" if passed else "FAIL"
        suffix = f" ({detail})" if detail else ""
        terminalreporter.write_line(f"criterion {number:2d} {status}  {name}{suffix}")
