import json
import random

import pytest

from hammer.knowledge import ingest
from hammer.provers import MockProver, ProverRegistry
from hammer.terms import basic_table


DEMO_RECORDS = [
    {"kind": "def", "symbol": "double", "type": "num->num", "body": "\\n. n + n"},
    {"kind": "thm", "name": "ADD_ZERO", "statement": "!n. n + 0 = n", "deps": []},
    {"kind": "thm", "name": "ADD_SYM", "statement": "!m n. m + n = n + m",
     "deps": []},
    {"kind": "thm", "name": "DOUBLE_THM", "statement": "!n. double n = n + n",
     "deps": ["ADD_ZERO"]},
    {"kind": "thm", "name": "PAIR_THM",
     "statement": "(!n. n + 0 = n) /\\ (!m n. m + n = n + m)",
     "deps": ["ADD_ZERO", "ADD_SYM"]},
    {"kind": "thm", "name": "LE_REFL", "statement": "!n. n <= n", "deps": []},
]


def corpus_text(records):
    return "\n".join(json.dumps(r) for r in records) + "\n"


@pytest.fixture
def table():
    return basic_table()


@pytest.fixture
def demo_corpus():
    return corpus_text(DEMO_RECORDS)


@pytest.fixture
def demo_project(tmp_path, demo_corpus):
    return ingest(tmp_path / "projects", "demo", [demo_corpus])


@pytest.fixture
def mock_registry():
    return ProverRegistry().add(
        MockProver("default", answer_set={"ADD_ZERO"},
                   extra_reported={"ADD_SYM"}))


def toy_corpus(n_theorems: int, seed: int = 0) -> str:
    """Synthesized arithmetic corpus with a random dependency structure."""
    rng = random.Random(seed)
    records = []
    names = []
    shapes = [
        "!n. n + {k} = {k} + n",
        "!n. n + {k} + 0 = n + {k}",
        "!n m. n + m + {k} = m + n + {k}",
        "!n. n <= n + {k}",
        "!n. n * {k} + n = n * {k} + n + 0",
    ]
    for i in range(n_theorems):
        stmt = shapes[i % len(shapes)].format(k=i)
        deps = rng.sample(names, min(len(names), rng.randint(0, 3)))
        records.append({"kind": "thm", "name": f"T{i}", "statement": stmt,
                        "deps": deps})
        names.append(f"T{i}")
    return corpus_text(records)
