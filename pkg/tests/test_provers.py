import subprocess
import threading
import time

import pytest

from hammer.fof import encode_problem
from hammer.parser import parse_term
from hammer.provers import (
    ERROR, GAVEUP, PROVED, TIMEOUT, ExternalProver, MockProver, ProofResult,
    ProverRegistry, ProverSpec, SpawnError, invocation_count, parse_szs,
    run_prover, used_axioms,
)
from hammer.terms import basic_table


def _problem(names=("A", "B", "C")):
    tbl = basic_table()
    goal = parse_term("!n. n + 0 = n", tbl)
    prem = parse_term("!m. m <= m", tbl)
    return encode_problem(goal, [(n, prem) for n in names])


# SZS fixtures in three output dialects
E_STYLE = """# Running protocol
# SZS status Theorem
# SZS output start CNFRefutation
fof(hh__41, axiom, ...).
# SZS output end CNFRefutation
"""

VAMPIRE_STYLE = """% Refutation found. Thanks to Tanya!
% SZS status Unsatisfiable for problem
% SZS output start Proof for problem
fof(f1, axiom, $false, inference(resolution, [], [hh__42])).
% SZS output end Proof
"""

Z3_STYLE = """SZS status: GaveUp
"""


def test_szs_parsing_dialects():
    assert parse_szs(E_STYLE, []) == "Theorem"
    assert parse_szs(VAMPIRE_STYLE, []) == "Unsatisfiable"
    assert parse_szs(Z3_STYLE, []) == "GaveUp"
    assert parse_szs("no status here", []) is None


def test_used_axioms_identifier_scan():
    names = ["hh__41", "hh__42", "hh__43"]
    assert used_axioms(E_STYLE, names) == ["hh__41"]
    assert used_axioms(VAMPIRE_STYLE, names) == ["hh__42"]
    assert used_axioms("", names) == []


def test_spec_requires_placeholders():
    with pytest.raises(ValueError):
        ProverSpec("p", "run-it")
    with pytest.raises(ValueError):
        ProverSpec("p", "run {file} {timeout}", wall_limit=0)


def test_proof_result_clears_used_unless_proved():
    r = ProofResult(GAVEUP, used=["A"])
    assert r.used == []
    assert ProofResult(PROVED, used=["A"]).used == ["A"]


def test_external_prover_proved(tmp_path):
    spec = ProverSpec("fake", "echo 'SZS status Theorem'; echo used: "
                              "$(grep -o 'fof(hh[a-z0-9_]*' {file} | head -1 "
                              "| cut -c5-) # t={timeout}")
    p = _problem(["ADD"])
    res = run_prover(ExternalProver(spec), p, 5, str(tmp_path))
    assert res.status == PROVED
    assert res.used == ["ADD"]


def test_external_prover_gaveup(tmp_path):
    spec = ProverSpec("fake", "echo 'SZS status CounterSatisfiable' # {file} {timeout}")
    res = run_prover(ExternalProver(spec), _problem(), 5, str(tmp_path))
    assert res.status == "CounterSatisfiable"


def test_external_prover_garbage_is_error(tmp_path):
    spec = ProverSpec("fake", "echo 'segfault' # {file} {timeout}")
    res = run_prover(ExternalProver(spec), _problem(), 5, str(tmp_path))
    assert res.status == ERROR


def test_external_prover_watchdog_kills_process_group(tmp_path):
    marker = tmp_path / "alive"
    spec = ProverSpec(
        "sleeper",
        "sh -c 'sleep 30; touch %s' # {file} {timeout}" % marker)
    start = time.monotonic()
    res = run_prover(ExternalProver(spec), _problem(), 0.3, str(tmp_path))
    assert res.status == TIMEOUT
    assert time.monotonic() - start < 3.0
    # no survivor writes the marker afterwards
    time.sleep(0.5)
    assert not marker.exists()
    out = subprocess.run(["pgrep", "-f", str(marker)],
                         capture_output=True).stdout
    assert out == b""


def test_external_prover_cancel_event(tmp_path):
    spec = ProverSpec("sleeper", "sleep 30 # {file} {timeout}")
    cancel = threading.Event()
    results = []
    th = threading.Thread(target=lambda: results.append(
        run_prover(ExternalProver(spec), _problem(), 20, str(tmp_path), cancel)))
    th.start()
    time.sleep(0.3)
    cancel.set()
    th.join(timeout=5)
    assert not th.is_alive()
    assert results[0].status == TIMEOUT


def test_mock_prover_semantics():
    mock = MockProver("m", answer_set={"A"}, extra_reported={"B"})
    r = run_prover(mock, _problem(["A", "B", "C"]), 5)
    assert r.status == PROVED and r.used == ["A", "B"]
    r = run_prover(mock, _problem(["A", "B"]), 5)
    assert r.used == ["A"]  # extras filtered when nothing else is submitted
    r = run_prover(mock, _problem(["A"]), 5)
    assert r.used == ["A"]
    r = run_prover(mock, _problem(["B", "C"]), 5)
    assert r.status == GAVEUP and r.used == []


def test_mock_prover_latency_and_timeout():
    mock = MockProver("m", answer_set={"A"}, latency_s=5.0)
    start = time.monotonic()
    r = run_prover(mock, _problem(["A"]), 0.2)
    assert r.status == TIMEOUT
    assert time.monotonic() - start < 1.0


def test_invocation_counter_increments():
    before = invocation_count()
    run_prover(MockProver("m", {"A"}), _problem(["A"]), 1)
    assert invocation_count() == before + 1


def test_registry_from_config():
    reg = ProverRegistry.from_config([
        {"name": "ext", "type": "external", "command": "echo {file} {timeout}"},
        {"name": "mk", "type": "mock", "answer": ["A"], "extra": ["B"],
         "latency": 0.1},
    ])
    assert set(reg.names()) == {"ext", "mk"}
    with pytest.raises(SpawnError):
        reg.get("nope")
    with pytest.raises(ValueError):
        ProverRegistry.from_config([{"name": "x", "type": "alien"}])
