import json
import re
import socket
import time

import pytest
from fastapi.testclient import TestClient

from conftest import DEMO_RECORDS, corpus_text
from hammer.knowledge import ingest
from hammer.provers import MockProver, ProverRegistry
from hammer.service import (
    AdvisorState, ServiceConfig, TcpServer, create_app, render_transcript,
)
from hammer.service.tcp import MAX_LINE, split_project_prefix


@pytest.fixture
def state(tmp_path, demo_corpus):
    ingest(tmp_path / "projects", "demo", [demo_corpus])
    cfg = ServiceConfig(project_root=str(tmp_path / "projects"),
                        tcp_port=0, http_port=1,
                        upload_tokens=["tok123"], budget_s=10)
    reg = ProverRegistry().add(
        MockProver("default", answer_set={"ADD_ZERO"},
                   extra_reported={"ADD_SYM"}))
    return AdvisorState(cfg, registry=reg)


def tcp_ask(server, line: bytes) -> bytes:
    with socket.create_connection(server.address, timeout=30) as s:
        s.sendall(line)
        buf = b""
        while True:
            chunk = s.recv(65536)
            if not chunk:
                return buf
            buf += chunk


# every legal transcript line (leading progress dots stripped)
LINE_GRAMMAR = re.compile(
    r"^(\* Read OK"
    r"|\* Theorem! Time: \d+\.\d\ds Prover: \S+ Hints: \d+ Str: \S+"
    r"|\* Minimizing, current no: \d+"
    r"|\* Result:( \S+)*"
    r"|\* Replaying: (SUGGESTED|SUCCESS) \(\d+\.\d\ds\): .+"
    r"|\* Error: .*"
    r"|\* NoProof"
    r"|\* Loadavg: .*"
    r")$")


def assert_transcript_grammar(text: str):
    for line in text.splitlines():
        stripped = line.lstrip(".")
        if not stripped:
            continue  # a line of progress dots alone
        assert LINE_GRAMMAR.match(stripped), repr(line)


def test_split_project_prefix():
    assert split_project_prefix("project:demo;!x. x = x") == ("demo", "!x. x = x")
    assert split_project_prefix("!x. x = x") == (None, "!x. x = x")
    assert split_project_prefix("project:unterminated") == \
        (None, "project:unterminated")


def test_tcp_success_transcript(state):
    srv = TcpServer(state, host="127.0.0.1", port=0).start()
    try:
        out = tcp_ask(srv, b"project:demo;!k. k + 0 = k\n").decode()
    finally:
        srv.stop()
    lines = [l.lstrip(".") for l in out.splitlines() if l.lstrip(".")]
    assert lines[0] == "* Read OK"
    assert lines[1].startswith("* Theorem! Time: ")
    assert "Prover: default" in lines[1]
    assert any(l.startswith("* Minimizing, current no: ") for l in lines)
    assert "* Result: ADD_ZERO" in lines
    assert lines[-1].startswith("* Replaying: SUGGESTED (")
    assert lines[-1].endswith("): MESON_TAC[ADD_ZERO]")
    assert_transcript_grammar(out)


def test_tcp_default_project_and_noproof(state):
    # a backend whose answer is never in the corpus cannot prove anything
    state.registry = ProverRegistry().add(
        MockProver("default", answer_set={"NOT_IN_CORPUS"}))
    srv = TcpServer(state, host="127.0.0.1", port=0).start()
    try:
        out = tcp_ask(srv, b"!k. k * k = k\n").decode()
    finally:
        srv.stop()
    assert "* Read OK" in out
    assert "* NoProof" in out
    assert_transcript_grammar(out)


def test_tcp_parse_error_line(state):
    srv = TcpServer(state, host="127.0.0.1", port=0).start()
    try:
        out = tcp_ask(srv, b"project:demo;!x. x = \n").decode()
    finally:
        srv.stop()
    assert out.splitlines()[0].startswith("* Error: ")
    assert_transcript_grammar(out)


def test_tcp_oversized_line_rejected(state):
    srv = TcpServer(state, host="127.0.0.1", port=0).start()
    try:
        out = tcp_ask(srv, b"x" * (MAX_LINE + 10) + b"\n").decode()
    finally:
        srv.stop()
    assert out.startswith("* Error: ")
    assert "64 KiB" in out


def test_tcp_unknown_project(state):
    srv = TcpServer(state, host="127.0.0.1", port=0).start()
    try:
        out = tcp_ask(srv, b"project:ghost;T\n").decode()
    finally:
        srv.stop()
    assert out.startswith("* Error: ")


def test_tcp_status_trailer_flag(state):
    state.config.status_trailer = True
    srv = TcpServer(state, host="127.0.0.1", port=0).start()
    try:
        out = tcp_ask(srv, b"project:demo;!k. k + 0 = k\n").decode()
    finally:
        srv.stop()
        state.config.status_trailer = False
    assert out.splitlines()[-1].startswith("* Loadavg: ")
    assert_transcript_grammar(out)


def test_tcp_cached_replay_byte_identical(state):
    srv = TcpServer(state, host="127.0.0.1", port=0).start()
    try:
        first = tcp_ask(srv, b"project:demo;!w. w + 0 = w\n")
        second = tcp_ask(srv, b"project:demo;!w. w + 0 = w\n")
    finally:
        srv.stop()
    assert second == first


def test_wire_fuzz_all_lines_match_grammar(state):
    """Unstructured input never produces an out-of-grammar transcript line."""
    import random
    rng = random.Random(99)
    srv = TcpServer(state, host="127.0.0.1", port=0).start()
    alphabet = "!?~()=<>/\\&+-*. abcxyz01;:\t\"'%$#@"
    try:
        for i in range(400):
            n = rng.randint(0, 60)
            payload = "".join(rng.choice(alphabet) for _ in range(n))
            out = tcp_ask(srv, payload.encode() + b"\n").decode()
            assert_transcript_grammar(out)
    finally:
        srv.stop()


# -- HTTP API -----------------------------------------------------------------

@pytest.fixture
def client(state):
    return TestClient(create_app(state))


def test_http_projects_listing(client):
    data = client.get("/projects").json()
    assert [p["name"] for p in data] == ["demo"]
    assert data[0]["theorems"] == 5


def test_http_query_event_stream(client):
    r = client.post("/query", json={"project": "demo", "goal": "!k. k + 0 = k"})
    assert r.status_code == 200
    events = r.json()["events"]
    kinds = [e["kind"] for e in events]
    assert kinds[0] == "read_ok"
    assert "theorem" in kinds and "tactic" in kinds
    assert kinds[-1] == "outcome"
    # the machine events render to the same transcript grammar
    assert_transcript_grammar(render_transcript(events))


def test_http_query_unknown_project(client):
    r = client.post("/query", json={"project": "ghost", "goal": "T"})
    assert r.status_code == 404


def test_http_query_validation(client):
    assert client.post("/query", json={"project": "demo"}).status_code == 422
    r = client.post("/query", json={"project": "demo", "goal": "T",
                                    "budget": -1})
    assert r.status_code == 422


def test_http_upload_lifecycle(client, demo_corpus, state):
    # no/bad token
    assert client.post("/project/up1", json={"corpus": demo_corpus}).status_code == 401
    r = client.post("/project/up1", json={"corpus": demo_corpus},
                    headers={"Authorization": "Bearer nope"})
    assert r.status_code == 401
    import pathlib
    assert not (pathlib.Path(state.config.project_root) / "up1").exists()

    # good token: async job to completion
    r = client.post("/project/up1", json={"corpus": demo_corpus},
                    headers={"Authorization": "Bearer tok123"})
    assert r.status_code == 202
    job_id = r.json()["id"]
    for _ in range(200):
        j = client.get(f"/job/{job_id}").json()
        if j["status"] != "running":
            break
        time.sleep(0.05)
    assert j["status"] == "done"
    assert j["stage"] == "finalize"
    assert "up1" in [p["name"] for p in client.get("/projects").json()]


def test_http_upload_failure_reported(client):
    r = client.post("/project/bad1", json={"corpus": '{"kind":"junk"}'},
                    headers={"Authorization": "Bearer tok123"})
    job_id = r.json()["id"]
    for _ in range(200):
        j = client.get(f"/job/{job_id}").json()
        if j["status"] != "running":
            break
        time.sleep(0.05)
    assert j["status"] == "failed"
    assert "unknown kind" in j["error"]


def test_http_job_not_found(client):
    assert client.get("/job/nothere").status_code == 404


def test_http_html_pages(client):
    r = client.get("/project/demo/html/index.html")
    assert r.status_code == 200
    assert "DOUBLE_THM" in r.text
    assert client.get("/project/demo/html/missing.html").status_code == 404
    assert client.get("/project/ghost/html/index.html").status_code == 404


def test_config_validation():
    with pytest.raises(ValueError):
        ServiceConfig(budget_s=0)
    with pytest.raises(ValueError):
        ServiceConfig(tcp_port=9000, http_port=9000)


def test_config_env_overrides(monkeypatch):
    monkeypatch.setenv("HAMMER_TCP_PORT", "7001")
    monkeypatch.setenv("HAMMER_BUDGET", "12.5")
    monkeypatch.setenv("HAMMER_TOKENS", "a,b")
    cfg = ServiceConfig.from_env()
    assert cfg.tcp_port == 7001
    assert cfg.budget_s == 12.5
    assert cfg.upload_tokens == ["a", "b"]
