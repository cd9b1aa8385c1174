import json

from click.testing import CliRunner

from conftest import corpus_text
from hammer.cli import main


def _write_corpus(path, records):
    path.write_text(corpus_text(records), encoding="utf-8")


ALIAS_RECORDS = [
    {"kind": "def", "symbol": "dbl", "type": "num->num", "body": "\\n. n + n"},
    {"kind": "def", "symbol": "twice", "type": "num->num", "body": "\\m. m + m"},
    {"kind": "thm", "name": "ADD_ZERO", "statement": "!n. n + 0 = n", "deps": []},
    {"kind": "thm", "name": "LE_REFL", "statement": "!n. n <= n",
     "deps": ["ADD_ZERO"]},
]


def _provers_config(tmp_path):
    p = tmp_path / "provers.json"
    p.write_text(json.dumps([
        {"name": "default", "type": "mock", "answer": ["ADD_ZERO"]},
    ]))
    cfg = tmp_path / "service.json"
    cfg.write_text(json.dumps({
        "project_root": str(tmp_path / "projects"),
        "provers_file": str(p),
        "budget_s": 10,
    }))
    return cfg


def _ingest(runner, tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    _write_corpus(corpus, ALIAS_RECORDS)
    res = runner.invoke(main, ["--projects", str(tmp_path / "projects"),
                               "ingest", "demo", str(corpus)])
    assert res.exit_code == 0, res.output
    return res


def test_ingest_prints_stages_and_stats(tmp_path):
    runner = CliRunner()
    res = _ingest(runner, tmp_path)
    assert "[parse]" in res.output
    assert "[finalize]" in res.output
    assert '"theorems": 2' in res.output


def test_ingest_bad_corpus_fails(tmp_path):
    runner = CliRunner()
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"kind":"junk"}\n')
    res = runner.invoke(main, ["--projects", str(tmp_path / "projects"),
                               "ingest", "demo", str(bad)])
    assert res.exit_code == 1
    assert "error" in res.output


def test_query_prints_transcript(tmp_path):
    runner = CliRunner()
    _ingest(runner, tmp_path)
    cfg = _provers_config(tmp_path)
    res = runner.invoke(main, ["--config", str(cfg), "query", "-p", "demo",
                               "!k. k + 0 = k"])
    assert res.exit_code == 0, res.output
    assert "* Read OK" in res.output
    assert "MESON_TAC[ADD_ZERO]" in res.output


def test_advice_prints_only_tactic(tmp_path):
    runner = CliRunner()
    _ingest(runner, tmp_path)
    cfg = _provers_config(tmp_path)
    res = runner.invoke(main, ["--config", str(cfg), "advice", "-p", "demo",
                               "!k. k + 0 = k"])
    assert res.exit_code == 0, res.output
    assert res.output.strip() == "MESON_TAC[ADD_ZERO]"


def test_missing_project_exit_2(tmp_path):
    runner = CliRunner()
    cfg = _provers_config(tmp_path)
    res = runner.invoke(main, ["--config", str(cfg), "query", "-p", "ghost", "T"])
    assert res.exit_code == 2
    res = runner.invoke(main, ["--config", str(cfg), "report", "dupes", "ghost"])
    assert res.exit_code == 2


def test_report_dupes_prints_alias_group(tmp_path):
    runner = CliRunner()
    _ingest(runner, tmp_path)
    res = runner.invoke(main, ["--projects", str(tmp_path / "projects"),
                               "report", "dupes", "demo"])
    assert res.exit_code == 0
    assert "dbl twice" in res.output


def test_report_reuse_row(tmp_path):
    runner = CliRunner()
    _ingest(runner, tmp_path)
    corpus = tmp_path / "corpus.jsonl"
    res = runner.invoke(main, ["--projects", str(tmp_path / "projects"),
                               "ingest", "demo2", str(corpus)])
    assert res.exit_code == 0
    res = runner.invoke(main, ["--projects", str(tmp_path / "projects"),
                               "report", "reuse", "demo2", "demo"])
    assert res.exit_code == 0, res.output
    row = json.loads(res.output)
    assert row["unique_conjuncts"] == 2
    assert row["in_previous"] == 2
