import json
import socket
import subprocess
import sys
import time
import urllib.request

import pytest
from fastapi.testclient import TestClient

from mathfind import jsonio
from mathfind.cli import main
from mathfind.service import create_app

from conftest import acceptance_corpus_path


@pytest.fixture(scope="module")
def built_index(tmp_path_factory):
    out = tmp_path_factory.mktemp("snap") / "index"
    code = main(["build", "--corpus", str(acceptance_corpus_path()), "--out", str(out)])
    assert code == 0
    return out


def test_build_counts(built_index, capsys, manifest):
    code = main(
        ["build", "--corpus", str(acceptance_corpus_path()), "--out", str(built_index)]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert f"{manifest['docs']} docs" in out
    assert f"{manifest['formulas']} formulas" in out
    assert "0 warnings" in out


def test_build_empty_corpus(tmp_path, capsys):
    src = tmp_path / "empty.jsonl"
    src.write_text("")
    code = main(["build", "--corpus", str(src), "--out", str(tmp_path / "out")])
    assert code == 0
    assert "0 docs" in capsys.readouterr().out


def test_build_malformed_line_exits_1(tmp_path, capsys):
    src = tmp_path / "bad.jsonl"
    src.write_text('{"id": "a", "title": "t", "text": ""}\n{broken\n')
    code = main(["build", "--corpus", str(src), "--out", str(tmp_path / "out")])
    assert code == 1
    assert "line 2" in capsys.readouterr().err


def test_build_missing_file_exits_1(tmp_path, capsys):
    code = main(["build", "--corpus", str(tmp_path / "none.jsonl"), "--out", str(tmp_path / "o")])
    assert code == 1


def test_query_human_readable(built_index, capsys, manifest):
    code = main(["query", "--index", str(built_index), "--math", "B_{p+n}"])
    assert code == 0
    out = capsys.readouterr().out
    assert manifest["bell_doc_id"] in out
    assert "total: 1" in out


def test_query_both_empty_exits_2(built_index, capsys):
    assert main(["query", "--index", str(built_index)]) == 2


def test_query_parse_error_exits_2(built_index, capsys):
    code = main(["query", "--index", str(built_index), "--math", "a?x^2+b?("])
    assert code == 2
    assert "7" in capsys.readouterr().err


def test_query_missing_index_exits_1(tmp_path, capsys):
    assert main(["query", "--index", str(tmp_path / "no"), "--math", "?w"]) == 1


def test_query_json_matches_service_body(built_index, capsys, snapshot):
    code = main(
        ["query", "--index", str(built_index), "--math", "B_{p+n}", "--json"]
    )
    assert code == 0
    cli_body = json.loads(capsys.readouterr().out)

    client = TestClient(create_app(snapshot))
    http_body = json.loads(client.post("/api/search", json={"math": "B_{p+n}"}).content)

    # timings are wall-clock measurements; everything else is byte-exact
    cli_body["timings"] = http_body["timings"] = {"text_ms": 0, "math_ms": 0}
    assert jsonio.dumps(cli_body) == jsonio.dumps(http_body)


def test_parse_command(capsys):
    code = main(["parse", "--latex", "x"])
    assert code == 0
    body = json.loads(capsys.readouterr().out)
    assert body == {"ok": True, "tree": {"k": "id", "name": "x"}, "canonical_latex": "x"}

    assert main(["parse", "--latex", "?x"]) == 2
    capsys.readouterr()
    assert main(["parse", "--latex", "?x", "--query"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["tree"] == {"k": "wild", "name": "x"}


def test_parse_paper_formulas(capsys):
    for latex in (
        r"B_{p+n} = B_n + B_{n+1} \bmod p \ \text{for all}\ n=0,1,2,\dots",
        r"p_1=ax_1^2+bx_2^2+\epsilon_1x_1y_1",
    ):
        assert main(["parse", "--latex", latex]) == 0
        body = json.loads(capsys.readouterr().out)
        assert body["ok"] is True


def test_serve_missing_snapshot_exits_1(tmp_path):
    assert main(["serve", "--index", str(tmp_path / "none"), "--listen", "127.0.0.1:0"]) == 1


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_serve_end_to_end(built_index, manifest):
    port = _free_port()
    proc = subprocess.Popen(
        [
            sys.executable,
            "-m",
            "mathfind.cli",
            "serve",
            "--index",
            str(built_index),
            "--listen",
            f"127.0.0.1:{port}",
            "--backend",
            "http://127.0.0.1:1/",
            "--backend",
            "http://127.0.0.1:2/",
        ],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    try:
        deadline = time.time() + 30
        body = None
        while time.time() < deadline:
            try:
                with urllib.request.urlopen(
                    f"http://127.0.0.1:{port}/healthz", timeout=1
                ) as r:
                    body = json.loads(r.read())
                break
            except Exception:
                if proc.poll() is not None:
                    raise AssertionError(proc.stderr.read().decode())
                time.sleep(0.2)
        assert body is not None, "server did not come up"
        assert body["docs"] == manifest["docs"]
        assert len(body["backends"]) == 2  # two --backend flags -> pool of 2
    finally:
        proc.terminate()
        proc.wait(timeout=10)
