import json
import os
import signal
import socket
import subprocess
import sys
import time
from pathlib import Path

import httpx
from click.testing import CliRunner

from rallypoint.cli import main

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


class TestRunScenario:
    def test_park_scenario_exits_zero(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(main, ["run-scenario",
                                      str(SCENARIOS / "park.jsonl"),
                                      "--data-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        lines = [json.loads(l) for l in result.output.strip().splitlines()]
        assert all(line["status"] == "pass" for line in lines)

    def test_failing_expect_exits_nonzero(self, tmp_path):
        script = tmp_path / "bad.jsonl"
        script.write_text('{"expect": {"phase": "Voting"}}\n')
        result = CliRunner().invoke(main, ["run-scenario", str(script)])
        assert result.exit_code == 1
        assert '"status": "fail"' in result.output

    def test_malformed_script_exits_two(self, tmp_path):
        script = tmp_path / "broken.jsonl"
        script.write_text('{"advance": "soon"}\n')
        result = CliRunner().invoke(main, ["run-scenario", str(script)])
        assert result.exit_code == 2


def _free_port():
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def test_serve_smoke(tmp_path):
    port = _free_port()
    proc = subprocess.Popen(
        [sys.executable, "-m", "rallypoint.cli", "serve",
         "--listen", f"127.0.0.1:{port}", "--data-dir", str(tmp_path)],
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT,
        cwd=str(Path(__file__).resolve().parent.parent))
    base = f"http://127.0.0.1:{port}"
    try:
        for _ in range(100):
            try:
                if httpx.get(f"{base}/healthz", timeout=1.0).status_code == 200:
                    break
            except httpx.TransportError:
                time.sleep(0.1)
        else:
            raise AssertionError("server never came up")
        body = {
            "name": "Park cleanup",
            "rationale": "our park deserves better",
            "hashtag": "#parkday",
            "selection_deadline": "2030-01-02T12:00:00Z",
            "execution_time": "2030-01-03T12:00:00Z",
            "creator": "haoqi",
        }
        created = httpx.post(f"{base}/missions", json=body, timeout=5.0)
        assert created.status_code == 201
        view = httpx.get(f"{base}/missions/parkday", timeout=5.0).json()
        assert view["phase"] == "Ideation"
        feed = httpx.get(f"{base}/feed", timeout=5.0).json()
        assert [p["kind"] for p in feed] == ["Kickoff"]
    finally:
        proc.send_signal(signal.SIGINT)
        try:
            proc.wait(timeout=10)
        except subprocess.TimeoutExpired:
            proc.kill()
