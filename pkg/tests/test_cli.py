"""Command-line interface: outputs, formats, and exit codes."""

import json
import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest

from fovea.cli import main
from fovea.fixtures import mini_scenario
from fovea.model_io import canonical_json
from fovea.protocol import SessionEngine
from fovea.simulator import PolicyConfig

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "models"
MINI = str(MODELS / "mini.model.json")
MINI_T = str(MODELS / "mini_t.model.json")
TRIAGE = str(MODELS / "triage.model.json")
MINI_SCN = str(MODELS / "mini.scenario.json")
MINI_T_SCN = str(MODELS / "mini_t.scenario.json")
OMS_SCN = str(MODELS / "oms.scenario.json")


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def jsonl(out):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


class TestValidate:
    def test_valid_model(self, capsys):
        code, out, _ = run_cli(capsys, "validate", MINI)
        assert code == 0
        assert "ok" in out

    def test_invalid_model_lists_problems(self, capsys, tmp_path):
        doc = json.loads(Path(MINI).read_text())
        doc["cpts"][0]["rows"][""] = [0.9, 0.2]
        bad = tmp_path / "bad.model.json"
        bad.write_text(json.dumps(doc))
        code, out, err = run_cli(capsys, "validate", str(bad))
        assert code == 1
        assert "row sums" in out + err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "validate", str(tmp_path / "nope.json"))
        assert code == 1

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2


class TestInfer:
    def test_text_output(self, capsys):
        code, out, _ = run_cli(capsys, "infer", MINI, "S1=high")
        assert code == 0
        assert "p(leak) = 0.692308" in out

    def test_json_evidence(self, capsys):
        code, out, _ = run_cli(
            capsys, "infer", MINI, '{"S1":"high","S2":"high"}',
            "--format", "jsonl",
        )
        assert code == 0
        (row,) = jsonl(out)
        assert row["posterior"]["leak"] == pytest.approx(81 / 85, abs=1e-9)

    def test_query_other_variable(self, capsys):
        code, out, _ = run_cli(
            capsys, "infer", MINI, "S1=high", "--query", "S2", "--format", "jsonl"
        )
        assert code == 0
        (row,) = jsonl(out)
        assert row["posterior"]["high"] == pytest.approx(8.5 / 13, abs=1e-9)

    def test_bad_evidence_exits_1(self, capsys):
        code, _, err = run_cli(capsys, "infer", MINI, "S9=high")
        assert code == 1
        assert err


class TestMetrics:
    def test_evri_text(self, capsys):
        code, out, _ = run_cli(
            capsys, "metrics", "evri", MINI, "--e", "S1",
            "--full", "S1=high,S2=high",
        )
        assert code == 0
        assert "evri = 0.552941" in out
        assert "continue -> halt" in out

    def test_evri_jsonl_schema(self, capsys):
        code, out, _ = run_cli(
            capsys, "metrics", "evri", MINI, "--e", "S1",
            "--full", "S1=high,S2=high", "--format", "jsonl",
        )
        (row,) = jsonl(out)
        assert row["subset"] == ["S1"]
        assert row["metric"] == "evri"
        assert row["value"] == pytest.approx(47 / 85, abs=1e-9)
        assert row["action_before"] == "continue"
        assert row["action_after"] == "halt"

    def test_nevri_with_costs(self, capsys):
        code, out, _ = run_cli(
            capsys, "metrics", "nevri", MINI_T, "--e", "S2", "--shown", "S1",
            "--full", "S1=high,S2=high", "--rtm-cost", "1", "--format", "jsonl",
        )
        assert code == 0
        (row,) = jsonl(out)
        assert row["value"] == pytest.approx(-0.06, abs=1e-9)

    def test_evdi_needs_user_model(self, capsys):
        code, _, err = run_cli(
            capsys, "metrics", "evdi", MINI, "--e", "S1",
            "--full", "S1=high,S2=high",
        )
        assert code == 1

    def test_evdi_with_user_file(self, capsys):
        code, out, _ = run_cli(
            capsys, "metrics", "evdi", MINI, "--e", "S1",
            "--full", "S1=high,S2=high",
            "--user", str(MODELS / "mini_novice.user.json"),
            "--format", "jsonl",
        )
        assert code == 0
        (row,) = jsonl(out)
        # the novice cannot read S1, so showing it is worthless
        assert row["value"] == pytest.approx(0.0, abs=1e-12)

    def test_overlapping_sets_exit_1(self, capsys):
        code, _, err = run_cli(
            capsys, "metrics", "evri", MINI, "--e", "S1", "--shown", "S1",
            "--full", "S1=high,S2=high",
        )
        assert code == 1


class TestPlan:
    def test_subset(self, capsys):
        code, out, _ = run_cli(
            capsys, "plan", "subset", MINI, "--full", "S1=high,S2=high",
            "--format", "jsonl",
        )
        assert code == 0
        (row,) = jsonl(out)
        assert row["subset"] == ["S1"]
        assert row["value"] == pytest.approx(47 / 85, abs=1e-9)

    def test_minimal(self, capsys):
        code, out, _ = run_cli(
            capsys, "plan", "minimal", MINI, "--full", "S1=high,S2=high"
        )
        assert code == 0
        assert "S1=high" in out
        assert "S2" not in out.replace("S1", "")

    def test_highlight(self, capsys):
        code, out, _ = run_cli(
            capsys, "plan", "highlight", TRIAGE,
            "--full", "P=high,Q=low,R=low", "--format", "jsonl",
        )
        assert code == 0
        (row,) = jsonl(out)
        assert [h["id"] for h in row["highlights"]] == ["Q", "R"]
        assert row["highlights"][0]["intensity"] == pytest.approx(1.0)

    def test_aux(self, capsys):
        code, out, _ = run_cli(
            capsys, "plan", "aux", MINI_SCN, "--full", "S1=high,S2=low",
            "--format", "jsonl",
        )
        assert code == 0
        (row,) = jsonl(out)
        assert row["aux"] == ["backup"]

    def test_telescope(self, capsys):
        code, out, _ = run_cli(
            capsys, "plan", "telescope", OMS_SCN,
            "--full",
            "s_he=nominal,s_he_trend=flat,s_left=low,s_right=nominal,"
            "s_left_pc=low,s_right_pc=nominal",
            "--phase", "burn", "--format", "jsonl",
        )
        assert code == 0
        (row,) = jsonl(out)
        assert row["levels"]["left_oms"] >= 1
        assert row["levels"]["right_oms"] == 0


class TestSimulate:
    def test_single_episode_text(self, capsys):
        code, out, _ = run_cli(capsys, "simulate", MINI_SCN)
        assert code == 0
        assert "halt" in out

    def test_policy_comparison_rows(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", MINI_T_SCN,
            "--policy", "minimal,everything", "--reps", "10",
            "--rtm-cost", "1", "--format", "jsonl",
        )
        assert code == 0
        rows = {r["policy"]: r for r in jsonl(out)}
        assert set(rows) == {"minimal", "everything"}
        assert rows["minimal"]["episodes"] == 10
        assert rows["minimal"]["mean_utility"] > rows["everything"]["mean_utility"]

    def test_episode_log_and_report(self, capsys, tmp_path):
        log = tmp_path / "episode.jsonl"
        code, _, _ = run_cli(capsys, "simulate", MINI_SCN, "--log", str(log))
        assert code == 0
        assert log.exists()
        code, out, _ = run_cli(capsys, "report", str(log))
        assert code == 0
        assert "action=halt" in out
        assert "mean utility" in out

    def test_operator_from_user_file(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", MINI_SCN,
            "--operator", str(MODELS / "mini_novice.user.json"),
            "--format", "jsonl",
        )
        assert code == 0

    def test_unknown_policy_exits_1(self, capsys):
        code, _, err = run_cli(
            capsys, "simulate", MINI_SCN, "--policy", "psychic"
        )
        assert code == 1


class TestReplay:
    def _write_session_log(self, path):
        scn = mini_scenario(7)
        eng = SessionEngine(scn, PolicyConfig("managed", "managed"), "s-cli")
        eng.start()
        eng.handle({"type": "tick"})
        eng.handle({"type": "expand", "subsystem": "plant", "level": 1})
        eng.handle({"type": "tick"})
        eng.handle({"type": "action", "n": 1, "id": "halt"})
        path.write_text(
            "\n".join(canonical_json(r) for r in eng.log) + "\n", encoding="utf-8"
        )

    def test_faithful_log_verifies(self, capsys, tmp_path):
        log = tmp_path / "session.jsonl"
        self._write_session_log(log)
        code, out, _ = run_cli(capsys, "replay", MINI_SCN, str(log))
        assert code == 0

    def test_tampered_log_fails(self, capsys, tmp_path):
        log = tmp_path / "session.jsonl"
        self._write_session_log(log)
        lines = log.read_text().splitlines()
        for i, line in enumerate(lines):
            record = json.loads(line)
            if "out" in record and record["out"]["type"] == "directive":
                record["out"]["levels"]["plant"] = 9
                lines[i] = canonical_json(record)
                break
        log.write_text("\n".join(lines) + "\n")
        code, out, err = run_cli(capsys, "replay", MINI_SCN, str(log))
        assert code == 1


class TestServeProcess:
    def test_serve_announces_and_speaks_ndjson(self):
        proc = subprocess.Popen(
            [sys.executable, "-m", "fovea", "serve", MINI_SCN,
             "--lockstep", "--port", "0"],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
            cwd=str(ROOT),
        )
        try:
            line = proc.stdout.readline()
            info = json.loads(line)["listening"]
            with socket.create_connection(
                (info["host"], info["port"]), timeout=5
            ) as sock:
                sock.settimeout(5)
                stream = sock.makefile("rw", encoding="utf-8", newline="\n")
                hello = json.loads(stream.readline())
                assert hello["type"] == "hello"
                stream.write(json.dumps({"type": "tick"}) + "\n")
                stream.flush()
                types = [json.loads(stream.readline())["type"] for _ in range(3)]
                assert types == ["frame", "inference", "directive"]
        finally:
            proc.terminate()
            try:
                proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait(timeout=5)
