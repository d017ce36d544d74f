"""Command line interface: flags, exit codes, artifacts."""

import json

import pytest

from dicke_trimer import __version__
from dicke_trimer.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSolve:
    def test_fsp_point(self, capsys):
        code, out, _ = run(capsys, "solve", "--g", "1.1", "--j1", "0.1",
                           "--j2", "0.1")
        assert code == 0
        assert "phase: FSP" in out
        assert "degeneracy 6" in out
        assert __version__ in out

    def test_np_point(self, capsys):
        code, out, _ = run(capsys, "solve", "--g", "0.5", "--j1", "0",
                           "--j2", "0")
        assert code == 0
        assert "phase: NP" in out

    def test_json_report(self, capsys):
        code, out, _ = run(capsys, "solve", "--g", "1.1", "--j1", "0.1",
                           "--j2", "0.1", "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["phase"] == "FSP"
        assert doc["degeneracy"] == 6
        assert doc["version"] == __version__
        assert len(doc["spectrum"]) == 6

    def test_invalid_hopping_exits_2(self, capsys):
        code, _, err = run(capsys, "solve", "--g", "1.0", "--j1", "0.6")
        assert code == 2
        payload = json.loads(err.strip().splitlines()[-1])
        assert "(-1/2, 1/2)" in payload["error"]

    def test_region_in_report(self, capsys):
        _, out, _ = run(capsys, "solve", "--g", "1.0", "--j1", "0.1",
                        "--j2", "-0.1")
        assert "hopping region:   6" in out


class TestSweep:
    def test_line_from_config(self, capsys, tmp_path):
        out_file = tmp_path / "line.csv"
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "mode": "line", "J1": 0.1, "J2": -0.1,
            "g_min": 0.9, "g_max": 1.1, "g_steps": 21,
            "output": str(out_file), "format": "csv",
        }))
        code, out, _ = run(capsys, "sweep", "--config", str(cfg))
        assert code == 0
        assert out_file.exists()
        assert "NP -> NSP" in out and "NSP -> FSP" in out

    def test_flags_override_config(self, capsys, tmp_path):
        out_file = tmp_path / "line.json"
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "mode": "line", "J1": 0.1, "J2": 0.1,
            "g_min": 0.7, "g_max": 1.0, "g_steps": 5, "format": "csv",
        }))
        code, _, _ = run(capsys, "sweep", "--config", str(cfg),
                         "--format", "json", "--output", str(out_file))
        assert code == 0
        doc = json.loads(out_file.read_text())
        assert doc["metadata"]["J1"] == 0.1
        assert len(doc["records"]) == 5

    def test_grid_sweep(self, capsys, tmp_path):
        out_file = tmp_path / "grid.json"
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "mode": "grid",
            "axis_x": {"name": "g", "min": 0.9, "max": 1.1, "steps": 11},
            "axis_y": {"name": "J2", "min": -0.2, "max": -0.05, "steps": 6},
            "fixed": {"J1": 0.1},
            "output": str(out_file), "format": "json", "workers": 1,
        }))
        code, out, _ = run(capsys, "sweep", "--config", str(cfg))
        assert code == 0
        assert "boundary" in out
        doc = json.loads(out_file.read_text())
        assert len(doc["cells"]) == 6

    def test_zero_step_axis_exits_2(self, capsys):
        code, _, err = run(capsys, "sweep", "--mode", "line", "--j1", "0.1",
                           "--j2", "0.1", "--g-min", "0.9", "--g-max", "1.0",
                           "--g-steps", "1")
        assert code == 2
        assert "g_steps" in err

    def test_missing_mode_exits_2(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{}")
        code, _, _ = run(capsys, "sweep", "--config", str(cfg))
        assert code == 2


class TestVerify:
    def test_formulas_scope(self, capsys):
        code, out, _ = run(capsys, "verify", "--scope", "formulas")
        assert code == 0
        assert out.count("[PASS]") >= 5
        assert "[FAIL]" not in out

    def test_unknown_scope_rejected(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "--scope", "everything"])
        assert exc.value.code == 2


class TestTopLevel:
    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_no_command_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2
