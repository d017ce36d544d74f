"""Line/grid sweeps, boundary extraction and file round-trips."""

import json
import math

import numpy as np
import pytest

from dicke_trimer.sweep import (
    Axis,
    boundary_intersection,
    read_grid_json,
    read_line_csv,
    sweep_g_line,
    sweep_phase_diagram,
    write_grid_csv,
    write_grid_json,
    write_line_csv,
    write_line_json,
)


@pytest.fixture(scope="module")
def region6_line():
    return sweep_g_line(0.1, -0.1, np.linspace(0.9, 1.1, 21))


@pytest.fixture(scope="module")
def g_j2_grid():
    return sweep_phase_diagram(
        Axis("g", 0.9, 1.1, 21), Axis("J2", -0.2, -0.02, 16), fixed={"J1": 0.1})


class TestLineSweep:
    def test_phase_sequence(self, region6_line):
        phases = [r["phase"] for r in region6_line]
        seq = [p for i, p in enumerate(phases) if i == 0 or p != phases[i - 1]]
        assert seq == ["NP", "NSP", "FSP"]

    def test_no_failures(self, region6_line):
        assert all(not r["error"] for r in region6_line)

    def test_np_rows(self, region6_line):
        for r in region6_line:
            if r["phase"] == "NP":
                assert r["energy"] == pytest.approx(-1.5)
                assert r["alpha1"] == r["alpha2"] == r["alpha3"] == 0.0

    def test_b_tilde_column_sign(self, region6_line):
        gL = math.sqrt(1.08)
        for r in region6_line:
            assert (r["B_tilde"] > 0) == (r["g"] > gL)

    def test_spectrum_columns_sorted(self, region6_line):
        for r in region6_line:
            eps = [r[f"eps{i}"] for i in range(1, 7)]
            assert eps == sorted(eps)


class TestGridSweep:
    def test_boundaries_near_closed_forms(self, g_j2_grid):
        assert set(g_j2_grid.boundaries) == {"g_c_minus", "g_c_plus", "g_L"}
        for dev in g_j2_grid.analytic_deviation.values():
            assert dev < 1e-5

    def test_triple_point(self, g_j2_grid):
        crossing = boundary_intersection(g_j2_grid, "g_c_minus", "g_L")
        assert crossing is not None
        g_star, J2_star = crossing
        assert J2_star == pytest.approx(-1.0 / 11.0, abs=1e-3)
        assert g_star == pytest.approx(math.sqrt(1.2 * (1.0 - 2.0 / 11.0)), abs=1e-3)

    def test_cells_shape_and_metadata(self, g_j2_grid):
        assert len(g_j2_grid.cells) == 16
        assert all(len(row) == 21 for row in g_j2_grid.cells)
        assert g_j2_grid.metadata["resolution"] == [21, 16]
        assert "version" in g_j2_grid.metadata

    def test_j1_j2_grid_has_regions(self):
        grid = sweep_phase_diagram(
            Axis("J1", -0.3, 0.3, 4), Axis("J2", -0.3, 0.3, 4), fixed={"g": 1.1})
        regions = {c["region"] for row in grid.cells for c in row}
        assert regions - {None}

    def test_grid_requires_g(self):
        with pytest.raises(ValueError, match="include g"):
            sweep_phase_diagram(Axis("J1", -0.3, 0.3, 3), Axis("J2", -0.3, 0.3, 3))

    def test_axis_validation(self):
        with pytest.raises(ValueError):
            Axis("g", 0.0, 1.0, 1)
        with pytest.raises(ValueError):
            Axis("volume", 0.0, 1.0, 5)

    def test_workers_give_same_cells(self):
        kwargs = dict(axis_x=Axis("g", 0.9, 1.1, 5),
                      axis_y=Axis("J2", -0.2, -0.1, 4), fixed={"J1": 0.1})
        serial = sweep_phase_diagram(workers=1, **kwargs)
        parallel = sweep_phase_diagram(workers=2, **kwargs)
        assert serial.cells == parallel.cells


class TestSerialization:
    def test_line_csv_round_trip(self, region6_line, tmp_path):
        path = tmp_path / "line.csv"
        write_line_csv(region6_line, path)
        assert read_line_csv(path) == region6_line

    def test_line_json_metadata(self, region6_line, tmp_path):
        path = tmp_path / "line.json"
        write_line_json(region6_line, path, J1=0.1, J2=-0.1)
        doc = json.loads(path.read_text())
        assert doc["metadata"]["J1"] == 0.1
        assert "version" in doc["metadata"]
        assert len(doc["records"]) == len(region6_line)

    def test_grid_json_round_trip(self, g_j2_grid, tmp_path):
        path = tmp_path / "grid.json"
        write_grid_json(g_j2_grid, path)
        back = read_grid_json(path)
        assert back.cells == g_j2_grid.cells
        assert back.boundaries == g_j2_grid.boundaries
        assert back.axis_x == g_j2_grid.axis_x

    def test_grid_csv_row_count(self, g_j2_grid, tmp_path):
        path = tmp_path / "grid.csv"
        write_grid_csv(g_j2_grid, path)
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 1 + 21 * 16

    def test_deterministic_output(self, region6_line, tmp_path, monkeypatch):
        monkeypatch.setenv("DICKE_TRIMER_TIMESTAMP", "fixed")
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        write_line_json(region6_line, a, J1=0.1, J2=-0.1)
        write_line_json(region6_line, b, J1=0.1, J2=-0.1)
        assert a.read_bytes() == b.read_bytes()
