#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-
import csv
import io
import os
from math import sqrt

import numpy as np
import pytest

from setvalued import cli
from setvalued.models.jto import dumps, loads
from setvalued.models.sets import NormSpec

fixtures = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")


def fixture(name: str) -> str:
    return os.path.join(fixtures, name)


def run(command: str, name: str, out, *extra: str):
    code = cli.main([command, "--config", fixture(name), "--out", str(out), "--quiet"] + list(extra))
    raw = out.read_bytes() if out.exists() else b""
    return code, raw


def rows(raw: bytes):
    return list(csv.reader(io.StringIO(raw.decode())))


@pytest.mark.parametrize("name,expected", (("hausdorff_points.json", 2.0),
                                           ("hausdorff_square_origin.json", sqrt(2))))
def test_hausdorff(tmp_path, name, expected):
    code, raw = run("hausdorff", name, tmp_path / "out.json")
    assert code == cli.EXIT_OK
    report = loads(raw)
    assert report["distance"] == pytest.approx(expected, abs=1e-12)
    assert report["norm"] == "l2"
    assert max(report["excess_ab"], report["excess_ba"]) == report["distance"]


def test_geodesic_counterexample_fails(tmp_path):
    code, raw = run("geodesic-check", "geodesic_counterexample.json", tmp_path / "out.json")
    assert code == cli.EXIT_FAILURE
    report = loads(raw)
    assert not report["passed"]
    assert report["max_endpoint_residual"] == pytest.approx(sqrt(2) - 1, abs=1e-12)


def test_geodesic_polytopes(tmp_path):
    code, raw = run("geodesic-check", "geodesic_polytopes.json", tmp_path / "out.json")
    assert code == cli.EXIT_OK
    report = loads(raw)
    assert report["passed"]
    assert report["max_hyperbolicity_violation"] <= 1e-9


def test_porosity(tmp_path):
    code, raw = run("porosity", "porosity_square.json", tmp_path / "out.json")
    assert code == cli.EXIT_OK
    assert loads(raw)["hausdorff_gap"] == pytest.approx(0.75, abs=1e-9)


def test_project(tmp_path):
    code, raw = run("project", "project_segment.json", tmp_path / "out.json")
    assert code == cli.EXIT_OK
    face = loads(raw)
    assert face["value"] == pytest.approx(1.0, abs=1e-9)
    assert face["face_diameter"] == pytest.approx(1.0, abs=1e-6)


def test_rotundify(tmp_path):
    code, raw = run("rotundify", "rotundify_square.json", tmp_path / "out.json")
    assert code == cli.EXIT_OK
    report = loads(raw)
    assert report["rotundity"]["passed"]
    assert report["set"]["source_gap"] < 0.2


def test_perturb(tmp_path):
    code, raw = run("perturb", "perturb_desk.json", tmp_path / "out.json")
    assert code == cli.EXIT_OK
    report = loads(raw)
    assert report["map"]["kind"] == "perturbed"
    assert report["map"]["inner"]["kind"] == "blend"
    assert report["lip_bound"] == pytest.approx(max(0.4 / (1 - 0.25 / 0.4), 0.4 + 0.2 / 0.25))
    assert report["d_inf_estimate"] <= 2 * 0.25


def test_trajectory_contraction(tmp_path):
    code, raw = run("trajectory", "trajectory_contraction.json", tmp_path / "out.csv")
    assert code == cli.EXIT_OK
    table = rows(raw)
    assert table[0] == ["iter", "x0", "x1", "step_norm", "face_diameter", "residual", "status"]
    assert table[-1][-1] == "fixed_point"
    assert float(table[-1][5]) <= 1e-8


def test_trajectory_branching(tmp_path):
    code, raw = run("trajectory", "trajectory_branching.json", tmp_path / "out.csv")
    assert code == cli.EXIT_BRANCHED
    table = rows(raw)
    assert table[1][-1] == "branched"
    assert float(table[1][4]) == pytest.approx(1.0, abs=1e-6)


def test_trajectory_constant(tmp_path):
    code, raw = run("trajectory", "trajectory_constant.json", tmp_path / "out.csv")
    assert code == cli.EXIT_OK
    assert len(rows(raw)) <= 3


def test_trajectory_capped(tmp_path):
    code, raw = run("trajectory", "trajectory_capped.json", tmp_path / "out.csv")
    assert code == cli.EXIT_MAX_ITER
    assert rows(raw)[-1][-1] == "max_iter"


def test_an_sample(tmp_path):
    code, raw = run("an-sample", "an_sample_branching.json", tmp_path / "out.json")
    assert code == cli.EXIT_OK
    assert loads(raw)["pass_fraction"] == 0.0


def test_genericity(tmp_path):
    code, raw = run("genericity", "genericity_desk.json", tmp_path / "out.json")
    assert code == cli.EXIT_OK
    certificate = loads(raw)
    assert certificate["all_passed"]
    assert certificate["d_inf_f_g"] < 0.1
    assert certificate["max_observed_face_diam"] <= 1 / 3
    again_code, again = run("genericity", "genericity_desk.json", tmp_path / "again.json")
    assert again_code == code
    assert again == raw


def test_genericity_eps_too_small(tmp_path):
    code, raw = run("genericity", "genericity_tiny_eps.json", tmp_path / "out.json")
    assert code == cli.EXIT_FAILURE
    report = loads(raw)
    assert report["status"] == "failure"
    assert report["reason"]


def test_rerun_is_byte_identical(tmp_path):
    _, first = run("rotundify", "rotundify_square.json", tmp_path / "a.json")
    _, second = run("rotundify", "rotundify_square.json", tmp_path / "b.json")
    assert first == second


def test_seed_flag(tmp_path):
    code, raw = run("an-sample", "an_sample_branching.json", tmp_path / "out.json", "--seed", "5")
    assert code == cli.EXIT_OK
    assert loads(raw)["worst_diam"] == pytest.approx(1.0, abs=1e-6)


def test_ini_overrides(tmp_path):
    ini = tmp_path / "setvalued.ini"
    ini.write_text("[TOLERANCES]\nmax_iter = 2\n")
    code, raw = run("trajectory", "trajectory_constant.json", tmp_path / "out.csv", "--ini", str(ini))
    assert code == cli.EXIT_OK
    assert len(rows(raw)) == 3


def test_stdout(capsys):
    code = cli.main(["hausdorff", "--config", fixture("hausdorff_points.json"), "--quiet"])
    assert code == cli.EXIT_OK
    assert loads(capsys.readouterr().out)["distance"] == pytest.approx(2.0)


class TestUsage:
    def test_no_arguments(self):
        assert cli.main([]) == cli.EXIT_USAGE

    def test_unknown_command(self, tmp_path):
        code, _ = run("spiral", "hausdorff_points.json", tmp_path / "out.json")
        assert code == cli.EXIT_USAGE

    def test_command_mismatch(self, tmp_path):
        code, raw = run("porosity", "hausdorff_points.json", tmp_path / "out.json")
        assert code == cli.EXIT_USAGE
        assert raw == b""

    def test_missing_config(self, tmp_path):
        assert cli.main(["hausdorff", "--config", str(tmp_path / "absent.json")]) == cli.EXIT_USAGE

    def test_broken_json(self, tmp_path):
        config = tmp_path / "broken.json"
        config.write_text("{not json")
        assert cli.main(["hausdorff", "--config", str(config)]) == cli.EXIT_USAGE

    def test_missing_parameter(self, tmp_path):
        config = tmp_path / "porosity.json"
        config.write_text('{"inputs": {"c": {"dim": 1, "vertices": [[0], [1]]}, '
                          '"k": {"dim": 1, "vertices": [[0]]}}}')
        assert cli.main(["porosity", "--config", str(config), "--quiet"]) == cli.EXIT_USAGE

    def test_missing_input_file(self, tmp_path):
        config = tmp_path / "trajectory.json"
        config.write_text('{"inputs": {"map": "nowhere.json"}, "params": {"x0": [0, 0]}}')
        assert cli.main(["trajectory", "--config", str(config), "--quiet"]) == cli.EXIT_USAGE

    def test_unknown_map_kind(self, tmp_path):
        config = tmp_path / "trajectory.json"
        config.write_text('{"inputs": {"map": {"kind": "spiral"}}, "params": {"x0": [0, 0]}}')
        assert cli.main(["trajectory", "--config", str(config), "--quiet"]) == cli.EXIT_USAGE

    def test_bad_norm(self, tmp_path):
        config = tmp_path / "hausdorff.json"
        config.write_text('{"global": {"norm": "l7"}}')
        assert cli.main(["hausdorff", "--config", str(config), "--quiet"]) == cli.EXIT_USAGE


@pytest.mark.parametrize("norm,expected", ((NormSpec.EUCLIDEAN, sqrt(2)), (NormSpec.LINF, 1.0), (NormSpec.L1, 2.0)))
def test_hausdorff_polytope_and_points(tmp_path, norm, expected):
    config = tmp_path / "hausdorff.json"
    config.write_bytes(dumps({
        "command": "hausdorff",
        "inputs": {"a": {"dim": 2, "vertices": [[-1, -1], [-1, 1], [1, -1], [1, 1]]},
                   "b": {"kind": "points", "dim": 2, "points": [[-1, 0], [1, 0]]}},
        "global": {"norm": norm.value},
    }))
    out = tmp_path / "out.json"
    assert cli.main(["hausdorff", "--config", str(config), "--out", str(out), "--quiet"]) == cli.EXIT_OK
    report = loads(out.read_bytes())
    assert report["distance"] == pytest.approx(expected, abs=1e-9)
    assert report["excess_ba"] == 0.0
    gaps = norm.norm(np.array([[-1, 0], [1, 0]]) - np.array(report["witness_a"]))
    assert float(np.min(gaps)) == pytest.approx(expected, abs=1e-9)


def test_log_file_per_command(tmp_path):
    ini = tmp_path / "setvalued.ini"
    ini.write_text(f"[DEFAULT]\nlogdir = {tmp_path}\nloglevel = INFO\n")
    code = cli.main(["hausdorff", "--config", fixture("hausdorff_points.json"), "--out", str(tmp_path / "out.json"),
                     "--ini", str(ini)])
    assert code == cli.EXIT_OK
    assert "hausdorff finished" in (tmp_path / "setvalued-hausdorff.log").read_text()
