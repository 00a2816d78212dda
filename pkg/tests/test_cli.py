import json

import numpy as np
import pytest

from covchan.channels import KrausSet
from covchan.cli import main
from covchan.linalg import random_unitary, spawn_rng
from covchan.serialization import (
    InputError,
    matrix_to_obj,
    parse_kraus_set,
    parse_matrix,
    parse_scenario_config,
)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
S2 = 1.0 / np.sqrt(2.0)


def _kraus_obj(ops):
    return {"dim": ops[0].shape[0], "ops": [matrix_to_obj(op) for op in ops]}


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def fixtures(tmp_path):
    bell = np.zeros((4, 4), dtype=complex)
    for i in (0, 3):
        for j in (0, 3):
            bell[i, j] = 0.5
    return {
        "ident": _write(tmp_path, "ident.json", _kraus_obj([I2])),
        "flip": _write(tmp_path, "flip.json", _kraus_obj([X])),
        "dephase": _write(tmp_path, "dephase.json", _kraus_obj([S2 * I2, S2 * Z])),
        "project": _write(
            tmp_path,
            "project.json",
            _kraus_obj([np.diag([1, 0]).astype(complex), np.diag([0, 1]).astype(complex)]),
        ),
        "lam_ident": _write(tmp_path, "lam_ident.json", matrix_to_obj(I2)),
        "k1_ident": _write(tmp_path, "k1_ident.json", matrix_to_obj(I2)),
        "k1_bad": _write(
            tmp_path, "k1_bad.json", matrix_to_obj(np.diag([1.0, 2.0]).astype(complex))
        ),
        "scenario": _write(
            tmp_path,
            "scenario.json",
            {
                "dim_a": 2,
                "dim_b": 2,
                "initial_state": matrix_to_obj(bell),
                "frame": matrix_to_obj(np.eye(4)),
                "interventions": [
                    {
                        "label": "z-meas",
                        "target": "A",
                        "kraus": _kraus_obj(
                            [np.diag([1, 0]).astype(complex), np.diag([0, 1]).astype(complex)]
                        ),
                    }
                ],
            },
        ),
        "scenario_bad": _write(
            tmp_path,
            "scenario_bad.json",
            {
                "dim_a": 2,
                "dim_b": 2,
                "initial_state": matrix_to_obj(bell),
                "frame": matrix_to_obj(np.eye(4)),
                "interventions": [
                    {
                        "label": "kick",
                        "target": "A",
                        "kraus": _kraus_obj([I2]),
                        "sprime_kraus": _kraus_obj([random_unitary(2, 77)]),
                    }
                ],
            },
        ),
        "tmp": tmp_path,
    }


class TestMatrixFileFormat:
    def test_round_trip_identity(self):
        for trial in range(30):
            rng = spawn_rng(1, trial)
            m = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
            back = parse_matrix(matrix_to_obj(m), "m")
            assert np.array_equal(back, m)

    def test_missing_field_named(self):
        with pytest.raises(InputError, match=r"m\.rows"):
            parse_matrix({"cols": 2, "data": []}, "m")

    def test_wrong_length_named(self):
        with pytest.raises(InputError, match=r"m\.data"):
            parse_matrix({"rows": 2, "cols": 2, "data": [[1, 0]]}, "m")

    def test_bad_pair_named(self):
        with pytest.raises(InputError, match=r"m\.data\[1\]"):
            parse_matrix({"rows": 1, "cols": 2, "data": [[1, 0], [1]]}, "m")

    def test_nonfinite_rejected(self):
        with pytest.raises(InputError, match="finite"):
            parse_matrix(
                {"rows": 1, "cols": 1, "data": [[float("inf"), 0.0]]}, "m"
            )


class TestKrausFileFormat:
    def test_round_trip(self):
        obj = _kraus_obj([S2 * I2, S2 * Z])
        k = parse_kraus_set(obj, "k")
        assert isinstance(k, KrausSet)
        assert k.rank == 2

    def test_dim_mismatch_named(self):
        obj = {"dim": 3, "ops": [matrix_to_obj(I2)]}
        with pytest.raises(InputError, match=r"k\.ops\[0\]"):
            parse_kraus_set(obj, "k")

    def test_incomplete_set_rejected(self):
        obj = _kraus_obj([I2, I2])
        with pytest.raises(InputError, match="completeness"):
            parse_kraus_set(obj, "k")


def test_scenario_config_bad_target_named():
    obj = {
        "dim_a": 1,
        "dim_b": 1,
        "initial_state": matrix_to_obj(np.eye(1)),
        "frame": matrix_to_obj(np.eye(1)),
        "interventions": [{"target": "C", "kraus": _kraus_obj([np.eye(1)])}],
    }
    with pytest.raises(InputError, match=r"interventions\[0\]\.target"):
        parse_scenario_config(obj, "cfg", 1e-9)


class TestAnalyzeCommand:
    def test_covariant_exit_zero(self, fixtures, capsys):
        code = main(
            ["analyze", fixtures["ident"], fixtures["ident"], fixtures["lam_ident"]]
        )
        report = json.loads(capsys.readouterr().out)
        assert code == 0
        assert report["results"]["verdict"] == "COVARIANT"

    def test_noncovariant_compatible_exit_zero(self, fixtures, capsys):
        code = main(
            ["analyze", fixtures["dephase"], fixtures["project"], fixtures["lam_ident"]]
        )
        report = json.loads(capsys.readouterr().out)
        assert code == 0
        assert report["results"]["verdict"] == "NONCOVARIANT_COMPATIBLE"

    def test_incompatible_exit_two(self, fixtures, capsys):
        code = main(
            ["analyze", fixtures["ident"], fixtures["flip"], fixtures["lam_ident"]]
        )
        report = json.loads(capsys.readouterr().out)
        assert code == 2
        assert report["results"]["verdict"] == "INCOMPATIBLE"
        assert report["results"]["residual"] == pytest.approx(2.0 * np.sqrt(2.0))

    def test_missing_file_exit_one(self, fixtures, capsys):
        code = main(
            ["analyze", "/nonexistent.json", fixtures["ident"], fixtures["lam_ident"]]
        )
        assert code == 1
        assert "nonexistent" in capsys.readouterr().err

    def test_malformed_json_exit_one(self, fixtures, capsys):
        bad = fixtures["tmp"] / "broken.json"
        bad.write_text("{nope")
        code = main(
            ["analyze", str(bad), fixtures["ident"], fixtures["lam_ident"]]
        )
        assert code == 1
        assert "invalid JSON" in capsys.readouterr().err

    def test_nonunitary_frame_exit_one(self, fixtures, capsys):
        lam = _write(
            fixtures["tmp"], "lam_bad.json", matrix_to_obj(2.0 * np.eye(2))
        )
        code = main(["analyze", fixtures["ident"], fixtures["ident"], lam])
        assert code == 1
        assert "unitary" in capsys.readouterr().err

    def test_report_structure(self, fixtures, capsys):
        main(["analyze", fixtures["ident"], fixtures["ident"], fixtures["lam_ident"]])
        report = json.loads(capsys.readouterr().out)
        assert list(report) == ["command", "seed", "tolerance", "trials", "results", "version"]
        assert report["command"] == "analyze"
        assert report["tolerance"] == 1e-9


class TestFreedomSweepCommand:
    def test_rank_one_reports_no_findings(self, fixtures, capsys):
        code = main(
            ["freedom-sweep", "--dim", "2", "--rank", "1", "--trials", "40", "--seed", "3"]
        )
        report = json.loads(capsys.readouterr().out)
        assert code == 0
        summary = report["results"]["summary"]
        assert summary["noncovariant_compatible"] == 0
        assert summary["max_residual"] <= 1e-9

    def test_rank_two_findings_expected(self, fixtures, capsys):
        code = main(
            ["freedom-sweep", "--dim", "2", "--rank", "2", "--trials", "40", "--seed", "3"]
        )
        report = json.loads(capsys.readouterr().out)
        assert code == 0
        summary = report["results"]["summary"]
        assert summary["max_residual"] <= 1e-9
        assert summary["noncovariant_compatible"] > 0
        assert summary["min_nontrivial_distance"] > 1e-3
        assert len(report["results"]["per_trial"]) == 40

    def test_invalid_flags_exit_one(self, capsys):
        assert main(["freedom-sweep", "--trials", "0"]) == 1
        assert main(["freedom-sweep", "--dim", "0"]) == 1
        assert main(["freedom-sweep", "--tol", "-1"]) == 1
        capsys.readouterr()

    def test_deterministic_bytes(self, fixtures):
        out1 = fixtures["tmp"] / "sweep1.json"
        out2 = fixtures["tmp"] / "sweep2.json"
        args = ["freedom-sweep", "--dim", "2", "--rank", "2", "--trials", "25", "--seed", "11"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestN1SearchCommand:
    def test_no_violation_exit_zero(self, fixtures, capsys):
        code = main(
            ["n1-search", fixtures["k1_ident"], fixtures["lam_ident"], "--trials", "50"]
        )
        report = json.loads(capsys.readouterr().out)
        assert code == 0
        assert report["results"]["violation_count"] == 0
        assert report["results"]["min_residual"] > 1e-9

    def test_nonunitary_input_exit_one(self, fixtures, capsys):
        code = main(
            ["n1-search", fixtures["k1_bad"], fixtures["lam_ident"], "--trials", "5"]
        )
        assert code == 1
        assert "completeness" in capsys.readouterr().err

    def test_deterministic_bytes(self, fixtures):
        out1 = fixtures["tmp"] / "n1a.json"
        out2 = fixtures["tmp"] / "n1b.json"
        args = [
            "n1-search", fixtures["k1_ident"], fixtures["lam_ident"],
            "--trials", "30", "--seed", "5",
        ]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestScenarioCommand:
    def test_bell_fixture_exit_zero(self, fixtures, capsys):
        code = main(["scenario", fixtures["scenario"]])
        report = json.loads(capsys.readouterr().out)
        assert code == 0
        probs = report["results"]["interventions"][0]
        assert probs["probabilities_s"] == pytest.approx([0.5, 0.5])
        assert probs["probabilities_sprime"] == pytest.approx([0.5, 0.5])
        assert report["results"]["verdict"] == "COVARIANT"

    def test_single_branch_mismatch_exit_two(self, fixtures, capsys):
        code = main(["scenario", fixtures["scenario_bad"]])
        report = json.loads(capsys.readouterr().out)
        assert code == 2
        assert report["results"]["verdict"] == "INCOMPATIBLE"

    def test_malformed_config_exit_one(self, fixtures, capsys):
        bad = _write(fixtures["tmp"], "cfg_bad.json", {"dim_a": 2})
        code = main(["scenario", bad])
        assert code == 1
        assert "dim_b" in capsys.readouterr().err


class TestCliPlumbing:
    def test_unknown_flag_exit_one(self, capsys):
        assert main(["analyze", "--nope"]) == 1
        capsys.readouterr()

    def test_missing_command_exit_one(self, capsys):
        assert main([]) == 1
        capsys.readouterr()

    def test_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0
        capsys.readouterr()

    def test_no_report_written_on_input_error(self, fixtures):
        out = fixtures["tmp"] / "never.json"
        code = main(
            ["analyze", "/nonexistent.json", fixtures["ident"], fixtures["lam_ident"],
             "--out", str(out)]
        )
        assert code == 1
        assert not out.exists()

    def test_unwritable_out_exit_one(self, fixtures, capsys):
        out = fixtures["tmp"] / "missing-dir" / "report.json"
        code = main(
            ["analyze", fixtures["ident"], fixtures["ident"], fixtures["lam_ident"],
             "--out", str(out)]
        )
        assert code == 1
        assert not out.exists()
        capsys.readouterr()

    def test_log_env_goes_to_stderr_only(self, fixtures, capsys, monkeypatch):
        monkeypatch.setenv("COVCHAN_LOG", "debug")
        code = main(
            ["analyze", fixtures["ident"], fixtures["ident"], fixtures["lam_ident"]]
        )
        captured = capsys.readouterr()
        assert code == 0
        json.loads(captured.out)
        assert "analyze" in captured.err

    def test_log_off_is_silent(self, fixtures, capsys, monkeypatch):
        monkeypatch.setenv("COVCHAN_LOG", "off")
        main(["analyze", fixtures["ident"], fixtures["ident"], fixtures["lam_ident"]])
        assert capsys.readouterr().err == ""

    def test_unknown_log_level_treated_as_off(self, fixtures, capsys, monkeypatch):
        monkeypatch.setenv("COVCHAN_LOG", "shouting")
        code = main(
            ["analyze", fixtures["ident"], fixtures["ident"], fixtures["lam_ident"]]
        )
        assert code == 0
        assert capsys.readouterr().err == ""
