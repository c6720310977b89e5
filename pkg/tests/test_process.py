import configparser
import json
from unittest import mock
from unittest.mock import patch

import click
import numpy as np
import pandas as pd
import pytest

from symscatter import process
from symscatter.constants import ExistenceStatus
from symscatter.pairs import PairScheme
from symscatter.scatter.existence import ExistenceVerdict, SubspaceWitness
from symscatter.scatter.rho import ScatterFunctional, rho_nu
from symscatter.scatter.solvers import SolverReport
from symscatter.scatter.symmetrized import averaged_randomized_estimator

DATASET = "./tests/test_assets/datasets/four_by_two.csv"
SMALL_CONFIG = "./tests/test_assets/config_small.json"


def error_json(err: str) -> dict:
    lines = [line for line in err.splitlines() if line.startswith('{"error"')]
    return json.loads(lines[-1])


class TestBuildScheme:
    def test_complete(self):
        assert process.build_scheme("complete", None, 0) == PairScheme.complete()

    def test_balanced(self):
        assert process.build_scheme("balanced", 2, 0) == PairScheme.balanced(2)

    def test_randomized(self):
        assert process.build_scheme("randomized", 3, 5) == PairScheme.randomized(3, 5)

    def test_missing_d(self):
        with pytest.raises(click.BadParameter):
            process.build_scheme("balanced", None, 0)

    def test_unknown_scheme(self):
        with pytest.raises(click.BadParameter):
            process.build_scheme("star", 1, 0)


class TestPackaging:
    def test_directly_imported_click_is_declared(self):
        parser = configparser.ConfigParser()
        parser.read("setup.cfg")
        requirements = parser["options"]["install_requires"].split()
        assert any(requirement.startswith("click") for requirement in requirements)


class TestBuildFunctional:
    def test_tyler(self):
        assert process.build_functional("tyler", 1.0, 3).kind.value == "tyler"

    def test_m(self):
        functional = process.build_functional("m", 2.0, 3)
        assert functional.rho.psi_infinity == 5.0

    def test_unknown(self):
        with pytest.raises(click.BadParameter):
            process.build_functional("huber", 1.0, 3)


class TestEstimateDataset:
    def teardown_method(self):
        mock.patch.stopall()

    def test_general_position(self):
        data = np.loadtxt(DATASET, delimiter=",")
        result = process.estimate_dataset(data, PairScheme.complete(), ScatterFunctional.tyler())
        assert result["existence"] == ExistenceStatus.PASS.value
        assert "witness" not in result
        assert result["converged"]
        assert np.linalg.det(result["shape"]) == pytest.approx(1.0)

    def test_witness_members_are_one_based(self):
        patch.object(
            process,
            "symmetrized_scatter",
            return_value=SolverReport(np.eye(2), 0, 0.0, True),
        ).start()
        data = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 3.0]])
        result = process.estimate_dataset(data, PairScheme.complete(), ScatterFunctional.tyler())
        assert result["existence"] == "fail"
        assert result["witness"]["dim"] == 0
        assert result["witness"]["members"] == [1]

    def test_randomized_averages_cycle_estimates(self, gaussian_data):
        functional = ScatterFunctional.m_type(rho_nu(1.0, 3))
        result = process.estimate_dataset(gaussian_data, PairScheme.randomized(3, 5), functional)
        np.testing.assert_array_equal(
            result["estimate"], averaged_randomized_estimator(gaussian_data, 3, functional, seed=5)
        )
        assert result["converged"]
        assert result["d"] == 3

    def test_randomized_witness_members_point_into_the_pair_stream(self, gaussian_data):
        witness = SubspaceWitness(dim=0, mass=0.5, bound=0.0, basis=np.zeros((0, 3)), members=[4])
        check = patch.object(
            process,
            "check_existence",
            side_effect=[
                ExistenceVerdict(ExistenceStatus.PASS),
                ExistenceVerdict(ExistenceStatus.FAIL, witness),
                ExistenceVerdict(ExistenceStatus.PASS),
            ],
        ).start()
        result = process.estimate_dataset(gaussian_data, PairScheme.randomized(3, 5), ScatterFunctional.tyler())
        assert check.call_count == 3
        assert result["existence"] == "fail"
        assert result["witness"]["members"] == [4 + 12 + 1]


class TestCLI:
    def test_pairs_balanced(self, capsys):
        assert process.cli_main(["pairs", "--n", "5", "--scheme", "balanced", "--d", "1"]) == 0
        assert capsys.readouterr().out == "i,j\n1,2\n2,3\n3,4\n4,5\n5,1\n"

    def test_pairs_complete(self, capsys):
        assert process.cli_main(["pairs", "--n", "3"]) == 0
        assert capsys.readouterr().out == "i,j\n1,2\n1,3\n2,3\n"

    def test_pairs_randomized_reproducible(self, capsys):
        argv = ["pairs", "--n", "6", "--scheme", "randomized", "--d", "2", "--seed", "42"]
        process.cli_main(argv)
        first = capsys.readouterr().out
        process.cli_main(argv)
        assert capsys.readouterr().out == first
        assert len(first.splitlines()) == 13

    def test_pairs_missing_d(self, capsys):
        assert process.cli_main(["pairs", "--n", "5", "--scheme", "balanced"]) == 2
        assert error_json(capsys.readouterr().err)["error"] == "UsageError"

    def test_pairs_d_too_large(self, capsys):
        assert process.cli_main(["pairs", "--n", "5", "--scheme", "balanced", "--d", "3"]) == 1
        assert error_json(capsys.readouterr().err)["error"] == "SchemeError"

    def test_unknown_command(self, capsys):
        assert process.cli_main(["fit"]) == 2

    def test_help(self, capsys):
        assert process.cli_main(["--help"]) == 0
        assert "estimate" in capsys.readouterr().out

    def test_estimate(self, capsys):
        assert process.cli_main(["estimate", DATASET, "--functional", "tyler"]) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["n"] == 4 and result["q"] == 2
        assert result["scheme"] == "complete"
        assert result["existence"] == "pass"
        assert np.linalg.det(np.array(result["shape"])) == pytest.approx(1.0)

    def test_estimate_m_balanced(self, capsys):
        argv = ["estimate", DATASET, "-f", "m", "--nu", "2", "-s", "balanced", "-d", "1"]
        assert process.cli_main(argv) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["functional"] == "m"
        assert result["d"] == 1

    def test_estimate_with_header(self, capsys):
        argv = ["estimate", "./tests/test_assets/datasets/four_by_two_header.csv", "--header"]
        assert process.cli_main(argv) == 0
        process.cli_main(["estimate", DATASET])
        out = capsys.readouterr().out
        first, second = out.split("\n}\n")[:2]
        assert json.loads(first + "}")["estimate"] == json.loads(second + "}")["estimate"]

    def test_estimate_bad_extension(self, capsys):
        assert process.cli_main(["estimate", "./tests/test_assets/datasets/four_by_two.tsv"]) == 1
        error = error_json(capsys.readouterr().err)
        assert error["error"] == "ValueError"
        assert "csv extension" in error["message"]

    def test_estimate_unknown_functional(self, capsys):
        assert process.cli_main(["estimate", DATASET, "--functional", "huber"]) == 2

    def test_decompose(self, capsys):
        argv = ["decompose", DATASET, "--kernel", "outer-product", "--d", "1"]
        assert process.cli_main(argv) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["r"] == 3
        assert set(result["predictions"]) == {"complete", "balanced(d=1)"}

    def test_decompose_unknown_kernel(self, capsys):
        assert process.cli_main(["decompose", DATASET, "--kernel", "cosine"]) == 2

    def test_simulate(self, tmp_path, capsys):
        rows_path = str(tmp_path / "rows.csv")
        summary_path = str(tmp_path / "summary.json")
        argv = ["simulate", SMALL_CONFIG, "--rows", rows_path, "--summary", summary_path]
        assert process.cli_main(argv) == 0
        assert json.loads(capsys.readouterr().out) == {"rows": rows_path, "summary": summary_path}

        rows = pd.read_csv(rows_path, float_precision="round_trip")
        with open(summary_path) as f:
            summary = json.load(f)
        full_errors = np.sort(rows.drop_duplicates("rep")["full_error"].to_numpy())
        assert summary["median_full_error"] == full_errors[len(full_errors) // 2]
        assert len(rows) == 12

    def test_simulate_is_reproducible(self, tmp_path):
        for name in ("first", "second"):
            argv = [
                "simulate",
                SMALL_CONFIG,
                "--rows",
                str(tmp_path / name / "rows.csv"),
                "--summary",
                str(tmp_path / name / "summary.json"),
            ]
            assert process.cli_main(argv) == 0
        for file_name in ("rows.csv", "summary.json"):
            with open(tmp_path / "first" / file_name, "rb") as first, open(
                tmp_path / "second" / file_name, "rb"
            ) as second:
                assert first.read() == second.read()

    def test_simulate_workers_override(self, tmp_path):
        argv = [
            "simulate",
            SMALL_CONFIG,
            "--rows",
            str(tmp_path / "rows.csv"),
            "--summary",
            str(tmp_path / "summary.json"),
            "--workers",
            "2",
        ]
        assert process.cli_main(argv) == 0

    def test_simulate_bad_config(self, tmp_path, capsys):
        argv = [
            "simulate",
            "./tests/test_assets/config_unknown_key.yaml",
            "--rows",
            str(tmp_path / "rows.csv"),
        ]
        assert process.cli_main(argv) == 1
        assert error_json(capsys.readouterr().err)["error"] == "ConfigError"
