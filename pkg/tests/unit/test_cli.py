"""Unit tests for the command line tool."""

import csv
import io
import math
from pathlib import Path

import pytest

from step2heat.cli import EXIT_INVALID_SPEC, EXIT_OK, EXIT_USAGE, main


def read_rows(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


class TestValidate:
    """Tests for the validate command."""

    def test_builtin(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Test the summary row of a built-in group."""
        assert main(["validate", "builtin:heisenberg1"]) == EXIT_OK
        rows = read_rows(capsys.readouterr().out)
        assert rows == [
            {"name": "heisenberg1", "m": "2", "k": "1", "Q_hom": "4", "heisenberg_type": "true"}
        ]

    def test_spec_file(self, specs_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test a spec file passed through --spec."""
        assert main(["validate", "--spec", str(specs_dir / "free3.json")]) == EXIT_OK
        row = read_rows(capsys.readouterr().out)[0]
        assert row["heisenberg_type"] == "false"
        assert row["Q_hom"] == "9"

    def test_malformed_file(self, tmp_path: Path) -> None:
        """Test that unreadable JSON exits with the invalid spec code."""
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")
        assert main(["validate", str(path)]) == EXIT_INVALID_SPEC

    def test_not_skew_symmetric(self, tmp_path: Path) -> None:
        """Test that a structure constant that is not skew-symmetric is rejected."""
        path = tmp_path / "bad.json"
        path.write_text('{"name": "bad", "m": 2, "k": 1, "J": [[[1, 1], [-1, 0]]]}')
        assert main(["validate", str(path)]) == EXIT_INVALID_SPEC

    def test_missing_spec(self) -> None:
        """Test that a command without a spec is a usage error."""
        with pytest.raises(SystemExit) as info:
            main(["eval", "--point", "0,0,0", "--t", "1"])
        assert info.value.code == EXIT_USAGE

    def test_missing_command(self) -> None:
        """Test that argparse errors use the usage code."""
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == EXIT_USAGE


class TestEval:
    """Tests for the eval and grid commands."""

    def test_diagonal(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Test p(e, e, 1) = 1/16 on the first Heisenberg group."""
        code = main(["eval", "--spec", "builtin:heisenberg1", "--point", "0,0,0", "--t", "1"])
        assert code == EXIT_OK
        row = read_rows(capsys.readouterr().out)[0]
        assert float(row["value"]) == pytest.approx(0.0625, rel=1e-7)
        assert float(row["est_error"]) >= 0.0

    def test_general_path(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that --general gives the same value."""
        args = ["eval", "--spec", "builtin:heisenberg1", "--point", "0.3,0,0.2", "--t", "1"]
        assert main(args) == EXIT_OK
        radial = float(read_rows(capsys.readouterr().out)[0]["value"])
        assert main([*args, "--general"]) == EXIT_OK
        general = float(read_rows(capsys.readouterr().out)[0]["value"])
        assert general == pytest.approx(radial, abs=1e-8)

    def test_wrong_coordinate_count(self) -> None:
        """Test that a point of the wrong length is a usage error."""
        code = main(["eval", "--spec", "builtin:heisenberg1", "--point", "0,0", "--t", "1"])
        assert code == EXIT_USAGE

    def test_output_file(self, tmp_path: Path) -> None:
        """Test that --out writes the CSV to a file."""
        path = tmp_path / "value.csv"
        args = ["eval", "--spec", "builtin:heisenberg1", "--point", "0,0,0", "--t", "2"]
        assert main([*args, "--out", str(path)]) == EXIT_OK
        row = read_rows(path.read_text(encoding="utf-8"))[0]
        assert float(row["value"]) == pytest.approx(1.0 / 64.0, rel=1e-7)

    def test_grid_order(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that grid rows follow the points file and the time list."""
        points = tmp_path / "points.txt"
        points.write_text("# horizontal\n1,0,0\n\n0,0,1\n0.5,0.5,0.25\n", encoding="utf-8")
        code = main(
            ["grid", "--spec", "builtin:heisenberg1", "--points", str(points), "--t", "0.5,1"]
        )
        assert code == EXIT_OK
        rows = read_rows(capsys.readouterr().out)
        assert [(row["z1"], row["s1"], row["t"]) for row in rows] == [
            ("1", "0", "0.5"),
            ("1", "0", "1"),
            ("0", "1", "0.5"),
            ("0", "1", "1"),
            ("0.5", "0.25", "0.5"),
            ("0.5", "0.25", "1"),
        ]
        assert all(float(row["value"]) > 0.0 for row in rows)

    def test_grid_bad_time(self, tmp_path: Path) -> None:
        """Test that non-positive times are rejected."""
        points = tmp_path / "points.txt"
        points.write_text("1,0,0\n", encoding="utf-8")
        code = main(
            ["grid", "--spec", "builtin:heisenberg1", "--points", str(points), "--t", "1,0"]
        )
        assert code == EXIT_USAGE


class TestGreen:
    """Tests for the green command."""

    def test_both(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Test the numeric value against 1/(2π) and their ratio."""
        code = main(["green", "--spec", "builtin:heisenberg1", "--point", "1,0,0", "--both"])
        assert code == EXIT_OK
        row = read_rows(capsys.readouterr().out)[0]
        assert float(row["closed_form"]) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-12)
        assert float(row["ratio"]) == pytest.approx(1.0, rel=1e-4)

    def test_pole(self) -> None:
        """Test that the pole is a usage error."""
        code = main(["green", "--spec", "builtin:heisenberg1", "--point", "0,0,0"])
        assert code == EXIT_USAGE

    def test_free_group_closed_form(self) -> None:
        """Test that the closed form needs a group of Heisenberg type."""
        args = ["green", "--spec", "builtin:free3", "--point", "1,0,0,0,0,0", "--closed-form"]
        assert main(args) == EXIT_USAGE


class TestVerify:
    """Tests for the verify command."""

    def test_skip_row(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that an inapplicable suite is reported as skipped without failing."""
        assert main(["verify", "--spec", "builtin:free3", "--suite", "mass"]) == EXIT_OK
        rows = read_rows(capsys.readouterr().out)
        assert [(row["check"], row["pass"]) for row in rows] == [("mass", "skip")]

    def test_ou_suite(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that the Ornstein-Uhlenbeck suite passes on the first Heisenberg group."""
        assert main(["verify", "--spec", "builtin:heisenberg1", "--suite", "ou"]) == EXIT_OK
        rows = read_rows(capsys.readouterr().out)
        assert len(rows) == 5
        assert {row["pass"] for row in rows} == {"pass"}

    def test_unknown_suite(self) -> None:
        """Test that argparse rejects unknown suites with the usage code."""
        with pytest.raises(SystemExit) as info:
            main(["verify", "--spec", "builtin:heisenberg1", "--suite", "nope"])
        assert info.value.code == EXIT_USAGE
