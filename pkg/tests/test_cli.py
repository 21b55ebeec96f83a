"""Command-line entry point: argument handling, outputs, error reporting."""

from __future__ import annotations

import pytest

from htbandits.cli import main


def run_cli(tmp_path, *extra: str) -> int:
    argv = [
        "--algo", "dprse",
        "--setting", "S1",
        "--v", "0.9",
        "--eps", "1.0",
        "--horizon", "500",
        "--reps", "2",
        "--seed", "1",
        "--out", str(tmp_path / "exp"),
        *extra,
    ]
    return main(argv)


def test_cli_writes_the_three_output_files(tmp_path, capsys) -> None:
    assert run_cli(tmp_path) == 0
    for suffix in (".runs.csv", ".summary.csv", ".meta"):
        assert (tmp_path / f"exp{suffix}").exists()
    out = capsys.readouterr().out
    assert "final regret mean=" in out
    assert "wrote" in out


def test_cli_reruns_are_byte_identical(tmp_path) -> None:
    run_cli(tmp_path, "--checkpoints", "10")
    first = (tmp_path / "exp.runs.csv").read_bytes()
    run_cli(tmp_path, "--checkpoints", "10")
    assert (tmp_path / "exp.runs.csv").read_bytes() == first


def test_cli_accepts_the_zero_noise_hook(tmp_path) -> None:
    assert run_cli(tmp_path, "--zero-noise") == 0


def test_cli_rejects_unknown_flags(tmp_path) -> None:
    with pytest.raises(SystemExit) as excinfo:
        run_cli(tmp_path, "--frobnicate")
    assert excinfo.value.code == 2


def test_cli_rejects_an_unknown_algorithm(tmp_path) -> None:
    with pytest.raises(SystemExit) as excinfo:
        main(["--algo", "bogus", "--setting", "S1", "--v", "0.9", "--eps", "1.0",
              "--horizon", "10", "--out", str(tmp_path / "x")])
    assert excinfo.value.code == 2


def test_cli_reports_bad_values_on_stderr(tmp_path, capsys) -> None:
    code = main(["--algo", "dprse", "--setting", "S1", "--v", "0.9", "--eps", "-1.0",
                 "--horizon", "10", "--out", str(tmp_path / "x")])
    assert code == 1
    captured = capsys.readouterr()
    assert captured.err.startswith("error:")
    assert not (tmp_path / "x.runs.csv").exists()