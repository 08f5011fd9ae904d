"""Tests for the hashbounds command-line interface."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import pytest

from src.hashbounds.cli import (
    EXIT_FAIL,
    EXIT_OK,
    EXIT_USAGE,
    RunConfig,
    build_parser,
    format_real,
    format_report,
    format_table,
    run,
)
from src.hashbounds.bounds import phf_min_rows
from src.hashbounds.errors import InvalidParameterError
from src.hashbounds.models import REPORT_FIELDS, BadEventPolicy, Family, PhfSpec
from src.hashbounds.tables import TableRow


def _make_config(*argv: str) -> RunConfig:
    """Helper to parse a command line into a RunConfig."""
    return RunConfig.from_namespace(build_parser().parse_args(list(argv)))


class TestRunConfig:
    """Tests for argument parsing into RunConfig."""

    def test_bound_phf(self) -> None:
        config = _make_config("bound", "phf", "--n", "15", "--m", "7", "--w", "7")
        assert config.command == "bound"
        assert config.family is Family.PHF
        assert config.spec() == PhfSpec(n=15, m=7, w=7)
        assert config.fmt == "text"

    def test_construct_defaults(self) -> None:
        config = _make_config("construct", "phf", "--n", "4", "--m", "4", "--w", "2")
        assert config.rows is None
        assert config.policy is BadEventPolicy.LEX_FIRST
        assert config.runs == 1

    def test_shf_requires_parts(self) -> None:
        config = _make_config("bound", "shf", "--n", "8", "--m", "4", "--w", "3")
        with pytest.raises(InvalidParameterError, match="--parts is required"):
            config.spec()

    def test_phf_rejects_parts(self) -> None:
        config = _make_config("bound", "phf", "--n", "8", "--m", "4", "--w", "3", "--parts", "1,2")
        with pytest.raises(InvalidParameterError):
            config.spec()


class TestFormatting:
    """Tests for the text helpers."""

    def test_format_real(self) -> None:
        assert format_real(2.0578128342) == "2.05781283"
        assert format_real(None) == ""

    def test_empty_table_has_header(self) -> None:
        lines = format_table([]).splitlines()
        assert len(lines) == 2
        assert "N_clll" in lines[0]
        assert set(lines[1]) == {"-"}

    def test_json_is_strict_when_bound_overflows(self) -> None:
        report = phf_min_rows(PhfSpec(n=10, m=4, w=4))
        report.expected_resamples = float("inf")
        values = json.loads(format_report(report, "json"))
        assert values["expected_resamples"] is None

    def test_error_row(self) -> None:
        table = format_table([TableRow(spec=PhfSpec(n=5, m=2, w=3), error="alphabet too small")])
        assert "ERROR" in table
        assert "alphabet too small" in table


class TestCmdBound:
    """Tests for the bound subcommand."""

    @pytest.mark.asyncio
    async def test_json(self, capsys: pytest.CaptureFixture[str]) -> None:
        code = await run(["bound", "phf", "--n", "15", "--m", "7", "--w", "7", "--format", "json"])
        values = json.loads(capsys.readouterr().out)
        assert code == EXIT_OK
        assert list(values) == list(REPORT_FIELDS)
        assert abs(values["n_clll"] - 1437) <= 1
        assert abs(values["n_expurgation"] - 1926) <= 1

    @pytest.mark.asyncio
    async def test_csv(self, capsys: pytest.CaptureFixture[str]) -> None:
        code = await run(["bound", "phf", "--n", "10", "--m", "4", "--w", "4", "--format", "csv"])
        records = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert code == EXIT_OK
        assert len(records) == 1
        assert abs(int(records[0]["n_clll"]) - 57) <= 1
        assert records[0]["q"] == "29/32"

    @pytest.mark.asyncio
    async def test_text(self, capsys: pytest.CaptureFixture[str]) -> None:
        code = await run(["bound", "phf", "--n", "4", "--m", "4", "--w", "2"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "a_n" in out
        assert "2.05776" in out

    @pytest.mark.asyncio
    async def test_alphabet_too_small(self, capsys: pytest.CaptureFixture[str]) -> None:
        code = await run(["bound", "phf", "--n", "5", "--m", "2", "--w", "3"])
        assert code == EXIT_USAGE
        assert "alphabet too small" in capsys.readouterr().err

    @pytest.mark.asyncio
    async def test_usage_error(self) -> None:
        assert await run(["bound", "phf", "--n", "5"]) == EXIT_USAGE
        assert await run([]) == EXIT_USAGE


class TestCmdTable:
    """Tests for the table subcommand."""

    @pytest.mark.asyncio
    async def test_builtin_tables(self, capsys: pytest.CaptureFixture[str]) -> None:
        code = await run(["table", "--paper-tables", "--format", "csv"])
        records = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert code == EXIT_OK
        assert len(records) == 21
        by_params = {(r["n"], r["m"], r["w"]): r for r in records}
        row = by_params[("50", "7", "7")]
        assert abs(int(row["n_clll"]) - 3034) <= 1
        assert abs(int(row["n_expurgation"]) - 3191) <= 1
        row = by_params[("200", "6", "6")]
        assert abs(int(row["n_clll"]) - 1557) <= 1
        assert abs(int(row["n_expurgation"]) - 1546) <= 1

    @pytest.mark.asyncio
    async def test_builtin_tables_stable(self, capsys: pytest.CaptureFixture[str]) -> None:
        await run(["table", "--paper-tables"])
        first = capsys.readouterr().out
        await run(["table", "--paper-tables"])
        assert capsys.readouterr().out == first

    @pytest.mark.asyncio
    async def test_empty_grid(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        grid = tmp_path / "empty.csv"
        grid.write_text("n,m,w\n", encoding="utf-8")
        code = await run(["table", "--grid", str(grid), "--format", "csv"])
        assert code == EXIT_OK
        assert capsys.readouterr().out.strip() == ",".join([*REPORT_FIELDS, "error"])

    @pytest.mark.asyncio
    async def test_failed_row_marked(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        grid = tmp_path / "grid.csv"
        grid.write_text("n,m,w\n4,4,2\n5,2,3\n", encoding="utf-8")
        code = await run(["table", "--grid", str(grid), "--format", "json"])
        rows = json.loads(capsys.readouterr().out)
        assert code == EXIT_OK
        assert rows[0]["n_clll"] == 2
        assert rows[0]["error"] is None
        assert rows[1]["n_clll"] is None
        assert "alphabet too small" in rows[1]["error"]


class TestCmdConstructAndVerify:
    """Tests for construct, verify and their round trip."""

    @pytest.mark.asyncio
    async def test_round_trip(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = tmp_path / "phf.txt"
        code = await run(["construct", "phf", "--n", "10", "--m", "4", "--w", "4", "--seed", "1", "--output", str(path)])
        assert code == EXIT_OK
        lines = path.read_text(encoding="utf-8").splitlines()
        header = lines[0].split()
        assert header[0] == "PHF"
        assert abs(int(header[1]) - 57) <= 1
        assert len(lines) == int(header[1]) + 1
        capsys.readouterr()

        assert await run(["verify", str(path)]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "PASS"

    @pytest.mark.asyncio
    async def test_construct_deterministic(self, tmp_path: Path) -> None:
        first, second = tmp_path / "a.txt", tmp_path / "b.txt"
        argv = ["construct", "shf", "--n", "6", "--m", "3", "--parts", "1,2", "--seed", "3"]
        assert await run([*argv, "--output", str(first)]) == EXIT_OK
        assert await run([*argv, "--output", str(second)]) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()

    @pytest.mark.asyncio
    async def test_resample_limit_exit(self, capsys: pytest.CaptureFixture[str]) -> None:
        code = await run(["construct", "phf", "--n", "3", "--m", "2", "--w", "3", "--rows", "1", "--max-resamples", "5"])
        assert code == EXIT_FAIL
        assert "RESAMPLE_LIMIT" in capsys.readouterr().err

    @pytest.mark.asyncio
    async def test_several_runs(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = tmp_path / "runs.txt"
        code = await run(
            ["construct", "phf", "--n", "6", "--m", "4", "--w", "3", "--seed", "10", "--runs", "3", "--output", str(path)]
        )
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert [line.split()[0] for line in out.splitlines() if line.startswith("seed=")] == [
            "seed=10",
            "seed=11",
            "seed=12",
        ]
        assert path.read_text(encoding="utf-8").startswith("PHF ")

    @pytest.mark.asyncio
    async def test_verify_fail(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = tmp_path / "bad.txt"
        path.write_text("PHF 1 3 2 2\n1 1 2\n", encoding="utf-8")
        assert await run(["verify", str(path)]) == EXIT_FAIL
        assert capsys.readouterr().out.strip() == "FAIL {1,2}"

    @pytest.mark.asyncio
    async def test_verify_shf_fail(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = tmp_path / "bad_shf.txt"
        path.write_text("SHF 1 3 2 1,2\n1 1 2\n", encoding="utf-8")
        assert await run(["verify", str(path), "--family", "shf", "--parts", "2,1"]) == EXIT_FAIL
        assert capsys.readouterr().out.strip() == "FAIL {{1},{2,3}}"

    @pytest.mark.asyncio
    async def test_verify_header_mismatch(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = tmp_path / "short.txt"
        path.write_text("PHF 2 3 3 2\n1 2 3\n", encoding="utf-8")
        assert await run(["verify", str(path)]) == EXIT_USAGE
        assert "line" in capsys.readouterr().err

    @pytest.mark.asyncio
    async def test_verify_disagreeing_w(self, tmp_path: Path) -> None:
        path = tmp_path / "ok.txt"
        path.write_text("PHF 1 3 3 2\n1 2 3\n", encoding="utf-8")
        assert await run(["verify", str(path), "--w", "3"]) == EXIT_USAGE
