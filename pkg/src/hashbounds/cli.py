"""CLI entry point for the hash family bound calculator.

Subcommands:
    bound      compute the cluster expansion bound and the comparison bounds
    table      evaluate a parameter grid (or the built-in comparison tables)
    construct  build a PHF/SHF with Moser-Tardos resampling
    verify     check a matrix file exhaustively

Exit codes: 0 success or PASS, 1 FAIL or resample limit, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from config.hashbounds import DEFAULT_SEED, LOG_LEVEL
from src.hashbounds.bounds import bound_report, expected_resamples
from src.hashbounds.cluster_expansion import stationary_point
from src.hashbounds.errors import HashBoundsError, InvalidParameterError, ResampleLimitError
from src.hashbounds.models import (
    REPORT_FIELDS,
    BadEventPolicy,
    BoundReport,
    Family,
    FamilySpec,
    HashMatrix,
    MtStats,
    PhfSpec,
    ShfSpec,
    parse_parts,
)
from src.hashbounds.mt_engine import construct, per_step_cost, run_batch
from src.hashbounds.oracles import verify_phf, verify_shf
from src.hashbounds.tables import TableRow, evaluate_rows, load_grid, paper_table_rows

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

FORMATS = ("text", "json", "csv")

# Table formatting constants
COLUMN_N_WIDTH = 6
COLUMN_M_WIDTH = 4
COLUMN_W_WIDTH = 8
COLUMN_BOUND_WIDTH = 10
COLUMN_EXPURGATION_WIDTH = 12


@dataclass
class RunConfig:
    """Parsed command line.

    ``parts`` is required iff ``family`` is SHF, ``w`` iff it is PHF (verify
    may leave both unset and take them from the matrix header).
    """

    command: str
    family: Family | None = None
    n: int | None = None
    m: int | None = None
    w: int | None = None
    parts: tuple[int, ...] | None = None
    rows: int | None = None
    seed: int = DEFAULT_SEED
    policy: BadEventPolicy = BadEventPolicy.LEX_FIRST
    max_resamples: int | None = None
    runs: int = 1
    fmt: str = "text"
    output: Path | None = None
    path: Path | None = None
    grid: Path | None = None
    paper_tables: bool = False

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> RunConfig:
        """Build a RunConfig from argparse results; absent options keep their defaults."""
        family = getattr(ns, "family", None)
        parts = getattr(ns, "parts", None)
        output = getattr(ns, "output", None)
        path = getattr(ns, "path", None)
        grid = getattr(ns, "grid", None)
        return cls(
            command=ns.command,
            family=Family(family) if family else None,
            n=getattr(ns, "n", None),
            m=getattr(ns, "m", None),
            w=getattr(ns, "w", None),
            parts=parse_parts(parts) if parts else None,
            rows=getattr(ns, "rows", None),
            seed=getattr(ns, "seed", DEFAULT_SEED),
            policy=BadEventPolicy(getattr(ns, "policy", BadEventPolicy.LEX_FIRST.value)),
            max_resamples=getattr(ns, "max_resamples", None),
            runs=getattr(ns, "runs", 1),
            fmt=getattr(ns, "format", "text"),
            output=Path(output) if output else None,
            path=Path(path) if path else None,
            grid=Path(grid) if grid else None,
            paper_tables=getattr(ns, "paper_tables", False),
        )

    def spec(self) -> FamilySpec:
        """The family parameters named on the command line.

        Raises:
            InvalidParameterError: when w/parts do not match the family.
        """
        if self.n is None or self.m is None:
            raise InvalidParameterError("--n and --m are required")
        if self.family is Family.SHF:
            if self.parts is None:
                raise InvalidParameterError("--parts is required for shf")
            if self.w is not None:
                raise InvalidParameterError("--w is not allowed for shf; use --parts")
            return ShfSpec(n=self.n, m=self.m, parts=self.parts)
        if self.w is None:
            raise InvalidParameterError("--w is required for phf")
        if self.parts is not None:
            raise InvalidParameterError("--parts is not allowed for phf; use --w")
        return PhfSpec(n=self.n, m=self.m, w=self.w)


def format_real(value: float | None) -> str:
    """Reals with 9 significant digits; None as an empty field."""
    if value is None:
        return ""
    return f"{value:.9g}"


def _text_value(value: object) -> str:
    if isinstance(value, float):
        return format_real(value)
    if value is None:
        return ""
    return str(value)


def _row_dict(row: TableRow) -> dict:
    if row.report is not None:
        values = row.report.to_dict()
    else:
        spec = row.spec
        values = {key: None for key in REPORT_FIELDS}
        values.update(
            family=spec.family.value,
            n=spec.n,
            m=spec.m,
            w=spec.w,
            parts=spec.label if spec.family is Family.SHF else None,
        )
    values["error"] = row.error
    return values


def format_report(report: BoundReport, fmt: str) -> str:
    """Serialize one BoundReport as text, JSON or CSV.

    JSON keys and CSV columns follow REPORT_FIELDS.
    """
    values = report.to_dict()
    if fmt == "json":
        return json.dumps(values, indent=2, allow_nan=False)
    if fmt == "csv":
        return _csv_text(list(REPORT_FIELDS), [values])
    width = max(len(key) for key in REPORT_FIELDS)
    return "\n".join(f"{key:<{width}}  {_text_value(values[key])}" for key in REPORT_FIELDS)


def _csv_text(fields: list[str], records: list[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(fields)
    for record in records:
        writer.writerow(_text_value(record[key]) for key in fields)
    return buffer.getvalue().rstrip("\n")


def format_table(rows: list[TableRow]) -> str:
    """Format table rows as an ASCII table.

    Columns: n, m, w (or parts), the cluster expansion bound and the
    expurgation bound, all right-aligned. Failed rows show ERROR and the
    message after the expurgation column.

    Args:
        rows: Evaluated rows in display order.

    Returns:
        A multi-line string; only the header and separator for an empty grid.
    """
    header = (
        f"{'n':>{COLUMN_N_WIDTH}} "
        f"{'m':>{COLUMN_M_WIDTH}} "
        f"{'w':>{COLUMN_W_WIDTH}} "
        f"{'N_clll':>{COLUMN_BOUND_WIDTH}} "
        f"{'Expurgation':>{COLUMN_EXPURGATION_WIDTH}}"
    )
    lines = [header, "-" * len(header)]

    for row in rows:
        spec = row.spec
        prefix = (
            f"{spec.n:>{COLUMN_N_WIDTH}} "
            f"{spec.m:>{COLUMN_M_WIDTH}} "
            f"{spec.label:>{COLUMN_W_WIDTH}} "
        )
        if row.report is None:
            lines.append(
                prefix
                + f"{'ERROR':>{COLUMN_BOUND_WIDTH}} "
                + f"{'':>{COLUMN_EXPURGATION_WIDTH}}  {row.error}"
            )
            continue
        expurgation = row.report.n_expurgation
        lines.append(
            prefix
            + f"{row.report.n_clll:>{COLUMN_BOUND_WIDTH}} "
            + f"{'' if expurgation is None else expurgation:>{COLUMN_EXPURGATION_WIDTH}}"
        )

    return "\n".join(lines)


def format_stats(stats: MtStats) -> str:
    """One-line summary of an MT run."""
    return (
        f"seed={stats.seed} policy={stats.policy.value} succeeded={stats.succeeded} "
        f"resamples={stats.resamples} scans={stats.scans} "
        f"comparisons={stats.comparisons} elapsed={stats.elapsed:.3f}s"
    )


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        print(text)
    else:
        output.write_text(text + "\n", encoding="utf-8")
        logger.info("Wrote %s", output)


def cmd_bound(config: RunConfig) -> int:
    """Print the BoundReport for one parameter set."""
    report = bound_report(config.spec())
    _emit(format_report(report, config.fmt), config.output)
    return EXIT_OK


async def cmd_table(config: RunConfig) -> int:
    """Evaluate the grid file (or the built-in tables) and print one row per point."""
    if config.paper_tables:
        specs = paper_table_rows()
    elif config.grid is not None:
        specs = load_grid(config.grid, config.family or Family.PHF)
    else:
        raise InvalidParameterError("table needs --paper-tables or --grid FILE")

    rows = await evaluate_rows(specs)
    if config.fmt == "json":
        text = json.dumps([_row_dict(row) for row in rows], indent=2, allow_nan=False)
    elif config.fmt == "csv":
        text = _csv_text([*REPORT_FIELDS, "error"], [_row_dict(row) for row in rows])
    else:
        text = format_table(rows)
    _emit(text, config.output)
    return EXIT_OK


def _resample_summary(spec: FamilySpec, rows: int) -> str:
    bound = expected_resamples(spec, stationary_point(spec))
    expected = "n/a" if bound is None else format_real(bound)
    return f"expected_resamples<={expected} per_step_cost={per_step_cost(spec, rows)}"


async def cmd_construct(config: RunConfig) -> int:
    """Run Moser-Tardos and write the matrix; N defaults to the cluster expansion bound.

    With ``runs > 1`` seeds seed..seed+runs-1 run concurrently and the
    matrix of the first successful seed is written.
    """
    spec = config.spec()
    rows = config.rows if config.rows is not None else bound_report(spec).n_clll
    if config.runs < 1:
        raise InvalidParameterError(f"need --runs >= 1, got {config.runs}")
    # stats go to stderr when the matrix itself goes to stdout
    info = sys.stdout if config.output is not None else sys.stderr
    print(_resample_summary(spec, rows), file=info)

    if config.runs == 1:
        try:
            matrix, stats = construct(
                spec, rows, config.seed, config.policy, config.max_resamples
            )
        except ResampleLimitError as exc:
            print(f"RESAMPLE_LIMIT {format_stats(exc.stats)}", file=info)
            return EXIT_FAIL
        print(format_stats(stats), file=info)
        _emit(matrix.to_text(spec).rstrip("\n"), config.output)
        return EXIT_OK

    seeds = range(config.seed, config.seed + config.runs)
    outcomes = await run_batch(spec, rows, seeds, config.policy, config.max_resamples)
    for outcome in outcomes:
        status = "" if outcome.stats.succeeded else "RESAMPLE_LIMIT "
        print(f"{status}{format_stats(outcome.stats)}", file=info)
    first = next((outcome for outcome in outcomes if outcome.matrix is not None), None)
    if first is not None:
        _emit(first.matrix.to_text(spec).rstrip("\n"), config.output)
    return EXIT_OK if all(outcome.stats.succeeded for outcome in outcomes) else EXIT_FAIL


def cmd_verify(config: RunConfig) -> int:
    """Check a matrix file; family and w/parts default to the file header.

    Raises:
        InvalidParameterError: when explicit values disagree with the header.
    """
    if config.path is None:
        raise InvalidParameterError("verify needs a matrix file")
    matrix, header_spec = HashMatrix.from_text(config.path.read_text(encoding="utf-8"))

    family = config.family or header_spec.family
    if family is not header_spec.family:
        raise InvalidParameterError(
            f"--family {family.value} disagrees with the file header ({header_spec.family.value})"
        )
    if family is Family.PHF:
        w = config.w if config.w is not None else header_spec.w
        if w != header_spec.w:
            raise InvalidParameterError(f"--w {w} disagrees with the file header (w={header_spec.w})")
        witness = verify_phf(matrix, w)
    else:
        parts = tuple(sorted(config.parts)) if config.parts is not None else header_spec.parts
        if parts != header_spec.parts:
            raise InvalidParameterError(
                f"--parts {','.join(map(str, parts))} disagrees with the file header "
                f"({header_spec.label})"
            )
        witness = verify_shf(matrix, parts)

    if witness is None:
        print("PASS")
        return EXIT_OK
    print(f"FAIL {witness}")
    return EXIT_FAIL


def _add_family_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("family", choices=[f.value for f in Family])
    parser.add_argument("--n", type=int, required=True, help="number of columns")
    parser.add_argument("--m", type=int, required=True, help="alphabet size")
    parser.add_argument("--w", type=int, help="subset size (phf)")
    parser.add_argument("--parts", help="part sizes, e.g. 1,2 (shf)")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser for all four subcommands."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="log at INFO")
    common.add_argument("--debug", action="store_true", help="log at DEBUG")
    common.add_argument("--output", help="write the result to this file instead of stdout")

    parser = argparse.ArgumentParser(
        prog="python -m src.hashbounds",
        description="Cluster expansion bounds and Moser-Tardos construction of hash families.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    bound = commands.add_parser("bound", parents=[common], help="compute bounds for one parameter set")
    _add_family_options(bound)
    bound.add_argument("--format", choices=FORMATS, default="text")

    table = commands.add_parser("table", parents=[common], help="evaluate a parameter grid")
    source = table.add_mutually_exclusive_group(required=True)
    source.add_argument("--paper-tables", action="store_true", help="the 21 built-in comparison rows")
    source.add_argument("--grid", help="CSV grid with header n,m,w or n,m,parts")
    table.add_argument("--family", choices=[f.value for f in Family], default=Family.PHF.value)
    table.add_argument("--format", choices=FORMATS, default="text")

    build = commands.add_parser("construct", parents=[common], help="build a matrix by resampling")
    _add_family_options(build)
    build.add_argument("--rows", type=int, help="number of rows N (default: the cluster expansion bound)")
    build.add_argument("--seed", type=int, default=DEFAULT_SEED)
    build.add_argument(
        "--policy", choices=[p.value for p in BadEventPolicy], default=BadEventPolicy.LEX_FIRST.value
    )
    build.add_argument("--max-resamples", type=int)
    build.add_argument("--runs", type=int, default=1, help="consecutive seeds to run concurrently")

    verify = commands.add_parser("verify", parents=[common], help="check a matrix file exhaustively")
    verify.add_argument("path")
    verify.add_argument("--family", choices=[f.value for f in Family])
    verify.add_argument("--w", type=int)
    verify.add_argument("--parts")

    return parser


async def run(argv: list[str] | None = None) -> int:
    """Parse arguments, configure logging and dispatch one subcommand.

    Returns:
        The process exit code.
    """
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    level = logging.DEBUG if ns.debug else logging.INFO if ns.verbose else LOG_LEVEL
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(message)s",
        stream=sys.stderr,
    )

    try:
        config = RunConfig.from_namespace(ns)
        if config.command == "bound":
            return cmd_bound(config)
        if config.command == "table":
            return await cmd_table(config)
        if config.command == "construct":
            return await cmd_construct(config)
        return cmd_verify(config)
    except HashBoundsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 130


def main() -> None:
    """Synchronous entry point for the hashbounds CLI."""
    sys.exit(asyncio.run(run()))


if __name__ == "__main__":
    main()
