"""Parameter grids and concurrent evaluation of bound tables.

Provides the two built-in comparison tables (w >= 7 and w < 7), a CSV grid
loader, and a batch evaluator that computes rows concurrently while keeping
their order.
"""

from __future__ import annotations

import asyncio
import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path

from config.hashbounds import TABLE_WORKERS
from src.hashbounds.bounds import bound_report
from src.hashbounds.errors import HashBoundsError, InvalidParameterError
from src.hashbounds.models import BoundReport, Family, FamilySpec, PhfSpec, ShfSpec, parse_parts

logger = logging.getLogger(__name__)

# (n, m, w) for perfect hash families with w >= 7. The last four rows are
# printed in the source table with the m and w columns swapped.
TABLE_LARGE_W: tuple[tuple[int, int, int], ...] = (
    (15, 7, 7),
    (50, 7, 7),
    (200, 7, 7),
    (1000, 7, 7),
    (50, 8, 8),
    (200, 8, 8),
    (1000, 8, 8),
    (1000, 12, 8),
    (1000, 50, 8),
    (1000, 50, 15),
    (1000, 50, 18),
)

# (n, m, w) for perfect hash families with w < 7
TABLE_SMALL_W: tuple[tuple[int, int, int], ...] = (
    (10, 4, 4),
    (15, 4, 4),
    (50, 4, 4),
    (10, 5, 5),
    (15, 5, 5),
    (50, 5, 5),
    (15, 6, 6),
    (50, 6, 6),
    (90, 6, 6),
    (200, 6, 6),
)


@dataclass
class TableRow:
    """One evaluated grid point; ``report`` is None when ``error`` is set."""

    spec: FamilySpec
    report: BoundReport | None = None
    error: str | None = None


def paper_table_rows() -> list[FamilySpec]:
    """The 21 rows of the two built-in comparison tables, large-w table first."""
    return [PhfSpec(n=n, m=m, w=w) for n, m, w in TABLE_LARGE_W + TABLE_SMALL_W]


def parse_grid(text: str, family: Family = Family.PHF) -> list[FamilySpec]:
    """Parse a CSV grid with header ``n,m,w`` (PHF) or ``n,m,parts`` (SHF).

    Parts are separated by "+". Blank lines and lines starting with "#" are
    skipped.

    Raises:
        InvalidParameterError: for a missing column or a malformed value.
    """
    lines = [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not lines:
        return []
    reader = csv.DictReader(io.StringIO("\n".join(lines)))
    needed = {"n", "m", "w"} if family is Family.PHF else {"n", "m", "parts"}
    missing = needed - set(reader.fieldnames or [])
    if missing:
        raise InvalidParameterError(f"grid header lacks column(s): {', '.join(sorted(missing))}")

    specs: list[FamilySpec] = []
    for line_no, record in enumerate(reader, start=2):
        try:
            n, m = int(record["n"]), int(record["m"])
            if family is Family.PHF:
                specs.append(PhfSpec(n=n, m=m, w=int(record["w"])))
            else:
                specs.append(ShfSpec(n=n, m=m, parts=parse_parts(record["parts"])))
        except (TypeError, ValueError) as exc:
            raise InvalidParameterError(f"grid line {line_no}: {exc}") from exc
    return specs


def load_grid(path: Path, family: Family = Family.PHF) -> list[FamilySpec]:
    """Read and parse a grid file."""
    return parse_grid(Path(path).read_text(encoding="utf-8"), family)


def evaluate_row(spec: FamilySpec) -> TableRow:
    """Compute one row; failures are recorded on the row instead of raised."""
    try:
        return TableRow(spec=spec, report=bound_report(spec))
    except HashBoundsError as exc:
        logger.warning("Table row n=%d m=%d %s failed: %s", spec.n, spec.m, spec.label, exc)
        return TableRow(spec=spec, error=str(exc))


async def evaluate_rows(specs: list[FamilySpec], workers: int = TABLE_WORKERS) -> list[TableRow]:
    """Evaluate table rows concurrently, at most ``workers`` at a time.

    Bound computation is pure, so rows run in worker threads; the result
    keeps the input order.
    """
    semaphore = asyncio.Semaphore(max(1, workers))

    async def _evaluate_with_semaphore(spec: FamilySpec) -> TableRow:
        async with semaphore:
            return await asyncio.to_thread(evaluate_row, spec)

    rows = await asyncio.gather(*(_evaluate_with_semaphore(spec) for spec in specs))
    logger.info("Evaluated %d table rows", len(rows))
    return list(rows)
