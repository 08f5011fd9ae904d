"""Moser-Tardos resampling for perfect and separating hash families.

The N*n matrix entries are independent uniform variables on {1..m}. A bad
event is a column subset W (PHF) or a disjoint family S (SHF) that no row
separates; the loop picks one occurring bad event, redraws every entry of its
columns and repeats until none occurs.

Randomness comes from one numpy PCG64 stream per run, seeded with a 64-bit
integer. Step 0 draws the matrix row-major; each resample draws the N x |W|
block of the selected columns row-major, columns in ascending order. A run is
therefore a deterministic function of (spec, N, seed, policy).

A PHF is handled as the SHF whose parts are w singletons: a row separates
{{c} : c in W} exactly when it is injective on W.
"""

from __future__ import annotations

import asyncio
import itertools
import logging
import time
from collections.abc import Iterable, Iterator, Sequence
from functools import lru_cache

import numpy as np

from config.hashbounds import MAX_SCAN_EVENTS, RESAMPLE_CAP_FACTOR, TABLE_WORKERS
from src.hashbounds.combinatorics import binomial, family_multiplicity
from src.hashbounds.errors import (
    InstanceTooLargeError,
    InvalidParameterError,
    ResampleLimitError,
)
from src.hashbounds.models import (
    BadEventPolicy,
    FamilySpec,
    HashMatrix,
    MtStats,
    RunOutcome,
)

logger = logging.getLogger(__name__)

_SEED_LIMIT = 2**64
# Entry comparisons per vectorized block; LEX_FIRST stops after the first block with a hit
_SCAN_BUDGET = 2**22

ColumnFamily = tuple[tuple[int, ...], ...]


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit unsigned seed."""
    if not 0 <= seed < _SEED_LIMIT:
        raise InvalidParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def _draw(rng: np.random.Generator, rows: int, cols: int, m: int) -> np.ndarray:
    return rng.integers(1, m, size=(rows, cols), endpoint=True, dtype=np.int64)


def sample_matrix(rows: int, cols: int, m: int, rng: np.random.Generator) -> HashMatrix:
    """Draw an N x n matrix with independent uniform entries in {1..m}."""
    if rows < 1 or cols < 1:
        raise InvalidParameterError(f"need N >= 1 and n >= 1, got N={rows}, n={cols}")
    if m < 2:
        raise InvalidParameterError(f"need m >= 2, got m={m}")
    return HashMatrix(entries=_draw(rng, rows, cols, m), alphabet=m)


def row_is_injective(row: Sequence[int], columns: Iterable[int]) -> bool:
    """True iff the row's entries on the (1-based) columns are pairwise distinct."""
    values = [row[c - 1] for c in columns]
    return all(a != b for a, b in itertools.combinations(values, 2))


def row_separates(row: Sequence[int], family: Iterable[Iterable[int]]) -> bool:
    """True iff the value sets of the row on different parts are pairwise disjoint.

    Values may repeat inside a part.
    """
    value_sets = [{row[c - 1] for c in part} for part in family]
    return all(a.isdisjoint(b) for a, b in itertools.combinations(value_sets, 2))


def _splits(pool: tuple[int, ...], sizes: tuple[int, ...], floor: int | None) -> Iterator[ColumnFamily]:
    if not sizes:
        yield ()
        return
    size = sizes[0]
    same_size_follows = len(sizes) > 1 and sizes[1] == size
    for part in itertools.combinations(pool, size):
        # equal-size parts are ordered by their smallest column
        if floor is not None and part[0] <= floor:
            continue
        rest = tuple(c for c in pool if c not in part)
        for tail in _splits(rest, sizes[1:], part[0] if same_size_follows else None):
            yield (part, *tail)


def enumerate_families(n: int, parts: Iterable[int]) -> Iterator[ColumnFamily]:
    """Every unordered disjoint family of 1-based column sets with the given sizes.

    Order: union W lexicographically, then parts sorted by size with
    equal-size parts ordered by smallest column, each part sorted. Each
    family appears exactly once, C(n, w) * m_w in total.
    """
    sizes = tuple(sorted(parts))
    for union in itertools.combinations(range(1, n + 1), sum(sizes)):
        yield from _splits(union, sizes, None)


def count_families(n: int, parts: Iterable[int]) -> int:
    """C(n, w) * m_w, the number of bad events."""
    sizes = list(parts)
    return binomial(n, sum(sizes)) * family_multiplicity(sizes)


class EventScanner:
    """Vectorized check of every bad event of one (n, parts) family against a matrix.

    Attributes:
        families: Column indices (0-based) of each family, laid out part by part.
        left, right: Positions within a family layout whose entries must differ.
    """

    def __init__(self, n: int, parts: tuple[int, ...]) -> None:
        self.n = n
        self.parts = tuple(sorted(parts))
        self.total = count_families(n, self.parts)
        if self.total > MAX_SCAN_EVENTS:
            raise InstanceTooLargeError(
                f"{self.total} bad events for n={n}, parts={list(self.parts)} "
                f"exceeds MAX_SCAN_EVENTS={MAX_SCAN_EVENTS}"
            )
        layouts = [
            [c - 1 for part in family for c in part]
            for family in enumerate_families(n, self.parts)
        ]
        self.families = np.array(layouts, dtype=np.intp).reshape(self.total, sum(self.parts))

        owner = [index for index, size in enumerate(self.parts) for _ in range(size)]
        pairs = [
            (i, j)
            for i, j in itertools.combinations(range(len(owner)), 2)
            if owner[i] != owner[j]
        ]
        self.left = np.array([i for i, _ in pairs], dtype=np.intp)
        self.right = np.array([j for _, j in pairs], dtype=np.intp)

    @property
    def pairs_per_row(self) -> int:
        return len(self.left)

    def bad_mask(self, entries: np.ndarray, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Boolean mask of families[start:stop] that no row separates."""
        values = entries[:, self.families[start:stop]]
        collide = values[:, :, self.left] == values[:, :, self.right]
        return collide.any(axis=2).all(axis=0)

    def family(self, index: int) -> ColumnFamily:
        """1-based column family for a row of ``families``."""
        flat = (self.families[index] + 1).tolist()
        out = []
        offset = 0
        for size in self.parts:
            out.append(tuple(sorted(flat[offset : offset + size])))
            offset += size
        return tuple(out)

    def _blocks(self, rows: int) -> Iterator[tuple[int, int]]:
        width = max(1, _SCAN_BUDGET // (rows * max(1, self.pairs_per_row)))
        for start in range(0, self.total, width):
            yield start, min(start + width, self.total)

    def find(
        self,
        entries: np.ndarray,
        policy: BadEventPolicy,
        rng: np.random.Generator | None,
        stats: MtStats | None = None,
    ) -> int | None:
        """Index of the selected occurring bad event, or None when the matrix is good.

        LEX_FIRST returns the first bad family in enumeration order; RANDOM
        draws uniformly among all bad families from ``rng``.
        """
        if policy is BadEventPolicy.RANDOM and rng is None:
            raise InvalidParameterError("RANDOM event selection needs a generator")
        rows = entries.shape[0]
        found: list[np.ndarray] = []
        for start, stop in self._blocks(rows):
            hits = np.flatnonzero(self.bad_mask(entries, start, stop)) + start
            lex_hit = policy is BadEventPolicy.LEX_FIRST and hits.size > 0
            checked = int(hits[0]) + 1 - start if lex_hit else stop - start
            if stats is not None:
                stats.scans += checked
                stats.comparisons += checked * rows * self.pairs_per_row
            if lex_hit:
                return int(hits[0])
            found.append(hits)
        bad = np.concatenate(found) if found else np.empty(0, dtype=np.intp)
        if not bad.size:
            return None
        return int(bad[rng.integers(bad.size)])


@lru_cache(maxsize=32)
def event_scanner(n: int, parts: tuple[int, ...]) -> EventScanner:
    """Cached scanner; scanners are read-only after construction."""
    return EventScanner(n, tuple(sorted(parts)))


def find_bad_event_phf(
    matrix: HashMatrix,
    w: int,
    policy: BadEventPolicy = BadEventPolicy.LEX_FIRST,
    rng: np.random.Generator | None = None,
) -> tuple[int, ...] | None:
    """A w-subset of columns on which no row is injective, or None.

    Under LEX_FIRST this is the lexicographically smallest such subset.
    """
    if not 2 <= w <= matrix.cols:
        raise InvalidParameterError(f"need 2 <= w <= n, got w={w}, n={matrix.cols}")
    scanner = event_scanner(matrix.cols, (1,) * w)
    index = scanner.find(matrix.entries, policy, rng)
    if index is None:
        return None
    return tuple(sorted(c for part in scanner.family(index) for c in part))


def find_bad_event_shf(
    matrix: HashMatrix,
    parts: Iterable[int],
    policy: BadEventPolicy = BadEventPolicy.LEX_FIRST,
    rng: np.random.Generator | None = None,
) -> ColumnFamily | None:
    """A disjoint family with the given part sizes that no row separates, or None."""
    sizes = tuple(sorted(parts))
    if sum(sizes) > matrix.cols:
        raise InvalidParameterError(f"parts {list(sizes)} need more than n={matrix.cols} columns")
    scanner = event_scanner(matrix.cols, sizes)
    index = scanner.find(matrix.entries, policy, rng)
    return None if index is None else scanner.family(index)


def default_resample_cap(spec: FamilySpec) -> int:
    """RESAMPLE_CAP_FACTOR * C(n, w)."""
    return RESAMPLE_CAP_FACTOR * binomial(spec.n, spec.w)


def per_step_cost(spec: FamilySpec, rows: int) -> int:
    """Entry comparisons of one full sweep over every bad event.

    Each family needs, per row, one comparison for every pair of positions in
    different parts: C(w, 2) for a PHF, fewer for an SHF.
    """
    pairs = binomial(spec.w, 2) - sum(binomial(size, 2) for size in spec.parts)
    return rows * pairs * count_families(spec.n, spec.parts)


def construct(
    spec: FamilySpec,
    rows: int,
    seed: int,
    policy: BadEventPolicy = BadEventPolicy.LEX_FIRST,
    max_resamples: int | None = None,
    record_transcript: bool = False,
) -> tuple[HashMatrix, MtStats]:
    """Run the Moser-Tardos loop until the matrix is a PHF/SHF.

    Args:
        spec: Family parameters (n, m and w or parts).
        rows: Number of rows N.
        seed: 64-bit seed of the PCG64 stream.
        policy: Which occurring bad event to resample.
        max_resamples: Cap on resampling steps; defaults to RESAMPLE_CAP_FACTOR * C(n, w).
        record_transcript: Keep every selected event in ``stats.transcript``.

    Returns:
        The final matrix and the run statistics.

    Raises:
        ResampleLimitError: when the cap is reached; carries the stats.
    """
    if rows < 1:
        raise InvalidParameterError(f"need N >= 1, got N={rows}")
    cap = default_resample_cap(spec) if max_resamples is None else max_resamples
    if cap < 1:
        raise InvalidParameterError(f"need max_resamples >= 1, got {cap}")

    start_time = time.monotonic()
    scanner = event_scanner(spec.n, spec.parts)
    rng = make_rng(seed)
    stats = MtStats(seed=seed, policy=policy)
    matrix = sample_matrix(rows, spec.n, spec.m, rng)
    logger.info(
        "MT run: %s n=%d m=%d %s N=%d seed=%d (%d bad events)",
        spec.family.value.upper(),
        spec.n,
        spec.m,
        spec.label,
        rows,
        seed,
        scanner.total,
    )

    while True:
        index = scanner.find(matrix.entries, policy, rng, stats)
        if index is None:
            stats.succeeded = True
            break
        if stats.resamples >= cap:
            stats.elapsed = time.monotonic() - start_time
            logger.warning(
                "Resample limit %d reached for seed %d (N=%d is probably below threshold)",
                cap,
                seed,
                rows,
            )
            raise ResampleLimitError(f"resample limit {cap} reached for seed {seed}", stats)

        event = scanner.family(index)
        columns = sorted(c - 1 for part in event for c in part)
        matrix.entries[:, columns] = _draw(rng, rows, len(columns), spec.m)
        stats.resamples += 1
        if record_transcript:
            stats.transcript.append(event)
        logger.debug("Resample %d: %s", stats.resamples, event)

    stats.elapsed = time.monotonic() - start_time
    logger.info(
        "MT run seed=%d finished: %d resamples, %d scans in %.3f seconds",
        seed,
        stats.resamples,
        stats.scans,
        stats.elapsed,
    )
    return matrix, stats


async def run_batch(
    spec: FamilySpec,
    rows: int,
    seeds: Iterable[int],
    policy: BadEventPolicy = BadEventPolicy.LEX_FIRST,
    max_resamples: int | None = None,
    workers: int = TABLE_WORKERS,
) -> list[RunOutcome]:
    """Run independent constructions concurrently, one per seed.

    Uses a semaphore limited to ``workers`` concurrent runs; each run executes
    in a worker thread and shares no mutable state with the others.

    Returns:
        One RunOutcome per seed, in seed order. Runs that hit the resample cap
        carry their stats and no matrix.
    """
    semaphore = asyncio.Semaphore(max(1, workers))
    # build the shared read-only scanner once, before the threads start
    event_scanner(spec.n, spec.parts)

    async def _run_with_semaphore(seed: int) -> RunOutcome:
        async with semaphore:
            try:
                matrix, stats = await asyncio.to_thread(
                    construct, spec, rows, seed, policy, max_resamples
                )
                return RunOutcome(stats=stats, matrix=matrix)
            except ResampleLimitError as exc:
                return RunOutcome(stats=exc.stats)

    return list(await asyncio.gather(*(_run_with_semaphore(seed) for seed in seeds)))
