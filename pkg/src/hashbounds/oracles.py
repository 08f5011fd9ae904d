"""Brute-force reference counts and exhaustive verifiers.

Nothing here shares code with the closed forms it checks: independent sets,
colourings and separating rows are enumerated directly. Every path is
size-guarded because the enumerations are exponential.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Iterator
from fractions import Fraction

from config.hashbounds import MAX_SCAN_EVENTS, ORACLE_MAX_COLORINGS, ORACLE_MAX_SUBSETS
from src.hashbounds.combinatorics import binomial
from src.hashbounds.errors import InstanceTooLargeError, InvalidParameterError
from src.hashbounds.models import HashMatrix, Witness, WitnessKind
from src.hashbounds.mt_engine import row_is_injective, row_separates

logger = logging.getLogger(__name__)

Family = tuple[tuple[int, ...], ...]


def _guard(count: int, limit: int, what: str) -> None:
    if count > limit:
        raise InstanceTooLargeError(f"{what}: {count} exceeds the limit {limit}")


def verify_phf(matrix: HashMatrix, w: int) -> Witness | None:
    """Check every w-subset of columns for a row injective on it.

    Returns:
        None if the matrix is a PHF, else the lexicographically first subset
        on which every row has a repeated entry.
    """
    n = matrix.cols
    if not 2 <= w <= n:
        raise InvalidParameterError(f"need 2 <= w <= n, got w={w}, n={n}")
    _guard(binomial(n, w), MAX_SCAN_EVENTS, f"C({n},{w}) subsets to verify")
    rows = matrix.entries.tolist()
    for subset in itertools.combinations(range(1, n + 1), w):
        if not any(row_is_injective(row, subset) for row in rows):
            logger.info("PHF check failed on columns %s", subset)
            return Witness(kind=WitnessKind.BAD_SUBSET, parts=(subset,))
    return None


def _ordered_families(pool: tuple[int, ...], sizes: tuple[int, ...]) -> Iterator[Family]:
    if not sizes:
        yield ()
        return
    for part in itertools.combinations(pool, sizes[0]):
        rest = tuple(c for c in pool if c not in part)
        for tail in _ordered_families(rest, sizes[1:]):
            yield (part, *tail)


def _canonical(family: Family) -> Family:
    return tuple(sorted(family, key=lambda part: (len(part), part)))


def disjoint_families(n: int, parts: Iterable[int]) -> list[Family]:
    """All unordered disjoint families with the given part sizes, in canonical order.

    Built by enumerating labelled families and discarding relabelings, so it
    is independent of the construction engine's ordered enumeration.
    """
    sizes = tuple(sorted(parts))
    seen: set[Family] = set()
    out: list[Family] = []
    for union in itertools.combinations(range(1, n + 1), sum(sizes)):
        for family in _ordered_families(union, sizes):
            key = _canonical(family)
            if key not in seen:
                seen.add(key)
                out.append(key)
    out.sort(key=lambda family: (tuple(sorted(c for part in family for c in part)), family))
    return out


def verify_shf(matrix: HashMatrix, parts: Iterable[int]) -> Witness | None:
    """Check every disjoint family with the given part sizes for a separating row.

    Returns:
        None if the matrix is an SHF, else the first family (canonical order)
        that no row separates.
    """
    sizes = tuple(sorted(parts))
    n = matrix.cols
    if sum(sizes) > n:
        raise InvalidParameterError(f"parts {list(sizes)} need more than n={n} columns")
    _guard(binomial(n, sum(sizes)), MAX_SCAN_EVENTS, f"C({n},{sum(sizes)}) unions to verify")
    rows = matrix.entries.tolist()
    for family in disjoint_families(n, sizes):
        if not any(row_separates(row, family) for row in rows):
            logger.info("SHF check failed on family %s", family)
            return Witness(kind=WitnessKind.BAD_FAMILY, parts=family)
    return None


def brute_gamma_k(w: int, n: int, k: int) -> int:
    """Count k-sets of pairwise-disjoint w-subsets of [n] that each meet {1..w}."""
    if not 1 <= w <= n or k < 1:
        raise InvalidParameterError(f"need 1 <= w <= n and k >= 1, got w={w}, n={n}, k={k}")
    _guard(binomial(n, w), ORACLE_MAX_SUBSETS, f"C({n},{w}) subsets")
    reference = frozenset(range(1, w + 1))
    neighbours = [
        frozenset(subset)
        for subset in itertools.combinations(range(1, n + 1), w)
        if reference.intersection(subset)
    ]

    def count_from(start: int, used: frozenset[int], remaining: int) -> int:
        if remaining == 0:
            return 1
        total = 0
        for index in range(start, len(neighbours)):
            member = neighbours[index]
            if used.isdisjoint(member):
                total += count_from(index + 1, used | member, remaining - 1)
        return total

    return count_from(0, frozenset(), k)


def brute_chromatic(parts: Iterable[int], m: int) -> int:
    """Count proper m-colourings of the complete multipartite graph by enumeration.

    A colouring is proper exactly when, read as a row, it separates the parts.
    """
    sizes = tuple(parts)
    w = sum(sizes)
    _guard(m**w, ORACLE_MAX_COLORINGS, f"{m}^{w} colourings")
    family = _layout(sizes)
    return sum(1 for row in itertools.product(range(1, m + 1), repeat=w) if row_separates(row, family))


def _layout(sizes: tuple[int, ...]) -> Family:
    positions = iter(range(1, sum(sizes) + 1))
    return tuple(tuple(next(positions) for _ in range(size)) for size in sizes)


def brute_row_failure_probability(parts: int | Iterable[int], m: int) -> Fraction:
    """Fraction of rows in [m]^w that fail to separate.

    Args:
        parts: An int w for the PHF injectivity test, or the SHF part sizes.
        m: Alphabet size.
    """
    if isinstance(parts, int):
        w = parts
        columns = range(1, w + 1)

        def fails(row: tuple[int, ...]) -> bool:
            return not row_is_injective(row, columns)

    else:
        sizes = tuple(parts)
        w = sum(sizes)
        family = _layout(sizes)

        def fails(row: tuple[int, ...]) -> bool:
            return not row_separates(row, family)

    total = m**w
    _guard(total, ORACLE_MAX_COLORINGS, f"{m}^{w} rows")
    failing = sum(1 for row in itertools.product(range(1, m + 1), repeat=w) if fails(row))
    return Fraction(failing, total)
