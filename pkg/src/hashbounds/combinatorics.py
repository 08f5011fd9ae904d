"""Exact counting primitives shared by the bound and construction modules.

Every function returns Python integers (arbitrary precision) or
``fractions.Fraction`` values; floating point only appears in the two log
helpers at the bottom, which convert exact quantities into the log domain.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Iterable
from fractions import Fraction
from functools import lru_cache

from src.hashbounds.errors import ExactDivisionError, InvalidParameterError

logger = logging.getLogger(__name__)

_LN2 = math.log(2.0)
# Bits kept in the mantissa when logging huge integers
_MANTISSA_BITS = 64


def factorial(k: int) -> int:
    """Return k!."""
    if k < 0:
        raise InvalidParameterError(f"factorial needs k >= 0, got {k}")
    return math.factorial(k)


def binomial(a: int, b: int) -> int:
    """Return C(a, b), with C(a, b) = 0 whenever b < 0 or b > a."""
    if a < 0:
        raise InvalidParameterError(f"binomial needs a >= 0, got {a}")
    if b < 0 or b > a:
        return 0
    return math.comb(a, b)


def falling_factorial(a: int, k: int) -> int:
    """Return a(a-1)...(a-k+1): 1 for k = 0 and 0 once the product reaches zero."""
    if a < 0 or k < 0:
        raise InvalidParameterError(
            f"falling_factorial needs a >= 0 and k >= 0, got a={a}, k={k}"
        )
    return math.perm(a, k)


@lru_cache(maxsize=None)
def _stirling_row(p: int) -> tuple[int, ...]:
    """Row S(p, 0..p) of the Stirling numbers of the second kind."""
    if p == 0:
        return (1,)
    previous = _stirling_row(p - 1)
    row = [0] * (p + 1)
    for c in range(1, p + 1):
        above = previous[c] if c < p else 0
        row[c] = c * above + previous[c - 1]
    return tuple(row)


def stirling2(p: int, c: int) -> int:
    """Number of partitions of a p-set into c nonempty blocks."""
    if p < 0 or c < 0:
        raise InvalidParameterError(f"stirling2 needs p, c >= 0, got p={p}, c={c}")
    if c > p:
        return 0
    return _stirling_row(p)[c]


def _truncated_product(left: tuple[int, ...], right: tuple[int, ...], degree: int) -> tuple[int, ...]:
    out = [0] * (degree + 1)
    for i, a in enumerate(left):
        if a == 0:
            continue
        for j in range(min(len(right), degree + 1 - i)):
            out[i + j] += a * right[j]
    return tuple(out)


@lru_cache(maxsize=4096)
def surjective_series(w: int, k: int, degree: int) -> tuple[int, ...]:
    """Coefficients 0..degree of ((1+z)^w - 1)^k, truncated at ``degree``.

    Built by repeated truncated convolution from the k-1 power, so that one
    cluster polynomial reuses every lower power.
    """
    base = tuple(binomial(w, i) if i >= 1 else 0 for i in range(min(w, degree) + 1))
    if k == 1:
        return base + (0,) * (degree + 1 - len(base))
    return _truncated_product(surjective_series(w, k - 1, degree), base, degree)


def surjective_series_coeff(w: int, k: int, j: int) -> int:
    """Return [z^j] ((1+z)^w - 1)^k.

    Equals the sum over compositions i_1 + ... + i_k = j with every i_l >= 1
    of prod_l C(w, i_l), but is computed without enumerating compositions.
    """
    if w < 1 or k < 1 or j < 0:
        raise InvalidParameterError(
            f"surjective_series_coeff needs w >= 1, k >= 1, j >= 0, got w={w}, k={k}, j={j}"
        )
    if j < k or j > k * w:
        return 0
    return surjective_series(w, k, j)[j]


def family_multiplicity(parts: Iterable[int]) -> int:
    """Number of unordered disjoint families with the given part sizes over a w-set.

    m_w = w! / (w_1! ... w_s!) / prod_p (multiplicity of p)!
    """
    sizes = list(parts)
    if not sizes:
        raise InvalidParameterError("family_multiplicity needs at least one part")
    if any(size < 1 for size in sizes):
        raise InvalidParameterError(f"part sizes must be positive, got {sizes}")
    denominator = 1
    for size in sizes:
        denominator *= math.factorial(size)
    for multiplicity in Counter(sizes).values():
        denominator *= math.factorial(multiplicity)
    count, remainder = divmod(math.factorial(sum(sizes)), denominator)
    if remainder:
        raise ExactDivisionError(f"family multiplicity of {sizes} is not integral")
    return count


def log_count(x: int) -> float:
    """Natural log of a positive integer of any size.

    Keeps the leading bits as a float mantissa and adds the binary exponent,
    so no overflow occurs for integers far beyond the double range.
    """
    if x <= 0:
        raise InvalidParameterError(f"log_count needs a positive integer, got {x}")
    shift = x.bit_length() - _MANTISSA_BITS
    if shift <= 0:
        return math.log(x)
    return math.log(x >> shift) + shift * _LN2


def log_fraction(value: Fraction) -> float:
    """Natural log of a positive exact rational.

    Ratios near 1 go through log1p of the exact difference so that a tiny
    log is not lost to cancellation between two large logs.
    """
    if value <= 0:
        raise InvalidParameterError(f"log_fraction needs a positive value, got {value}")
    delta = value - 1
    if abs(delta) < Fraction(1, 2):
        return math.log1p(float(delta))
    return log_count(value.numerator) - log_count(value.denominator)
