"""Lower bounds on the number of rows N of perfect and separating hash families.

The cluster expansion bounds are N >= A_n(w) / D_m(w) for PHF(N; n, m, w) and
N >= S_n(w) / ln(1/q) for SHF(N; n, m, {w_1..w_s}). The plain local lemma,
expurgation and Stinson-Zaverucha bounds are computed alongside for
comparison. Probabilities are exact fractions until the final logarithm.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction

import mpmath
from scipy.optimize import brentq

from src.hashbounds.cluster_expansion import (
    a_n_w,
    log_alpha_scale,
    stationary_point,
)
from src.hashbounds.combinatorics import (
    binomial,
    factorial,
    falling_factorial,
    family_multiplicity,
    log_count,
    log_fraction,
    stirling2,
)
from src.hashbounds.errors import (
    AlphabetTooSmallError,
    DegenerateProbabilityError,
    InvalidParameterError,
)
from src.hashbounds.models import (
    BoundReport,
    FamilySpec,
    PhfSpec,
    ShfSpec,
    StationaryPoint,
    Winner,
)

logger = logging.getLogger(__name__)

# Relative slack under which a ratio is treated as the integer it rounds to
_INTEGER_RATIO_SLACK = 1e-12


def min_rows(numerator: float, denominator: float) -> int:
    """Smallest integer N >= numerator / denominator, and at least 1."""
    ratio = numerator / denominator
    nearest = round(ratio)
    if abs(ratio - nearest) <= _INTEGER_RATIO_SLACK * max(1.0, abs(ratio)):
        return max(1, int(nearest))
    return max(1, math.ceil(ratio))


# --- per-row failure probabilities -------------------------------------------------


def phf_row_failure(m: int, w: int) -> Fraction:
    """Probability that a uniform row is not injective on a fixed w-set: 1 - (m)_w / m^w."""
    total = m**w
    return Fraction(total - falling_factorial(m, w), total)


def d_m_w(m: int, w: int) -> float:
    """D_m(w) = ln(m^w) - ln(m^w - w! C(m, w)).

    Raises:
        AlphabetTooSmallError: when w > m, so no row is ever injective.
    """
    if m < 2 or w < 2:
        raise InvalidParameterError(f"need m >= 2 and w >= 2, got m={m}, w={w}")
    if w > m:
        raise AlphabetTooSmallError(
            f"alphabet too small: no injective row possible (w={w} > m={m})"
        )
    return -log_fraction(phf_row_failure(m, w))


def chromatic_multipartite(parts: tuple[int, ...] | list[int], m: int) -> int:
    """Proper m-colourings of the complete multipartite graph with the given part sizes.

    A proper colouring splits each part into c_i colour classes (S(w_i, c_i)
    ways) and gives the sum(c_i) classes distinct colours ((m)_{sum c_i} ways).
    The per-part class counts are convolved so the sum is grouped by total.
    """
    sizes = list(parts)
    if not sizes:
        raise InvalidParameterError("chromatic_multipartite needs at least one part")
    if m < 0:
        raise InvalidParameterError(f"need m >= 0, got m={m}")
    by_total = [1]
    for size in sizes:
        classes = [stirling2(size, c) for c in range(size + 1)]
        merged = [0] * (len(by_total) + size)
        for total, ways in enumerate(by_total):
            if ways == 0:
                continue
            for c in range(1, size + 1):
                merged[total + c] += ways * classes[c]
        by_total = merged
    return sum(ways * falling_factorial(m, total) for total, ways in enumerate(by_total) if ways)


def shf_row_failure(parts: tuple[int, ...] | list[int], m: int) -> Fraction:
    """q = 1 - pi(m) / m^w for the complete multipartite graph on ``parts``."""
    w = sum(parts)
    total = m**w
    return 1 - Fraction(chromatic_multipartite(parts, m), total)


def _checked_q(parts: tuple[int, ...] | list[int], m: int) -> Fraction:
    q = shf_row_failure(parts, m)
    if q == 1:
        raise DegenerateProbabilityError(
            f"no single row can separate parts {list(parts)} with m={m} symbols"
        )
    if q == 0:
        raise DegenerateProbabilityError(
            f"every row separates parts {list(parts)} with m={m}; the bound is vacuous"
        )
    return q


def q_shf(spec: ShfSpec) -> Fraction:
    """Exact per-row probability of failing to separate a fixed family.

    Raises:
        DegenerateProbabilityError: when q is 0 or 1.
    """
    return _checked_q(spec.parts, spec.m)


# --- numerators ------------------------------------------------------------------------


def l_n_w(n: int, w: int) -> float:
    """L_n(w) = ln[e (C(n, w) - C(n-w, w))]."""
    return 1.0 + log_count(binomial(n, w) - binomial(n - w, w))


def e_n_w(n: int, w: int) -> float:
    """E_n(w) = ln C(2n, w) - ln n."""
    return log_count(binomial(2 * n, w)) - math.log(n)


def f_n_w(n: int, parts: tuple[int, ...]) -> float:
    """F_n(w) = ln C(2n, w_1) + ln C(2n - w_1, w_2) - ln n, for two parts.

    Summed, not subtracted: only the sum expands to w ln 2 + (w-1) ln(n-w) + ...
    """
    if len(parts) != 2:
        raise InvalidParameterError(f"F_n(w) is defined for two parts, got {list(parts)}")
    w1, w2 = parts
    return log_count(binomial(2 * n, w1)) + log_count(binomial(2 * n - w1, w2)) - math.log(n)


def log_phi_prime(spec: FamilySpec, a_n: float | None = None) -> float | None:
    """ln phi'(tau); None when n = w, where the alpha scale is zero."""
    if spec.n <= spec.w:
        return None
    if a_n is None:
        a_n = a_n_w(spec)
    return a_n - log_alpha_scale(spec.w, spec.n)


def delta_n(spec: PhfSpec) -> float:
    """Delta_n(w) = E_n(w) - A_n(w), evaluated through its closed form.

    ln(2^w / w) + sum_{j=1}^{w-1} ln((1 - j/2n) / (1 - w/n)) - ln phi'(tau)
    """
    n, w = spec.n, spec.w
    if n < 2 * w:
        raise InvalidParameterError(f"Delta_n(w) needs n >= 2w, got n={n}, w={w}")
    correction = math.fsum(
        math.log1p(-j / (2 * n)) - math.log1p(-w / n) for j in range(1, w)
    )
    return w * math.log(2.0) - math.log(w) + correction - log_phi_prime(spec)


def expected_resamples(spec: FamilySpec, point: StationaryPoint) -> float | None:
    """Moser-Tardos expected resample bound C(n, w) mu*; None when mu* is not attained."""
    if not point.attained:
        return None
    log_steps = log_count(binomial(spec.n, spec.w)) + math.log(point.mu_star)
    return math.exp(log_steps) if log_steps < 700.0 else math.inf


# --- PHF -------------------------------------------------------------------------------


def lll_phf_bound(spec: PhfSpec) -> int:
    """N >= L_n(w) / D_m(w) from the symmetric local lemma."""
    return min_rows(l_n_w(spec.n, spec.w), d_m_w(spec.m, spec.w))


def expurgation_phf_bound(spec: PhfSpec) -> int:
    """N >= E_n(w) / D_m(w) from the expurgation method."""
    return min_rows(e_n_w(spec.n, spec.w), d_m_w(spec.m, spec.w))


def phf_min_rows(spec: PhfSpec) -> BoundReport:
    """Cluster expansion bound N >= A_n(w) / D_m(w) with the comparison bounds.

    Args:
        spec: PHF parameters with w <= m.

    Returns:
        BoundReport with n_clll, n_lll and n_expurgation filled in.
    """
    d = d_m_w(spec.m, spec.w)
    point = stationary_point(spec)
    a = -point.log_max_ratio
    report = BoundReport(
        spec=spec,
        a_n=a,
        d_m=d,
        n_clll=min_rows(a, d),
        q=phf_row_failure(spec.m, spec.w),
        log_phi_prime=log_phi_prime(spec, a),
        n_lll=min_rows(l_n_w(spec.n, spec.w), d),
        n_expurgation=min_rows(e_n_w(spec.n, spec.w), d),
        attained=point.attained,
        expected_resamples=expected_resamples(spec, point),
    )
    logger.info(
        "PHF(n=%d, m=%d, w=%d): N_clll=%d N_lll=%d N_exp=%d",
        spec.n,
        spec.m,
        spec.w,
        report.n_clll,
        report.n_lll,
        report.n_expurgation,
    )
    return report


# --- SHF -------------------------------------------------------------------------------


def expurgation_shf_bound(spec: ShfSpec) -> int:
    """N >= F_n(w) / ln(1/q) from the expurgation method (two parts only)."""
    if spec.s != 2:
        raise InvalidParameterError(f"expurgation bound needs s = 2 parts, got s={spec.s}")
    return min_rows(f_n_w(spec.n, spec.parts), -log_fraction(q_shf(spec)))


def _sz_constant(parts: tuple[int, ...]) -> int:
    w1, w2 = parts
    c_w = factorial(w1) * factorial(w2)
    return 2 * c_w if w1 == w2 else c_w


def sz_max_columns(rows: int, m: int, parts: tuple[int, ...] | list[int]) -> tuple[int, int]:
    """Largest n each two-part bound guarantees for N = ``rows``.

    Returns:
        (sz, clll_asymptotic) where
        sz = floor((1 - 1/C_w) (1/q)^(N/(w-1))) is the Stinson-Zaverucha bound and
        clll_asymptotic = floor((C_w/w^2)^(1/(w-1)) (w-1)/w (1/q)^(N/(w-1)))
        is the cluster expansion bound with phi'(tau) at its n -> inf limit.
    """
    sizes = tuple(sorted(parts))
    if len(sizes) != 2:
        raise InvalidParameterError(f"Stinson-Zaverucha comparison needs two parts, got {list(parts)}")
    if rows < 1:
        raise InvalidParameterError(f"need N >= 1, got N={rows}")
    q = _checked_q(sizes, m)
    w = sum(sizes)
    c_w = _sz_constant(sizes)

    exponent = mpmath.mpf(rows) / (w - 1)
    # enough digits to floor (1/q)^(N/(w-1)) exactly
    digits = int(float(exponent) * math.log10(q.denominator / q.numerator)) + 30
    with mpmath.workdps(digits):
        growth = mpmath.power(mpmath.mpf(q.denominator) / q.numerator, exponent)
        sz = mpmath.floor((1 - mpmath.mpf(1) / c_w) * growth)
        clll = mpmath.floor(
            mpmath.power(mpmath.mpf(c_w) / w**2, mpmath.mpf(1) / (w - 1))
            * mpmath.mpf(w - 1)
            / w
            * growth
        )
        return int(sz), int(clll)


def shf_min_rows(spec: ShfSpec) -> BoundReport:
    """Cluster expansion bound N >= S_n(w) / ln(1/q), S_n(w) = A_n(w) + ln m_w.

    For two parts the expurgation bound and the Stinson-Zaverucha column
    maxima at N = n_clll are added to the report.
    """
    q = q_shf(spec)
    d = -log_fraction(q)
    point = stationary_point(spec)
    m_w = family_multiplicity(spec.parts)
    a = -point.log_max_ratio
    s_n = a + math.log(m_w)
    report = BoundReport(
        spec=spec,
        a_n=s_n,
        d_m=d,
        n_clll=min_rows(s_n, d),
        q=q,
        log_phi_prime=log_phi_prime(spec, a),
        m_w=m_w,
        attained=point.attained,
        expected_resamples=expected_resamples(spec, point),
    )
    if spec.s == 2:
        report.n_expurgation = min_rows(f_n_w(spec.n, spec.parts), d)
        report.sz_max_columns, report.clll_max_columns = sz_max_columns(
            report.n_clll, spec.m, spec.parts
        )
    logger.info(
        "SHF(n=%d, m=%d, parts=%s): N_clll=%d",
        spec.n,
        spec.m,
        spec.label,
        report.n_clll,
    )
    return report


def bound_report(spec: FamilySpec) -> BoundReport:
    """Dispatch to the PHF or SHF bound."""
    if isinstance(spec, PhfSpec):
        return phf_min_rows(spec)
    return shf_min_rows(spec)


# --- asymptotics -------------------------------------------------------------------------


def expurgation_constant(w: float) -> float:
    """w ln 2 - ln w: the n-independent part of E_n(w) beyond (w-1) ln n - ln (w-1)!."""
    return w * math.log(2.0) - math.log(w)


def clll_constant(w: float) -> float:
    """ln w + (w-1) ln(1 + 1/(w-1)): the same part of A_n(w) as n -> inf."""
    return math.log(w) + (w - 1) * math.log1p(1.0 / (w - 1))


def asymptotic_winner(w: int) -> Winner:
    """Which bound is smaller as n -> inf for fixed w."""
    if w < 2:
        raise InvalidParameterError(f"need w >= 2, got w={w}")
    if clll_constant(w) < expurgation_constant(w):
        return Winner.CLLL
    return Winner.EXPURGATION


def crossover_point() -> float:
    """Real w where the two asymptotic constants meet (about 6.91043)."""
    return brentq(lambda w: clll_constant(w) - expurgation_constant(w), 3.0, 20.0, xtol=1e-12)
