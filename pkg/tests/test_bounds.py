"""Tests for the PHF/SHF row bounds and the comparison bounds."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from src.hashbounds.bounds import (
    asymptotic_winner,
    bound_report,
    chromatic_multipartite,
    crossover_point,
    d_m_w,
    delta_n,
    e_n_w,
    expurgation_phf_bound,
    expurgation_shf_bound,
    f_n_w,
    l_n_w,
    lll_phf_bound,
    min_rows,
    phf_min_rows,
    q_shf,
    shf_min_rows,
    sz_max_columns,
)
from src.hashbounds.cluster_expansion import a_n_w
from src.hashbounds.combinatorics import falling_factorial
from src.hashbounds.errors import (
    AlphabetTooSmallError,
    DegenerateProbabilityError,
    InvalidParameterError,
)
from src.hashbounds.models import PhfSpec, ShfSpec, Winner

A_4_2 = math.log(2.5 + math.sqrt(2.0)) + math.log(2.0)

# (n, m, w): (cluster expansion bound, expurgation bound)
LARGE_W_TABLE = [
    ((15, 7, 7), 1437, 1926),
    ((50, 7, 7), 3034, 3191),
    ((200, 7, 7), 4529, 4572),
    ((1000, 7, 7), 6139, 6152),
    ((50, 8, 8), 8463, 9159),
    ((200, 8, 8), 12965, 13282),
    ((1000, 8, 8), 17774, 17988),
    ((1000, 12, 8), 900, 911),
    ((1000, 50, 8), 53, 54),
    ((1000, 50, 15), 739, 781),
    ((1000, 50, 18), 2840, 3037),
]

SMALL_W_TABLE = [
    ((10, 4, 4), 57, 62),
    ((15, 4, 4), 76, 77),
    ((50, 4, 4), 121, 114),
    ((10, 5, 5), 144, 187),
    ((15, 5, 5), 211, 234),
    ((50, 5, 5), 369, 364),
    ((15, 6, 6), 558, 681),
    ((50, 6, 6), 1072, 1092),
    ((90, 6, 6), 1284, 1287),
    ((200, 6, 6), 1557, 1546),
]


def _make_phf(n: int, m: int, w: int) -> PhfSpec:
    return PhfSpec(n=n, m=m, w=w)


def _make_shf(n: int, m: int, *parts: int) -> ShfSpec:
    return ShfSpec(n=n, m=m, parts=parts)


class TestMinRows:
    """Tests for the ceiling convention."""

    def test_ceiling(self) -> None:
        assert min_rows(2.057762, 1.386294) == 2
        assert min_rows(6.18, 0.0984401) == 63

    def test_exact_integer_ratio_kept(self) -> None:
        assert min_rows(3.0, 1.5) == 2
        assert min_rows(6.0 * (1 + 1e-15), 3.0) == 2

    def test_at_least_one(self) -> None:
        assert min_rows(0.0, 1.0) == 1


class TestDmw:
    """Tests for D_m(w) = -ln(1 - (m)_w / m^w)."""

    def test_values(self) -> None:
        assert d_m_w(4, 2) == pytest.approx(math.log(4), abs=1e-12)
        assert d_m_w(4, 4) == pytest.approx(math.log(256 / 232), abs=1e-12)
        assert d_m_w(4, 4) == pytest.approx(0.0984401, abs=1e-7)

    def test_alphabet_too_small(self) -> None:
        with pytest.raises(AlphabetTooSmallError, match="alphabet too small"):
            d_m_w(2, 3)

    def test_failure_near_one_no_cancellation(self) -> None:
        """For m = w = 20 the failure probability is 1 - 20!/20^20; the tiny log must survive."""
        expected = -math.log1p(-math.factorial(20) / 20**20)
        assert d_m_w(20, 20) == pytest.approx(expected, rel=1e-9)


class TestPhfMinRows:
    """Tests for the cluster expansion PHF bound and its report."""

    def test_small_case(self) -> None:
        report = phf_min_rows(_make_phf(4, 4, 2))
        assert report.n_clll == 2
        assert report.a_n == pytest.approx(A_4_2, abs=1e-9)
        assert report.d_m == pytest.approx(math.log(4))
        assert report.n_lll == 2
        assert report.q == Fraction(1, 4)
        assert report.attained is True

    @pytest.mark.parametrize(("params", "clll", "expurgation"), LARGE_W_TABLE)
    def test_large_w_table(self, params: tuple[int, int, int], clll: int, expurgation: int) -> None:
        report = phf_min_rows(_make_phf(*params))
        assert abs(report.n_clll - clll) <= 1
        assert abs(report.n_expurgation - expurgation) <= 1

    @pytest.mark.parametrize(
        ("params", "clll"),
        [((15, 7, 7), 1437), ((1000, 50, 8), 53), ((1000, 50, 15), 739), ((1000, 50, 18), 2840)],
    )
    def test_large_w_exact(self, params: tuple[int, int, int], clll: int) -> None:
        """Rows checked against an inclusion-exclusion count of Gamma_k and a direct maximisation."""
        assert phf_min_rows(_make_phf(*params)).n_clll == clll

    @pytest.mark.parametrize(("params", "clll", "expurgation"), SMALL_W_TABLE)
    def test_small_w_table(self, params: tuple[int, int, int], clll: int, expurgation: int) -> None:
        spec = _make_phf(*params)
        assert abs(phf_min_rows(spec).n_clll - clll) <= 1
        assert abs(expurgation_phf_bound(spec) - expurgation) <= 1

    def test_win_pattern(self) -> None:
        """Cluster expansion wins at small n, expurgation at (50,4,4), (50,5,5), (200,6,6)."""
        expurgation_wins = {(50, 4, 4), (50, 5, 5), (200, 6, 6)}
        for params, _, _ in SMALL_W_TABLE:
            n, m, w = params
            clll_wins = a_n_w(_make_phf(n, m, w)) < e_n_w(n, w)
            assert clll_wins is (params not in expurgation_wins), params

    def test_report_consistency(self) -> None:
        for params, _, _ in SMALL_W_TABLE:
            report = phf_min_rows(_make_phf(*params))
            assert report.n_clll == min_rows(report.a_n, report.d_m)

    def test_alphabet_too_small(self) -> None:
        with pytest.raises(AlphabetTooSmallError):
            phf_min_rows(_make_phf(5, 2, 3))

    def test_supremum_case_flagged(self) -> None:
        """n < 2w uses the supremum; the report says so and has no resample bound."""
        report = phf_min_rows(_make_phf(5, 5, 3))
        assert report.attained is False
        assert report.expected_resamples is None
        assert report.a_n == pytest.approx(math.log(10))

    def test_monotone_in_n_and_m(self) -> None:
        for w in (3, 4):
            for m in range(w, 13):
                values = [phf_min_rows(_make_phf(n, m, w)).n_clll for n in range(2 * w, 61)]
                assert values == sorted(values), (m, w)
            for n in (2 * w, 30, 60):
                values = [phf_min_rows(_make_phf(n, m, w)).n_clll for m in range(w, 13)]
                assert values == sorted(values, reverse=True), (n, w)

    def test_expected_resamples_below_event_count(self) -> None:
        report = phf_min_rows(_make_phf(10, 4, 4))
        assert 0 < report.expected_resamples <= 210


class TestLllBound:
    """Tests for the plain local lemma comparison."""

    def test_small_case(self) -> None:
        assert l_n_w(4, 2) == pytest.approx(1 + math.log(5))
        assert lll_phf_bound(_make_phf(4, 4, 2)) == 2

    def test_dominance(self) -> None:
        """The cluster expansion bound is never worse than the plain local lemma."""
        count = 0
        for w in (2, 3, 4, 5):
            for n in (2 * w, 2 * w + 3, 25, 40, 60):
                for m in (w, w + 2, 10):
                    spec = _make_phf(n, m, w)
                    assert phf_min_rows(spec).n_clll <= lll_phf_bound(spec), (n, m, w)
                    count += 1
        assert count >= 60

    def test_ratio_below_one_and_rising(self) -> None:
        """A_n(w) / L_n(w) stays below 1 and climbs towards 1; both grow like (w-1) ln n."""
        w = 5
        ratios = [a_n_w(_make_phf(n, w, w)) / l_n_w(n, w) for n in (10**3, 10**5, 10**7)]
        assert all(r < 1 for r in ratios)
        assert ratios == sorted(ratios)
        assert ratios[-1] > 0.99


class TestExpurgation:
    """Tests for the expurgation numerators E_n and F_n."""

    def test_e_n_w(self) -> None:
        assert e_n_w(10, 4) == pytest.approx(math.log(4845) - math.log(10))

    def test_f_n_w_two_singletons(self) -> None:
        """F = ln 20 + ln 19 - ln 10 = ln 38."""
        assert f_n_w(10, (1, 1)) == pytest.approx(math.log(38))
        assert expurgation_shf_bound(_make_shf(10, 4, 1, 1)) == 3

    def test_f_and_e_differ_by_w_factorial_for_singletons(self) -> None:
        """ln C(2n,1) + ln C(2n-1,1) = ln C(2n,2) + ln 2!."""
        assert f_n_w(10, (1, 1)) == pytest.approx(e_n_w(10, 2) + math.log(2))

    def test_three_parts_rejected(self) -> None:
        with pytest.raises(InvalidParameterError):
            expurgation_shf_bound(_make_shf(10, 4, 1, 1, 1))

    def test_f_minus_s_is_delta(self) -> None:
        """F_n(w) - S_n(w) = Delta_n(w) for two parts of different sizes."""
        n, parts = 40, (1, 2)
        report = shf_min_rows(_make_shf(n, 5, *parts))
        delta = delta_n(_make_phf(n, 3, 3))
        assert f_n_w(n, parts) - report.a_n == pytest.approx(delta, abs=1e-8)


class TestDelta:
    """Tests for Delta_n(w) = E_n(w) - A_n(w)."""

    @pytest.mark.parametrize(("n", "w"), [(8, 4), (50, 4), (90, 6), (200, 6), (500, 9)])
    def test_closed_form_matches_difference(self, n: int, w: int) -> None:
        spec = _make_phf(n, w, w)
        assert delta_n(spec) == pytest.approx(e_n_w(n, w) - a_n_w(spec), abs=1e-8)

    def test_sign_at_large_n(self) -> None:
        """Delta > 0 means the cluster expansion bound is smaller: true for w = 7, false for w = 6."""
        assert delta_n(_make_phf(10**6, 7, 7)) > 0
        assert delta_n(_make_phf(10**6, 6, 6)) < 0

    def test_sign_flip_for_w6(self) -> None:
        assert delta_n(_make_phf(90, 6, 6)) > 0
        assert delta_n(_make_phf(200, 6, 6)) < 0

    def test_needs_n_at_least_2w(self) -> None:
        with pytest.raises(InvalidParameterError):
            delta_n(_make_phf(7, 4, 4))


class TestChromaticAndQ:
    """Tests for proper colourings of complete multipartite graphs and q."""

    def test_values(self) -> None:
        assert chromatic_multipartite((1, 1), 3) == 6
        assert chromatic_multipartite((2, 1), 3) == 12
        assert chromatic_multipartite((2, 2), 2) == 2
        for m in range(0, 8):
            assert chromatic_multipartite((1, 1, 1), m) == falling_factorial(m, 3)

    def test_q_values(self) -> None:
        assert q_shf(_make_shf(4, 4, 1, 1)) == Fraction(1, 4)
        assert q_shf(_make_shf(3, 3, 2, 1)) == Fraction(5, 9)

    def test_q_one_rejected(self) -> None:
        """K_3 cannot be properly 2-coloured."""
        with pytest.raises(DegenerateProbabilityError):
            q_shf(_make_shf(3, 2, 1, 1, 1))


class TestShfMinRows:
    """Tests for the cluster expansion SHF bound."""

    def test_two_singletons(self) -> None:
        report = shf_min_rows(_make_shf(4, 4, 1, 1))
        assert report.n_clll == 2
        assert report.a_n == pytest.approx(A_4_2, abs=1e-9)
        assert report.m_w == 1

    def test_singletons_match_phf(self) -> None:
        for w in (2, 3, 4):
            for n in range(2 * w, 31, 3):
                for m in range(w, 11, 2):
                    phf = phf_min_rows(_make_phf(n, m, w))
                    shf = shf_min_rows(_make_shf(n, m, *([1] * w)))
                    assert shf.n_clll == phf.n_clll, (n, m, w)

    def test_multiplicity_added(self) -> None:
        report = shf_min_rows(_make_shf(50, 7, 3, 4))
        assert report.m_w == 35
        assert report.q == 1 - Fraction(141582, 7**7)
        assert report.n_clll == 118
        assert report.a_n == pytest.approx(a_n_w(_make_phf(50, 7, 7)) + math.log(35))
        assert report.n_clll == min_rows(report.a_n, report.d_m)
        assert report.n_expurgation is not None
        assert report.sz_max_columns is not None

    def test_three_parts_have_no_comparison(self) -> None:
        report = shf_min_rows(_make_shf(12, 5, 1, 1, 2))
        assert report.n_expurgation is None
        assert report.sz_max_columns is None

    def test_bound_report_dispatch(self) -> None:
        assert bound_report(_make_phf(4, 4, 2)).n_clll == 2
        assert bound_report(_make_shf(4, 4, 1, 1)).n_clll == 2


class TestStinsonZaverucha:
    """Tests for the maximum column counts at a fixed N."""

    def test_two_singletons(self) -> None:
        """q=1/4, C_w=2: (1/2) 4^N and (2/4)(1/2) 4^N."""
        assert sz_max_columns(2, 4, (1, 1)) == (8, 4)
        assert sz_max_columns(4, 4, (1, 1)) == (128, 64)

    def test_clll_wins_above_six(self) -> None:
        sz, clll = sz_max_columns(200, 7, (3, 4))
        assert clll > sz

    def test_sz_wins_below_seven(self) -> None:
        sz, clll = sz_max_columns(200, 4, (1, 2))
        assert clll < sz

    def test_needs_two_parts(self) -> None:
        with pytest.raises(InvalidParameterError):
            sz_max_columns(10, 4, (1, 1, 1))


class TestAsymptotics:
    """Tests for the large-n comparison of cluster expansion and expurgation."""

    def test_winner(self) -> None:
        for w in range(2, 7):
            assert asymptotic_winner(w) is Winner.EXPURGATION
        for w in range(7, 21):
            assert asymptotic_winner(w) is Winner.CLLL

    def test_crossover(self) -> None:
        assert crossover_point() == pytest.approx(6.91043, abs=1e-5)
