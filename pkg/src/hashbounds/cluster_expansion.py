"""Independent-set counts of the w-subset dependency graph and the cluster polynomial.

Two events E_W, E_W' are adjacent iff W and W' intersect. For a fixed W the
closed neighbourhood polynomial is Psi(mu) = 1 + sum_k Gamma_k mu^k, where
Gamma_k counts families of k pairwise-disjoint w-subsets of [n] that all meet
W (W itself allowed). The local lemma condition needs max_mu mu / Psi(mu).

With alpha = c * mu and c = (n-w)^(w-1) / (w-1)!, Psi(mu) equals
phi(alpha) = 1 + sum_k C(w,k) Gamma~_k alpha^k, so the same maximum can be
read either way; this module works in mu and exposes Gamma~_k separately.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from config.hashbounds import BISECTION_MAX_ITER, BISECTION_TOLERANCE
from src.hashbounds.combinatorics import (
    binomial,
    falling_factorial,
    log_count,
    surjective_series,
)
from src.hashbounds.errors import (
    DegenerateClusterError,
    ExactDivisionError,
    InvalidParameterError,
)
from src.hashbounds.models import ClusterPolynomial, FamilySpec, StationaryPoint

logger = logging.getLogger(__name__)


def cluster_degree(n: int, w: int) -> int:
    """K = min(floor(n/w), w): no more than floor(n/w) disjoint w-sets fit, and at most w can meet W."""
    return min(n // w, w)


def _check_k(spec: FamilySpec, k: int) -> int:
    degree = cluster_degree(spec.n, spec.w)
    if not 1 <= k <= degree:
        raise InvalidParameterError(
            f"k must lie in [1, {degree}] for n={spec.n}, w={spec.w}, got k={k}"
        )
    return degree


def _gamma(w: int, n: int, k: int) -> int:
    # i0 = points of W left uncovered; the k members cover the other w - i0
    # points of W and draw their remaining (k-1)w + i0 points from outside W.
    series = surjective_series(w, k, w)
    w_fact = math.factorial(w)
    total = 0
    for i0 in range(w - k + 1):
        inside = series[w - i0]
        if inside == 0:
            continue
        outside = falling_factorial(n - w, (k - 1) * w + i0)
        total += (w_fact // math.factorial(i0)) * outside * inside
    count, remainder = divmod(total, math.factorial(k) * w_fact**k)
    if remainder:
        raise ExactDivisionError(
            f"Gamma_{k}(w={w}, n={n}) is not integral (remainder {remainder})"
        )
    return count


def gamma_k(spec: FamilySpec, k: int) -> int:
    """Number of independent k-sets inside the closed neighbourhood of a fixed w-subset.

    Args:
        spec: Any spec exposing ``n`` and ``w``.
        k: Family size, 1 <= k <= min(n // w, w).

    Returns:
        The exact positive count Gamma_k(w, n).
    """
    _check_k(spec, k)
    return _gamma(spec.w, spec.n, k)


def gamma_tilde(spec: FamilySpec, k: int) -> float:
    """Normalised count Gamma~_k(w, n) evaluated directly as a double sum.

    The inner sum over compositions i_1 + ... + i_k = j is j! [z^j] g(z)^k with
    g(z) = sum_i z^i / ((i+1) i!) * prod_{s=1}^{i} (1 - s/w).
    """
    _check_k(spec, k)
    w, n = spec.w, spec.n
    if n == w:
        raise InvalidParameterError("Gamma~_k needs n > w (it is normalised by (n-w)^(w-1))")
    top = w - k
    gap = n - w

    g = np.zeros(top + 1)
    running = 1.0
    for i in range(top + 1):
        if i >= 1:
            running *= 1.0 - i / w
        g[i] = running / ((i + 1) * math.factorial(i))
    power = g.copy()
    for _ in range(k - 1):
        power = np.convolve(power, g)[: top + 1]

    terms = []
    for j in range(top + 1):
        # empty product (upper limit <= 0) is 1
        shrink = math.prod(1.0 - ell / gap for ell in range(1, k * (w - 1) - j))
        terms.append(
            binomial(top, j)
            * shrink
            * (w / gap) ** j
            * math.factorial(j)
            * float(power[j])
        )
    return math.fsum(terms)


@lru_cache(maxsize=256)
def _cluster_polynomial(w: int, n: int) -> ClusterPolynomial:
    degree = cluster_degree(n, w)
    gammas = tuple(_gamma(w, n, k) for k in range(1, degree + 1))
    logger.debug("Cluster polynomial w=%d n=%d has degree %d", w, n, degree)
    return ClusterPolynomial(
        w=w,
        n=n,
        gammas=gammas,
        log_gammas=tuple(log_count(g) for g in gammas),
    )


def build_cluster_polynomial(spec: FamilySpec) -> ClusterPolynomial:
    """Exact Psi(mu) = 1 + sum_{k=1}^{K} Gamma_k mu^k for the (w, n) of ``spec``."""
    return _cluster_polynomial(spec.w, spec.n)


def log_psi(poly: ClusterPolynomial, t: float) -> float:
    """ln Psi(e^t), evaluated with log-sum-exp."""
    ks = np.arange(1, poly.degree + 1)
    return float(logsumexp(np.concatenate(([0.0], np.asarray(poly.log_gammas) + ks * t))))


def _stationary_residual(log_weights: np.ndarray, ks: np.ndarray, t: float) -> float:
    # ln sum_{k>=2} (k-1) Gamma_k e^{kt}; zero exactly where Psi = mu Psi'
    return float(logsumexp(log_weights + ks * t))


def solve_stationary_point(poly: ClusterPolynomial) -> StationaryPoint:
    """Root of Psi(mu) - mu Psi'(mu) = 1 - sum_{k>=2} (k-1) Gamma_k mu^k.

    Bisection on t = ln mu; the residual is strictly increasing in t, so the
    positive root is unique.

    Returns:
        StationaryPoint with mu_star and ln(mu_star / Psi(mu_star)).

    Raises:
        DegenerateClusterError: when the polynomial has degree 1.
    """
    if poly.degree < 2:
        raise DegenerateClusterError(
            f"cluster polynomial for w={poly.w}, n={poly.n} has degree 1; "
            "mu / Psi(mu) has no maximum"
        )
    ks = np.arange(2, poly.degree + 1)
    log_weights = np.log(ks - 1.0) + np.asarray(poly.log_gammas[1:])

    # k = 2 term alone reaches 1 here, so the residual is >= 0
    hi = -poly.log_gammas[1] / 2.0
    step = 1.0
    lo = hi - step
    while _stationary_residual(log_weights, ks, lo) >= 0.0:
        step *= 2.0
        lo = hi - step
    logger.debug("Stationary point bracket for w=%d n=%d: [%g, %g]", poly.w, poly.n, lo, hi)

    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= BISECTION_TOLERANCE:
            break
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _stationary_residual(log_weights, ks, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    t_star = 0.5 * (lo + hi)
    return StationaryPoint(
        mu_star=math.exp(t_star),
        log_max_ratio=t_star - log_psi(poly, t_star),
    )


def stationary_point(spec: FamilySpec) -> StationaryPoint:
    """Maximiser of mu / Psi(mu), falling back to the supremum when K = 1.

    For n < 2w, Psi(mu) = 1 + Gamma_1 mu and mu / Psi(mu) increases towards
    1 / Gamma_1 without reaching it; the supremum still satisfies the local
    lemma inequality, so it is returned with ``attained=False``.
    """
    poly = build_cluster_polynomial(spec)
    if poly.degree >= 2:
        return solve_stationary_point(poly)
    logger.warning(
        "n=%d < 2w=%d: using the supremum 1/Gamma_1 (not attained)", spec.n, 2 * spec.w
    )
    return StationaryPoint(mu_star=math.inf, log_max_ratio=-poly.log_gammas[0], attained=False)


def a_n_w(spec: FamilySpec) -> float:
    """A_n(w) = ln phi'(tau) + (w-1) ln(n-w) - ln (w-1)! = -ln max_mu mu / Psi(mu)."""
    return -stationary_point(spec).log_max_ratio


def log_alpha_scale(w: int, n: int) -> float:
    """ln c with c = (n-w)^(w-1) / (w-1)!, the factor mapping mu to alpha."""
    if n <= w:
        raise InvalidParameterError(f"alpha scale needs n > w, got n={n}, w={w}")
    return (w - 1) * math.log(n - w) - math.lgamma(w)


def log_phi_prime_at_tau(spec: FamilySpec) -> float:
    """ln phi'_{w,n}(tau), recovered from A_n(w) by removing the alpha scale."""
    return a_n_w(spec) - log_alpha_scale(spec.w, spec.n)


def phi_prime_limit(w: int) -> float:
    """lim_{n -> inf} phi'_{w,n}(tau) = w (1 + 1/(w-1))^(w-1)."""
    if w < 2:
        raise InvalidParameterError(f"need w >= 2, got w={w}")
    return w * (1.0 + 1.0 / (w - 1)) ** (w - 1)
