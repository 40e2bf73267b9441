"""Closed-form recovery limits for the (correlated, possibly noisy-data)
sparse linear model.

Everything here is a pure function of a :class:`~sparselimits.model.ProblemConfig`.
The central quantity is the per-error-count exponent

    e_i = N * [ 1/2 log2(1 + (1-rho) 2 i sigma^2 SNR / N)
                - (i / 4N) log2 4
                - log2( C(D-K, i) C(K, i) ) / N ],

whose positivity for all i = 1..K drives the error-probability bound
``min(1, sum_i 2^(-e_i))`` to zero.  The noisy-data variant divides the
signal term by (1 + nu) and by the finite-N correction factor
xi = 1 + ((1-rho) nu / (1+nu)) K SNR sigma^2 / N.

All probability sums run in the log2 domain (the exponents can reach
thousands of bits) and probability bounds are clamped to 1 with the clamp
recorded on the result.

Convention: when a candidate set count C(D-K, i) * C(K, i) is zero (i.e.
i > D - K, possible only when K is close to D) the combinatorial penalty is
taken as 0 bits.  The resulting bound is still valid, just loose; the true
error probability of an impossible error event is 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .model import CoeffModel, ParameterError, ProblemConfig

__all__ = [
    "BoundResult",
    "SampleComplexityResult",
    "log2_binomial",
    "f_rho",
    "error_bound_linear",
    "error_bound_noisy",
    "mutual_info_linear",
    "necessary_samples",
    "sufficient_samples",
    "snr_cutoff",
    "partial_recovery_bound",
]

_LN2 = math.log(2.0)
_LOG2_4 = 2.0
_N_CAP = 10 ** 9          # search cap; "no N <= cap" encodes infeasible


@dataclass(frozen=True)
class BoundResult:
    """A probability bound: clamped value plus the per-i exponents N*f_i."""

    value: float
    exponent_terms: np.ndarray
    clamped: bool


@dataclass(frozen=True)
class SampleComplexityResult:
    """Outcome of a sample-complexity solve.

    ``n_required`` is the smallest integer satisfying the criterion, absent
    when no N up to the search cap does (``feasible`` False).  ``binding_i``
    is the error-count i in [1, K] that makes the criterion hardest.
    """

    feasible: bool
    n_required: Optional[int]
    binding_i: int
    criterion: str


def log2_binomial(n: int, k: int) -> float:
    """log2 of the binomial coefficient C(n, k).

    Exact summation for small k, log-gamma for the rest; relative accuracy
    well under 1e-10 for n up to 1e6.
    """
    if k < 0 or n < 0 or k > n:
        raise ParameterError(f"need 0 <= k <= n, got n={n}, k={k}")
    k = min(k, n - k)
    if k == 0:
        return 0.0
    if k <= 1024:
        j = np.arange(k, dtype=float)
        return float(np.sum(np.log2(n - j) - np.log2(j + 1.0)))
    return float((gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)) / _LN2)


def _search_penalty_bits(d: int, k: int, i: int) -> float:
    # log2 of the number of candidate sets differing from the truth in
    # exactly i variables; 0 bits when there are no such sets (i > d - k).
    if i > d - k:
        return 0.0
    return log2_binomial(d - k, i) + log2_binomial(k, i)


def _log2_binomial_prefix(n: int, m: int) -> np.ndarray:
    # log2 C(n, i) for i = 1..m in one cumulative pass
    j = np.arange(min(m, n), dtype=float)
    out = np.cumsum(np.log2(n - j) - np.log2(j + 1.0))
    return out if m <= n else np.concatenate([out, np.full(m - n, -np.inf)])


@lru_cache(maxsize=4096)
def _search_penalties(d: int, k: int) -> np.ndarray:
    """Vector of log2(C(D-K,i) * C(K,i)) for i = 1..K (0 where no sets)."""
    pen = np.zeros(k)
    m = min(k, d - k)
    if m > 0:
        pen[:m] = _log2_binomial_prefix(d - k, m) + _log2_binomial_prefix(k, k)[:m]
    pen.setflags(write=False)
    return pen


def _check_i(i: int, cfg: ProblemConfig) -> None:
    if not 1 <= i <= cfg.sparsity:
        raise ParameterError(f"i must be in [1, K={cfg.sparsity}], got {i}")


def _linear_exponents(cfg: ProblemConfig, i_start: int = 1,
                      n: Optional[int] = None) -> np.ndarray:
    """Exponents N*f(rho) for i = i_start..K, computed term by term."""
    n = cfg.n_samples if n is None else n
    i = np.arange(i_start, cfg.sparsity + 1, dtype=float)
    a = (1.0 - cfg.rho) * 2.0 * i * cfg.sigma2 * cfg.snr
    info = n * 0.5 * np.log1p(a / n) / _LN2
    coeff_penalty = (i / 4.0) * _LOG2_4
    search_penalty = _search_penalties(cfg.dimension, cfg.sparsity)[i_start - 1:]
    return info - coeff_penalty - search_penalty


def f_rho(i: int, cfg: ProblemConfig) -> float:
    """Per-sample exponent f(rho) for mistaking i of the K support indices.

    f(rho) = 1/2 log2(1 + (1-rho) 2 i sigma^2 SNR / N) - (i/4N) log2 4
             - log2(C(D-K,i) C(K,i)) / N.
    """
    _check_i(i, cfg)
    return float(_linear_exponents(cfg, i_start=i)[0]) / cfg.n_samples


def _bound_from_exponents(exponents: np.ndarray) -> BoundResult:
    # min(1, sum_i 2^(-e_i)) via a base-2 log-sum-exp; clamped iff the
    # unclamped sum exceeds 1.
    neg = -np.asarray(exponents, dtype=float)
    m = float(np.max(neg))
    if m == -math.inf:
        return BoundResult(value=0.0, exponent_terms=np.asarray(exponents, dtype=float),
                           clamped=False)
    total_log2 = m + math.log2(float(np.sum(np.exp2(neg - m))))
    clamped = total_log2 > 0.0
    value = 1.0 if total_log2 >= 0.0 else float(np.exp2(total_log2))
    return BoundResult(value=value, exponent_terms=np.asarray(exponents, dtype=float),
                       clamped=clamped)


def error_bound_linear(cfg: ProblemConfig) -> BoundResult:
    """Upper bound on P(exact-support error) for the clean linear model."""
    return _bound_from_exponents(_linear_exponents(cfg))


def _noisy_exponents(cfg: ProblemConfig, n: Optional[int] = None) -> np.ndarray:
    n = cfg.n_samples if n is None else n
    k = cfg.sparsity
    shrink = (1.0 - cfg.rho) / (1.0 + cfg.nu)
    xi = 1.0 + shrink * cfg.nu * k * cfg.snr * cfg.sigma2 / n
    i = np.arange(1, k + 1, dtype=float)
    a = shrink * 2.0 * i * cfg.sigma2 * cfg.snr / xi
    info = n * 0.5 * np.log1p(a / n) / _LN2
    coeff_penalty = (i / 4.0) * _LOG2_4
    search_penalty = _search_penalties(cfg.dimension, k)
    return info - coeff_penalty - search_penalty


def error_bound_noisy(cfg: ProblemConfig) -> BoundResult:
    """Upper bound on P(error) when the decoder sees Z = X + V, nu >= 0.

    Reduces exactly to :func:`error_bound_linear` at nu = 0.
    """
    if cfg.nu < 0:
        raise ParameterError(f"nu must be >= 0, got {cfg.nu}")
    return _bound_from_exponents(_noisy_exponents(cfg))


@lru_cache(maxsize=64)
def _leggauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _chi2_log_moment(i: int, c: float) -> float:
    """E[ln(1 + c*Q)] for Q ~ chi^2(i), to better than 1e-9 relative.

    Fixed composite Gauss-Legendre on the substituted axis q = u^2 (which
    removes the density's endpoint singularity): 24 linear panels cover the
    chi^2 bulk and 24 geometric panels resolve the kink of ln(1 + c u^2)
    near u = 1/sqrt(c).  Fixed panels and order keep results deterministic.
    """
    if c == 0.0:
        return 0.0
    u_max = math.sqrt(i + 40.0 * math.sqrt(2.0 * i) + 40.0)
    edges = set(np.linspace(0.0, u_max, 25))
    u_kink = 1.0 / math.sqrt(c)
    lo, hi = u_kink * 1e-4, min(u_kink * 1e4, u_max)
    if lo < u_max:
        edges.update(np.geomspace(lo, hi, 25))
    edges = np.array(sorted(edges))
    t, w = _leggauss(24)
    log_norm = (i / 2.0) * _LN2 + float(gammaln(i / 2.0))
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        u = 0.5 * (b - a) * t + 0.5 * (b + a)
        with np.errstate(divide="ignore"):
            logu = np.where(u > 0, np.log(np.maximum(u, 1e-300)), -1e308)
        f = 2.0 * np.exp((i - 1) * logu - u * u / 2.0 - log_norm) * np.log1p(c * u * u)
        total += 0.5 * (b - a) * float(w @ f)
    return total


def _mi_linear(i: int, rho: float, sigma2: float, snr: float,
               coeff_model: CoeffModel, n: int) -> float:
    c = (1.0 - rho) * sigma2 * snr / n
    if coeff_model is CoeffModel.FIXED_SIGNS:
        return 0.5 * math.log1p(c * i) / _LN2
    return float(0.5 * _chi2_log_moment(i, c) / _LN2)


def mutual_info_linear(i: int, cfg: ProblemConfig) -> float:
    """Per-sample information (bits) the observation carries about i unknown
    support columns given the other K-i.

    I = 1/2 E[ log2(1 + (1-rho) ||beta_i||^2 SNR / N) ], the expectation
    over the i on-support coefficients.  Closed form for fixed-sign
    coefficients; a fixed 64-node generalized Gauss-Laguerre rule on the
    chi^2(i) density for Gaussian ones.
    """
    _check_i(i, cfg)
    return _mi_linear(i, cfg.rho, cfg.sigma2, cfg.snr, cfg.coeff_model,
                      cfg.n_samples)


def _bisect_smallest(predicate, cap: int) -> Optional[int]:
    # Smallest integer N in [1, cap] with predicate(N) true, assuming the
    # predicate is monotone in N; None if even cap fails.
    if predicate(1):
        return 1
    if not predicate(cap):
        return None
    lo, hi = 1, cap
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return hi


def necessary_samples(cfg: ProblemConfig) -> SampleComplexityResult:
    """Smallest N with N * I_i(N) >= log2 C(D-K+i, i) for every i.

    Solved by integer bisection; N * I_i(N) is nondecreasing in N.  When
    even N = 1e9 fails (SNR below cutoff, or rho = 1) the result is
    infeasible.
    """
    d, k = cfg.dimension, cfg.sparsity
    targets = np.array([log2_binomial(d - k + i, i) for i in range(1, k + 1)])

    def margins(n: int) -> np.ndarray:
        info = np.array([_mi_linear(i, cfg.rho, cfg.sigma2, cfg.snr,
                                    cfg.coeff_model, n)
                         for i in range(1, k + 1)])
        return n * info - targets

    n_req = _bisect_smallest(lambda n: bool(np.min(margins(n)) >= 0.0), _N_CAP)
    at = n_req if n_req is not None else _N_CAP
    binding = int(np.argmin(margins(at))) + 1
    return SampleComplexityResult(feasible=n_req is not None, n_required=n_req,
                                  binding_i=binding, criterion="necessary")


def sufficient_samples(cfg: ProblemConfig, target_pe: float) -> SampleComplexityResult:
    """Smallest N whose linear error bound is at most ``target_pe``.

    The bound is nonincreasing in N (each exponent N*f_i is nondecreasing),
    so integer bisection applies.  target_pe = 1 is trivially met at N = 1
    because the bound is clamped.
    """
    if not 0.0 < target_pe <= 1.0:
        raise ParameterError(f"target_pe must be in (0, 1], got {target_pe}")

    def value_at(n: int) -> float:
        return _bound_from_exponents(_linear_exponents(cfg, n=n)).value

    n_req = _bisect_smallest(lambda n: value_at(n) <= target_pe, _N_CAP)
    at = n_req if n_req is not None else _N_CAP
    binding = int(np.argmin(_linear_exponents(cfg, n=at))) + 1
    return SampleComplexityResult(feasible=n_req is not None, n_required=n_req,
                                  binding_i=binding, criterion="sufficient")


def snr_cutoff(cfg: ProblemConfig) -> float:
    """SNR below which no number of samples makes the linear bound vanish.

    As N grows, N*f_i tends to (1-rho) 2 i sigma^2 SNR / (2 ln 2) minus the
    i- and set-uncertainty penalties; the cutoff is the smallest SNR making
    that limit positive for every i.  Returns inf at rho = 1 (recovery
    impossible at any SNR).
    """
    if cfg.rho >= 1.0:
        return math.inf
    d, k = cfg.dimension, cfg.sparsity
    worst = 0.0
    for i in range(1, k + 1):
        penalty = (i / 4.0) * _LOG2_4 + _search_penalty_bits(d, k, i)
        worst = max(worst, penalty * _LN2 / ((1.0 - cfg.rho) * i * cfg.sigma2))
    return worst


def partial_recovery_bound(cfg: ProblemConfig, alpha: float) -> BoundResult:
    """Bound on the probability of making at least floor(alpha*K) support
    errors: the linear-model sum restricted to i = floor(alpha*K)..K."""
    if not 0.0 < alpha <= 1.0:
        raise ParameterError(f"alpha must be in (0, 1], got {alpha}")
    i_start = max(1, math.floor(alpha * cfg.sparsity))
    return _bound_from_exponents(_linear_exponents(cfg, i_start=i_start))


def config_with_n(cfg: ProblemConfig, n: int) -> ProblemConfig:
    """Copy of ``cfg`` at a different sample count (sweep helper)."""
    return replace(cfg, n_samples=int(n))
