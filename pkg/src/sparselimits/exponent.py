"""Exact error exponents and mutual information for finite-alphabet
conditionally-IID observation models.

A model is a finite mixture over a latent parameter theta of IID variable
distributions P(X_k | theta), together with a permutation-symmetric channel
P(Y | X_S) that reads only the K salient variables.  For such models the
single-observation error exponent

    E_o(delta) = -log2 E_theta[ sum_Y sum_{X_2} P(X_2|theta) *
                 ( sum_{X_1} P(X_1|theta) P(Y|X_1,X_2)^(1/(1+delta)) )^(1+delta) ]

(with X_S split into i unknown columns X_1 and K-i known ones X_2) is
computed by exact enumeration in the log domain, as is the conditional
mutual information I(X_1; Y | X_2, theta).  The slope of E_o at delta = 0
equals that mutual information, which is used as a numerical cross-check.

Enumeration cost is |X|^K * |Y| * |Theta| and is guarded at 1e8 terms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.special import logsumexp

from .bounds import BoundResult, _bound_from_exponents, _search_penalty_bits
from .model import CapacityError, ParameterError

__all__ = [
    "CapacityError",
    "DiscreteChannelModel",
    "ExponentCurve",
    "error_exponent",
    "mutual_information",
    "derivative_check",
    "error_bound_general",
    "exponent_curve",
    "group_testing_model",
]

_LN2 = math.log(2.0)
_PMF_TOL = 1e-12
_MAX_TERMS = 10 ** 8


def _as_pmf(values, what: str) -> np.ndarray:
    p = np.asarray(values, dtype=float)
    if np.any(p < 0):
        raise ParameterError(f"{what} has negative entries")
    if abs(float(p.sum()) - 1.0) > _PMF_TOL:
        raise ParameterError(f"{what} must sum to 1 (got {p.sum()!r})")
    return p


@dataclass(frozen=True)
class DiscreteChannelModel:
    """Finite-alphabet conditionally-IID observation model.

    ``x_given_theta`` has one pmf row per theta value; ``y_given_xs`` is an
    array of shape (|X|,)*K + (|Y|,) giving P(Y=y | X_S = tuple), required
    to be symmetric under permutations of the K variable axes (checked at
    construction: symmetry under adjacent transpositions generates all of
    them).
    """

    x_alphabet: tuple
    theta_values: tuple
    theta_probs: np.ndarray
    x_given_theta: np.ndarray
    y_alphabet: tuple
    y_given_xs: np.ndarray
    k: int

    def __post_init__(self):
        nx, ny, nt = len(self.x_alphabet), len(self.y_alphabet), len(self.theta_values)
        if self.k < 1:
            raise ParameterError(f"k must be >= 1, got {self.k}")
        object.__setattr__(self, "theta_probs",
                           _as_pmf(self.theta_probs, "theta distribution"))
        if self.theta_probs.shape != (nt,):
            raise ParameterError("theta_probs must match theta_values")
        xt = np.asarray(self.x_given_theta, dtype=float)
        if xt.shape != (nt, nx):
            raise ParameterError(
                f"x_given_theta must have shape {(nt, nx)}, got {xt.shape}")
        for t in range(nt):
            _as_pmf(xt[t], f"P(X|theta={self.theta_values[t]!r})")
        object.__setattr__(self, "x_given_theta", xt)
        ygx = np.asarray(self.y_given_xs, dtype=float)
        if ygx.shape != (nx,) * self.k + (ny,):
            raise ParameterError(
                f"y_given_xs must have shape {(nx,) * self.k + (ny,)}, got {ygx.shape}")
        sums = ygx.sum(axis=-1)
        if np.max(np.abs(sums - 1.0)) > _PMF_TOL:
            raise ParameterError("every P(Y | X_S = x) must sum to 1")
        for axis in range(self.k - 1):
            swapped = np.swapaxes(ygx, axis, axis + 1)
            if not np.array_equal(swapped, ygx):
                raise ParameterError(
                    "y_given_xs must be symmetric under permutations of the "
                    f"variable axes (axes {axis} and {axis + 1} differ)")
        object.__setattr__(self, "y_given_xs", ygx)

    @property
    def n_terms(self) -> int:
        return len(self.x_alphabet) ** self.k * len(self.y_alphabet) * len(self.theta_values)

    def _guard(self):
        if self.n_terms > _MAX_TERMS:
            raise CapacityError(
                f"enumeration needs {self.n_terms} terms (limit {_MAX_TERMS})")


def group_testing_model(k: int, p: float) -> DiscreteChannelModel:
    """Noiseless group testing: X_k ~ Bernoulli(p) IID, Y = OR of the K
    salient inclusion indicators."""
    if not 0.0 < p < 1.0:
        raise ParameterError(f"inclusion probability must be in (0,1), got {p}")
    shape = (2,) * k + (2,)
    ygx = np.zeros(shape)
    for xs in itertools.product((0, 1), repeat=k):
        ygx[xs + (int(any(xs)),)] = 1.0
    return DiscreteChannelModel(
        x_alphabet=(0, 1), theta_values=(0,), theta_probs=np.array([1.0]),
        x_given_theta=np.array([[1.0 - p, p]]), y_alphabet=(0, 1),
        y_given_xs=ygx, k=k)


def _log_tuple_pmf(log_px: np.ndarray, size: int) -> np.ndarray:
    # log-probabilities of all |X|^size tuples, flattened in C order.
    if size == 0:
        return np.zeros(1)
    return reduce(np.add.outer, [log_px] * size).ravel()


def _tuple_pmf(px: np.ndarray, size: int) -> np.ndarray:
    if size == 0:
        return np.ones(1)
    return reduce(np.multiply.outer, [px] * size).ravel()


def _split_channel(model: DiscreteChannelModel, i: int) -> np.ndarray:
    # (|X|^i, |X|^(K-i), |Y|) view of log P(Y | X_1, X_2); by permutation
    # symmetry the unknown partition can be taken as the first i axes.
    nx, ny = len(model.x_alphabet), len(model.y_alphabet)
    with np.errstate(divide="ignore"):
        logp = np.log(model.y_given_xs)
    return logp.reshape(nx ** i, nx ** (model.k - i), ny)


def error_exponent(model: DiscreteChannelModel, i: int, delta: float) -> float:
    """E_o(delta) in bits for mistaking i of the K salient variables."""
    if not 1 <= i <= model.k:
        raise ParameterError(f"i must be in [1, K={model.k}], got {i}")
    if not 0.0 <= delta <= 1.0:
        raise ParameterError(f"delta must be in [0, 1], got {delta}")
    model._guard()
    log_channel = _split_channel(model, i)
    per_theta = np.empty(len(model.theta_values))
    with np.errstate(divide="ignore"):
        log_xt = np.log(model.x_given_theta)
    for t in range(len(model.theta_values)):
        log_p1 = _log_tuple_pmf(log_xt[t], i)
        log_p2 = _log_tuple_pmf(log_xt[t], model.k - i)
        inner = logsumexp(log_p1[:, None, None] + log_channel / (1.0 + delta), axis=0)
        per_theta[t] = logsumexp(log_p2[:, None] + (1.0 + delta) * inner)
    with np.errstate(divide="ignore"):
        log_expectation = logsumexp(np.log(model.theta_probs) + per_theta)
    return -float(log_expectation) / _LN2


def mutual_information(model: DiscreteChannelModel, i: int) -> float:
    """Exact I(X_1; Y | X_2, theta) in bits, partition sizes (i, K-i)."""
    if not 1 <= i <= model.k:
        raise ParameterError(f"i must be in [1, K={model.k}], got {i}")
    model._guard()
    nx = len(model.x_alphabet)
    channel = model.y_given_xs.reshape(nx ** i, nx ** (model.k - i), -1)
    total = 0.0
    for t in range(len(model.theta_values)):
        p1 = _tuple_pmf(model.x_given_theta[t], i)
        p2 = _tuple_pmf(model.x_given_theta[t], model.k - i)
        marginal = np.einsum("a,aby->by", p1, channel)  # P(y | x_2, theta)
        joint = p1[:, None, None] * p2[None, :, None] * channel
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(joint > 0, channel / marginal[None, :, :], 1.0)
            contrib = np.where(joint > 0, joint * np.log2(ratio), 0.0)
        total += float(model.theta_probs[t]) * float(contrib.sum())
    return total


def derivative_check(model: DiscreteChannelModel, i: int, h: float) -> tuple[float, float]:
    """Slope of E_o at delta = 0 versus the mutual information.

    The slope uses a second-order one-sided difference (the domain is
    [0, 1]); both numbers are returned for comparison.
    """
    if not 0.0 < h <= 1e-2:
        raise ParameterError(f"h must be in (0, 1e-2], got {h}")
    e0 = error_exponent(model, i, 0.0)
    e1 = error_exponent(model, i, h)
    e2 = error_exponent(model, i, 2.0 * h)
    lhs = (-3.0 * e0 + 4.0 * e1 - e2) / (2.0 * h)
    return lhs, mutual_information(model, i)


def exponent_curve(model: DiscreteChannelModel, i: int, deltas) -> "ExponentCurve":
    """E_o evaluated on a grid of delta values."""
    deltas = np.asarray(deltas, dtype=float)
    values = np.array([error_exponent(model, i, d) for d in deltas])
    return ExponentCurve(deltas=deltas, values=values, i_errors=i)


@dataclass(frozen=True)
class ExponentCurve:
    deltas: np.ndarray
    values: np.ndarray
    i_errors: int


def _golden_max(fn, lo: float, hi: float, tol: float = 1e-6) -> float:
    # Golden-section search for the maximum of a unimodal fn on [lo, hi].
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fn(d)
    return max(fc, fd)


def error_bound_general(model: DiscreteChannelModel, n: int, d: int,
                        weak: bool = False) -> BoundResult:
    """P(error) bound for the general model with N observations, D variables.

    For each error count i the exponent N*E_o(delta) - delta*log2(#sets) is
    maximized over delta in [0, 1] (101-point grid plus golden-section
    refinement); the per-i optima are summed and clamped.  ``weak`` drops
    the delta factor on the combinatorial term, giving the looser variant
    of the bound.
    """
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    if d < model.k:
        raise ParameterError(f"need D >= K, got D={d}, K={model.k}")
    grid = np.linspace(0.0, 1.0, 101)
    exponents = np.empty(model.k)
    for i in range(1, model.k + 1):
        penalty = _search_penalty_bits(d, model.k, i)
        eo = np.array([error_exponent(model, i, dl) for dl in grid])
        objective = n * eo - (grid if not weak else 1.0) * penalty
        j = int(np.argmax(objective))
        lo = grid[max(0, j - 1)]
        hi = grid[min(len(grid) - 1, j + 1)]

        def fn(dl, _i=i, _pen=penalty):
            factor = dl if not weak else 1.0
            return n * error_exponent(model, _i, dl) - factor * _pen

        exponents[i - 1] = max(float(np.max(objective)), _golden_max(fn, lo, hi))
    return _bound_from_exponents(exponents)
