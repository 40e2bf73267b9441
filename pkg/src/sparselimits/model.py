"""Synthetic problem instances for the normalized sparse linear model.

A problem instance is a sensing matrix X (N x D, entries with variance 1/N,
optional pairwise column correlation rho induced by a shared per-row mean),
a K-sparse coefficient vector beta, observations y = X beta + w with noise
variance 1/SNR, and optionally a corrupted matrix Z = X + V with per-entry
noise variance nu/N.

Randomness
----------
Every draw comes from a counter-based Philox stream keyed by
``(seed, stream tag, index)``, so the matrix, signal, observation-noise and
corruption streams are independent and a given (config, seed) pair always
produces a bit-identical instance, no matter how calls are interleaved or
threaded.  Gaussians use numpy's ``Generator.standard_normal`` (ziggurat),
which is a fixed deterministic transform of the Philox bit stream.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

__all__ = [
    "CoeffModel",
    "ProblemConfig",
    "SupportSet",
    "Dataset",
    "ParameterError",
    "CapacityError",
    "stream_rng",
    "generate_sensing_matrix",
    "generate_signal",
    "generate_observations",
    "corrupt_matrix",
    "make_dataset",
    "save_dataset",
    "load_dataset",
]

_MASK64 = (1 << 64) - 1

# Stream tags: one per logical draw stream.
STREAM_MATRIX = 1
STREAM_SIGNAL = 2
STREAM_NOISE = 3
STREAM_CORRUPT = 4
STREAM_TRIAL = 5


class ParameterError(ValueError):
    """A scalar argument is outside its documented domain."""


class CapacityError(RuntimeError):
    """The requested exact computation is too large to run."""


class CoeffModel(Enum):
    """How the on-support coefficients are drawn."""

    FIXED_SIGNS = "fixed_signs"    # beta_k = +-sigma, signs uniform
    GAUSSIAN_IID = "gaussian_iid"  # beta_k ~ N(0, sigma^2)


def stream_rng(seed: int, tag: int, index: int = 0, index2: int = 0) -> np.random.Generator:
    """Philox generator for the substream (seed, tag, index, index2).

    Philox is counter-based; its 128-bit key is derived from the seed and
    the stream coordinates through a SeedSequence, so distinct coordinates
    give independent streams and the mapping is pure.
    """
    seq = np.random.SeedSequence(entropy=seed & _MASK64,
                                 spawn_key=(tag, index, index2))
    return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class ProblemConfig:
    """All scalar parameters of one recovery problem.

    ``snr`` is linear scale; the observation noise variance is 1/snr.
    ``nu`` scales the variable-noise variance (entries of V have variance
    nu/N).  ``rho`` is the pairwise correlation between design columns.
    """

    n_samples: int
    dimension: int
    sparsity: int
    snr: float
    sigma2: float = 1.0
    rho: float = 0.0
    nu: float = 0.0
    coeff_model: CoeffModel = CoeffModel.FIXED_SIGNS
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ParameterError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.dimension < 1:
            raise ParameterError(f"dimension must be >= 1, got {self.dimension}")
        if not 1 <= self.sparsity <= self.dimension:
            raise ParameterError(
                f"sparsity must be in [1, dimension], got {self.sparsity} "
                f"with dimension {self.dimension}")
        if not self.snr > 0:
            raise ParameterError(f"snr must be > 0, got {self.snr}")
        if not self.sigma2 > 0:
            raise ParameterError(f"sigma2 must be > 0, got {self.sigma2}")
        if not 0.0 <= self.rho <= 1.0:
            raise ParameterError(f"rho must be in [0, 1], got {self.rho}")
        if self.nu < 0:
            raise ParameterError(f"nu must be >= 0, got {self.nu}")
        if not 0 <= self.seed <= _MASK64:
            raise ParameterError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class SupportSet:
    """Strictly increasing tuple of column indices in [0, D)."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ParameterError(f"support indices must be strictly increasing: {idx}")
        if idx and idx[0] < 0:
            raise ParameterError(f"support indices must be nonnegative: {idx}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_iterable(cls, indices) -> "SupportSet":
        return cls(tuple(sorted(int(i) for i in set(indices))))

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def overlap(self, other: "SupportSet") -> int:
        return len(set(self.indices) & set(other.indices))


@dataclass(frozen=True)
class Dataset:
    """One realized problem instance.

    ``z`` is present only when the instance was generated with nu > 0; a
    decoder for the noisy-data model must use ``z`` and never ``x``.
    """

    x: np.ndarray
    y: np.ndarray
    support: SupportSet
    beta: np.ndarray
    z: Optional[np.ndarray] = None

    def __post_init__(self):
        n, d = self.x.shape
        if self.y.shape != (n,):
            raise ParameterError(f"y must have length {n}, got {self.y.shape}")
        if self.beta.shape != (d,):
            raise ParameterError(f"beta must have length {d}, got {self.beta.shape}")
        if self.z is not None and self.z.shape != (n, d):
            raise ParameterError(f"z must have shape {(n, d)}, got {self.z.shape}")
        if any(i >= d for i in self.support.indices):
            raise ParameterError("support index out of range")
        off = np.ones(d, dtype=bool)
        off[list(self.support.indices)] = False
        if np.any(self.beta[off] != 0.0):
            raise ParameterError("beta must be exactly zero off the support")
        self.x.setflags(write=False)
        self.y.setflags(write=False)
        self.beta.setflags(write=False)
        if self.z is not None:
            self.z.setflags(write=False)

    @property
    def design(self) -> np.ndarray:
        """The matrix a decoder is allowed to see (z when present, else x)."""
        return self.x if self.z is None else self.z


def generate_sensing_matrix(n: int, d: int, rho: float, rng_seed: int) -> np.ndarray:
    """Draw an N x D design with variance-1/N entries and column correlation rho.

    Rows are IID.  Within a row, entry k is mu + u_k with mu ~ N(0, rho/N)
    shared across the row and u_k ~ N(0, (1-rho)/N) independent, so the
    marginal entry variance is 1/N and the covariance of two columns is
    rho/N.  At rho = 1 every entry in a row equals that row's mu.
    """
    if not 0.0 <= rho <= 1.0:
        raise ParameterError(f"rho must be in [0, 1], got {rho}")
    if n < 1 or d < 1:
        raise ParameterError("matrix dimensions must be positive")
    rng = stream_rng(rng_seed, STREAM_MATRIX)
    # Fixed draw order: row means first, then the independent part.
    mu = rng.standard_normal(n) * np.sqrt(rho / n)
    u = rng.standard_normal((n, d)) * np.sqrt((1.0 - rho) / n)
    return mu[:, None] + u


def _sample_support(rng: np.random.Generator, d: int, k: int) -> np.ndarray:
    # Fisher-Yates partial shuffle: exactly uniform over K-subsets of [0, D).
    idx = np.arange(d)
    for j in range(k):
        swap = j + int(rng.integers(0, d - j))
        idx[j], idx[swap] = idx[swap], idx[j]
    return np.sort(idx[:k])


def generate_signal(d: int, k: int, sigma2: float, coeff_model: CoeffModel,
                    rng_seed: int) -> tuple[SupportSet, np.ndarray]:
    """Draw a uniformly random K-subset support and its coefficients.

    FIXED_SIGNS gives beta_k = +-sigma with equal probability; GAUSSIAN_IID
    gives beta_k ~ N(0, sigma^2).  Off-support entries are exactly zero.
    """
    if not 1 <= k <= d:
        raise ParameterError(f"need 1 <= k <= d, got k={k}, d={d}")
    if not sigma2 > 0:
        raise ParameterError(f"sigma2 must be > 0, got {sigma2}")
    rng = stream_rng(rng_seed, STREAM_SIGNAL)
    support = _sample_support(rng, d, k)
    sigma = np.sqrt(sigma2)
    if coeff_model is CoeffModel.FIXED_SIGNS:
        coeffs = sigma * (2.0 * rng.integers(0, 2, size=k) - 1.0)
    elif coeff_model is CoeffModel.GAUSSIAN_IID:
        coeffs = sigma * rng.standard_normal(k)
    else:
        raise ParameterError(f"unknown coefficient model: {coeff_model!r}")
    beta = np.zeros(d)
    beta[support] = coeffs
    return SupportSet(tuple(int(i) for i in support)), beta


def generate_observations(x: np.ndarray, beta: np.ndarray, snr: float,
                          rng_seed: int) -> np.ndarray:
    """y = x beta + w with w IID N(0, 1/snr)."""
    if not snr > 0:
        raise ParameterError(f"snr must be > 0, got {snr}")
    if x.ndim != 2 or beta.shape != (x.shape[1],):
        raise ParameterError(
            f"dimension mismatch: x is {x.shape}, beta is {beta.shape}")
    rng = stream_rng(rng_seed, STREAM_NOISE)
    w = rng.standard_normal(x.shape[0]) * np.sqrt(1.0 / snr)
    return x @ beta + w


def corrupt_matrix(x: np.ndarray, nu: float, rng_seed: int) -> np.ndarray:
    """z = x + v with v entries IID N(0, nu/N); nu = 0 returns x unchanged."""
    if nu < 0:
        raise ParameterError(f"nu must be >= 0, got {nu}")
    if nu == 0.0:
        return x.copy()
    n = x.shape[0]
    rng = stream_rng(rng_seed, STREAM_CORRUPT)
    return x + rng.standard_normal(x.shape) * np.sqrt(nu / n)


def make_dataset(cfg: ProblemConfig) -> Dataset:
    """Realize one instance of ``cfg`` (pure function of the config)."""
    x = generate_sensing_matrix(cfg.n_samples, cfg.dimension, cfg.rho, cfg.seed)
    support, beta = generate_signal(cfg.dimension, cfg.sparsity, cfg.sigma2,
                                    cfg.coeff_model, cfg.seed)
    y = generate_observations(x, beta, cfg.snr, cfg.seed)
    z = corrupt_matrix(x, cfg.nu, cfg.seed) if cfg.nu > 0 else None
    return Dataset(x=x, y=y, support=support, beta=beta, z=z)


def save_dataset(ds: Dataset, directory: str) -> None:
    """Dump a dataset as CSV matrices plus a JSON header (debug format).

    Values are written with 17 significant digits so float64 round-trips
    exactly.
    """
    os.makedirs(directory, exist_ok=True)
    np.savetxt(os.path.join(directory, "x.csv"), ds.x, fmt="%.17g", delimiter=",")
    np.savetxt(os.path.join(directory, "y.csv"), ds.y, fmt="%.17g", delimiter=",")
    np.savetxt(os.path.join(directory, "beta.csv"), ds.beta, fmt="%.17g", delimiter=",")
    if ds.z is not None:
        np.savetxt(os.path.join(directory, "z.csv"), ds.z, fmt="%.17g", delimiter=",")
    header = {
        "n_samples": int(ds.x.shape[0]),
        "dimension": int(ds.x.shape[1]),
        "sparsity": len(ds.support),
        "support": list(ds.support.indices),
        "has_z": ds.z is not None,
    }
    with open(os.path.join(directory, "header.json"), "w") as fh:
        json.dump(header, fh, indent=2)
        fh.write("\n")


def load_dataset(directory: str) -> Dataset:
    """Inverse of :func:`save_dataset`."""
    with open(os.path.join(directory, "header.json")) as fh:
        header = json.load(fh)
    x = np.loadtxt(os.path.join(directory, "x.csv"), delimiter=",", ndmin=2)
    y = np.loadtxt(os.path.join(directory, "y.csv"), delimiter=",")
    beta = np.loadtxt(os.path.join(directory, "beta.csv"), delimiter=",")
    z = None
    if header["has_z"]:
        z = np.loadtxt(os.path.join(directory, "z.csv"), delimiter=",", ndmin=2)
    return Dataset(x=x, y=np.atleast_1d(y), support=SupportSet(tuple(header["support"])),
                   beta=np.atleast_1d(beta), z=z)
