"""Config-driven Monte Carlo sweep runner.

A sweep varies one quantity (normalized sample count, SNR, column
correlation, or variable-noise variance), runs the requested decoders over
seeded independent trials at each point, and pairs the empirical success
frequencies with the matching information-theoretic bound curve.

Per-trial seeds derive from (master seed, sweep index, trial index) through
a counter-based stream, so results are identical no matter how trials are
scheduled; aggregation is keyed, never order-dependent.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import bounds as _bounds
from . import decoders as _dec
from .model import (CapacityError, CoeffModel, ParameterError, ProblemConfig,
                    STREAM_TRIAL, make_dataset, stream_rng)

__all__ = [
    "ConfigError",
    "SweepSpec",
    "SweepCurve",
    "validate_config",
    "run_sweep",
    "emit_csv",
    "read_csv",
]

SWEEP_VARS = ("normalized_n", "snr", "rho", "nu")
DECODER_NAMES = ("ml_marginal", "ml_ls", "lasso", "reweighted_lasso", "omp")


class ConfigError(ValueError):
    """A config document violates the schema; the message names the key."""


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: a base problem, the swept variable, decoders, and trial
    count.  ``partial_alpha`` switches success from exact recovery to
    recovering at least (1-alpha)K true indices."""

    base: ProblemConfig
    sweep_var: str
    sweep_values: tuple
    decoders: tuple
    trials: int = 40
    emit_bounds: bool = True
    partial_alpha: Optional[float] = None
    lasso_lambda: Optional[float] = None     # None -> 2 sqrt(2 log D)/sqrt(SNR)
    lasso_log_base: str = "e"
    lasso_tol: float = 1e-8
    lasso_max_iter: int = 10_000
    reweight_eps: Optional[float] = None     # None -> 0.1 * sigma
    reweight_lambda: Optional[float] = None  # None -> the lasso penalty
    reweight_outer_max: int = 20
    reweight_outer_tol: float = 1e-6


@dataclass(frozen=True)
class SweepCurve:
    """Per-decoder success frequencies (with binomial standard errors) and
    the bound-implied success probability at each sweep point."""

    sweep_var: str
    sweep_values: tuple
    decoder_names: tuple
    success: dict
    stderr: dict
    trials: int
    bound_success: Optional[np.ndarray]


def normalized_to_n(value: float, k: int, d: int) -> int:
    """N_n -> N = round(N_n * K * log2(D/K)), round half up, floored at 1."""
    scale = k * math.log2(d / k)
    return max(1, int(math.floor(value * scale + 0.5)))


def _expect(doc: dict, path: str, allowed: set) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {sorted(unknown)}")


def _get(doc: dict, key: str, path: str, kind, default=_expect):
    # ``default`` sentinel _expect means "required".
    if key not in doc:
        if default is _expect:
            raise ConfigError(f"{path}.{key}: required")
        return default
    value = doc[key]
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if kind is bool and isinstance(value, bool):
        return value
    if kind is str and isinstance(value, str):
        return value
    raise ConfigError(f"{path}.{key}: expected {kind.__name__}, got {value!r}")


def _parse_base(doc, path="base") -> ProblemConfig:
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected an object")
    _expect(doc, path, {"n_samples", "dimension", "sparsity", "snr", "sigma2",
                        "rho", "nu", "coeff_model", "seed"})
    name = _get(doc, "coeff_model", path, str, default="fixed_signs")
    try:
        coeff_model = CoeffModel(name)
    except ValueError:
        raise ConfigError(
            f"{path}.coeff_model: must be one of "
            f"{[m.value for m in CoeffModel]}, got {name!r}") from None
    try:
        return ProblemConfig(
            n_samples=_get(doc, "n_samples", path, int, default=1),
            dimension=_get(doc, "dimension", path, int),
            sparsity=_get(doc, "sparsity", path, int),
            snr=_get(doc, "snr", path, float),
            sigma2=_get(doc, "sigma2", path, float, default=1.0),
            rho=_get(doc, "rho", path, float, default=0.0),
            nu=_get(doc, "nu", path, float, default=0.0),
            coeff_model=coeff_model,
            seed=_get(doc, "seed", path, int, default=0),
        )
    except ParameterError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def validate_config(raw: dict) -> SweepSpec:
    """Parse and validate a sweep config document (parsed JSON).

    Applies the documented defaults (penalty rule, tolerances, 40 trials)
    and rejects unknown keys; error messages carry the offending key path.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object")
    _expect(raw, "config", {"base", "sweep_var", "sweep_values", "decoders",
                            "trials", "emit_bounds", "success_metric",
                            "lasso", "reweighted"})
    if "base" not in raw:
        raise ConfigError("config.base: required")
    base = _parse_base(raw["base"])

    sweep_var = _get(raw, "sweep_var", "config", str)
    if sweep_var not in SWEEP_VARS:
        raise ConfigError(f"config.sweep_var: must be one of {SWEEP_VARS}, "
                          f"got {sweep_var!r}")
    values = raw.get("sweep_values")
    if not isinstance(values, list) or not values or \
            not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        raise ConfigError("config.sweep_values: expected a nonempty number list")
    values = tuple(float(v) for v in values)
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError("config.sweep_values: must be strictly ascending")
    if sweep_var == "normalized_n":
        if base.dimension == base.sparsity:
            raise ConfigError("config.sweep_var: normalized_n needs D > K")
        for j, v in enumerate(values):
            scale = base.sparsity * math.log2(base.dimension / base.sparsity)
            if int(math.floor(v * scale + 0.5)) < 1:
                raise ConfigError(
                    f"config.sweep_values[{j}]: normalized N {v} rounds to "
                    f"a sample count below 1")
    elif sweep_var == "snr" and values[0] <= 0:
        raise ConfigError("config.sweep_values: SNR values must be positive")
    elif sweep_var == "rho" and (values[0] < 0 or values[-1] > 1):
        raise ConfigError("config.sweep_values: rho values must lie in [0, 1]")
    elif sweep_var == "nu" and values[0] < 0:
        raise ConfigError("config.sweep_values: nu values must be nonnegative")

    decoders_doc = raw.get("decoders", [])
    if not isinstance(decoders_doc, list):
        raise ConfigError("config.decoders: expected a list")
    for j, name in enumerate(decoders_doc):
        if name not in DECODER_NAMES:
            raise ConfigError(f"config.decoders[{j}]: unknown decoder {name!r}; "
                              f"choose from {DECODER_NAMES}")
    if len(set(decoders_doc)) != len(decoders_doc):
        raise ConfigError("config.decoders: duplicate entries")

    trials = _get(raw, "trials", "config", int, default=40)
    if trials < 1:
        raise ConfigError("config.trials: must be >= 1")

    metric = raw.get("success_metric", "exact")
    partial_alpha = None
    if metric != "exact":
        if not (isinstance(metric, dict) and set(metric) == {"partial_alpha"}):
            raise ConfigError('config.success_metric: expected "exact" or '
                              '{"partial_alpha": x}')
        partial_alpha = metric["partial_alpha"]
        if not isinstance(partial_alpha, (int, float)) or not 0 < partial_alpha <= 1:
            raise ConfigError("config.success_metric.partial_alpha: must be in (0, 1]")

    lasso_doc = raw.get("lasso", {})
    if not isinstance(lasso_doc, dict):
        raise ConfigError("config.lasso: expected an object")
    _expect(lasso_doc, "config.lasso", {"lambda", "log_base", "tol", "max_iter"})
    log_base = _get(lasso_doc, "log_base", "config.lasso", str, default="e")
    if log_base not in ("e", "2"):
        raise ConfigError('config.lasso.log_base: must be "e" or "2"')
    rw_doc = raw.get("reweighted", {})
    if not isinstance(rw_doc, dict):
        raise ConfigError("config.reweighted: expected an object")
    _expect(rw_doc, "config.reweighted", {"eps", "lambda", "outer_max", "outer_tol"})

    return SweepSpec(
        base=base, sweep_var=sweep_var, sweep_values=values,
        decoders=tuple(decoders_doc), trials=trials,
        emit_bounds=_get(raw, "emit_bounds", "config", bool, default=True),
        partial_alpha=float(partial_alpha) if partial_alpha is not None else None,
        lasso_lambda=_get(lasso_doc, "lambda", "config.lasso", float, default=None),
        lasso_log_base=log_base,
        lasso_tol=_get(lasso_doc, "tol", "config.lasso", float, default=1e-8),
        lasso_max_iter=_get(lasso_doc, "max_iter", "config.lasso", int, default=10_000),
        reweight_eps=_get(rw_doc, "eps", "config.reweighted", float, default=None),
        reweight_lambda=_get(rw_doc, "lambda", "config.reweighted", float, default=None),
        reweight_outer_max=_get(rw_doc, "outer_max", "config.reweighted", int, default=20),
        reweight_outer_tol=_get(rw_doc, "outer_tol", "config.reweighted", float,
                                default=1e-6),
    )


def _point_config(spec: SweepSpec, value: float) -> ProblemConfig:
    base = spec.base
    if spec.sweep_var == "normalized_n":
        return replace(base, n_samples=normalized_to_n(value, base.sparsity,
                                                       base.dimension))
    if spec.sweep_var == "snr":
        return replace(base, snr=value)
    if spec.sweep_var == "rho":
        return replace(base, rho=value)
    return replace(base, nu=value)


def _check_decoder_capacity(spec: SweepSpec) -> None:
    d, k = spec.base.dimension, spec.base.sparsity
    wants_ml = any(name.startswith("ml_") for name in spec.decoders)
    if wants_ml and math.comb(d, k) > _dec._MAX_SUBSETS:
        raise CapacityError(
            f"ML decoders refused: C({d},{k}) = {math.comb(d, k)} supports "
            f"exceed the {_dec._MAX_SUBSETS} limit")
    if "ml_marginal" in spec.decoders and \
            spec.base.coeff_model is CoeffModel.FIXED_SIGNS and \
            2 ** k > _dec._MAX_SIGN_PATTERNS:
        raise CapacityError(
            f"ml_marginal refused: 2^K = {2 ** k} sign patterns exceed the "
            f"{_dec._MAX_SIGN_PATTERNS} limit")


def _trial_seed(master_seed: int, sweep_idx: int, trial_idx: int) -> int:
    rng = stream_rng(master_seed, STREAM_TRIAL, sweep_idx, trial_idx)
    return int(rng.integers(0, 1 << 63))


def _run_decoders(spec: SweepSpec, cfg: ProblemConfig) -> dict:
    ds = make_dataset(cfg)
    design = ds.design
    lam = spec.lasso_lambda
    if lam is None:
        lam = _dec.default_lasso_lambda(cfg.dimension, cfg.snr,
                                        spec.lasso_log_base)
    settings = _dec.LassoSettings(lam=lam, tol=spec.lasso_tol,
                                  max_iter=spec.lasso_max_iter)
    eps = spec.reweight_eps
    if eps is None:
        eps = 0.1 * math.sqrt(cfg.sigma2)
    estimates = {}
    for name in spec.decoders:
        if name == "ml_marginal":
            out = _dec.ml_decode_marginal(ds, cfg)
        elif name == "ml_ls":
            out = _dec.ml_decode_ls(design, ds.y, cfg.sparsity)
        elif name == "lasso":
            out = _dec.lasso(design, ds.y, cfg.sparsity, settings)
        elif name == "reweighted_lasso":
            out = _dec.reweighted_lasso(design, ds.y, cfg.sparsity, settings,
                                        eps=eps,
                                        outer_max=spec.reweight_outer_max,
                                        outer_tol=spec.reweight_outer_tol,
                                        lam_r=spec.reweight_lambda)
        else:
            out = _dec.omp(design, ds.y, cfg.sparsity)
        if spec.partial_alpha is None:
            ok = out.support_estimate.indices == ds.support.indices
        else:
            need = (1.0 - spec.partial_alpha) * cfg.sparsity - 1e-12
            ok = out.support_estimate.overlap(ds.support) >= need
        estimates[name] = bool(ok)
    return estimates


def run_sweep(spec: SweepSpec, master_seed: Optional[int] = None,
              threads: int = 1) -> SweepCurve:
    """Run the sweep and aggregate per-decoder success frequencies.

    ``master_seed`` defaults to the base config's seed.  Trials are
    independent jobs; with ``threads`` > 1 they run on a thread pool, and
    because every trial's seed is a pure function of (master seed, sweep
    index, trial index) the result is identical for any thread count.
    """
    _check_decoder_capacity(spec)
    master = spec.base.seed if master_seed is None else master_seed
    points = [_point_config(spec, v) for v in spec.sweep_values]
    jobs = [(si, ti) for si in range(len(points)) for ti in range(spec.trials)]

    def one(job):
        si, ti = job
        cfg = replace(points[si], seed=_trial_seed(master, si, ti))
        return job, _run_decoders(spec, cfg)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = dict(pool.map(one, jobs))
    else:
        results = dict(map(one, jobs))

    n_pts = len(points)
    success = {name: np.zeros(n_pts) for name in spec.decoders}
    for (si, ti) in jobs:
        outcome = results[(si, ti)]
        for name in spec.decoders:
            success[name][si] += outcome[name]
    stderr = {}
    for name in spec.decoders:
        p = success[name] / spec.trials
        success[name] = p
        stderr[name] = np.sqrt(p * (1.0 - p) / spec.trials)

    bound_success = None
    if spec.emit_bounds:
        bound_success = np.empty(n_pts)
        for si, cfg in enumerate(points):
            if cfg.nu > 0:
                res = _bounds.error_bound_noisy(cfg)
            elif spec.partial_alpha is not None:
                res = _bounds.partial_recovery_bound(cfg, spec.partial_alpha)
            else:
                res = _bounds.error_bound_linear(cfg)
            bound_success[si] = 1.0 - res.value

    return SweepCurve(sweep_var=spec.sweep_var, sweep_values=spec.sweep_values,
                      decoder_names=spec.decoders, success=success,
                      stderr=stderr, trials=spec.trials,
                      bound_success=bound_success)


def emit_csv(curve: SweepCurve, path: str) -> None:
    """Write the sweep as CSV: the swept variable, then
    <decoder>_success/<decoder>_stderr pairs, then bound_success when
    present.  Ten significant digits, rows in sweep order."""
    header = [curve.sweep_var]
    for name in curve.decoder_names:
        header += [f"{name}_success", f"{name}_stderr"]
    if curve.bound_success is not None:
        header.append("bound_success")
    lines = [",".join(header)]
    for si, value in enumerate(curve.sweep_values):
        row = [f"{value:.10g}"]
        for name in curve.decoder_names:
            row += [f"{curve.success[name][si]:.10g}",
                    f"{curve.stderr[name][si]:.10g}"]
        if curve.bound_success is not None:
            row.append(f"{curve.bound_success[si]:.10g}")
        lines.append(",".join(row))
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write sweep CSV to {path!r}: {exc}") from exc


def read_csv(path: str) -> dict:
    """Read an emit_csv file back as {column name: float array}."""
    try:
        with open(path) as fh:
            rows = [line.strip().split(",") for line in fh if line.strip()]
    except OSError as exc:
        raise OSError(f"cannot read sweep CSV from {path!r}: {exc}") from exc
    header, data = rows[0], rows[1:]
    columns = np.array([[float(cell) for cell in row] for row in data])
    return {name: columns[:, j] for j, name in enumerate(header)}
