"""Command-line front end.

Subcommands mirror the library: ``bound``, ``mi``, ``sample-complexity``
and ``snr-cutoff`` evaluate the closed-form limits (one CSV row, or a
sweep CSV with ``--sweep var=start:step:stop``); ``exponent`` works on a
JSON-described discrete model; ``decode`` runs one decoder on CSV-supplied
data; ``simulate`` runs a config-driven Monte Carlo sweep.

Exit codes: 0 success, 2 bad configuration or parameters, 3 capacity
refusal (a computation too large to enumerate).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bounds, decoders, exponent, harness
from .model import (CapacityError, CoeffModel, ParameterError, ProblemConfig,
                    make_dataset, save_dataset)

_SWEEPABLE = ("n", "snr", "rho", "nu", "normalized_n")


def _add_scalar_flags(sub: argparse.ArgumentParser, need_n: bool) -> None:
    sub.add_argument("--n", type=int, default=None if need_n else 1,
                     required=need_n, help="number of samples N")
    sub.add_argument("--d", type=int, required=True, help="number of variables D")
    sub.add_argument("--k", type=int, required=True, help="sparsity K")
    sub.add_argument("--snr", type=float, required=True, help="linear SNR")
    sub.add_argument("--sigma2", type=float, default=1.0)
    sub.add_argument("--rho", type=float, default=0.0,
                     help="column correlation in [0,1]")
    sub.add_argument("--nu", type=float, default=0.0,
                     help="variable-noise variance scale")
    sub.add_argument("--coeff-model", choices=[m.value for m in CoeffModel],
                     default="fixed_signs")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--sweep", default=None, metavar="VAR=START:STEP:STOP",
                     help=f"sweep one of {_SWEEPABLE} instead of a single point")
    sub.add_argument("--out", default=None, help="write CSV here (default stdout)")


def _config_from_args(args) -> ProblemConfig:
    return ProblemConfig(n_samples=args.n, dimension=args.d, sparsity=args.k,
                         snr=args.snr, sigma2=args.sigma2, rho=args.rho,
                         nu=args.nu, coeff_model=CoeffModel(args.coeff_model),
                         seed=args.seed)


def _parse_sweep(text: str) -> tuple[str, np.ndarray]:
    try:
        var, grid = text.split("=", 1)
        start, step, stop = (float(v) for v in grid.split(":"))
    except ValueError:
        raise ParameterError(
            f"--sweep must look like var=start:step:stop, got {text!r}") from None
    if var not in _SWEEPABLE:
        raise ParameterError(f"--sweep variable must be one of {_SWEEPABLE}, "
                             f"got {var!r}")
    if step <= 0 or stop < start:
        raise ParameterError(f"--sweep needs step > 0 and stop >= start, got {text!r}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return var, start + step * np.arange(count)


def _apply_sweep(cfg: ProblemConfig, var: str, value: float) -> ProblemConfig:
    from dataclasses import replace
    if var == "n":
        return replace(cfg, n_samples=int(round(value)))
    if var == "normalized_n":
        return replace(cfg, n_samples=harness.normalized_to_n(
            value, cfg.sparsity, cfg.dimension))
    return replace(cfg, **{{"snr": "snr", "rho": "rho", "nu": "nu"}[var]: value})


def _emit(header: list, rows: list, out) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{v:.10g}" if isinstance(v, float) else str(v)
                              for v in row))
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            with open(out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write CSV to {out!r}: {exc}") from exc


def _sweep_or_single(args, columns, evaluate):
    """Evaluate one point, or a sweep when --sweep was given."""
    cfg = _config_from_args(args)
    if args.sweep is None:
        _emit(columns, [evaluate(cfg)], args.out)
        return
    var, values = _parse_sweep(args.sweep)
    rows = []
    for v in values:
        rows.append([float(v)] + evaluate(_apply_sweep(cfg, var, v)))
    _emit([var] + columns, rows, args.out)


def _cmd_bound(args) -> int:
    def evaluate(cfg):
        if args.alpha is not None:
            res = bounds.partial_recovery_bound(cfg, args.alpha)
        elif cfg.nu > 0:
            res = bounds.error_bound_noisy(cfg)
        else:
            res = bounds.error_bound_linear(cfg)
        return [res.value, int(res.clamped)]

    _sweep_or_single(args, ["value", "clamped"], evaluate)
    return 0


def _cmd_mi(args) -> int:
    _sweep_or_single(args, ["mi_bits"],
                     lambda cfg: [bounds.mutual_info_linear(args.i, cfg)])
    return 0


def _cmd_sample_complexity(args) -> int:
    def evaluate(cfg):
        if args.criterion == "necessary":
            res = bounds.necessary_samples(cfg)
        else:
            res = bounds.sufficient_samples(cfg, args.target_pe)
        return [int(res.feasible), res.n_required if res.feasible else -1,
                res.binding_i]

    _sweep_or_single(args, ["feasible", "n_required", "binding_i"], evaluate)
    return 0


def _cmd_snr_cutoff(args) -> int:
    _sweep_or_single(args, ["snr_cutoff"],
                     lambda cfg: [bounds.snr_cutoff(cfg)])
    return 0


def _load_discrete_model(path: str) -> exponent.DiscreteChannelModel:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read model JSON from {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise harness.ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise harness.ConfigError(f"{path}: expected a JSON object")
    if doc.get("channel") == "group_testing":
        extra = set(doc) - {"channel", "k", "p"}
        if extra:
            raise harness.ConfigError(f"{path}: unknown key(s) {sorted(extra)}")
        return exponent.group_testing_model(int(doc["k"]), float(doc["p"]))
    required = {"x_alphabet", "y_alphabet", "k", "y_given_xs"}
    missing = required - set(doc)
    if missing:
        raise harness.ConfigError(f"{path}: missing key(s) {sorted(missing)}")
    extra = set(doc) - required - {"x_pmf", "theta"}
    if extra:
        raise harness.ConfigError(f"{path}: unknown key(s) {sorted(extra)}")
    if "theta" in doc:
        theta = doc["theta"]
        values = tuple(theta["values"])
        probs = np.asarray(theta["probs"], dtype=float)
        x_pmfs = np.asarray(theta["x_pmfs"], dtype=float)
    elif "x_pmf" in doc:
        values, probs = (0,), np.array([1.0])
        x_pmfs = np.asarray([doc["x_pmf"]], dtype=float)
    else:
        raise harness.ConfigError(f"{path}: need either x_pmf or theta")
    return exponent.DiscreteChannelModel(
        x_alphabet=tuple(doc["x_alphabet"]), theta_values=values,
        theta_probs=probs, x_given_theta=x_pmfs,
        y_alphabet=tuple(doc["y_alphabet"]),
        y_given_xs=np.asarray(doc["y_given_xs"], dtype=float), k=int(doc["k"]))


def _cmd_exponent(args) -> int:
    model = _load_discrete_model(args.model)
    i = args.i if args.i is not None else model.k
    rows_done = False
    if args.bound_n is not None or args.bound_d is not None:
        if args.bound_n is None or args.bound_d is None:
            raise ParameterError("--bound-n and --bound-d go together")
        res = exponent.error_bound_general(model, args.bound_n, args.bound_d,
                                           weak=args.weak)
        _emit(["value", "clamped"], [[res.value, int(res.clamped)]], args.out)
        rows_done = True
    elif args.check_derivative is not None:
        lhs, rhs = exponent.derivative_check(model, i, args.check_derivative)
        _emit(["eo_slope_at_0", "mutual_info_bits"], [[lhs, rhs]], args.out)
        rows_done = True
    elif args.delta_sweep is not None:
        try:
            start, step, stop = (float(v) for v in args.delta_sweep.split(":"))
        except ValueError:
            raise ParameterError("--delta-sweep must look like start:step:stop") from None
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        deltas = start + step * np.arange(count)
        curve = exponent.exponent_curve(model, i, deltas)
        _emit(["delta", "eo_bits"],
              [[float(d), float(v)] for d, v in zip(curve.deltas, curve.values)],
              args.out)
        rows_done = True
    if not rows_done:
        delta = args.delta if args.delta is not None else 1.0
        _emit(["delta", "eo_bits"],
              [[delta, exponent.error_exponent(model, i, delta)]], args.out)
    return 0


def _load_matrix(path: str, ndmin: int) -> np.ndarray:
    try:
        return np.loadtxt(path, delimiter=",", ndmin=ndmin)
    except OSError as exc:
        raise OSError(f"cannot read CSV from {path!r}: {exc}") from exc


def _cmd_decode(args) -> int:
    x = _load_matrix(args.x, ndmin=2)
    y = _load_matrix(args.y, ndmin=1)
    lam = args.lasso_lambda
    if lam is None and args.decoder in ("lasso", "reweighted_lasso"):
        if args.snr is None:
            raise ParameterError(
                "--snr (or an explicit --lambda) is required for lasso decoders")
        lam = decoders.default_lasso_lambda(x.shape[1], args.snr, args.log_base)
    if args.decoder == "lasso":
        out = decoders.lasso(x, y, args.k, decoders.LassoSettings(lam=lam))
    elif args.decoder == "reweighted_lasso":
        eps = args.eps if args.eps is not None else 0.1 * np.sqrt(args.sigma2)
        out = decoders.reweighted_lasso(x, y, args.k,
                                        decoders.LassoSettings(lam=lam), eps=eps)
    elif args.decoder == "omp":
        out = decoders.omp(x, y, args.k)
    elif args.decoder == "ml_ls":
        out = decoders.ml_decode_ls(x, y, args.k)
    else:
        if args.snr is None:
            raise ParameterError("--snr is required for ml_marginal")
        cfg = ProblemConfig(n_samples=x.shape[0], dimension=x.shape[1],
                            sparsity=args.k, snr=args.snr, sigma2=args.sigma2,
                            coeff_model=CoeffModel(args.coeff_model))
        out = decoders._marginal_scan(x, y, cfg)
    support = ";".join(str(i) for i in out.support_estimate.indices)
    objective = out.objective if out.objective is not None else float("nan")
    _emit(["support", "iterations", "converged", "objective"],
          [[support, out.iterations, int(out.converged), float(objective)]],
          args.out)
    return 0


def _cmd_simulate(args) -> int:
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config from {args.config!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise harness.ConfigError(f"{args.config}: invalid JSON ({exc})") from exc
    spec = harness.validate_config(raw)
    if args.dump_dataset is not None:
        from dataclasses import replace
        seed = spec.base.seed if args.seed is None else args.seed
        first = harness._point_config(spec, spec.sweep_values[0])
        cfg = replace(first, seed=harness._trial_seed(seed, 0, 0))
        save_dataset(make_dataset(cfg), args.dump_dataset)
    curve = harness.run_sweep(spec, master_seed=args.seed, threads=args.threads)
    harness.emit_csv(curve, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-limits",
        description="Information-theoretic limits for sparse support "
                    "recovery, and Monte Carlo decoder benchmarks.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("bound", help="error-probability upper bound")
    _add_scalar_flags(p, need_n=True)
    p.add_argument("--alpha", type=float, default=None,
                   help="partial recovery: bound >= floor(alpha*K) errors")
    p.set_defaults(func=_cmd_bound)

    p = subs.add_parser("mi", help="per-sample mutual information (bits)")
    _add_scalar_flags(p, need_n=True)
    p.add_argument("--i", type=int, required=True,
                   help="number of unknown support columns")
    p.set_defaults(func=_cmd_mi)

    p = subs.add_parser("sample-complexity", help="necessary/sufficient N")
    _add_scalar_flags(p, need_n=False)
    p.add_argument("--criterion", choices=("necessary", "sufficient"),
                   default="necessary")
    p.add_argument("--target-pe", type=float, default=1e-3,
                   help="error target for the sufficient criterion")
    p.set_defaults(func=_cmd_sample_complexity)

    p = subs.add_parser("snr-cutoff", help="SNR below which recovery is impossible")
    _add_scalar_flags(p, need_n=False)
    p.set_defaults(func=_cmd_snr_cutoff)

    p = subs.add_parser("exponent", help="discrete-model error exponent tools")
    p.add_argument("--model", required=True, help="model description JSON")
    p.add_argument("--i", type=int, default=None,
                   help="number of mistaken variables (default K)")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--delta-sweep", default=None, metavar="START:STEP:STOP")
    p.add_argument("--check-derivative", type=float, default=None, metavar="H",
                   help="compare the exponent slope at 0 with the mutual information")
    p.add_argument("--bound-n", type=int, default=None)
    p.add_argument("--bound-d", type=int, default=None)
    p.add_argument("--weak", action="store_true",
                   help="drop the delta factor on the combinatorial term")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_exponent)

    p = subs.add_parser("decode", help="run one decoder on CSV data")
    p.add_argument("--x", required=True, help="design matrix CSV")
    p.add_argument("--y", required=True, help="observation vector CSV")
    p.add_argument("--decoder", required=True, choices=harness.DECODER_NAMES)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--snr", type=float, default=None)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--coeff-model", choices=[m.value for m in CoeffModel],
                   default="fixed_signs")
    p.add_argument("--lambda", dest="lasso_lambda", type=float, default=None)
    p.add_argument("--log-base", choices=("e", "2"), default="e")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_decode)

    p = subs.add_parser("simulate", help="config-driven Monte Carlo sweep")
    p.add_argument("--config", required=True, help="sweep spec JSON")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (default: the base config's)")
    p.add_argument("--dump-dataset", default=None, metavar="DIR",
                   help="also write the first trial's dataset for debugging")
    p.set_defaults(func=_cmd_simulate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, harness.ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity refusal: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
