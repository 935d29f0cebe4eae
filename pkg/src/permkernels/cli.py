"""Command-line interface.

Every command prints its effective configuration as ``config.<name>=<value>``
lines followed by ``key=value`` results; matrices are written as CSV.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

import numpy as np

from . import datapipe, krr, mmdtest
from .distribution import DistributionOnSd
from .kernels import KernelSpec, gram
from .perm import MAX_DEGREE, enumerate_sn
from .symfourier import spectrum_report

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _kernel_from_args(text: str, nu: float | None, p: int | None) -> KernelSpec:
    try:
        kind, _, params = text.partition(":")
        items = dict(item.split("=", 1) if "=" in item else (item, "") for item in params.split(",") if item)
        if nu is not None:
            items["nu"] = repr(nu)
        if p is not None:
            items["p"] = str(p)
        merged = kind + (":" + ",".join(f"{k}={v}" for k, v in items.items()) if items else "")
        return KernelSpec.parse(merged)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_kernel(sp: argparse.ArgumentParser, multiple: bool = False) -> None:
    help_ = "kernel spec, e.g. kendall, mallows:nu=1, poly:p=3, nupoly:p=4,nu=0.5"
    if multiple:
        sp.add_argument("--kernel", action="append", required=True, help=help_ + " (repeatable for a CV grid)")
    else:
        sp.add_argument("--kernel", required=True, help=help_)
    sp.add_argument("--nu", type=float, default=None, help="bandwidth (overrides the --kernel string)")
    sp.add_argument("--p", type=int, default=None, help="polynomial degree (overrides the --kernel string)")


def _add_test_opts(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--n-perms", type=int, default=200)
    sp.add_argument("--level", type=float, default=0.05)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permkernels", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=1, help="cap on internal parallelism; results do not depend on it")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gram", help="Gram matrix of a rankings file or all of S_d")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="rankings CSV (columns r1..rd)")
    src.add_argument("--enumerate", type=int, metavar="D", help="use all of S_D in canonical order")
    _add_kernel(sp)
    sp.add_argument("--output", help="CSV path for the matrix (default: stdout, summary to stderr)")
    sp.add_argument("--skip-invalid", action="store_true", help="skip rows that are not permutations")

    sp = sub.add_parser("test", help="two-sample MMD permutation test")
    sp.add_argument("--a", required=True, help="rankings CSV for the first sample")
    sp.add_argument("--b", required=True, help="rankings CSV for the second sample")
    _add_kernel(sp)
    _add_test_opts(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--skip-invalid", action="store_true")

    sp = sub.add_parser("spectrum", help="Fourier spectrum of a kernel on S_d")
    sp.add_argument("--d", type=int, required=True)
    _add_kernel(sp)
    sp.add_argument("--format", choices=("kv", "text"), default="kv")

    sp = sub.add_parser("power", help="power simulation against a shifted distribution")
    sp.add_argument("--d", type=int, default=5)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--null-space", action="store_true", help="shift inside null(A_tau) (requires delta=0)")
    sp.add_argument("--n", type=int, required=True, help="sample size per group")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--max-draws", type=int, default=1, help="directions tried before giving up on delta")
    _add_kernel(sp)
    _add_test_opts(sp)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("regress", help="kernel ridge regression or ridge classification")
    sp.add_argument("--train", required=True)
    sp.add_argument("--test", required=True)
    sp.add_argument("--label", required=True, help="numeric label column")
    _add_kernel(sp, multiple=True)
    lam = sp.add_mutually_exclusive_group(required=True)
    lam.add_argument("--lambda", dest="lam", type=float)
    lam.add_argument("--lambda-grid", help="comma-separated lambdas for cross-validation")
    sp.add_argument("--folds", type=int, default=5)
    sp.add_argument("--metric", choices=("mse", "mae"), default="mse")
    sp.add_argument("--task", choices=("regression", "classification"), default="regression")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--model-out", help="write the fitted model here")
    sp.add_argument("--skip-invalid", action="store_true")

    sp = sub.add_parser("convert", help="ratings CSV to rankings CSV, ties broken at random")
    sp.add_argument("--input", required=True, help="ratings CSV (columns c1..cd)")
    sp.add_argument("--output", help="rankings CSV (default: stdout)")
    sp.add_argument("--seed", type=int, default=0)
    return parser


def _echo_config(args: argparse.Namespace, out) -> None:
    for key, value in sorted(vars(args).items()):
        if isinstance(value, list):
            value = ";".join(map(str, value))
        print(f"config.{key}={value}", file=out)


def _load(path: str, skip_invalid: bool) -> datapipe.RankingDataset:
    ds = datapipe.load_rankings_csv(path, strict=not skip_invalid)
    for rej in ds.rejected:
        print(f"warning: {path}: row {rej.row} skipped: {rej.reason}", file=sys.stderr)
    if len(ds) == 0:
        raise datapipe.DataError(f"{path}: no valid rankings")
    return ds


def _check_range(name: str, value, ok: bool) -> None:
    if not ok:
        raise UsageError(f"invalid --{name}: {value}")


def cmd_gram(args, out) -> int:
    spec = _kernel_from_args(args.kernel, args.nu, args.p)
    if args.enumerate is not None:
        _check_range("enumerate", args.enumerate, 1 <= args.enumerate <= MAX_DEGREE)
        perms = enumerate_sn(args.enumerate)
    else:
        perms = list(_load(args.input, args.skip_invalid).perms)
    G = gram(spec, perms, threads=args.threads)
    summary = sys.stderr if args.output is None else out
    _echo_config(args, summary)
    print(f"kernel={spec}", file=summary)
    print(f"n={G.n}", file=summary)
    print(f"rank={G.rank()}", file=summary)
    print(f"min_eigenvalue={G.min_eigenvalue():.17g}", file=summary)
    print(f"psd={str(G.is_psd()).lower()}", file=summary)
    G.to_csv(out if args.output is None else args.output)
    return EXIT_OK


def cmd_test(args, out) -> int:
    spec = _kernel_from_args(args.kernel, args.nu, args.p)
    _check_range("n-perms", args.n_perms, args.n_perms >= 1)
    _check_range("level", args.level, 0 < args.level < 1)
    a = _load(args.a, args.skip_invalid)
    b = _load(args.b, args.skip_invalid)
    if a.degree != b.degree:
        raise datapipe.DataError(f"samples have degrees {a.degree} and {b.degree}")
    res = mmdtest.permutation_test(a.perms, b.perms, spec, n_perms=args.n_perms, level=args.level, seed=args.seed)
    _echo_config(args, out)
    print(f"kernel={spec}", file=out)
    print(f"n_a={len(a)}", file=out)
    print(f"n_b={len(b)}", file=out)
    out.write(res.to_kv())
    return EXIT_OK


def cmd_spectrum(args, out) -> int:
    spec = _kernel_from_args(args.kernel, args.nu, args.p)
    _check_range("d", args.d, 2 <= args.d <= MAX_DEGREE)
    report = spectrum_report(spec, args.d, threads=args.threads)
    _echo_config(args, out)
    out.write(report.to_text() if args.format == "text" else report.to_kv())
    return EXIT_OK


def cmd_power(args, out) -> int:
    spec = _kernel_from_args(args.kernel, args.nu, args.p)
    _check_range("d", args.d, 3 <= args.d <= MAX_DEGREE)
    _check_range("delta", args.delta, args.delta >= 0 and math.isfinite(args.delta))
    _check_range("trials", args.trials, args.trials >= 1)
    _check_range("n", args.n, args.n >= 2)
    _check_range("n-perms", args.n_perms, args.n_perms >= 1)
    _check_range("level", args.level, 0 < args.level < 1)
    if args.null_space and args.delta != 0:
        raise UsageError("--null-space shifts have ||A_tau (P - Q)|| = 0; use --delta 0")
    P = DistributionOnSd.uniform(args.d)
    # the construction and the simulation use disjoint streams of the same seed
    Q = datapipe.construct_shifted_distribution(
        P, args.delta, args.null_space, np.random.SeedSequence(args.seed, spawn_key=(2**31,)), args.max_draws
    )
    power = mmdtest.power_simulation(
        P, Q, args.n, args.trials, spec, args.n_perms, args.level, args.seed, threads=args.threads
    )
    _echo_config(args, out)
    print(f"kernel={spec}", file=out)
    print(f"mmd_squared={mmdtest.mmd_squared_exact(P, Q, spec):.17g}", file=out)
    print(f"power={power:.6g}", file=out)
    return EXIT_OK


def _parse_grid(text: str) -> list[float]:
    try:
        grid = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --lambda-grid {text!r}") from None
    if not grid or any(not g > 0 for g in grid):
        raise UsageError(f"--lambda-grid needs positive values, got {text!r}")
    return grid


def cmd_regress(args, out) -> int:
    specs = [_kernel_from_args(k, args.nu, args.p) for k in args.kernel]
    lambdas = [args.lam] if args.lam is not None else _parse_grid(args.lambda_grid)
    if args.lam is not None:
        _check_range("lambda", args.lam, args.lam > 0)
    train = _load(args.train, args.skip_invalid)
    test = _load(args.test, args.skip_invalid)
    if train.degree != test.degree:
        raise datapipe.DataError(f"train degree {train.degree} differs from test degree {test.degree}")
    y_train = train.numeric_column(args.label)
    y_test = test.numeric_column(args.label)
    if args.task == "classification":
        for name, y in (("train", y_train), ("test", y_test)):
            if not np.all(np.isin(y, (-1.0, 1.0))):
                raise datapipe.DataError(f"{name} labels in {args.label!r} must be -1 or +1 for classification")
    _echo_config(args, out)
    if len(specs) * len(lambdas) > 1:
        if args.folds < 2 or args.folds > len(train):
            raise UsageError(f"--folds must be between 2 and the training size {len(train)}")
        cv = krr.cross_validate(
            train.perms, y_train, specs, lambdas, args.folds, args.seed, args.metric, threads=args.threads
        )
        for cell in cv.cells:
            print(f"cv.{cell.spec}.lambda={cell.lam!r}.{args.metric}={cell.score:.17g}", file=out)
        spec, lam = cv.best_spec, cv.best_lambda
    else:
        spec, lam = specs[0], lambdas[0]
    model = krr.fit(train.perms, y_train, spec, lam)
    pred = krr.predict(model, test.perms)
    print(f"kernel={spec}", file=out)
    print(f"lambda={lam!r}", file=out)
    print(f"n_train={len(train)}", file=out)
    print(f"n_test={len(test)}", file=out)
    print(f"test_mse={float(np.mean((pred - y_test) ** 2)):.17g}", file=out)
    print(f"test_mae={float(np.mean(np.abs(pred - y_test))):.17g}", file=out)
    if args.task == "classification":
        err = float(np.mean(krr.classify(model, test.perms) != y_test))
        print(f"test_error_rate={err:.17g}", file=out)
    if args.model_out:
        krr.export_model(model, args.model_out)
        print(f"model_out={args.model_out}", file=out)
    return EXIT_OK


def cmd_convert(args, out) -> int:
    ratings, labels, label_cols = datapipe.load_ratings_csv(args.input)
    rng = np.random.default_rng(args.seed)
    perms = []
    for i, row in enumerate(ratings, start=1):
        if np.any(np.isnan(row)):
            raise datapipe.DataError(f"row {i}: NaN rating")
        perms.append(datapipe.ratings_to_ranking(row, rng))
    d = ratings.shape[1]
    ds = datapipe.RankingDataset(d, tuple(perms), tuple(labels), label_cols)
    summary = sys.stderr if args.output is None else out
    _echo_config(args, summary)
    print(f"rows={len(perms)}", file=summary)
    datapipe.write_rankings_csv(out if args.output is None else args.output, ds)
    return EXIT_OK


COMMANDS = {
    "gram": cmd_gram,
    "test": cmd_test,
    "spectrum": cmd_spectrum,
    "power": cmd_power,
    "regress": cmd_regress,
    "convert": cmd_convert,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (datapipe.DataError, ValueError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
