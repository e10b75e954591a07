"""Command-line harness: file ingestion, decompositions, experiments, reports.

Exit codes are a stable scripting contract: 0 success, 2 usage errors,
3 file parse errors, 4 numerical precondition violations.
"""

import argparse
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__, curfac, experiments, matkit
from . import io as gio
from .errors import GcurkitError, ParseError
from .gcur import evaluate_bounds, gcur, gcur_only_a, reconstruct_a, reconstruct_b
from .gsvd import gsvd, truncate, truncated_pair

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_NUMERIC = 4


class UsageError(Exception):
    """Command-level usage problem detected after argument parsing."""


def _jsonable(obj):
    """Recursively convert report values to JSON-safe types."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if not np.isfinite(f):
            return repr(f)
        return f
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    return obj


def _base_report(command, params, no_timestamp):
    report = {
        "schema": experiments.REPORT_SCHEMA,
        "version": __version__,
        "command": command,
        "params": _jsonable(params),
    }
    if not no_timestamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat()
    return report


def _emit(report, args):
    text = gio.write_report(_jsonable(report), out=args.out, fmt=args.format)
    if args.out is None:
        sys.stdout.write(text)


def _one_based(indices):
    return [int(i) + 1 for i in indices]


def _parse_int_list(text, flag):
    try:
        return [int(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"{flag} expects a comma-separated integer list, got {text!r}")


def _parse_float_list(text, flag):
    try:
        return [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"{flag} expects a comma-separated number list, got {text!r}")


def _read(path, args):
    return gio.read_matrix(path, csv_header=args.csv_header)


def _require_rank(k, n, what="columns"):
    if k is None:
        raise UsageError("--rank/-k is required")
    if not 1 <= k < n:
        raise UsageError(f"rank k={k} must satisfy 1 <= k < {what} = {n}")


def cmd_gsvd(args):
    a = _read(args.file_a, args)
    b = _read(args.file_b, args)
    f = gsvd(a, b)
    report = _base_report(
        "gsvd",
        {"file_a": args.file_a, "file_b": args.file_b, "k": args.rank},
        args.no_timestamp,
    )
    recon_a = matkit.spectral_norm(a - f.U @ (f.gamma[:, None] * f.Y.T))
    recon_b = matkit.spectral_norm(b - f.V @ (f.sigma[:, None] * f.Y.T))
    report.update(
        {
            "gamma": f.gamma,
            "sigma": f.sigma,
            "ratios": f.ratios,
            "reconstruction_residuals": {
                "a_abs": recon_a,
                "b_abs": recon_b,
                "a_rel": recon_a / max(1.0, matkit.spectral_norm(a)),
                "b_rel": recon_b / max(1.0, matkit.spectral_norm(b)),
            },
        }
    )
    if args.rank is not None:
        _require_rank(args.rank, a.shape[1])
        t = truncate(f, args.rank)
        a_k, _ = truncated_pair(f, args.rank)
        observed = matkit.spectral_norm(a - a_k)
        lower = float(f.gamma[args.rank]) * matkit.smallest_singular_value(t.Y_tail)
        upper = float(f.gamma[args.rank]) * matkit.spectral_norm(t.Y_tail)
        report["truncation"] = {
            "k": args.rank,
            "gamma_next": float(f.gamma[args.rank]),
            "sandwich": {
                "lower": lower,
                "observed": observed,
                "upper": upper,
                "pass": bool(
                    lower <= observed + 1e-9 * max(1.0, matkit.spectral_norm(a))
                    and observed <= upper + 1e-9 * max(1.0, matkit.spectral_norm(a))
                ),
            },
        }
    if args.factors_out:
        os.makedirs(args.factors_out, exist_ok=True)
        gio.write_matrix_market(os.path.join(args.factors_out, "U.mtx"), f.U)
        gio.write_matrix_market(os.path.join(args.factors_out, "V.mtx"), f.V)
        gio.write_matrix_market(os.path.join(args.factors_out, "Y.mtx"), f.Y)
        gio.write_matrix_market(
            os.path.join(args.factors_out, "gamma.mtx"), f.gamma.reshape(-1, 1)
        )
        gio.write_matrix_market(
            os.path.join(args.factors_out, "sigma.mtx"), f.sigma.reshape(-1, 1)
        )
    _emit(report, args)
    return EXIT_OK


def cmd_cur(args):
    a = _read(args.file_a, args)
    _require_rank(args.rank, min(a.shape), "min(rows, cols)")
    f = curfac.deim_cur(a, args.rank)
    err = matkit.spectral_norm(a - curfac.reconstruct(a, f)) / matkit.spectral_norm(a)
    report = _base_report(
        "cur", {"file_a": args.file_a, "k": args.rank}, args.no_timestamp
    )
    report.update(
        {
            "p": _one_based(f.p),
            "s": _one_based(f.s),
            "M": f.M,
            "rel_error": err,
        }
    )
    _emit(report, args)
    return EXIT_OK


def cmd_gcur(args):
    a = _read(args.file_a, args)
    b = _read(args.file_b, args)
    _require_rank(args.rank, a.shape[1])
    report = _base_report(
        "gcur",
        {
            "file_a": args.file_a,
            "file_b": args.file_b,
            "k": args.rank,
            "only_a": args.only_a,
            "id_mode": args.id_mode,
        },
        args.no_timestamp,
    )
    norm_a = matkit.spectral_norm(a)

    if args.id_mode:
        f = gcur_only_a(a, b, args.rank) if args.only_a else gcur(a, b, args.rank)
        if args.id_mode == "column":
            c_a = a[:, f.p]
            err_a = matkit.spectral_norm(a - c_a @ matkit.lstsq(c_a, a)) / norm_a
            report["p"] = _one_based(f.p)
            report["rel_error_a"] = err_a
            if not args.only_a:
                c_b = b[:, f.p]
                report["rel_error_b"] = matkit.spectral_norm(
                    b - c_b @ matkit.lstsq(c_b, b)
                ) / matkit.spectral_norm(b)
        else:
            r_a = a[f.s_a, :]
            err_a = matkit.spectral_norm(a - matkit.lstsq(r_a.T, a.T).T @ r_a) / norm_a
            report["s_a"] = _one_based(f.s_a)
            report["rel_error_a"] = err_a
            if not args.only_a:
                r_b = b[f.s_b, :]
                report["s_b"] = _one_based(f.s_b)
                report["rel_error_b"] = matkit.spectral_norm(
                    b - matkit.lstsq(r_b.T, b.T).T @ r_b
                ) / matkit.spectral_norm(b)
        _emit(report, args)
        return EXIT_OK

    if args.only_a:
        f = gcur_only_a(a, b, args.rank)
    else:
        f = gcur(a, b, args.rank)
    report["p"] = _one_based(f.p)
    report["s_a"] = _one_based(f.s_a)
    report["M_a"] = f.M_a
    report["ratio_gap"] = f.ratio_gap
    report["rel_error_a"] = (
        matkit.spectral_norm(a - reconstruct_a(a, f)) / norm_a
    )
    if not args.only_a:
        report["s_b"] = _one_based(f.s_b)
        report["M_b"] = f.M_b
        report["rel_error_b"] = matkit.spectral_norm(
            b - reconstruct_b(b, f)
        ) / matkit.spectral_norm(b)
    if args.bounds:
        rep = evaluate_bounds(a, b, f)
        bound_dict = rep._asdict()
        bound_dict["checks"] = dict(rep.checks)
        bound_dict["all_pass"] = all(rep.checks.values())
        report["bounds"] = bound_dict
    _emit(report, args)
    return EXIT_OK


def _experiment_plot_series(report_dict):
    name = report_dict["experiment"]
    cells = report_dict["cells"]
    if name == "intro-angles":
        eps = [c["eps"] for c in cells]
        return [
            {"name": m, "x": eps, "y": [c["stats"][m]["mean"] for c in cells]}
            for m in ("SVD", "GSVD")
        ]
    if name.startswith("noise-recovery"):
        eps_values = sorted({c["eps"] for c in cells})
        series = []
        for method in ("TSVD", "TGSVD", "CUR", "GCUR"):
            for eps in eps_values:
                pts = [(c["k"], c["stats"][method]["mean"]) for c in cells if c["eps"] == eps]
                pts.sort()
                series.append(
                    {
                        "name": f"{method} eps={eps:g}",
                        "x": [p[0] for p in pts],
                        "y": [p[1] for p in pts],
                    }
                )
        return series
    proj = report_dict.get("projections")
    if proj is None:
        raise UsageError("subgroups plot needs projections in the report")
    labels = np.asarray(proj["labels"])
    coords = np.asarray(proj["GCUR"])
    series = []
    for gi, gname in enumerate(proj["group_names"]):
        sel = labels == gi
        series.append(
            {
                "name": gname,
                "x": coords[sel, 0].tolist(),
                "y": coords[sel, 1].tolist(),
                "marker": True,
            }
        )
    return series


def cmd_experiment(args):
    name = args.name
    if name == "intro-angles":
        eps = (
            _parse_float_list(args.eps, "--eps") if args.eps else [5e-2, 5e-3, 5e-4]
        )
        trials = args.trials if args.trials is not None else 1000
        rep = experiments.intro_angles(
            eps_values=eps, trials=trials, seed=args.seed, threads=None
        )
    elif name in ("noise-recovery", "noise-recovery-inexact"):
        kind = args.matrix_kind
        if args.paper_scale:
            m = 100000 if kind == "sparse" else 10000
            trials = args.trials if args.trials is not None else 100
        else:
            m = 2000
            trials = args.trials if args.trials is not None else 20
        k_values = (
            _parse_int_list(args.rank, "--rank") if args.rank else [10, 15, 20, 30]
        )
        eps = (
            _parse_float_list(args.eps, "--eps")
            if args.eps
            else [0.05, 0.1, 0.15, 0.2]
        )
        rep = experiments.noise_recovery(
            kind=kind,
            m=m,
            n=300,
            k_values=k_values,
            eps_values=eps,
            trials=trials,
            rho=args.rho,
            seed=args.seed,
            inexact_chol=(name == "noise-recovery-inexact" or args.inexact_chol),
            threads=None,
        )
        rep.experiment = name
    elif name == "subgroups":
        n_columns = _parse_int_list(args.rank, "--rank") if args.rank else [2, 5, 10]
        rep = experiments.subgroups(
            n_columns=n_columns,
            seed=args.seed,
            points_per_group=args.points_per_group,
        )
    else:
        raise UsageError(f"unknown experiment {name!r}")

    report = rep.to_dict(include_timing=not args.no_timestamp)
    if args.plot_out:
        series = _experiment_plot_series(report)
        gio.write_plotdata(series, args.plot_out, fmt=args.plot_format, title=name)
    _emit(report, args)
    return EXIT_OK


def _add_common(parser):
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--out", default=None, help="write the report to this path")
    parser.add_argument(
        "--csv-header", action="store_true", help="input CSV files have a header row"
    )
    parser.add_argument(
        "--no-timestamp",
        action="store_true",
        help="omit timestamps and wall-clock fields for byte-stable output",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gcurkit",
        description="Generalized CUR decompositions of matrix pairs and experiments",
    )
    parser.add_argument("--version", action="version", version=f"gcurkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gsvd", help="factor a matrix pair and report the spectrum")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--rank", "-k", type=int, default=None)
    p.add_argument("--factors-out", default=None, help="directory for factor matrices")
    _add_common(p)
    p.set_defaults(func=cmd_gsvd)

    p = sub.add_parser("cur", help="single-matrix CUR decomposition")
    p.add_argument("file_a")
    p.add_argument("--rank", "-k", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_cur)

    p = sub.add_parser("gcur", help="generalized CUR of a matrix pair")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--rank", "-k", type=int, default=None)
    p.add_argument("--only-a", action="store_true", help="skip B's row selection")
    p.add_argument("--bounds", action="store_true", help="evaluate error bounds")
    p.add_argument(
        "--id-mode",
        choices=("column", "row"),
        default=None,
        help="report a one-sided interpolative decomposition instead",
    )
    _add_common(p)
    p.set_defaults(func=cmd_gcur)

    p = sub.add_parser("experiment", help="run a named reproducible experiment")
    p.add_argument(
        "name",
        choices=("intro-angles", "noise-recovery", "noise-recovery-inexact", "subgroups"),
    )
    p.add_argument("--rank", "-k", default=None, help="comma-separated rank list")
    p.add_argument("--eps", default=None, help="comma-separated noise levels")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float, default=0.99, help="Toeplitz covariance parameter")
    p.add_argument("--inexact-chol", action="store_true")
    p.add_argument(
        "--matrix-kind", choices=("gapped", "sparse"), default="gapped"
    )
    p.add_argument("--paper-scale", action="store_true", help="full-size experiment dims")
    p.add_argument("--points-per-group", type=int, default=100)
    p.add_argument("--plot-out", default=None, help="write plot data to this path")
    p.add_argument("--plot-format", choices=("svg", "csv"), default="svg")
    _add_common(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gcurkit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"gcurkit: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (GcurkitError, np.linalg.LinAlgError) as exc:
        print(f"gcurkit: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"gcurkit: i/o error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
