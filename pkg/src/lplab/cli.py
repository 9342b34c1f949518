"""Command-line front end: reproducible tables from every module.

Output discipline: each run emits a header block echoing the full run
configuration (flags, seed, constants, library version) followed by a
table, either CSV (header lines prefixed '#', RFC-4180 quoting) or a
single JSON object {config, schema_version, rows}.  Nothing time- or
host-dependent is ever written, so identical invocations produce
identical bytes; the determinism tests rely on this.

Floats are serialized with 17 significant digits (exact double
round-trip); quantities that live in log-domain additionally get a
log10_* column because MID-regime variances reach 1e-300 scale and
below, where the linear column alone collapses to 0.

Exit codes: 0 success, 1 check failure, 2 usage/configuration error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys

from . import __version__
from .config import Constants, load_constants
from .errors import LplabError
from .logdomain import LogValue
from .montecarlo import (
    default_samples,
    mc_negative_moment,
    mc_norm_stats,
    mc_truncated_stats,
)
from .orderstats import chernoff_bound, orderstat_cdf_exact
from .gaussian import quantile, quantile_approx, quantile_tail, upper_quantile
from .subspaces import transition_sweep
from .variance import (
    auto_p_grid,
    classify,
    lemma_checks,
    lower_envelope,
    negative_moment_bound,
    predict_variance,
    truncation_level_M,
    upper_envelope,
)

SCHEMA_VERSION = 1

_LOG10_E = math.log10(math.e)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if value is None:
        return ""
    return str(value)


def _log10(lv: LogValue) -> float:
    return lv.log10


def _config_map(args: argparse.Namespace, constants: Constants) -> dict[str, object]:
    config: dict[str, object] = {
        "command": args.command,
        "version": __version__,
        "format": args.format,
    }
    skip = {"command", "format", "output", "constants", "func"}
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None:
            continue
        config[key] = value
    for field in dataclasses.fields(Constants):
        config[f"constants.{field.name}"] = getattr(constants, field.name)
    return config


def _emit(
    args: argparse.Namespace,
    constants: Constants,
    columns: list[str],
    rows: list[dict[str, object]],
) -> None:
    config = _config_map(args, constants)
    buffer = io.StringIO()
    if args.format == "json":
        payload = {
            "config": {k: v for k, v in sorted(config.items())},
            "schema_version": SCHEMA_VERSION,
            "rows": [{col: row.get(col) for col in columns} for row in rows],
        }
        buffer.write(json.dumps(payload, sort_keys=True, indent=2))
        buffer.write("\n")
    else:
        for key in sorted(config):
            buffer.write(f"# {key}={_fmt(config[key])}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(col)) for col in columns])
    text = buffer.getvalue()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _parse_p_list(text: str) -> list[float]:
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        values.append(math.inf if token in ("inf", "oo") else float(token))
    if not values:
        raise LplabError("empty p list")
    return values


def _p_grid(args: argparse.Namespace, constants: Constants) -> list[float]:
    if getattr(args, "p_grid", None) == "auto":
        return auto_p_grid(args.n, constants)
    if getattr(args, "p_grid", None):
        return _parse_p_list(args.p_grid)
    if getattr(args, "p", None) is not None:
        return _parse_p_list(args.p)
    raise LplabError("need --p or --p-grid")


def cmd_quantile(args: argparse.Namespace, constants: Constants) -> int:
    rows = []
    if args.alpha is not None:
        xi = quantile(args.alpha)
        rows.append({"alpha": args.alpha, "xi": xi, "xi_approx": None, "gap": None})
    elif args.n is not None:
        i = args.i
        xi = quantile_tail(i / args.n) if i > 1 else upper_quantile(args.n)
        try:
            approx = quantile_approx(args.n, i)
            gap = xi - approx
        except LplabError:
            approx = None
            gap = None
        rows.append(
            {"alpha": 1.0 - i / args.n, "xi": xi, "xi_approx": approx, "gap": gap}
        )
    else:
        raise LplabError("need --alpha or --n")
    _emit(args, constants, ["alpha", "xi", "xi_approx", "gap"], rows)
    return 0


def cmd_predict(args: argparse.Namespace, constants: Constants) -> int:
    columns = [
        "n",
        "p",
        "regime",
        "predicted",
        "log10_predicted",
        "lower_env",
        "log10_lower_env",
        "upper_env",
        "log10_upper_env",
        "M",
        "p1",
        "p2",
    ]
    rows = []
    for p in _p_grid(args, constants):
        value, point = predict_variance(args.n, p, constants)
        low = lower_envelope(args.n, p, constants)
        high = upper_envelope(args.n, p, constants)
        m_level = truncation_level_M(args.n, p, constants)
        rows.append(
            {
                "n": args.n,
                "p": p,
                "regime": point.regime,
                "predicted": value.to_float(),
                "log10_predicted": _log10(value),
                "lower_env": low.to_float(),
                "log10_lower_env": _log10(low),
                "upper_env": high.to_float(),
                "log10_upper_env": _log10(high),
                "M": m_level.to_float(),
                "p1": point.p1,
                "p2": point.p2,
            }
        )
    _emit(args, constants, columns, rows)
    return 0


def cmd_mc(args: argparse.Namespace, constants: Constants) -> int:
    columns = [
        "kind",
        "n",
        "p",
        "q",
        "L",
        "T",
        "samples",
        "seed",
        "streams",
        "mean",
        "variance",
        "stderr_mean",
        "stderr_variance",
        "reference",
        "log10_reference",
        "ratio",
    ]
    samples = args.samples if args.samples else default_samples(args.n)
    rows: list[dict[str, object]] = []
    p_values = _parse_p_list(args.p) if args.p else [2.0]
    for p in p_values:
        estimate = mc_norm_stats(args.n, p, samples, args.seed, args.streams, constants)
        reference = None
        ratio = None
        log10_ref = None
        if args.n >= constants.n_min:
            predicted, _ = predict_variance(args.n, p, constants)
            reference = predicted.to_float()
            log10_ref = _log10(predicted)
            if not predicted.is_zero:
                ratio = estimate.variance / predicted.to_float()
        rows.append(
            {
                "kind": "norm",
                "n": args.n,
                "p": p,
                "samples": estimate.samples,
                "seed": args.seed,
                "streams": args.streams,
                "mean": estimate.mean,
                "variance": estimate.variance,
                "stderr_mean": estimate.stderr_mean,
                "stderr_variance": estimate.stderr_variance,
                "reference": reference,
                "log10_reference": log10_ref,
                "ratio": ratio,
            }
        )
        if args.truncate is not None:
            capped, gap_sq = mc_truncated_stats(
                args.n, p, args.truncate, samples, args.seed, args.streams, constants
            )
            rows.append(
                {
                    "kind": "truncated_norm",
                    "n": args.n,
                    "p": p,
                    "T": args.truncate,
                    "samples": capped.samples,
                    "seed": args.seed,
                    "streams": args.streams,
                    "mean": capped.mean,
                    "variance": capped.variance,
                    "stderr_mean": capped.stderr_mean,
                    "stderr_variance": capped.stderr_variance,
                }
            )
            rows.append(
                {
                    "kind": "gap_squared",
                    "n": args.n,
                    "p": p,
                    "T": args.truncate,
                    "samples": gap_sq.samples,
                    "seed": args.seed,
                    "streams": args.streams,
                    "mean": gap_sq.mean,
                    "variance": gap_sq.variance,
                    "stderr_mean": gap_sq.stderr_mean,
                    "stderr_variance": gap_sq.stderr_variance,
                }
            )
    if args.negative:
        q, L = (float(tok) for tok in args.negative.split(","))
        T = args.truncate if args.truncate is not None else math.inf
        estimate = mc_negative_moment(
            args.n, q, L, T, samples, args.seed, args.streams, constants
        )
        bound = negative_moment_bound(args.n, q, L, constants)
        rows.append(
            {
                "kind": "negative_moment",
                "n": args.n,
                "q": q,
                "L": L,
                "T": T,
                "samples": estimate.samples,
                "seed": args.seed,
                "streams": args.streams,
                "mean": estimate.mean,
                "variance": estimate.variance,
                "stderr_mean": estimate.stderr_mean,
                "stderr_variance": estimate.stderr_variance,
                "reference": bound.to_float(),
                "log10_reference": _log10(bound),
                "ratio": estimate.mean / bound.to_float() if not bound.is_zero else None,
            }
        )
    _emit(args, constants, columns, rows)
    return 0


def cmd_orderstats(args: argparse.Namespace, constants: Constants) -> int:
    columns = [
        "n",
        "i",
        "beta",
        "exact",
        "log10_exact",
        "chernoff",
        "log10_chernoff",
    ]
    rows = []
    for i in (int(tok) for tok in args.i.split(",")):
        exact = orderstat_cdf_exact(args.n, i, args.beta)
        row: dict[str, object] = {
            "n": args.n,
            "i": i,
            "beta": args.beta,
            "exact": exact.to_float(),
            "log10_exact": _log10(exact),
        }
        if i <= args.beta * args.n:
            bound = chernoff_bound(args.n, i, args.beta)
            row["chernoff"] = bound.to_float()
            row["log10_chernoff"] = _log10(bound)
        rows.append(row)
    _emit(args, constants, columns, rows)
    return 0


def cmd_checks(args: argparse.Namespace, constants: Constants) -> int:
    n_values = [int(tok) for tok in args.n.split(",")]
    p_values = None if args.p_grid == "auto" else _parse_p_list(args.p_grid)
    report = lemma_checks(n_values, p_values, constants)
    columns = ["n", "p", "check", "passed", "detail"]
    rows = [
        {
            "n": entry.n,
            "p": entry.p,
            "check": entry.name,
            "passed": entry.passed,
            "detail": entry.detail,
        }
        for entry in report.entries
    ]
    _emit(args, constants, columns, rows)
    if not report.all_passed:
        for entry in report.failures:
            print(
                f"check failed: n={entry.n} p={entry.p} {entry.name}: {entry.detail}",
                file=sys.stderr,
            )
        return 1
    return 0


def cmd_dvoretzky(args: argparse.Namespace, constants: Constants) -> int:
    deltas = [float(tok) for tok in args.delta.split(",")]
    rows_out = []
    sweep = transition_sweep(
        args.n,
        args.k,
        deltas,
        args.trials,
        args.net_resolution,
        args.seed,
        epsilon_sub=args.eps,
        epsilon_super_w=args.eps_w,
    )
    for row in sweep:
        result = row.result
        rows_out.append(
            {
                "delta": row.delta,
                "side": row.side,
                "p": row.p,
                "epsilon": row.epsilon,
                "trials": result.trials,
                "successes": result.successes,
                "failures": result.failures,
                "ambiguous": result.ambiguous,
                "probability": result.probability,
                "wilson_low": result.wilson_low,
                "wilson_high": result.wilson_high,
                "in_window": row.in_window,
            }
        )
    columns = [
        "delta",
        "side",
        "p",
        "epsilon",
        "trials",
        "successes",
        "failures",
        "ambiguous",
        "probability",
        "wilson_low",
        "wilson_high",
        "in_window",
    ]
    _emit(args, constants, columns, rows_out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lplab",
        description="Variance of p-norms of Gaussian vectors: theory tables,"
        " Monte Carlo estimates, and random-section experiments.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--constants", help="path to a key=value constants file")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", help="write to this path instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser(
        "quantile", help="upper quantiles of |g| and the expansion", parents=[common]
    )
    q.add_argument("--alpha", type=float)
    q.add_argument("--n", type=int)
    q.add_argument("--i", type=int, default=1)
    q.set_defaults(func=cmd_quantile)

    pr = sub.add_parser("predict", help="predicted variance and envelopes over p", parents=[common])
    pr.add_argument("--n", type=int, required=True)
    pr.add_argument("--p")
    pr.add_argument("--p-grid", dest="p_grid")
    pr.set_defaults(func=cmd_predict)

    mc = sub.add_parser("mc", help="Monte Carlo norm statistics", parents=[common])
    mc.add_argument("--n", type=int, required=True)
    mc.add_argument("--p")
    mc.add_argument("--samples", type=int)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--streams", type=int, default=4)
    mc.add_argument("--truncate", type=float)
    mc.add_argument("--negative", help="q,L for a negative-moment estimate")
    mc.set_defaults(func=cmd_mc)

    os_ = sub.add_parser("orderstats", help="order statistic CDF vs bounds", parents=[common])
    os_.add_argument("--n", type=int, required=True)
    os_.add_argument("--beta", type=float, required=True)
    os_.add_argument("--i", default="1")
    os_.set_defaults(func=cmd_orderstats)

    ch = sub.add_parser("checks", help="pointwise lemma checks", parents=[common])
    ch.add_argument("--n", default="1000,10000")
    ch.add_argument("--p-grid", dest="p_grid", default="auto")
    ch.set_defaults(func=cmd_checks)

    dv = sub.add_parser("dvoretzky", help="random-section phase experiments", parents=[common])
    dv.add_argument("--n", type=int, required=True)
    dv.add_argument("--k", type=int, default=2)
    dv.add_argument("--delta", default="0.5")
    dv.add_argument("--trials", type=int, default=400)
    dv.add_argument("--net-resolution", dest="net_resolution", type=float, default=0.004)
    dv.add_argument("--eps", type=float, default=0.1)
    dv.add_argument("--eps-w", dest="eps_w", type=float, default=0.5)
    dv.add_argument("--seed", type=int, default=0)
    dv.set_defaults(func=cmd_dvoretzky)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        constants = load_constants(args.constants)
        return args.func(args, constants)
    except LplabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
