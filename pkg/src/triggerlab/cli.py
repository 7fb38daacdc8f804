"""Command-line entry point.

Subcommands: prob, window, datasize, simulate, generate, windows, infer,
figures. Output is csv (default) or json; numbers are rendered with the
shortest round-tripping decimal in both, so the two formats agree bit
for bit. Figure subcommands emit plain data tables; plotting is left to
external tools. Exit codes: 0 ok, 1 invalid arguments, 2 computation
guard exceeded, 3 I/O problem.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import datagen, infer, plan, prob, sim
from .core import (
    MatchMode,
    ProblemParams,
    TriggerPattern,
    parse_pattern,
    render_pattern,
)
from .errors import (
    DatasetFormatError,
    InstanceTooLargeError,
    InvalidInputError,
    ParseError,
    PrecisionError,
    TriggerLabError,
    UnreachableTargetError,
    UnsupportedParameterError,
)
from .rng import Rng, derive_seed

__all__ = ["FigureTable", "main", "entry", "figure_tables"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_GUARD = 2
EXIT_IO = 3


@dataclass(frozen=True)
class FigureTable:
    """A rectangular, deterministic data table backing one plot."""

    name: str
    columns: list[str]
    rows: list[list]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1, not argparse's 2
        raise _UsageError(message)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return str(value)


def _emit_table(table: FigureTable, fmt: str, out) -> None:
    if fmt == "json":
        obj = {"name": table.name, "columns": table.columns, "rows": table.rows}
        out.write(json.dumps(obj) + "\n")
    else:
        out.write(f"# {table.name}\n")
        out.write(",".join(table.columns) + "\n")
        for row in table.rows:
            out.write(",".join(_fmt(v) for v in row) + "\n")


def _emit_tables(tables: list[FigureTable], fmt: str, out) -> None:
    if fmt == "json":
        objs = [{"name": t.name, "columns": t.columns, "rows": t.rows} for t in tables]
        out.write(json.dumps(objs) + "\n")
    else:
        for i, t in enumerate(tables):
            if i:
                out.write("\n")
            _emit_table(t, "csv", out)


def _emit_object(obj: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps({k: _json_value(v) for k, v in obj.items()}) + "\n")
    else:
        out.write(",".join(obj.keys()) + "\n")
        out.write(",".join(_fmt(v) for v in obj.values()) + "\n")


def _json_value(v):
    if isinstance(v, Fraction):
        return _fmt(v)
    return v


def _emit_value(value, fmt: str, out, **extra) -> None:
    if fmt == "json":
        obj = dict(extra)
        obj["value"] = _json_value(value)
        out.write(json.dumps(obj) + "\n")
    else:
        out.write(_fmt(value) + "\n")


def _params(args) -> ProblemParams:
    return ProblemParams(args.a, args.h, args.l)


def _trigger_from_args(args, params: ProblemParams, default_mode=MatchMode.SUBSEQUENCE) -> TriggerPattern:
    mode = MatchMode(getattr(args, "match", None) or default_mode.value)
    if getattr(args, "trigger", None):
        return parse_pattern(args.trigger, params, mode)
    return TriggerPattern.fixed((0,) * params.l, (0,) * params.l, mode)


# ---------------------------------------------------------------------------
# Figures


def figure_tables(which: str, a: int, h: int, l: int, trials: int, seed: int | None,
                  n_max: int | None = None, alpha: float = 0.05) -> list[FigureTable]:
    params = ProblemParams(a, h, l)
    if which == "1":
        if seed is None:
            raise InvalidInputError("figure 1 runs simulations and needs --seed")
        n_top = n_max if n_max is not None else 50
        master = Rng(seed)
        seed_a, seed_b, seed_shared = (master.next_u64() for _ in range(3))
        pat_a = TriggerPattern.fixed((0,) * l, (0,) * l)
        alt = tuple(i % min(a, 2) for i in range(l))
        pat_b = TriggerPattern.fixed(alt, (0,) * l)
        pat_shared = TriggerPattern.shared(tuple([0] * (l - 1) + [1 % a]))
        rows = []
        for n in range(n_top + 1):
            mc_a = sim.mc_probability(n, params, pat_a, trials, derive_seed(seed_a, n))
            mc_b = sim.mc_probability(n, params, pat_b, trials, derive_seed(seed_b, n))
            mc_s = sim.mc_probability(n, params, pat_shared, trials, derive_seed(seed_shared, n))
            rows.append([
                n,
                prob.p_binom(n, params),
                mc_a.estimate,
                mc_a.stderr,
                mc_b.estimate,
                mc_b.stderr,
                prob.p_same_hidden(n, params),
                mc_s.estimate,
                mc_s.stderr,
            ])
        return [FigureTable(
            "figure1_analytic_vs_mc",
            ["n", "p", "mc_fixed_a", "se_fixed_a", "mc_fixed_b", "se_fixed_b",
             "p_same_hidden", "mc_shared", "se_shared"],
            rows,
        )]
    if which == "2":
        n_top = n_max if n_max is not None else 100
        rows = [[n, prob.p_binom(n, params), prob.p_same_hidden(n, params)]
                for n in range(n_top + 1)]
        return [FigureTable("figure2_p_vs_same_hidden", ["n", "p", "p_same_hidden"], rows)]
    if which == "3":
        n_top = n_max if n_max is not None else 50
        q_rows = [[n, prob.q_apparent(n, a, l)] for n in range(n_top + 1)]
        window = n_max if n_max is not None else 50
        diff_rows = []
        for av, dp in plan.difficulty_curve(range(2, 7), window=window, h=h, l=l, alpha=alpha):
            diff_rows.append([av, dp.g, dp.m, dp.r, dp.total])
        return [
            FigureTable("figure3_q_curve", ["n", "q"], q_rows),
            FigureTable("figure3_difficulty", ["a", "g", "m", "r", "total"], diff_rows),
        ]
    if which == "8":
        n_top = n_max if n_max is not None else 60
        columns = ["n", "p_binom", "p_negbinom", "p_rec"]
        include_iter = l == 3
        include_repeated = (a, h, l) == (2, 4, 3)
        if include_iter:
            columns.append("p_iter")
        if include_repeated:
            columns.append("p_repeated")
        rows = []
        for n in range(n_top + 1):
            row = [n, prob.p_binom(n, params), prob.p_negbinom(n, params),
                   prob.p_rec(n, l, params)]
            if include_iter:
                row.append(prob.p_iter(n, params))
            if include_repeated:
                row.append(prob.p_repeated(n))
            rows.append(row)
        return [FigureTable("figure8_formula_equivalence", columns, rows)]
    raise InvalidInputError(f"unknown figure {which!r}; choose 1, 2, 3 or 8")


# ---------------------------------------------------------------------------
# Subcommand handlers


def _require_n(args) -> None:
    if args.n is None:
        raise InvalidInputError("this command needs --n")


def _cmd_prob(args, out) -> int:
    _require_n(args)
    params = _params(args)
    f = args.formula
    exact = args.exact
    if exact and f in ("iter", "rec"):
        raise InvalidInputError(f"--exact is not supported for formula {f!r}")
    if f == "binom":
        value = prob.p_binom(args.n, params, exact)
    elif f == "negbinom":
        value = prob.p_negbinom(args.n, params, exact)
    elif f == "iter":
        value = prob.p_iter(args.n, params)
    elif f == "rec":
        value = prob.p_rec(args.n, args.l, params)
    elif f == "repeated":
        if (args.a, args.h, args.l) != (2, 4, 3):
            raise InvalidInputError("formula repeated is defined for a=2, h=4, l=3")
        value = prob.p_repeated(args.n, exact)
    elif f == "same-hidden":
        value = prob.p_same_hidden(args.n, params, exact)
    elif f == "q":
        value = prob.q_apparent(args.n, args.a, args.l, exact)
    else:
        raise InvalidInputError(f"unknown formula {f!r}")
    _emit_value(value, args.format, out, formula=f, n=args.n, a=args.a, h=args.h, l=args.l)
    return EXIT_OK


def _cmd_window(args, out) -> int:
    params = _params(args)
    n = plan.min_window(args.confidence, params, args.mode)
    achieved = plan.window_probability(n, params, args.mode)
    if args.format == "json":
        out.write(json.dumps({
            "confidence": args.confidence, "mode": args.mode,
            "a": args.a, "h": args.h, "l": args.l,
            "window": n, "probability": achieved,
        }) + "\n")
    else:
        out.write(_fmt(n) + "\n")
    return EXIT_OK


def _cmd_datasize(args, out) -> int:
    _require_n(args)
    dp = plan.data_plan(args.alpha, args.n, args.a, args.l)
    obj = {
        "alpha": dp.alpha,
        "window": dp.window,
        "g": dp.g,
        "m": dp.m,
        "r": dp.r,
        "total": dp.total,
        "false_candidates": dp.false_candidates,
    }
    if args.exact:
        obj["g_exact"] = dp.g_exact
    _emit_object(obj, args.format, out)
    return EXIT_OK


def _cmd_simulate(args, out) -> int:
    _require_n(args)
    if args.seed is None:
        raise InvalidInputError("simulate needs --seed")
    params = _params(args)
    pattern = _trigger_from_args(args, params)
    est = sim.mc_probability(args.n, params, pattern, args.trials, args.seed)
    kind, analytic = _analytic_for(pattern, args.n, params)
    obj = {
        "n": args.n,
        "trigger": render_pattern(pattern, params.a),
        "match": pattern.mode.value,
        "trials": est.trials,
        "estimate": est.estimate,
        "stderr": est.stderr,
        "ci95_lo": est.ci95[0],
        "ci95_hi": est.ci95[1],
        "analytic_kind": kind,
        "analytic": analytic,
    }
    _emit_object(obj, args.format, out)
    return EXIT_OK


def _analytic_for(pattern: TriggerPattern, n: int, params: ProblemParams):
    from .core import HiddenConstraint

    if pattern.mode is not MatchMode.SUBSEQUENCE:
        return "none", None  # no closed form for consecutive placement here
    if pattern.constraint is HiddenConstraint.FIXED:
        return "p_binom", prob.p_binom(n, params)
    if pattern.constraint is HiddenConstraint.SHARED:
        return "p_same_hidden", prob.p_same_hidden(n, params)
    return "q_apparent", prob.q_apparent(n, params.a, params.l)


def _stream_config(args) -> datagen.StreamConfig:
    if args.seed is None:
        raise InvalidInputError("stream generation needs --seed")
    params = _params(args)
    scenario = datagen.Scenario(args.scenario)
    if args.trigger:
        mode = MatchMode.CONSECUTIVE if scenario.consecutive else MatchMode.SUBSEQUENCE
        trigger = parse_pattern(args.trigger, params, mode)
    else:
        trigger = datagen.random_trigger(params, scenario, args.seed)
    return datagen.StreamConfig(
        params=params,
        trigger=trigger,
        scenario=scenario,
        length=args.length,
        seed=args.seed,
        span_bound=args.span_bound,
    )


def _cmd_generate(args, out) -> int:
    config = _stream_config(args)
    stream = datagen.generate_stream(config)
    truth = datagen.GroundTruth.of(config, stream)
    datagen.write_stream(args.out, stream, truth)
    _emit_object(
        {"out": str(args.out), "length": len(stream), "events": len(stream.events)},
        args.format,
        out,
    )
    return EXIT_OK


def _cmd_windows(args, out) -> int:
    lengths = _parse_window_lengths(args.window_lengths)
    if args.span_bound is None:
        args.span_bound = min(lengths)
    config = _stream_config(args)
    stream = datagen.generate_stream(config)
    truth = datagen.GroundTruth.of(config, stream)
    records = datagen.window_dataset(
        stream,
        lengths,
        balance=args.balance,
        negative_ratio=args.negative_ratio,
        seed=derive_seed(args.seed, 2),
        skip_crossing=not args.keep_crossing,
    )
    datagen.write_dataset(args.out, records, truth)
    positives = sum(r.label for r in records)
    _emit_object(
        {
            "out": str(args.out),
            "records": len(records),
            "positives": positives,
            "events": len(stream.events),
        },
        args.format,
        out,
    )
    return EXIT_OK


def _parse_window_lengths(text: str) -> list[int]:
    try:
        lengths = [int(part) for part in text.split(",") if part]
    except ValueError:
        raise InvalidInputError(f"bad --window-lengths {text!r}")
    if not lengths:
        raise InvalidInputError("--window-lengths must name at least one length")
    return lengths


def _cmd_infer(args, out) -> int:
    report = infer.infer_trigger(
        args.dataset, a=args.a, l=args.l, mode=args.mode, tolerance=args.tolerance
    )
    if args.format == "json":
        out.write(json.dumps(report.to_dict()) + "\n")
    else:
        out.write(f"status,{report.status}\n")
        out.write(f"positives,{report.positives}\n")
        out.write(f"survivors,{'|'.join(report.survivors)}\n")
        if report.truth_apparent is not None:
            out.write(f"truth_apparent,{report.truth_apparent}\n")
            out.write(f"truth_is_survivor,{_fmt(report.truth_is_survivor)}\n")
        out.write("pattern,miss_count,eliminated\n")
        for row in report.candidates:
            out.write(f"{row['pattern']},{row['miss_count']},{_fmt(row['eliminated'])}\n")
    return EXIT_OK


def _cmd_figures(args, out) -> int:
    tables = figure_tables(
        args.which, args.a, args.h, args.l, args.trials, args.seed,
        n_max=args.n, alpha=args.alpha,
    )
    _emit_tables(tables, args.format, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="triggerlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, n=False, ahl=True, seed=False, fmt=True, exact=False):
        if ahl:
            p.add_argument("--a", type=int, default=2, help="apparent states")
            p.add_argument("--h", type=int, default=4, help="hidden states")
            p.add_argument("--l", type=int, default=3, help="trigger length")
        if n:
            p.add_argument("--n", type=int, required=False, help="window length")
        if seed:
            p.add_argument("--seed", type=int, default=None, help="PRNG seed")
        if fmt:
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        if exact:
            p.add_argument("--exact", action="store_true", help="exact rational output")

    p = sub.add_parser("prob", help="evaluate one occurrence-probability formula")
    common(p, n=True, exact=True)
    p.add_argument("--formula", required=True,
                   choices=("binom", "negbinom", "iter", "rec", "repeated", "same-hidden", "q"))
    p.set_defaults(func=_cmd_prob)

    p = sub.add_parser("window", help="smallest window reaching a confidence")
    common(p)
    p.add_argument("--confidence", type=float, required=True)
    p.add_argument("--mode", choices=plan.WINDOW_MODES, default="particular")
    p.set_defaults(func=_cmd_window)

    p = sub.add_parser("datasize", help="elimination data-size plan (G, m, r, total)")
    common(p, n=True, exact=True)
    p.add_argument("--alpha", type=str, default="0.05", help="residual risk")
    p.set_defaults(func=_cmd_datasize)

    p = sub.add_parser("simulate", help="Monte Carlo estimate next to the analytic value")
    common(p, n=True, seed=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--trigger", type=str, default=None,
                   help="pattern text, e.g. L1L1S1, LiLiSi or LLS")
    p.add_argument("--match", choices=("subsequence", "consecutive"), default=None)
    p.set_defaults(func=_cmd_simulate)

    for name, handler in (("generate", _cmd_generate), ("windows", _cmd_windows)):
        p = sub.add_parser(name, help=f"{name} synthetic data")
        common(p, seed=True)
        p.add_argument("--scenario", default="subsequence-nohidden",
                       choices=[s.value for s in datagen.Scenario])
        p.add_argument("--length", type=int, required=True, help="stream length in elements")
        p.add_argument("--span-bound", dest="span_bound", type=int, default=None)
        p.add_argument("--trigger", type=str, default=None,
                       help="pattern text; drawn from the seed when omitted")
        p.add_argument("--out", type=Path, required=True)
        if name == "windows":
            p.add_argument("--window-lengths", dest="window_lengths", type=str, required=True,
                           help="comma-separated window lengths")
            p.add_argument("--balance", choices=("keep-all", "downsample"), default="keep-all")
            p.add_argument("--negative-ratio", dest="negative_ratio", type=float, default=1.0)
            p.add_argument("--keep-crossing", dest="keep_crossing", action="store_true",
                           help="also emit windows with event markers inside")
        p.set_defaults(func=handler)

    p = sub.add_parser("infer", help="candidate elimination over a window dataset")
    p.add_argument("dataset", type=Path)
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--mode", choices=("strict", "ranked"), default="strict")
    p.add_argument("--tolerance", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_infer)

    p = sub.add_parser("figures", help="emit the data tables behind the figures")
    common(p, n=True, seed=True)
    p.add_argument("--which", required=True, choices=("1", "2", "3", "8"))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--alpha", type=str, default="0.05")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_cmd_figures)

    return parser


def _wanted_format(argv) -> str:
    for i, arg in enumerate(argv):
        if arg == "--format" and i + 1 < len(argv):
            return argv[i + 1]
        if arg.startswith("--format="):
            return arg.split("=", 1)[1]
    return "csv"


def _report_error(message: str, kind: str, fmt: str) -> None:
    if fmt == "json":
        sys.stderr.write(json.dumps({"error": {"kind": kind, "message": message}}) + "\n")
    else:
        sys.stderr.write(f"error: {message}\n")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    fmt = _wanted_format(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        out = sys.stdout
        close = None
        if getattr(args, "out", None) is not None and args.command == "figures":
            close = out = open(args.out, "w", encoding="utf-8")
        try:
            return args.func(args, out)
        finally:
            if close is not None:
                close.close()
    except _UsageError as e:
        _report_error(str(e), "invalid-arguments", fmt)
        return EXIT_USAGE
    except (InvalidInputError, UnsupportedParameterError, UnreachableTargetError, ParseError) as e:
        _report_error(str(e), "invalid-arguments", fmt)
        return EXIT_USAGE
    except (InstanceTooLargeError, PrecisionError) as e:
        _report_error(str(e), "guard-exceeded", fmt)
        return EXIT_GUARD
    except (DatasetFormatError,) as e:
        _report_error(str(e), "io", fmt)
        return EXIT_IO
    except OSError as e:
        _report_error(str(e), "io", fmt)
        return EXIT_IO
    except TriggerLabError as e:
        _report_error(str(e), "error", fmt)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
