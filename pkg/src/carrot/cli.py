"""Command-line front end: trace, spectrum, model, diff, converge."""

from __future__ import annotations

import argparse
import glob
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from .convergence import DEFAULT_WINDOW, convergence_curve, steady_state
from .diff import render_report, diff
from .estimator import check_config
from .invariants import ALL_SCHEMATA, Schema
from .minilang import CaseError, LabelRule, MinilangError, execute_cases, parse_cases, parse_program
from .spectra import (
    IncompatibleError,
    ModelFormatError,
    build_model,
    compute_spectrum,
    dump_model,
    dump_spectrum,
    load_model,
)
from .trace import TraceError, read_trace_file, write_trace

PROG = "carrot"


class CliError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    schemata: frozenset[Schema] = ALL_SCHEMATA
    value_sets: bool = True
    pair_sets: bool = True
    window: int = DEFAULT_WINDOW
    format: str = "text"
    out: str | None = None
    points: str | None = None

    @classmethod
    def from_args(cls, args) -> "Config":
        value_sets = not getattr(args, "no_vsets", False)
        pair_sets = value_sets and not getattr(args, "no_psets", False)
        window = getattr(args, "window", DEFAULT_WINDOW)
        schemata = check_config(getattr(args, "schemata", "all"), value_sets, pair_sets, window)
        return cls(schemata, value_sets, pair_sets, window, getattr(args, "format", "text"),
                   getattr(args, "out", None), getattr(args, "points", None))


def _natural_key(path: str):
    return [int(p) if p.isdigit() else p for p in re.split(r"(\d+)", path)]


def expand_paths(patterns: list[str]) -> list[str]:
    """Expand glob patterns (the shell may not have) into a naturally sorted path list."""
    out: list[str] = []
    for pat in patterns:
        if glob.has_magic(pat):
            out.extend(sorted(glob.glob(pat), key=_natural_key))
        else:
            out.append(pat)
    if not out:
        raise CliError(f"no trace files match {' '.join(patterns)}")
    return out


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_trace(args) -> int:
    try:
        program = parse_program(Path(args.program).read_text(encoding="utf-8"))
    except MinilangError as exc:
        sep = ":" if exc.line is not None else ": "
        raise CliError(f"{args.program}{sep}{exc}") from None
    cases = parse_cases(Path(args.cases).read_text(encoding="utf-8"), program, args.entry)
    out_dir = Path(args.out or "traces")
    if not cases:
        print(f"{PROG}: warning: {args.cases} contains no cases; nothing traced", file=sys.stderr)
        return 0
    try:
        outcomes = execute_cases(program, cases, args.label)
    except MinilangError as exc:
        raise CliError(f"{exc}") from None
    out_dir.mkdir(parents=True, exist_ok=True)
    width = max(3, len(str(len(cases) - 1)))
    n_good = 0
    for o in outcomes:
        tag = "good" if o.good else "bad"
        n_good += o.good
        (out_dir / f"run_{o.index:0{width}d}_{tag}.trace").write_text(
            write_trace(o.trace), encoding="utf-8"
        )
    print(f"traced {len(outcomes)} case(s): {n_good} good, {len(outcomes) - n_good} bad -> {out_dir}")
    return 0


def _load_traces(patterns, points=None):
    paths = expand_paths(patterns)
    traces = []
    for p in paths:
        try:
            traces.append(read_trace_file(p).restrict(points))
        except TraceError as exc:
            raise CliError(f"{p}: {exc}") from None
    return paths, traces


def cmd_spectrum(args) -> int:
    cfg = Config.from_args(args)
    trace = read_trace_file(args.trace).restrict(cfg.points)
    _emit(dump_spectrum(compute_spectrum(trace, cfg.schemata, cfg.value_sets, cfg.pair_sets)), cfg.out)
    return 0


def cmd_model(args) -> int:
    cfg = Config.from_args(args)
    _, traces = _load_traces(args.traces, cfg.points)
    spectra = [compute_spectrum(t, cfg.schemata, cfg.value_sets, cfg.pair_sets) for t in traces]
    model = build_model(spectra)
    out = cfg.out or "carrot.model"
    Path(out).write_text(dump_model(model), encoding="utf-8")
    print(f"model of {model.runs_absorbed} run(s): {len(model.live)} live invariant(s) -> {out}")
    return 0


def cmd_diff(args) -> int:
    try:
        model = load_model(Path(args.model).read_text(encoding="utf-8"))
    except ModelFormatError as exc:
        raise CliError(f"{args.model}: {exc}") from None
    bad = read_trace_file(args.trace).restrict(args.points)
    # the bad run is summarized with the model's own settings
    spectrum = compute_spectrum(bad, model.schemata, model.value_sets, model.pair_sets)
    report = diff(model, spectrum)
    _emit(render_report(report, args.format), args.out)
    return 0


def cmd_converge(args) -> int:
    cfg = Config.from_args(args)
    _, traces = _load_traces(args.traces, cfg.points)
    spectra = [compute_spectrum(t, cfg.schemata, cfg.value_sets, cfg.pair_sets) for t in traces]
    curve = convergence_curve(spectra)
    idx = steady_state(curve, cfg.window)
    _emit(curve.to_csv(), cfg.out)
    print(f"steady_state={'none' if idx is None else idx}")
    return 0


def _add_analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--schemata", default="all",
                   help="comma-separated subset of eq,sum,lessthan,const (default: all)")
    p.add_argument("--no-vsets", action="store_true", help="do not track value sets")
    p.add_argument("--no-psets", action="store_true", help="do not track pair-value sets")
    _add_points_flag(p)


def _add_points_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--points", help="only analyze matching program points, e.g. ENTER, "
                   "a function name, or a label glob (comma-separated)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG, description="Locate faults by contrasting invariant spectra of good and bad runs."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trace", help="run a minilang program over input cases and write traces")
    p.add_argument("program")
    p.add_argument("cases")
    p.add_argument("--out", help="output directory (default: traces)")
    p.add_argument("--entry", help="entry function (default: case file's entry line, else first function)")
    p.add_argument("--label", choices=[r.value for r in LabelRule], default="oracle")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("spectrum", help="print the spectrum of one trace")
    p.add_argument("trace")
    _add_analysis_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("model", help="build a model from good-run traces")
    p.add_argument("traces", nargs="+", help="trace files or glob patterns")
    _add_analysis_flags(p)
    p.add_argument("--out", help="model file (default: carrot.model)")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("diff", help="report what a bad run violates in a model")
    p.add_argument("model")
    p.add_argument("trace")
    p.add_argument("--format", choices=["text", "structured"], default="text")
    _add_points_flag(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("converge", help="print the convergence curve of good runs as CSV")
    p.add_argument("traces", nargs="+", help="trace files or glob patterns, in absorption order")
    _add_analysis_flags(p)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW,
                   help=f"zero-falsification window for the steady state (default: {DEFAULT_WINDOW})")
    p.add_argument("--out", help="write the CSV here instead of stdout")
    p.set_defaults(func=cmd_converge)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IncompatibleError as exc:
        print(f"{PROG}: error: incompatible inputs: {exc}", file=sys.stderr)
        return 1
    except (CliError, TraceError, MinilangError, CaseError, IncompatibleError,
            ModelFormatError, ValueError, OSError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
