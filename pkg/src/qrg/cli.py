"""Command-line interface: ``qrg params|sample|explore|limit|experiment``.

Exit status is 0 on success, 1 for invalid input (bad flags, parameters or
fixture files) and 2 for unexpected internal errors.
"""
from __future__ import annotations

import argparse
import inspect
import json
import sys
import traceback
from pathlib import Path

import numpy as np

from . import experiments as ex
from .errors import DomainError
from .exploration import component_stats, explore_lazy, explore_realization
from .graph import GraphRealization, sample_realization
from .limit import LimitParams, limit_sample
from .params import critical_lambda, mean_interval_length, window_params
from .seeding import replica_rng, resolve_seed


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _model_flags(p, n_default=None):
    p.add_argument("--n", type=int, default=n_default, help="number of vertices")
    p.add_argument("--c", type=float, default=1.0, help="circle length")
    p.add_argument("--a", type=float, default=0.0, help="window parameter")


def _seed_flag(p):
    p.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                   help="master seed (falls back to $QRG_SEED, then 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qrg", description="Critical random graphs on circles: sampling, "
                     "exploration walks, limit excursions and experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("params", help="print lambda and link intensity for (c, a, n)")
    _model_flags(p, n_default=1000)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("sample", help="sample a realization and print it as JSON")
    _model_flags(p, n_default=10)
    _seed_flag(p)
    p.add_argument("--output", type=Path)

    p = sub.add_parser("explore", help="run the exploration and emit JSON lines")
    _model_flags(p, n_default=10)
    _seed_flag(p)
    p.add_argument("--fixture", type=Path, help="replay a realization JSON file instead of sampling")
    p.add_argument("--engine", choices=("lazy", "realization"), default="lazy")
    p.add_argument("--budget", type=int, default=None, help="maximum steps (default: run to exhaustion)")
    p.add_argument("--output", type=Path, help="write step records here; summary goes to stdout")
    p.add_argument("--gzip", action="store_true", help="gzip the step records file")

    p = sub.add_parser("limit", help="simulate the reflected limit path and its excursions")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=None, help="default: critical value for c")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--horizon", type=float, default=8.0)
    p.add_argument("--mark-rate-factor", type=float, default=None, help="default: lam / c")
    p.add_argument("--min-length", type=float, default=None, help="default: 5 dt")
    p.add_argument("--include-incomplete", action="store_true")
    _seed_flag(p)
    p.add_argument("--csv", type=Path, help="write the path as CSV (s, w, b)")
    p.add_argument("--output", type=Path, help="write the excursion JSON here instead of stdout")
    p.add_argument("--figures", type=Path, help="directory for a PNG of the path")

    p = sub.add_parser("experiment", help="run an experiment and emit its report")
    p.add_argument("name", choices=sorted(ex.EXPERIMENTS))
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--replicas", type=int)
    _seed_flag(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--output", type=Path)
    p.add_argument("--figures", type=Path, help="directory for PNG figures")
    p.add_argument("--A", dest="A", type=_floats)
    p.add_argument("--deltas", type=_floats)
    p.add_argument("--s-grid", dest="s_grid", type=_floats)
    p.add_argument("--ns", type=_ints)
    p.add_argument("--levels", type=_floats)
    p.add_argument("--ys", type=_floats)
    p.add_argument("--delta", type=float)
    p.add_argument("--sandwich-replicas", dest="sandwich_replicas", type=int)
    p.add_argument("--states", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--kernels", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--horizon", type=float)
    p.add_argument("--mark-rate-factor", dest="mark_rate_factor", type=float)
    return parser


def fixture_load(path) -> GraphRealization:
    """Read and validate a realization JSON file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DomainError(f"cannot read fixture {path}: {exc.strerror}") from exc
    return GraphRealization.from_json(text)


def _write(text: str, path: Path | None, out) -> None:
    if path is None:
        out.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def _cmd_params(args, out):
    params = window_params(args.c, args.a, args.n)
    doc = {
        "c": args.c, "a": args.a, "n": args.n,
        "lambda": params.lam,
        "lambda_critical": critical_lambda(args.c),
        "mean_interval_length": mean_interval_length(args.c),
        "link_intensity": params.link_rate,
        "window_factor": params.window_factor,
    }
    if args.format == "json":
        out.write(json.dumps(doc) + "\n")
    else:
        out.write(f"lambda = {params.lam:.8f}\n")
        out.write(f"link intensity per pair = {params.link_rate:.8g}\n")
        out.write(f"mean interval length = {doc['mean_interval_length']:.8f}\n")
        out.write(f"window factor = {params.window_factor:.8f}\n")


def _cmd_sample(args, out):
    seed = resolve_seed(args.seed)
    real = sample_realization(window_params(args.c, args.a, args.n), replica_rng(seed, 0))
    _write(real.to_json() + "\n", args.output, out)


def _cmd_explore(args, out):
    if args.budget is not None and args.budget < 1:
        raise DomainError("budget must be at least 1")
    seed = resolve_seed(args.seed)
    if args.fixture is not None:
        real = fixture_load(args.fixture)
        path, _ = explore_realization(real, args.budget)
    elif args.engine == "realization":
        real = sample_realization(window_params(args.c, args.a, args.n), replica_rng(seed, 0))
        path, _ = explore_realization(real, args.budget)
    else:
        budget = args.budget if args.budget is not None else 2**62
        path = explore_lazy(window_params(args.c, args.a, args.n), replica_rng(seed, 0), budget)
    spans = component_stats(path)
    summary = {
        "steps": path.steps,
        "exhausted": path.exhausted,
        "component_sizes": [s.size for s in spans],
        "component_surplus": [s.surplus for s in spans],
        "last_complete": bool(spans[-1].complete) if spans else True,
        "ordered_sizes": sorted((s.size for s in spans), reverse=True),
    }
    if args.output is not None:
        path.write_jsonl(args.output, compress=args.gzip)
        out.write(json.dumps({"summary": summary}) + "\n")
    else:
        if args.gzip:
            raise DomainError("--gzip needs --output")
        for rec in path.records():
            out.write(json.dumps(rec) + "\n")
        out.write(json.dumps({"summary": summary}) + "\n")


def _cmd_limit(args, out):
    seed = resolve_seed(args.seed)
    lam = critical_lambda(args.c) if args.lam is None else args.lam
    lp = LimitParams(a=args.a, lam=lam, c=args.c, dt=args.dt, horizon=args.horizon,
                     mark_rate_factor=args.mark_rate_factor)
    if args.min_length is not None and args.min_length < args.dt:
        raise DomainError("min-length must be at least dt")
    path, exc = limit_sample(lp, replica_rng(seed, 0), args.min_length, args.include_incomplete)
    if args.csv is not None:
        path.write_csv(args.csv)
    _write(exc.to_json() + "\n", args.output, out)
    if args.figures is not None:
        from .plotting import render_limit_path

        render_limit_path(path, exc, args.figures)


_EXPERIMENT_FLAGS = ("n", "c", "a", "replicas", "A", "deltas", "s_grid", "ns", "levels", "ys",
                     "delta", "sandwich_replicas", "states", "eps", "n_max", "kernels")


def _cmd_experiment(args, out):
    fn = ex.EXPERIMENTS[args.name]
    accepted = inspect.signature(fn).parameters
    kwargs = {"seed": resolve_seed(args.seed), "workers": args.workers}
    for flag in _EXPERIMENT_FLAGS:
        value = getattr(args, flag)
        if value is None:
            continue
        if flag not in accepted:
            raise DomainError(f"experiment {args.name} does not take --{flag.replace('_', '-')}")
        kwargs[flag] = value
    limit_flags = {k: getattr(args, k) for k in ("dt", "horizon", "mark_rate_factor")
                   if getattr(args, k) is not None}
    if limit_flags:
        if "limit" not in accepted:
            raise DomainError(f"experiment {args.name} does not take limit-process flags")
        c = kwargs.get("c", 1.0)
        base = {"a": kwargs.get("a", accepted["a"].default), "lam": critical_lambda(c), "c": c,
                "dt": 1e-3, "horizon": 10.0}
        base.update(limit_flags)
        kwargs["limit"] = LimitParams(**base)
    if args.workers < 1:
        raise DomainError("workers must be at least 1")
    if "replicas" in kwargs and kwargs["replicas"] < 2:
        raise DomainError("replicas must be at least 2")
    if "n" in kwargs and kwargs["n"] < 1:
        raise DomainError("n must be at least 1")
    rep = fn(**kwargs)
    text = {"text": rep.to_text, "json": rep.to_json, "csv": rep.to_csv}[args.format]()
    _write(text, args.output, out)
    if args.figures is not None:
        from .plotting import render_report

        render_report(rep, args.figures)


COMMANDS = {
    "params": _cmd_params,
    "sample": _cmd_sample,
    "explore": _cmd_explore,
    "limit": _cmd_limit,
    "experiment": _cmd_experiment,
}


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return 1
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 1
    try:
        COMMANDS[args.command](args, out)
    except (DomainError, ValueError) as exc:
        err.write(f"qrg: error: {exc}\n")
        return 1
    except Exception:  # noqa: BLE001
        err.write("qrg: internal error\n")
        traceback.print_exc(file=err)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
