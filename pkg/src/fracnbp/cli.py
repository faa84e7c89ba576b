"""Command-line front end: ``fracnbp {pmf,simulate,validate,levy,pgf,residual}``.

Every command that writes ``--out FILE`` also writes ``FILE``'s stem plus
``.manifest.json``. ``fracnbp --from-manifest M`` re-runs the recorded command.

Exit codes: 0 success, 1 usage error, 2 analytic gate violation (or the series
cannot reach its accuracy), 3 event budget exceeded, 4 validation failed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .distributions import (
    adaptive_table,
    distorder_pgf,
    distorder_pmf_table,
    polya_pgf,
    polya_pmf_table,
    sfnb_levy_measure,
    sfnb_pgf,
    sfnb_pmf_table,
)
from .errors import AccuracyLoss, DivergentSeries, EventBudgetExceeded, MaxTermsExceeded
from .multivariate import multi_levy_measure, multi_pgf, multi_pmf_table, simplex_grid
from .params import DistOrderParams, MultiParams, PolyaParams, SfnbParams
from .residuals import governing_residual
from .simulation import DEFAULT_EVENT_BUDGET, RngStream, TimeGrid, sample_multi_sfnb, sample_sfnb, simulate_paths
from .validation import DEFAULT_TV_THRESHOLD, gof_report
from .wright import SeriesConfig

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_GATE, EXIT_BUDGET, EXIT_FAIL = 0, 1, 2, 3, 4

VARIANTS = {
    "pmf": ("sfnb", "distorder", "polya", "multivariate"),
    "simulate": ("sfnb", "multivariate"),
    "validate": ("sfnb", "multivariate"),
    "levy": ("sfnb", "multivariate"),
    "pgf": ("sfnb", "distorder", "polya", "multivariate"),
    "residual": ("sfnb", "distorder", "multivariate"),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# parameters


def _fmt(x):
    return format(float(x), ".17g")


def _lambdas(text):
    return tuple(float(v) for v in str(text).split(","))


def build_params(args, variant=None):
    variant = variant or args.variant
    lam = _lambdas(args.lam)
    if variant != "multivariate" and len(lam) != 1:
        raise UsageError("--lambda takes a single value for univariate variants")
    if variant == "sfnb":
        return SfnbParams(args.beta, args.alpha, args.p, lam[0])
    if variant == "distorder":
        return DistOrderParams(args.beta1, args.beta2, args.a1, args.a2, args.alpha, args.p, lam[0])
    if variant == "polya":
        return PolyaParams(args.polya_u, lam[0], args.p, args.d, args.beta)
    if variant == "multivariate":
        return MultiParams(args.beta, args.alpha, lam)
    raise UsageError(f"unknown variant {variant!r}")


def build_cfg(args):
    return SeriesConfig(args.abs_tol, args.max_terms, args.cancellation_guard)


def _check_variant(args):
    allowed = VARIANTS[args.command]
    if args.variant not in allowed:
        raise UsageError(f"`{args.command}` supports --variant {', '.join(allowed)}")


# ---------------------------------------------------------------------------
# output


def _manifest_path(out):
    out = Path(out)
    return out.with_name(out.stem + ".manifest.json")


def _atomic_write(files):
    """Write ``{path: text}`` via temporary files so nothing partial is left."""
    staged = []
    try:
        for path, text in files.items():
            path = Path(path)
            fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            staged.append((tmp, path))
        for tmp, path in staged:
            os.replace(tmp, path)
    finally:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.remove(tmp)


def manifest(args):
    params = {k: v for k, v in vars(args).items() if k not in ("from_manifest", "func")}
    return {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "params": params,
        "seed": getattr(args, "seed", None),
        "cfg": build_cfg(args).to_dict(),
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _emit(args, files, stdout_text):
    """Write ``files`` plus the manifest when ``--out`` is set, else print."""
    if args.out:
        files = dict(files)
        files[_manifest_path(args.out)] = json.dumps(manifest(args), indent=2, sort_keys=True) + "\n"
        _atomic_write(files)
    else:
        sys.stdout.write(stdout_text)


def _csv(header, rows, footer=None):
    lines = [",".join(header)]
    lines += [",".join(r) for r in rows]
    if footer:
        lines.append(footer)
    return "\n".join(lines) + "\n"


def _table_csv(table, value_name="prob"):
    if table.support.ndim == 1:
        header = ["n", value_name]
        rows = [[str(int(n)), _fmt(v)] for n, v in zip(table.support, table.probs)]
    else:
        header = [f"n{i + 1}" for i in range(table.ndim)] + [value_name]
        rows = [[str(int(x)) for x in n] + [_fmt(v)] for n, v in zip(table.support, table.probs)]
    return _csv(header, rows, f"# truncation_mass={_fmt(table.truncation_mass)}")


# ---------------------------------------------------------------------------
# commands


def cmd_pmf(args):
    params, cfg = build_params(args), build_cfg(args)
    n_max = 0 if args.t == 0 else args.n_max
    if args.variant == "sfnb":
        table = sfnb_pmf_table(n_max, args.t, params, cfg, method=args.method)
    elif args.variant == "distorder":
        table = distorder_pmf_table(n_max, args.t, params, cfg, method=args.method)
    elif args.variant == "polya":
        table = polya_pmf_table(n_max, args.t, params, cfg)
    else:
        table = multi_pmf_table(n_max, args.t, params, cfg, method=args.method)
    text = _table_csv(table)
    _emit(args, {args.out: text} if args.out else {}, text)
    return EXIT_OK


def _path_rows(path, path_id=None):
    vals = path.values.reshape(len(path.times), -1)
    lead = [] if path_id is None else [str(path_id)]
    return [lead + [_fmt(t)] + [str(int(v)) for v in row] for t, row in zip(path.times, vals)]


def cmd_simulate(args):
    params = build_params(args)
    grid = TimeGrid.uniform(args.T, args.steps)
    paths = simulate_paths(params, grid, args.paths, args.seed, args.max_events)
    cols = ["value"] if args.variant == "sfnb" else [f"v{j + 1}" for j in range(params.dim)]
    if args.per_path:
        if not args.out:
            raise UsageError("--per-path needs --out to name the files")
        out = Path(args.out)
        files = {
            out.with_name(f"{out.stem}.path{i}{out.suffix}"): _csv(["t"] + cols, _path_rows(p))
            for i, p in enumerate(paths)
        }
        _emit(args, files, "")
        return EXIT_OK
    rows = [r for i, p in enumerate(paths) for r in _path_rows(p, i)]
    text = _csv(["path_id", "t"] + cols, rows)
    _emit(args, {args.out: text} if args.out else {}, text)
    return EXIT_OK


def _oracle_table(variant, t, params, cfg, target):
    if variant == "sfnb":
        x = params.series_ratio()
        if x >= 1:
            raise DivergentSeries(f"lambda^beta/alpha = {x:.6g} >= 1: analytic series diverges; use `simulate`")
        return adaptive_table(lambda n: sfnb_pmf_table(n, t, params, cfg, "auto"), target, 64, 4096)
    return adaptive_table(lambda n: multi_pmf_table(n, t, params, cfg, "auto"), target, 16, 256)


def cmd_validate(args):
    params, cfg = build_params(args), build_cfg(args)
    expect = argparse.Namespace(**vars(args))
    for name in ("beta", "alpha", "p", "lam"):
        override = getattr(args, f"expect_{name}")
        if override is not None:
            setattr(expect, name, override)
    oracle_params = build_params(expect)
    oracle = _oracle_table(args.variant, args.t, oracle_params, cfg, args.tv_threshold / 20)
    rng = RngStream(args.seed)
    if args.variant == "sfnb":
        samples = sample_sfnb(params, args.t, args.samples, rng)
    else:
        samples = sample_multi_sfnb(params, args.t, args.samples, rng)
    report = gof_report(
        samples, oracle, args.tv_threshold, params={"simulated": params.to_dict(), "oracle": oracle_params.to_dict(), "t": args.t},
        seed=args.seed,
    )
    text = report.to_json(indent=2) + "\n"
    if args.out:
        _emit(args, {args.out: text}, "")
    sys.stdout.write(text)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK if report.pass_ else EXIT_FAIL


def cmd_levy(args):
    params, cfg = build_params(args), build_cfg(args)
    if args.variant == "sfnb":
        header = ["k", "nu"]
        rows = [[str(k), _fmt(sfnb_levy_measure(k, params, cfg, args.method))] for k in range(1, args.k_max + 1)]
    else:
        header = [f"n{j + 1}" for j in range(params.dim)] + ["nu"]
        rows = [
            [str(int(v)) for v in n] + [_fmt(multi_levy_measure(n, params, cfg))]
            for n in simplex_grid(params.dim, args.k_max)[1:]
        ]
    text = _csv(header, rows)
    _emit(args, {args.out: text} if args.out else {}, text)
    return EXIT_OK


def _u_values(text, dim=None):
    out = []
    for item in str(text).split(","):
        vec = tuple(float(v) for v in item.split(":"))
        if dim is None and len(vec) != 1:
            raise UsageError("univariate --u entries are single numbers")
        if dim is not None and len(vec) not in (1, dim):
            raise UsageError(f"multivariate --u entries need {dim} colon-separated values")
        out.append(vec[0] if dim is None else (vec * dim if len(vec) == 1 else vec))
    return out


def cmd_pgf(args):
    params = build_params(args)
    if args.variant == "multivariate":
        us = _u_values(args.u, params.dim)
        header = [f"u{j + 1}" for j in range(params.dim)] + ["pgf"]
        rows = [[_fmt(v) for v in u] + [_fmt(multi_pgf(u, args.t, params))] for u in us]
    else:
        fn = {"sfnb": sfnb_pgf, "distorder": distorder_pgf, "polya": polya_pgf}[args.variant]
        us = _u_values(args.u)
        if any(abs(u) > 1 for u in us):
            raise UsageError("u must lie in [-1, 1]")
        header = ["u", "pgf"]
        rows = [[_fmt(u), _fmt(fn(u, args.t, params))] for u in us]
    text = _csv(header, rows)
    _emit(args, {args.out: text} if args.out else {}, text)
    return EXIT_OK


def cmd_residual(args):
    params, cfg = build_params(args), build_cfg(args)
    if args.variant == "multivariate":
        grid = simplex_grid(params.dim, args.n_max)
        header = [f"n{j + 1}" for j in range(params.dim)] + ["residual"]
        rows = [
            [str(int(v)) for v in n] + [_fmt(governing_residual("multivariate", n, args.t, params, cfg, args.method))]
            for n in grid
        ]
    else:
        header = ["n", "residual"]
        rows = [
            [str(n), _fmt(governing_residual(args.variant, n, args.t, params, cfg, args.method))]
            for n in range(args.n_max + 1)
        ]
    text = _csv(header, rows)
    _emit(args, {args.out: text} if args.out else {}, text)
    return EXIT_OK


COMMANDS = {
    "pmf": cmd_pmf,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
    "levy": cmd_levy,
    "pgf": cmd_pgf,
    "residual": cmd_residual,
}


# ---------------------------------------------------------------------------
# parser


def _model_parent(default_variant="sfnb"):
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("model")
    g.add_argument("--variant", default=default_variant)
    g.add_argument("--beta", type=float, default=0.5, help="stability index in (0, 1]")
    g.add_argument("--alpha", type=float, default=2.0, help="gamma rate")
    g.add_argument("--lambda", dest="lam", default="1", help="Poisson rate; comma list for multivariate")
    g.add_argument("--p", type=float, default=1.0, help="gamma shape per unit time")
    g.add_argument("--beta1", type=float, default=0.3)
    g.add_argument("--beta2", type=float, default=0.7)
    g.add_argument("--a1", type=float, default=0.5)
    g.add_argument("--a2", type=float, default=0.5)
    g.add_argument("--polya-u", type=float, default=0.5, help="Polya-type rate multiplier")
    g.add_argument("--d", type=float, default=1.0, help="Polya-type power")
    g = p.add_argument_group("series")
    g.add_argument("--abs-tol", type=float, default=1e-14)
    g.add_argument("--max-terms", type=int, default=2000)
    g.add_argument("--cancellation-guard", type=float, default=1e8)
    p.add_argument("--out", help="output file; a manifest is written next to it")
    return p


def build_parser():
    parser = _Parser(prog="fracnbp", description="Space-fractional negative binomial processes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--from-manifest", metavar="FILE", help="re-run the command recorded in FILE")
    parser.add_argument("--out", dest="top_out", help="override the output file with --from-manifest")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    model = _model_parent()

    p = sub.add_parser("pmf", parents=[model], help="probability table")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=30, help="largest n (total count for multivariate)")
    p.add_argument("--method", choices=("series", "contour", "auto"), default="series")

    p = sub.add_parser("simulate", parents=[model], help="sample paths")
    p.add_argument("--T", type=float, default=1.0, help="horizon")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--paths", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-events", type=float, default=DEFAULT_EVENT_BUDGET)
    p.add_argument("--per-path", action="store_true", help="one CSV per path instead of long format")

    p = sub.add_parser("validate", parents=[model], help="simulate and compare with the analytic pmf")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--tv-threshold", type=float, default=DEFAULT_TV_THRESHOLD)
    p.add_argument("--expect-beta", type=float, help="oracle parameter override")
    p.add_argument("--expect-alpha", type=float)
    p.add_argument("--expect-p", type=float)
    p.add_argument("--expect-lambda", dest="expect_lam")

    p = sub.add_parser("levy", parents=[model], help="discrete Levy measure")
    p.add_argument("--k-max", type=int, default=20, help="largest jump (total for multivariate)")
    p.add_argument("--method", choices=("series", "contour", "auto"), default="auto")

    p = sub.add_parser("pgf", parents=[model], help="probability generating function")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--u", default="0,0.3,0.7,1", help="comma list; multivariate entries as u1:u2:...")

    p = sub.add_parser("residual", parents=[model], help="governing-equation residuals")
    p.add_argument("--t", type=float, default=2.5)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--method", choices=("series", "contour", "auto"), default="series")
    return parser


def _resolve_seed(args):
    if hasattr(args, "seed") and args.seed is None:
        args.seed = int(os.environ.get("FRACNBP_SEED", "0"))


def _from_manifest(path, out_override):
    try:
        data = json.loads(Path(path).read_text())
        args = argparse.Namespace(**data["params"])
        args.command = data["command"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read manifest {path}: {exc}") from exc
    if out_override:
        args.out = out_override
    return args


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.from_manifest:
            args = _from_manifest(args.from_manifest, args.top_out)
        elif args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        else:
            del args.top_out
        args.from_manifest = None
        _resolve_seed(args)
        if args.command not in COMMANDS:
            raise UsageError(f"unknown command {args.command!r}")
        _check_variant(args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"fracnbp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DivergentSeries, AccuracyLoss, MaxTermsExceeded) as exc:
        hint = ""
        if not isinstance(exc, DivergentSeries) and getattr(args, "method", "auto") != "auto":
            hint = "; --method auto falls back to pgf inversion"
        print(f"fracnbp: {exc}{hint}", file=sys.stderr)
        return EXIT_GATE
    except EventBudgetExceeded as exc:
        print(f"fracnbp: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"fracnbp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
