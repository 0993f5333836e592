"""Command-line interface: ``betagraph {fit,simulate,sample,analyze-foodweb}``.

Exit codes: 0 success, 1 usage or I/O error, 2 the MLE does not exist or the
solver did not converge.
"""

from __future__ import annotations

import argparse
import os
import sys
from importlib import resources

import numpy as np

from betagraph.fisher import build_v, fisher_csv
from betagraph.graph import (
    BetaVector,
    GraphError,
    degree_sequence,
    format_edge_list,
    parse_degrees,
    parse_edge_list,
    sample_graph,
)
from betagraph.inference import inference_csv
from betagraph.montecarlo import LSpec, Scenario, beta_grid, export_table1, qq_csv, run_scenario
from betagraph.solver import FitConfig, Status, solve_mle

EXIT_OK, EXIT_USAGE, EXIT_NONEXISTENT = 0, 1, 2
SEED_ENV = "BETAGRAPH_SEED"
FOODWEB = "chesapeake_foodweb.txt"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _alpha(text):
    a = float(text)
    if not 0.0 < a < 1.0:
        raise argparse.ArgumentTypeError("alpha must be in (0, 1)")
    return a


def _positive_float(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _positive_int(text):
    x = int(text)
    if x < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return x


def _seed(text):
    x = int(text, 0)
    if not 0 <= x < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return x


def _pairs(text):
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip().strip("()")
        if not chunk:
            continue
        i, j = (int(x) for x in chunk.split(","))
        out.append((i, j))
    if not out:
        raise argparse.ArgumentTypeError("no pairs given")
    return out


def _add_solver_flags(p):
    p.add_argument("--tol", type=_positive_float, default=FitConfig.tol)
    p.add_argument("--max-iter", type=_positive_int, default=FitConfig.max_iter)
    p.add_argument("--blowup", type=_positive_float, default=FitConfig.blowup)


def _add_output(p):
    p.add_argument("-o", "--output", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="betagraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit beta-hat and Wald intervals from an edge list or degrees")
    p.add_argument("input", help="edge-list file, or degree file with --degrees ('-' for stdin)")
    p.add_argument("--degrees", action="store_true", help="input holds one degree per line")
    p.add_argument("--alpha", type=_alpha, default=0.05)
    p.add_argument("--table2-compat", action="store_true", help="add a sqrt(v_ii) column")
    p.add_argument("--dump-fisher", metavar="PATH", help="write V and its approximate inverse as CSV")
    _add_solver_flags(p)
    _add_output(p)

    p = sub.add_parser("simulate", help="coverage study over a (t, L) grid")
    p.add_argument("--t", type=int, nargs="+", required=True)
    p.add_argument("--l", nargs="+", default=["zero"], choices=[s.value for s in LSpec])
    p.add_argument("--reps", type=_positive_int, default=1000)
    p.add_argument("--seed", type=_seed, default=None, help=f"master seed (default ${SEED_ENV} or 0)")
    p.add_argument("--pairs", type=_pairs, default=None, help='contrast pairs, e.g. "1,50;25,26"')
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--alpha", type=_alpha, default=0.05)
    p.add_argument("--trace", metavar="PATH", help="per-replication log")
    p.add_argument("--qq", metavar="PATH", help="Q-Q data for the z-statistics")
    _add_solver_flags(p)
    _add_output(p)

    p = sub.add_parser("sample", help="draw a graph from the beta-model")
    p.add_argument("--t", type=int, default=None)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--l", choices=[s.value for s in LSpec], help="beta_i = i L / t")
    src.add_argument("--beta-const", type=float, help="same beta for every vertex")
    src.add_argument("--beta-file", help="one beta per line")
    p.add_argument("--seed", type=_seed, default=None)
    _add_output(p)

    p = sub.add_parser("analyze-foodweb", help="fit the bundled Chesapeake Bay food web")
    p.add_argument("--alpha", type=_alpha, default=0.05)
    _add_solver_flags(p)
    _add_output(p)
    return parser


def _resolve_seed(flag):
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return _seed(env)
    except (ValueError, argparse.ArgumentTypeError):
        raise UsageError(f"{SEED_ENV}={env!r} is not a valid seed") from None


def _write(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read_lines(path):
    if path == "-":
        return sys.stdin.read().splitlines()
    with open(path) as fh:
        return fh.read().splitlines()


def _fit_and_report(d, args, compat):
    """Fit, write the inference table, and return ``(exit_code, fit)``."""
    cfg = FitConfig(tol=args.tol, max_iter=args.max_iter, blowup=args.blowup)
    fit = solve_mle(d, cfg)
    if fit.status is Status.NONEXISTENT:
        print(f"MLE does not exist ({fit.reason})", file=sys.stderr)
        return EXIT_NONEXISTENT, fit
    if fit.status is Status.MAXITER:
        print(f"MLE did not converge within {cfg.max_iter} iterations "
              f"(residual {fit.residual:.3g})", file=sys.stderr)
        return EXIT_NONEXISTENT, fit
    v = build_v(fit.beta_hat)
    if getattr(args, "dump_fisher", None):
        _write(fisher_csv(v), args.dump_fisher)
    _write(inference_csv(fit, v, level=1.0 - args.alpha, compat=compat), args.output)
    return EXIT_OK, fit


def cmd_fit(args) -> int:
    lines = _read_lines(args.input)
    d = parse_degrees(lines) if args.degrees else degree_sequence(parse_edge_list(lines))
    if d.t < 3:
        raise UsageError("fitting needs at least 3 vertices")
    code, _ = _fit_and_report(d, args, args.table2_compat)
    return code


def cmd_simulate(args) -> int:
    seed = _resolve_seed(args.seed)
    cfg = FitConfig(tol=args.tol, max_iter=args.max_iter, blowup=args.blowup)
    scenarios = []
    for t in args.t:
        if t < 3:
            raise UsageError(f"--t {t}: need t >= 3")
        for l in args.l:
            try:
                scenarios.append(Scenario(t, LSpec(l), n_reps=args.reps, level=1.0 - args.alpha,
                                          master_seed=seed, contrast_pairs=args.pairs, fit_config=cfg))
            except GraphError as exc:
                raise UsageError(str(exc)) from None
    reports = [run_scenario(s, workers=args.threads) for s in scenarios]
    _write(export_table1(reports), args.output)
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write("t,l_spec,rep,seed,status,iters,residual\n")
            for r in reports:
                for line in r.trace_csv().splitlines()[1:]:
                    fh.write(f"{r.scenario.t},{r.scenario.label},{line}\n")
    if args.qq:
        with open(args.qq, "w") as fh:
            fh.write("t,l_spec,sample,normal_quantile,z\n")
            for r in reports:
                fh.write("".join(line + "\n" for line in qq_csv(r).splitlines()[1:]))
    return EXIT_OK


def cmd_sample(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.beta_file:
        try:
            vals = [float(x) for x in _read_lines(args.beta_file) if x.strip() and not x.startswith("#")]
            beta = BetaVector(np.array(vals))
        except ValueError as exc:
            raise UsageError(f"bad beta file: {exc}") from None
        if args.t is not None and args.t != beta.t:
            raise UsageError(f"--t {args.t} does not match {beta.t} betas in file")
    else:
        if args.t is None or args.t < 2:
            raise UsageError("--t >= 2 is required")
        if args.beta_const is not None:
            beta = BetaVector(np.full(args.t, args.beta_const))
        else:
            if args.t < 3:
                raise UsageError("--l needs t >= 3")
            beta = beta_grid(args.t, LSpec(args.l))
    if beta.t < 2:
        raise UsageError("need at least 2 vertices")
    g = sample_graph(beta, seed)
    _write(format_edge_list(g, comment=f"beta-model sample, seed={seed}"), args.output)
    return EXIT_OK


def load_foodweb():
    try:
        text = resources.files("betagraph.data").joinpath(FOODWEB).read_text()
    except (FileNotFoundError, ModuleNotFoundError) as exc:
        raise OSError(f"bundled food-web dataset missing: {exc}") from exc
    return parse_edge_list(text.splitlines())


def cmd_analyze_foodweb(args) -> int:
    g = load_foodweb()
    d = degree_sequence(g)
    code, fit = _fit_and_report(d, args, compat=True)
    if code != EXIT_OK:
        return code
    top = sorted(np.argsort(-d.values, kind="stable")[:4] + 1)
    print("largest-degree vertices:", file=sys.stderr)
    for i in top:
        print(f"  vertex {i}: degree {d[int(i)]}, beta_hat {fit.beta_hat[int(i)]:.3f}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "fit": cmd_fit,
    "simulate": cmd_simulate,
    "sample": cmd_sample,
    "analyze-foodweb": cmd_analyze_foodweb,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, GraphError, OSError) as exc:
        print(f"betagraph {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
