#!/usr/bin/env python3
"""espart: monotone partitions, grid packing and dynamic LIS from the shell.

Subcommands:
    decompose   partition a sequence into monotone parts (JSON out)
    bench       run the algorithm x generator x size x seed matrix (CSV out)
    verify      check a partition file against a sequence file
    gridlab     build | measure | render segment families on m x m tables
    dynlis      replay an operation stream against the dynamic structure

Exit codes: 0 ok, 1 input error, 2 invalid partition or bench row.
"""

import argparse
import logging
import os
import sys

_app_dir = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, _app_dir)

from config import (
    DEFAULT_KAPPA, DEFAULT_DEPTH, DEFAULT_REBUILD_FACTOR,
    BENCH_DEFAULT_ALGOS, BENCH_DEFAULT_GENS, BENCH_DEFAULT_NS, BENCH_DEFAULT_SEEDS,
    C_DYN_CEILING, C_GREEDY, EXIT_OK, EXIT_INPUT_ERROR, EXIT_INVALID, SEED_ENV,
    default_seed,
)
from logger import NullLogger, RunLogger
from core import (
    EspartError, InputError, partition_to_json, read_partition, read_sequence,
    validate_partition,
)
from generators import generate
from grid_packing import (
    ADVERSARIES, best_chain, best_path_score, build_family, measure_ratio,
    parse_table,
)
from dynamic_lis import DynConfig, DynLisInstance
from partitioner import ALGORITHMS, ceil_sqrt, decompose, partition_count_bound_check
from replay_protocol import ReplayProtocol

log = logging.getLogger("espart")


def _csv_list(text, cast=str):
    try:
        return [cast(x.strip()) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad list: {text!r}") from None


def _int_list(text):
    return _csv_list(text, int)


def _dyn_config(args):
    return DynConfig(args.kappa, args.depth, args.rebuild_factor)


def _write_out(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e}") from e


# --- Subcommands ---

def cmd_decompose(args, logger):
    seq = read_sequence(args.input) if args.input else generate(args.gen)
    config = _dyn_config(args) if args.algo == "dynamic" else None
    partition, stats = decompose(seq, args.algo, config)
    report = validate_partition(seq, partition)
    block = stats.to_json()
    n = len(seq)
    block["parts_over_sqrt_n"] = round(stats.parts_count / n ** 0.5, 4) if n else 0.0
    ceiling = C_DYN_CEILING if args.algo == "dynamic" else C_GREEDY
    within = partition_count_bound_check(partition, ceiling)
    block["ceiling"] = ceiling
    block["within_ceiling"] = within
    _write_out(args.out, partition_to_json(partition, block) + "\n")
    logger.log("decompose_done", {
        "algo": args.algo, "n": n, "parts": stats.parts_count,
        "ops": stats.total_ops, "valid": report.ok,
        "ceil_sqrt_n": ceil_sqrt(n), "ceiling": ceiling, "within_ceiling": within,
    })
    if not within:
        log.warning("%s used %d parts, above %d * ceil(sqrt(%d))",
                    args.algo, stats.parts_count, ceiling, n)
    if not report.ok:
        print(str(report), file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def cmd_bench(args, logger):
    from bench import fit_rows, format_csv, run_matrix

    config = _dyn_config(args)
    rows = run_matrix(args.algos, args.gens, args.ns, args.seeds, config)
    _write_out(args.csv, format_csv(rows))
    invalid = sum(1 for r in rows if not r.valid)
    if args.fit:
        for column in ("ops", "parts_count"):
            for algo, slope in fit_rows(rows, column).items():
                print(f"slope,{algo},{column},{slope:.4f}")
    logger.log("bench_done", {"rows": len(rows), "invalid": invalid,
                              "algos": args.algos, "ns": args.ns})
    return EXIT_INVALID if invalid else EXIT_OK


def cmd_verify(args, logger):
    seq = read_sequence(args.input)
    partition = read_partition(args.partition)
    report = validate_partition(seq, partition)
    print(str(report))
    logger.log("verify_done", {"n": len(seq), "ok": report.ok,
                               "violations": len(report.violations)})
    return EXIT_OK if report.ok else EXIT_INVALID


def _read_text(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}") from e


def cmd_gridlab(args, logger):
    if args.action == "build":
        family = build_family(args.m, args.kappa, args.leaf_span)
        lines = ["id,orientation,line,lo,hi"]
        for sid, seg in enumerate(family.segments):
            lines.append(f"{sid},{seg.orientation.value},{seg.line},{seg.lo},{seg.hi}")
        lines.append(f"# max_cover={family.max_cover}")
        _write_out(args.out, "\n".join(lines) + "\n")
        data = {"m": args.m, "segments": len(family), "max_cover": family.max_cover}
    elif args.action == "measure":
        report = measure_ratio(args.m, args.kappa, args.adversaries, args.trials, args.seed)
        lines = ["adversary,trials,max_ratio,mean_ratio,alpha"]
        for s in report.strategies:
            lines.append(f"{s.strategy},{s.trials},{s.max_ratio:.4f},{s.mean_ratio:.4f},{report.alpha}")
        _write_out(args.out, "\n".join(lines) + "\n")
        data = {"m": args.m, "max_ratio": report.max_ratio, "alpha": report.alpha}
    else:
        from render import render_table, save_png

        t = parse_table(_read_text(args.table))
        family = build_family(t.m, args.kappa)
        chain = best_chain(family, t)
        score, path = best_path_score(t)
        img = render_table(t, family, chain, path,
                           caption=f"score={score} chain={chain.value}")
        try:
            save_png(img, args.out)
        except OSError as e:
            raise InputError(f"cannot write {args.out}: {e}") from e
        data = {"m": t.m, "score": score, "chain": chain.value}
    logger.log("gridlab_done", dict(data, action=args.action))
    return EXIT_OK


def cmd_dynlis(args, logger):
    protocol = ReplayProtocol(DynLisInstance(_dyn_config(args)))
    text = _read_text(args.ops)
    out = []
    for line in text.splitlines():
        rsp = protocol.handle_line(line)
        if rsp is not None:
            out.append(rsp)
    _write_out(args.out, "".join(f"{r}\n" for r in out))
    logger.log("replay_done", protocol.stats())
    return EXIT_OK


# --- Parser ---

class _Parser(argparse.ArgumentParser):
    """Bad options are input errors (exit 1), not invalid results (exit 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _add_dyn_flags(p):
    p.add_argument("--kappa", type=float, default=DEFAULT_KAPPA)
    p.add_argument("--depth", type=int, choices=(1, 2), default=DEFAULT_DEPTH)
    p.add_argument("--rebuild-factor", type=float, default=DEFAULT_REBUILD_FACTOR)


def build_parser():
    parser = _Parser(prog="espart", description=__doc__.splitlines()[0])
    parser.add_argument("--log-dir", default=None, help="run log directory")
    parser.add_argument("--no-log", action="store_true", help="disable the JSONL run log")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="partition a sequence into monotone parts")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="sequence file, one integer per line")
    src.add_argument("--gen", help="generator spec, e.g. uniform_random:4096:seed=7")
    p.add_argument("--algo", choices=ALGORITHMS, default="greedy")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json",), default="json")
    _add_dyn_flags(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("bench", help="run the benchmark matrix")
    p.add_argument("--algos", type=_csv_list, default=list(BENCH_DEFAULT_ALGOS))
    p.add_argument("--gens", type=_csv_list, default=list(BENCH_DEFAULT_GENS))
    p.add_argument("--ns", type=_int_list, default=list(BENCH_DEFAULT_NS))
    p.add_argument("--seeds", type=_int_list, default=None)
    p.add_argument("--csv", default=None)
    p.add_argument("--fit", action="store_true", help="print log-log slopes per algorithm")
    _add_dyn_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="validate a partition against its sequence")
    p.add_argument("--input", required=True)
    p.add_argument("--partition", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gridlab", help="segment families and grid packing")
    p.add_argument("action", choices=("build", "measure", "render"))
    p.add_argument("--m", type=int, default=16)
    p.add_argument("--kappa", type=float, default=DEFAULT_KAPPA)
    p.add_argument("--leaf-span", type=int, default=1)
    p.add_argument("--adversaries", type=_csv_list, default=list(ADVERSARIES))
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--table", help="table file for render")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gridlab)

    p = sub.add_parser("dynlis", help="dynamic LIS operation streams")
    p.add_argument("action", choices=("replay",))
    p.add_argument("--ops", required=True, help="operation stream file")
    p.add_argument("--out", default=None)
    _add_dyn_flags(p)
    p.set_defaults(func=cmd_dynlis)
    return parser


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "seeds", "") is None:
        args.seeds = [default_seed()] if SEED_ENV in os.environ else list(BENCH_DEFAULT_SEEDS)
    if getattr(args, "seed", "") is None:
        args.seed = default_seed()
    if args.command == "gridlab" and args.action == "render" and not (args.table and args.out):
        parser.error("gridlab render needs --table and --out")

    logger = NullLogger() if args.no_log else RunLogger(args.log_dir)
    logger.log("run_started", {"command": args.command, "argv": list(argv or sys.argv[1:])})
    try:
        return args.func(args, logger)
    except (EspartError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        logger.log("input_error", {"command": args.command, "error": str(e)})
        return EXIT_INPUT_ERROR
    finally:
        logger.close()


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
