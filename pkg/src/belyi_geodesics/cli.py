"""``belyi`` command line.

Exit codes: 0 success, 1 usage error (including an alpha-cap violation),
2 a report assertion failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Any, Sequence

from . import bounds, experiments, stern
from .cycles import CycleCapError, enumerate_cycles, is_disconnecting
from .rotation_graph import DEFAULT_SEED, RotationGraph, sample_graph

EXIT_OK, EXIT_USAGE, EXIT_ASSERT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def round12(obj: Any) -> Any:
    """Round every float to 12 significant digits."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round12(v) for v in obj]
    return obj


def flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(obj, dict):
        return [kv for k, v in obj.items() for kv in flatten(v, f"{prefix}{k}.")]
    if isinstance(obj, (list, tuple)):
        return [kv for i, v in enumerate(obj) for kv in flatten(v, f"{prefix}{i}.")]
    return [(prefix[:-1], obj)]


def _fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def to_csv(rows: Sequence[dict[str, Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if rows:
        keys = list(rows[0])
        w.writerow(keys)
        for r in rows:
            w.writerow([_fmt(r.get(k)) for k in keys])
    return buf.getvalue()


def _emit(args: argparse.Namespace, payload: Any, csv_rows: Sequence[dict[str, Any]] | None = None,
          csv_text: str | None = None) -> None:
    if args.format == "json":
        text = json.dumps(round12(payload), indent=1) + "\n"
    elif csv_text is not None:
        text = csv_text
    else:
        rows = csv_rows if csv_rows is not None else [{"key": k, "value": v} for k, v in flatten(payload)]
        text = to_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summary(msg: str) -> None:
    print(msg, file=sys.stderr)


def _report(args: argparse.Namespace, rep: experiments.ExperimentReport) -> int:
    data = round12(rep.to_dict())
    if not args.no_save:
        root = args.results_dir or os.environ.get(experiments.RESULTS_ENV, "results")
        rep_rounded = experiments.ExperimentReport(**{**data})
        path = rep_rounded.save(root)
        _summary(f"saved {path}")
    payload = {k: data[k] for k in ("experiment", "params", "seed", "summary", "assertions")}
    _emit(args, payload)
    status = "PASS" if rep.passed else "FAIL"
    _summary(f"{rep.experiment}: {status} " + " ".join(f"{k}={int(v)}" for k, v in rep.assertions.items()))
    return EXIT_OK if rep.passed else EXIT_ASSERT


# --- subcommands -------------------------------------------------------------


def cmd_gen_graph(args: argparse.Namespace) -> int:
    g = sample_graph(args.n, args.seed)
    rows = [{"vertex": v, "s0": r[0], "s1": r[1], "s2": r[2],
             "m0": g.mate[r[0]], "m1": g.mate[r[1]], "m2": g.mate[r[2]]} for v, r in enumerate(g.rotation)]
    if args.format == "json":
        text = json.dumps(g.to_dict(), separators=(",", ":")) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        _emit(args, None, rows)
    _summary(f"gen-graph: {g.vertex_count} vertices, {len(g.edges)} edges, genus {g.genus():g}")
    return EXIT_OK


def cmd_cycles(args: argparse.Namespace) -> int:
    g = RotationGraph.load(args.graph) if args.graph else sample_graph(args.n, args.seed)
    gid = args.graph_id or (args.graph or f"n{args.n}-s{args.seed}")
    cycles = sorted(enumerate_cycles(g, args.max_len, unsafe=args.unsafe), key=lambda c: (c.length, c.flat))
    rows = [{"graph_id": gid, "length": c.length, "stubs": c.label(),
             "disconnecting": bool(is_disconnecting(g, c))} for c in cycles]
    _emit(args, rows, rows)
    _summary(f"cycles: {len(rows)} cycles of length <= {args.max_len}")
    return EXIT_OK


def cmd_poisson(args: argparse.Namespace) -> int:
    rep = experiments.poisson_fit(args.n, args.samples, args.seed, args.i_max, threads=args.threads, unsafe=args.unsafe)
    return _report(args, rep)


def cmd_systole(args: argparse.Namespace) -> int:
    rep = experiments.empirical_systole(args.n, args.samples, args.seed, args.max_len,
                                        min_length=args.min_length, unsafe=args.unsafe, threads=args.threads)
    return _report(args, rep)


def cmd_ordered(args: argparse.Namespace) -> int:
    rep = experiments.ordered_geodesics(args.n, args.samples, args.seed, args.max_len, args.k,
                                        unsafe=args.unsafe, threads=args.threads)
    return _report(args, rep)


def cmd_genus_sweep(args: argparse.Namespace) -> int:
    rep = experiments.genus_independence(args.ns, args.samples, args.seed, args.k, threads=args.threads)
    return _report(args, rep)


def cmd_disconnect_sweep(args: argparse.Namespace) -> int:
    rep = experiments.disconnection_sweep(args.vertex_counts, args.samples, args.seed, threads=args.threads)
    return _report(args, rep)


def cmd_intersect_sweep(args: argparse.Namespace) -> int:
    rep = experiments.intersection_sweep(args.vertex_counts, args.samples, args.seed, threads=args.threads)
    return _report(args, rep)


def cmd_trace_stats(args: argparse.Namespace) -> int:
    rep = experiments.trace_stats(args.N, args.mode, args.samples, args.seed)
    return _report(args, rep)


def cmd_bounds(args: argparse.Namespace) -> int:
    if args.which == "upper":
        res = bounds.systole_upper_series(args.kmax, args.weight)
        other = bounds.systole_upper(args.kmax, _other_weight(args.weight))
    else:
        res = bounds.systole_lower_series(args.kmax, args.weight, args.conditioning)
        other = bounds.systole_lower(args.kmax, _other_weight(args.weight), args.conditioning)
    payload = {"bound": args.which, "kmax": args.kmax, "weight": args.weight, **res.to_dict(),
               "value_other_weight": other}
    if args.which == "lower":
        payload["conditioning"] = args.conditioning
    rows = [{"k": t["k"], "p": t["p"], "survival": t["survival"], "length_term": t["length_term"],
             "contribution": t["contribution"], "partial_sum": s}
            for t, s in zip(payload["terms"], payload["partial_sums"])]
    _emit(args, payload, round12(rows))
    _summary(f"bounds {args.which}: value={res.value:.12g}")
    return EXIT_OK


def _other_weight(w: str) -> str:
    return "alternative" if w == "printed" else "printed"


def cmd_stern(args: argparse.Namespace) -> int:
    if args.table:
        rows = stern.moment_table(args.steps)
        _emit(args, rows, round12(rows))
        _summary(f"stern: moment table for steps 1..{args.steps}")
        return EXIT_OK
    row = stern.stern_row(args.steps, (args.a, args.b))
    values = [int(x) for x in row.values]
    payload = {"step": args.steps, "seed": [args.a, args.b], "row": values}
    _emit(args, payload, csv_text=",".join(map(str, values)) + "\n")
    _summary(f"stern: step {args.steps}, {len(values)} entries")
    return EXIT_OK


def cmd_growth(args: argparse.Namespace) -> int:
    gb = bounds.growth_lower_bound(args.block)
    payload = {"block": gb.block, "factor": gb.factor, "method": gb.method,
               "radical": bounds.paper_radical_value()}
    _emit(args, payload, [payload])
    _summary(f"growth: block {gb.block} factor {gb.factor:.12g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"RNG seed (default {DEFAULT_SEED})")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker processes")
    common.add_argument("--results-dir", help=f"report directory (default ${experiments.RESULTS_ENV} or ./results)")
    common.add_argument("--no-save", action="store_true", help="do not persist experiment reports")

    p = _Parser(prog="belyi", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("gen-graph", parents=[common], help="sample one oriented cubic graph")
    s.add_argument("--n", type=int, required=True, help="graph has 2n vertices")
    s.set_defaults(func=cmd_gen_graph)

    s = sub.add_parser("cycles", parents=[common], help="enumerate short cycles")
    s.add_argument("--n", type=int, default=50)
    s.add_argument("--graph", help="graph JSON file instead of sampling")
    s.add_argument("--graph-id")
    s.add_argument("--max-len", type=int, required=True)
    s.add_argument("--unsafe", action="store_true", help="allow max-len above the alpha cutoff")
    s.set_defaults(func=cmd_cycles)

    s = sub.add_parser("poisson-check", parents=[common], help="cycle counts vs Poisson")
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--i-max", type=int, default=5)
    s.add_argument("--unsafe", action="store_true")
    s.set_defaults(func=cmd_poisson)

    s = sub.add_parser("systole", parents=[common], help="empirical systole")
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--max-len", type=int)
    s.add_argument("--min-length", type=int, default=1, help="ignore cycles shorter than this")
    s.add_argument("--unsafe", action="store_true")
    s.set_defaults(func=cmd_systole)

    s = sub.add_parser("ordered", parents=[common], help="k shortest compatible geodesics")
    s.add_argument("--n", type=int, default=500)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--max-len", type=int)
    s.add_argument("--unsafe", action="store_true")
    s.set_defaults(func=cmd_ordered)

    s = sub.add_parser("genus-sweep", parents=[common], help="ordered lengths across graph sizes")
    s.add_argument("--ns", type=int, nargs="+", default=[250, 500, 1000, 2000])
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--k", type=int, default=3)
    s.set_defaults(func=cmd_genus_sweep)

    for name, func, help_ in (("disconnect-sweep", cmd_disconnect_sweep, "disconnecting-cycle fraction vs size"),
                              ("intersect-sweep", cmd_intersect_sweep, "multi-component pair fraction vs size")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("--vertex-counts", type=int, nargs="+", default=[64, 256, 1024])
        s.add_argument("--samples", type=int, default=200)
        s.set_defaults(func=func)

    s = sub.add_parser("bounds", parents=[common], help="systole series bounds")
    s.add_argument("which", choices=("upper", "lower"))
    s.add_argument("--kmax", type=int)
    s.add_argument("--weight", choices=("printed", "alternative"), default="printed")
    s.add_argument("--conditioning", choices=("all", "exclude_uniform"), default="all")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("stern", parents=[common], help="Stern row or moment table")
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--a", type=int, default=1)
    s.add_argument("--b", type=int, default=0)
    s.add_argument("--table", action="store_true", help="moment table for steps 1..STEPS")
    s.set_defaults(func=cmd_stern)

    s = sub.add_parser("trace-stats", parents=[common], help="trace statistics over words")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    s.add_argument("--samples", type=int, default=10_000)
    s.set_defaults(func=cmd_trace_stats)

    s = sub.add_parser("growth", parents=[common], help="enumerated growth-rate bound")
    s.add_argument("--block", type=int, required=True)
    s.set_defaults(func=cmd_growth)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.cmd == "bounds" and args.kmax is None:
            args.kmax = bounds.UPPER_KMAX if args.which == "upper" else bounds.LOWER_KMAX
        return args.func(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except CycleCapError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
