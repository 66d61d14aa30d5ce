"""Command-line interface: solve, verify, trails, gen, bench.

Exit codes are a total function of the outcome class: 0 ok, 1 internal
assertion, 2 parse error, 3 size-guard violation, 4 infeasible input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
import zlib
from pathlib import Path

from . import generate
from .construct import ConstructionError, PreconditionError, construct_trails
from .graph import (
    EdgeSet,
    Graph,
    GraphParseError,
    feasibility_violation,
    is_feasible,
    parse_edge_set,
    parse_graph,
    render_edge_set,
    render_graph,
)
from .oracle import DEFAULT_MAX_EDGES, OracleGuardError, exact_max, exact_max_tiebreak
from .search import SearchConfig, SolveReport, maximal_solve, ptas_solve

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_PARSE = 2
EXIT_GUARD = 3
EXIT_INFEASIBLE = 4

DEFAULT_SEED = 0
DEFAULT_EPSILONS = (1.0, 0.5, 0.25)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise GraphParseError(f"cannot read {path}: {exc.strerror}", 0) from exc


def _load_graph(path: str) -> Graph:
    return parse_graph(_read_text(path))


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_solve(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    start_ns = time.perf_counter_ns()
    if args.algo == "ptas":
        cfg = SearchConfig(
            epsilon=args.epsilon,
            node_order=args.seed,
            verify_flips=not args.no_verify,
        )
        solution, report = ptas_solve(g, cfg)
    elif args.algo == "maximal":
        solution = maximal_solve(g, args.seed)
        report = SolveReport(
            algorithm="maximal",
            epsilon=None,
            size=len(solution),
            flips=len(solution),
            trail_lengths={1: len(solution)} if len(solution) else {},
            micros=(time.perf_counter_ns() - start_ns) // 1000,
            verified=is_feasible(g, solution),
        )
    else:  # exact
        solution = exact_max(g, max_edges=args.oracle_limit)
        report = SolveReport(
            algorithm="exact",
            epsilon=None,
            size=len(solution),
            flips=0,
            trail_lengths={},
            micros=(time.perf_counter_ns() - start_ns) // 1000,
            verified=is_feasible(g, solution),
        )
    _write(args.out, render_edge_set(solution))
    report_json = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if args.report:
        _write(args.report, report_json)
    else:
        sys.stdout.write(report_json)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    solution = parse_edge_set(g, _read_text(args.solution))
    violation = feasibility_violation(g, solution)
    if violation is None:
        print(json.dumps({"feasible": True, "size": len(solution)}))
        return EXIT_OK
    kind, detail = violation
    if kind == "degree":
        print(json.dumps({"feasible": False, "reason": "degree", "node": detail}))
    else:
        print(
            json.dumps(
                {"feasible": False, "reason": "triangle", "nodes": list(detail)}
            )
        )
    return EXIT_INFEASIBLE


def _dot_colors(g: Graph, apx: EdgeSet, opt: EdgeSet) -> dict[int, str]:
    colors = {}
    for eid in range(g.edge_count):
        in_a = eid in apx
        in_o = eid in opt
        if in_a and in_o:
            colors[eid] = "red:blue"
        elif in_a:
            colors[eid] = "red"
        elif in_o:
            colors[eid] = "blue"
        else:
            colors[eid] = "gray"
    return colors


def _emit_dot(g: Graph, apx: EdgeSet, opt: EdgeSet, trails) -> str:
    """Graphviz view of apx ^ opt: red = apx-only, blue = opt-only, red/blue
    doubled = both; constructed trails dashed and labeled."""
    trail_of: dict[int, int] = {}
    for idx, trail in enumerate(trails, start=1):
        for eid in trail.edge_ids:
            trail_of[eid] = idx
    colors = _dot_colors(g, apx, opt)
    lines = ["graph solution {"]
    for u in range(g.node_count):
        lines.append(f"  {u};")
    for eid, (u, v) in enumerate(g.edges):
        attrs = [f'color="{colors[eid]}"']
        if eid in trail_of:
            attrs.append("style=dashed")
            attrs.append(f'label="P{trail_of[eid]}"')
        lines.append(f"  {u} -- {v} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_trails(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    apx = parse_edge_set(g, _read_text(args.apx))
    if not is_feasible(g, apx):
        print(json.dumps({"error": "apx is not feasible"}), file=sys.stderr)
        return EXIT_INFEASIBLE
    if args.opt:
        opt = parse_edge_set(g, _read_text(args.opt))
        if not is_feasible(g, opt):
            print(json.dumps({"error": "opt is not feasible"}), file=sys.stderr)
            return EXIT_INFEASIBLE
    else:
        opt = exact_max_tiebreak(g, apx, max_edges=args.oracle_limit)
    events: list[dict] = []
    trails = construct_trails(g, apx, opt, on_chunk=events.append)
    for trail in trails:
        print(trail.format_walk())
    if args.trace:
        _write(args.trace, "".join(json.dumps(e, sort_keys=True) + "\n" for e in events))
    if args.dot:
        _write(args.dot, _emit_dot(g, apx, opt, trails))
    print(
        json.dumps(
            {
                "trails": len(trails),
                "apx_size": len(apx),
                "opt_size": len(opt),
                "chunks": len(events),
            }
        ),
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    model = args.model
    params = args.params
    try:
        if model == "gnp":
            if len(params) != 2:
                raise ValueError("gnp needs n and p")
            g = generate.gnp(int(params[0]), float(params[1]), args.seed)
        elif model == "cycle":
            if len(params) != 1:
                raise ValueError("cycle needs n")
            g = generate.cycle(int(params[0]))
        elif model == "complete":
            if len(params) != 1:
                raise ValueError("complete needs n")
            g = generate.complete(int(params[0]))
        elif model == "bowtie-chain":
            if len(params) != 1:
                raise ValueError("bowtie-chain needs k")
            g = generate.bowtie_chain(int(params[0]))
        elif model == "trailneed":
            if params:
                raise ValueError("trailneed takes no parameters")
            g, matching, _ = generate.trailneed()
            if args.matching_out:
                _write(args.matching_out, render_edge_set(matching))
        else:
            raise ValueError(f"unknown model {model!r}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    _write(args.out, render_graph(g))
    return EXIT_OK


def _row_seed(master: int, instance: str, algo: str) -> int:
    return master ^ zlib.crc32(f"{instance}:{algo}".encode())


BENCH_COLUMNS = [
    "instance",
    "n",
    "m",
    "algo",
    "epsilon",
    "size",
    "opt_size",
    "ratio",
    "flips",
    "micros",
    "status",
]


def _bench_rows(
    files: list[Path], epsilons: list[float], seed: int, oracle_limit: int, timing: bool
) -> list[dict]:
    rows: list[dict] = []
    for path in files:
        name = path.name
        try:
            g = parse_graph(path.read_text())
        except (GraphParseError, OSError) as exc:
            rows.append({"instance": name, "status": f"error: {exc}"})
            continue
        opt_size: int | None = None
        algos: list[tuple[str, float | None]] = [("ptas", eps) for eps in epsilons]
        algos += [("maximal", None), ("exact", None)]
        for algo, eps in algos:
            row: dict = {
                "instance": name,
                "n": g.node_count,
                "m": g.edge_count,
                "algo": algo,
                "epsilon": "" if eps is None else eps,
                "status": "ok",
            }
            start_ns = time.perf_counter_ns()
            try:
                if algo == "ptas":
                    cfg = SearchConfig(
                        epsilon=eps, node_order=_row_seed(seed, name, f"ptas{eps}")
                    )
                    solution, report = ptas_solve(g, cfg)
                    row["size"] = len(solution)
                    row["flips"] = report.flips
                elif algo == "maximal":
                    solution = maximal_solve(g, _row_seed(seed, name, "maximal"))
                    row["size"] = len(solution)
                    row["flips"] = len(solution)
                else:
                    solution = exact_max(g, max_edges=oracle_limit)
                    row["size"] = len(solution)
                    row["flips"] = 0
                    opt_size = len(solution)
            except OracleGuardError:
                row["status"] = "guard"
            except Exception as exc:  # recorded per row, never fatal
                row["status"] = f"error: {exc}"
            if timing and row["status"] == "ok":
                row["micros"] = (time.perf_counter_ns() - start_ns) // 1000
            rows.append(row)
        if opt_size:
            for row in rows:
                if row["instance"] == name and row.get("size") is not None:
                    row["opt_size"] = opt_size
                    row["ratio"] = f"{row['size'] / opt_size:.6f}"
    return rows


def _render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({col: row.get(col, "") for col in BENCH_COLUMNS})
    return buf.getvalue()


def _render_bench_plot(rows: list[dict], out_path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labeled: dict[str, list[float]] = {}
    for row in rows:
        if row.get("ratio"):
            algo = row["algo"]
            label = f"ptas e={row['epsilon']}" if algo == "ptas" else algo
            labeled.setdefault(label, []).append(float(row["ratio"]))
    if not labeled:
        return
    labels = sorted(labeled)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.boxplot([labeled[k] for k in labels], tick_labels=labels)
    ax.set_ylabel("size / optimum")
    ax.set_title("approximation ratio by algorithm")
    ax.axhline(1.0, color="gray", linewidth=0.5)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def cmd_bench(args: argparse.Namespace) -> int:
    corpus = Path(args.corpus)
    files = sorted(p for p in corpus.glob("*.txt") if p.is_file())
    epsilons = [float(x) for x in args.epsilons.split(",")] if args.epsilons else list(
        DEFAULT_EPSILONS
    )
    rows = _bench_rows(files, epsilons, args.seed, args.oracle_limit, args.timing)
    text = _render_csv(rows)
    out = args.out or "bench.csv"
    _write(out, text)
    if not args.no_plot and out not in (None, "-"):
        _render_bench_plot(rows, Path(out).with_suffix(".png"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trifree",
        description="maximum triangle-free 2-matching toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="compute a solution for a graph file")
    p_solve.add_argument("graph")
    p_solve.add_argument("--algo", choices=["ptas", "maximal", "exact"], required=True)
    p_solve.add_argument("--epsilon", type=float, default=None)
    p_solve.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_solve.add_argument("--out", default=None, help="solution file (default stdout)")
    p_solve.add_argument("--report", default=None, help="JSON report file")
    p_solve.add_argument("--no-verify", action="store_true")
    p_solve.add_argument("--oracle-limit", type=int, default=DEFAULT_MAX_EDGES)
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="check a solution file for feasibility")
    p_verify.add_argument("graph")
    p_verify.add_argument("solution")
    p_verify.set_defaults(func=cmd_verify)

    p_trails = sub.add_parser(
        "trails", help="construct the augmenting trails between apx and opt"
    )
    p_trails.add_argument("graph")
    p_trails.add_argument("apx")
    p_trails.add_argument("--opt", default=None, help="opt solution file (default: oracle)")
    p_trails.add_argument("--trace", default=None, help="JSONL chunk trace file")
    p_trails.add_argument("--dot", default=None, help="DOT output file")
    p_trails.add_argument("--oracle-limit", type=int, default=DEFAULT_MAX_EDGES)
    p_trails.set_defaults(func=cmd_trails)

    p_gen = sub.add_parser("gen", help="generate an instance file")
    p_gen.add_argument(
        "model", choices=["gnp", "cycle", "complete", "bowtie-chain", "trailneed"]
    )
    p_gen.add_argument("params", nargs="*")
    p_gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_gen.add_argument("--out", default=None)
    p_gen.add_argument(
        "--matching-out", default=None, help="with trailneed: write the stored matching"
    )
    p_gen.set_defaults(func=cmd_gen)

    p_bench = sub.add_parser("bench", help="run all algorithms over a corpus directory")
    p_bench.add_argument("corpus")
    p_bench.add_argument("--epsilons", default=None, help="comma-separated list")
    p_bench.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_bench.add_argument("--out", default=None, help="CSV path (default bench.csv)")
    p_bench.add_argument("--oracle-limit", type=int, default=DEFAULT_MAX_EDGES)
    p_bench.add_argument(
        "--timing",
        action="store_true",
        help="fill the micros column (breaks byte-identical reruns)",
    )
    p_bench.add_argument("--no-plot", action="store_true")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "solve":
        if args.algo == "ptas" and args.epsilon is None:
            parser.error("--epsilon is required with --algo ptas")
        if args.algo != "ptas" and args.epsilon is not None:
            parser.error("--epsilon only applies to --algo ptas")
    try:
        return args.func(args)
    except GraphParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OracleGuardError as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except PreconditionError as exc:
        print(f"infeasible input: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConstructionError, AssertionError) as exc:
        print(f"internal assertion: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
