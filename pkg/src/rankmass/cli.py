"""Command-line front end.

One analysis per invocation; every CSV starts with comment lines recording
the tool version, the graph file hash, and the parameters, so runs are
reproducible and self-describing.  Numeric cells carry 17 significant digits
and round-trip through float parsing.

Exit codes: 0 success, 1 validation problem, 2 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import os
import sys

import numpy as np

from . import __version__
from .bowtie import (block_decomposition, bowtie_labeling, dual_path_out_nodes,
                     pure_out_nodes, strongly_connected_components)
from .errors import ConvergenceError
from .escc import V_MODES, cstar_solve, prop3_bounds
from .experiment import click_rank, run_link_experiment
from .graph import load_path
from .inscc import (derivative_at_one, derivative_at_zero, inscc_curve,
                    three_block_view)
from .limits import limit_vector
from .pagerank import PageRankConfig, damping_sweep, pagerank

USAGE_ERROR = 1
CONVERGENCE_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2; keep 1 for usage problems
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(USAGE_ERROR)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _file_hash(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


class CsvReport:
    """CSV with leading '#' comment lines; deterministic for fixed inputs."""

    def __init__(self, graph_path: str, params: dict):
        self.buffer = io.StringIO()
        self.buffer.write(f"# rankmass {__version__}\n")
        self.buffer.write(f"# graph: {graph_path} sha256={_file_hash(graph_path)}\n")
        rendered = " ".join(f"{k}={_fmt(v)}" for k, v in params.items())
        self.buffer.write(f"# params: {rendered}\n")
        self.writer = csv.writer(self.buffer, lineterminator="\n")

    def comment(self, text: str):
        self.buffer.write(f"# {text}\n")

    def row(self, values):
        self.writer.writerow([_fmt(v) for v in values])

    def save(self, out_path: str | None):
        text = self.buffer.getvalue()
        if out_path:
            with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _parse_grid(text: str) -> list[float]:
    try:
        start_s, stop_s, step_s = text.split(":")
        start, stop, step = float(start_s), float(stop_s), float(step_s)
    except ValueError:
        raise ValueError(f"grid must be START:STOP:STEP, got {text!r}") from None
    if not (0.0 <= start <= stop < 1.0):
        raise ValueError(f"grid must satisfy 0 <= START <= STOP < 1, got {text!r}")
    if step <= 0.0:
        raise ValueError("grid STEP must be positive")
    values = []
    k = 0
    while True:
        c = start + k * step
        if c > stop + 1e-12:
            break
        values.append(min(c, stop))
        k += 1
    return values


def _damping_arg(value: str) -> float:
    # ArgumentTypeError keeps the message verbatim in argparse's report
    try:
        c = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None
    if c == 1.0:
        raise argparse.ArgumentTypeError(
            "damping 1.0 is outside the iterative range; "
            "use the 'limit' command for the c -> 1 vector")
    if not 0.0 <= c < 1.0:
        raise argparse.ArgumentTypeError(f"damping must lie in [0, 1); got {value}")
    return c


def _structures(graph_path: str):
    g = load_path(graph_path)
    labels = bowtie_labeling(g)
    blocks = block_decomposition(g, labels)
    return g, labels, blocks


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_decompose(args) -> int:
    g, labels, blocks = _structures(args.graph)
    escc = blocks.escc
    pure = pure_out_nodes(labels, blocks)
    flagged = dual_path_out_nodes(g, labels, blocks)
    comps = strongly_connected_components(g)
    out_label_nodes = labels.out_nodes
    sccs_in_out = sum(1 for comp in comps if set(comp) <= out_label_nodes)
    sccs_in_pure = sum(1 for comp in comps if set(comp) <= pure)

    report = CsvReport(args.graph, {"command": "decompose"})
    report.comment(f"total_nodes={g.n}")
    report.comment(f"nodes_in_scc={len(labels.scc_nodes)}")
    report.comment(f"nodes_in_in={len(labels.in_nodes)}")
    report.comment(f"nodes_in_out={len(labels.out_nodes)}")
    report.comment(f"nodes_in_escc={len(escc)}")
    report.comment(f"nodes_in_pure_out={len(pure)}")
    report.comment(f"sccs_in_out={sccs_in_out}")
    report.comment(f"sccs_in_pure_out={sccs_in_pure}")
    report.row(["node_id", "bowtie_label", "in_escc", "in_pure_out",
                "recurrent_block_id", "feeds_dangling_and_deadend"])
    for v in range(g.n):
        report.row([v, labels.name_of(v), v in escc, v in pure,
                    blocks.block_of(v), v in flagged])
    report.save(args.out)
    return 0


def cmd_pagerank(args) -> int:
    g, _, _ = _structures(args.graph)
    cfg = PageRankConfig(damping=args.damping, tolerance=args.tol,
                         max_iterations=args.max_iter)
    result = pagerank(g, cfg)
    report = CsvReport(args.graph, {
        "command": "pagerank", "damping": cfg.damping, "tol": cfg.tolerance,
        "max_iter": cfg.resolved_max_iterations(),
        "iterations_used": result.iterations_used})
    report.row(["node_id", "score"])
    for v in range(g.n):
        report.row([v, float(result.values[v])])
    report.save(args.out)
    return 0


def cmd_sweep(args) -> int:
    g, labels, blocks = _structures(args.graph)
    grid = _parse_grid(args.grid)
    curve = damping_sweep(g, labels, blocks, grid, tolerance=args.tol)
    report = CsvReport(args.graph, {"command": "sweep", "grid": args.grid, "tol": args.tol})
    report.row(["c", "mass_IN", "mass_SCC", "mass_INSCC", "mass_ESCC",
                "mass_PUREOUT", "mass_DN", "mass_OTHER"])
    for c, m in curve:
        report.row([c, m.by_label["IN"], m.by_label["SCC"], m.in_scc, m.escc,
                    m.pure_out, m.dn, m.by_label["OTHER"]])
    report.save(args.out)
    return 0


def cmd_limit(args) -> int:
    g, labels, blocks = _structures(args.graph)
    result = limit_vector(g, blocks, tol=args.tol)
    report = CsvReport(args.graph, {"command": "limit", "tol": args.tol})
    report.row(["block_id", "size", "fair_share", "absorption_weight", "limit_mass"])
    for i in range(blocks.num_blocks):
        report.row([i, blocks.block_sizes[i], float(result.fair_shares[i]),
                    float(result.drain_weights[i]), float(result.block_masses[i])])
    report.save(args.out)
    if args.vector_out:
        vec = CsvReport(args.graph, {"command": "limit", "output": "vector"})
        vec.row(["node_id", "limit_score"])
        for v in range(g.n):
            vec.row([v, float(result.vector[v])])
        vec.save(args.vector_out)
    return 0


def cmd_inscc_curve(args) -> int:
    g, labels, _ = _structures(args.graph)
    view = three_block_view(g, labels, fold_other=args.fold_other,
                            force_dn_merge=args.force_dn_merge)
    grid = _parse_grid(args.grid)
    points = inscc_curve(view, grid, tol=args.tol)
    report = CsvReport(args.graph, {
        "command": "inscc-curve", "grid": args.grid, "tol": args.tol,
        "force_dn_merge": args.force_dn_merge, "alpha": view.alpha, "beta": view.beta})
    report.row(["c", "mass", "main_term", "correction", "d1_estimate", "d2_estimate"])
    for p in points:
        report.row([p.c, p.mass, p.main_term, p.correction,
                    "" if p.d1_estimate is None else p.d1_estimate,
                    "" if p.d2_estimate is None else p.d2_estimate])
    report.save(args.out)
    return 0


def cmd_inscc_derivatives(args) -> int:
    g, labels, _ = _structures(args.graph)
    view = three_block_view(g, labels, fold_other=args.fold_other,
                            force_dn_merge=args.force_dn_merge)
    at_zero = derivative_at_zero(view)
    at_one = derivative_at_one(view, tol=args.tol)
    report = CsvReport(args.graph, {
        "command": "inscc-derivatives", "tol": args.tol,
        "force_dn_merge": args.force_dn_merge})
    report.row(["quantity", "value"])
    report.row(["alpha", view.alpha])
    report.row(["beta", view.beta])
    report.row(["retention_p1", view.retention_p1()])
    report.row(["mass_slope_at_zero", at_zero.total])
    report.row(["mass_slope_at_one_exact", at_one.total])
    report.row(["mass_slope_at_one_approx", at_one.approx_total])
    report.row(["leakage", at_one.leakage])
    report.save(args.out)
    return 0


def cmd_escc_bounds(args) -> int:
    g, labels, blocks = _structures(args.graph)
    grid = _parse_grid(args.grid)
    bounds = prop3_bounds(g, labels, blocks, grid, tol=args.tol,
                          escc_only=args.exclude_pureout_transients)
    report = CsvReport(args.graph, {
        "command": "escc-bounds", "grid": args.grid, "tol": args.tol,
        "exclude_pureout_transients": args.exclude_pureout_transients,
        "p1": bounds.p1, "lambda1": bounds.lambda1, "gamma": bounds.gamma})
    report.row(["c", "mass", "lower_bound", "upper_bound", "cond_i", "cond_ii"])
    for row in bounds.rows:
        report.row([row.c, row.mass, row.lower, row.upper,
                    bounds.condition_i, bounds.condition_ii])
    report.save(args.out)
    return 0


def cmd_cstar(args) -> int:
    g, labels, blocks = _structures(args.graph)
    result = cstar_solve(g, labels, blocks, v_mode=args.mode,
                         tolerance=args.tol,
                         escc_only=args.exclude_pureout_transients)
    lines = [
        f"mode: {result.v_mode}",
        f"p1: {_fmt(result.p1)}",
        f"lambda1: {_fmt(result.lambda1)}",
        f"gamma: {_fmt(result.gamma)}",
        f"vT_norm: {_fmt(result.vt_norm)}",
        f"c1: {_fmt(result.c1)}",
        f"c2: {_fmt(result.c2)}",
        f"c_star: {_fmt(result.c_star)}",
        f"residual: {_fmt(result.residual)}",
        f"no_crossing: {_fmt(result.no_crossing)}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        report = CsvReport(args.graph, {
            "command": "cstar", "mode": result.v_mode,
            "c1": result.c1, "c2": result.c2, "c_star": result.c_star})
        report.row(["c", "mass", "target"])
        for c, mass, target in result.samples:
            report.row([c, mass, target])
        report.save(args.out)
    return 0


def cmd_link_experiment(args) -> int:
    g, labels, blocks = _structures(args.graph)
    damping_values = [_damping_arg(tok) for tok in args.damping_list.split(",") if tok]
    if not damping_values:
        raise ValueError("damping-list is empty")
    result = run_link_experiment(g, labels, blocks, args.source, args.target,
                                 damping_values, tolerance=args.tol)
    clicks = None
    if args.clicks:
        clicks = _read_clicks(args.clicks)

    report = CsvReport(args.graph, {
        "command": "link-experiment", "source": args.source, "target": args.target,
        "damping_list": args.damping_list})
    report.comment(f"block_nodes={list(result.block_nodes)}")
    header = ["c", "rank_without_link", "rank_with_link"]
    if clicks is not None:
        header.append("rank_by_clicks")
    header += ["block_mass_without", "block_mass_with"]
    report.row(header)
    for row in result.rows:
        cells = [row.damping, row.rank_without_link, row.rank_with_link]
        if clicks is not None:
            cells.append(click_rank(clicks, result.source, g.n))
        cells += [row.block_mass_without, row.block_mass_with]
        report.row(cells)
    report.save(args.out)
    return 0


def _read_clicks(path: str) -> dict[int, float]:
    clicks: dict[int, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#") or row[0] == "node_id":
                continue
            clicks[int(row[0])] = float(row[1])
    return clicks


# --------------------------------------------------------------------------
# argument wiring
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rankmass",
                     description="Bow-tie and damping-sensitivity analysis "
                                 "of sparse directed graphs")
    parser.add_argument("--version", action="version", version=f"rankmass {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid_default=None):
        p.add_argument("--graph", required=True, help="edge-list file")
        p.add_argument("--out", default=None, help="output CSV (default: stdout)")
        if grid_default:
            p.add_argument("--grid", default=grid_default,
                           help=f"damping grid START:STOP:STEP (default {grid_default})")

    p = sub.add_parser("decompose", help="bow-tie / block classification CSV")
    common(p)
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("pagerank", help="score vector at one damping value")
    common(p)
    p.add_argument("--damping", type=_damping_arg, default=0.85)
    p.add_argument("--tol", type=float, default=1e-12, help="L1 tolerance (default 1e-12)")
    p.add_argument("--max-iter", type=int, default=None,
                   help="iteration cap (default: geometric-rate estimate, min 1000)")
    p.set_defaults(fn=cmd_pagerank)

    p = sub.add_parser("sweep", help="component masses across a damping grid")
    common(p, grid_default="0:0.95:0.05")
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("limit", help="damping -> 1 limiting masses per dead-end block")
    common(p)
    p.add_argument("--vector-out", default=None, help="also write the full limit vector")
    p.add_argument("--tol", type=float, default=1e-14,
                   help="inner solve tolerance (default 1e-14)")
    p.set_defaults(fn=cmd_limit)

    p = sub.add_parser("inscc-curve", help="IN+SCC mass split along a damping grid")
    common(p, grid_default="0:0.99:0.01")
    p.add_argument("--force-dn-merge", action="store_true",
                   help="proceed despite OUT links into dangling nodes")
    p.add_argument("--fold-other", action="store_true",
                   help="treat nodes outside the bow-tie as OUT")
    p.add_argument("--tol", type=float, default=1e-14,
                   help="inner solve tolerance (default 1e-14)")
    p.set_defaults(fn=cmd_inscc_curve)

    p = sub.add_parser("inscc-derivatives", help="IN+SCC mass slopes at both ends")
    common(p)
    p.add_argument("--force-dn-merge", action="store_true")
    p.add_argument("--fold-other", action="store_true")
    p.add_argument("--tol", type=float, default=1e-14,
                   help="inner solve tolerance (default 1e-14)")
    p.set_defaults(fn=cmd_inscc_derivatives)

    p = sub.add_parser("escc-bounds", help="mass of the transient block with envelope bounds")
    common(p, grid_default="0.05:0.95:0.05")
    p.add_argument("--exclude-pureout-transients", action="store_true",
                   help="restrict the block to the extended component proper")
    p.add_argument("--tol", type=float, default=1e-14,
                   help="inner solve tolerance (default 1e-14)")
    p.set_defaults(fn=cmd_escc_bounds)

    p = sub.add_parser("cstar", help="damping value balancing mass share and retention")
    common(p)
    p.add_argument("--mode", choices=sorted(V_MODES), default="uniform")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--exclude-pureout-transients", action="store_true")
    p.set_defaults(fn=cmd_cstar)

    p = sub.add_parser("link-experiment",
                       help="rank shift from splicing an escape link out of a dead-end")
    common(p)
    p.add_argument("--source", type=int, required=True, help="node in a recurrent block")
    p.add_argument("--target", type=int, required=True, help="node in the giant SCC")
    p.add_argument("--damping-list", default="0.5,0.85,0.95")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--clicks", default=None,
                   help="optional CSV node_id,clicks for a click-rank column")
    p.set_defaults(fn=cmd_link_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConvergenceError as exc:
        sys.stderr.write(f"rankmass: non-convergence: {exc}\n")
        return CONVERGENCE_ERROR
    except (ValueError, OSError, argparse.ArgumentTypeError) as exc:
        sys.stderr.write(f"rankmass: error: {exc}\n")
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
