"""Escape-link experiment: splice one edge from a dead-end node into the
giant SCC and measure how the dead-end's rank and block mass respond across
damping values.  The block's captive mass can only shrink once it leaks, and
it shrinks more the stronger the damping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bowtie import BlockDecomposition, BowtieLabeling
from .graph import GraphHandle, with_edge
from .pagerank import PageRankConfig, pagerank


@dataclass(frozen=True)
class ExperimentRow:
    damping: float
    rank_without_link: int
    rank_with_link: int
    block_mass_without: float
    block_mass_with: float


@dataclass(frozen=True)
class ExperimentReport:
    source: int                    # the dead-end node gaining the escape link
    target: int                    # giant-SCC node it now points to
    block_nodes: tuple[int, ...]   # the source's recurrent block, pre-link
    rows: tuple[ExperimentRow, ...]


def run_link_experiment(g: GraphHandle, labels: BowtieLabeling,
                        blocks: BlockDecomposition, source: int, target: int,
                        damping_values, tolerance: float = 1e-12) -> ExperimentReport:
    """Recompute ranks with and without the edge ``source -> target``.

    ``source`` must sit in a recurrent block and ``target`` in the giant SCC.
    Rank positions are 1-based with ties broken toward the smaller node id;
    block masses sum the original block's nodes under both vectors.
    """
    block_id = blocks.block_of(source)
    if block_id < 0:
        raise ValueError(f"node {source} is not in a recurrent block")
    if target not in labels.giant_scc:
        raise ValueError(f"node {target} is not in the giant SCC")

    block = np.asarray(sorted(blocks.recurrent_blocks[block_id]), dtype=np.int64)
    g_linked = with_edge(g, source, target)

    rows = []
    for c in (float(v) for v in damping_values):
        cfg = PageRankConfig(damping=c, tolerance=tolerance)
        before = pagerank(g, cfg)
        after = pagerank(g_linked, cfg)
        rows.append(ExperimentRow(
            damping=c,
            rank_without_link=before.rank_position(source),
            rank_with_link=after.rank_position(source),
            block_mass_without=float(before.values[block].sum()),
            block_mass_with=float(after.values[block].sum()),
        ))
    return ExperimentReport(source=source, target=target,
                            block_nodes=tuple(int(v) for v in block),
                            rows=tuple(rows))


def click_rank(clicks: dict[int, float], node: int, n: int) -> int:
    """Rank of ``node`` by click count over all n nodes (missing count as 0),
    same tie rule as score ranks."""
    counts = np.zeros(n)
    for k, v in clicks.items():
        counts[int(k)] = float(v)
    better = int(np.count_nonzero(counts > counts[node]))
    better += int(np.count_nonzero((counts == counts[node])[:node]))
    return better + 1
