"""Bow-tie structure: strongly connected components, IN/SCC/OUT labels,
the extended component induced by dangling-node uniform rows, and the
recurrent/transient block split.

Components are numbered deterministically by their smallest member, and
every returned node collection is sorted, so downstream CSV output is
reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, Sequence

import numpy as np

from .errors import StructureError
from .graph import GraphHandle


class Label(IntEnum):
    IN = 0
    SCC = 1
    OUT = 2
    OTHER = 3


def tarjan_components(neighbors: Callable[[int], Sequence[int]], n: int) -> list[list[int]]:
    """Strongly connected components of an n-node digraph, iteratively.

    ``neighbors(v)`` returns the successor ids of ``v``.  Components come out
    sorted internally and ordered by smallest member.
    """
    index = np.full(n, -1, dtype=np.int64)
    lowlink = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=bool)
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        # frame: (node, iterator over successors)
        work = [(root, iter(neighbors(root)))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                w = int(w)
                if index[w] == -1:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(neighbors(w))))
                    advanced = True
                    break
                if on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comp.sort()
                components.append(comp)
    components.sort(key=lambda c: c[0])
    return components


def strongly_connected_components(g: GraphHandle) -> list[list[int]]:
    """SCCs of the raw link graph (no dangling-row augmentation)."""
    return tarjan_components(g.out_neighbors, g.n)


def w_components(g: GraphHandle) -> list[list[int]]:
    """SCCs of the graph induced by the transition matrix.

    Under row semantics a dangling node links to every node, so all nodes
    with a path to any dangling node collapse into one component; the rest
    decompose exactly as in the raw graph.  The uniform rows are never
    materialized.
    """
    if g.dangling.size == 0:
        return strongly_connected_components(g)
    reach_dangling = _reverse_closure(g, g.dangling)
    merged = sorted(int(i) for i in np.flatnonzero(reach_dangling))
    components = [merged]
    for comp in strongly_connected_components(g):
        if not reach_dangling[comp[0]]:
            components.append(comp)
    components.sort(key=lambda c: c[0])
    return components


def _reverse_closure(g: GraphHandle, seeds: np.ndarray) -> np.ndarray:
    """Boolean mask of nodes with a raw path into ``seeds`` (seeds included)."""
    mask = np.zeros(g.n, dtype=bool)
    mask[seeds] = True
    frontier = list(int(s) for s in seeds)
    while frontier:
        v = frontier.pop()
        for u in g.in_neighbors(v):
            u = int(u)
            if not mask[u]:
                mask[u] = True
                frontier.append(u)
    return mask


def _forward_closure(g: GraphHandle, seeds) -> np.ndarray:
    mask = np.zeros(g.n, dtype=bool)
    frontier = []
    for s in seeds:
        s = int(s)
        if not mask[s]:
            mask[s] = True
            frontier.append(s)
    while frontier:
        v = frontier.pop()
        for u in g.out_neighbors(v):
            u = int(u)
            if not mask[u]:
                mask[u] = True
                frontier.append(u)
    return mask


@dataclass(frozen=True, eq=False)
class BowtieLabeling:
    """Per-node IN/SCC/OUT/OTHER labels around the giant strongly connected
    component (largest; ties broken by smallest member id)."""

    labels: np.ndarray
    giant_scc_id: int
    components: tuple[tuple[int, ...], ...]

    @property
    def giant_scc(self) -> frozenset:
        return frozenset(self.components[self.giant_scc_id])

    def nodes_with(self, label: Label) -> frozenset:
        return frozenset(int(i) for i in np.flatnonzero(self.labels == label))

    @property
    def in_nodes(self) -> frozenset:
        return self.nodes_with(Label.IN)

    @property
    def scc_nodes(self) -> frozenset:
        return self.nodes_with(Label.SCC)

    @property
    def out_nodes(self) -> frozenset:
        return self.nodes_with(Label.OUT)

    @property
    def other_nodes(self) -> frozenset:
        return self.nodes_with(Label.OTHER)

    def name_of(self, i: int) -> str:
        return Label(self.labels[i]).name


def bowtie_labeling(g: GraphHandle) -> BowtieLabeling:
    """Classify every node as IN, SCC, OUT, or OTHER relative to the giant SCC."""
    if g.n == 0:
        raise StructureError("empty graph has no components")
    comps = strongly_connected_components(g)
    sizes = [len(c) for c in comps]
    giant_id = max(range(len(comps)), key=lambda i: (sizes[i], -comps[i][0]))
    giant = comps[giant_id]

    from_scc = _forward_closure(g, giant)
    to_scc = _reverse_closure(g, np.asarray(giant, dtype=np.int64))

    labels = np.full(g.n, int(Label.OTHER), dtype=np.int8)
    labels[to_scc] = int(Label.IN)
    labels[from_scc] = int(Label.OUT)
    labels[giant] = int(Label.SCC)
    labels.setflags(write=False)
    return BowtieLabeling(labels=labels, giant_scc_id=giant_id,
                          components=tuple(tuple(c) for c in comps))


def extended_scc(g: GraphHandle, labels: BowtieLabeling) -> frozenset:
    """The component of the transition-matrix graph containing the giant SCC.

    With dangling nodes present this swallows IN, the dangling nodes, and any
    of their predecessors on the OUT side.
    """
    member = min(labels.giant_scc)
    for comp in w_components(g):
        if member in comp:
            return frozenset(comp)
    raise AssertionError("giant SCC member missing from component cover")


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """Recurrent dead-end blocks plus the single transient remainder.

    ``recurrent_blocks`` are the closed components of the transition-matrix
    graph (each strongly connected, no mass leaving).  Everything else,
    including transient states on the pure-OUT side, forms ``transient_set``.
    ``permutation`` lists block nodes first, block by block, then transient
    nodes, realizing the block-triangular matrix layout.
    """

    recurrent_blocks: tuple[tuple[int, ...], ...]
    transient_set: frozenset
    escc: frozenset
    dangling: frozenset
    permutation: np.ndarray

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.recurrent_blocks)

    @property
    def num_blocks(self) -> int:
        return len(self.recurrent_blocks)

    def block_of(self, node: int) -> int:
        """Index of the recurrent block holding ``node``, or -1 if transient."""
        for k, block in enumerate(self.recurrent_blocks):
            if node in block:
                return k
        return -1


def _component_is_closed(g: GraphHandle, comp: Sequence[int]) -> bool:
    members = set(comp)
    for v in comp:
        if g.dangling_mask[v]:
            if len(members) != g.n:  # uniform row leaves unless the block is everything
                return False
            continue
        for w in g.out_neighbors(v):
            if int(w) not in members:
                return False
    return True


def block_decomposition(g: GraphHandle, labels: BowtieLabeling) -> BlockDecomposition:
    """Split nodes into closed recurrent blocks and the transient remainder."""
    comps = w_components(g)
    blocks = [tuple(c) for c in comps if _component_is_closed(g, c)]
    recurrent = set()
    for b in blocks:
        recurrent.update(b)
    transient = frozenset(range(g.n)) - frozenset(recurrent)

    member = min(labels.giant_scc)
    escc = next(frozenset(c) for c in comps if member in c)

    order: list[int] = []
    for b in blocks:
        order.extend(b)
    order.extend(sorted(transient))
    permutation = np.asarray(order, dtype=np.int64)
    permutation.setflags(write=False)
    return BlockDecomposition(recurrent_blocks=tuple(blocks),
                              transient_set=transient,
                              escc=escc,
                              dangling=g.dangling_set,
                              permutation=permutation)


def pure_out_nodes(labels: BowtieLabeling, blocks: BlockDecomposition) -> frozenset:
    """OUT-labeled nodes outside the extended component."""
    return labels.out_nodes - blocks.escc


def dual_path_out_nodes(g: GraphHandle, labels: BowtieLabeling,
                        blocks: BlockDecomposition) -> frozenset:
    """Non-dangling OUT nodes whose raw links lead both to a dangling node and
    into a recurrent block.  These sit on the fence between the extended
    component and the dead-ends; flagged for inspection in CSV output."""
    reach_dangling = _reverse_closure(g, g.dangling) if g.dangling.size else np.zeros(g.n, bool)
    block_members = np.asarray(sorted({v for b in blocks.recurrent_blocks for v in b}),
                               dtype=np.int64)
    reach_block = (_reverse_closure(g, block_members) if block_members.size
                   else np.zeros(g.n, bool))
    out = np.zeros(g.n, dtype=bool)
    out[np.flatnonzero(labels.labels == Label.OUT)] = True
    flagged = out & ~g.dangling_mask & reach_dangling & reach_block
    return frozenset(int(i) for i in np.flatnonzero(flagged))
