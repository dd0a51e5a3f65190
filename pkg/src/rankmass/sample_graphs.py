"""Small hand-built graphs exercising every structural feature the analyses
care about.  They double as regression anchors: the component splits below
are stated in the docstrings and pinned by the test suite."""

from __future__ import annotations

from .graph import GraphHandle, build_graph

# 12 nodes: 0 feeds a 3-cycle core {1,2,3}; the OUT side holds dangling node 5
# (making {0..5} one component under uniform-row semantics) and two closed
# 2-cycles {8,9} and {10,11} reached through the transient chain 6 -> 7.
BOWTIE_EDGES = (
    (0, 1), (1, 2), (2, 3), (3, 1), (3, 4), (4, 5), (4, 6),
    (6, 7), (7, 8), (7, 10), (8, 9), (9, 8), (10, 11), (11, 10),
)

# 9 nodes in clean triangular shape: IN+SCC = {0,1,2,3}, dangling DN = {4,5}
# fed only from inside IN+SCC, and OUT = the closed 3-cycle {6,7,8}.
THREE_BLOCK_EDGES = (
    (0, 1), (1, 2), (1, 5), (2, 0), (2, 3), (3, 0), (3, 4), (3, 6),
    (6, 7), (7, 8), (8, 6),
)

# 8 nodes: a dense 4-clique core where every node also feeds its own dangling
# sink.  Half the nodes dangle, retention is 3/4, so the core's mass first
# grows with damping before the eventual decay -- the rising-then-falling
# curve shape.
HEAVY_DANGLING_EDGES = tuple(
    [(i, j) for i in range(4) for j in range(4) if i != j]
    + [(i, 4 + i) for i in range(4)]
)


def bowtie_sample() -> GraphHandle:
    """The 12-node bow-tie with a dangling node and two dead-end 2-cycles."""
    return build_graph(12, BOWTIE_EDGES)


def three_block_sample() -> GraphHandle:
    """The 9-node graph whose OUT side never touches a dangling node."""
    return build_graph(9, THREE_BLOCK_EDGES)


def heavy_dangling_sample() -> GraphHandle:
    """The 8-node clique-plus-sinks graph with rising core mass at small damping."""
    return build_graph(8, HEAVY_DANGLING_EDGES)
