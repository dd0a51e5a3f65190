"""The damping -> 1 limit of the rank vector, and two small dense
instruments that check the perturbation identities the limit rests on.

In the limit all mass collects in the closed recurrent blocks.  Block ``i``
ends up with

    n_i / n  +  (1/n) 1^T [I - T]^{-1} R_i 1

(its own fair share plus what drains into it through the transient part),
distributed within the block by the block's stationary vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bowtie import BlockDecomposition, tarjan_components
from .errors import StructureError
from .graph import GraphHandle
from .operators import (SubstochasticBlock, block_view, dense_stationary,
                        solve_left, stationary_left)

LAURENT_MAX_SIZE = 20
AGGREGATED_MAX_SIZE = 30


def block_stationary(g: GraphHandle, block, tol: float = 1e-14) -> np.ndarray:
    """Stationary distribution of one closed recurrent block.

    Index order follows the sorted block node ids.  Raises
    :class:`StructureError` if the block leaks mass or is not strongly
    connected.
    """
    view = block_view(g, block, block)
    sums = view.row_sums()
    if np.any(np.abs(sums - 1.0) > 1e-12):
        leaky = [int(view.rows[i]) for i in np.flatnonzero(np.abs(sums - 1.0) > 1e-12)]
        raise StructureError(f"block is not closed: nodes {leaky} leak mass")
    local_adj = _local_adjacency(view)
    if len(tarjan_components(lambda v: local_adj[v], view.rows.size)) != 1:
        raise StructureError("block is not strongly connected")
    return stationary_left(view.mul_left, view.rows.size, tol=tol)


def _local_adjacency(view: SubstochasticBlock) -> list[list[int]]:
    m = view.matrix
    adj = [list(map(int, m.indices[m.indptr[i]:m.indptr[i + 1]]))
           for i in range(m.shape[0])]
    everyone = list(range(m.shape[0]))
    for d in view.dangling_local:
        adj[int(d)] = everyone
    return adj


def absorption_weights(g: GraphHandle, blocks: BlockDecomposition,
                       tol: float = 1e-14) -> np.ndarray:
    """Per-block drain terms (1/n) 1^T [I - T]^{-1} R_i 1."""
    transient = sorted(blocks.transient_set)
    m = blocks.num_blocks
    if not transient:
        return np.zeros(m)
    t_view = block_view(g, transient, transient)
    x = solve_left(t_view.mul_left, np.full(len(transient), 1.0 / g.n), tol=tol)
    weights = np.empty(m)
    for i, block in enumerate(blocks.recurrent_blocks):
        r_view = block_view(g, transient, block)
        weights[i] = float(x @ r_view.row_sums())
    return weights


@dataclass(frozen=True, eq=False)
class LimitReport:
    """Limiting masses, per-block stationary vectors, and the assembled vector."""

    block_masses: np.ndarray          # fair share + drain, per block
    fair_shares: np.ndarray
    drain_weights: np.ndarray
    block_stationaries: tuple[np.ndarray, ...]
    vector: np.ndarray                # full length-n limit; zero on transient nodes


def limit_vector(g: GraphHandle, blocks: BlockDecomposition,
                 tol: float = 1e-14) -> LimitReport:
    """Assemble the limiting rank vector from block masses and stationaries."""
    if blocks.num_blocks == 0:
        raise StructureError("no recurrent blocks: the limit is undefined")
    fair = np.array([len(b) / g.n for b in blocks.recurrent_blocks])
    drain = absorption_weights(g, blocks, tol=tol)
    masses = fair + drain
    stationaries = tuple(block_stationary(g, b, tol=tol) for b in blocks.recurrent_blocks)
    vector = np.zeros(g.n)
    for mass, block, pi_bar in zip(masses, blocks.recurrent_blocks, stationaries):
        vector[np.asarray(sorted(block), dtype=np.int64)] = mass * pi_bar
    vector.setflags(write=False)
    return LimitReport(block_masses=masses, fair_shares=fair, drain_weights=drain,
                       block_stationaries=stationaries, vector=vector)


# ---------------------------------------------------------------------------
# Dense verification instruments (small matrices only).
# ---------------------------------------------------------------------------

def _check_square(a: np.ndarray, cap: int, what: str) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what} must be square")
    if a.shape[0] > cap:
        raise ValueError(f"{what} capped at {cap}x{cap}; this is a verification instrument")
    return a


def _dense_components(a: np.ndarray) -> list[list[int]]:
    pattern = [list(np.flatnonzero(row > 0.0)) for row in a]
    return tarjan_components(lambda v: pattern[v], a.shape[0])


@dataclass(frozen=True, eq=False)
class LaurentCheck:
    """Per-epsilon distance between eps*[I - A + eps C]^{-1} and its leading term."""

    epsilons: np.ndarray
    errors: np.ndarray            # max-abs-row-sum norm
    relative_errors: np.ndarray   # errors / norm of the leading term
    leading_term: np.ndarray


def laurent_check(a: np.ndarray, c: np.ndarray, epsilons) -> LaurentCheck:
    """Measure how fast the resolvent of a shrinking perturbation approaches
    its rank-one leading term (1 / (mu C 1)) 1 mu.

    ``a`` must be irreducible and stochastic; ``a - eps*c`` substochastic on
    the grid.  Errors shrink linearly in epsilon.
    """
    a = _check_square(a, LAURENT_MAX_SIZE, "matrix")
    c = _check_square(c, LAURENT_MAX_SIZE, "perturbation")
    if a.shape != c.shape:
        raise ValueError("matrix and perturbation shapes differ")
    if np.any(np.abs(a.sum(axis=1) - 1.0) > 1e-12) or np.any(a < -1e-15):
        raise StructureError("matrix must be row-stochastic")
    if len(_dense_components(a)) != 1:
        raise StructureError("matrix must be irreducible")
    eps_grid = np.asarray(sorted((float(e) for e in epsilons), reverse=True))
    if eps_grid.size == 0 or eps_grid[-1] <= 0.0:
        raise ValueError("need a positive epsilon grid")
    for eps in eps_grid:
        perturbed = a - eps * c
        if np.any(perturbed < -1e-12) or np.any(perturbed.sum(axis=1) > 1.0 + 1e-12):
            raise StructureError(f"matrix - {eps}*perturbation is not substochastic")

    mu = dense_stationary(a)
    speed = float(mu @ c.sum(axis=1))
    if abs(speed) < 1e-13:
        raise StructureError("perturbation removes no mass under the stationary law "
                             "(mu C 1 = 0); the expansion degenerates")
    leading = np.outer(np.ones(a.shape[0]), mu) / speed
    lead_norm = float(np.abs(leading).sum(axis=1).max())

    errors = np.empty(eps_grid.size)
    for k, eps in enumerate(eps_grid):
        resolvent = np.linalg.inv(np.eye(a.shape[0]) - a + eps * c)
        diff = eps * resolvent - leading
        errors[k] = float(np.abs(diff).sum(axis=1).max())
    return LaurentCheck(epsilons=eps_grid, errors=errors,
                        relative_errors=errors / lead_norm, leading_term=leading)


def aggregated_chain_limit(a: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Limit distribution of the perturbed chain A + eps C as eps -> 0,
    through the aggregated chain over the ergodic classes of A.

    Builds D = M C B with B carrying class indicators on recurrent rows and
    expected-absorption columns phi_i = [I - E]^{-1} L_i 1 on transient rows,
    then solves nu (D + I) = nu and expands class weights by the class
    stationaries.
    """
    a = _check_square(a, AGGREGATED_MAX_SIZE, "matrix")
    c = _check_square(c, AGGREGATED_MAX_SIZE, "perturbation")
    if a.shape != c.shape:
        raise ValueError("matrix and perturbation shapes differ")
    if np.any(np.abs(a.sum(axis=1) - 1.0) > 1e-12) or np.any(a < -1e-15):
        raise StructureError("matrix must be row-stochastic")
    n = a.shape[0]

    comps = _dense_components(a)
    classes: list[list[int]] = []
    transient: list[int] = []
    for comp in comps:
        closed = not np.any(np.delete(a[comp, :], comp, axis=1) > 0.0)
        if closed:
            classes.append(comp)
        else:
            transient.extend(comp)
    transient.sort()
    m = len(classes)
    if m == 0:
        raise StructureError("no ergodic class found")

    e_block = a[np.ix_(transient, transient)] if transient else np.zeros((0, 0))
    if transient:
        eigs = np.linalg.eigvals(e_block)
        if np.max(np.abs(eigs)) >= 1.0 - 1e-12:
            raise StructureError("transient block must have spectral radius below one")

    mus = [dense_stationary(a[np.ix_(cls, cls)]) for cls in classes]

    big_m = np.zeros((m, n))
    big_b = np.zeros((n, m))
    for i, cls in enumerate(classes):
        big_m[i, cls] = mus[i]
        big_b[cls, i] = 1.0
    if transient:
        inv = np.linalg.inv(np.eye(len(transient)) - e_block)
        for i, cls in enumerate(classes):
            l_i = a[np.ix_(transient, cls)]
            big_b[transient, i] = inv @ l_i.sum(axis=1)

    d = big_m @ c @ big_b
    nu = dense_stationary(d + np.eye(m))

    limit = np.zeros(n)
    for i, cls in enumerate(classes):
        limit[cls] = nu[i] * mus[i]
    return limit


# ---------------------------------------------------------------------------
# Bundled example pairs for the expansion check.
# ---------------------------------------------------------------------------

def laurent_example_2state() -> tuple[np.ndarray, np.ndarray]:
    """Two-state swap chain with mass leaking from the first state."""
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    c = np.array([[0.0, 0.5], [0.0, 0.0]])
    return a, c


def laurent_example_5state() -> tuple[np.ndarray, np.ndarray]:
    """Five-state circulant chain with a uniform leak along the short hop."""
    n = 5
    a = np.zeros((n, n))
    c = np.zeros((n, n))
    for i in range(n):
        a[i, (i + 1) % n] = 0.7
        a[i, (i + 2) % n] = 0.3
        c[i, (i + 1) % n] = 0.5
    return a, c
