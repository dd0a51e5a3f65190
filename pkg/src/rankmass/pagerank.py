"""PageRank by power iteration and by the resolvent series, plus the
bookkeeping that attributes score mass to structural components.

The iteration never touches dangling rows: their mass is accumulated into a
scalar and re-injected uniformly together with the restart term,

    x  <-  c * x W_links  +  (c * dangling_mass(x) + 1 - c) / n.

Both solvers push the true L1 error (not just the step size) below the
requested tolerance, so independently computed vectors at the same ``c``
agree to within twice the tolerance.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bowtie import BlockDecomposition, BowtieLabeling, Label, pure_out_nodes
from .errors import ConvergenceError
from .graph import GraphHandle

THREADS_ENV_VAR = "BOWTIE_THREADS"


@dataclass(frozen=True)
class PageRankConfig:
    """Damping factor in [0, 1), L1 tolerance, and an iteration cap.

    ``max_iterations`` defaults to ten times the geometric-rate estimate
    ``log(tol)/log(c)``, floored at 1000.
    """

    damping: float
    tolerance: float = 1e-12
    max_iterations: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.damping < 1.0:
            raise ValueError(
                f"damping must lie in [0, 1); got {self.damping} "
                "(the c -> 1 limit has its own analytic path)")
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations is not None and self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive")

    def resolved_max_iterations(self) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        if self.damping == 0.0:
            return 1000
        estimate = 10 * int(np.ceil(np.log(self.tolerance) / np.log(self.damping)))
        return max(1000, estimate)


@dataclass(frozen=True, eq=False)
class RankVector:
    """A probability vector over nodes together with how it was obtained."""

    values: np.ndarray
    damping: float
    iterations_used: int
    residual: float

    def __post_init__(self):
        self.values.setflags(write=False)

    def rank_position(self, node: int) -> int:
        """1-based rank of ``node``; higher score ranks first, ties go to the
        smaller node id."""
        v = self.values
        better = int(np.count_nonzero(v > v[node]))
        better += int(np.count_nonzero((v == v[node])[:node]))
        return better + 1


def _effective_tol(tolerance: float, c: float) -> float:
    # shrink the step-size test so the *error* meets the tolerance:
    # ||x_k - pi|| <= c/(1-c) * step
    if c == 0.0:
        return tolerance
    return tolerance * min(1.0, (1.0 - c) / c)


def pagerank(g: GraphHandle, cfg: PageRankConfig,
             start: np.ndarray | None = None) -> RankVector:
    """Stationary vector of the damped surfer chain by power iteration."""
    if g.n == 0:
        raise ValueError("empty graph")
    c = cfg.damping
    n = g.n
    max_iter = cfg.resolved_max_iterations()
    stop = _effective_tol(cfg.tolerance, c)

    x = np.full(n, 1.0 / n) if start is None else np.asarray(start, dtype=np.float64).copy()
    x /= x.sum()
    delta = np.inf
    deltas: list[float] = []
    for it in range(1, max_iter + 1):
        linked = np.asarray(x @ g.w).ravel()
        dangling_mass = float(x[g.dangling].sum()) if g.dangling.size else 0.0
        x_next = c * linked + (c * dangling_mass + (1.0 - c)) / n
        x_next /= x_next.sum()
        delta = float(np.abs(x_next - x).sum())
        x = x_next
        deltas.append(delta)
        # either the error-scaled target is met, or the step size satisfies the
        # residual tolerance and has hit the double-precision floor (no longer
        # contracting over a 30-step window)
        floored = (it > 30 and delta <= cfg.tolerance
                   and delta > 0.98 * deltas[it - 31])
        if delta <= stop or floored:
            # residual of the returned iterate is at most c * delta <= tolerance
            return RankVector(values=x, damping=c, iterations_used=it,
                              residual=min(delta, c * delta if c > 0 else delta))
    raise ConvergenceError(f"power iteration at c={c} did not converge", delta, max_iter)


def pagerank_via_resolvent(g: GraphHandle, damping: float, tolerance: float = 1e-12,
                           max_iterations: int | None = None) -> RankVector:
    """Same vector through the restart-weighted sum of walk distributions.

    Accumulates ((1-c)/n) 1^T sum_k (c W)^k, stopping once the geometric
    tail falls below the tolerance.  Cross-validates the power iteration.
    """
    cfg = PageRankConfig(damping=damping, tolerance=tolerance,
                         max_iterations=max_iterations)
    c = cfg.damping
    n = g.n
    if n == 0:
        raise ValueError("empty graph")
    term = np.full(n, (1.0 - c) / n)
    total = term.copy()
    stop = _effective_tol(cfg.tolerance, c)
    max_iter = cfg.resolved_max_iterations()
    terms_used = 1
    for _ in range(max_iter):
        linked = np.asarray(term @ g.w).ravel()
        dangling_mass = float(term[g.dangling].sum()) if g.dangling.size else 0.0
        term = c * (linked + dangling_mass / n)
        total += term
        terms_used += 1
        term_l1 = float(term.sum())  # nonnegative throughout
        if term_l1 <= stop:
            total /= total.sum()
            residual = _fixed_point_residual(g, total, c)
            return RankVector(values=total, damping=c, iterations_used=terms_used,
                              residual=residual)
    raise ConvergenceError(f"resolvent series at c={c} did not converge",
                           float(term.sum()), max_iter)


def _fixed_point_residual(g: GraphHandle, x: np.ndarray, c: float) -> float:
    linked = np.asarray(x @ g.w).ravel()
    dangling_mass = float(x[g.dangling].sum()) if g.dangling.size else 0.0
    gx = c * linked + (c * dangling_mass + (1.0 - c)) / g.n
    return float(np.abs(gx - x).sum())


@dataclass(frozen=True)
class MassBreakdown:
    """Score mass summed over labels and over the structural sets."""

    by_label: dict
    in_scc: float
    escc: float
    pure_out: float
    dn: float
    transient: float
    recurrent_blocks: tuple[float, ...]

    @property
    def label_total(self) -> float:
        return float(sum(self.by_label.values()))


def mass_breakdown(pi, labels: BowtieLabeling,
                   blocks: BlockDecomposition) -> MassBreakdown:
    """Sum a rank vector over each component of interest."""
    values = pi.values if isinstance(pi, RankVector) else np.asarray(pi, dtype=np.float64)
    lab = labels.labels

    def mass_of(nodes) -> float:
        if not nodes:
            return 0.0
        return float(values[np.asarray(sorted(nodes), dtype=np.int64)].sum())

    by_label = {name: float(values[lab == member].sum())
                for name, member in (("IN", Label.IN), ("SCC", Label.SCC),
                                     ("OUT", Label.OUT), ("OTHER", Label.OTHER))}
    return MassBreakdown(
        by_label=by_label,
        in_scc=by_label["IN"] + by_label["SCC"],
        escc=mass_of(blocks.escc),
        pure_out=mass_of(pure_out_nodes(labels, blocks)),
        dn=mass_of(blocks.dangling),
        transient=mass_of(blocks.transient_set),
        recurrent_blocks=tuple(mass_of(b) for b in blocks.recurrent_blocks),
    )


def damping_sweep(g: GraphHandle, labels: BowtieLabeling, blocks: BlockDecomposition,
                  grid, tolerance: float = 1e-12,
                  workers: int | None = None) -> list[tuple[float, MassBreakdown]]:
    """One mass breakdown per grid value, in grid order.

    Grid points are independent solves; ``workers`` (default: the
    BOWTIE_THREADS environment variable, else 1) caps the thread fan-out.
    """
    grid = [float(c) for c in grid]
    if workers is None:
        workers = int(os.environ.get(THREADS_ENV_VAR, "1") or "1")
    workers = max(1, min(workers, len(grid) or 1))

    def point(c: float) -> tuple[float, MassBreakdown]:
        pi = pagerank(g, PageRankConfig(damping=c, tolerance=tolerance))
        return c, mass_breakdown(pi, labels, blocks)

    if workers == 1:
        return [point(c) for c in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(point, grid))
