"""Mass of the extended component as a function of damping: exact curve,
Perron-based envelope bounds, and the damping values where the curve meets
one-step retention targets.

The transient sub-matrix T drives everything:

    mass(c) = (1 - c) * gamma * u [I - cT]^{-1} 1,

with gamma the block's node share and u uniform over the block.  ``p1``
(uniform one-step retention) and ``lambda1`` (dominant eigenvalue of T,
retention under the quasi-stationary law) yield the envelope

    gamma (1-c) / (1 - c p1)  <  mass(c)  <  gamma (1-c) / (1 - c lambda1)

under the two testable conditions reported alongside.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bowtie import BlockDecomposition, BowtieLabeling, pure_out_nodes, tarjan_components
from .errors import ConvergenceError, StructureError
from .graph import GraphHandle
from .operators import SubstochasticBlock, block_view, perron_irreducible, solve_left
from .pagerank import RankVector

EIG_TOL = 1e-13
SOLVE_TOL = 1e-14


def _transient_nodes(blocks: BlockDecomposition, escc_only: bool) -> list[int]:
    if escc_only:
        if not blocks.escc <= blocks.transient_set:
            raise StructureError("the extended component is closed; nothing is transient")
        nodes = sorted(blocks.escc)
    else:
        nodes = sorted(blocks.transient_set)
    if not nodes:
        raise StructureError("transient block is empty")
    return nodes


def transient_view(g: GraphHandle, blocks: BlockDecomposition,
                   escc_only: bool = False) -> SubstochasticBlock:
    """The square substochastic block T.  By default this is the whole
    transient set (extended component plus transient pure-OUT states);
    ``escc_only`` restricts to the extended component proper."""
    nodes = _transient_nodes(blocks, escc_only)
    return block_view(g, nodes, nodes)


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    """One-step retention, dominant eigenpair, and node shares of T."""

    p1: float
    lambda1: float
    quasi_stationary: np.ndarray
    gamma: float
    delta: float
    nodes: np.ndarray


def _local_adjacency(view: SubstochasticBlock) -> list[list[int]]:
    m = view.matrix
    adj = [list(map(int, m.indices[m.indptr[i]:m.indptr[i + 1]])) for i in range(m.shape[0])]
    everyone = list(range(m.shape[0]))
    for d in view.dangling_local:
        adj[int(d)] = everyone
    return adj


def _perron_left(g: GraphHandle, view: SubstochasticBlock,
                 tol: float = EIG_TOL) -> tuple[float, np.ndarray]:
    """Dominant eigenvalue and probability-normed left eigenvector of T.

    Reducible blocks are handled exactly: the eigenvalue is the maximum over
    the diagonal classes, and the eigenvector couples the winning class
    (smallest member on ties) with everything it feeds downstream.
    """
    size = view.rows.size
    adj = _local_adjacency(view)
    classes = tarjan_components(lambda v: adj[v], size)
    if len(classes) == 1:
        lam, vec = perron_irreducible(view, tol=tol)
        return lam, vec / vec.sum()

    per_class = []
    for cls in classes:
        sub = block_view(g, view.rows[cls], view.rows[cls])
        lam_cls, vec_cls = perron_irreducible(sub, tol=tol)
        per_class.append((lam_cls, vec_cls))
    winner = max(range(len(classes)),
                 key=lambda i: (per_class[i][0], -classes[i][0]))
    lam = per_class[winner][0]

    class_of = np.empty(size, dtype=np.int64)
    for k, cls in enumerate(classes):
        class_of[cls] = k
    class_succ: list[set] = [set() for _ in classes]
    for v in range(size):
        for w in adj[v]:
            if class_of[v] != class_of[w]:
                class_succ[class_of[v]].add(int(class_of[w]))
    order = _topological(class_succ)

    x = np.zeros(size)
    started = False
    for k in order:
        cls = np.asarray(classes[k], dtype=np.int64)
        if k == winner:
            x[cls] = per_class[k][1]
            started = True
            continue
        if not started:
            continue
        inflow = view.mul_left(x)[cls]
        if float(np.abs(inflow).sum()) == 0.0:
            continue
        sub = block_view(g, view.rows[cls], view.rows[cls])
        if per_class[k][0] >= lam - 1e-14:
            raise ConvergenceError(
                "tied dominant classes along a feeding path", per_class[k][0], 0)
        x[cls] = solve_left(lambda y: sub.mul_left(y) / lam, inflow / lam, tol=tol)
    x /= x.sum()
    return lam, x


def _topological(succ: list[set]) -> list[int]:
    indeg = [0] * len(succ)
    for outs in succ:
        for w in outs:
            indeg[w] += 1
    ready = sorted(k for k, d in enumerate(indeg) if d == 0)
    order: list[int] = []
    while ready:
        k = ready.pop(0)
        order.append(k)
        for w in sorted(succ[k]):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return order


def spectral_summary(g: GraphHandle, labels: BowtieLabeling, blocks: BlockDecomposition,
                     escc_only: bool = False, tol: float = EIG_TOL) -> SpectralSummary:
    """Compute p1, lambda1, and the quasi-stationary vector of T."""
    nodes = _transient_nodes(blocks, escc_only)
    view = block_view(g, nodes, nodes)
    lam, quasi = _perron_left(g, view, tol=tol)
    p1 = float(view.row_sums().mean())
    delta = len(pure_out_nodes(labels, blocks)) / g.n
    quasi.setflags(write=False)
    return SpectralSummary(p1=p1, lambda1=lam, quasi_stationary=quasi,
                           gamma=len(nodes) / g.n, delta=delta,
                           nodes=view.rows)


def escc_mass(g: GraphHandle, blocks: BlockDecomposition, c: float,
              escc_only: bool = False, tol: float = SOLVE_TOL,
              _state: dict | None = None) -> float:
    """Mass held by the transient block at damping ``c`` (0 at c = 1 exactly).

    ``_state`` lets repeated evaluations reuse the block and warm-start the
    solve from the previous damping value.
    """
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"damping must lie in [0, 1]; got {c}")
    if c == 1.0:
        return 0.0
    if _state is not None and "view" in _state:
        view = _state["view"]
    else:
        view = transient_view(g, blocks, escc_only)
        if _state is not None:
            _state["view"] = view
    size = view.rows.size
    u = np.full(size, 1.0 / size)
    x0 = _state.get("y") if _state is not None else None
    y = solve_left(lambda v: c * view.mul_left(v), u, tol=tol, x0=x0)
    if _state is not None:
        _state["y"] = y
    gamma = size / g.n
    return (1.0 - c) * gamma * float(y.sum())


def expected_visits(g: GraphHandle, blocks: BlockDecomposition,
                    escc_only: bool = False, tol: float = SOLVE_TOL) -> float:
    """u [I - T]^{-1} 1: mean number of in-block steps from a uniform start."""
    view = transient_view(g, blocks, escc_only)
    size = view.rows.size
    u = np.full(size, 1.0 / size)
    y = solve_left(view.mul_left, u, tol=tol)
    return float(y.sum())


@dataclass(frozen=True)
class BoundRow:
    c: float
    mass: float
    lower: float
    upper: float
    lower_holds: bool
    upper_holds: bool


@dataclass(frozen=True)
class Prop3Bounds:
    rows: tuple[BoundRow, ...]
    condition_i: bool      # p1 < lambda1, validates the upper envelope
    condition_ii: bool     # 1/(1-p1) < expected visits, validates the lower envelope
    p1: float
    lambda1: float
    gamma: float
    visits: float
    violations: tuple[str, ...]


def prop3_bounds(g: GraphHandle, labels: BowtieLabeling, blocks: BlockDecomposition,
                 grid, escc_only: bool = False, tol: float = SOLVE_TOL) -> Prop3Bounds:
    """Evaluate the envelope on a grid and report where each side binds."""
    summary = spectral_summary(g, labels, blocks, escc_only=escc_only)
    p1, lam, gamma = summary.p1, summary.lambda1, summary.gamma
    visits = expected_visits(g, blocks, escc_only=escc_only, tol=tol)
    cond_i = p1 < lam
    cond_ii = 1.0 / (1.0 - p1) < visits

    state: dict = {}
    rows = []
    violations = []
    for c in (float(v) for v in grid):
        mass = escc_mass(g, blocks, c, escc_only=escc_only, tol=tol, _state=state)
        lower = gamma * (1.0 - c) / (1.0 - c * p1)
        upper = gamma * (1.0 - c) / (1.0 - c * lam)
        interior = 0.0 < c < 1.0   # the strict envelope only claims the open interval
        lower_ok = (not cond_ii) or (not interior) or lower < mass
        upper_ok = (not cond_i) or (not interior) or mass < upper
        if not lower_ok:
            violations.append(f"lower bound fails at c={c:.4g}")
        if not upper_ok:
            violations.append(f"upper bound fails at c={c:.4g}")
        rows.append(BoundRow(c=c, mass=mass, lower=lower, upper=upper,
                             lower_holds=lower_ok, upper_holds=upper_ok))
    return Prop3Bounds(rows=tuple(rows), condition_i=cond_i, condition_ii=cond_ii,
                       p1=p1, lambda1=lam, gamma=gamma, visits=visits,
                       violations=tuple(violations))


V_MODES = ("quasi", "uniform", "self")


def cstar_interval_closed_form(p1: float, lambda1: float, v_mode: str) -> tuple[float, float]:
    """Bracketing damping values where the envelope curves meet the
    retention target of the chosen seeding mode.

    ``quasi`` targets lambda1, ``uniform`` targets p1; ``self`` has the fixed
    bracket (1/(1+lambda1), 1/(1+p1)).
    """
    if v_mode not in V_MODES:
        raise ValueError(f"v_mode must be one of {V_MODES}")
    if not (0.0 < p1 < 1.0 and 0.0 < lambda1 < 1.0):
        raise ValueError("retention values must lie strictly between 0 and 1")
    if v_mode == "self":
        return 1.0 / (1.0 + lambda1), 1.0 / (1.0 + p1)
    w = lambda1 if v_mode == "quasi" else p1
    c1 = (1.0 - w) / (1.0 - p1 * w)
    c2 = (1.0 - w) / (1.0 - lambda1 * w)
    return c1, c2


def _r_curve(gamma: float, c: float) -> float:
    return gamma if c <= 0.5 else gamma * (1.0 - c) / c


@dataclass(frozen=True)
class CStarReport:
    v_mode: str
    vt_norm: float
    c1: float
    c2: float
    c_star: float            # nan when no crossing exists
    residual: float
    no_crossing: bool
    samples: tuple[tuple[float, float, float], ...]   # (c, mass, target)
    p1: float
    lambda1: float
    gamma: float


def cstar_solve(g: GraphHandle, labels: BowtieLabeling, blocks: BlockDecomposition,
                v_mode: str = "uniform", tolerance: float = 1e-6,
                escc_only: bool = False,
                summary: SpectralSummary | None = None) -> CStarReport:
    """Find the damping value where the block's mass share equals the
    one-step retention of the chosen seeding vector.

    For the fixed seedings the crossing solves mass(c) = gamma * ||v T||
    (the share-normalized balance the bracketing interval is built from);
    the self-normalized seeding crosses the kinked curve r(c) on (1/2, 1).
    """
    if v_mode not in V_MODES:
        raise ValueError(f"v_mode must be one of {V_MODES}")
    if summary is None:
        summary = spectral_summary(g, labels, blocks, escc_only=escc_only)
    gamma = summary.gamma
    state: dict = {}

    def mass(c: float) -> float:
        return escc_mass(g, blocks, c, escc_only=escc_only, _state=state)

    if v_mode == "self":
        lo, hi = 0.5, 1.0 - 1e-9
        target = lambda c: _r_curve(gamma, c)
    else:
        w = summary.lambda1 if v_mode == "quasi" else summary.p1
        if not 0.0 < w < 1.0:
            raise ValueError(f"retention target {w} outside (0, 1)")
        lo, hi = 0.0, 1.0 - 1e-12
        target = lambda c: gamma * w

    c1, c2 = cstar_interval_closed_form(summary.p1, summary.lambda1, v_mode)
    sample_grid = np.arange(0.0, 0.991, 0.05)
    samples = tuple((float(c), mass(float(c)), target(float(c))) for c in sample_grid)

    f_lo = mass(lo) - target(lo)
    f_hi = mass(hi) - target(hi)
    vt_norm = summary.lambda1 if v_mode == "quasi" else summary.p1
    if not (f_lo > 0.0 > f_hi or f_lo < 0.0 < f_hi):
        return CStarReport(v_mode=v_mode, vt_norm=float("nan") if v_mode == "self" else vt_norm,
                           c1=c1, c2=c2, c_star=float("nan"), residual=float("nan"),
                           no_crossing=True, samples=samples,
                           p1=summary.p1, lambda1=summary.lambda1, gamma=gamma)

    width_goal = max(tolerance * 1e-4, 1e-12)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = mass(mid) - target(mid)
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
        if hi - lo <= width_goal:
            break
    c_star = 0.5 * (lo + hi)
    residual = abs(mass(c_star) - target(c_star))
    if v_mode == "self":
        vt_norm = target(c_star) / gamma
    return CStarReport(v_mode=v_mode, vt_norm=vt_norm, c1=c1, c2=c2, c_star=c_star,
                       residual=residual, no_crossing=False, samples=samples,
                       p1=summary.p1, lambda1=summary.lambda1, gamma=gamma)


def pure_out_unfairness(pi, labels: BowtieLabeling, blocks: BlockDecomposition) -> float:
    """Pure-OUT mass over its fair share; nan when there is no pure OUT."""
    values = pi.values if isinstance(pi, RankVector) else np.asarray(pi, dtype=np.float64)
    nodes = sorted(pure_out_nodes(labels, blocks))
    delta = len(nodes) / values.size
    if delta == 0.0:
        return float("nan")
    mass = float(values[np.asarray(nodes, dtype=np.int64)].sum())
    return mass / delta
