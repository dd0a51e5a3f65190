"""Closed-form analysis of the IN+SCC score mass as a function of damping.

Splitting nodes into OUT, IN+SCC, and the dangling set DN turns the rank
equation into three coupled linear blocks.  Eliminating OUT and DN leaves

    pi_inscc(c) = k(c) * u * [I - cP - w(c) S1 u]^{-1},
    k(c) = (1-c) alpha / (1 - c beta),   w(c) = c^2 alpha / (1 - c beta),

with alpha, beta the IN+SCC and DN node fractions, u the uniform row over
IN+SCC, P the internal block and S1 the per-node weight toward DN.  The
rank-one term is applied through two dot products; solves are fixed-point
iterations against the sparse block.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bowtie import BowtieLabeling, Label, tarjan_components
from .errors import AssumptionViolationError, StructureError
from .graph import GraphHandle
from .operators import SubstochasticBlock, block_view, solve_left, solve_right, stationary_left

SOLVE_TOL = 1e-14
FD_STEP_AT_ZERO = 1e-5     # central difference step at c = 0
FD_STEP_AT_ONE = 1e-4      # one-sided step evaluated at c = 0.999


@dataclass(frozen=True, eq=False)
class ThreeBlockView:
    """OUT / IN+SCC / DN node split with the four internal operators."""

    out_nodes: np.ndarray
    inscc_nodes: np.ndarray
    dn_nodes: np.ndarray
    alpha: float
    beta: float
    q: SubstochasticBlock   # OUT -> OUT
    r: SubstochasticBlock   # IN+SCC -> OUT
    p: SubstochasticBlock   # IN+SCC -> IN+SCC
    s: SubstochasticBlock   # IN+SCC -> DN
    n: int

    @property
    def size(self) -> int:
        return self.inscc_nodes.size

    def uniform(self) -> np.ndarray:
        return np.full(self.size, 1.0 / self.size)

    def s_leak(self) -> np.ndarray:
        """Per IN+SCC node total weight into DN (the vector S 1)."""
        return self.s.row_sums()

    def retention_p1(self) -> float:
        """Chance a uniformly started surfer stays inside IN+SCC for one step."""
        return float(self.p.row_sums().mean())


def three_block_view(g: GraphHandle, labels: BowtieLabeling, *,
                     fold_other: bool = False,
                     force_dn_merge: bool = False) -> ThreeBlockView:
    """Build the three-way split.

    DN is exactly the dangling set; IN+SCC comes from the labels; everything
    else is OUT.  Links from OUT into DN break the block triangular shape:
    by default that raises :class:`AssumptionViolationError` naming the
    dangling nodes hit, while ``force_dn_merge`` keeps the DN classification
    and proceeds with a warning (downstream closed forms turn approximate).
    OTHER-labeled nodes are rejected unless ``fold_other`` places them in OUT.
    """
    lab = labels.labels
    other = np.flatnonzero(lab == Label.OTHER)
    if other.size and not fold_other:
        raise StructureError(
            f"nodes {other.tolist()} are outside the bow-tie; "
            "pass fold_other=True to treat them as OUT")
    dn = g.dangling.copy()
    inscc_mask = ((lab == Label.IN) | (lab == Label.SCC)) & ~g.dangling_mask
    inscc = np.flatnonzero(inscc_mask)
    rest = np.ones(g.n, dtype=bool)
    rest[dn] = False
    rest[inscc] = False
    out = np.flatnonzero(rest)

    if inscc.size == 0:
        raise StructureError("IN+SCC is empty")

    if dn.size and out.size:
        dn_set = set(int(i) for i in dn)
        hit = sorted({int(v) for u in out for v in g.out_neighbors(u) if int(v) in dn_set})
        if hit:
            if not force_dn_merge:
                raise AssumptionViolationError(hit)
            warnings.warn(
                f"OUT links into dangling node(s) {hit}; block split kept, "
                "closed-form results are approximate", stacklevel=2)

    return ThreeBlockView(
        out_nodes=out, inscc_nodes=inscc, dn_nodes=dn,
        alpha=inscc.size / g.n, beta=dn.size / g.n,
        q=block_view(g, out, out), r=block_view(g, inscc, out),
        p=block_view(g, inscc, inscc), s=block_view(g, inscc, dn),
        n=g.n)


def _rank_one_coeff(view: ThreeBlockView, c: float) -> float:
    return c * c * view.alpha / (1.0 - c * view.beta)


def _restart_coeff(view: ThreeBlockView, c: float) -> float:
    return (1.0 - c) * view.alpha / (1.0 - c * view.beta)


def inscc_vector(view: ThreeBlockView, c: float, tol: float = SOLVE_TOL) -> np.ndarray:
    """Evaluate the closed form at damping ``c``; indexed like inscc_nodes."""
    if not 0.0 <= c < 1.0:
        raise ValueError(f"damping must lie in [0, 1); got {c}")
    return _inscc_at(view, c, tol)


def _inscc_at(view: ThreeBlockView, c: float, tol: float = SOLVE_TOL) -> np.ndarray:
    # interior evaluation; also accepts small negative c for difference stencils
    k = _restart_coeff(view, c)
    w = _rank_one_coeff(view, c)
    leak = view.s_leak()
    u = view.uniform()

    def apply(y: np.ndarray) -> np.ndarray:
        return c * view.p.mul_left(y) + (w * float(y @ leak)) * u

    return solve_left(apply, k * u, tol=tol)


def reconstruct_out_and_dn(view: ThreeBlockView, c: float, pi_inscc: np.ndarray,
                           tol: float = SOLVE_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Back-substitute the OUT and DN segments from the IN+SCC segment."""
    n = view.n
    n_dn = view.dn_nodes.size
    dn_total = 0.0
    if n_dn:
        dn_total = n / (n - c * n_dn) * (
            c * float(pi_inscc @ view.s_leak()) + (1.0 - c) / n * n_dn)
    pi_dn = np.zeros(n_dn)
    if n_dn:
        pi_dn = c * view.s.mul_left(pi_inscc) + (c / n) * dn_total + (1.0 - c) / n

    pi_out = np.zeros(view.out_nodes.size)
    if view.out_nodes.size:
        b = c * view.r.mul_left(pi_inscc) + ((1.0 - c) / n + (c / n) * dn_total)
        pi_out = solve_left(lambda y: c * view.q.mul_left(y), b, tol=tol)
    return pi_out, pi_dn


def full_rank_vector(view: ThreeBlockView, c: float, tol: float = SOLVE_TOL) -> np.ndarray:
    """Closed-form rank vector over all nodes, assembled from the three segments."""
    pi_inscc = inscc_vector(view, c, tol=tol)
    pi_out, pi_dn = reconstruct_out_and_dn(view, c, pi_inscc, tol=tol)
    full = np.zeros(view.n)
    full[view.inscc_nodes] = pi_inscc
    full[view.out_nodes] = pi_out
    full[view.dn_nodes] = pi_dn
    return full


class DerivativeAtZero(NamedTuple):
    vector: np.ndarray
    total: float


def derivative_at_zero(view: ThreeBlockView) -> DerivativeAtZero:
    """Exact slope of the IN+SCC segment and of its total mass at c = 0.

    The total equals alpha * (-1 + beta + p1); it is positive exactly when
    the one-step retention p1 exceeds 1 - beta.
    """
    u = view.uniform()
    vector = -view.alpha * (1.0 - view.beta) * u + view.alpha * view.p.mul_left(u)
    total = view.alpha * (-1.0 + view.beta + view.retention_p1())
    return DerivativeAtZero(vector=vector, total=total)


@dataclass(frozen=True)
class DerivativeAtOne:
    """Exact slope at c = 1 plus its leading-order reciprocal approximation."""

    vector: np.ndarray
    total: float
    approx_total: float
    leakage: float      # pi_bar R 1 + (1-beta-alpha)/(1-beta) pi_bar S 1


def derivative_at_one(view: ThreeBlockView, tol: float = SOLVE_TOL) -> DerivativeAtOne:
    """Evaluate the near-singular slope at c = 1.

    Requires the internal IN+SCC walk (outward links dropped, rows
    renormalized) to be irreducible; its stationary vector weighs the leak
    terms in the approximation.
    """
    coeff = view.alpha / (1.0 - view.beta)
    u = view.uniform()
    leak = view.s_leak()

    def apply(y: np.ndarray) -> np.ndarray:
        return view.p.mul_left(y) + (coeff * float(y @ leak)) * u

    y = solve_left(apply, u, tol=tol)
    vector = -coeff * y
    total = -coeff * float(y.sum())

    pi_bar = _internal_stationary(view, tol=tol)
    r1 = view.r.row_sums()
    leakage = float(pi_bar @ r1) + (1.0 - view.beta - view.alpha) / (1.0 - view.beta) \
        * float(pi_bar @ leak)
    if leakage <= 0.0:
        raise StructureError("IN+SCC never leaks; the slope at c = 1 diverges")
    approx_total = -coeff / leakage
    return DerivativeAtOne(vector=vector, total=total,
                           approx_total=approx_total, leakage=leakage)


def _internal_stationary(view: ThreeBlockView, tol: float = SOLVE_TOL) -> np.ndarray:
    p = view.p.matrix
    sums = np.asarray(p.sum(axis=1)).ravel()
    if np.any(sums <= 0.0):
        dead = view.inscc_nodes[np.flatnonzero(sums <= 0.0)].tolist()
        raise StructureError(
            f"IN+SCC nodes {dead} have no internal links; the internal walk is reducible")
    adj = [list(map(int, p.indices[p.indptr[i]:p.indptr[i + 1]])) for i in range(p.shape[0])]
    if len(tarjan_components(lambda v: adj[v], p.shape[0])) != 1:
        raise StructureError("internal IN+SCC walk is reducible")
    scale = 1.0 / sums

    def apply(y: np.ndarray) -> np.ndarray:
        return np.asarray((y * scale) @ p).ravel()

    return stationary_left(apply, p.shape[0], tol=tol)


@dataclass(frozen=True)
class InsccCurvePoint:
    """Mass at one damping value, split into main term and rank-one correction."""

    c: float
    mass: float
    main_term: float
    correction: float
    d1_estimate: float | None = None
    d2_estimate: float | None = None


def sherman_morrison_split(view: ThreeBlockView, c: float,
                           tol: float = SOLVE_TOL) -> InsccCurvePoint:
    """Split the closed form into its dangling-free main term and the
    rank-one correction; the two recompose the full mass exactly."""
    if not 0.0 <= c < 1.0:
        raise ValueError(f"damping must lie in [0, 1); got {c}")
    u = view.uniform()
    y = solve_left(lambda v: c * view.p.mul_left(v), u, tol=tol)
    main = _restart_coeff(view, c) * float(y.sum())
    q = _rank_one_coeff(view, c) * float(y @ view.s_leak())
    if q >= 1.0:
        raise StructureError("rank-one correction is not contractive")
    correction = q / (1.0 - q) * main
    return InsccCurvePoint(c=c, mass=main + correction, main_term=main,
                           correction=correction)


def main_term_mass(view: ThreeBlockView, c: float, tol: float = SOLVE_TOL) -> float:
    u = view.uniform()
    y = solve_left(lambda v: c * view.p.mul_left(v), u, tol=tol)
    return _restart_coeff(view, c) * float(y.sum())


def curvature_form(view: ThreeBlockView, c: float, tol: float = SOLVE_TOL) -> float:
    """The quadratic form a(c) driving the single-peak argument; nonnegative
    because the internal block only loses mass."""
    u = view.uniform()
    y = solve_left(lambda v: c * view.p.mul_left(v), u, tol=tol)
    z = solve_right(lambda v: c * view.p.mul_right(v), np.ones(view.size), tol=tol)
    return view.alpha / (1.0 - c * view.beta) * float(y @ (z - view.p.mul_right(z)))


@dataclass(frozen=True, eq=False)
class UnimodalityReport:
    grid: np.ndarray
    main_masses: np.ndarray
    c0_estimate: float
    violations: tuple[str, ...]


def unimodality_scan(view: ThreeBlockView, grid=None,
                     tol: float = SOLVE_TOL) -> UnimodalityReport:
    """Scan the main-term mass over a dense grid and report any departure
    from the rise-once-then-decay shape (at most one sign change of the
    first difference, concave tail, positive a(c))."""
    if grid is None:
        grid = np.arange(0.0, 0.991, 0.01)
    grid = np.asarray([float(c) for c in grid])
    if grid.size < 3:
        raise ValueError("grid too coarse for a shape scan")
    masses = np.array([main_term_mass(view, c, tol=tol) for c in grid])

    violations: list[str] = []
    diffs = np.diff(masses)
    signs = np.sign(np.where(np.abs(diffs) <= 1e-13, 0.0, diffs))
    meaningful = signs[signs != 0.0]
    flips = int(np.count_nonzero(np.diff(meaningful) != 0.0))
    if flips > 1:
        violations.append(f"first difference changes sign {flips} times")
    if meaningful.size and meaningful[0] < 0 and np.any(meaningful[1:] > 0):
        violations.append("mass rises again after an initial decay")

    peak = int(np.argmax(masses))
    second = masses[:-2] - 2.0 * masses[1:-1] + masses[2:]
    for idx in range(peak, second.size):
        if second[idx] >= 1e-12:
            violations.append(f"second difference nonnegative at c={grid[idx + 1]:.4g}")
    for c in (grid[0], grid[grid.size // 2], grid[-1]):
        if curvature_form(view, float(c), tol=tol) <= 0.0:
            violations.append(f"curvature form nonpositive at c={c:.4g}")

    return UnimodalityReport(grid=grid, main_masses=masses,
                             c0_estimate=float(grid[peak]),
                             violations=tuple(violations))


def inscc_curve(view: ThreeBlockView, grid, tol: float = SOLVE_TOL) -> list[InsccCurvePoint]:
    """Mass split per grid point, with grid-based difference estimates filled in."""
    grid = [float(c) for c in grid]
    points = [sherman_morrison_split(view, c, tol=tol) for c in grid]
    masses = np.array([p.mass for p in points])
    out: list[InsccCurvePoint] = []
    for i, p in enumerate(points):
        d1 = d2 = None
        if 0 < i < len(points) - 1:
            h_prev = grid[i] - grid[i - 1]
            h_next = grid[i + 1] - grid[i]
            d1 = float((masses[i + 1] - masses[i - 1]) / (h_prev + h_next))
            d2 = float((masses[i + 1] - 2 * masses[i] + masses[i - 1])
                       / (0.5 * (h_prev + h_next)) ** 2)
        out.append(InsccCurvePoint(c=p.c, mass=p.mass, main_term=p.main_term,
                                   correction=p.correction,
                                   d1_estimate=d1, d2_estimate=d2))
    return out


def mass_derivative_fd_at_zero(view: ThreeBlockView, h: float = FD_STEP_AT_ZERO,
                               tol: float = SOLVE_TOL) -> float:
    """Central-difference check value for the slope of the total mass at 0."""
    hi = float(_inscc_at(view, +h, tol=tol).sum())
    lo = float(_inscc_at(view, -h, tol=tol).sum())
    return (hi - lo) / (2.0 * h)


def mass_derivative_fd_near_one(view: ThreeBlockView, at: float = 0.999,
                                h: float = FD_STEP_AT_ONE, tol: float = SOLVE_TOL) -> float:
    """One-sided difference of the total mass just below c = 1."""
    hi = float(_inscc_at(view, at, tol=tol).sum())
    lo = float(_inscc_at(view, at - h, tol=tol).sum())
    return (hi - lo) / h
