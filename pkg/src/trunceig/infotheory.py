"""Covering and packing bounds for data ellipsoids.

The image of the a-priori solution set under a diagonal operator is an
ellipsoid with semi-axes E lambda_k / beta_k.  Counting the eps-balls needed
to cover it (entropy) and the eps-separated points it can hold (capacity)
measures how many distinguishable data sets -- and hence recoverable
messages -- the problem supports at noise level eps.  Alongside the volume
lower bounds there are exact combinatorial solvers for small finite point
sets, which let the chain "covering <= packing" be checked against ground
truth rather than against itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError
from .regularize import ConstraintSequence, truncation_identity, truncation_weighted

__all__ = [
    "Ellipsoid",
    "InfoReport",
    "FlowComparison",
    "FinitePointSet",
    "ellipsoid_of",
    "entropy_lower_bound",
    "capacity_lower_bound",
    "information_flow_comparison",
    "shannon_entropy_estimate",
    "packing_number_exact",
    "covering_number_exact",
    "sample_ellipsoid",
]

EXACT_BUDGET = 30


@dataclass
class Ellipsoid:
    """Axis-aligned ellipsoid described by its semi-axes, sorted descending."""

    semi_axes: np.ndarray

    def __post_init__(self):
        self.semi_axes = np.sort(np.asarray(self.semi_axes, dtype=float))[::-1].copy()
        if self.semi_axes.ndim != 1 or self.semi_axes.size == 0:
            raise ValueError("an ellipsoid needs at least one semi-axis")
        if np.any(self.semi_axes <= 0):
            raise ValueError("semi-axes must be positive")

    @property
    def dim(self) -> int:
        return int(self.semi_axes.size)


def ellipsoid_of(eigenvalues, beta, E: float) -> Ellipsoid:
    """Data ellipsoid of the constraint set: semi-axes E lambda_k / beta_k."""
    lam = np.asarray(eigenvalues, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("eigenvalues must be positive")
    if E <= 0:
        raise ValueError("E must be positive")
    if beta is None:
        betas = np.ones(lam.size)
    elif isinstance(beta, ConstraintSequence):
        betas = beta.values(lam.size)
    else:
        betas = np.asarray(beta, dtype=float)
    if betas.shape != lam.shape or np.any(betas <= 0):
        raise ValueError("need one positive weight per eigenvalue")
    return Ellipsoid(E * lam / betas)


@dataclass
class InfoReport:
    """A bit-count lower bound at noise radius eps.

    entropy_bits bounds log2 of the covering number from below by summing
    log2(semi_axis / eps) over the axes longer than eps; the same count is a
    valid capacity lower bound, so capacity_bits >= entropy_bits always (with
    equality here).
    """

    eps: float
    cutoff: int
    entropy_bits: float
    capacity_bits: float


def _axis_bits(semi_axes: np.ndarray, eps: float) -> tuple[int, float]:
    above = semi_axes[semi_axes >= eps]
    cutoff = int(above.size)
    if cutoff == 0:
        return 0, 0.0
    return cutoff, float(np.sum(np.log2(above / eps)))


def entropy_lower_bound(ellipsoid: Ellipsoid, eps: float) -> InfoReport:
    """Volume lower bound on the eps-entropy of an ellipsoid."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    cutoff, bits = _axis_bits(ellipsoid.semi_axes, eps)
    return InfoReport(eps, cutoff, bits, bits)


def capacity_lower_bound(ellipsoid: Ellipsoid, eps: float) -> InfoReport:
    """Lower bound on the eps-capacity; inherits the entropy bound."""
    return entropy_lower_bound(ellipsoid, eps)


@dataclass
class FlowComparison:
    """Bit counts transmitted under the two truncation rules."""

    report_k1: InfoReport
    report_k2: InfoReport
    bit_difference: float


def information_flow_comparison(eigenvalues, beta, eps: float, E: float) -> FlowComparison:
    """Distinguishable-message bits kept by each truncation rule.

    Both counts sum log2(E lambda_k / eps) over the retained modes; the plain
    rule retains through k1, the weighted rule only through k2.  With weights
    beta_k >= 1 the weighted rule keeps fewer modes, so the a-priori
    constraint that sharpens the reconstruction also shrinks the number of
    messages the regularized data can still encode.
    """
    from .regularize import _validate_eigenvalues

    lam = _validate_eigenvalues(eigenvalues)
    if eps <= 0 or E <= 0:
        raise ValueError("need eps > 0 and E > 0")
    betas = beta.values(lam.size) if isinstance(beta, ConstraintSequence) else np.asarray(beta, dtype=float)
    k1 = truncation_identity(lam, eps, E)
    k2 = truncation_weighted(lam, betas, eps, E)

    def bits(cut: int) -> float:
        if cut == 0:
            return 0.0
        return float(np.sum(np.log2(E * lam[:cut] / eps)))

    b1 = bits(k1)
    b2 = bits(k2)
    return FlowComparison(
        InfoReport(eps, k1, b1, b1),
        InfoReport(eps, k2, b2, b2),
        b1 - b2,
    )


def shannon_entropy_estimate(shannon_number: float, eps: float) -> float:
    """Step-spectrum entropy heuristic S * log2(1/eps)."""
    if shannon_number <= 0:
        raise ValueError("the mode count S must be positive")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return shannon_number * math.log2(1.0 / eps)


@dataclass
class FinitePointSet:
    """A small set of distinct points in a common Euclidean space."""

    points: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[0] == 0:
            raise ValueError("points must form a non-empty 2-d array")
        d = self._distances()
        m = self.points.shape[0]
        if m > 1:
            off = d[np.triu_indices(m, k=1)]
            if float(np.min(off)) <= 1e-12:
                raise ValueError("points must be pairwise distinct (min spacing 1e-12)")

    def _distances(self) -> np.ndarray:
        diff = self.points[:, None, :] - self.points[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=2))

    @property
    def size(self) -> int:
        return int(self.points.shape[0])


def _check_budget(point_set: FinitePointSet):
    if point_set.size > EXACT_BUDGET:
        raise BudgetExceededError(
            f"exact search limited to {EXACT_BUDGET} points, got {point_set.size}"
        )


def packing_number_exact(point_set: FinitePointSet, eps: float) -> tuple[int, list[int]]:
    """Largest number of points with pairwise distances strictly above eps.

    Branch-and-bound maximum clique on the graph whose edges join points
    farther than eps apart.  Returns the count and one witness (sorted point
    indices).
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    _check_budget(point_set)
    m = point_set.size
    dist = point_set._distances()
    adj = dist > eps

    # Greedy seed gives the search a non-trivial incumbent to prune against.
    order = sorted(range(m), key=lambda i: -int(np.sum(adj[i])))
    best: list[int] = []
    for i in order:
        if all(adj[i, j] for j in best):
            best.append(i)

    current: list[int] = []

    def extend(candidates: list[int]):
        nonlocal best
        if not candidates:
            if len(current) > len(best):
                best = current.copy()
            return
        if len(current) + len(candidates) <= len(best):
            return
        for pos, i in enumerate(candidates):
            if len(current) + len(candidates) - pos <= len(best):
                break
            current.append(i)
            extend([j for j in candidates[pos + 1:] if adj[i, j]])
            current.pop()

    extend(order)
    return len(best), sorted(best)


def covering_number_exact(point_set: FinitePointSet, eps: float) -> tuple[int, list[int]]:
    """Fewest closed eps-balls centered at set points that cover the set.

    Exact branch-and-bound set cover.  Returns the count and the chosen
    centers (sorted point indices).
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    _check_budget(point_set)
    m = point_set.size
    dist = point_set._distances()
    balls = [frozenset(np.nonzero(dist[i] <= eps)[0].tolist()) for i in range(m)]
    max_ball = max(len(b) for b in balls)

    # Greedy cover as the incumbent.
    uncovered = set(range(m))
    greedy: list[int] = []
    while uncovered:
        i = max(range(m), key=lambda i: len(balls[i] & uncovered))
        greedy.append(i)
        uncovered -= balls[i]
    best = greedy

    chosen: list[int] = []

    def solve(uncovered: frozenset):
        nonlocal best
        if not uncovered:
            if len(chosen) < len(best):
                best = chosen.copy()
            return
        if len(chosen) + math.ceil(len(uncovered) / max_ball) >= len(best):
            return
        # Branch on the hardest point: the one fewest balls can cover.
        target = min(uncovered, key=lambda e: sum(1 for b in balls if e in b))
        options = [i for i in range(m) if target in balls[i]]
        options.sort(key=lambda i: -len(balls[i] & uncovered))
        for i in options:
            chosen.append(i)
            solve(uncovered - balls[i])
            chosen.pop()

    solve(frozenset(range(m)))
    return len(best), sorted(best)


def sample_ellipsoid(ellipsoid: Ellipsoid, dim_cut: int, count: int, seed: int) -> FinitePointSet:
    """Seeded points on the boundary of the ellipsoid's leading-axes section.

    Directions are isotropic Gaussian draws scaled onto the boundary of the
    ellipsoid restricted to its first dim_cut axes.
    """
    if not 1 <= dim_cut <= min(4, ellipsoid.dim):
        raise ValueError("dim_cut must lie in [1, min(4, dim)]")
    if not 1 <= count <= EXACT_BUDGET:
        raise ValueError(f"count must lie in [1, {EXACT_BUDGET}]")
    axes = ellipsoid.semi_axes[:dim_cut]
    rng = np.random.default_rng(seed)
    points: list[np.ndarray] = []
    while len(points) < count:
        z = rng.standard_normal(dim_cut)
        norm = float(np.linalg.norm(z))
        if norm < 1e-12:
            continue
        u = z / norm
        t = 1.0 / math.sqrt(float(np.sum((u / axes) ** 2)))
        p = t * u
        if any(float(np.linalg.norm(p - q)) <= 1e-12 for q in points):
            continue
        points.append(p)
    return FinitePointSet(np.array(points))
