"""Quadrature discretization of symmetric integral operators.

A symmetric kernel K(x, y) on [a, b] is sampled on a Gauss-Legendre grid and
scaled into the symmetric matrix sqrt(w_i) K(x_i, x_j) sqrt(w_j), whose
eigenpairs approximate the eigenvalues and (weighted) eigenfunction samples of
the integral operator.  The eigensolver is a self-contained cyclic Jacobi
iteration: deterministic, orthogonal by construction, and robust for every
symmetric input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._json import dumps
from .errors import ConvergenceError, NumericDomainError

__all__ = [
    "QuadratureGrid",
    "SymmetricOperatorMatrix",
    "SpectralSystem",
    "gauss_legendre",
    "nystrom_matrix",
    "eigh",
    "spectral_system",
    "project",
    "reconstruct",
]

# Modes whose eigenvalue magnitude falls below DROP_TOL * |lambda_1| carry no
# usable spectral information at double precision and are discarded.
DROP_TOL = 1e-12


@dataclass
class QuadratureGrid:
    """Nodes and weights of a quadrature rule on [a, b]."""

    a: float
    b: float
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if not self.a < self.b:
            raise ValueError("interval must satisfy a < b")
        if self.nodes.ndim != 1 or self.weights.ndim != 1:
            raise ValueError("nodes and weights must be one-dimensional")
        if self.nodes.size != self.weights.size:
            raise ValueError("nodes and weights must have equal length")
        if self.nodes.size < 2:
            raise ValueError("a grid needs at least two nodes")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if self.nodes[0] < self.a or self.nodes[-1] > self.b:
            raise ValueError("nodes must lie inside [a, b]")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        length = self.b - self.a
        if abs(float(np.sum(self.weights)) - length) > 1e-12 * length:
            raise ValueError("weights must sum to b - a")

    @property
    def size(self) -> int:
        return int(self.nodes.size)


def gauss_legendre(n: int, a: float, b: float) -> QuadratureGrid:
    """Gauss-Legendre rule with n nodes on [a, b].

    Nodes are the roots of the degree-n Legendre polynomial, found by Newton
    iteration from the Tricomi cosine initial guess; the iteration is run to
    a 1e-15 step tolerance.  The rule integrates polynomials up to degree
    2n - 1 exactly.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    if not float(a) < float(b):
        raise ValueError("interval must satisfy a < b")

    k = np.arange(1, n + 1, dtype=float)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))

    def legendre_pair(t):
        # Returns (P_n(t), P_{n-1}(t)) via the three-term recurrence.
        p_prev = np.ones_like(t)
        p = t.copy()
        for m in range(2, n + 1):
            p_prev, p = p, ((2 * m - 1) * t * p - (m - 1) * p_prev) / m
        return p, p_prev

    for _ in range(100):
        p, p_prev = legendre_pair(x)
        dp = n * (x * p - p_prev) / (x * x - 1.0)
        step = p / dp
        x -= step
        if np.max(np.abs(step)) <= 1e-15:
            break
    else:
        raise ConvergenceError("Newton iteration for quadrature nodes stalled")

    p, p_prev = legendre_pair(x)
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)

    # cos() initial guesses run high-to-low; flip to ascending order.
    x = x[::-1].copy()
    w = w[::-1].copy()

    half = 0.5 * (b - a)
    nodes = 0.5 * (a + b) + half * x
    weights = half * w
    return QuadratureGrid(float(a), float(b), nodes, weights)


@dataclass
class SymmetricOperatorMatrix:
    """A dense symmetric matrix; symmetrized exactly at construction."""

    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise ValueError("entries must form a square matrix")
        if not np.all(np.isfinite(self.entries)):
            bad = np.argwhere(~np.isfinite(self.entries))[0]
            raise NumericDomainError(
                f"non-finite matrix entry at ({bad[0]}, {bad[1]})"
            )
        self.entries = 0.5 * (self.entries + self.entries.T)

    @property
    def order(self) -> int:
        return int(self.entries.shape[0])


def nystrom_matrix(kernel, grid: QuadratureGrid) -> SymmetricOperatorMatrix:
    """Symmetrically scaled kernel samples sqrt(w_i) K(x_i, x_j) sqrt(w_j).

    The matrix shares its eigenvalues with the quadrature discretization of
    the integral operator, and eigenvector components v[i] recover weighted
    eigenfunction samples via psi(x_i) = v[i] / sqrt(w_i).
    """
    n = grid.size
    nodes = grid.nodes
    samples = np.empty((n, n), dtype=float)
    for i in range(n):
        xi = nodes[i]
        for j in range(n):
            samples[i, j] = kernel(xi, nodes[j])
    if not np.all(np.isfinite(samples)):
        bad = np.argwhere(~np.isfinite(samples))[0]
        raise NumericDomainError(
            f"kernel evaluation is non-finite at node pair ({bad[0]}, {bad[1]})"
        )
    root_w = np.sqrt(grid.weights)
    scaled = root_w[:, None] * samples * root_w[None, :]
    return SymmetricOperatorMatrix(scaled)


def _jacobi_rounds(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Round-robin schedule of pivot pairs: each round pairs disjoint indices.

    One full pass over all rounds visits every unordered pair (p, q) exactly
    once, so a pass is one classic Jacobi sweep.  Because the pairs within a
    round share no index, their rotations commute and the whole round can be
    applied with vectorized column and row mixes.
    """
    m = n if n % 2 == 0 else n + 1
    arr = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps = []
        qs = []
        for i in range(m // 2):
            x, y = arr[i], arr[m - 1 - i]
            if x < n and y < n:
                ps.append(min(x, y))
                qs.append(max(x, y))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        arr = [arr[0], arr[-1], *arr[1:-1]]
    return tuple(rounds)


def eigh(m: SymmetricOperatorMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) with eigenvalues ordered by
    non-increasing magnitude (stable under ties) and eigenvectors as rows of
    the second array.  Each eigenvector has its first nonzero component
    positive, which pins the otherwise arbitrary sign.

    Pivots cycle in round-robin order: each round rotates a set of disjoint
    index pairs, whose rotations commute exactly, so the round is applied as
    one vectorized update.  A rotation angle only depends on the 2x2 block of
    its own pair and disjoint rotations never touch each other's blocks, so
    the result is identical to processing the same pairs one at a time.

    The sweep loop stops once the off-diagonal Frobenius norm falls below
    1e-12 times the Frobenius norm of the input; if 100 sweeps do not get
    there a ConvergenceError carries the residual.
    """
    a = m.entries.copy()
    n = m.order
    v = np.eye(n)

    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        return np.zeros(n), np.eye(n)
    tol = 1e-12 * norm
    # If every off-diagonal entry is below tol/n the off-diagonal Frobenius
    # norm is below tol, so entries under this threshold are left alone.
    skip = tol / n

    converged = False
    rounds = _jacobi_rounds(n)
    for _ in range(100):
        off = float(np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0)))
        if off <= tol:
            converged = True
            break
        rotations = 0
        for p_all, q_all in rounds:
            apq = a[p_all, q_all]
            sel = np.abs(apq) > skip
            if not sel.any():
                continue
            p = p_all[sel]
            q = q_all[sel]
            apq = apq[sel]
            rotations += p.size

            app = a[p, p]
            aqq = a[q, q]
            theta = (aqq - app) / (2.0 * apq)
            root = np.sqrt(theta * theta + 1.0)
            # Same as 1/(theta+root) for theta >= 0 and -1/(root-theta)
            # otherwise, but the denominator |theta|+root never vanishes.
            t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + root)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            col_p = a[:, p]
            col_q = a[:, q]
            a[:, p] = col_p * c - col_q * s
            a[:, q] = col_p * s + col_q * c
            row_p = a[p, :]
            row_q = a[q, :]
            a[p, :] = c[:, None] * row_p - s[:, None] * row_q
            a[q, :] = s[:, None] * row_p + c[:, None] * row_q
            # Exact update targets for the rotated 2x2 blocks.
            a[p, p] = app - t * apq
            a[q, q] = aqq + t * apq
            a[p, q] = 0.0
            a[q, p] = 0.0

            vec_p = v[:, p]
            vec_q = v[:, q]
            v[:, p] = vec_p * c - vec_q * s
            v[:, q] = vec_p * s + vec_q * c
        if rotations == 0:
            converged = True
            break
    if not converged:
        off = float(np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0)))
        if off > tol:
            raise ConvergenceError(
                f"Jacobi sweeps exhausted: off-diagonal norm {off:.3e} "
                f"above tolerance {tol:.3e} after 100 sweeps"
            )

    lam = np.diag(a).copy()
    order = np.argsort(-np.abs(lam), kind="stable")
    lam = lam[order]
    vectors = v[:, order].T.copy()

    for row in vectors:
        anchor = np.argmax(np.abs(row) > 1e-12 * np.max(np.abs(row)))
        if row[anchor] < 0:
            row *= -1.0
    return lam, vectors


@dataclass
class SpectralSystem:
    """Discrete eigensystem of an integral operator on a quadrature grid.

    eigfun[k, i] holds the k-th eigenfunction sampled at node i, normalized so
    that sum_i w_i eigfun[j, i] eigfun[k, i] = delta_jk.  Eigenvalues are
    ordered by non-increasing magnitude; negative_count reports how many
    retained eigenvalues are not positive.
    """

    grid: QuadratureGrid
    eigenvalues: np.ndarray
    eigfun: np.ndarray
    negative_count: int = 0
    discarded: int = 0

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float)
        self.eigfun = np.asarray(self.eigfun, dtype=float)
        if self.eigfun.ndim != 2:
            raise ValueError("eigfun must be a 2-d array with one row per mode")
        if self.eigfun.shape[0] != self.eigenvalues.size:
            raise ValueError("one eigenfunction row per eigenvalue required")
        if self.eigenvalues.size and self.eigfun.shape[1] != self.grid.size:
            raise ValueError("eigenfunction rows must match the grid size")

    @property
    def n_modes(self) -> int:
        return int(self.eigenvalues.size)

    def to_json(self) -> str:
        payload = {
            "a": self.grid.a,
            "b": self.grid.b,
            "nodes": self.grid.nodes,
            "weights": self.grid.weights,
            "eigenvalues": self.eigenvalues,
            "eigenfunctions": self.eigfun,
        }
        return dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "SpectralSystem":
        raw = json.loads(text)
        grid = QuadratureGrid(
            float(raw["a"]),
            float(raw["b"]),
            np.asarray(raw["nodes"], dtype=float),
            np.asarray(raw["weights"], dtype=float),
        )
        lam = np.asarray(raw["eigenvalues"], dtype=float)
        fun = np.asarray(raw["eigenfunctions"], dtype=float)
        negative = int(np.sum(lam <= 0))
        return cls(grid, lam, fun, negative_count=negative)


def spectral_system(kernel, grid: QuadratureGrid) -> SpectralSystem:
    """Eigenvalues and weighted eigenfunction samples of a kernel on a grid."""
    matrix = nystrom_matrix(kernel, grid)
    lam, vectors = eigh(matrix)
    if lam.size == 0 or np.max(np.abs(lam)) == 0.0:
        return SpectralSystem(grid, np.zeros(0), np.zeros((0, grid.size)),
                              negative_count=0, discarded=grid.size)
    keep = np.abs(lam) > DROP_TOL * np.abs(lam[0])
    kept_lam = lam[keep]
    kept_vec = vectors[keep]
    psi = kept_vec / np.sqrt(grid.weights)[None, :]
    return SpectralSystem(
        grid,
        kept_lam,
        psi,
        negative_count=int(np.sum(kept_lam <= 0)),
        discarded=int(np.sum(~keep)),
    )


def project(system: SpectralSystem, f_samples) -> np.ndarray:
    """Coefficients sum_i w_i f(x_i) psi_k(x_i) for every stored mode k."""
    f_samples = np.asarray(f_samples, dtype=float)
    if f_samples.shape != (system.grid.size,):
        raise ValueError("sample vector must match the grid size")
    return system.eigfun @ (system.grid.weights * f_samples)


def reconstruct(system: SpectralSystem, coefficients, cutoff: int) -> np.ndarray:
    """Node samples of sum_{k <= cutoff} c_k psi_k."""
    coefficients = np.asarray(coefficients, dtype=float)
    if cutoff < 0 or cutoff > system.n_modes:
        raise ValueError("cutoff must lie between 0 and the stored mode count")
    if coefficients.ndim != 1 or coefficients.size < cutoff:
        raise ValueError("need at least cutoff coefficients")
    if cutoff == 0:
        return np.zeros(system.grid.size)
    return coefficients[:cutoff] @ system.eigfun[:cutoff]
