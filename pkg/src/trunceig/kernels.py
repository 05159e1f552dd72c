"""Concrete kernels and their spectral reference data.

Two analytically understood kernels drive everything downstream: the
triangular kernel on [0, 1], whose eigensystem is knowable in closed form,
and the bandlimiting sinc kernel on [-1, 1], whose eigenvalue staircase is
summarized by the Shannon number.  The sinc case also carries the commuting
second-order differential operator, diagonalized here in a normalized
Legendre basis to produce its eigenvalue sequence chi_k.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ResolutionError
from .spectral import QuadratureGrid, SymmetricOperatorMatrix, eigh

__all__ = [
    "triangular_kernel",
    "triangular_eigensystem",
    "SincKernel",
    "TabulatedKernel",
    "KernelSpec",
    "parse_kernel",
    "ProlateSpectrum",
    "prolate_eigenvalues",
    "prolate_modes",
    "legendre_series",
    "shannon_number",
    "plateau_count",
]


def triangular_kernel(x: float, y: float) -> float:
    """Piecewise-bilinear kernel (1 - max(x,y)) * min(x,y) on [0, 1]^2.

    This is the inverse kernel of the one-dimensional Dirichlet Laplacian, so
    its eigenvalues are 1/(k pi)^2 with eigenfunctions sqrt(2) sin(k pi x).
    """
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError("triangular kernel is defined on [0, 1]^2")
    if y <= x:
        return (1.0 - x) * y
    return x * (1.0 - y)


def triangular_eigensystem(k: int):
    """Analytic eigenpair of the triangular kernel: (1/(k pi)^2, sqrt(2) sin(k pi x))."""
    if k < 1:
        raise ValueError("mode index k starts at 1")
    lam = 1.0 / (k * math.pi) ** 2

    def psi(x):
        return math.sqrt(2.0) * np.sin(k * math.pi * np.asarray(x, dtype=float))

    return lam, psi


@dataclass(frozen=True)
class SincKernel:
    """Bandlimiting kernel sin(c (x - y)) / (pi (x - y)) with bandwidth c > 0."""

    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("sinc kernel needs c > 0")

    def __call__(self, x: float, y: float) -> float:
        d = x - y
        if abs(d) <= 1e-12:
            return self.c / math.pi
        return math.sin(self.c * d) / (math.pi * d)


class TabulatedKernel:
    """Kernel given by symmetric samples on a fixed quadrature grid."""

    def __init__(self, grid: QuadratureGrid, samples):
        samples = np.asarray(samples, dtype=float)
        if samples.shape != (grid.size, grid.size):
            raise ValueError("sample matrix must be square and match the grid")
        scale = max(float(np.max(np.abs(samples))), 1.0)
        if float(np.max(np.abs(samples - samples.T))) > 1e-12 * scale:
            raise ValueError("tabulated samples must be symmetric within 1e-12")
        self.grid = grid
        self.samples = 0.5 * (samples + samples.T)
        self._index = {float(x): i for i, x in enumerate(grid.nodes)}

    def _locate(self, x: float) -> int:
        i = int(np.argmin(np.abs(self.grid.nodes - x)))
        if abs(self.grid.nodes[i] - x) > 1e-12:
            raise ValueError("tabulated kernel can only be evaluated at its own nodes")
        return i

    def __call__(self, x: float, y: float) -> float:
        return float(self.samples[self._locate(x), self._locate(y)])


@dataclass
class KernelSpec:
    """Parsed kernel description: which kernel, on which interval."""

    kind: str
    c: float | None = None
    a: float = 0.0
    b: float = 1.0
    table: TabulatedKernel | None = None

    def kernel(self):
        if self.kind == "triangular":
            return triangular_kernel
        if self.kind == "sinc":
            return SincKernel(self.c)
        return self.table

    def analytic_eigenvalue(self, k: int) -> float | None:
        """Closed-form eigenvalue where one is known (triangular only)."""
        if self.kind == "triangular":
            return triangular_eigensystem(k)[0]
        return None


def _parse_params(text: str) -> dict:
    params = {}
    for chunk in text.split(","):
        if not chunk:
            continue
        if "=" not in chunk:
            raise ValueError(f"malformed kernel parameter {chunk!r}")
        key, _, value = chunk.partition("=")
        params[key.strip()] = value.strip()
    return params


def parse_kernel(text: str) -> KernelSpec:
    """Parse a kernel string: 'triangular', 'sinc:c=10[,a=-1,b=1]', 'tabulated:FILE'."""
    head, _, rest = text.partition(":")
    head = head.strip()
    if head == "triangular":
        if rest:
            raise ValueError("triangular kernel takes no parameters")
        return KernelSpec("triangular", a=0.0, b=1.0)
    if head == "sinc":
        params = _parse_params(rest)
        unknown = set(params) - {"c", "a", "b"}
        if unknown:
            raise ValueError(f"unknown sinc parameters: {sorted(unknown)}")
        if "c" not in params:
            raise ValueError("sinc kernel requires c=...")
        try:
            c = float(params["c"])
            a = float(params.get("a", -1.0))
            b = float(params.get("b", 1.0))
        except ValueError as exc:
            raise ValueError(f"bad sinc parameter: {exc}") from exc
        if not c > 0:
            raise ValueError("sinc kernel needs c > 0")
        if not a < b:
            raise ValueError("sinc interval must satisfy a < b")
        return KernelSpec("sinc", c=c, a=a, b=b)
    if head == "tabulated":
        if not rest:
            raise ValueError("tabulated kernel requires a file path")
        with open(rest, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
        grid = QuadratureGrid(
            float(raw["a"]),
            float(raw["b"]),
            np.asarray(raw["nodes"], dtype=float),
            np.asarray(raw["weights"], dtype=float),
        )
        table = TabulatedKernel(grid, np.asarray(raw["samples"], dtype=float))
        return KernelSpec("tabulated", a=grid.a, b=grid.b, table=table)
    raise ValueError(f"unknown kernel {head!r}")


# ---------------------------------------------------------------------------
# Commuting differential operator for the sinc kernel.
#
# The operator -d/dx[(1 - x^2) d/dx] + c^2 x^2 on [-1, 1] commutes with the
# bandlimiting kernel and shares its eigenfunctions.  In the orthonormal
# Legendre basis the first term is diagonal with entries m(m+1) and
# multiplication by x is the tridiagonal Jacobi matrix with off-diagonal
# a_m = m / sqrt(4 m^2 - 1), so x^2 contributes the pentadiagonal square of
# that matrix.  Even and odd degrees decouple, which keeps the spectrum clean.
# ---------------------------------------------------------------------------


@dataclass
class ProlateSpectrum:
    """Eigenvalues chi_0 < chi_1 < ... of the commuting differential operator."""

    c: float
    chi: np.ndarray
    basis_order: int

    def __post_init__(self):
        self.chi = np.asarray(self.chi, dtype=float)
        if not self.c > 0:
            raise ValueError("bandwidth c must be positive")
        if np.any(self.chi <= 0):
            raise ValueError("operator eigenvalues must be positive")
        if np.any(np.diff(self.chi) <= 0):
            raise ValueError("operator eigenvalues must be strictly increasing")


def _prolate_matrix(c: float, order: int) -> SymmetricOperatorMatrix:
    m = np.arange(order, dtype=float)
    # Off-diagonal of multiplication-by-x in the normalized Legendre basis:
    # a_m = m / sqrt(4 m^2 - 1), with a_0 = 0.
    a = np.zeros(order)
    a[1:] = m[1:] / np.sqrt(4.0 * m[1:] ** 2 - 1.0)
    a_next = (m + 1.0) / np.sqrt(4.0 * (m + 1.0) ** 2 - 1.0)
    entries = np.zeros((order, order))
    diag = m * (m + 1.0) + c * c * (a * a + a_next * a_next)
    entries[np.arange(order), np.arange(order)] = diag
    for i in range(order - 2):
        coupling = c * c * a_next[i] * a_next[i + 1]
        entries[i, i + 2] = coupling
        entries[i + 2, i] = coupling
    return SymmetricOperatorMatrix(entries)


def _prolate_chi_raw(c: float, count: int, order: int) -> np.ndarray:
    lam, _ = eigh(_prolate_matrix(c, order))
    return np.sort(lam)[:count]


def prolate_eigenvalues(c: float, count: int, basis_order: int | None = None) -> ProlateSpectrum:
    """Smallest `count` eigenvalues of the commuting operator for bandwidth c.

    The basis order defaults to count + 30 and doubles automatically until
    the last requested eigenvalue is stable under adding 10 more basis
    functions; an explicitly passed basis_order is checked once and raises
    ResolutionError if it is too small.
    """
    if not c > 0:
        raise ValueError("bandwidth c must be positive")
    if count < 1:
        raise ValueError("count must be at least 1")

    def stable(order: int) -> np.ndarray | None:
        chi = _prolate_chi_raw(c, count, order)
        chi_check = _prolate_chi_raw(c, count, order + 10)
        shift = float(np.max(np.abs(chi - chi_check)))
        scale = max(float(np.abs(chi[-1])), 1.0)
        if shift <= 1e-8 * scale:
            return chi_check
        return None

    if basis_order is not None:
        if basis_order < count + 10:
            raise ValueError("basis_order must be at least count + 10")
        chi = stable(basis_order)
        if chi is None:
            raise ResolutionError(
                f"basis_order {basis_order} leaves chi_{count - 1} unresolved"
            )
        return ProlateSpectrum(c, chi, basis_order)

    order = count + 30
    for _ in range(6):
        chi = stable(order)
        if chi is not None:
            return ProlateSpectrum(c, chi, order)
        order *= 2
    raise ResolutionError(f"operator eigenvalues did not stabilize by order {order}")


def prolate_modes(c: float, count: int, basis_order: int | None = None):
    """Spectrum plus normalized-Legendre coefficient rows of the eigenfunctions."""
    spectrum = prolate_eigenvalues(c, count, basis_order)
    order = spectrum.basis_order
    lam, vectors = eigh(_prolate_matrix(c, order))
    idx = np.argsort(lam)[:count]
    return spectrum, vectors[idx]


def legendre_series(coefficients, x) -> np.ndarray:
    """Evaluate sum_m coeff[m] * sqrt(m + 1/2) * P_m(x)."""
    coefficients = np.asarray(coefficients, dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    p_prev = np.ones_like(x)
    p = x.copy()
    for m in range(coefficients.size):
        if m == 0:
            base = p_prev
        elif m == 1:
            base = p
        else:
            p_prev, p = p, ((2 * m - 1) * x * p - (m - 1) * p_prev) / m
            base = p
        out += coefficients[m] * math.sqrt(m + 0.5) * base
    return out


def shannon_number(omega: float, X: float) -> float:
    """Time-bandwidth mode count omega * X / pi for the band [-omega, omega]
    restricted to an interval of length X."""
    if not (omega > 0 and X > 0):
        raise ValueError("omega and X must be positive")
    return omega * X / math.pi


def plateau_count(eigenvalues, threshold: float) -> int:
    """Number of eigenvalues at or above threshold in a non-increasing sequence."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if eigenvalues.ndim != 1 or eigenvalues.size == 0:
        raise ValueError("eigenvalues must be a non-empty 1-d sequence")
    scale = float(np.max(np.abs(eigenvalues)))
    if np.any(np.diff(eigenvalues) > 1e-12 * max(scale, 1.0)):
        raise ValueError("eigenvalues must be non-increasing")
    return int(np.sum(eigenvalues >= threshold))
