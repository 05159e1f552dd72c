"""Stability estimates for the constrained inverse problem.

The object of interest is the worst-case norm sup { ||f|| : ||A f|| <= eps,
||B f|| <= E }.  When the spectra satisfy lambda_k^2 >= beta_k^2 p(1/beta_k^2)
for a convex p with p(r)/r increasing and p(0+) = 0, a Jensen argument caps
that supremum by E sqrt(p^{-1}(eps^2 / E^2)).  Two presets cover the classical
regimes: power-law p gives Holder continuity, the exp-log p gives the far
weaker logarithmic modulus.  In finite mode space the supremum itself is a
two-constraint linear program over u_k = f_k^2, so an exact vertex-enumeration
oracle is available to keep the analytic bound honest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .regularize import ConstraintSequence, _validate_eigenvalues

__all__ = [
    "PFunction",
    "p_eval",
    "p_inverse",
    "check_condition",
    "stability_bound",
    "stability_sup_exact",
    "classify_continuity",
    "ContinuityFit",
    "StabilityReport",
    "stability_report",
    "parse_pfunction",
]

# Convexity of 4 r exp(-2/r) holds only up to r = 2/3; the preset refuses to
# invert beyond the value it takes there.
EXPLOG_R_MAX = 2.0 / 3.0


class PFunction:
    """A comparison function r -> p(r) used by the stability machinery."""

    def __init__(self, kind: str, *, gamma: float = 0.0, rs=None, ps=None):
        self.kind = kind
        self.gamma = float(gamma)
        self.rs = None if rs is None else np.asarray(rs, dtype=float)
        self.ps = None if ps is None else np.asarray(ps, dtype=float)
        if kind == "power" and not 0 < self.gamma < 1:
            raise ValueError("power preset needs 0 < gamma < 1")
        if kind == "custom":
            if self.rs is None or self.ps is None:
                raise ValueError("custom preset needs tabulated rs and ps")
            if self.rs.ndim != 1 or self.rs.shape != self.ps.shape or self.rs.size < 3:
                raise ValueError("custom tables need matching shapes, length >= 3")
            if np.any(np.diff(self.rs) <= 0) or np.any(np.diff(self.ps) <= 0):
                raise ValueError("custom tables must be strictly increasing")
            if np.any(self.rs <= 0) or np.any(self.ps <= 0):
                raise ValueError("custom tables must be positive")
            ratio = self.ps / self.rs
            if np.any(np.diff(ratio) < -1e-12 * np.max(ratio)):
                raise ValueError("custom table violates p(r)/r increasing")
            if self.rs.size >= 3:
                second = np.diff(np.diff(self.ps) / np.diff(self.rs))
                if np.any(second < -1e-12 * np.max(np.abs(self.ps))):
                    raise ValueError("custom table is not convex")

    @classmethod
    def power(cls, gamma: float) -> "PFunction":
        """p(r) = r^(1/gamma); inverse s^gamma (Holder regime)."""
        return cls("power", gamma=gamma)

    @classmethod
    def explog(cls) -> "PFunction":
        """p(r) = 4 r exp(-2/r) (logarithmic regime), convex on (0, 2/3]."""
        return cls("explog")

    @classmethod
    def custom(cls, rs, ps) -> "PFunction":
        return cls("custom", rs=rs, ps=ps)

    def describe(self) -> str:
        if self.kind == "power":
            return f"power:gamma={self.gamma:g}"
        return self.kind


def parse_pfunction(text: str) -> PFunction:
    """Parse 'power:gamma=0.333' or 'explog'."""
    head, _, rest = text.partition(":")
    head = head.strip()
    if head == "explog":
        if rest:
            raise ValueError("explog takes no parameters")
        return PFunction.explog()
    if head == "power":
        params = {}
        for chunk in rest.split(","):
            if not chunk:
                continue
            key, _, value = chunk.partition("=")
            try:
                params[key.strip()] = float(value)
            except ValueError as exc:
                raise ValueError(f"bad parameter {chunk!r}") from exc
        if "gamma" not in params:
            raise ValueError("power preset requires gamma=...")
        return PFunction.power(params["gamma"])
    raise ValueError(f"unknown p function {head!r}")


def p_eval(p: PFunction, r: float) -> float:
    if r < 0:
        raise ValueError("p is defined for r >= 0")
    if r == 0.0:
        return 0.0
    if p.kind == "power":
        return r ** (1.0 / p.gamma)
    if p.kind == "explog":
        return 4.0 * r * math.exp(-2.0 / r)
    if p.kind == "custom":
        if not p.rs[0] <= r <= p.rs[-1]:
            raise ValueError("r outside the tabulated range")
        return float(np.interp(r, p.rs, p.ps))
    raise ValueError(f"unknown p function {p.kind!r}")


def p_inverse(p: PFunction, s: float) -> float:
    """Solve p(r) = s for r.

    The power preset inverts in closed form.  The exp-log preset bisects on
    (0, 2/3], exhausting double precision, and refuses s above p(2/3) where
    convexity is lost.  Custom tables invert by linear interpolation.
    """
    if s < 0:
        raise ValueError("p takes non-negative values")
    if s == 0.0:
        return 0.0
    if p.kind == "power":
        return s**p.gamma
    if p.kind == "explog":
        cap = p_eval(p, EXPLOG_R_MAX)
        if s > cap:
            raise ValueError(
                f"s={s:g} above the invertible range (p(2/3) = {cap:.6g})"
            )
        lo, hi = 0.0, EXPLOG_R_MAX
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if p_eval(p, mid) < s:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
    if p.kind == "custom":
        if not p.ps[0] <= s <= p.ps[-1]:
            raise ValueError("s outside the tabulated range")
        return float(np.interp(s, p.ps, p.rs))
    raise ValueError(f"unknown p function {p.kind!r}")


def check_condition(eigenvalues, beta, p: PFunction, K: int) -> tuple[bool, int | None]:
    """Does lambda_k^2 >= beta_k^2 p(beta_k^-2) hold for k = 1..K?

    Returns (ok, first violating k or None).  A relative slack of 1e-9
    absorbs round-off in the equality case.
    """
    lam = _validate_eigenvalues(eigenvalues)
    if not 1 <= K <= lam.size:
        raise ValueError("K must lie in [1, number of modes]")
    betas = beta.values(K) if isinstance(beta, ConstraintSequence) else np.asarray(beta, dtype=float)[:K]
    if betas.shape != (K,) or np.any(betas <= 0):
        raise ValueError("need K positive constraint weights")
    for k in range(K):
        lhs = lam[k] ** 2
        rhs = betas[k] ** 2 * p_eval(p, 1.0 / betas[k] ** 2)
        if lhs < rhs * (1.0 - 1e-9):
            return False, k + 1
    return True, None


def stability_bound(eps: float, E: float, p: PFunction) -> float:
    """Jensen-style cap E sqrt(p^{-1}(eps^2 / E^2)) on the worst-case norm."""
    if eps <= 0 or E <= 0:
        raise ValueError("need eps > 0 and E > 0")
    return E * math.sqrt(p_inverse(p, (eps / E) ** 2))


def stability_sup_exact(eigenvalues, beta, eps: float, E: float, K: int | None = None) -> float:
    """Exact sup { ||f|| : ||lambda f|| <= eps, ||beta f|| <= E } over K modes.

    In u_k = f_k^2 this is a linear program with two resource constraints, so
    the optimum sits on a vertex supported on at most two modes: enumerate
    every single mode and every pair with both constraints active.
    """
    lam = _validate_eigenvalues(eigenvalues)
    if eps <= 0 or E <= 0:
        raise ValueError("need eps > 0 and E > 0")
    if K is None:
        K = lam.size
    if not 1 <= K <= lam.size:
        raise ValueError("K must lie in [1, number of modes]")
    betas = beta.values(K) if isinstance(beta, ConstraintSequence) else np.asarray(beta, dtype=float)[:K]
    lam2 = lam[:K] ** 2
    bet2 = betas**2
    e2 = eps * eps
    E2 = E * E

    best = float(np.max(np.minimum(e2 / lam2, E2 / bet2)))

    # Pair vertices: both constraints active on modes (i, j).  Degenerate
    # vertices (a zero coordinate) coincide with single-mode candidates, so
    # only strictly non-negative solutions of well-conditioned pairs matter.
    li = lam2[:, None]
    lj = lam2[None, :]
    bi = bet2[:, None]
    bj = bet2[None, :]
    det = li * bj - lj * bi
    cond_scale = li * bj + lj * bi
    with np.errstate(divide="ignore", invalid="ignore"):
        ui = (e2 * bj - E2 * lj) / det
        uj = (E2 * li - e2 * bi) / det
    upper = np.triu(np.ones((K, K), dtype=bool), k=1)
    valid = upper & (np.abs(det) > 1e-12 * cond_scale) & (ui >= 0.0) & (uj >= 0.0)
    if np.any(valid):
        best = max(best, float(np.max(ui[valid] + uj[valid])))
    return math.sqrt(best)


@dataclass
class ContinuityFit:
    """Classification of a noise-to-error sweep as Holder or logarithmic."""

    model: str
    exponent: float
    residual: float
    alt_residual: float


def classify_continuity(eps_grid, sup_values) -> ContinuityFit:
    """Fit log(sup) against log(eps) and against log |log(eps/2)|.

    Whichever regression leaves the smaller residual names the continuity
    modulus; its slope is the reported exponent (the Holder exponent in the
    power case, the logarithm power otherwise).
    """
    eps_grid = np.asarray(eps_grid, dtype=float)
    sup_values = np.asarray(sup_values, dtype=float)
    if eps_grid.shape != sup_values.shape or eps_grid.ndim != 1:
        raise ValueError("grids must be matching 1-d arrays")
    if eps_grid.size < 5:
        raise ValueError("need at least five grid points")
    if np.any(np.diff(eps_grid) >= 0):
        raise ValueError("eps grid must be strictly decreasing")
    if np.any(eps_grid <= 0) or np.any(eps_grid >= 1) or np.any(sup_values <= 0):
        raise ValueError("need 0 < eps < 1 and positive sup values")

    y = np.log(sup_values)
    if float(np.ptp(y)) < 1e-13:
        raise ValueError("sup values are constant: unclassifiable")

    def fit(x):
        A = np.stack([x, np.ones_like(x)], axis=1)
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        resid = float(np.sum((A @ coef - y) ** 2))
        return float(coef[0]), resid

    slope_h, resid_h = fit(np.log(eps_grid))
    slope_l, resid_l = fit(np.log(np.abs(np.log(eps_grid / 2.0))))
    if resid_h <= resid_l:
        return ContinuityFit("holder", slope_h, resid_h, resid_l)
    return ContinuityFit("logarithmic", slope_l, resid_l, resid_h)


@dataclass
class StabilityReport:
    """One sweep row: analytic bound vs exact supremum at (eps, E)."""

    eps: float
    E: float
    bound: float
    exact_sup: float | None
    condition_ok: bool
    first_violation: int | None


def stability_report(eigenvalues, beta, p: PFunction, eps: float, E: float,
                     K: int | None = None) -> StabilityReport:
    lam = _validate_eigenvalues(eigenvalues)
    if K is None:
        K = lam.size
    ok, first = check_condition(lam, beta, p, K)
    bound = stability_bound(eps, E, p)
    exact = stability_sup_exact(lam, beta, eps, E, K)
    return StabilityReport(eps, E, bound, exact, ok, first)
