"""Positive basis systems that form partitions of unity.

Three constructions are provided: Bernstein polynomials, clamped B-splines
(Cox-de Boor recursion), and piecewise-linear hat functions. Each returns a
:class:`BasisSystem`, an ordered family ``e_1 .. e_n`` of nonnegative
functions whose pointwise sum is the constant one on the domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .checks import CheckResult
from .errors import ConfigError
from .functions import Function, ClosedForm, SampledFunction, Interval, UNIT_INTERVAL

#: Default tolerance for partition-of-unity verification.
TOL_POU = 1e-10

#: Default number of verification grid points.
DEFAULT_GRID_POINTS = 1001

#: Degree above which Bernstein evaluation switches from the explicit
#: binomial formula to the triangular recurrence.
BERNSTEIN_RECURRENCE_DEGREE = 30


@dataclass(frozen=True)
class BasisSystem:
    """Ordered family of basis functions on a shared domain."""

    functions: tuple[Function, ...]
    domain: Interval
    name: str

    def __post_init__(self):
        if len(self.functions) < 1:
            raise ConfigError("basis system needs at least one function")

    @property
    def n(self) -> int:
        """Number of basis functions (the rank bound of any built operator)."""
        return len(self.functions)

    def values(self, xs: Sequence[float] | np.ndarray) -> np.ndarray:
        """Evaluate all basis functions on ``xs``; shape ``(n, len(xs))``."""
        return np.vstack([e.values(xs) for e in self.functions])

    def __repr__(self) -> str:
        return f"BasisSystem({self.name!r}, n={self.n})"


# --------------------------------------------------------------------------
# Bernstein basis
# --------------------------------------------------------------------------

def _bernstein_values(n: int, k: int, xs: np.ndarray) -> np.ndarray:
    if n <= BERNSTEIN_RECURRENCE_DEGREE:
        return float(math.comb(n, k)) * xs ** k * (1.0 - xs) ** (n - k)
    # Triangular recurrence: numerically stable for large n where the
    # binomial coefficients overflow intermediate products.
    row = [np.ones_like(xs)]
    for nu in range(1, n + 1):
        nxt = [(1.0 - xs) * row[0]]
        for j in range(1, nu):
            nxt.append((1.0 - xs) * row[j] + xs * row[j - 1])
        nxt.append(xs * row[-1])
        row = nxt
    return row[k]


def make_bernstein_basis(n: int) -> BasisSystem:
    """Bernstein basis of degree ``n`` on [0, 1]: the ``n + 1`` functions
    ``C(n, k) x^k (1 - x)^(n - k)``, ``k = 0 .. n``."""
    if n < 1:
        raise ConfigError(f"Bernstein degree must be >= 1, got {n}")
    funcs = tuple(
        ClosedForm(f"b[{n},{k}]", lambda xs, k=k: _bernstein_values(n, k, xs))
        for k in range(n + 1)
    )
    return BasisSystem(funcs, UNIT_INTERVAL, name=f"bernstein({n})")


# --------------------------------------------------------------------------
# B-spline basis (clamped, Cox-de Boor)
# --------------------------------------------------------------------------

def clamped_knots(breakpoints: Sequence[float], degree: int) -> np.ndarray:
    """Full clamped knot vector from strictly increasing breakpoints:
    the first and last breakpoints are repeated ``degree + 1`` times."""
    bp = np.asarray(breakpoints, dtype=float)
    if bp.ndim != 1 or bp.size < 2:
        raise ConfigError("need at least two breakpoints")
    if np.any(np.diff(bp) <= 0):
        raise ConfigError("breakpoints must be strictly increasing")
    if degree < 0:
        raise ConfigError("degree must be >= 0")
    return np.concatenate((np.repeat(bp[0], degree), bp, np.repeat(bp[-1], degree)))


def _bspline_values(knots: np.ndarray, i: int, degree: int, xs: np.ndarray) -> np.ndarray:
    hi = knots[-1]
    if degree == 0:
        # Right-closed on the last nonempty span so the basis covers x = hi.
        inside = (knots[i] <= xs) & ((xs < knots[i + 1]) | ((xs == hi) & (knots[i + 1] == hi)))
        return inside.astype(float)
    out = np.zeros_like(xs)
    left_den = knots[i + degree] - knots[i]
    if left_den > 0.0:
        out += (xs - knots[i]) / left_den * _bspline_values(knots, i, degree - 1, xs)
    right_den = knots[i + degree + 1] - knots[i + 1]
    if right_den > 0.0:
        out += (knots[i + degree + 1] - xs) / right_den * _bspline_values(
            knots, i + 1, degree - 1, xs)
    return out


def make_bspline_basis(knots: Sequence[float], degree: int) -> BasisSystem:
    """B-spline basis for a clamped knot vector.

    ``knots`` must be the full nondecreasing vector with the first and last
    values each repeated ``degree + 1`` times; the 0/0 convention of the
    Cox-de Boor recursion is resolved to 0. The partition of unity holds on
    the whole clamped range ``[knots[degree], knots[-degree - 1]]``.
    """
    t = np.asarray(knots, dtype=float)
    if degree < 0:
        raise ConfigError(f"degree must be >= 0, got {degree}")
    if t.ndim != 1 or t.size < 2 * (degree + 1):
        raise ConfigError(
            f"need at least {2 * (degree + 1)} knots for degree {degree}, got {t.size}")
    if np.any(np.diff(t) < 0):
        raise ConfigError("knot vector must be nondecreasing")
    n_basis = t.size - degree - 1
    if not (np.all(t[:degree + 1] == t[0]) and np.all(t[-degree - 1:] == t[-1])):
        raise ConfigError(
            f"knot vector must be clamped: first and last knot repeated {degree + 1} times")
    if t[degree] >= t[-degree - 1]:
        raise ConfigError("knot vector has no interior span")
    t = t.copy()
    t.flags.writeable = False
    domain = Interval(float(t[degree]), float(t[-degree - 1]))
    funcs = tuple(
        ClosedForm(f"N[{i},{degree}]", lambda xs, i=i: _bspline_values(t, i, degree, xs),
                   domain=domain)
        for i in range(n_basis)
    )
    return BasisSystem(funcs, domain, name=f"bspline(deg {degree}, {t.size} knots)")


# --------------------------------------------------------------------------
# Hat basis
# --------------------------------------------------------------------------

def make_hat_basis(nodes: Sequence[float], domain: Interval = UNIT_INTERVAL) -> BasisSystem:
    """Piecewise-linear nodal basis over a partition of the domain.

    One hat per node, ``e_k(x_j) = delta_kj``; the partition of unity is
    exact since linear interpolation reproduces the constant one.
    """
    pts = np.asarray(nodes, dtype=float)
    if pts.ndim != 1 or pts.size < 2:
        raise ConfigError("hat basis needs at least 2 nodes")
    if np.any(np.diff(pts) <= 0):
        raise ConfigError("hat basis nodes must be strictly increasing")
    if pts[0] != domain.lo or pts[-1] != domain.hi:
        raise ConfigError(
            f"hat basis nodes must span the domain [{domain.lo}, {domain.hi}] exactly")
    funcs = []
    for k in range(pts.size):
        unit = np.zeros(pts.size)
        unit[k] = 1.0
        funcs.append(SampledFunction(pts, unit, name=f"hat[{k}]", domain=domain))
    return BasisSystem(tuple(funcs), domain, name=f"hat({pts.size})")


# --------------------------------------------------------------------------
# Verification
# --------------------------------------------------------------------------

def check_partition_of_unity(basis: BasisSystem, grid: np.ndarray | None = None,
                             tol: float = TOL_POU) -> CheckResult:
    """Max deviation of ``sum_k e_k`` from one over the grid."""
    if grid is None:
        grid = basis.domain.grid(DEFAULT_GRID_POINTS)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ConfigError("partition-of-unity check needs a non-empty grid")
    sums = basis.values(grid).sum(axis=0)
    dev = np.abs(sums - 1.0)
    worst = int(np.argmax(dev))
    return CheckResult(
        name="partition_of_unity",
        passed=bool(dev[worst] <= tol),
        value=float(dev[worst]),
        threshold=tol,
        worst_x=float(grid[worst]),
    )


def check_nonnegativity(basis: BasisSystem, grid: np.ndarray | None = None,
                        tol: float = TOL_POU) -> CheckResult:
    """Minimum of any basis function over the grid; passes iff >= -tol."""
    if grid is None:
        grid = basis.domain.grid(DEFAULT_GRID_POINTS)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ConfigError("nonnegativity check needs a non-empty grid")
    vals = basis.values(grid)
    k, j = np.unravel_index(np.argmin(vals), vals.shape)
    return CheckResult(
        name="nonnegativity",
        passed=bool(vals[k, j] >= -tol),
        value=float(vals[k, j]),
        threshold=tol,
        worst_x=float(grid[j]),
        detail=f"attained by basis function {int(k)}",
    )
