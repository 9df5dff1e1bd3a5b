"""Positive finite-rank operators ``Tf = sum_k a_k(f) e_k`` and their checks.

An :class:`OperatorSpec` pairs a partition-of-unity basis with one
normalized positive functional per basis function. The catalog factories
cover point-evaluation operators on Bernstein and hat bases, the
Kantorovich operator (cell averages against the Bernstein basis), and the
Schoenberg variational operator (point evaluation at Greville abscissae
against a clamped B-spline basis).

The verification helpers measure, on a fixed grid and with seeded random
test functions: constant reproduction, positivity, the unit operator norm,
the adjoint pairing identity, and an explicit nonzero kernel witness.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from typing import Sequence

import numpy as np

from .bases import (BasisSystem, DEFAULT_GRID_POINTS, check_nonnegativity,
                    check_partition_of_unity, make_bernstein_basis,
                    make_bspline_basis, make_hat_basis)
from .checks import CheckResult
from .errors import ConfigError, NotConstructibleError
from .functions import (BasisCombination, ClosedForm, Function, ONE,
                        random_function)
from .functionals import (DiracFunctional, Functional, IntervalAverageFunctional,
                          WeightedQuadratureFunctional,
                          check_functional_normalization,
                          make_kantorovich_functionals)

#: Residual bound a kernel witness must meet on the verification grid.
WITNESS_RESIDUAL_TOL = 1e-10

#: Minimal sup norm a kernel witness must have (it is nonzero by a margin).
WITNESS_MIN_NORM = 0.5


@dataclass(frozen=True)
class OperatorSpec:
    """Basis plus functionals of equal count; immutable once built.

    With ``validate=True`` (the default) construction verifies the partition
    of unity, basis nonnegativity, and the normalization of every
    functional; pass ``validate=False`` to build deliberately broken
    operators for failure-path tests.
    """

    basis: BasisSystem
    functionals: tuple[Functional, ...]
    name: str = "operator"
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool):
        object.__setattr__(self, "functionals", tuple(self.functionals))
        if len(self.functionals) != self.basis.n:
            raise ConfigError(
                f"{self.name}: basis has {self.basis.n} functions but "
                f"{len(self.functionals)} functionals were given")
        if validate:
            pou = check_partition_of_unity(self.basis)
            if not pou.passed:
                raise ConfigError(
                    f"{self.name}: basis violates the partition of unity "
                    f"(deviation {pou.value:.3e} at x={pou.worst_x:.6g})")
            nn = check_nonnegativity(self.basis)
            if not nn.passed:
                raise ConfigError(
                    f"{self.name}: basis takes negative values "
                    f"({nn.value:.3e} at x={nn.worst_x:.6g})")
            for k, functional in enumerate(self.functionals):
                norm = check_functional_normalization(functional)
                if not norm.passed:
                    raise ConfigError(
                        f"{self.name}: functional {k} ({functional.name}) fails "
                        f"normalization (deviation {norm.value:.3e})")

    @property
    def n(self) -> int:
        return self.basis.n


# --------------------------------------------------------------------------
# Catalog operators
# --------------------------------------------------------------------------

def bernstein_operator(n: int) -> OperatorSpec:
    """Point-evaluation operator on the Bernstein basis: samples at the
    equally spaced nodes ``k/n``."""
    basis = make_bernstein_basis(n)
    funcs = tuple(DiracFunctional(k / n) for k in range(n + 1))
    return OperatorSpec(basis, funcs, name=f"bernstein(n={n})")


def kantorovich_operator(n: int) -> OperatorSpec:
    """Cell averages over the ``n + 1`` equal subintervals paired with the
    Bernstein basis of degree ``n``."""
    basis = make_bernstein_basis(n)
    return OperatorSpec(basis, make_kantorovich_functionals(n),
                        name=f"kantorovich(n={n})")


def greville_abscissae(knots: Sequence[float], degree: int) -> np.ndarray:
    """Knot averages ``(t_{k+1} + ... + t_{k+degree}) / degree`` for each
    basis function of a clamped knot vector."""
    t = np.asarray(knots, dtype=float)
    if degree < 1:
        raise ConfigError(f"Greville abscissae need degree >= 1, got {degree}")
    n_basis = t.size - degree - 1
    return np.array([t[k + 1:k + degree + 1].mean() for k in range(n_basis)])


def schoenberg_operator(knots: Sequence[float], degree: int) -> OperatorSpec:
    """Point evaluation at the Greville abscissae against the clamped
    B-spline basis for ``knots``."""
    basis = make_bspline_basis(knots, degree)
    nodes = greville_abscissae(knots, degree)
    funcs = tuple(DiracFunctional(x) for x in nodes)
    return OperatorSpec(basis, funcs, name=f"schoenberg(deg {degree}, n={basis.n})")


def hat_dirac_operator(nodes: Sequence[float]) -> OperatorSpec:
    """Nodal interpolation: hat basis over a partition with point evaluation
    at the same nodes. Its collocation matrix is the identity."""
    basis = make_hat_basis(nodes)
    funcs = tuple(DiracFunctional(x) for x in np.asarray(nodes, dtype=float))
    return OperatorSpec(basis, funcs, name=f"hat-dirac({basis.n})")


# --------------------------------------------------------------------------
# Application
# --------------------------------------------------------------------------

def coefficient_vector(op: OperatorSpec, f: Function) -> np.ndarray:
    """The vector ``(a_k(f))_k`` of functional applications."""
    return np.array([functional(f) for functional in op.functionals])


def apply_operator(op: OperatorSpec, f: Function) -> BasisCombination:
    """``Tf`` as a basis combination; the coefficient vector rides along on
    the result for reuse."""
    coeffs = coefficient_vector(op, f)
    return BasisCombination(op.basis, coeffs, name=f"T[{op.name}]({f.name})")


def apply_adjoint(op: OperatorSpec, dual: Functional, f: Function) -> float:
    """Adjoint pairing ``sum_k dual(e_k) a_k(f)``; equals ``dual(Tf)``."""
    dual_on_basis = np.array([dual(e) for e in op.basis.functions])
    return float(dual_on_basis @ coefficient_vector(op, f))


def operator_power_apply(op: OperatorSpec, f: Function, m: int) -> BasisCombination:
    """``T^m f`` through the coefficient recursion ``a <- M a`` applied
    ``m - 1`` times, followed by a single basis combination."""
    if m < 1:
        raise ConfigError(f"power must be >= 1, got {m}")
    from .spectra import build_collocation_matrix
    coeffs = coefficient_vector(op, f)
    if m > 1:
        matrix = build_collocation_matrix(op).entries
        for _ in range(m - 1):
            coeffs = matrix @ coeffs
    return BasisCombination(op.basis, coeffs, name=f"T^{m}[{op.name}]({f.name})")


# --------------------------------------------------------------------------
# Lemma verification
# --------------------------------------------------------------------------

def verify_constant_reproduction(op: OperatorSpec, grid: np.ndarray | None = None,
                                 tol: float = WITNESS_RESIDUAL_TOL) -> CheckResult:
    """Max deviation of ``T1`` from one on the grid."""
    if grid is None:
        grid = op.basis.domain.grid(DEFAULT_GRID_POINTS)
    values = apply_operator(op, ONE).values(grid)
    dev = np.abs(values - 1.0)
    worst = int(np.argmax(dev))
    return CheckResult(
        name="constant_reproduction",
        passed=bool(dev[worst] <= tol),
        value=float(dev[worst]),
        threshold=tol,
        worst_x=float(grid[worst]),
    )


def verify_positivity(op: OperatorSpec, trials: int = 100,
                      tol: float = WITNESS_RESIDUAL_TOL, seed: int = 42,
                      grid_points: int = DEFAULT_GRID_POINTS) -> CheckResult:
    """Minimum of ``Tf`` over the grid across seeded nonnegative ``f``."""
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    grid = op.basis.domain.grid(grid_points)
    worst_val = np.inf
    worst_x = None
    worst_name = ""
    for _ in range(trials):
        f = random_function(rng, nonnegative=True)
        values = apply_operator(op, f).values(grid)
        j = int(np.argmin(values))
        if values[j] < worst_val:
            worst_val = float(values[j])
            worst_x = float(grid[j])
            worst_name = f.name
    return CheckResult(
        name="positivity",
        passed=bool(worst_val >= -tol),
        value=worst_val,
        threshold=tol,
        worst_x=worst_x,
        detail=f"worst over {trials} nonnegative samples, at f = {worst_name}",
    )


def estimate_operator_norm(op: OperatorSpec, trials: int = 200, seed: int = 42,
                           grid_points: int = DEFAULT_GRID_POINTS) -> float:
    """Max of ``||Tf||_inf / ||f||_inf`` over the constant one plus seeded
    random test functions (sup norms on the grid). The constant attains the
    exact norm 1, so the estimate is a tight lower bound of it."""
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    grid = op.basis.domain.grid(grid_points)
    best = 0.0
    samples: list[Function] = [ONE]
    samples.extend(random_function(rng) for _ in range(trials))
    for f in samples:
        denom = f.sup_norm(grid)
        if denom < 1e-12:
            continue
        best = max(best, apply_operator(op, f).sup_norm(grid) / denom)
    return float(best)


def verify_norm_bound(op: OperatorSpec, trials: int = 200, seed: int = 42,
                      tol: float = WITNESS_RESIDUAL_TOL,
                      grid_points: int = DEFAULT_GRID_POINTS) -> CheckResult:
    """Norm estimate packaged as a check: passes iff the estimate lies in
    ``[1 - 1e-12, 1 + tol]`` (the unit ball bound, attained at one)."""
    estimate = estimate_operator_norm(op, trials=trials, seed=seed,
                                      grid_points=grid_points)
    passed = 1.0 - 1e-12 <= estimate <= 1.0 + tol
    return CheckResult(
        name="norm_estimate",
        passed=bool(passed),
        value=estimate,
        threshold=tol,
        detail=f"max ||Tf||/||f|| over constant one and {trials} samples",
    )


def verify_adjoint_identity(op: OperatorSpec, pairs: int = 50,
                            tol: float = WITNESS_RESIDUAL_TOL,
                            seed: int = 42) -> CheckResult:
    """Residual ``|T* dual (f) - dual(Tf)|`` over seeded (dual, f) pairs,
    cycling through the three functional kinds for the dual."""
    rng = np.random.default_rng(seed)
    lo, hi = op.basis.domain.lo, op.basis.domain.hi
    worst = 0.0
    for i in range(pairs):
        f = random_function(rng)
        kind = i % 3
        if kind == 0:
            dual: Functional = DiracFunctional(rng.uniform(lo, hi))
        elif kind == 1:
            a, b = np.sort(rng.uniform(lo, hi, size=2))
            if b - a < 1e-3:
                b = min(hi, a + 1e-3)
                a = b - 1e-3
            dual = IntervalAverageFunctional(a, b)
        else:
            nodes = rng.uniform(lo, hi, size=4)
            weights = rng.dirichlet(np.ones(4))
            dual = WeightedQuadratureFunctional(nodes, weights)
        lhs = apply_adjoint(op, dual, f)
        rhs = dual(apply_operator(op, f))
        worst = max(worst, abs(lhs - rhs))
    return CheckResult(
        name="adjoint_identity",
        passed=bool(worst <= tol),
        value=float(worst),
        threshold=tol,
        detail=f"max residual over {pairs} (dual, f) pairs",
    )


# --------------------------------------------------------------------------
# Kernel witness
# --------------------------------------------------------------------------

def _point_annihilation_nodes(functionals: Sequence[Functional]) -> np.ndarray:
    points: list[float] = []
    for functional in functionals:
        if isinstance(functional, DiracFunctional):
            points.append(functional.x)
        else:
            points.extend(functional.nodes.tolist())
    nodes = np.sort(np.asarray(points))
    keep = np.concatenate(([True], np.diff(nodes) > 1e-12))
    return nodes[keep]


def _equally_spaced(values: np.ndarray, lo: float, hi: float) -> bool:
    if values.size < 2 or abs(values[0] - lo) > 1e-12 or abs(values[-1] - hi) > 1e-12:
        return False
    gaps = np.diff(values)
    return bool(np.max(np.abs(gaps - gaps[0])) <= 1e-9)


def kernel_witness(op: OperatorSpec,
                   grid_points: int = DEFAULT_GRID_POINTS) -> Function:
    """A nonzero function annihilated by every functional, so ``Tw = 0``.

    Construction is analytic per functional kind. Point-type functionals
    (Dirac, finite quadrature) are killed by a sine vanishing at all node
    points when those are equally spaced across the domain, and otherwise by
    a normalized product of node-vanishing sine factors. Interval averages
    over non-overlapping cells are killed by one full sine period per cell.
    Mixed point/average families have no such closed form and raise
    :class:`NotConstructibleError`, as does a constructed witness that fails
    its own verification (``||w||_inf >= 0.5`` and ``||Tw||_inf <= 1e-10``).
    """
    lo, hi = op.basis.domain.lo, op.basis.domain.hi
    width = hi - lo
    grid = op.basis.domain.grid(grid_points)

    point_kinds = (DiracFunctional, WeightedQuadratureFunctional)
    all_point = all(isinstance(f, point_kinds) for f in op.functionals)
    all_average = all(isinstance(f, IntervalAverageFunctional) for f in op.functionals)

    if all_point:
        nodes = _point_annihilation_nodes(op.functionals)
        if _equally_spaced(nodes, lo, hi):
            cells = nodes.size - 1
            w: Function = ClosedForm(
                f"sin({cells}pi(x-{lo:g})/{width:g})",
                lambda xs: np.sin(cells * np.pi * (xs - lo) / width),
                domain=op.basis.domain)
        else:
            def product_of_sines(xs: np.ndarray, nodes=nodes) -> np.ndarray:
                out = np.ones_like(xs)
                for x0 in nodes:
                    out *= np.sin(np.pi * (xs - x0) / width)
                return out

            raw = ClosedForm("node-vanishing product", product_of_sines,
                             domain=op.basis.domain)
            peak = raw.sup_norm(grid)
            if peak <= 0.0:
                raise NotConstructibleError(
                    f"{op.name}: node-vanishing product is identically zero "
                    f"on the verification grid")
            w = ClosedForm(f"node-vanishing product ({nodes.size} nodes)",
                           lambda xs: product_of_sines(xs) / peak,
                           domain=op.basis.domain)
    elif all_average:
        cells = sorted(((f.a, f.b) for f in op.functionals), key=lambda c: c[0])
        for (a0, b0), (a1, _) in zip(cells, cells[1:]):
            if b0 > a1 + 1e-12:
                raise NotConstructibleError(
                    f"{op.name}: interval-average supports overlap "
                    f"([{a0:g}, {b0:g}] and [{a1:g}, ...]); no cellwise witness")
        widths = np.array([b - a for a, b in cells])
        starts = np.array([a for a, _ in cells])
        contiguous = (abs(starts[0] - lo) <= 1e-12
                      and abs(cells[-1][1] - hi) <= 1e-12
                      and np.all(np.abs(starts[1:] - np.array(
                          [b for _, b in cells[:-1]])) <= 1e-12))
        if contiguous and np.max(np.abs(widths - widths[0])) <= 1e-9:
            m = len(cells)
            w = ClosedForm(
                f"sin({2 * m}pi(x-{lo:g})/{width:g})",
                lambda xs: np.sin(2.0 * m * np.pi * (xs - lo) / width),
                domain=op.basis.domain)
        else:
            def cellwise_sine(xs: np.ndarray, starts=starts, widths=widths) -> np.ndarray:
                out = np.zeros_like(xs)
                for a, cw in zip(starts, widths):
                    inside = (xs >= a) & (xs <= a + cw)
                    out[inside] = np.sin(2.0 * np.pi * (xs[inside] - a) / cw)
                return out

            w = ClosedForm(f"cellwise sine ({len(cells)} cells)", cellwise_sine,
                           domain=op.basis.domain)
    else:
        kinds = sorted({type(f).__name__ for f in op.functionals})
        raise NotConstructibleError(
            f"{op.name}: no analytic kernel witness for mixed functional "
            f"kinds {kinds}")

    witness_norm = w.sup_norm(grid)
    residual = apply_operator(op, w).sup_norm(grid)
    if witness_norm < WITNESS_MIN_NORM or residual > WITNESS_RESIDUAL_TOL:
        raise NotConstructibleError(
            f"{op.name}: witness verification failed "
            f"(||w|| = {witness_norm:.3e}, ||Tw|| = {residual:.3e})")
    return w


def kernel_witness_report(op: OperatorSpec,
                          grid_points: int = DEFAULT_GRID_POINTS) -> CheckResult:
    """Kernel-witness residual as a check; a non-constructible witness is
    reported as a failed check rather than silently skipped."""
    try:
        w = kernel_witness(op, grid_points=grid_points)
    except NotConstructibleError as exc:
        return CheckResult(name="kernel_residual", passed=False, value=None,
                           threshold=WITNESS_RESIDUAL_TOL, detail=str(exc))
    grid = op.basis.domain.grid(grid_points)
    residual = apply_operator(op, w).sup_norm(grid)
    return CheckResult(
        name="kernel_residual",
        passed=bool(residual <= WITNESS_RESIDUAL_TOL),
        value=float(residual),
        threshold=WITNESS_RESIDUAL_TOL,
        detail=f"witness {w.name}, ||w||_inf = {w.sup_norm(grid):.6g}",
    )
