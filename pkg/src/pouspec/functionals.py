"""Positive normalized linear functionals and the quadrature behind them.

Three kinds cover everything the operator catalog needs: point evaluation
(Dirac), normalized interval averages (backed by composite Gauss-Legendre
quadrature), and finite quadrature rules with nonnegative weights summing
to one. Each kind sends the constant one to one and nonnegative functions
to nonnegative values.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .checks import CheckResult
from .errors import ConfigError, DomainError
from .functions import Function, ONE, random_function

#: Default composite Gauss-Legendre rule: exact for polynomials of degree
#: 15 on each of 4 panels, far beyond any catalog basis function.
DEFAULT_QUAD_ORDER = 8
DEFAULT_QUAD_PANELS = 4


@lru_cache(maxsize=32)
def _reference_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def integrate_gauss_legendre(f: Function, a: float, b: float,
                             order: int = DEFAULT_QUAD_ORDER,
                             panels: int = DEFAULT_QUAD_PANELS) -> float:
    """Composite Gauss-Legendre approximation of the integral of ``f`` over
    ``[a, b]``; exact to round-off for polynomials of degree ``2*order - 1``
    on each panel."""
    if a >= b:
        raise DomainError(f"integration bounds must satisfy a < b, got [{a}, {b}]")
    if order < 1:
        raise ConfigError(f"quadrature order must be >= 1, got {order}")
    if panels < 1:
        raise ConfigError(f"panel count must be >= 1, got {panels}")
    ref_nodes, ref_weights = _reference_rule(order)
    edges = np.linspace(a, b, panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    # All panel nodes in one flat array, one function evaluation per call.
    xs = (mid[:, None] + half[:, None] * ref_nodes[None, :]).ravel()
    ws = (half[:, None] * ref_weights[None, :]).ravel()
    return float(ws @ f.values(xs))


class Functional:
    """Positive linear functional with value one on the constant one."""

    name: str = "functional"

    def __call__(self, f: Function) -> float:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


class DiracFunctional(Functional):
    """Point evaluation ``f -> f(x)``."""

    def __init__(self, x: float):
        self.x = float(x)
        self.name = f"dirac({self.x:g})"

    def __call__(self, f: Function) -> float:
        return f(self.x)


class IntervalAverageFunctional(Functional):
    """Normalized average ``f -> (b - a)^{-1} * integral_a^b f``."""

    def __init__(self, a: float, b: float,
                 order: int = DEFAULT_QUAD_ORDER, panels: int = DEFAULT_QUAD_PANELS):
        if a >= b:
            raise ConfigError(f"interval average requires a < b, got [{a}, {b}]")
        self.a = float(a)
        self.b = float(b)
        self.order = order
        self.panels = panels
        self.name = f"avg[{self.a:g},{self.b:g}]"

    def __call__(self, f: Function) -> float:
        total = integrate_gauss_legendre(f, self.a, self.b, self.order, self.panels)
        return total / (self.b - self.a)


class WeightedQuadratureFunctional(Functional):
    """Finite rule ``f -> sum_i w_i f(x_i)``.

    The constructor checks only shapes; weight positivity and normalization
    are verified by :func:`check_functional_normalization` so that broken
    rules can still be built for failure-path tests.
    """

    def __init__(self, nodes: Sequence[float], weights: Sequence[float]):
        nodes = np.asarray(nodes, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if nodes.ndim != 1 or nodes.size < 1:
            raise ConfigError("quadrature functional needs at least one node")
        if weights.shape != nodes.shape:
            raise ConfigError("quadrature nodes and weights differ in length")
        self.nodes = nodes
        self.weights = weights
        self.nodes.flags.writeable = False
        self.weights.flags.writeable = False
        self.name = f"quad({nodes.size} nodes)"

    def __call__(self, f: Function) -> float:
        return float(self.weights @ f.values(self.nodes))


def make_kantorovich_functionals(n: int) -> tuple[IntervalAverageFunctional, ...]:
    """The ``n + 1`` normalized cell averages over ``[k/(n+1), (k+1)/(n+1)]``
    for ``k = 0 .. n``; the ``(n+1)`` weight is the implicit ``1/(b - a)``."""
    if n < 1:
        raise ConfigError(f"Kantorovich index must be >= 1, got {n}")
    cells = n + 1
    return tuple(
        IntervalAverageFunctional(k / cells, (k + 1) / cells) for k in range(cells)
    )


def check_functional_normalization(functional: Functional, tol: float = 1e-12,
                                   probes: int = 100, seed: int = 42) -> CheckResult:
    """Verify ``a(1) = 1`` within ``tol`` and probe positivity on random
    nonnegative catalog functions.

    Positivity is structural for the three built-in kinds; the probe guards
    hand-built configurations. The dual-norm identity itself is not
    independently verified, only the value on the unit.
    """
    unit_dev = abs(functional(ONE) - 1.0)
    rng = np.random.default_rng(seed)
    min_probe = np.inf
    for _ in range(probes):
        f = random_function(rng, nonnegative=True)
        min_probe = min(min_probe, functional(f))
    passed = unit_dev <= tol and min_probe >= -tol
    return CheckResult(
        name="functional_normalization",
        passed=bool(passed),
        value=float(unit_dev),
        threshold=tol,
        detail=(f"min over {probes} nonnegative probes: {min_probe:.3e}; "
                "dual norm identity assumed, not independently verified"),
    )
