"""Collocation matrices and their spectra.

The spectral problem of a positive finite-rank operator built from a basis
``e_1 .. e_n`` and functionals ``a_1 .. a_n`` reduces (away from zero) to
the n-by-n matrix ``M[k][j] = a_k(e_j)``. For a valid operator this matrix
is entrywise nonnegative with unit row sums, so its spectral radius is one,
one is an eigenvalue (all-ones eigenvector), and every Gershgorin disk is
internally tangent to the unit circle at 1 whenever its diagonal entry is
positive. Zero diagonal entries void that tangency argument; the classifier
reports them explicitly instead of asserting the peripheral statement.

The eigensolver is a dense real-Schur reduction: Parlett-Reinsch balancing,
Householder Hessenberg reduction, then Francis double-shift QR iteration
with deflation and EISPACK-style exceptional shifts. An independent cross
check for small matrices computes the characteristic polynomial by the
Faddeev-LeVerrier recursion and finds its roots in closed form (degree at
most two) or through the companion matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .checks import CheckResult
from .errors import ConfigError, EigensolverError, UnsupportedSizeError

#: Subdiagonal deflation tolerance of the QR iteration.
QR_SUBDIAG_TOL = 1e-12

#: Francis sweep budget per eigenvalue before giving up.
QR_MAX_SWEEPS = 40

#: An eigenvalue is peripheral iff its modulus is >= 1 - TOL_PERIPHERAL.
TOL_PERIPHERAL = 1e-8

#: Row-sum / nonnegativity tolerance for stochasticity checks.
TOL_STOCHASTIC = 1e-10

#: Largest supported dense eigenproblem.
MAX_DIMENSION = 500


def _as_matrix(matrix) -> np.ndarray:
    entries = matrix.entries if isinstance(matrix, CollocationMatrix) else matrix
    arr = np.asarray(entries, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ConfigError("matrix must have dimension >= 1")
    return arr


@dataclass(frozen=True)
class CollocationMatrix:
    """Square matrix of functional-basis pairings ``a_k(e_j)``."""

    entries: np.ndarray
    name: str = ""

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ConfigError(f"collocation matrix must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ConfigError("collocation matrix entries must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def diagonal_min(self) -> float:
        return float(np.min(np.diag(self.entries)))


def build_collocation_matrix(op) -> CollocationMatrix:
    """Assemble ``M[k][j] = a_k(e_j)`` from an operator's functionals and
    basis; failures are re-raised with the offending ``(k, j)`` location."""
    funcs = op.basis.functions
    n = op.basis.n
    entries = np.empty((n, n))
    for k, functional in enumerate(op.functionals):
        for j, e in enumerate(funcs):
            try:
                entries[k, j] = functional(e)
            except Exception as exc:
                raise type(exc)(f"collocation entry ({k}, {j}): {exc}") from exc
    return CollocationMatrix(entries, name=op.name)


def check_row_stochastic(matrix, tol: float = TOL_STOCHASTIC) -> CheckResult:
    """Entrywise nonnegativity (within ``tol``) and unit row sums (within
    ``tol``); reports the worst row."""
    arr = _as_matrix(matrix)
    row_dev = np.abs(arr.sum(axis=1) - 1.0)
    worst_row = int(np.argmax(row_dev))
    min_entry = float(arr.min())
    worst = max(float(row_dev[worst_row]), max(0.0, -min_entry))
    passed = row_dev[worst_row] <= tol and min_entry >= -tol
    return CheckResult(
        name="row_stochastic",
        passed=bool(passed),
        value=worst,
        threshold=tol,
        detail=(f"worst row {worst_row}: |sum - 1| = {row_dev[worst_row]:.3e}, "
                f"min entry = {min_entry:.3e}"),
    )


# --------------------------------------------------------------------------
# Eigensolver: balancing + Hessenberg + Francis double-shift QR
# --------------------------------------------------------------------------

def _balance(a: np.ndarray) -> np.ndarray:
    """Parlett-Reinsch diagonal similarity scaling (radix 2)."""
    a = a.copy()
    n = a.shape[0]
    done = False
    while not done:
        done = True
        for i in range(n):
            r = np.sum(np.abs(a[i, :])) - abs(a[i, i])
            c = np.sum(np.abs(a[:, i])) - abs(a[i, i])
            if r == 0.0 or c == 0.0:
                continue
            f = 1.0
            s = c + r
            while c < r / 2.0:
                c *= 2.0
                r /= 2.0
                f *= 2.0
            while c >= r * 2.0:
                c /= 2.0
                r *= 2.0
                f /= 2.0
            if c + r < 0.95 * s:
                done = False
                a[i, :] /= f
                a[:, i] *= f
    return a


def _reflector(col: np.ndarray) -> tuple[np.ndarray, float]:
    """Householder vector ``v`` (v[0] = 1) and ``beta`` such that
    ``(I - beta v v^T) col`` is a multiple of ``e_1``."""
    v = col.copy()
    v[0] = 1.0
    sigma = float(col[1:] @ col[1:])
    if sigma == 0.0:
        return v, 0.0
    mu = math.sqrt(col[0] * col[0] + sigma)
    if col[0] <= 0.0:
        v0 = col[0] - mu
    else:
        v0 = -sigma / (col[0] + mu)
    beta = 2.0 * v0 * v0 / (sigma + v0 * v0)
    v = col / v0
    v[0] = 1.0
    return v, beta


def _hessenberg(a: np.ndarray) -> np.ndarray:
    """Reduce to upper Hessenberg form by Householder similarity."""
    h = a.copy()
    n = h.shape[0]
    for k in range(n - 2):
        v, beta = _reflector(h[k + 1:, k].copy())
        if beta != 0.0:
            h[k + 1:, k:] -= beta * np.outer(v, v @ h[k + 1:, k:])
            h[:, k + 1:] -= beta * np.outer(h[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return h


def _eig_2x2(a: float, b: float, c: float, d: float) -> tuple[complex, complex]:
    """Eigenvalues of ``[[a, b], [c, d]]``; complex pairs are exact
    conjugates, real pairs avoid subtractive cancellation."""
    s = 0.5 * (a + d)
    disc = 0.25 * (a - d) * (a - d) + b * c
    if disc >= 0.0:
        q = math.sqrt(disc)
        l1 = s + q if s >= 0.0 else s - q
        if l1 == 0.0:
            return complex(0.0), complex(0.0)
        det = a * d - b * c
        return complex(l1), complex(det / l1)
    q = math.sqrt(-disc)
    return complex(s, q), complex(s, -q)


def _apply_reflector(h: np.ndarray, col: np.ndarray, k: int, size: int,
                     lo: int, hi: int) -> None:
    """Similarity update by the Householder reflector of ``col`` acting on
    rows/columns ``k .. k + size - 1``, restricted to the active window."""
    scale = np.max(np.abs(col))
    if scale == 0.0:
        return
    v, beta = _reflector(col / scale)
    if beta == 0.0:
        return
    rows = slice(k, k + size)
    c0 = max(lo, k - 1)
    h[rows, c0:hi + 1] -= beta * np.outer(v, v @ h[rows, c0:hi + 1])
    r1 = min(hi, k + size)
    h[lo:r1 + 1, rows] -= beta * np.outer(h[lo:r1 + 1, rows] @ v, v)


def _francis_sweep(h: np.ndarray, lo: int, hi: int, shift_sum: float,
                   shift_prod: float) -> None:
    """One implicit double-shift bulge chase on the active window
    ``h[lo:hi+1, lo:hi+1]`` (hi - lo >= 2), in place.

    The first column of ``(H - mu1)(H - mu2)`` seeds a 3-row bulge that is
    chased down the subdiagonal by Householder reflectors and pushed off the
    window by a final 2-row rotation.
    """
    x = (h[lo, lo] * h[lo, lo] + h[lo, lo + 1] * h[lo + 1, lo]
         - shift_sum * h[lo, lo] + shift_prod)
    y = h[lo + 1, lo] * (h[lo, lo] + h[lo + 1, lo + 1] - shift_sum)
    z = h[lo + 1, lo] * h[lo + 2, lo + 1]
    for k in range(lo, hi - 1):
        if k > lo:
            x, y, z = h[k, k - 1], h[k + 1, k - 1], h[k + 2, k - 1]
        _apply_reflector(h, np.array([x, y, z]), k, 3, lo, hi)
        if k > lo:
            h[k + 1, k - 1] = 0.0
            h[k + 2, k - 1] = 0.0
    k = hi - 1
    _apply_reflector(h, np.array([h[k, k - 1], h[k + 1, k - 1]]), k, 2, lo, hi)
    h[k + 1, k - 1] = 0.0


def _hessenberg_eigenvalues(h: np.ndarray, subdiag_tol: float,
                            max_sweeps: int) -> list[complex]:
    n = h.shape[0]
    norm = np.sum(np.abs(h))
    if norm == 0.0:
        return [complex(0.0)] * n
    eigs: list[complex] = []
    hi = n - 1
    sweeps = 0
    while hi >= 0:
        if hi == 0:
            eigs.append(complex(h[0, 0]))
            hi -= 1
            continue
        # Deflation scan: find the start of the active block.
        lo = hi
        while lo > 0:
            s = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if s == 0.0:
                s = norm
            if abs(h[lo, lo - 1]) <= subdiag_tol * s:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs.append(complex(h[hi, hi]))
            hi -= 1
            sweeps = 0
            continue
        if lo == hi - 1:
            eigs.extend(_eig_2x2(h[hi - 1, hi - 1], h[hi - 1, hi],
                                 h[hi, hi - 1], h[hi, hi]))
            hi -= 2
            sweeps = 0
            continue
        if sweeps >= max_sweeps:
            raise EigensolverError(
                f"QR iteration did not deflate within {max_sweeps} sweeps "
                f"(active block [{lo}, {hi}])",
                partial=np.asarray(eigs, dtype=complex),
            )
        if sweeps > 0 and sweeps % 10 == 0:
            # Exceptional shift (EISPACK): breaks symmetric cycling that
            # stalls the standard Wilkinson pair, e.g. permutation blocks.
            s = abs(h[hi, hi - 1]) + abs(h[hi - 1, hi - 2])
            h11 = 0.75 * s + h[hi, hi]
            shift_sum = 2.0 * h11
            shift_prod = h11 * h11 + 0.4375 * s * s
        else:
            shift_sum = h[hi - 1, hi - 1] + h[hi, hi]
            shift_prod = (h[hi - 1, hi - 1] * h[hi, hi]
                          - h[hi - 1, hi] * h[hi, hi - 1])
        _francis_sweep(h, lo, hi, shift_sum, shift_prod)
        sweeps += 1
    return eigs


def sort_eigenvalues(values: Sequence[complex] | np.ndarray) -> np.ndarray:
    """Canonical order: descending modulus, then descending real part, then
    descending imaginary part (conjugate pairs adjacent, + before -)."""
    arr = np.asarray(values, dtype=complex)
    key = sorted(range(arr.size),
                 key=lambda i: (-abs(arr[i]), -arr[i].real, -arr[i].imag))
    return arr[key]


def eigenvalues(matrix, subdiag_tol: float = QR_SUBDIAG_TOL,
                max_sweeps: int = QR_MAX_SWEEPS) -> np.ndarray:
    """All eigenvalues (with multiplicity) of a real square matrix.

    Pipeline: balancing, Householder Hessenberg reduction, Francis implicit
    double-shift QR with deflation. Returns a complex array in the canonical
    order of :func:`sort_eigenvalues`; conjugate pairs are exact conjugates.
    """
    arr = _as_matrix(matrix)
    n = arr.shape[0]
    if n > MAX_DIMENSION:
        raise UnsupportedSizeError(
            f"dense eigensolver supports n <= {MAX_DIMENSION}, got {n}")
    if n == 1:
        return np.array([complex(arr[0, 0])])
    h = _hessenberg(_balance(arr))
    return sort_eigenvalues(_hessenberg_eigenvalues(h, subdiag_tol, max_sweeps))


# --------------------------------------------------------------------------
# Characteristic-polynomial oracle (small matrices, used as a cross check)
# --------------------------------------------------------------------------

def characteristic_polynomial(matrix) -> np.ndarray:
    """Coefficients ``[1, c_1, ..., c_n]`` of ``det(lambda I - A)`` in
    descending powers, by the Faddeev-LeVerrier trace recursion."""
    a = _as_matrix(matrix)
    n = a.shape[0]
    coeffs = [1.0]
    ak = a.copy()
    c = -float(np.trace(ak))
    coeffs.append(c)
    for k in range(2, n + 1):
        ak = a @ (ak + c * np.eye(n))
        c = -float(np.trace(ak)) / k
        coeffs.append(c)
    return np.asarray(coeffs)


def _quadratic_roots(b: float, c: float) -> list[complex]:
    """Roots of ``x^2 + b x + c`` without subtractive cancellation."""
    disc = b * b - 4.0 * c
    if disc >= 0.0:
        q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
        if q == 0.0:
            return [complex(0.0), complex(0.0)]
        return [complex(q), complex(c / q)]
    q = 0.5 * math.sqrt(-disc)
    return [complex(-b / 2.0, q), complex(-b / 2.0, -q)]


def char_poly_eigen_oracle(matrix) -> np.ndarray:
    """Eigenvalues via explicit characteristic-polynomial coefficients.

    Independent of the QR path: Faddeev-LeVerrier for the coefficients,
    then the quadratic formula (degree <= 2) or companion-matrix root
    finding (degree 3 to 5). Going through the polynomial squares the
    sensitivity of multiple roots, so this is a test oracle for small
    matrices, not a production solver.
    """
    a = _as_matrix(matrix)
    n = a.shape[0]
    if n > 5:
        raise UnsupportedSizeError(f"characteristic-polynomial oracle supports n <= 5, got {n}")
    coeffs = characteristic_polynomial(a)
    if n == 1:
        roots = [complex(-coeffs[1])]
    elif n == 2:
        roots = _quadratic_roots(float(coeffs[1]), float(coeffs[2]))
    else:
        roots = list(np.roots(coeffs))
    return sort_eigenvalues(roots)


def pair_eigenvalues(left, right) -> float:
    """Largest pairwise distance under the minimal-cost bipartite matching
    of two equal-size eigenvalue multisets."""
    a = np.asarray(left, dtype=complex)
    b = np.asarray(right, dtype=complex)
    if a.size != b.size:
        raise ConfigError(f"multiset sizes differ: {a.size} vs {b.size}")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


# --------------------------------------------------------------------------
# Gershgorin disks and spectrum classification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GershgorinDisk:
    """Disk centered at a diagonal entry whose radius is the off-diagonal
    absolute row sum."""

    center: float
    radius: float

    def distance_outside(self, z: complex) -> float:
        return abs(z - self.center) - self.radius


def gershgorin_disks(matrix) -> tuple[GershgorinDisk, ...]:
    arr = _as_matrix(matrix)
    disks = []
    for k in range(arr.shape[0]):
        radius = float(np.sum(np.abs(arr[k, :])) - abs(arr[k, k]))
        disks.append(GershgorinDisk(center=float(arr[k, k]), radius=radius))
    return tuple(disks)


CLASSIFICATION_CONFORMS = "conforms"
CLASSIFICATION_VIOLATES = "violates-theorem"
CLASSIFICATION_INCONCLUSIVE = "inconclusive-zero-diagonal"

#: Allowed slack when verifying that eigenvalues lie in the disk union.
DISK_CONTAINMENT_TOL = 1e-9


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues, disks, and the verdict on the peripheral spectrum."""

    eigenvalues: np.ndarray
    disks: tuple[GershgorinDisk, ...]
    peripheral: np.ndarray
    classification: str
    diagnostics: str
    containment_residual: float


def classify_spectrum(eigs, disks: Sequence[GershgorinDisk],
                      tol_peripheral: float = TOL_PERIPHERAL) -> SpectrumReport:
    """Classify a computed spectrum.

    ``conforms``: every modulus is <= 1 + tol and every peripheral
    eigenvalue (modulus >= 1 - tol) lies within tol of 1. A peripheral
    eigenvalue away from 1 yields ``violates-theorem``. When some disk
    center sits at or below tol the disk union reaches the whole unit
    circle, so a conforming spectrum is downgraded to
    ``inconclusive-zero-diagonal``: the tangency argument cannot certify it.
    Containment of every eigenvalue in the disk union is verified as well.
    """
    arr = sort_eigenvalues(np.asarray(eigs, dtype=complex))
    disks = tuple(disks)
    moduli = np.abs(arr)
    peripheral = arr[moduli >= 1.0 - tol_peripheral]

    residual = 0.0
    for lam in arr:
        residual = max(residual, min(d.distance_outside(lam) for d in disks))
    residual = max(0.0, residual)

    bound_ok = bool(np.all(moduli <= 1.0 + tol_peripheral))
    peripheral_ok = bool(np.all(np.abs(peripheral - 1.0) <= tol_peripheral))
    zero_diag = any(d.center <= tol_peripheral for d in disks)

    notes = [f"{peripheral.size} peripheral eigenvalue(s) with |lambda| >= "
             f"{1.0 - tol_peripheral:.9g}"]
    if not bound_ok:
        notes.append(f"spectral bound violated: max |lambda| = {moduli.max():.12g}")
    if not peripheral_ok:
        worst = peripheral[np.argmax(np.abs(peripheral - 1.0))]
        notes.append(f"peripheral eigenvalue away from 1: {worst:.12g}")
    if zero_diag:
        notes.append("zero diagonal entry: some Gershgorin disk equals the "
                     "closed unit disk, so the disk argument cannot isolate 1 "
                     "on the unit circle")
    if residual > DISK_CONTAINMENT_TOL:
        notes.append(f"WARNING: eigenvalue outside the disk union by {residual:.3e}")

    if not (bound_ok and peripheral_ok):
        classification = CLASSIFICATION_VIOLATES
    elif zero_diag:
        classification = CLASSIFICATION_INCONCLUSIVE
    else:
        classification = CLASSIFICATION_CONFORMS

    return SpectrumReport(
        eigenvalues=arr,
        disks=disks,
        peripheral=peripheral,
        classification=classification,
        diagnostics="; ".join(notes),
        containment_residual=residual,
    )


# --------------------------------------------------------------------------
# Matrix powers and the limit of iterates
# --------------------------------------------------------------------------

def matrix_power(matrix, m: int) -> np.ndarray:
    """``M^m`` by repeated squaring; ``M^0`` is the identity."""
    arr = _as_matrix(matrix)
    if m < 0:
        raise ConfigError(f"power must be >= 0, got {m}")
    result = np.eye(arr.shape[0])
    base = arr.copy()
    while m:
        if m & 1:
            result = result @ base
        base = base @ base
        m >>= 1
    return result


def _linf(a: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(a), axis=1)))


@dataclass(frozen=True)
class IterateResult:
    """Outcome of the power-limit search. ``converged`` distinguishes a
    reached limit from an obstruction (which ``message`` names)."""

    converged: bool
    limit: np.ndarray | None
    rate: float | None
    m_used: int
    message: str


def iterate_limit(matrix, tol: float = 1e-10, m_max: int = 65536) -> IterateResult:
    """Search for the limit of ``M^m`` by repeated squaring.

    Doubles ``m`` until ``||M^{2m} - M^m||_inf <= tol`` or ``m > m_max``.
    On success also estimates the convergence rate as the ratio of
    consecutive difference norms ``||M^{m+1} - M^m|| / ||M^m - M^{m-1}||``
    evaluated where the differences are still well above round-off; the
    ratio approximates the second-largest eigenvalue modulus. Failure to
    settle (e.g. a peripheral eigenvalue other than 1) is reported as a
    result, not an error.
    """
    arr = _as_matrix(matrix)
    if m_max < 2:
        raise ConfigError(f"m_max must be >= 2, got {m_max}")
    power = arr.copy()
    m = 1
    limit = None
    while m <= m_max:
        squared = power @ power
        # The doubling test alone is blind to even-period oscillation
        # (M^4 = M^2 for the swap matrix), so the candidate limit must
        # also be stationary under one further multiplication.
        if _linf(squared - power) <= tol and _linf(squared @ arr - squared) <= tol:
            limit = squared
            break
        power = squared
        m *= 2

    if limit is None:
        message = f"no convergence: ||M^(2m) - M^m||_inf > {tol:g} up to m = {m_max}"
        # Name the obstruction when the sequence is periodic.
        probe = matrix_power(arr, 16)
        step1 = _linf(probe @ arr - probe)
        step2 = _linf(probe @ arr @ arr - probe)
        if step2 <= 1e-8 and step1 > 1e-8:
            message += "; period-2 oscillation detected (M^(m+2) = M^m, M^(m+1) != M^m)"
        return IterateResult(converged=False, limit=None, rate=None,
                             m_used=m_max, message=message)

    # Rate estimate from sequential powers, taken at the largest step whose
    # previous difference is still comfortably above round-off.
    diffs = []
    current = arr.copy()
    for _ in range(1, 128):
        nxt = current @ arr
        diffs.append(_linf(nxt - current))
        current = nxt
        if diffs[-1] < 1e-12:
            break
    rate = 0.0
    for i in range(len(diffs) - 1, 0, -1):
        if diffs[i - 1] >= 1e-9:
            rate = diffs[i] / diffs[i - 1]
            break
    return IterateResult(
        converged=True, limit=limit, rate=float(rate), m_used=m,
        message=f"converged: ||M^(2m) - M^m||_inf <= {tol:g} at m = {m}",
    )
