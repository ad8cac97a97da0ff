"""Galerkin discretization of ``L_I`` and ``Lambda`` in the Legendre basis.

The basis ``e_n(t) = sqrt((2n + 1)/(2a)) P_n(t/a)`` is orthonormal in
``L2(-a, a)`` and every element has a bounded derivative, so it lies in the
domain of ``L_I``.  With ``t = a u`` the kinetic part is the Legendre operator
``-(1/a^2) d/du (1 - u^2) d/du``, diagonal with entries ``n(n+1)/a^2``.  The
potential ``t^2 = a^2 u^2`` couples ``n`` to ``n`` and ``n +- 2`` only, so the
matrix is pentadiagonal and splits into two tridiagonal blocks by parity.
"""

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre as leg
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from . import series
from .boundary import clustered_grid, sample
from .errors import ConvergenceWarning, EigensolverFailure, NoSignChange
from .functions import FunctionHandle
from .quadrature import gauss_legendre

DEFAULT_BASIS = 128
TAIL_TOL = 1e-10


class Variant(enum.Enum):
    L_I = "li"
    LAMBDA = "lambda"


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"


def _norm(n, a):
    return np.sqrt((2 * np.asarray(n) + 1) / (2 * a))


def _u_coupling(n):
    """``<P^_{n-1}, u P^_n>`` for normalized Legendre polynomials on (-1, 1)."""
    n = np.asarray(n, dtype=float)
    return np.where(n > 0, n / np.sqrt(np.maximum(4 * n * n - 1, 1)), 0.0)


@dataclass(frozen=True, eq=False)
class GalerkinOperator:
    a: float
    basis_size: int
    variant: Variant
    matrix: np.ndarray

    def parity_block(self, parity):
        """Diagonal and off-diagonal of the tridiagonal block of one parity."""
        start = 0 if Parity(parity) is Parity.EVEN else 1
        idx = np.arange(start, self.basis_size, 2)
        m = self.matrix
        return m[idx, idx], m[idx[:-1], idx[1:]], idx


def assemble(a, N=DEFAULT_BASIS, variant=Variant.L_I):
    """Symmetric matrix of ``L_I`` (or ``Lambda``) in the normalized Legendre basis."""
    a = float(a)
    if not a > 0 or not np.isfinite(a):
        raise ValueError("a must be positive and finite")
    if N < 4:
        raise ValueError("basis size N must be at least 4")
    variant = Variant(variant)
    n = np.arange(N)
    m = np.diag(n * (n + 1) / a**2)
    if variant is Variant.LAMBDA:
        m += np.eye(N)
    else:
        al = _u_coupling(np.arange(N + 1))
        # u^2 e_n = al_{n+1} al_{n+2} e_{n+2} + (al_{n+1}^2 + al_n^2) e_n + al_n al_{n-1} e_{n-2}
        m += a * a * np.diag(al[1 : N + 1] ** 2 + al[:N] ** 2)
        off = a * a * al[1 : N - 1] * al[2:N]
        m += np.diag(off, 2) + np.diag(off, -2)
    m.setflags(write=False)
    return GalerkinOperator(a, N, variant, m)


class LegendreExpansion(FunctionHandle):
    """``sum_n coeffs[n] e_n(t)`` with derivatives from the Legendre series."""

    provenance = "galerkin"

    def __init__(self, a, coeffs):
        self.a = float(a)
        self.coeffs = np.asarray(coeffs, dtype=float)
        self._series = leg.Legendre(self.coeffs * _norm(np.arange(self.coeffs.size), self.a), domain=[-self.a, self.a])
        self._d1 = self._series.deriv(1)
        self._d2 = self._series.deriv(2)

    def value(self, t):
        return self._series(np.asarray(t, dtype=float))

    def derivative(self, t):
        return self._d1(np.asarray(t, dtype=float))

    def second_derivative(self, t):
        return self._d2(np.asarray(t, dtype=float))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    a: float
    variant: Variant
    basis_size: int
    eigenvalues: np.ndarray
    coefficient_vectors: np.ndarray
    parity: tuple
    tail_norms: np.ndarray
    warnings: tuple = field(default=())

    def __len__(self):
        return self.eigenvalues.size

    def eigenfunction(self, n):
        if not 0 <= n < len(self):
            raise IndexError(f"eigenfunction index {n} out of range for {len(self)} computed pairs")
        return LegendreExpansion(self.a, self.coefficient_vectors[:, n])


def _tail_norm(vec, N):
    k = max(4, N // 8)
    return float(np.linalg.norm(vec[-k:]))


def eigensolve(op, m):
    """Lowest ``m`` eigenpairs, solving the even and odd tridiagonal blocks separately."""
    N = op.basis_size
    if m < 0 or m > N // 2:
        raise ValueError(f"count must lie in [0, {N // 2}] for basis size {N}")
    vals, vecs, par = [], [], []
    for parity in Parity:
        d, e, idx = op.parity_block(parity)
        k = min(m, idx.size)
        if k == 0:
            continue
        try:
            w, v = eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1))
        except np.linalg.LinAlgError as exc:
            raise EigensolverFailure(str(exc)) from exc
        full = np.zeros((N, k))
        full[idx] = v
        vals.append(w)
        vecs.append(full)
        par += [parity] * k
    if not vals:
        return SpectralDecomposition(op.a, op.variant, N, np.zeros(0), np.zeros((N, 0)), (), np.zeros(0))
    vals = np.concatenate(vals)
    vecs = np.concatenate(vecs, axis=1)
    order = np.argsort(vals, kind="stable")[:m]
    vals, vecs = vals[order], vecs[:, order]
    par = tuple(par[i] for i in order)
    if np.any(np.diff(vals) <= 0):
        raise EigensolverFailure("eigenvalues are not simple")
    # e_n(0) > 0 for even, e_n'(0) > 0 for odd
    for j, p in enumerate(par):
        fn = LegendreExpansion(op.a, vecs[:, j])
        ref = fn.value(0.0) if p is Parity.EVEN else fn.derivative(0.0)
        if ref < 0:
            vecs[:, j] = -vecs[:, j]
    tails = np.array([_tail_norm(vecs[:, j], N) for j in range(vals.size)])
    notes = []
    for j in np.nonzero(tails >= TAIL_TOL)[0]:
        msg = f"eigenvector {j} tail norm {tails[j]:.3g} exceeds {TAIL_TOL:g}; increase N"
        warnings.warn(msg, ConvergenceWarning, stacklevel=2)
        notes.append(msg)
    vecs.setflags(write=False)
    vals.setflags(write=False)
    return SpectralDecomposition(op.a, op.variant, N, vals, vecs, par, tails, tuple(notes))


def spectrum(a, count, N=DEFAULT_BASIS, variant=Variant.L_I):
    return eigensolve(assemble(a, N, variant), count)


def evaluate_eigenfunction(dec, n, grid=None):
    """Sampled eigenfunction ``e_n`` with its derivative on ``grid`` (default: clustered)."""
    fn = dec.eigenfunction(n)
    return sample(fn, clustered_grid(dec.a) if grid is None else grid)


def _c2_plus(a, lam, order, rtol):
    _, c2 = series.connect_many(a, [lam], order=order, rtol=rtol)
    return c2[0].real


def eigenvalues_by_shooting(a, window, tol=1e-12, points=400, order=series.DEFAULT_ORDER, rtol=1e-12):
    """Eigenvalues of ``L_I`` in ``window`` as the zeros of ``lambda -> b_a(x1-(., lambda))``.

    The window is scanned on ``points`` equispaced values (one vectorized
    continuation) and each sign change is refined by Brent's method.
    """
    lo, hi = map(float, window)
    if not hi > lo:
        raise ValueError("empty search window")
    grid = np.linspace(lo, hi, points)
    _, c2 = series.connect_many(a, grid, order=order, rtol=rtol)
    f = c2.real
    roots = []
    for i in np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) <= 0)[0]:
        if f[i] == 0:
            roots.append(grid[i])
            continue
        if f[i + 1] == 0:
            continue
        roots.append(brentq(lambda lam: _c2_plus(a, lam, order, rtol), grid[i], grid[i + 1], xtol=tol, rtol=4 * np.finfo(float).eps))
    if not roots:
        raise NoSignChange(f"no eigenvalue of L_I in [{lo:g}, {hi:g}]")
    return np.array(roots)


def eigenvalue_bounds(a, n):
    """``n(n+1)/a^2 <= lambda_n <= n(n+1)/a^2 + a^2`` from ``0 <= t^2 <= a^2``."""
    base = n * (n + 1) / a**2
    return base, base + a * a


def quadratic_form_check(dec, n, nodes=None):
    """``(lambda_n ||e_n||^2, int p |e_n'|^2 + int q |e_n|^2)`` by Gauss-Legendre."""
    fn = dec.eigenfunction(n)
    a = dec.a
    t, w = gauss_legendre(nodes or dec.basis_size + 16, -a, a)
    e, de = fn.value(t), fn.derivative(t)
    q = np.ones_like(t) if dec.variant is Variant.LAMBDA else t * t
    norm2 = np.sum(w * e * e)
    rhs = np.sum(w * (1 - t * t / a**2) * de * de) + np.sum(w * q * e * e)
    return float(dec.eigenvalues[n] * norm2), float(rhs)


def parity_of(dec, n):
    return dec.parity[n]
