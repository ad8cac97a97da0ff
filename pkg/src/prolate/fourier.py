"""Truncated Fourier operator on (-a, a) and its commutator with ``L``.

``(F x)(t) = (1/sqrt(2 pi)) int_{-a}^{a} e^{i t xi} x(xi) dxi`` is discretized by
a quadrature rule in ``xi``.  The image is entire in ``t``, so ``L(F x)`` is
obtained by differentiating under the integral sign with the kernels
``(i xi)^k e^{i t xi}``.  Integrating by parts twice shows

    F L x - L F x = c (2/a) (b_a(x) e^{i a t} + b_{-a}(x) e^{-i a t}),

with ``c = 1/sqrt(2 pi)`` the normalization of ``F``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from . import boundary
from .boundary import BoundaryValues, SampledFunction, boundary_values, clustered_grid
from .errors import DegenerateUnitary, GridMismatch
from .extensions import Unitary2, boundary_condition_matrix
from .functions import Bump, FunctionHandle, Polynomial
from .quadrature import gauss_legendre, graded_rule

DEFAULT_GRID = 256
INTERIOR_PANELS = 128
SCALE = 1 / np.sqrt(2 * np.pi)


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    a: float
    nodes: np.ndarray
    weights: np.ndarray
    kind: str = "gauss"

    def __post_init__(self):
        if not np.all((self.nodes > -self.a) & (self.nodes < self.a)):
            raise ValueError("quadrature nodes must lie strictly inside (-a, a)")
        if abs(np.sum(self.weights) - 2 * self.a) > 1e-12 * max(1.0, 2 * self.a):
            raise ValueError("quadrature weights must sum to 2a")

    @property
    def size(self):
        return self.nodes.size

    @classmethod
    def gauss(cls, a, M=DEFAULT_GRID):
        if M < 2:
            raise ValueError("grid size must be at least 2")
        x, w = gauss_legendre(M, -a, a)
        return cls(float(a), x, w, "gauss")

    @classmethod
    def graded(cls, a, levels=48, order=20, interior_panels=INTERIOR_PANELS):
        """Composite rule for integrands with ``ln(a -+ xi)`` endpoint behaviour."""
        x, w = graded_rule(a, levels, order, interior_panels)
        return cls(float(a), x, w, "graded")

    def integrate(self, values):
        return np.sum(self.weights * values)


@dataclass(frozen=True, eq=False)
class TruncatedFourier:
    grid: QuadratureGrid
    normalized: bool = True

    @property
    def a(self):
        return self.grid.a

    @property
    def scale(self):
        return SCALE if self.normalized else 1.0

    def kernel(self, targets, derivative=0):
        """``scale (i xi)^k e^{i t xi} w`` for targets ``t`` (rows) and nodes ``xi`` (columns)."""
        t = np.atleast_1d(np.asarray(targets, dtype=float))
        xi, w = self.grid.nodes, self.grid.weights
        return self.scale * np.exp(1j * np.outer(t, xi)) * ((1j * xi) ** derivative * w)

    @property
    def kernel_matrix(self):
        return self.kernel(self.grid.nodes)

    def samples(self, x, method="value"):
        """Values of ``x`` (or ``L x`` with ``method="apply_L"``) at the quadrature nodes."""
        nodes = self.grid.nodes
        if isinstance(x, np.ndarray) or isinstance(x, (list, tuple)):
            arr = np.asarray(x, dtype=complex)
            if arr.shape != nodes.shape:
                raise GridMismatch(f"expected {nodes.size} samples, got {arr.shape}")
            return arr
        if isinstance(x, SampledFunction):
            if x.source is not None and hasattr(x.source, method):
                return getattr(x.source, method)(nodes)
            if method != "value":
                raise GridMismatch("sampled data carries no operator information")
            if x.grid.shape == nodes.shape and np.array_equal(x.grid, nodes):
                return np.asarray(x.values, dtype=complex)
            if x.grid[0] <= nodes[0] and x.grid[-1] >= nodes[-1]:
                return x.value(nodes)
            raise GridMismatch("sampled function does not cover the quadrature nodes")
        return np.asarray(getattr(x, method)(nodes), dtype=complex)

    def image(self, x):
        """``F x`` as an entire function handle."""
        return FourierImage(self, self.samples(x))


class FourierImage(FunctionHandle):
    """``t -> (F x)(t)`` evaluated by quadrature at arbitrary real ``t``."""

    def __init__(self, fourier, node_values):
        self.fourier = fourier
        self.node_values = np.asarray(node_values, dtype=complex)
        self.a = fourier.a

    def _apply(self, t, k):
        t = np.asarray(t, dtype=float)
        out = self.fourier.kernel(t.ravel(), k) @ self.node_values
        return out.reshape(t.shape)

    def value(self, t):
        return self._apply(t, 0)

    def derivative(self, t):
        return self._apply(t, 1)

    def second_derivative(self, t):
        return self._apply(t, 2)


def apply(f, x, targets=None):
    """``F x`` sampled on ``targets`` (default: the clustered boundary grid)."""
    img = f.image(x)
    return boundary.sample(img, clustered_grid(f.a) if targets is None else targets)


def default_grid(x, M=DEFAULT_GRID):
    """Gauss-Legendre for polynomial-like inputs, endpoint-graded panels otherwise."""
    src = x.source if isinstance(x, SampledFunction) else x
    if getattr(src, "provenance", None) == "galerkin" or isinstance(src, Polynomial):
        return QuadratureGrid.gauss(x.a, M)
    return QuadratureGrid.graded(x.a)


def defect_targets(a, n=41):
    return np.linspace(-a, a, n)


@dataclass(frozen=True, eq=False)
class DefectReport:
    targets: np.ndarray
    residual: np.ndarray
    predicted: np.ndarray
    boundary_values: BoundaryValues

    @property
    def error(self):
        return float(np.max(np.abs(self.residual - self.predicted)))

    @property
    def residual_norm(self):
        return float(np.max(np.abs(self.residual)))

    def __iter__(self):
        return iter((self.residual, self.predicted))


def predicted_defect(bv, t, a, scale=SCALE):
    t = np.asarray(t, dtype=float)
    return scale * (2 / a) * (bv.b_plus * np.exp(1j * a * t) + bv.b_minus * np.exp(-1j * a * t))


def commutator_defect(x, fourier=None, targets=None, bv=None):
    """Measured ``F L x - L F x`` next to the boundary-value prediction."""
    a = x.a
    f = fourier or TruncatedFourier(default_grid(x))
    t = defect_targets(a) if targets is None else np.asarray(targets, dtype=float)
    img = f.image(x)
    flx = f.kernel(t) @ f.samples(x, "apply_L")
    residual = flx - img.apply_L(t)
    if bv is None:
        bv = boundary_values(x.source if isinstance(x, SampledFunction) and x.source is not None else x)
    return DefectReport(t, residual, predicted_defect(bv, t, a, f.scale), bv)


def shared_eigenfunction_check(dec, n, fourier=None):
    """``beta_n = <F e_n, e_n>`` and ``||F e_n - beta_n e_n||_2``."""
    f = fourier or TruncatedFourier(QuadratureGrid.gauss(dec.a))
    fn = dec.eigenfunction(n)
    nodes, w = f.grid.nodes, f.grid.weights
    e = fn.value(nodes)
    fe = f.kernel_matrix @ e
    beta = np.sum(w * fe * np.conj(e))
    resid = np.sqrt(np.sum(w * np.abs(fe - beta * e) ** 2))
    return complex(beta), float(resid)


def evaluation_functionals(f, fns):
    """Matrix ``[(F f_j)(-a), (F f_j)(a)]``: rows are endpoints, columns functions."""
    a = f.a
    k = f.kernel(np.array([-a, a]))
    return np.column_stack([k @ f.samples(fn) for fn in fns])


def _bump_pair(a, f, min_cond=1e-3):
    for center in (a / 4, a / 3, a / 5, 3 * a / 8):
        bumps = [Bump(a, -center, a / 8), Bump(a, center, a / 8)]
        m = evaluation_functionals(f, bumps)
        sv = np.linalg.svd(m, compute_uv=False)
        if sv[-1] >= min_cond * sv[0]:
            return bumps, m
    raise DegenerateUnitary("could not find a well-conditioned bump pair")


@dataclass(frozen=True, eq=False)
class WitnessCase:
    x: FunctionHandle
    x_boundary_values: BoundaryValues
    image_endpoints: np.ndarray
    image_boundary_values: BoundaryValues
    bc_residual: float
    commutator_norm: float
    predicted_norm: float


@dataclass(frozen=True, eq=False)
class WitnessReport:
    u: Unitary2
    case_a: WitnessCase
    case_b: WitnessCase
    notes: tuple = field(default=())


def witness_boundary_values(u):
    """Vector in ``ker B(U)`` whose b-part ``(b_{-a}, b_a)`` has unit norm.

    For ``U != I`` the kernel of ``B(U)`` always contains a vector with
    ``(b_{-a}, b_a) != 0``; the b-columns of the kernel basis are maximized by an SVD.
    """
    ker = null_space(boundary_condition_matrix(u))
    bpart = ker[[0, 2], :]
    _, sv, vh = np.linalg.svd(bpart)
    if sv[0] < 1e-12:
        raise DegenerateUnitary("U = I, no witness exists")
    v = ker @ vh[0].conj()
    return v / np.linalg.norm(v[[0, 2]])


def _case(u, f, base, bumps, sysm, endpoints, targets):
    coef = np.linalg.solve(sysm, endpoints - f.kernel(np.array([-f.a, f.a])) @ f.samples(base))
    x = base + coef[0] * bumps[0] + coef[1] * bumps[1]
    bv_x = boundary_values(x)
    img = f.image(x)
    y_ends = img.value(np.array([-f.a, f.a]))
    bv_y = boundary_values(img)
    res = boundary_condition_matrix(u) @ bv_y.as_array()
    norm = max(np.linalg.norm(y_ends), 1e-300)
    defect = commutator_defect(x, f, targets, bv_x)
    return WitnessCase(
        x,
        bv_x,
        y_ends,
        bv_y,
        float(np.linalg.norm(res) / norm) if np.linalg.norm(y_ends) > 1e-12 else float(np.linalg.norm(res)),
        defect.residual_norm,
        float(np.max(np.abs(defect.predicted))),
    )


def witness_noncommuting(u, a=1.0, mollifier=1, targets=None):
    """Explicit functions showing that ``F`` and ``L_U`` do not commute for ``U != I``.

    Case a: ``x`` in ``D_{L_U}`` with ``F x`` also in ``D_{L_U}``, yet the
    commutator equals ``c (2/a)(b_a e^{iat} + b_{-a} e^{-iat}) != 0``.
    Case b: ``F x`` violates the boundary conditions of ``L_U``.
    """
    if not isinstance(u, Unitary2):
        u = Unitary2(u)
    if u.is_identity():
        raise DegenerateUnitary("U = I, no witness exists")
    quartet = boundary.CutoffQuartet.build(a, mollifier)
    v = witness_boundary_values(u)
    base = boundary.from_boundary_values(quartet, v)
    f = TruncatedFourier(QuadratureGrid.graded(a))
    bumps, sysm = _bump_pair(a, f)
    t = defect_targets(a) if targets is None else targets
    # case a: F x vanishes at both ends, so its c-values vanish and F x lies in D_{L_U}
    case_a = _case(u, f, base, bumps, sysm, np.zeros(2, dtype=complex), t)
    # case b: endpoint values along the most violated direction of the c-block of B(U)
    cblock = -boundary_condition_matrix(u)[:, [1, 3]]
    _, _, vh = np.linalg.svd(cblock)
    case_b = _case(u, f, base, bumps, sysm, vh[0].conj(), t)
    return WitnessReport(u, case_a, case_b)
