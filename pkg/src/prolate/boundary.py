"""Brackets, generalized boundary values and the boundary form.

For ``x`` in the maximal domain the four limits

    b_{-a}(x) = lim (t + a) x'(t),            t -> -a
    c_{-a}(x) = lim (t + a) ln(a + t) x'(t) - x(t),
    b_a(x)    = lim (t - a) x'(t),            t -> +a
    c_a(x)    = lim (t - a) ln(a - t) x'(t) - x(t)

exist.  Near an endpoint the quantities under the limits behave like
``L + sum_k s^k (A_k + B_k ln s + C_k ln^2 s)`` in the distance ``s``, so the
limits are extracted by least-squares fits of that model on geometrically
clustered samples, repeated on nested windows to check contraction.
"""

import enum
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import ExtrapolationDivergence, GridMismatch
from .functions import Combination, FunctionHandle, LogCutoff, Polynomial, Reflected, Smoothstep
from .series import Kind, SeriesSolution, decompose_far

INNERMOST = 1e-6
CLUSTER_LEVELS = 14
MIN_CLUSTERED = 8
VANISH_TOL = 1e-6


class Provenance(enum.Enum):
    SERIES = "series"
    CLOSED_FORM = "closed-form"
    GALERKIN = "galerkin"


class Domain(enum.Enum):
    LMIN = "Lmin"
    LMAX = "Lmax"
    LI = "LI"


def _weight(t, a):
    t = np.asarray(t, dtype=float)
    return 1 - t * t / a**2


def cluster_offsets(a, levels=CLUSTER_LEVELS, innermost=INNERMOST):
    """Distances ``innermost * a * 2^j`` from an endpoint, ascending."""
    return innermost * a * 2.0 ** np.arange(levels)


def clustered_grid(a, levels=CLUSTER_LEVELS, innermost=INNERMOST, interior=41):
    """Grid on (-a, a) with geometric clustering at both endpoints."""
    s = cluster_offsets(a, levels, innermost)
    inner = a * np.cos(np.linspace(np.pi, 0, interior))[1:-1] * (1 - 2 * s[-1] / a)
    return np.unique(np.concatenate((-a + s, inner, a - s[::-1])))


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Samples of a function and its derivative on a grid inside (-a, a).

    ``source`` keeps the generating handle when there is one; series inputs use
    it to read boundary values from the expansion itself.
    """

    grid: np.ndarray
    values: np.ndarray
    derivative_values: np.ndarray
    a: float
    provenance: Provenance = Provenance.CLOSED_FORM
    source: object = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if grid[0] <= -self.a or grid[-1] >= self.a:
            raise ValueError("grid must lie inside the open interval (-a, a)")
        if self.provenance is not Provenance.SERIES:
            for side in (grid + self.a, self.a - grid):
                if np.count_nonzero(side < 1e-2 * self.a) < MIN_CLUSTERED:
                    raise ValueError(f"need at least {MIN_CLUSTERED} points clustered toward each endpoint")
        for name in ("grid", "values", "derivative_values"):
            arr = np.array(getattr(self, name), dtype=float if name == "grid" else complex)
            if arr.shape != grid.shape:
                raise ValueError(f"{name} must match the grid shape")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def _spline(self):
        return (
            CubicHermiteSpline(self.grid, self.values.real, self.derivative_values.real),
            CubicHermiteSpline(self.grid, self.values.imag, self.derivative_values.imag),
        )

    def value(self, t):
        re, im = self._spline()
        return re(t) + 1j * im(t)

    def derivative(self, t):
        re, im = self._spline()
        return re(t, 1) + 1j * im(t, 1)


def _provenance_of(fn):
    if isinstance(fn, SeriesSolution):
        return Provenance.SERIES
    if getattr(fn, "provenance", None) == "galerkin":
        return Provenance.GALERKIN
    return Provenance.CLOSED_FORM


def sample(fn, grid=None):
    """Sample any function handle; series are sampled within ``|s| <= a`` only."""
    a = fn.a
    if grid is None:
        grid = clustered_grid(a)
        if isinstance(fn, SeriesSolution):
            grid = grid[np.abs(grid - fn.anchor) <= a]
    grid = np.asarray(grid, dtype=float)
    return SampledFunction(grid, fn.value(grid), fn.derivative(grid), a, _provenance_of(fn), fn)


def bracket(x, y, t):
    """``[x, y](t) = -p(t) (x'(t) conj(y(t)) - x(t) conj(y'(t)))``."""
    a = x.a
    return -_weight(t, a) * (x.derivative(t) * np.conj(y.value(t)) - x.value(t) * np.conj(y.derivative(t)))


def _design(s):
    sig = s / s[-1]
    ln = np.log(sig)
    cols = [np.ones_like(sig)]
    for k in (1, 2):
        cols += [sig**k, sig**k * ln, sig**k * ln**2]
    return np.column_stack(cols)


def endpoint_limit(s, f, rtol=1e-6, levels=4):
    """Limit of ``f`` as ``s -> 0+`` from samples at geometric distances ``s``.

    Fits the log-power model on nested windows that drop the outermost
    samples one at a time; raises :class:`ExtrapolationDivergence` when the
    ``levels`` extrapolants spread by more than ``rtol`` times the data scale.
    """
    order = np.argsort(s)
    s = np.asarray(s, dtype=float)[order]
    f = np.asarray(f, dtype=complex)[order]
    if s.size < MIN_CLUSTERED:
        raise ValueError(f"need at least {MIN_CLUSTERED} clustered samples, got {s.size}")
    if not np.all(np.isfinite(f)):
        raise ExtrapolationDivergence("non-finite samples near the endpoint")
    estimates = []
    for drop in range(levels):
        ss, ff = s[: s.size - drop], f[: s.size - drop]
        coef, *_ = np.linalg.lstsq(_design(ss), ff, rcond=None)
        estimates.append(coef[0])
    estimates = np.array(estimates)
    scale = 1.0 + np.max(np.abs(f))
    spread = np.max(np.abs(estimates - estimates[-1]))
    if spread > rtol * scale:
        raise ExtrapolationDivergence(f"extrapolants spread {spread:.3g} exceeds {rtol:g} x scale {scale:.3g}")
    return complex(estimates[-1])


@dataclass(frozen=True)
class BoundaryValues:
    b_minus: complex
    c_minus: complex
    b_plus: complex
    c_plus: complex

    def as_array(self):
        """Column ``(b_{-a}, c_{-a}, b_a, c_a)`` used by boundary-condition matrices."""
        return np.array([self.b_minus, self.c_minus, self.b_plus, self.c_plus], dtype=complex)

    def is_finite(self):
        return bool(np.all(np.isfinite(self.as_array())))


def _endpoint_samples(x):
    """Offsets and samples ``(s, value, derivative)`` near each endpoint."""
    a = x.a
    if isinstance(x, SampledFunction):
        g = x.grid
        out = {}
        for sign in (-1.0, 1.0):
            s = a - sign * g
            mask = s < 1e-2 * a
            if np.count_nonzero(mask) < MIN_CLUSTERED:
                raise ValueError(f"need at least {MIN_CLUSTERED} points clustered toward each endpoint")
            out[sign] = (s[mask], x.values[mask], x.derivative_values[mask])
        return out
    out = {}
    for sign in (-1.0, 1.0):
        t = sign * (a - cluster_offsets(a))
        s = a - sign * t
        out[sign] = (s, x.value(t), x.derivative(t))
    return out


def _series_boundary_values(sol, rtol=1e-10):
    src = sol.source if isinstance(sol, SampledFunction) else sol
    if src.kind is Kind.REGULAR:
        b_near, c_near = 0.0, -complex(src.coeffs_main[0])
    else:
        b_near, c_near = complex(src.coeffs_main[0]), -complex(src.coeffs_log_remainder[0])
    c1, c2 = decompose_far([src], rtol=rtol)
    b_far, c_far = complex(c2[0]), -complex(c1[0])
    if src.endpoint.sign < 0:
        return BoundaryValues(b_near, c_near, b_far, c_far)
    return BoundaryValues(b_far, c_far, b_near, c_near)


def boundary_values(x, rtol=1e-6):
    """Generalized boundary values ``(b_{-a}, c_{-a}, b_a, c_a)`` of ``x``.

    Series solutions are read from their expansion at the anchor and from the
    connection coefficients at the far end; everything else is extrapolated.
    """
    if isinstance(x, SeriesSolution) or (
        isinstance(x, SampledFunction) and isinstance(x.source, SeriesSolution)
    ):
        return _series_boundary_values(x)
    samples = _endpoint_samples(x)
    vals = {}
    for sign, (s, v, d) in samples.items():
        # (t -+ a) x' = -+ s x'  with s the distance to the endpoint
        sx = -sign * s * d
        b = endpoint_limit(s, sx, rtol)
        c = endpoint_limit(s, sx * np.log(s) - v, rtol)
        vals[sign] = (b, c)
    return BoundaryValues(vals[-1.0][0], vals[-1.0][1], vals[1.0][0], vals[1.0][1])


def boundary_values_via_p(x, rtol=1e-6):
    """``(b_{-a}, b_a)`` from the limits of ``p(t) x'(t)``.

    ``p x' -> (2/a) b_{-a}`` at ``-a`` and ``p x' -> -(2/a) b_a`` at ``+a``.
    """
    if isinstance(x, SeriesSolution) or (
        isinstance(x, SampledFunction) and isinstance(x.source, SeriesSolution)
    ):
        src = x.source if isinstance(x, SampledFunction) else x
        t = src.anchor - src.endpoint.sign * cluster_offsets(src.a)
        s = np.abs(t - src.anchor)
        near = endpoint_limit(s, _weight(t, src.a) * src.derivative(t), rtol)
        b_near = -src.endpoint.sign * src.a / 2 * near
        far = _series_boundary_values(src)
        if src.endpoint.sign < 0:
            return b_near, far.b_plus
        return far.b_minus, b_near
    a = x.a
    samples = _endpoint_samples(x)
    out = []
    for sign, (s, _, d) in samples.items():
        t = sign * (a - s)
        lim = endpoint_limit(s, _weight(t, a) * d, rtol)
        out.append(-sign * a / 2 * lim)
    return out[0], out[1]


def _bracket_samples(x, y):
    """Bracket ``[x, y]`` near both endpoints on a common set of offsets."""
    sampled = [f for f in (x, y) if isinstance(f, SampledFunction)]
    if len(sampled) == 2 and not np.array_equal(x.grid, y.grid):
        raise GridMismatch("both sampled functions must share one grid")
    a = x.a
    if sampled:
        grid = sampled[0].grid
        xs = x if isinstance(x, SampledFunction) else sample(x, grid)
        ys = y if isinstance(y, SampledFunction) else sample(y, grid)
        out = {}
        for sign in (-1.0, 1.0):
            s = a - sign * grid
            mask = s < 1e-2 * a
            br = -_weight(grid[mask], a) * (
                xs.derivative_values[mask] * np.conj(ys.values[mask])
                - xs.values[mask] * np.conj(ys.derivative_values[mask])
            )
            out[sign] = (s[mask], br)
        return out
    out = {}
    for sign in (-1.0, 1.0):
        t = sign * (a - cluster_offsets(a))
        out[sign] = (a - sign * t, bracket(x, y, t))
    return out


def _analytic(fn):
    return getattr(fn, "provenance", None) == "galerkin" or isinstance(fn, Polynomial)


def bracket_limits(x, y, rtol=1e-6):
    """``([x, y]_{-a}, [x, y]^a)``; polynomial handles are evaluated at the ends."""
    if _analytic(x) and _analytic(y):
        return tuple(complex(bracket(x, y, e * x.a)) for e in (-1.0, 1.0))
    samples = _bracket_samples(x, y)
    return tuple(endpoint_limit(s, br, rtol) for s, br in (samples[-1.0], samples[1.0]))


def omega_form(x, y, rtol=1e-6):
    """Boundary form ``([x, y]^a - [x, y]_{-a}) / i``."""
    lower, upper = bracket_limits(x, y, rtol)
    return (upper - lower) / 1j


@dataclass(frozen=True)
class CutoffQuartet:
    """``phi_-, psi_-, phi_+, psi_+``: 1, ln(a + t) near -a (and 0 near +a), mirrored."""

    phi_minus: FunctionHandle
    psi_minus: FunctionHandle
    phi_plus: FunctionHandle
    psi_plus: FunctionHandle

    @classmethod
    def build(cls, a, mollifier=1):
        """Quartet built on the ``exp(-u^-m)`` smoothstep with ``m = mollifier``."""
        step = Smoothstep(a, mollifier)
        psi = LogCutoff(step)
        return cls(step, psi, Reflected(step), Reflected(psi))

    @property
    def a(self):
        return self.phi_minus.a

    def __iter__(self):
        return iter((self.phi_minus, self.psi_minus, self.phi_plus, self.psi_plus))

    def combine(self, coeffs):
        """``alpha_- phi_- + beta_- psi_- + alpha_+ phi_+ + beta_+ psi_+``."""
        return Combination(list(zip(coeffs, self)))


def gram_matrix(quartet, rtol=1e-6):
    """Matrix ``Omega_L(f_i, f_j)`` over the cutoff quartet; equals ``(2/a) J``."""
    fns = list(quartet)
    return np.array([[omega_form(fi, fj, rtol) for fj in fns] for fi in fns])


def from_boundary_values(quartet, bv):
    """Cutoff combination with prescribed boundary values.

    Uses ``b(psi) = 1, c(psi) = 0, b(phi) = 0, c(phi) = -1`` at the matching end.
    """
    b_m, c_m, b_p, c_p = np.asarray(bv.as_array() if isinstance(bv, BoundaryValues) else bv, dtype=complex)
    return quartet.combine([-c_m, b_m, -c_p, b_p])


def _inner_sup(x):
    a = x.a
    if isinstance(x, SampledFunction):
        mask = np.abs(x.grid) <= a / 2
        return float(np.max(np.abs(x.values[mask]))) if mask.any() else float(np.max(np.abs(x.values)))
    t = np.linspace(-a / 2, a / 2, 201)
    return float(np.max(np.abs(x.value(t))))


def domain_predicate(x, which, tol=VANISH_TOL, rtol=1e-6):
    """Numerical membership of ``x`` in ``D_{L_min}``, ``D_{L_max}`` or ``D_{L_I}``.

    Returns the verdict together with the measured boundary values (``None`` when
    extraction diverged, which also means ``x`` is numerically outside
    ``D_{L_max}``).  "Vanishing" is relative to the sup of ``|x|`` on ``[-a/2, a/2]``.
    """
    which = Domain(which)
    try:
        bv = boundary_values(x, rtol)
    except ExtrapolationDivergence:
        return False, None
    if which is Domain.LMAX:
        return bv.is_finite(), bv
    thresh = tol * max(_inner_sup(x), 1.0)
    arr = bv.as_array()
    if which is Domain.LI:
        return bool(abs(arr[0]) <= thresh and abs(arr[2]) <= thresh), bv
    return bool(np.all(np.abs(arr) <= thresh)), bv


def endpoint_values(x, rtol=1e-6):
    """Extrapolated ``(x(-a), x(a))``; finite exactly when ``x`` lies in ``D_{L_I}``."""
    samples = _endpoint_samples(x)
    return tuple(endpoint_limit(s, v, rtol) for s, v, _ in (samples[-1.0], samples[1.0]))


def continuity_modulus_bound(C, a, t1, t2):
    """``(C / sqrt a) * int_{t1}^{t2} dxi / sqrt(a^2 - xi^2)`` for members of ``D_{L_I}``.

    ``C`` is the L2 norm of ``((a^2 - xi^2) x')'``.
    """
    return C / np.sqrt(a) * (np.arcsin(np.asarray(t2) / a) - np.arcsin(np.asarray(t1) / a))
