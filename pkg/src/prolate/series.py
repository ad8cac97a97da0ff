"""Frobenius solutions of ``L x = lambda x`` near the singular endpoints.

With ``t = -a + s`` (or ``t = a - s`` at the right end) the equation

    -d/dt (1 - t^2/a^2) dx/dt + t^2 x = lambda x

becomes ``s y'' + p(s) y' + q(s) y = 0``.  Writing ``1 - t^2/a^2 = s (2a - s)/a^2``
and multiplying through by ``-a^2 / (2a - s)`` gives

    p(s) = (2a - 2s) / (2a - s) = 1 - sum_{k>=1} (s / 2a)^k,
    q(s) = a^2 (lambda - (s - a)^2) / (2a - s)
         = (a/2) (lambda - a^2 + 2a s - s^2) sum_{j>=0} (s / 2a)^j,

both holomorphic for ``|s| < 2a``.  The map ``t -> -t`` fixes the operator, so the
right endpoint uses the same streams.  The indicial equation is ``rho^2 = 0``:
one holomorphic solution ``y1`` with ``y1(0) = 1`` and one of the form
``y1 ln s + z`` with ``z(0) = 0``.
"""

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

from .errors import IntegrationFailure, OutOfDisc

DEFAULT_ORDER = 40


class Endpoint(enum.Enum):
    MINUS = "-a"
    PLUS = "+a"

    @property
    def sign(self):
        """Anchor location divided by ``a``."""
        return -1.0 if self is Endpoint.MINUS else 1.0


class Kind(enum.Enum):
    REGULAR = "regular"
    LOGARITHMIC = "logarithmic"


@dataclass(frozen=True)
class ProblemParams:
    """Half-length ``a`` of the interval and spectral parameter ``lam``."""

    a: float
    lam: complex = 0.0

    def __post_init__(self):
        a = float(self.a)
        if not np.isfinite(a) or a <= 0:
            raise ValueError(f"a must be finite and positive, got {self.a!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "lam", complex(self.lam))


def indicial_data(params):
    """Leading coefficients ``(p1, q0, q1)`` of the transformed equation, in closed form."""
    a, lam = params.a, params.lam
    return -1.0 / (2 * a), lam * a / 2 - a**3 / 2, lam / 4 + 0.75 * a**2


def coefficient_streams(params, order):
    """Taylor coefficients ``p_0..p_K`` and ``q_0..q_K`` of ``p(s)`` and ``q(s)``."""
    if order < 1:
        raise ValueError("order must be >= 1")
    a, lam = params.a, params.lam
    k = np.arange(order + 1)
    geo = (2.0 * a) ** (-k.astype(float))
    p = -geo
    p[0] = 1.0
    numer = np.array([lam - a * a, 2.0 * a, -1.0], dtype=complex)
    q = np.zeros(order + 1, dtype=complex)
    for m, nm in enumerate(numer):
        q[m:] += nm * geo[: order + 1 - m]
    q *= a / 2
    return p, q


def _regular_coefficients(p, q, order):
    c = np.zeros(order + 1, dtype=complex)
    c[0] = 1.0
    for k in range(order):
        j = np.arange(1, k + 1)
        acc = -np.sum(p[j] * (k + 1 - j) * c[k + 1 - j])
        acc -= np.sum(q[: k + 1] * c[k::-1])
        c[k + 1] = acc / (k + 1) ** 2
    return c


def _log_coefficients(p, q, c, order):
    # s z'' + p z' + q z = -2 y1' + ((1 - p)/s) y1, z(0) = 0
    d = np.zeros(order + 1, dtype=complex)
    for k in range(order):
        j = np.arange(1, k + 2)
        rhs = -2.0 * (k + 1) * c[k + 1] - np.sum(p[j] * c[k + 1 - j])
        j = np.arange(1, k + 1)
        rhs -= np.sum(p[j] * (k + 1 - j) * d[k + 1 - j])
        rhs -= np.sum(q[: k + 1] * d[k::-1])
        d[k + 1] = rhs / (k + 1) ** 2
    return d


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SeriesSolution:
    """Truncated Frobenius solution anchored at ``-a`` or ``+a``.

    ``coeffs_main`` holds the holomorphic factor ``y1``; for the logarithmic kind
    the solution is ``y1(s) ln s + z(s)`` with ``z`` given by
    ``coeffs_log_remainder``.  ``s`` is the distance from the anchor.
    """

    endpoint: Endpoint
    kind: Kind
    coeffs_main: np.ndarray
    coeffs_log_remainder: np.ndarray | None
    order: int
    params: ProblemParams
    provenance: str = field(default="series", init=False)

    @property
    def a(self):
        return self.params.a

    @property
    def anchor(self):
        return self.endpoint.sign * self.params.a

    def distance(self, t):
        """Signed distance ``s`` from the anchor, checked against the disc ``|s| < 2a``."""
        t = np.asarray(t, dtype=float)
        s = -self.endpoint.sign * (t - self.anchor)
        if np.any(np.abs(s) >= 2 * self.params.a):
            raise OutOfDisc(f"|t - ({self.anchor:g})| must stay below 2a = {2 * self.params.a:g}")
        if self.kind is Kind.LOGARITHMIC and np.any(s <= 0):
            raise OutOfDisc("the logarithmic solution is only defined on the open interval side")
        return s

    @cached_property
    def _derivs(self):
        c1 = P.polyder(self.coeffs_main)
        c2 = P.polyder(c1)
        if self.coeffs_log_remainder is None:
            return c1, c2, None, None
        d1 = P.polyder(self.coeffs_log_remainder)
        return c1, c2, d1, P.polyder(d1)

    def _in_s(self, s):
        """``y, dy/ds, d2y/ds2`` at distance ``s``."""
        c1, c2, d1, d2 = self._derivs
        y1 = P.polyval(s, self.coeffs_main)
        y1p = P.polyval(s, c1)
        y1pp = P.polyval(s, c2)
        if self.kind is Kind.REGULAR:
            return y1, y1p, y1pp
        ln = np.log(s)
        z = P.polyval(s, self.coeffs_log_remainder)
        y = y1 * ln + z
        yp = y1p * ln + y1 / s + P.polyval(s, d1)
        ypp = y1pp * ln + 2 * y1p / s - y1 / s**2 + P.polyval(s, d2)
        return y, yp, ypp

    def value(self, t):
        return self._in_s(self.distance(t))[0]

    def derivative(self, t):
        return -self.endpoint.sign * self._in_s(self.distance(t))[1]

    def second_derivative(self, t):
        return self._in_s(self.distance(t))[2]

    def apply_L(self, t):
        """``L x`` in the variable ``s`` with the ``1/s`` terms cancelled analytically.

        In ``s``, ``a^2 L = -(s(2a - s) y'' + 2(a - s) y') + a^2 (a - s)^2 y``; for
        ``y = y1 ln s + z`` the singular parts of ``y''`` and ``y'`` combine to ``-y1``.
        """
        a = self.params.a
        s = self.distance(t)
        c1, c2, d1, d2 = self._derivs
        y1 = P.polyval(s, self.coeffs_main)
        y1p = P.polyval(s, c1)
        y1pp = P.polyval(s, c2)
        reg = -(s * (2 * a - s) * y1pp + 2 * (a - s) * y1p) / a**2 + (a - s) ** 2 * y1
        if self.kind is Kind.REGULAR:
            return reg
        z = P.polyval(s, self.coeffs_log_remainder)
        zp = P.polyval(s, d1)
        zpp = P.polyval(s, d2)
        rest = (2 * a - s) * (2 * y1p + s * zpp) + 2 * (a - s) * zp - y1
        return reg * np.log(s) - rest / a**2 + (a - s) ** 2 * z

    def tail_estimate(self, s):
        """Magnitude of the last retained term at distance ``s`` (truncation heuristic)."""
        last = abs(self.coeffs_main[-1]) * abs(s) ** self.order
        if self.coeffs_log_remainder is not None:
            last = max(last * abs(np.log(s)), abs(self.coeffs_log_remainder[-1]) * abs(s) ** self.order)
        return last


def regular_solution(params, endpoint=Endpoint.MINUS, order=DEFAULT_ORDER):
    """Holomorphic solution ``x1`` with ``x1(anchor) = 1``."""
    if order < 2:
        raise ValueError("order must be >= 2")
    p, q = coefficient_streams(params, order)
    c = _regular_coefficients(p, q, order)
    return SeriesSolution(Endpoint(endpoint), Kind.REGULAR, _frozen(c), None, order, params)


def log_solution(params, endpoint=Endpoint.MINUS, order=DEFAULT_ORDER):
    """Logarithmic solution ``x2 = x1 ln s + w`` with ``w(anchor) = 0``."""
    if order < 2:
        raise ValueError("order must be >= 2")
    p, q = coefficient_streams(params, order + 1)
    c = _regular_coefficients(p, q, order + 1)
    d = _log_coefficients(p, q, c, order)
    return SeriesSolution(Endpoint(endpoint), Kind.LOGARITHMIC, _frozen(c[: order + 1]), _frozen(d), order, params)


def evaluate(sol, t, derivative=False):
    """Evaluate a series solution at ``t``; with ``derivative=True`` return ``(x, x')``."""
    if derivative:
        return sol.value(t), sol.derivative(t)
    return sol.value(t)


def _interior_rhs(a, lams):
    a2 = a * a

    def rhs(t, u):
        # u = [x, p x'] for every lambda
        n = lams.size
        x, flux = u[:n], u[n:]
        return np.concatenate((flux / (1 - t * t / a2), (t * t - lams) * x))

    return rhs


def continue_solutions(sols, delta=None, rtol=1e-10):
    """Continue series solutions from their anchor to the opposite end.

    All ``sols`` must share ``a`` and the anchor; their ``lambda`` may differ.
    The series is evaluated at distance ``delta`` (default ``a/2``) from the
    anchor and the flux form ``x' = v/p, v' = (t^2 - lambda) x`` is integrated
    with an adaptive 8th-order Runge-Kutta scheme up to distance ``delta`` from
    the far end.  Returns ``(x, x', t_far)``.
    """
    a = sols[0].a
    start = sols[0].endpoint
    delta = a / 2 if delta is None else float(delta)
    if not 0 < delta < a:
        raise ValueError("delta must lie in (0, a)")
    t0 = start.sign * (a - delta)
    t1 = -t0
    lams = np.array([s.params.lam for s in sols])
    p0 = 1 - t0 * t0 / a**2
    u0 = np.concatenate(([s.value(t0) for s in sols], [p0 * s.derivative(t0) for s in sols]))
    sol = integrate.solve_ivp(
        _interior_rhs(a, lams), (t0, t1), u0.astype(complex), method="DOP853", rtol=rtol, atol=rtol * 1e-6
    )
    if sol.status != 0:
        raise IntegrationFailure(sol.message)
    uf = sol.y[:, -1]
    n = len(sols)
    return uf[:n], uf[n:] / (1 - t1 * t1 / a**2), t1


def decompose_far(sols, delta=None, rtol=1e-10):
    """Coefficients ``(c1, c2)`` of each solution in the far-end basis ``x1, x2``."""
    far = Endpoint.PLUS if sols[0].endpoint is Endpoint.MINUS else Endpoint.MINUS
    x, xp, t1 = continue_solutions(sols, delta, rtol)
    c1 = np.empty(len(sols), dtype=complex)
    c2 = np.empty(len(sols), dtype=complex)
    for i, s in enumerate(sols):
        y1 = regular_solution(s.params, far, s.order)
        y2 = log_solution(s.params, far, s.order)
        basis = np.array([[y1.value(t1), y2.value(t1)], [y1.derivative(t1), y2.derivative(t1)]])
        c1[i], c2[i] = np.linalg.solve(basis, [x[i], xp[i]])
    return c1, c2


def connect(params, order=DEFAULT_ORDER, delta=None, rtol=1e-10, start=Endpoint.MINUS):
    """Connection coefficients of ``x1`` (anchored at ``start``) in the far-end basis.

    ``x1^-(t) = c1 x1^+(t) + c2 x2^+(t)`` for the default start; since
    ``b(x2^+) = 1`` and ``c(x1^+) = -1`` these are ``c2 = b_a(x1^-)`` and
    ``c1 = -c_a(x1^-)``.  With ``start=Endpoint.PLUS`` the roles of the ends swap.
    """
    c1, c2 = connect_many(params.a, [params.lam], order, delta, rtol, start)
    return complex(c1[0]), complex(c2[0])


def connect_many(a, lams, order=DEFAULT_ORDER, delta=None, rtol=1e-10, start=Endpoint.MINUS):
    """Vectorized :func:`connect` over an array of spectral parameters."""
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    sols = [regular_solution(ProblemParams(a, lam), Endpoint(start), order) for lam in lams]
    return decompose_far(sols, delta, rtol)


def wronskian(x, y, t):
    """``p(t) (x y' - x' y)``; constant in t for two solutions at the same lambda."""
    t = np.asarray(t, dtype=float)
    p = 1 - t * t / x.a**2
    return p * (x.value(t) * y.derivative(t) - x.derivative(t) * y.value(t))


def _near_end_l2(sol, eps):
    anchor = sol.anchor
    direction = -sol.endpoint.sign

    def integrand(s):
        return abs(sol.value(anchor + direction * s)) ** 2

    val, err = integrate.quad(integrand, 0.0, eps, limit=200)
    return val, err


def _count_l2(params, order, eps):
    count = 0
    for end in Endpoint:
        sols = (regular_solution(params, end, order), log_solution(params, end, order))
        finite = [np.isfinite(_near_end_l2(s, eps)[0]) for s in sols]
        anchor, direction = sols[0].anchor, -end.sign
        w = wronskian(sols[0], sols[1], anchor + direction * eps / 2)
        independent = abs(w) > 1e-12
        count += sum(finite) if independent else min(1, sum(finite))
    # both endpoint pairs span the same 2-dim solution space
    return max(count - 2, 0)


def deficiency_check(params, order=DEFAULT_ORDER, eps=None):
    """Deficiency numbers ``(n+, n-)`` at ``lambda`` and ``conj(lambda)``.

    Every Frobenius solution is square integrable near its anchor (the log
    singularity is), so all solutions of ``L x = lambda x`` lie in
    ``L^2(-a, a)`` and both numbers equal the dimension 2 of the solution space.
    """
    if params.lam.imag == 0:
        raise ValueError("deficiency numbers are defined for non-real lambda")
    eps = params.a / 2 if eps is None else eps
    n_plus = _count_l2(params, order, eps)
    n_minus = _count_l2(ProblemParams(params.a, params.lam.conjugate()), order, eps)
    return n_plus, n_minus
