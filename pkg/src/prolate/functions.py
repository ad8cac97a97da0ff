"""Closed-form functions on (-a, a) with exact derivatives and exact ``L x``.

Everything here follows one small protocol: ``value``, ``derivative``,
``second_derivative`` and ``apply_L`` evaluated on arrays of ``t``.  The
protocol is shared with :class:`prolate.series.SeriesSolution` and the
Legendre expansions of :mod:`prolate.spectral`, so brackets, boundary values
and Fourier images accept any of them.
"""

import numpy as np
from numpy.polynomial import Polynomial as _Poly
from scipy.special import expit


def apply_L_from_derivatives(fn, t):
    """``-(p x')' + t^2 x`` with ``p = 1 - t^2/a^2``."""
    t = np.asarray(t, dtype=float)
    a2 = fn.a**2
    return -(1 - t * t / a2) * fn.second_derivative(t) + (2 * t / a2) * fn.derivative(t) + t * t * fn.value(t)


class FunctionHandle:
    """Base class; subclasses set ``a`` and implement the three derivatives."""

    a: float
    provenance = "closed-form"

    def value(self, t):
        raise NotImplementedError

    def derivative(self, t):
        raise NotImplementedError

    def second_derivative(self, t):
        raise NotImplementedError

    def apply_L(self, t):
        return apply_L_from_derivatives(self, t)

    def __call__(self, t):
        return self.value(t)

    def __add__(self, other):
        if not isinstance(other, FunctionHandle):
            return NotImplemented
        return Combination([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        if not isinstance(other, FunctionHandle):
            return NotImplemented
        return Combination([(1.0, self), (-1.0, other)])

    def __mul__(self, coef):
        if not np.isscalar(coef):
            return NotImplemented
        return Combination([(coef, self)])

    __rmul__ = __mul__

    def __neg__(self):
        return Combination([(-1.0, self)])


class Combination(FunctionHandle):
    """Finite linear combination of handles sharing the same ``a``."""

    def __init__(self, terms):
        flat = []
        for coef, fn in terms:
            if isinstance(fn, Combination):
                flat.extend((coef * c, f) for c, f in fn.terms)
            else:
                flat.append((coef, fn))
        if not flat:
            raise ValueError("empty combination")
        a_values = {float(f.a) for _, f in flat}
        if len(a_values) != 1:
            raise ValueError("all terms must share the same half-length a")
        self.terms = tuple(flat)
        self.a = a_values.pop()

    def _sum(self, method, t):
        return sum(coef * getattr(fn, method)(t) for coef, fn in self.terms)

    def value(self, t):
        return self._sum("value", t)

    def derivative(self, t):
        return self._sum("derivative", t)

    def second_derivative(self, t):
        return self._sum("second_derivative", t)

    def apply_L(self, t):
        return self._sum("apply_L", t)


class Reflected(FunctionHandle):
    """``t -> f(-t)``; ``L`` commutes with the reflection."""

    def __init__(self, fn):
        self.fn = fn
        self.a = fn.a

    def value(self, t):
        return self.fn.value(-np.asarray(t, dtype=float))

    def derivative(self, t):
        return -self.fn.derivative(-np.asarray(t, dtype=float))

    def second_derivative(self, t):
        return self.fn.second_derivative(-np.asarray(t, dtype=float))

    def apply_L(self, t):
        return self.fn.apply_L(-np.asarray(t, dtype=float))


class Polynomial(FunctionHandle):
    """Polynomial in ``t`` given by ascending power coefficients."""

    def __init__(self, a, coeffs):
        self.a = float(a)
        self.poly = _Poly(np.asarray(coeffs, dtype=complex))
        self._d1 = self.poly.deriv(1)
        self._d2 = self.poly.deriv(2)

    def value(self, t):
        return self.poly(np.asarray(t, dtype=float))

    def derivative(self, t):
        return self._d1(np.asarray(t, dtype=float))

    def second_derivative(self, t):
        return self._d2(np.asarray(t, dtype=float))


class Bump(FunctionHandle):
    """``exp(-1/(1 - u^2))`` with ``u = (t - center)/radius``, zero for ``|u| >= 1``."""

    def __init__(self, a, center, radius):
        self.a = float(a)
        self.center = float(center)
        self.radius = float(radius)
        if self.radius <= 0 or abs(self.center) + self.radius >= self.a:
            raise ValueError("bump support must be a compact subset of (-a, a)")

    def _parts(self, t):
        u = (np.asarray(t, dtype=float) - self.center) / self.radius
        inside = np.abs(u) < 1
        ui = np.where(inside, u, 0.0)
        w = 1 - ui * ui
        f = np.where(inside, np.exp(-1 / w), 0.0)
        g1 = -2 * ui / w**2
        g2 = -2 / w**2 - 8 * ui * ui / w**3
        return f, g1, g2

    def value(self, t):
        return self._parts(t)[0]

    def derivative(self, t):
        f, g1, _ = self._parts(t)
        return f * g1 / self.radius

    def second_derivative(self, t):
        f, g1, g2 = self._parts(t)
        return f * (g1 * g1 + g2) / self.radius**2


class Smoothstep(FunctionHandle):
    """C-infinity transition from 1 on ``(-a, -a/2]`` to 0 on ``[a/2, a)``.

    ``H = 1/(1 + f(u)/f(1-u))`` with ``u = (t + a/2)/a`` and ``f(u) = exp(-u^-m)``;
    ``m = 1`` and ``m = 2`` give two genuinely different mollifiers.
    """

    def __init__(self, a, power=1):
        self.a = float(a)
        self.power = int(power)

    def _parts(self, t):
        m = self.power
        u = (np.asarray(t, dtype=float) + self.a / 2) / self.a
        inside = (u > 0) & (u < 1)
        ui = np.where(inside, u, 0.5)
        h = ui ** (-m) - (1 - ui) ** (-m)
        h1 = -m * ui ** (-m - 1) - m * (1 - ui) ** (-m - 1)
        h2 = m * (m + 1) * ui ** (-m - 2) - m * (m + 1) * (1 - ui) ** (-m - 2)
        sig = expit(h)
        ds = sig * expit(-h)
        value = np.where(u <= 0, 1.0, np.where(u >= 1, 0.0, sig))
        d1 = np.where(inside, ds * h1, 0.0) / self.a
        d2 = np.where(inside, ds * (1 - 2 * sig) * h1 * h1 + ds * h2, 0.0) / self.a**2
        return value, d1, d2

    def value(self, t):
        return self._parts(t)[0]

    def derivative(self, t):
        return self._parts(t)[1]

    def second_derivative(self, t):
        return self._parts(t)[2]


class LogCutoff(FunctionHandle):
    """``ln(a + t) H(t)``: equals ``ln(a + t)`` near ``-a`` and vanishes near ``+a``.

    ``apply_L`` is written out so the ``1/(a + t)`` terms cancel analytically:
    ``p psi' = (a - t) H / a^2 + p ln(a + t) H'``.
    """

    def __init__(self, step):
        self.step = step
        self.a = step.a

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return np.log(self.a + t) * self.step.value(t)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return self.step.value(t) / (self.a + t) + np.log(self.a + t) * self.step.derivative(t)

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        s = self.a + t
        h, h1 = self.step.value(t), self.step.derivative(t)
        return -h / s**2 + 2 * h1 / s + np.log(s) * self.step.second_derivative(t)

    def apply_L(self, t):
        t = np.asarray(t, dtype=float)
        a = self.a
        a2 = a * a
        h, h1, h2 = self.step.value(t), self.step.derivative(t), self.step.second_derivative(t)
        ln = np.log(a + t)
        p = 1 - t * t / a2
        flux_prime = -h / a2 + 2 * (a - t) * h1 / a2 + ln * (-2 * t / a2 * h1 + p * h2)
        return -flux_prime + t * t * ln * h


class Windowed(FunctionHandle):
    """``H(t) f(t)`` for a cutoff ``H``; ``f`` is only evaluated where ``H != 0``.

    ``L(H f) = H L f - p (2 H' f' + H'' f) + (2t/a^2) H' f``.
    """

    def __init__(self, fn, window):
        if float(fn.a) != float(window.a):
            raise ValueError("window and function must share a")
        self.fn = fn
        self.window = window
        self.a = float(fn.a)

    def _masked(self, method, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        h = self.window.value(t)
        out = np.zeros(t.shape, dtype=complex)
        live = h != 0
        if live.any():
            out[live] = getattr(self.fn, method)(t[live])
        return out, t

    def value(self, t):
        f, t = self._masked("value", t)
        return self.window.value(t) * f

    def derivative(self, t):
        f, t = self._masked("value", t)
        df, _ = self._masked("derivative", t)
        return self.window.derivative(t) * f + self.window.value(t) * df

    def second_derivative(self, t):
        f, t = self._masked("value", t)
        df, _ = self._masked("derivative", t)
        d2f, _ = self._masked("second_derivative", t)
        w = self.window
        return w.second_derivative(t) * f + 2 * w.derivative(t) * df + w.value(t) * d2f

    def apply_L(self, t):
        f, t = self._masked("value", t)
        df, _ = self._masked("derivative", t)
        lf, _ = self._masked("apply_L", t)
        w = self.window
        h1, h2 = w.derivative(t), w.second_derivative(t)
        p = 1 - t * t / self.a**2
        return w.value(t) * lf - p * (2 * h1 * df + h2 * f) + (2 * t / self.a**2) * h1 * f
