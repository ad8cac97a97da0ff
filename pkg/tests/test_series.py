import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import polynomial as P
from scipy.integrate import quad, solve_ivp

from prolate import OutOfDisc
from prolate.boundary import bracket
from prolate.series import (
    Endpoint,
    Kind,
    ProblemParams,
    coefficient_streams,
    connect,
    deficiency_check,
    evaluate,
    indicial_data,
    log_solution,
    regular_solution,
    wronskian,
)

a_st = st.floats(0.3, 3.0)
lam_st = st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize(
    "a, lam, expected",
    [(1, 0, (-0.5, -0.5, 0.75)), (1, 1, (-0.5, 0, 1)), (2, 0, (-0.25, -4, 3))],
)
def test_indicial_examples(a, lam, expected):
    assert np.allclose(indicial_data(ProblemParams(a, lam)), expected, atol=1e-15)


def _taylor_by_cauchy(f, n, r):
    # Taylor coefficients from samples on the circle |s| = r
    m = 256
    theta = 2 * np.pi * np.arange(m) / m
    vals = f(r * np.exp(1j * theta))
    return (np.fft.fft(vals) / m)[:n] / r ** np.arange(n)


@given(a_st, lam_st)
def test_streams_match_closed_forms(a, lam):
    params = ProblemParams(a, lam)
    p, q = coefficient_streams(params, 12)
    p1, q0, q1 = indicial_data(params)
    assert np.isclose(p[1], p1, rtol=1e-13) and np.isclose(q[0], q0, atol=1e-12 * (1 + abs(q0)))
    assert np.isclose(q[1], q1, atol=1e-12 * (1 + abs(q1)))
    k = np.arange(1, 13)
    assert np.allclose(p[1:], -((2 * a) ** -k.astype(float)), rtol=1e-14)
    q_ref = _taylor_by_cauchy(lambda s: a * a * (lam - (s - a) ** 2) / (2 * a - s), 13, a)
    p_ref = _taylor_by_cauchy(lambda s: (2 * a - 2 * s) / (2 * a - s), 13, a)
    scale = 1 + abs(lam) + a**3
    assert np.allclose(q, q_ref, atol=1e-11 * scale)
    assert np.allclose(p, p_ref, atol=1e-12)


def test_q2_at_unit_interval():
    # a^2 (lambda - (s - a)^2)/(2a - s) at a = 1, lambda = 0: (-1 + 2s - s^2) sum (s/2)^j / 2
    _, q = coefficient_streams(ProblemParams(1.0, 0.0), 4)
    assert np.isclose(q[2], 0.5 * (-0.25 + 2 * 0.5 - 1))


@pytest.mark.parametrize("a, lam, c1", [(1, 0, 0.5), (1, 1, 0.0)])
def test_regular_c1_examples(a, lam, c1):
    sol = regular_solution(ProblemParams(a, lam))
    assert sol.coeffs_main[0] == 1
    assert np.isclose(sol.coeffs_main[1], c1, atol=1e-15)


@pytest.mark.parametrize("a, lam, d1", [(1, 0, -0.5), (1, 1, 0.5)])
def test_log_d1_examples(a, lam, d1):
    sol = log_solution(ProblemParams(a, lam))
    assert sol.coeffs_log_remainder[0] == 0
    assert np.isclose(sol.coeffs_log_remainder[1], d1, atol=1e-15)


@given(a_st, lam_st)
def test_c1_d1_closed_forms(a, lam):
    params = ProblemParams(a, lam)
    c1 = a**3 / 2 - lam * a / 2
    d1 = lam * a - a**3 + 1 / (2 * a)
    assert np.isclose(regular_solution(params).coeffs_main[1], c1, atol=1e-12 * (1 + abs(c1)))
    assert np.isclose(log_solution(params).coeffs_log_remainder[1], d1, atol=1e-12 * (1 + abs(d1)))


def _t_operator_residual(y, a, lam):
    # -(d/ds)(s(2a - s)/a^2 dy/ds) + ((s - a)^2 - lambda) y, exact polynomial arithmetic
    weight = np.array([0.0, 2 * a, -1.0]) / a**2
    flux = P.polymul(weight, P.polyder(y))
    pot = P.polymul(np.array([a * a - lam, -2 * a, 1.0]), y)
    return P.polyadd(-P.polyder(flux), pot)


@given(a_st, lam_st, st.sampled_from(list(Endpoint)))
def test_regular_residual_order(a, lam, endpoint):
    K = 20
    sol = regular_solution(ProblemParams(a, lam), endpoint, K)
    res = _t_operator_residual(np.asarray(sol.coeffs_main), a, lam)
    scale = np.max(np.abs(sol.coeffs_main) * a ** np.arange(K + 1)) * (1 + abs(lam) + a * a)
    low = np.abs(res[:K]) * a ** np.arange(K)
    assert np.all(low <= 1e-11 * scale)


@given(a_st, lam_st)
def test_log_residual_order(a, lam):
    K = 20
    sol = log_solution(ProblemParams(a, lam), Endpoint.MINUS, K)
    y1 = np.asarray(sol.coeffs_main)
    z = np.asarray(sol.coeffs_log_remainder)
    two_a_minus_s = np.array([2 * a, -1.0])
    # non-logarithmic part of L(y1 ln s + z) - lambda (y1 ln s + z)
    r2 = -P.polymul(two_a_minus_s, P.polyder(y1)) / a**2
    r2 = P.polyadd(r2, -P.polyder(P.polymul(two_a_minus_s, y1)) / a**2)
    r2 = P.polyadd(r2, _t_operator_residual(z, a, lam))
    scale = (1 + np.max(np.abs(z) * a ** np.arange(K + 1))) * (1 + abs(lam) + a**3) / min(a, 1) ** 2
    assert np.all(np.abs(r2[: K - 1]) * a ** np.arange(K - 1) <= 1e-10 * scale)
    # the logarithmic part is the regular residual of the order K+1 factor
    r1 = _t_operator_residual(y1, a, lam)
    assert np.all(np.abs(r1[: K - 1]) * a ** np.arange(K - 1) <= 1e-10 * scale)


@given(a_st, lam_st)
def test_endpoint_symmetry(a, lam):
    params = ProblemParams(a, lam)
    for make in (regular_solution, log_solution):
        m, p = make(params, Endpoint.MINUS), make(params, Endpoint.PLUS)
        assert np.array_equal(m.coeffs_main, p.coeffs_main)
        t = np.linspace(-0.9 * a, 0.5 * a, 7)
        assert np.allclose(m.value(t), p.value(-t)) and np.allclose(m.derivative(t), -p.derivative(-t))


def test_evaluate_normalization_and_log_part():
    params = ProblemParams(1.3, 0.4)
    x1 = regular_solution(params)
    x2 = log_solution(params)
    assert evaluate(x1, -1.3) == 1
    for s in (1e-4, 1e-8, 1e-12):
        t = -1.3 + s
        s = t + 1.3
        assert abs(evaluate(x2, t) - x1.value(t) * np.log(s)) < 10 * s
    value, deriv = evaluate(x1, 0.0, derivative=True)
    assert np.isclose(deriv, x1.derivative(0.0))


def test_evaluate_against_ode_oracle():
    a, lam = 1.0, 2.5
    params = ProblemParams(a, lam)
    for sol in (regular_solution(params), log_solution(params)):
        t0 = -a + 0.05 * a

        def rhs(t, u):
            x, v = u
            return [v / (1 - t * t / a**2), (t * t - lam) * x]

        u0 = [sol.value(t0), (1 - t0**2 / a**2) * sol.derivative(t0)]
        ref = solve_ivp(rhs, (t0, 0.0), np.asarray(u0, dtype=complex), method="RK45", rtol=1e-12, atol=1e-14)
        assert abs(ref.y[0, -1] - sol.value(0.0)) <= 1e-10 * (1 + abs(sol.value(0.0)))


def test_out_of_disc():
    sol = regular_solution(ProblemParams(1.0, 0.0))
    with pytest.raises(OutOfDisc):
        sol.value(1.0)
    sol.value(0.99)
    with pytest.raises(OutOfDisc):
        log_solution(ProblemParams(1.0, 0.0)).value(-1.0)
    with pytest.raises(OutOfDisc):
        log_solution(ProblemParams(1.0, 0.0), Endpoint.PLUS).value(-1.0)


def test_kinds_and_anchor():
    params = ProblemParams(2.0, 1.0)
    assert regular_solution(params).kind is Kind.REGULAR
    assert log_solution(params, Endpoint.PLUS).anchor == 2.0
    with pytest.raises(ValueError):
        ProblemParams(-1.0)


def test_connect_at_eigenvalue_and_away(spectra):
    dec = spectra[1.0]
    for n, lam in enumerate(dec.eigenvalues[:4]):
        c1, c2 = connect(ProblemParams(1.0, lam), rtol=1e-12)
        assert abs(c2) < 1e-8
        assert np.isclose(c1, (-1) ** n, atol=1e-8)
    mid = 0.5 * (dec.eigenvalues[0] + dec.eigenvalues[1])
    assert abs(connect(ProblemParams(1.0, mid))[1]) > 1e-2


def test_connect_parity():
    params = ProblemParams(1.2, 3.3)
    left = connect(params, start=Endpoint.MINUS, rtol=1e-12)
    right = connect(params, start=Endpoint.PLUS, rtol=1e-12)
    assert np.allclose(left, right, atol=1e-9)


@pytest.mark.parametrize("lam", [1j, -1j])
def test_deficiency_indices(lam):
    assert deficiency_check(ProblemParams(1.0, lam)) == (2, 2)


def test_deficiency_requires_nonreal():
    with pytest.raises(ValueError):
        deficiency_check(ProblemParams(1.0, 2.0))


@pytest.mark.parametrize("eps", [0.1, 1.0, 1.99])
def test_log_squared_integrable(eps):
    val, err = quad(lambda s: np.log(s) ** 2, 0, eps)
    assert np.isfinite(val) and err < 1e-8


def test_independence_near_anchor():
    params = ProblemParams(1.0, 0.7)
    x1, x2 = regular_solution(params), log_solution(params)
    t = -1 + np.array([1e-6, 1e-3, 0.1])
    brk = bracket(x1, x2, t)
    assert np.all(np.abs(brk) > 0.5)
    assert np.allclose(brk, brk[0], rtol=1e-10)
    w = wronskian(x1, x2, t)
    assert np.allclose(w, w[0], rtol=1e-10)
