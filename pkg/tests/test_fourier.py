import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prolate import DegenerateUnitary, GridMismatch
from prolate.boundary import CutoffQuartet, SampledFunction, boundary_values, clustered_grid
from prolate.extensions import Unitary2, boundary_condition_matrix, membership
from prolate.fourier import (
    SCALE,
    QuadratureGrid,
    TruncatedFourier,
    apply,
    commutator_defect,
    evaluation_functionals,
    shared_eigenfunction_check,
    witness_noncommuting,
)
from prolate.functions import Bump, FunctionHandle, Polynomial, Reflected, Smoothstep, Windowed
from prolate.series import Endpoint, ProblemParams, log_solution, regular_solution


class Exponential(FunctionHandle):
    def __init__(self, a, k):
        self.a, self.k = a, k

    def value(self, t):
        return np.exp(1j * self.k * np.asarray(t))

    def derivative(self, t):
        return 1j * self.k * self.value(t)

    def second_derivative(self, t):
        return -self.k**2 * self.value(t)


def synthesized_member(rng, a):
    """Series tails at both ends, cutoff logs and a smooth interior."""
    m = int(rng.integers(1, 3))
    h = Smoothstep(a, m)
    lam = complex(rng.normal() * 3, rng.normal())
    c = rng.normal(size=8) + 1j * rng.normal(size=8)
    left = c[0] * Windowed(log_solution(ProblemParams(a, lam), Endpoint.MINUS), h)
    left = left + c[1] * Windowed(regular_solution(ProblemParams(a, lam), Endpoint.MINUS), h)
    right = c[2] * Windowed(log_solution(ProblemParams(a, lam), Endpoint.PLUS), Reflected(h))
    q = CutoffQuartet.build(a, m)
    interior = Polynomial(a, c[3:6]) + c[6] * Bump(a, rng.uniform(-0.3, 0.3) * a, 0.4 * a)
    return left + right + c[7] * q.psi_plus + interior


@pytest.mark.parametrize("a", [0.5, 1.0, 2.5])
def test_grid_invariants(a):
    for g in (QuadratureGrid.gauss(a), QuadratureGrid.graded(a)):
        assert abs(np.sum(g.weights) - 2 * a) <= 1e-12 * max(1, 2 * a)
        assert np.all(np.abs(g.nodes) < a) and np.all(g.weights > 0)
        assert np.allclose(np.sort(g.nodes), -np.sort(g.nodes)[::-1])


def test_apply_constant():
    f = TruncatedFourier(QuadratureGrid.gauss(1.0))
    y = apply(f, Polynomial(1.0, [1.0]))
    assert isinstance(y, SampledFunction)
    t = y.grid
    assert np.allclose(y.values, np.sqrt(2 / np.pi) * np.sinc(t / np.pi), atol=1e-14)
    img = f.image(Polynomial(1.0, [1.0]))
    assert np.isclose(img.value(0.0), np.sqrt(2 / np.pi), atol=1e-15)


def test_apply_zero_and_linearity():
    f = TruncatedFourier(QuadratureGrid.gauss(1.3, 64))
    assert np.all(f.kernel_matrix @ np.zeros(64) == 0)
    x, y = Polynomial(1.3, [1, 2]), Bump(1.3, 0.2, 0.5)
    lhs = f.image(2 * x - y).value(np.linspace(-1.3, 1.3, 5))
    rhs = 2 * f.image(x).value(np.linspace(-1.3, 1.3, 5)) - f.image(y).value(np.linspace(-1.3, 1.3, 5))
    assert np.allclose(lhs, rhs, atol=1e-13)


@pytest.mark.parametrize("a", [0.7, 1.0, 2.0])
def test_apply_matched_frequency(a):
    f = TruncatedFourier(QuadratureGrid.gauss(a))
    assert np.isclose(f.image(Exponential(a, -a)).value(a), 2 * a / np.sqrt(2 * np.pi), atol=1e-13)


def test_grid_mismatch():
    f = TruncatedFourier(QuadratureGrid.gauss(1.0, 32))
    with pytest.raises(GridMismatch):
        f.image(np.ones(31))
    grid = clustered_grid(1.0)
    bare = SampledFunction(grid, np.ones(grid.size), np.zeros(grid.size), 1.0)
    assert np.allclose(f.samples(bare), 1)
    with pytest.raises(GridMismatch):
        f.samples(bare, "apply_L")
    inner = np.concatenate((-1 + 1e-6 * 2.0 ** np.arange(10), [0.0], 1 - 1e-6 * 2.0 ** np.arange(10)[::-1]))
    short = SampledFunction(np.sort(inner), np.ones(21), np.zeros(21), 1.0)
    f_wide = TruncatedFourier(QuadratureGrid.graded(1.0))
    with pytest.raises(GridMismatch):
        f_wide.samples(short)


def test_defect_vanishes_on_eigenfunctions(spectra):
    dec = spectra[1.0]
    for n in range(8):
        rep = commutator_defect(dec.eigenfunction(n))
        assert np.max(np.abs(rep.predicted)) < 1e-6 * SCALE
        assert rep.residual_norm <= 1e-8


@pytest.mark.parametrize("gamma", [0.0, 0.7, -2j])
@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_defect_of_log_cutoff(a, gamma):
    q = CutoffQuartet.build(a)
    rep = commutator_defect(q.psi_minus + gamma * q.phi_minus)
    expected = SCALE * 2 / a * np.exp(-1j * a * rep.targets)
    assert np.allclose(rep.predicted, expected, atol=1e-9)
    assert np.max(np.abs(rep.residual - expected)) <= 1e-9


def test_defect_unnormalized_scale():
    a = 1.3
    q = CutoffQuartet.build(a)
    f = TruncatedFourier(QuadratureGrid.graded(a), normalized=False)
    rep = commutator_defect(q.psi_plus, f)
    assert np.allclose(rep.residual, 2 / a * np.exp(1j * a * rep.targets), atol=1e-9)


def test_defect_polynomial_zero():
    rep = commutator_defect(Polynomial(1.0, [1, -2, 3, 0.5]))
    assert np.allclose(rep.predicted, 0, atol=1e-9) and rep.residual_norm < 1e-10


@settings(max_examples=10)
@given(st.integers(0, 2**32 - 1))
def test_defect_identity_random_members(seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.5, 2.0)
    x = synthesized_member(rng, a)
    rep = commutator_defect(x)
    g = QuadratureGrid.graded(a)
    norm = np.sqrt(g.integrate(np.abs(x.value(g.nodes)) ** 2))
    assert rep.error <= 1e-7 * (1 + norm)


def test_images_are_smooth(rng):
    a = 1.0
    f = TruncatedFourier(QuadratureGrid.graded(a))
    for _ in range(3):
        img = f.image(synthesized_member(rng, a))
        bv = boundary_values(img)
        ends = img.value(np.array([-a, a]))
        assert abs(bv.b_minus) < 1e-8 and abs(bv.b_plus) < 1e-8
        assert np.allclose([bv.c_minus, bv.c_plus], -ends, atol=1e-8)


def test_grid_refinement_stability(spectra):
    dec = spectra[1.0]
    f1 = TruncatedFourier(QuadratureGrid.gauss(1.0, 256))
    f2 = TruncatedFourier(QuadratureGrid.gauss(1.0, 512))
    for n in range(8):
        b1, r1 = shared_eigenfunction_check(dec, n, f1)
        b2, r2 = shared_eigenfunction_check(dec, n, f2)
        assert abs(b1 - b2) < 1e-9 and abs(r1 - r2) < 1e-9
        d1 = commutator_defect(dec.eigenfunction(n), f1).residual_norm
        d2 = commutator_defect(dec.eigenfunction(n), f2).residual_norm
        assert abs(d1 - d2) < 1e-9
    x = Polynomial(1.0, [0.3, 1, -1])
    t = np.linspace(-1, 1, 11)
    assert np.max(np.abs(f1.image(x).value(t) - f2.image(x).value(t))) < 1e-9


def test_shared_eigenfunctions(spectra):
    dec = spectra[1.0]
    f = TruncatedFourier(QuadratureGrid.gauss(1.0, 128))
    # Nystrom matrix W^1/2 E W^1/2 has the same spectrum as the discretized operator
    sw = np.sqrt(f.grid.weights)
    nystrom = sw[:, None] * (f.kernel_matrix / f.grid.weights) * sw[None, :]
    mu = np.linalg.eigvals(nystrom)
    for n in range(8):
        beta, resid = shared_eigenfunction_check(dec, n)
        assert resid <= 1e-6
        ratio = beta / 1j**n
        assert abs(ratio.imag) <= 1e-8 and ratio.real > 0
        assert np.min(np.abs(mu - beta)) < 1e-8


def test_beta_sign_invariant(spectra):
    from prolate.spectral import SpectralDecomposition

    dec = spectra[1.0]
    flipped = SpectralDecomposition(dec.a, dec.variant, dec.basis_size, dec.eigenvalues, -dec.coefficient_vectors, dec.parity, dec.tail_norms)
    for n in range(3):
        assert shared_eigenfunction_check(dec, n)[0] == pytest.approx(shared_eigenfunction_check(flipped, n)[0], abs=1e-15)


def test_evaluation_functionals_independent():
    a = 1.0
    f = TruncatedFourier(QuadratureGrid.graded(a))
    rng = np.random.default_rng(5)
    for _ in range(5):
        lo = rng.uniform(-0.8, 0.6)
        width = rng.uniform(0.05, 0.2)
        bumps = [Bump(a, lo + width / 2, width / 4), Bump(a, lo + width, width / 4)]
        m = evaluation_functionals(f, bumps)
        assert abs(np.linalg.det(m)) > 1e-10


def test_witness_diagonal_unitary():
    for a in (1.0, 2.0):
        w = witness_noncommuting(Unitary2(np.diag([1j, 1.0])), a)
        assert np.isclose(w.case_a.commutator_norm, SCALE * 2 / a, rtol=1e-7)
        assert w.case_a.bc_residual < 1e-8
        assert w.case_b.bc_residual >= 0.1
        assert membership(w.u, w.case_a.x_boundary_values, tol=1e-7)


def test_witness_mirror_case():
    w = witness_noncommuting(Unitary2(np.diag([1.0, -1.0])))
    bv = w.case_a.x_boundary_values
    assert abs(bv.b_minus) < 1e-8 and np.isclose(abs(bv.b_plus), 1)
    assert np.isclose(w.case_a.commutator_norm, SCALE * 2, rtol=1e-7)


def test_witness_identity_rejected():
    with pytest.raises(DegenerateUnitary, match="no witness"):
        witness_noncommuting(Unitary2.identity())


def test_witness_case_b_violation():
    u = Unitary2(np.diag([np.exp(0.4j), np.exp(-1.1j)]))
    w = witness_noncommuting(u)
    ends = w.case_b.image_endpoints
    assert np.isclose(np.linalg.norm(ends), 1, atol=1e-8)
    res = boundary_condition_matrix(u) @ w.case_b.image_boundary_values.as_array()
    assert np.linalg.norm(res) >= 0.1
