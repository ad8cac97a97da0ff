"""Self-adjoint extensions as J-self-complementary subspaces of C^4.

Row vectors ``[alpha_-, beta_-, alpha_+, beta_+]`` are coordinates of a boundary
class in the cutoff basis ``phi_-, psi_-, phi_+, psi_+``; on these coordinates
the boundary form is ``(2/a) v J w^*``.  Every 2x2 unitary ``U`` gives the
subspace spanned by

    v1(U) = [1 + u11, i(1 - u11), u21, -i u21]
    v2(U) = [u12, -i u12, 1 + u22, i(1 - u22)]

and the extension ``L_U`` is cut out of the maximal domain by the boundary
conditions ``B(U) (b_{-a}, c_{-a}, b_a, c_a)^T = 0`` with

    B(U) = [[1 + u11, -i(1 - u11), u12, i u12],
            [u21, i u21, 1 + u22, -i(1 - u22)]].
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .errors import NotSelfComplementary, RankDeficient

J = np.array(
    [[0, 1j, 0, 0], [-1j, 0, 0, 0], [0, 0, 0, 1j], [0, 0, -1j, 0]],
    dtype=complex,
)
J.setflags(write=False)

E_PLUS = np.array([[1, 1j, 0, 0], [0, 0, 1, 1j]], dtype=complex)
E_MINUS = np.array([[1, -1j, 0, 0], [0, 0, 1, -1j]], dtype=complex)
SPAN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Unitary2:
    """A 2x2 unitary matrix, checked on construction."""

    matrix: np.ndarray
    atol: float = 1e-12

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        err = np.max(np.abs(m @ m.conj().T - np.eye(2)))
        if not err <= self.atol:
            raise ValueError(f"matrix is not unitary (|U U* - I| = {err:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __getitem__(self, idx):
        return self.matrix[idx]

    def __eq__(self, other):
        if not isinstance(other, Unitary2):
            return NotImplemented
        return bool(np.allclose(self.matrix, other.matrix, atol=1e-12, rtol=0))

    __hash__ = None

    @property
    def H(self):
        return Unitary2(self.matrix.conj().T, self.atol)

    def is_identity(self, atol=1e-12):
        return bool(np.allclose(self.matrix, np.eye(2), atol=atol, rtol=0))

    @classmethod
    def identity(cls):
        return cls(np.eye(2))

    @classmethod
    def random(cls, rng):
        """Haar-distributed sample (QR of a complex Gaussian with phase correction)."""
        z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
        q, r = np.linalg.qr(z)
        d = np.diag(r)
        return cls(q * (d / np.abs(d)))


@dataclass(frozen=True, eq=False)
class BoundarySubspace:
    basis_rows: np.ndarray
    source: Unitary2 | None = None

    def __post_init__(self):
        rows = np.array(self.basis_rows, dtype=complex)
        if rows.ndim != 2 or rows.shape[1] != 4:
            raise ValueError("basis rows must be vectors in C^4")
        rows.setflags(write=False)
        object.__setattr__(self, "basis_rows", rows)

    @property
    def dim(self):
        return int(np.linalg.matrix_rank(self.basis_rows, tol=SPAN_TOL))


def projectors():
    """``P+ = (I + J)/2`` and ``P- = (I - J)/2``."""
    eye = np.eye(4, dtype=complex)
    return (eye + J) / 2, (eye - J) / 2


def j_form(v, w):
    """Indefinite pairing ``v J w^*`` of row vectors."""
    return np.asarray(v) @ J @ np.conj(np.asarray(w)).T


def subspace_from_unitary(u):
    u = u.matrix if isinstance(u, Unitary2) else np.asarray(u, dtype=complex)
    u11, u12, u21, u22 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    rows = np.array(
        [
            [1 + u11, 1j * (1 - u11), u21, -1j * u21],
            [u12, -1j * u12, 1 + u22, 1j * (1 - u22)],
        ]
    )
    return BoundarySubspace(rows, u if isinstance(u, Unitary2) else None)


def _orthonormal_rows(rows):
    q, r = np.linalg.qr(np.asarray(rows).T)
    if np.min(np.abs(np.diag(r))) < SPAN_TOL * max(1.0, np.max(np.abs(r))):
        raise RankDeficient("basis rows are linearly dependent")
    return q.T


def same_span(rows_a, rows_b, tol=SPAN_TOL):
    """Mutual projection residuals of two row spans below ``tol``."""
    qa, qb = _orthonormal_rows(rows_a), _orthonormal_rows(rows_b)
    if qa.shape[0] != qb.shape[0]:
        return False
    res_ab = qb - (qb @ qa.conj().T) @ qa
    res_ba = qa - (qa @ qb.conj().T) @ qb
    return bool(max(np.max(np.abs(res_ab)), np.max(np.abs(res_ba))) < tol)


def j_orthogonal_complement(s):
    """Rows spanning ``{x : x J y^* = 0 for all y in S}``."""
    rows = s.basis_rows if isinstance(s, BoundarySubspace) else np.asarray(s)
    _orthonormal_rows(rows)
    # x (J Y^*) = 0  <=>  (J Y^*)^T x^T = 0
    return null_space((J @ rows.conj().T).T).T


def is_self_complementary(s, tol=SPAN_TOL):
    rows = s.basis_rows
    comp = j_orthogonal_complement(s)
    return same_span(rows, comp, tol)


def unitary_from_subspace(s, tol=SPAN_TOL):
    """Recover ``U`` from a J-self-complementary subspace.

    Each basis row splits as ``w = w P+ + w P-``; in the bases ``e+``, ``e-`` this is
    ``A e+ + B e-`` and ``w = v + v U`` forces ``B = A U^T``.
    """
    if not is_self_complementary(s, tol):
        raise NotSelfComplementary("subspace is not J-self-complementary")
    rows = s.basis_rows
    p_plus, p_minus = projectors()
    # e+ and e- rows have squared norm 2
    coords_plus = (rows @ p_plus) @ E_PLUS.conj().T / 2
    coords_minus = (rows @ p_minus) @ E_MINUS.conj().T / 2
    ut = np.linalg.solve(coords_plus, coords_minus)
    return Unitary2(ut.T, atol=1e-9)


def boundary_condition_matrix(u):
    """2x4 matrix acting on the column ``(b_{-a}, c_{-a}, b_a, c_a)``."""
    u = u.matrix if isinstance(u, Unitary2) else np.asarray(u, dtype=complex)
    u11, u12, u21, u22 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    return np.array(
        [
            [1 + u11, -1j * (1 - u11), u12, 1j * u12],
            [u21, 1j * u21, 1 + u22, -1j * (1 - u22)],
        ]
    )


def membership(u, bv, tol=1e-8):
    """Whether boundary values ``bv`` satisfy the boundary conditions of ``L_U``."""
    arr = bv.as_array() if hasattr(bv, "as_array") else np.asarray(bv, dtype=complex)
    residual = boundary_condition_matrix(u) @ arr
    return bool(np.max(np.abs(residual)) <= tol * max(1.0, np.max(np.abs(arr))))


def coordinates_from_boundary_values(bv):
    """Cutoff-basis coordinates ``[-c_{-a}, b_{-a}, -c_a, b_a]`` of a boundary class."""
    b_m, c_m, b_p, c_p = bv.as_array() if hasattr(bv, "as_array") else np.asarray(bv, dtype=complex)
    return np.array([-c_m, b_m, -c_p, b_p])


def boundary_values_from_coordinates(v):
    alpha_m, beta_m, alpha_p, beta_p = np.asarray(v, dtype=complex)
    return np.array([beta_m, -alpha_m, beta_p, -alpha_p])


def domain_subspace(u):
    """Null space of ``B(U)`` mapped to cutoff coordinates, as a subspace of C^4.

    This is the J-self-complementary subspace ``S_{U*}``: conjugating the
    coefficients of ``d1, d2`` in the boundary form turns ``U`` into ``U*``.
    """
    ker = null_space(boundary_condition_matrix(u))
    rows = np.array([coordinates_from_boundary_values(col) for col in ker.T])
    return BoundarySubspace(rows)


@dataclass(frozen=True, eq=False)
class ExtensionDescriptor:
    u: Unitary2
    subspace: BoundarySubspace
    bc_matrix: np.ndarray

    def contains(self, bv, tol=1e-8):
        return membership(self.u, bv, tol)


def extension(u):
    """Descriptor of ``L_U``."""
    if not isinstance(u, Unitary2):
        u = Unitary2(u)
    bc = boundary_condition_matrix(u)
    bc.setflags(write=False)
    return ExtensionDescriptor(u, subspace_from_unitary(u), bc)


def row_reduce(m, tol=1e-12):
    """Reduced row echelon form (used to display boundary conditions)."""
    m = np.array(m, dtype=complex)
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = r + int(np.argmax(np.abs(m[r:, c])))
        if abs(m[piv, c]) <= tol:
            continue
        m[[r, piv]] = m[[piv, r]]
        m[r] /= m[r, c]
        for k in range(rows):
            if k != r:
                m[k] -= m[k, c] * m[r]
        r += 1
    m[np.abs(m) < tol] = 0
    return m


def rank(m, tol=1e-10):
    return int(np.linalg.matrix_rank(np.asarray(m), tol=tol))


__all__ = [
    "J",
    "E_PLUS",
    "E_MINUS",
    "Unitary2",
    "BoundarySubspace",
    "ExtensionDescriptor",
    "projectors",
    "j_form",
    "subspace_from_unitary",
    "same_span",
    "j_orthogonal_complement",
    "is_self_complementary",
    "unitary_from_subspace",
    "boundary_condition_matrix",
    "membership",
    "coordinates_from_boundary_values",
    "boundary_values_from_coordinates",
    "domain_subspace",
    "extension",
    "row_reduce",
    "rank",
]
