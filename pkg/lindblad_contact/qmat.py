"""
Exact 2x2 complex/Hermitian algebra for a single qubit.

Everything here is closed form: eigenvalues come from the quadratic formula,
the SU(2) propagator from the half-angle identity and 2x2 exponentials from
Cayley-Hamilton. Functions accept batched inputs (fields or leading array
axes) so that control grids and time grids can be evaluated in one call.
"""

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

# (..., 2, 2) complex array
Mat2 = np.ndarray
# (..., 4) real array, coefficients on {I, sx, sy, sz} / sqrt(2)
PauliVec = np.ndarray
# (4, 4) real array acting on PauliVec coordinates
SuperOp4 = np.ndarray

Real = Union[float, np.ndarray]
Complex = Union[complex, np.ndarray]

SQRT2 = np.sqrt(2.0)
INV_SQRT2 = 1.0 / SQRT2

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# lowering operator |0><1|, sends |1> to |0>
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)

DISCRIMINANT_CLAMP = 1e-14


@dataclass(frozen=True, eq=False)
class Herm2:
    """Hermitian 2x2 matrix stored as two real diagonal entries and one complex
    off-diagonal entry, so Hermiticity holds by construction.

    Fields may be scalars or broadcast-compatible numpy arrays (a batch of
    matrices).
    """

    a00: Real
    a11: Real
    a01: Complex = 0j

    @classmethod
    def from_matrix(cls, m: Mat2) -> 'Herm2':
        """Hermitian part of a (..., 2, 2) matrix."""
        m = np.asarray(m, dtype=complex)
        return cls(
            a00=m[..., 0, 0].real,
            a11=m[..., 1, 1].real,
            a01=0.5 * (m[..., 0, 1] + np.conj(m[..., 1, 0])),
        )

    @classmethod
    def identity(cls) -> 'Herm2':
        return cls(1.0, 1.0, 0j)

    @classmethod
    def zero(cls) -> 'Herm2':
        return cls(0.0, 0.0, 0j)

    @classmethod
    def ground(cls) -> 'Herm2':
        """|0><0|"""
        return cls(1.0, 0.0, 0j)

    @classmethod
    def excited(cls) -> 'Herm2':
        """|1><1|"""
        return cls(0.0, 1.0, 0j)

    @classmethod
    def maximally_mixed(cls) -> 'Herm2':
        return cls(0.5, 0.5, 0j)

    @classmethod
    def diag(cls, a00: Real, a11: Real) -> 'Herm2':
        return cls(a00, a11, 0j)

    @property
    def matrix(self) -> Mat2:
        a00, a11, a01 = np.broadcast_arrays(
            np.asarray(self.a00, dtype=complex),
            np.asarray(self.a11, dtype=complex),
            np.asarray(self.a01, dtype=complex),
        )
        top = np.stack([a00, a01], axis=-1)
        bottom = np.stack([np.conj(a01), a11], axis=-1)
        return np.stack([top, bottom], axis=-2)

    def trace(self) -> Real:
        return self.a00 + self.a11

    def det(self) -> Real:
        return self.a00 * self.a11 - np.abs(self.a01) ** 2

    def frobenius_norm(self) -> Real:
        return np.sqrt(self.a00 * self.a00 + self.a11 * self.a11
                       + 2.0 * np.abs(self.a01) ** 2)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.a00))
                    and np.all(np.isfinite(self.a11))
                    and np.all(np.isfinite(self.a01)))

    def take(self, index) -> 'Herm2':
        """Select entries of a batched matrix."""
        a00, a11, a01 = self._broadcast_fields()
        return Herm2(a00[index], a11[index], a01[index])

    def expand(self, axis: int = -1) -> 'Herm2':
        """Insert a broadcasting axis into every field."""
        a00, a11, a01 = self._broadcast_fields()
        return Herm2(np.expand_dims(a00, axis), np.expand_dims(a11, axis),
                     np.expand_dims(a01, axis))

    def _broadcast_fields(self):
        return np.broadcast_arrays(np.asarray(self.a00, dtype=float),
                                   np.asarray(self.a11, dtype=float),
                                   np.asarray(self.a01, dtype=complex))

    def __add__(self, other: 'Herm2') -> 'Herm2':
        return Herm2(self.a00 + other.a00, self.a11 + other.a11,
                     self.a01 + other.a01)

    def __sub__(self, other: 'Herm2') -> 'Herm2':
        return Herm2(self.a00 - other.a00, self.a11 - other.a11,
                     self.a01 - other.a01)

    def __neg__(self) -> 'Herm2':
        return Herm2(-self.a00, -self.a11, -self.a01)

    def __mul__(self, scale: Real) -> 'Herm2':
        return Herm2(scale * self.a00, scale * self.a11, scale * self.a01)

    __rmul__ = __mul__


def stack_herm(items) -> Herm2:
    """Stack a sequence of scalar Herm2 values into one batched Herm2."""
    items = list(items)
    return Herm2(
        np.array([h.a00 for h in items], dtype=float),
        np.array([h.a11 for h in items], dtype=float),
        np.array([h.a01 for h in items], dtype=complex),
    )


def hs_inner(a: Herm2, b: Herm2) -> Real:
    """Real Hilbert-Schmidt pairing Re tr(A^dagger B)."""
    return (a.a00 * b.a00 + a.a11 * b.a11
            + 2.0 * np.real(np.conj(a.a01) * b.a01))


def hs_inner_mat(p: Herm2, m: Mat2) -> Real:
    """Re tr(P m) for Hermitian P and an arbitrary 2x2 matrix m."""
    m = np.asarray(m)
    return np.real(p.a00 * m[..., 0, 0] + p.a01 * m[..., 1, 0]
                   + np.conj(p.a01) * m[..., 0, 1] + p.a11 * m[..., 1, 1])


def _spectral_half_width(h: Herm2) -> Real:
    diff = h.a00 - h.a11
    disc = diff * diff + 4.0 * np.abs(h.a01) ** 2
    # same quantity as tr^2 - 4 det, written so it cannot go negative
    disc = np.where((disc < 0) & (disc >= -DISCRIMINANT_CLAMP), 0.0, disc)
    return 0.5 * np.sqrt(disc)


def eig_min(h: Herm2) -> Real:
    """Smallest eigenvalue, closed form."""
    return 0.5 * h.trace() - _spectral_half_width(h)


def eig_max(h: Herm2) -> Real:
    """Largest eigenvalue, closed form."""
    return 0.5 * h.trace() + _spectral_half_width(h)


def su2_exp_x(u: Real, dt: Real) -> Mat2:
    """exp(-i (u/2) sx dt) = cos(u dt/2) I - i sin(u dt/2) sx."""
    half_angle = 0.5 * np.asarray(u, dtype=float) * dt
    cs = np.cos(half_angle)
    sn = np.sin(half_angle)
    out = np.empty(np.shape(half_angle) + (2, 2), dtype=complex)
    out[..., 0, 0] = cs
    out[..., 1, 1] = cs
    out[..., 0, 1] = -1j * sn
    out[..., 1, 0] = -1j * sn
    return out


def dagger(m: Mat2) -> Mat2:
    return np.conj(np.swapaxes(m, -1, -2))


def unitarity_defect(m: Mat2) -> float:
    """Largest Frobenius norm of U^dagger U - I over a batch."""
    residual = dagger(m) @ m - IDENTITY
    return float(np.max(np.sqrt(np.sum(np.abs(residual) ** 2, axis=(-2, -1)))))


def mat2_expm(k: Mat2) -> Mat2:
    """Exponential of a 2x2 matrix via Cayley-Hamilton.

    With k = m I + K0 (K0 traceless), K0^2 = s^2 I and
    exp(k) = e^m (cosh(s) I + sinh(s)/s K0). For Hermitian k this is the
    spectral formula with real s.
    """
    k = np.asarray(k, dtype=complex)
    mean = 0.5 * (k[..., 0, 0] + k[..., 1, 1])
    k0 = k - mean[..., None, None] * IDENTITY
    s2 = k0[..., 0, 0] ** 2 + k0[..., 0, 1] * k0[..., 1, 0]
    s = np.sqrt(s2)
    small = np.abs(s2) < 1e-8
    safe_s = np.where(small, 1.0, s)
    sinhc = np.where(small, 1.0 + s2 / 6.0 + s2 * s2 / 120.0, np.sinh(safe_s) / safe_s)
    cosh = np.where(small, 1.0 + s2 / 2.0 + s2 * s2 / 24.0, np.cosh(safe_s))
    out = cosh[..., None, None] * IDENTITY + sinhc[..., None, None] * k0
    return np.exp(mean)[..., None, None] * out


def to_pauli(h: Herm2) -> PauliVec:
    """Coordinates on the orthonormal basis {I, sx, sy, sz} / sqrt(2)."""
    a00, a11, a01 = h._broadcast_fields()
    return np.stack([
        (a00 + a11) * INV_SQRT2,
        SQRT2 * a01.real,
        -SQRT2 * a01.imag,
        (a00 - a11) * INV_SQRT2,
    ], axis=-1)


def from_pauli(v: PauliVec) -> Herm2:
    v = np.asarray(v, dtype=float)
    c0, cx, cy, cz = v[..., 0], v[..., 1], v[..., 2], v[..., 3]
    return Herm2(
        a00=(c0 + cz) * INV_SQRT2,
        a11=(c0 - cz) * INV_SQRT2,
        a01=(cx - 1j * cy) * INV_SQRT2,
    )


def superop_of(linear_map: Callable[[Herm2], Herm2]) -> SuperOp4:
    """Matrix of a linear map Herm2 -> Herm2 in Pauli coordinates.

    Column j is the image of the j-th basis element.
    """
    columns = [to_pauli(linear_map(from_pauli(e))) for e in np.eye(4)]
    return np.stack(columns, axis=-1)


def superop_transpose(s: SuperOp4) -> SuperOp4:
    """Hilbert-Schmidt adjoint; the basis is orthonormal so it is the transpose."""
    return np.swapaxes(s, -1, -2)


def superop_apply(s: SuperOp4, h: Herm2) -> Herm2:
    return from_pauli(np.einsum('...ij,...j->...i', s, to_pauli(h)))
