"""
Physical building blocks of the driven amplitude-damping qubit.

Basis ordering is (|0>, |1>) with sz|0> = +|0>, so the ground state |0><0|
has Bloch vector (0, 0, 1). The Hamiltonian is H(u) = (u/2) sx and the
single jump operator is L = sqrt(gamma) |0><1|; no drift Hamiltonian.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .qmat import (
    Herm2, Mat2, Real, SIGMA_MINUS, SIGMA_X, dagger, unitarity_defect,
)

UNITARITY_TOLERANCE = 1e-12


def _check_rates(gamma: Real, tau: Real) -> None:
    if np.any(np.asarray(gamma) < 0):
        raise ValueError(f"Decay rate gamma must be non-negative, got {gamma}")
    if np.any(np.asarray(tau) < 0):
        raise ValueError(f"Channel duration tau must be non-negative, got {tau}")


def jump_probability(gamma: Real, tau: Real) -> Real:
    """p(tau) = 1 - exp(-gamma tau), evaluated without cancellation."""
    return -np.expm1(-gamma * tau)


@dataclass(frozen=True)
class AdChannel:
    """Amplitude-damping channel of rate gamma applied for a duration tau."""

    gamma: float
    tau: float

    def __post_init__(self):
        _check_rates(self.gamma, self.tau)

    @property
    def p(self) -> float:
        return float(jump_probability(self.gamma, self.tau))

    @property
    def kraus(self) -> Tuple[Mat2, Mat2]:
        return kraus_pair(self.gamma, self.tau)

    def apply(self, rho: Herm2) -> Herm2:
        return ad_apply(rho, self.gamma, self.tau)

    def dual(self, x: Herm2) -> Herm2:
        return ad_dual_apply(x, self.gamma, self.tau)


def kraus_pair(gamma: float, tau: float) -> Tuple[Mat2, Mat2]:
    """Kraus operators E0 = diag(1, sqrt(1-p)) and E1 = sqrt(p) |0><1|."""
    _check_rates(gamma, tau)
    p = jump_probability(gamma, tau)
    e0 = np.array([[1.0, 0.0], [0.0, np.exp(-0.5 * gamma * tau)]], dtype=complex)
    e1 = np.array([[0.0, np.sqrt(p)], [0.0, 0.0]], dtype=complex)
    return e0, e1


def ad_apply(rho: Herm2, gamma: Real, tau: Real) -> Herm2:
    """E0 rho E0^dagger + E1 rho E1^dagger in closed form.

    The excited population moves to the ground state with probability p and
    coherences shrink by sqrt(1-p). Trace is preserved to one rounding.
    """
    _check_rates(gamma, tau)
    p = jump_probability(gamma, tau)
    survival = np.exp(-gamma * tau)
    return Herm2(
        a00=rho.a00 + p * rho.a11,
        a11=survival * rho.a11,
        a01=np.exp(-0.5 * gamma * tau) * rho.a01,
    )


def ad_dual_apply(x: Herm2, gamma: Real, tau: Real) -> Herm2:
    """Dual channel E0^dagger X E0 + E1^dagger X E1 (unital)."""
    _check_rates(gamma, tau)
    p = jump_probability(gamma, tau)
    survival = np.exp(-gamma * tau)
    return Herm2(
        a00=x.a00,
        a11=survival * x.a11 + p * x.a00,
        a01=np.exp(-0.5 * gamma * tau) * x.a01,
    )


def unitary_conjugate(u_mat: Mat2, rho: Herm2) -> Herm2:
    """U rho U^dagger; U may carry leading batch axes."""
    if unitarity_defect(u_mat) > UNITARITY_TOLERANCE:
        raise ValueError("unitary_conjugate requires a unitary matrix "
                         f"(||U^dagger U - I|| = {unitarity_defect(u_mat):.3e})")
    return Herm2.from_matrix(u_mat @ rho.matrix @ dagger(u_mat))


def lindblad_rhs(rho: Herm2, u: Real, gamma: Real) -> Herm2:
    """-i[H(u), rho] + L rho L^dagger - 1/2 {L^dagger L, rho}, closed form."""
    pump = u * np.imag(rho.a01)
    return Herm2(
        a00=gamma * rho.a11 - pump,
        a11=-gamma * rho.a11 + pump,
        a01=-0.5 * gamma * rho.a01 + 0.5j * u * (rho.a00 - rho.a11),
    )


def lindblad_generator(m: Mat2, u: Real, gamma: Real) -> Mat2:
    """The same generator extended linearly to arbitrary 2x2 matrices."""
    m = np.asarray(m, dtype=complex)
    u = np.asarray(u, dtype=float)[..., None, None]
    h = 0.5 * u * SIGMA_X
    jump = np.sqrt(gamma) * SIGMA_MINUS
    jump_dag = dagger(jump)
    decay = jump_dag @ jump
    return (-1j * (h @ m - m @ h)
            + jump @ m @ jump_dag
            - 0.5 * (decay @ m + m @ decay))


def bloch_vector(rho: Herm2) -> np.ndarray:
    """r with rho = (I + r.sigma)/2, for unit-trace rho."""
    a00, a11, a01 = rho._broadcast_fields()
    return np.stack([2.0 * a01.real, -2.0 * a01.imag, a00 - a11], axis=-1)


def density_from_bloch(r) -> Herm2:
    r = np.asarray(r, dtype=float)
    rx, ry, rz = r[..., 0], r[..., 1], r[..., 2]
    return Herm2(0.5 * (1.0 + rz), 0.5 * (1.0 - rz), 0.5 * (rx - 1j * ry))


@dataclass(frozen=True)
class BlochField:
    """Affine control system r' = A r + b + u B r for the damped qubit."""

    gamma: float

    @property
    def A(self) -> np.ndarray:
        return np.diag([-0.5 * self.gamma, -0.5 * self.gamma, -self.gamma])

    @property
    def b(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.gamma])

    @property
    def B(self) -> np.ndarray:
        return np.array([[0.0, 0.0, 0.0],
                         [0.0, 0.0, -1.0],
                         [0.0, 1.0, 0.0]])

    def rhs(self, r, u: Real) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        u = np.asarray(u, dtype=float)[..., None]
        return (r @ self.A.T + self.b + u * (r @ self.B.T))


def bloch_rhs(r, u: Real, gamma: Real) -> np.ndarray:
    """(-g rx/2, -g ry/2 - u rz, -g (rz - 1) + u ry)"""
    r = np.asarray(r, dtype=float)
    rx, ry, rz = r[..., 0], r[..., 1], r[..., 2]
    return np.stack([
        -0.5 * gamma * rx,
        -0.5 * gamma * ry - u * rz,
        -gamma * (rz - 1.0) + u * ry,
    ], axis=-1)
