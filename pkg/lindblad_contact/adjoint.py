"""
Backward costate propagation and running-cost accumulation.

The costate P is a Hermitian matrix paired with the state by the real
Hilbert-Schmidt product. Each scheme's adjoint step is the Hilbert-Schmidt
transpose of that scheme's forward map, so the per-step duality
<adjoint(P), rho> = <P, F(rho)> holds exactly for the linear maps.
"""

from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from .channels import ad_dual_apply, lindblad_rhs, unitary_conjugate
from .integrators import ControlSchedule, Scheme, Trajectory, rkmk2_step
from .qmat import (
    Herm2, SuperOp4, dagger, from_pauli, superop_apply, superop_of,
    superop_transpose, su2_exp_x, to_pauli,
)

# central-difference step for linearizing the nonlinear RKMK(2) map
RKMK_FD_STEP = 1e-6


@dataclass
class CostateSeq:
    """Costates P_0..P_N (index k holds P_k).

    After a truncated sweep the entries past ``truncated_at`` are None.
    """

    values: List[Optional[Herm2]]
    truncated_at: Optional[int] = None

    @property
    def N(self) -> int:
        return len(self.values) - 1

    @property
    def terminal(self) -> Herm2:
        index = self.N if self.truncated_at is None else self.truncated_at
        return self.values[index]

    @property
    def truncated(self) -> bool:
        return self.truncated_at is not None

    def __getitem__(self, k: int) -> Optional[Herm2]:
        return self.values[k]


@dataclass
class CostAccumulator:
    """Accumulated running cost z_0..z_N with z_0 = 0."""

    z: np.ndarray
    increments: np.ndarray

    @property
    def total(self) -> float:
        return float(self.z[-1])


def terminal_costate(rho_target: Herm2) -> Herm2:
    """P_N = -grad Phi(rho_N) for Phi(rho) = 1 - tr(rho rho_target)."""
    return Herm2(rho_target.a00, rho_target.a11, rho_target.a01)


def lgvi_adjoint_step(p_next: Herm2, u: float, dt: float, gamma: float) -> Herm2:
    """Phi*_{dt/2}(U^dagger Phi*_{dt/2}(P) U), the transpose of ``lgvi_step``."""
    u_mat = su2_exp_x(u, dt)
    inner = ad_dual_apply(p_next, gamma, 0.5 * dt)
    transported = unitary_conjugate(dagger(u_mat), inner)
    return ad_dual_apply(transported, gamma, 0.5 * dt)


def rk2_step_superop(u: float, dt: float, gamma: float) -> SuperOp4:
    """Heun map Id + dt L + dt^2/2 L^2 as a Pauli-basis superoperator."""
    generator = superop_of(lambda x: lindblad_rhs(x, u, gamma))
    return np.eye(4) + dt * generator + (0.5 * dt * dt) * (generator @ generator)


def rk2_adjoint_step(p_next: Herm2, u: float, dt: float, gamma: float) -> Herm2:
    return superop_apply(superop_transpose(rk2_step_superop(u, dt, gamma)), p_next)


def rkmk2_linearization(rho: Herm2, u: float, dt: float, gamma: float) -> SuperOp4:
    """Jacobian of rho -> Herm(F_RKMK(rho)) at rho, by central differences."""
    base = to_pauli(rho)
    columns = []
    for j in range(4):
        shift = np.zeros(4)
        shift[j] = RKMK_FD_STEP
        plus = Herm2.from_matrix(rkmk2_step(from_pauli(base + shift), u, dt, gamma))
        minus = Herm2.from_matrix(rkmk2_step(from_pauli(base - shift), u, dt, gamma))
        columns.append((to_pauli(plus) - to_pauli(minus)) / (2.0 * RKMK_FD_STEP))
    return np.stack(columns, axis=-1)


def rkmk2_adjoint_step(p_next: Herm2, rho: Herm2, u: float, dt: float,
                       gamma: float) -> Herm2:
    """(d_rho F_RKMK)^* P_next; the RKMK(2) map is nonlinear so it needs rho."""
    return superop_apply(superop_transpose(rkmk2_linearization(rho, u, dt, gamma)), p_next)


def adjoint_step_for(scheme: Scheme) -> Callable[[Herm2, Herm2, float, float, float], Herm2]:
    """Adjoint step with the uniform signature (P_next, rho_k, u_k, dt, gamma)."""
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.CONTACT_LGVI:
        return lambda p, rho, u, dt, gamma: lgvi_adjoint_step(p, u, dt, gamma)
    if scheme is Scheme.RK2_HEUN:
        return lambda p, rho, u, dt, gamma: rk2_adjoint_step(p, u, dt, gamma)
    return rkmk2_adjoint_step


def backward_sweep(traj: Trajectory, scheme: Optional[Scheme], rho_target: Herm2,
                   dt: float, gamma: float) -> CostateSeq:
    """P_N from the terminal rule, then P_k = adjoint(P_{k+1}, u_k) down to P_0.

    A diverged trajectory is swept from its last finite state instead, and
    the result is flagged with that index.
    """
    scheme = traj.scheme if scheme is None else Scheme.parse(scheme)
    adjoint = adjoint_step_for(scheme)
    n = traj.N
    last = n if traj.diverged_at is None else traj.diverged_at - 1

    values: List[Optional[Herm2]] = [None] * (n + 1)
    values[last] = terminal_costate(rho_target)
    # unstable schemes can overflow backward as well
    with np.errstate(over='ignore', invalid='ignore'):
        for k in range(last - 1, -1, -1):
            values[k] = adjoint(values[k + 1], traj.states[k], traj.controls[k], dt, gamma)

    return CostateSeq(values=values, truncated_at=None if traj.diverged_at is None else last)


def accumulate_cost(controls: ControlSchedule, alpha: float, dt: float) -> CostAccumulator:
    """z_{k+1} = z_k + alpha u_k^2 dt, z_0 = 0; independent of the states."""
    if alpha < 0:
        raise ValueError(f"Control weight alpha must be non-negative, got {alpha}")
    controls = np.asarray(controls, dtype=float)
    increments = alpha * controls * controls * dt
    z = np.concatenate([[0.0], np.cumsum(increments)])
    return CostAccumulator(z=z, increments=increments)
