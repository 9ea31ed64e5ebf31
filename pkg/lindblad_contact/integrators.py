"""
Forward time-steppers for the controlled Lindblad qubit.

- ``lgvi_step``: Strang-split CPTP map, half damping / exact unitary / half damping.
- ``rk2_step``: Heun's method on the Lindblad generator (non-geometric baseline).
- ``rkmk2_step``: two-stage Runge-Kutta-Munthe-Kaas similarity update with Hermitian generators.

Controls are held constant over each step (zero-order hold).
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Union

import numpy as np

from .channels import ad_apply, lindblad_rhs, unitary_conjugate, bloch_rhs
from .qmat import Herm2, Mat2, Real, dagger, mat2_expm, stack_herm, su2_exp_x

# control values u_k, one per step
ControlSchedule = np.ndarray


class Scheme(Enum):
    CONTACT_LGVI = 'contact_lgvi'
    RK2_HEUN = 'rk2_heun'
    RKMK2 = 'rkmk2'

    @classmethod
    def parse(cls, value: Union[str, 'Scheme']) -> 'Scheme':
        if isinstance(value, Scheme):
            return value
        try:
            return cls(value)
        except ValueError:
            raise ValueError(f"Unknown scheme: {value}. "
                             f"Available options: {', '.join(s.value for s in cls)}") from None


def steps_in_horizon(T: float, dt: float) -> int:
    """N = T/dt, which must be a non-negative integer."""
    if dt <= 0:
        raise ValueError(f"Time step dt must be positive, got {dt}")
    if T < 0:
        raise ValueError(f"Horizon T must be non-negative, got {T}")
    n = int(round(T / dt))
    if abs(n * dt - T) > 1e-9 * max(T, dt):
        raise ValueError(f"T/dt must be an integer (T={T}, dt={dt}, T/dt={T / dt})")
    return n


def sine_pulse(T: float, dt: float, amplitude: float = 4.0) -> ControlSchedule:
    """u_k = A sin(pi t_k / T) sampled at the left node of each step."""
    n = steps_in_horizon(T, dt)
    t = np.arange(n) * dt
    return amplitude * np.sin(np.pi * t / T) if n else np.zeros(0)


def zero_controls(n: int) -> ControlSchedule:
    return np.zeros(n)


@dataclass
class Trajectory:
    """States rho_0..rho_N on t_k = k dt produced by one scheme."""

    scheme: Scheme
    dt: float
    states: List[Herm2]
    controls: ControlSchedule
    diverged_at: Optional[int] = None
    # RKMK(2) only: Frobenius norm of the anti-Hermitian part of each raw state
    hermiticity_defect: Optional[np.ndarray] = None

    @property
    def N(self) -> int:
        return len(self.controls)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.dt

    @property
    def final(self) -> Herm2:
        return self.states[-1]

    @property
    def diverged(self) -> bool:
        return self.diverged_at is not None

    def stacked(self) -> Herm2:
        return stack_herm(self.states)


def lgvi_step(rho: Herm2, u: float, dt: float, gamma: float) -> Herm2:
    """Phi_AD^{dt/2} o (U . U^dagger) o Phi_AD^{dt/2} with U = exp(-i H(u) dt)."""
    half = ad_apply(rho, gamma, 0.5 * dt)
    rotated = unitary_conjugate(su2_exp_x(u, dt), half)
    return ad_apply(rotated, gamma, 0.5 * dt)


def rk2_step(rho: Herm2, u: float, dt: float, gamma: float) -> Herm2:
    """Heun update with the midpoint control frozen to u_k."""
    k1 = lindblad_rhs(rho, u, gamma)
    k2 = lindblad_rhs(rho + dt * k1, u, gamma)
    return rho + (0.5 * dt) * (k1 + k2)


def rkmk2_step(rho: Herm2, u: float, dt: float, gamma: float) -> Mat2:
    """exp(dt K2) rho exp(-dt K2) with the Hermitian generators K1 = L_u(rho)
    and K2 = L_u(Herm(exp(dt K1/2) rho exp(-dt K1/2))).

    The similarity keeps the trace and spectrum of rho but the result is in
    general not Hermitian; it is returned raw.
    """
    m = rho.matrix
    k1 = lindblad_rhs(rho, u, gamma).matrix
    stage = Herm2.from_matrix(mat2_expm(0.5 * dt * k1) @ m @ mat2_expm(-0.5 * dt * k1))
    k2 = lindblad_rhs(stage, u, gamma).matrix
    return mat2_expm(dt * k2) @ m @ mat2_expm(-dt * k2)


def anti_hermitian_norm(m: Mat2) -> Real:
    """Frobenius norm of (m - m^dagger)/2."""
    anti = 0.5 * (m - dagger(m))
    return np.sqrt(np.sum(np.abs(anti) ** 2, axis=(-2, -1)))


STEPPERS = {
    Scheme.CONTACT_LGVI: lgvi_step,
    Scheme.RK2_HEUN: rk2_step,
}


def stepper_for(scheme: Scheme) -> Callable[[Herm2, float, float, float], Herm2]:
    """Hermitian-valued forward map F(rho, u) of a scheme."""
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.RKMK2:
        return lambda rho, u, dt, gamma: Herm2.from_matrix(rkmk2_step(rho, u, dt, gamma))
    return STEPPERS[scheme]


def propagate(scheme: Scheme, rho0: Herm2, controls: ControlSchedule,
              dt: float, gamma: float) -> Trajectory:
    """Apply the scheme's step once per control value; never repairs states.

    On the first non-finite state propagation stops, ``diverged_at`` records
    its index and that state fills the rest of the record.
    """
    scheme = Scheme.parse(scheme)
    controls = np.asarray(controls, dtype=float)
    n = len(controls)
    states = [rho0]
    defects = [0.0] if scheme is Scheme.RKMK2 else None
    diverged_at = None

    with np.errstate(over='ignore', invalid='ignore'):
        rho = rho0
        for k in range(n):
            if scheme is Scheme.RKMK2:
                # next step starts from the Hermitian part; the rest is recorded
                raw = rkmk2_step(rho, controls[k], dt, gamma)
                rho = Herm2.from_matrix(raw)
                defects.append(float(anti_hermitian_norm(raw)))
            else:
                rho = STEPPERS[scheme](rho, controls[k], dt, gamma)
            states.append(rho)
            if not rho.is_finite():
                diverged_at = k + 1
                break

    if diverged_at is not None:
        print(f"Warning: {scheme.value} trajectory diverged at step {diverged_at} of {n}")
        states.extend([states[-1]] * (n + 1 - len(states)))
        if defects is not None:
            defects.extend([np.inf] * (n + 1 - len(defects)))

    return Trajectory(
        scheme=scheme,
        dt=dt,
        states=states,
        controls=controls,
        diverged_at=diverged_at,
        hermiticity_defect=np.array(defects) if defects is not None else None,
    )


def reference_trajectory(rho0: Herm2, controls: ControlSchedule, dt: float,
                         gamma: float, refine: int) -> Trajectory:
    """Contact LGVI with step dt/refine, each u_k held over its whole coarse
    interval, sampled back on the coarse nodes."""
    if refine < 1:
        raise ValueError(f"Reference refine factor must be at least 1, got {refine}")
    controls = np.asarray(controls, dtype=float)
    fine_dt = dt / refine
    rho = rho0
    states = [rho0]
    for u in controls:
        for _ in range(refine):
            rho = lgvi_step(rho, u, fine_dt, gamma)
        states.append(rho)
    return Trajectory(scheme=Scheme.CONTACT_LGVI, dt=dt, states=states, controls=controls)


def bloch_rk4(r0, controls: ControlSchedule, dt: float, dt_fine: float,
              gamma: float) -> np.ndarray:
    """Classical RK4 on the Bloch equations, returned on the coarse nodes.

    Serves as an independent check of the density-operator integrators.
    """
    if dt_fine > dt / 10 * (1 + 1e-12):
        raise ValueError(f"dt_fine must be at most dt/10 (dt={dt}, dt_fine={dt_fine})")
    substeps = int(round(dt / dt_fine))
    if abs(substeps * dt_fine - dt) > 1e-9 * dt:
        raise ValueError(f"dt_fine must divide dt (dt={dt}, dt_fine={dt_fine})")
    h = dt / substeps

    r = np.asarray(r0, dtype=float)
    out = [r.copy()]
    for u in np.asarray(controls, dtype=float):
        for _ in range(substeps):
            k1 = bloch_rhs(r, u, gamma)
            k2 = bloch_rhs(r + 0.5 * h * k1, u, gamma)
            k3 = bloch_rhs(r + 0.5 * h * k2, u, gamma)
            k4 = bloch_rhs(r + h * k3, u, gamma)
            r = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out.append(r.copy())
    return np.array(out)
