"""
Discrete contact PMP shooting for the controlled damped qubit.

One shooting iteration propagates the state, accumulates the running cost,
sweeps the costate backward and replaces every control by a relaxed step
towards the pointwise maximizer of the discrete Hamiltonian. Updates that
raise the cost are retried with a smaller relaxation.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .adjoint import CostAccumulator, CostateSeq, accumulate_cost, backward_sweep
from .integrators import (
    ControlSchedule, Scheme, Trajectory, propagate, stepper_for, steps_in_horizon,
)
from .qmat import Herm2, Real, hs_inner, stack_herm

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0
# a refined point must beat the grid winner by more than rounding
REFINE_ACCEPT_TOL = 1e-14
# relaxation halvings tried before an update is given up
MAX_STEP_HALVINGS = 30
TERMINAL_COST_BOUND = 1e6


class OcpConfig:
    """Parameters of the fixed-horizon optimal control problem and its solver."""

    FIELDS = ('T', 'dt', 'gamma', 'alpha', 'u_max', 'beta', 'max_iters',
              'dJ_tol', 'grid_points', 'refine_iters')

    def __init__(self,
                 T: float = 3.0,
                 dt: float = 0.01,
                 gamma: float = 1.0,
                 alpha: float = 0.05,
                 u_max: float = 6.0,
                 beta: float = 0.5,
                 max_iters: int = 50,
                 dJ_tol: float = 1e-8,
                 grid_points: int = 241,
                 refine_iters: int = 40):

        self.N = steps_in_horizon(T, dt)
        if gamma < 0:
            raise ValueError(f"Decay rate gamma must be non-negative, got {gamma}")
        if alpha < 0:
            raise ValueError(f"Control weight alpha must be non-negative, got {alpha}")
        if u_max <= 0:
            raise ValueError(f"Control bound u_max must be positive, got {u_max}")
        if not 0 < beta <= 1:
            raise ValueError(f"Relaxation beta must lie in (0, 1], got {beta}")
        if grid_points < 3 or grid_points % 2 == 0:
            raise ValueError(f"grid_points must be odd and at least 3, got {grid_points}")
        if refine_iters < 0:
            raise ValueError(f"refine_iters must be non-negative, got {refine_iters}")
        if max_iters < 0:
            raise ValueError(f"max_iters must be non-negative, got {max_iters}")
        if dJ_tol < 0:
            raise ValueError(f"dJ_tol must be non-negative, got {dJ_tol}")

        self.T = float(T)
        self.dt = float(dt)
        self.gamma = float(gamma)
        self.alpha = float(alpha)
        self.u_max = float(u_max)
        self.beta = float(beta)
        self.max_iters = int(max_iters)
        self.dJ_tol = float(dJ_tol)
        self.grid_points = int(grid_points)
        self.refine_iters = int(refine_iters)

    @classmethod
    def from_dict(cls, values: Dict) -> 'OcpConfig':
        return cls(**{key: values[key] for key in cls.FIELDS if key in values})

    def to_dict(self) -> Dict:
        return {key: getattr(self, key) for key in self.FIELDS}

    def __repr__(self) -> str:
        items = ', '.join(f"{key}={value!r}" for key, value in self.to_dict().items())
        return f"OcpConfig({items})"


@dataclass
class ShootResult:
    controls: ControlSchedule
    cost_history: List[float]
    trajectory: Trajectory
    costates: CostateSeq
    cost: CostAccumulator
    converged: bool
    reason: str
    iterations: int = 0
    # controls of every accepted iterate, starting with u0
    control_history: List[ControlSchedule] = field(default_factory=list)
    # relaxation used by each accepted update
    relaxations: List[float] = field(default_factory=list)

    @property
    def final_cost(self) -> Optional[float]:
        return self.cost_history[-1] if self.cost_history else None


def terminal_cost(rho: Herm2, rho_target: Herm2) -> Real:
    """Phi(rho) = 1 - tr(rho rho_target)."""
    return 1.0 - hs_inner(rho, rho_target)


def total_cost(u: ControlSchedule, traj: Trajectory, cfg: OcpConfig,
               rho_target: Herm2) -> float:
    """J(u) = sum alpha u_k^2 dt + Phi(rho_N)."""
    running = accumulate_cost(u, cfg.alpha, cfg.dt).total
    return float(running + terminal_cost(traj.final, rho_target))


def discrete_hamiltonian(rho: Herm2, P: Herm2, u: Real, scheme: Scheme,
                         cfg: OcpConfig) -> Real:
    """H~_d = <P, F(rho, u) - rho> - alpha u^2 dt, the quantity maximized over u.

    Arguments broadcast, so a batch of (rho, P) pairs can be evaluated over a
    whole control grid at once.
    """
    step = stepper_for(scheme)
    moved = step(rho, u, cfg.dt, cfg.gamma)
    return hs_inner(P, moved - rho) - cfg.alpha * np.square(u) * cfg.dt


def contact_hamiltonian(rho: Herm2, P: Herm2, u: Real, scheme: Scheme,
                        cfg: OcpConfig) -> Real:
    """H_d = <P, F(rho, u)> + alpha u^2 dt.

    Differs from ``discrete_hamiltonian`` by <P, rho> + 2 alpha u^2 dt.
    """
    step = stepper_for(scheme)
    moved = step(rho, u, cfg.dt, cfg.gamma)
    return hs_inner(P, moved) + cfg.alpha * np.square(u) * cfg.dt


def control_grid(u_max: float, grid_points: int) -> np.ndarray:
    """Equispaced grid on [-u_max, u_max], symmetric and containing an exact 0."""
    half = np.linspace(0.0, u_max, (grid_points + 1) // 2)
    return np.concatenate([-half[:0:-1], half])


def _tie_break_rank(grid: np.ndarray) -> np.ndarray:
    # smaller |u| first, then negative before positive
    order = np.lexsort((grid > 0, np.abs(grid)))
    rank = np.empty(len(grid), dtype=int)
    rank[order] = np.arange(len(grid))
    return rank


def maximize_controls(rhos: Herm2, Ps: Herm2, scheme: Scheme, cfg: OcpConfig) -> np.ndarray:
    """Pointwise maximizers of H~_d for a batch of (rho_k, P_{k+1}) pairs.

    Grid search over ``grid_points`` values, then golden-section refinement
    on the two grid cells around the winner. The refined point replaces the
    grid point only if it is better by more than rounding.
    """
    a00, _, _ = rhos._broadcast_fields()
    if a00.size == 0:
        return np.zeros(0)

    grid = control_grid(cfg.u_max, cfg.grid_points)
    values = discrete_hamiltonian(rhos.expand(-1), Ps.expand(-1), grid[None, :], scheme, cfg)
    values = np.where(np.isfinite(values), values, -np.inf)
    best_value = values.max(axis=-1)
    rank = _tie_break_rank(grid)
    ranked = np.where(values == best_value[:, None], rank[None, :], len(grid))
    best = ranked.argmin(axis=-1)
    u_best = grid[best]

    if cfg.refine_iters == 0:
        return u_best

    def objective(u):
        return discrete_hamiltonian(rhos, Ps, u, scheme, cfg)

    a = grid[np.maximum(best - 1, 0)]
    b = grid[np.minimum(best + 1, len(grid) - 1)]
    for _ in range(cfg.refine_iters):
        c = b - INV_PHI * (b - a)
        d = a + INV_PHI * (b - a)
        left = objective(c) >= objective(d)
        b = np.where(left, d, b)
        a = np.where(left, a, c)

    refined = np.clip(0.5 * (a + b), -cfg.u_max, cfg.u_max)
    accept = objective(refined) > best_value + REFINE_ACCEPT_TOL * (1.0 + np.abs(best_value))
    return np.where(accept, refined, u_best)


def maximize_control(rho: Herm2, P: Herm2, scheme: Scheme, cfg: OcpConfig) -> float:
    """Scalar form of ``maximize_controls``."""
    return float(maximize_controls(stack_herm([rho]), stack_herm([P]), scheme, cfg)[0])


@dataclass
class _Iterate:
    controls: ControlSchedule
    trajectory: Trajectory
    cost: CostAccumulator
    J: float


def _evaluate(cfg: OcpConfig, scheme: Scheme, rho0: Herm2, rho_target: Herm2,
              u: ControlSchedule) -> _Iterate:
    traj = propagate(scheme, rho0, u, cfg.dt, cfg.gamma)
    cost = accumulate_cost(u, cfg.alpha, cfg.dt)
    with np.errstate(over='ignore', invalid='ignore'):
        J = float(cost.total + terminal_cost(traj.final, rho_target))
    return _Iterate(controls=u, trajectory=traj, cost=cost, J=J)


def _diverged_reason(iterate: _Iterate) -> Optional[str]:
    traj = iterate.trajectory
    if traj.diverged:
        return f"forward trajectory diverged at step {traj.diverged_at}"
    if not np.isfinite(iterate.J) or abs(iterate.J - iterate.cost.total) > TERMINAL_COST_BOUND:
        # terminal cost of a density operator lies in [0, 1]
        return f"terminal cost {iterate.J - iterate.cost.total:.3e} of a non-physical state"
    return None


def _pointwise_maximizers(traj: Trajectory, costates: CostateSeq, scheme: Scheme,
                          cfg: OcpConfig) -> np.ndarray:
    return maximize_controls(stack_herm(traj.states[:-1]), stack_herm(costates.values[1:]),
                             scheme, cfg)


def shoot(cfg: OcpConfig, scheme: Scheme, rho0: Herm2, rho_target: Herm2,
          u0: ControlSchedule) -> ShootResult:
    """Relaxed discrete-PMP shooting from the initial guess u0.

    Each update moves every control a fraction beta towards its pointwise
    maximizer. A trial update that raises J is rejected and retried with
    half the relaxation, up to ``MAX_STEP_HALVINGS`` times; after an
    accepted update the relaxation doubles again, capped at ``cfg.beta``.
    The cost history is therefore non-increasing.

    Stops when the cost changes by less than ``dJ_tol``, when the maximizers
    equal the current controls, when no halved step lowers J, after
    ``max_iters`` updates, or when a forward trajectory diverges (the last
    accepted iterate and its history are returned).
    """
    scheme = Scheme.parse(scheme)
    u = np.asarray(u0, dtype=float).copy()
    if len(u) != cfg.N:
        raise ValueError(f"Initial controls must have N = {cfg.N} entries, got {len(u)}")
    if np.any(np.abs(u) > cfg.u_max):
        raise ValueError(f"Initial controls must lie in [-{cfg.u_max}, {cfg.u_max}]")

    current = _evaluate(cfg, scheme, rho0, rho_target, u)
    costates = backward_sweep(current.trajectory, scheme, rho_target, cfg.dt, cfg.gamma)
    history: List[float] = []
    relaxations: List[float] = []
    control_history = [u.copy()]
    converged = False
    reason = _diverged_reason(current)

    if reason is not None:
        print(f"Warning: {scheme.value} shooting aborted at iteration 0: {reason}")
    else:
        history.append(current.J)
        reason = "max_iters reached"
        beta = cfg.beta
        for iteration in range(1, cfg.max_iters + 1):
            u_star = _pointwise_maximizers(current.trajectory, costates, scheme, cfg)
            if np.array_equal(u_star, current.controls):
                converged, reason = True, "stationary control"
                break

            accepted, aborted = None, None
            trial_beta = beta
            for _ in range(MAX_STEP_HALVINGS + 1):
                u_new = np.clip((1.0 - trial_beta) * current.controls + trial_beta * u_star,
                                -cfg.u_max, cfg.u_max)
                trial = _evaluate(cfg, scheme, rho0, rho_target, u_new)
                aborted = _diverged_reason(trial)
                if aborted is not None:
                    break
                if trial.J <= current.J:
                    accepted = trial
                    break
                trial_beta *= 0.5

            if aborted is not None:
                reason = aborted
                print(f"Warning: {scheme.value} shooting aborted at iteration {iteration}: "
                      f"{reason}")
                break
            if accepted is None:
                converged, reason = True, "no cost decrease along the relaxed update"
                break

            J_prev = current.J
            current = accepted
            costates = backward_sweep(current.trajectory, scheme, rho_target, cfg.dt, cfg.gamma)
            history.append(current.J)
            relaxations.append(trial_beta)
            control_history.append(current.controls.copy())
            beta = min(cfg.beta, 2.0 * trial_beta)

            if abs(J_prev - current.J) < cfg.dJ_tol:
                converged, reason = True, "cost change below dJ_tol"
                break

    return ShootResult(
        controls=current.controls,
        cost_history=history,
        trajectory=current.trajectory,
        costates=costates,
        cost=current.cost,
        converged=converged,
        reason=reason,
        iterations=len(control_history) - 1,
        control_history=control_history,
        relaxations=relaxations,
    )


def stationary_fraction(result: ShootResult, scheme: Scheme, cfg: OcpConfig) -> float:
    """Share of steps whose control is within one grid cell of its pointwise maximizer."""
    if result.trajectory.N == 0:
        return 1.0
    if result.trajectory.diverged:
        return 0.0
    u_star = _pointwise_maximizers(result.trajectory, result.costates, Scheme.parse(scheme), cfg)
    resolution = 2.0 * cfg.u_max / (cfg.grid_points - 1)
    return float(np.mean(np.abs(result.controls - u_star) <= resolution))
