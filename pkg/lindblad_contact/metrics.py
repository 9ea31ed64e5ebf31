"""
Structure-preservation diagnostics: trace drift, positivity drift, contact
form defect and global error against a reference solution.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Union

import numpy as np

from .adjoint import CostAccumulator, CostateSeq
from .integrators import Scheme, Trajectory
from .qmat import Herm2, Real, eig_min, hs_inner, stack_herm

# positivity drift below this is reported as exactly zero in summaries
POSITIVITY_CLAMP = 1e-14


def _nonfinite_to_inf(values) -> Real:
    values = np.where(np.isfinite(values), values, np.inf)
    return float(values) if np.ndim(values) == 0 else values


@dataclass
class StepMetrics:
    k: int
    trace_drift: float
    pos_drift: float
    # signed defect of the step that produced rho_k
    theta: float
    glob_err: Optional[float] = None


@dataclass
class RunSummary:
    scheme: Scheme
    max_trace_drift: float
    max_pos_drift: float
    max_abs_theta: float
    max_glob_err: Optional[float] = None
    diverged_at: Optional[int] = None

    def as_row(self) -> Dict:
        return {
            'scheme': self.scheme.value,
            'max_trace_drift': self.max_trace_drift,
            'max_pos_drift': self.max_pos_drift,
            'max_abs_theta': self.max_abs_theta,
            'max_glob_err': self.max_glob_err,
            'diverged_at': self.diverged_at,
        }


def trace_drift(rho: Herm2) -> Real:
    """|tr(rho) - 1|"""
    with np.errstate(invalid='ignore', over='ignore'):
        return _nonfinite_to_inf(np.abs(rho.trace() - 1.0))


def positivity_drift(rho: Herm2) -> Real:
    """-min(0, lambda_min(rho))"""
    with np.errstate(invalid='ignore', over='ignore'):
        return _nonfinite_to_inf(-np.minimum(0.0, eig_min(rho)))


def contact_defect(rho_k: Herm2, rho_next: Herm2, P_next: Herm2,
                   z_k: Real, z_next: Real) -> Real:
    """theta_k = (z_{k+1} - z_k) - <P_{k+1}, rho_{k+1} - rho_k>"""
    with np.errstate(invalid='ignore', over='ignore'):
        return _nonfinite_to_inf((z_next - z_k) - hs_inner(P_next, rho_next - rho_k))


def global_error(traj: Trajectory, reference: Trajectory) -> np.ndarray:
    """||rho_k - rho_ref(t_k)||_F on every node k = 0..N."""
    if traj.N != reference.N or not np.isclose(traj.dt, reference.dt, rtol=1e-12, atol=0.0):
        raise ValueError(f"Reference grid mismatch: N={traj.N}, dt={traj.dt} vs "
                         f"N={reference.N}, dt={reference.dt}")
    with np.errstate(invalid='ignore', over='ignore'):
        diff = traj.stacked() - reference.stacked()
        return _nonfinite_to_inf(np.atleast_1d(diff.frobenius_norm()))


def _z_values(z: Union[CostAccumulator, np.ndarray]) -> np.ndarray:
    return np.asarray(z.z if isinstance(z, CostAccumulator) else z, dtype=float)


def defect_series(traj: Trajectory, costates: CostateSeq,
                  z: Union[CostAccumulator, np.ndarray]) -> np.ndarray:
    """theta_0..theta_{N-1}; +inf where the costate is unavailable."""
    n = traj.N
    if n == 0:
        return np.zeros(0)
    z = _z_values(z)
    missing = Herm2(np.nan, np.nan, np.nan)
    Ps = stack_herm([p if p is not None else missing for p in costates.values[1:]])
    states = traj.stacked()
    return np.atleast_1d(contact_defect(states.take(slice(0, -1)), states.take(slice(1, None)),
                                        Ps, z[:-1], z[1:]))


def step_metrics(traj: Trajectory, costates: CostateSeq,
                 z: Union[CostAccumulator, np.ndarray],
                 reference: Optional[Trajectory] = None) -> List[StepMetrics]:
    """Per-step rows k = 1..N; row k carries the defect theta_{k-1}."""
    n = traj.N
    if n == 0:
        return []
    states = traj.stacked().take(slice(1, None))
    traces = np.atleast_1d(trace_drift(states))
    positivity = np.atleast_1d(positivity_drift(states))
    theta = defect_series(traj, costates, z)
    errors = global_error(traj, reference) if reference is not None else None

    return [
        StepMetrics(
            k=k,
            trace_drift=float(traces[k - 1]),
            pos_drift=float(positivity[k - 1]),
            theta=float(theta[k - 1]),
            glob_err=float(errors[k]) if errors is not None else None,
        )
        for k in range(1, n + 1)
    ]


def summarize_steps(scheme: Scheme, rows: List[StepMetrics],
                    diverged_at: Optional[int] = None,
                    with_reference: bool = False) -> RunSummary:
    """Maxima over per-step rows; +inf entries are kept."""
    def column_max(values) -> float:
        return float(np.max(values)) if len(values) else 0.0

    max_pos = column_max([row.pos_drift for row in rows])
    glob = None
    if with_reference:
        glob = column_max([row.glob_err for row in rows])
    return RunSummary(
        scheme=scheme,
        max_trace_drift=column_max([row.trace_drift for row in rows]),
        max_pos_drift=0.0 if max_pos < POSITIVITY_CLAMP else max_pos,
        max_abs_theta=column_max([abs(row.theta) for row in rows]),
        max_glob_err=glob,
        diverged_at=diverged_at,
    )


def summarize(traj: Trajectory, costates: CostateSeq,
              z: Union[CostAccumulator, np.ndarray],
              reference: Optional[Trajectory] = None) -> RunSummary:
    rows = step_metrics(traj, costates, z, reference)
    return summarize_steps(traj.scheme, rows, traj.diverged_at, reference is not None)
