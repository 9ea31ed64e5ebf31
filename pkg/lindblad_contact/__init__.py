from .qmat import Herm2, hs_inner, eig_min, eig_max, su2_exp_x
from .channels import AdChannel, ad_apply, ad_dual_apply, kraus_pair, lindblad_rhs, bloch_vector
from .integrators import (
    Scheme, Trajectory, lgvi_step, rk2_step, rkmk2_step, propagate,
    reference_trajectory, bloch_rk4, sine_pulse, zero_controls,
)
from .adjoint import (
    CostateSeq, CostAccumulator, lgvi_adjoint_step, rk2_adjoint_step,
    rkmk2_adjoint_step, backward_sweep, accumulate_cost,
)
from .pmp import (
    OcpConfig, ShootResult, terminal_cost, total_cost, discrete_hamiltonian,
    contact_hamiltonian, maximize_control, shoot, stationary_fraction,
)
from .metrics import (
    StepMetrics, RunSummary, trace_drift, positivity_drift, contact_defect,
    global_error, summarize,
)
from .presets import ExperimentPresets
from .config import ExperimentConfig, parse_config

__all__ = [
    'Herm2',
    'hs_inner',
    'eig_min',
    'eig_max',
    'su2_exp_x',
    'AdChannel',
    'ad_apply',
    'ad_dual_apply',
    'kraus_pair',
    'lindblad_rhs',
    'bloch_vector',
    'Scheme',
    'Trajectory',
    'lgvi_step',
    'rk2_step',
    'rkmk2_step',
    'propagate',
    'reference_trajectory',
    'bloch_rk4',
    'sine_pulse',
    'zero_controls',
    'CostateSeq',
    'CostAccumulator',
    'lgvi_adjoint_step',
    'rk2_adjoint_step',
    'rkmk2_adjoint_step',
    'backward_sweep',
    'accumulate_cost',
    'OcpConfig',
    'ShootResult',
    'terminal_cost',
    'total_cost',
    'discrete_hamiltonian',
    'contact_hamiltonian',
    'maximize_control',
    'shoot',
    'stationary_fraction',
    'StepMetrics',
    'RunSummary',
    'trace_drift',
    'positivity_drift',
    'contact_defect',
    'global_error',
    'summarize',
    'ExperimentPresets',
    'ExperimentConfig',
    'parse_config',
]
