#!/usr/bin/env python3
"""
Qubit Experiment Builder - contact integrator vs Runge-Kutta on a driven,
amplitude-damped qubit. Every experiment writes CSV series for offline
plotting; --pdf adds a one-page summary report.
"""

import argparse
import math
import os
import sys
import traceback
from typing import Dict, List, Optional

import numpy as np

from lindblad_contact.adjoint import accumulate_cost, backward_sweep
from lindblad_contact.channels import bloch_vector
from lindblad_contact.config import ExperimentConfig, parse_config
from lindblad_contact.csv_output import write_csv
from lindblad_contact.integrators import (
    Scheme, Trajectory, propagate, reference_trajectory, sine_pulse,
)
from lindblad_contact.metrics import RunSummary, StepMetrics, step_metrics, summarize_steps
from lindblad_contact.pmp import ShootResult, shoot, stationary_fraction
from lindblad_contact.presets import ExperimentPresets
from lindblad_contact.qmat import Herm2

RHO0 = Herm2.excited()
RHO_TARGET = Herm2.ground()

STEP_HEADER = ['k', 't', 'scheme', 'bloch_x', 'bloch_y', 'bloch_z',
               'trace_drift', 'pos_drift', 'theta', 'glob_err']
SUMMARY_HEADER = ['scheme', 'max_trace_drift', 'max_pos_drift', 'max_abs_theta',
                  'max_glob_err', 'diverged_at']
COMPARED_SCHEMES = (Scheme.CONTACT_LGVI, Scheme.RK2_HEUN)


def ensure_directories_exist(out: str):
    """Create the output directory tree if it doesn't exist."""
    if not os.path.exists(out):
        os.makedirs(out)
        print(f"Created directory: {out}")


def evaluate_run(traj: Trajectory, cfg: ExperimentConfig,
                 reference: Optional[Trajectory] = None):
    """Costates along the scheme's own trajectory, then per-step metrics."""
    costates = backward_sweep(traj, traj.scheme, RHO_TARGET, cfg.dt, cfg.gamma)
    cost = accumulate_cost(traj.controls, cfg.alpha, cfg.dt)
    rows = step_metrics(traj, costates, cost, reference)
    summary = summarize_steps(traj.scheme, rows, traj.diverged_at, reference is not None)
    return rows, summary


def step_rows(traj: Trajectory, rows: List[StepMetrics]) -> List[List]:
    with np.errstate(invalid='ignore', over='ignore'):
        bloch = np.atleast_2d(bloch_vector(traj.stacked()))
    return [
        [row.k, float(traj.times[row.k]), traj.scheme.value,
         float(bloch[row.k, 0]), float(bloch[row.k, 1]), float(bloch[row.k, 2]),
         row.trace_drift, row.pos_drift, row.theta, row.glob_err]
        for row in rows
    ]


def summary_rows(summaries: List[RunSummary]) -> List[List]:
    return [[summary.as_row()[key] for key in SUMMARY_HEADER] for summary in summaries]


def display_summary(summaries: List[RunSummary]):
    print("=" * 60)
    print("📊 RUN SUMMARY")
    print("=" * 60)
    for summary in summaries:
        print(f"  • {summary.scheme.value}: "
              f"trace drift {summary.max_trace_drift:.3e}, "
              f"pos drift {summary.max_pos_drift:.3e}, "
              f"|theta| {summary.max_abs_theta:.3e}")
        if summary.diverged_at is not None:
            print(f"    diverged at step {summary.diverged_at}")
    print()


def maybe_write_report(cfg: ExperimentConfig, pdf: bool, summaries: List[RunSummary],
                       notes: Optional[List[str]] = None) -> List[str]:
    if not pdf:
        return []
    # fpdf is only needed with --pdf
    from lindblad_contact.report import write_summary_report

    path = os.path.join(cfg.out, f"{cfg.experiment}_report.pdf")
    write_summary_report(path, f"Experiment summary: {cfg.experiment}", cfg.to_dict(),
                         summaries, notes)
    return [path]


def run_simulate(cfg: ExperimentConfig, pdf: bool = False) -> List[str]:
    """Single scheme driven by the sine pulse, checked against a fine reference."""
    controls = sine_pulse(cfg.T, cfg.dt, cfg.amplitude)
    traj = propagate(cfg.scheme, RHO0, controls, cfg.dt, cfg.gamma)
    reference = reference_trajectory(RHO0, controls, cfg.dt, cfg.gamma, cfg.refine)
    rows, summary = evaluate_run(traj, cfg, reference)

    metadata = cfg.to_dict()
    prefix = os.path.join(cfg.out, f"simulate_{cfg.scheme.value}")
    header, steps = STEP_HEADER, step_rows(traj, rows)
    if traj.hermiticity_defect is not None:
        header = STEP_HEADER + ['herm_defect']
        steps = [step + [float(traj.hermiticity_defect[step[0]])] for step in steps]
    files = [
        write_csv(f"{prefix}_steps.csv", header, steps, metadata),
        write_csv(f"{prefix}_summary.csv", SUMMARY_HEADER, summary_rows([summary]), metadata),
    ]
    display_summary([summary])
    return files + maybe_write_report(cfg, pdf, [summary])


def _run_schemes(cfg: ExperimentConfig, with_reference: bool):
    controls = sine_pulse(cfg.T, cfg.dt, cfg.amplitude)
    reference = None
    if with_reference:
        reference = reference_trajectory(RHO0, controls, cfg.dt, cfg.gamma, cfg.refine)
    steps, summaries = [], []
    for scheme in COMPARED_SCHEMES:
        traj = propagate(scheme, RHO0, controls, cfg.dt, cfg.gamma)
        rows, summary = evaluate_run(traj, cfg, reference)
        steps.extend(step_rows(traj, rows))
        summaries.append(summary)
    return steps, summaries


def run_compare(cfg: ExperimentConfig, pdf: bool = False) -> List[str]:
    """Short-horizon accuracy: both schemes against the refined contact solution."""
    steps, summaries = _run_schemes(cfg, with_reference=True)
    metadata = cfg.to_dict()
    files = [
        write_csv(os.path.join(cfg.out, 'compare_steps.csv'), STEP_HEADER, steps, metadata),
        write_csv(os.path.join(cfg.out, 'compare_summary.csv'), SUMMARY_HEADER,
                  summary_rows(summaries), metadata),
    ]
    display_summary(summaries)
    return files + maybe_write_report(cfg, pdf, summaries)


def run_longhorizon(cfg: ExperimentConfig, pdf: bool = False) -> List[str]:
    """Long-horizon stability table; no reference solution, glob_err stays empty."""
    steps, summaries = _run_schemes(cfg, with_reference=False)
    metadata = cfg.to_dict()
    files = [
        write_csv(os.path.join(cfg.out, 'longhorizon_steps.csv'), STEP_HEADER, steps, metadata),
        write_csv(os.path.join(cfg.out, 'longhorizon_summary.csv'), SUMMARY_HEADER,
                  summary_rows(summaries), metadata),
    ]
    display_summary(summaries)
    return files + maybe_write_report(cfg, pdf, summaries)


def run_optimize(cfg: ExperimentConfig, pdf: bool = False) -> List[str]:
    """Shooting with both schemes from the identical sine-pulse initial guess."""
    u0 = sine_pulse(cfg.T, cfg.dt, cfg.amplitude)
    results: Dict[Scheme, ShootResult] = {}
    for scheme in COMPARED_SCHEMES:
        print(f"Shooting with {scheme.value}...")
        results[scheme] = shoot(cfg.ocp, scheme, RHO0, RHO_TARGET, u0)
        result = results[scheme]
        print(f"  {result.reason} after {result.iterations} updates, J = {result.final_cost}")

    history = []
    for scheme, result in results.items():
        betas = [None] + result.relaxations
        history.extend([i, scheme.value, J, betas[i]] for i, J in enumerate(result.cost_history))

    lgvi, rk2 = results[Scheme.CONTACT_LGVI], results[Scheme.RK2_HEUN]
    times = np.arange(cfg.N) * cfg.dt
    pulses = [[k, float(times[k]), float(lgvi.controls[k]), float(rk2.controls[k])]
              for k in range(cfg.N)]

    drift, summaries, outcome = [], [], []
    for scheme, result in results.items():
        rows = step_metrics(result.trajectory, result.costates, result.cost)
        summary = summarize_steps(scheme, rows, result.trajectory.diverged_at)
        summaries.append(summary)
        drift.extend([row.k, float(result.trajectory.times[row.k]), scheme.value,
                      row.trace_drift, row.pos_drift, row.theta] for row in rows)
        outcome.append(summary_rows([summary])[0]
                       + [result.final_cost, result.iterations, result.converged, result.reason,
                          stationary_fraction(result, scheme, cfg.ocp)])

    metadata = cfg.to_dict()
    files = [
        write_csv(os.path.join(cfg.out, 'optimize_cost_history.csv'),
                  ['iteration', 'scheme', 'J', 'beta'], history, metadata),
        write_csv(os.path.join(cfg.out, 'optimize_pulses.csv'),
                  ['k', 't', 'u_lgvi', 'u_rk2'], pulses, metadata),
        write_csv(os.path.join(cfg.out, 'optimize_drift.csv'),
                  ['k', 't', 'scheme', 'trace_drift', 'pos_drift', 'theta'], drift, metadata),
        write_csv(os.path.join(cfg.out, 'optimize_summary.csv'),
                  SUMMARY_HEADER + ['final_J', 'iterations', 'converged', 'reason',
                                    'stationary_fraction'],
                  outcome, metadata),
    ]
    display_summary(summaries)
    notes = [f"{scheme.value}: final J = {result.final_cost} ({result.reason})"
             for scheme, result in results.items()]
    return files + maybe_write_report(cfg, pdf, summaries, notes)


def observed_order(err_prev: float, err: float, dt_prev: float, dt: float) -> Optional[float]:
    """log(err ratio) / log(dt ratio); undefined for zero or non-finite errors."""
    if not (err_prev > 0 and err > 0 and math.isfinite(err_prev) and math.isfinite(err)):
        return None
    return math.log(err_prev / err) / math.log(dt_prev / dt)


def run_convergence(cfg: ExperimentConfig, pdf: bool = False) -> List[str]:
    """Final-state error per dt against a refined solve with the same held controls."""
    errors: Dict[Scheme, List[float]] = {scheme: [] for scheme in COMPARED_SCHEMES}
    for dt in cfg.dts:
        controls = sine_pulse(cfg.T, dt, cfg.amplitude)
        reference = reference_trajectory(RHO0, controls, dt, cfg.gamma, cfg.refine)
        for scheme in COMPARED_SCHEMES:
            traj = propagate(scheme, RHO0, controls, dt, cfg.gamma)
            with np.errstate(invalid='ignore', over='ignore'):
                err = float((traj.final - reference.final).frobenius_norm())
            errors[scheme].append(err if math.isfinite(err) else math.inf)

    rows, notes = [], []
    for scheme in COMPARED_SCHEMES:
        for i, dt in enumerate(cfg.dts):
            order = None
            if i > 0:
                order = observed_order(errors[scheme][i - 1], errors[scheme][i], cfg.dts[i - 1], dt)
            rows.append([dt, scheme.value, errors[scheme][i], order])
            notes.append(f"{scheme.value}: dt = {dt}, err = {errors[scheme][i]:.3e}"
                         + (f", order = {order:.3f}" if order is not None else ''))

    files = [write_csv(os.path.join(cfg.out, 'convergence.csv'),
                       ['dt', 'scheme', 'err', 'observed_order'], rows, cfg.to_dict())]
    for note in notes:
        print(f"  • {note}")
    return files + maybe_write_report(cfg, pdf, [], notes)


RUNNERS = {
    'simulate': run_simulate,
    'compare': run_compare,
    'longhorizon': run_longhorizon,
    'optimize': run_optimize,
    'convergence': run_convergence,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, help='TOML config file, or a CSV written by this tool')
    common.add_argument('--T', dest='T', type=float, help='Time horizon')
    common.add_argument('--dt', type=float, help='Time step (T/dt must be an integer)')
    common.add_argument('--dts', type=float, nargs='+', help='Time steps of the convergence study')
    common.add_argument('--gamma', type=float, help='Amplitude-damping rate')
    common.add_argument('--alpha', type=float, help='Control cost weight')
    common.add_argument('--umax', dest='u_max', type=float, help='Control bound')
    common.add_argument('--beta', type=float, help='Relaxation of the control update, in (0, 1]')
    common.add_argument('--max-iters', dest='max_iters', type=int, help='Shooting iteration limit')
    common.add_argument('--scheme', type=str, choices=[s.value for s in Scheme],
                        help='Integrator for the simulate experiment')
    common.add_argument('--amplitude', type=float, help='Amplitude of the sine pulse (default: 4)')
    common.add_argument('--refine', type=int, help='Reference refinement factor')
    common.add_argument('--out', type=str, help='Output directory (default: Generated_Results/<experiment>)')
    common.add_argument('--pdf', action='store_true', help='Also write a PDF summary report')

    parser = argparse.ArgumentParser(
        description='Qubit Experiment Builder - contact LGVI vs RK2 on a damped, driven qubit',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python qubit_experiment_builder.py compare
  python qubit_experiment_builder.py longhorizon --pdf
  python qubit_experiment_builder.py optimize --max-iters 20 --out results/opt
  python qubit_experiment_builder.py convergence --dts 0.02 0.01 0.005
  python qubit_experiment_builder.py simulate --scheme rkmk2 --gamma 2
  python qubit_experiment_builder.py compare --config Generated_Results/compare/compare_summary.csv
        """
    )
    subparsers = parser.add_subparsers(dest='experiment', required=True)
    for kind in ExperimentPresets.kinds():
        subparsers.add_parser(kind, parents=[common], help=f'Run the {kind} experiment')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main function with command line interface; returns the exit status."""
    args = build_parser().parse_args(argv)
    overrides = {key: getattr(args, key) for key in
                 ('T', 'dt', 'dts', 'gamma', 'alpha', 'u_max', 'beta', 'max_iters',
                  'scheme', 'amplitude', 'refine', 'out')}

    try:
        cfg = parse_config(args.experiment, args.config, overrides)
        ensure_directories_exist(cfg.out)
        print(f"Running {cfg.experiment} (T = {cfg.T}, dt = {cfg.dt}, gamma = {cfg.gamma})...")
        files = RUNNERS[cfg.experiment](cfg, pdf=args.pdf)

        print(f"✅ {cfg.experiment} complete!")
        for path in files:
            print(f"📄 Output: {path}")
        return 0

    except FileNotFoundError as e:
        print(f"❌ Error: {e}")
    except ValueError as ve:
        print(f"❌ Error: {ve}")
    except OSError as e:
        print(f"❌ Error writing output: {e}")
    except Exception as e:
        print(f"An unexpected error occurred: {e}")
        traceback.print_exc()
    return 1


if __name__ == "__main__":
    sys.exit(main())
