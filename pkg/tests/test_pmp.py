"""Tests for the discrete PMP shooting solver."""

from pathlib import Path
import sys

import numpy as np
import pytest


PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.append(str(PROJECT_ROOT))


from lindblad_contact.channels import density_from_bloch  # noqa: E402
from lindblad_contact.integrators import (  # noqa: E402
    Scheme, propagate, sine_pulse, zero_controls,
)
from lindblad_contact.metrics import positivity_drift, summarize  # noqa: E402
from lindblad_contact import pmp  # noqa: E402
from lindblad_contact.pmp import (  # noqa: E402
    OcpConfig, _tie_break_rank, contact_hamiltonian, control_grid, discrete_hamiltonian,
    maximize_control, shoot, stationary_fraction, terminal_cost, total_cost,
)
from lindblad_contact.qmat import Herm2, hs_inner  # noqa: E402


def _random_state(rng):
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    return density_from_bloch(direction * rng.uniform() ** (1.0 / 3.0))


def _random_costate(rng):
    return Herm2(rng.normal(), rng.normal(), rng.normal() + 1j * rng.normal())


@pytest.mark.parametrize('kwargs, message', [
    ({'grid_points': 240}, 'odd'),
    ({'grid_points': 1}, 'odd'),
    ({'beta': 0.0}, 'beta'),
    ({'beta': 1.5}, 'beta'),
    ({'u_max': 0.0}, 'u_max'),
    ({'dt': 0.007}, 'integer'),
    ({'gamma': -1.0}, 'gamma'),
])
def test_ocp_config_validation(kwargs, message):
    with pytest.raises(ValueError) as excinfo:
        OcpConfig(**kwargs)

    assert message in str(excinfo.value)


def test_ocp_config_defaults_and_dict_round_trip():
    cfg = OcpConfig()

    assert cfg.N == 300
    assert OcpConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()


def test_terminal_cost_examples():
    target = Herm2.ground()

    assert terminal_cost(Herm2.ground(), target) == 0.0
    assert terminal_cost(Herm2.excited(), target) == 1.0
    assert terminal_cost(Herm2.maximally_mixed(), target) == 0.5


def test_total_cost_of_free_decay():
    cfg = OcpConfig(T=3.0, dt=0.01, gamma=1.0)
    u = zero_controls(cfg.N)
    traj = propagate(Scheme.CONTACT_LGVI, Herm2.excited(), u, cfg.dt, cfg.gamma)

    assert total_cost(u, traj, cfg, Herm2.ground()) == pytest.approx(np.exp(-3.0), abs=1e-12)

    at_target = propagate(Scheme.CONTACT_LGVI, Herm2.ground(), u, cfg.dt, cfg.gamma)
    assert total_cost(u, at_target, cfg, Herm2.ground()) == 0.0


def test_discrete_hamiltonian_without_costate_is_pure_penalty():
    cfg = OcpConfig()
    u = np.linspace(-6.0, 6.0, 7)

    values = discrete_hamiltonian(Herm2(0.3, 0.7, 0.1j), Herm2.zero(), u, Scheme.CONTACT_LGVI, cfg)

    np.testing.assert_allclose(values, -cfg.alpha * u * u * cfg.dt, atol=1e-18)


def test_discrete_hamiltonian_closed_form_for_unitary_rotation():
    cfg = OcpConfig(alpha=0.0, gamma=0.0)
    u = np.linspace(-6.0, 6.0, 25)

    values = discrete_hamiltonian(Herm2.ground(), -1.0 * Herm2.excited(), u,
                                  Scheme.CONTACT_LGVI, cfg)

    np.testing.assert_allclose(values, -np.sin(0.5 * u * cfg.dt) ** 2, atol=1e-15)


def test_discrete_hamiltonian_is_even_for_diagonal_data():
    cfg = OcpConfig()
    u = np.linspace(0.0, 6.0, 13)
    rho, P = Herm2.diag(0.3, 0.7), Herm2.diag(0.9, -0.4)

    plus = discrete_hamiltonian(rho, P, u, Scheme.CONTACT_LGVI, cfg)
    minus = discrete_hamiltonian(rho, P, -u, Scheme.CONTACT_LGVI, cfg)

    np.testing.assert_allclose(plus, minus, atol=1e-15)


@pytest.mark.parametrize('scheme', [Scheme.CONTACT_LGVI, Scheme.RK2_HEUN])
def test_two_hamiltonian_conventions_differ_by_known_shift(scheme):
    rng = np.random.default_rng(40)
    grid = control_grid(6.0, 241)
    for alpha in (0.05, 0.0):
        cfg = OcpConfig(alpha=alpha)
        rho, P = _random_state(rng), _random_costate(rng)

        contact = contact_hamiltonian(rho, P, grid, scheme, cfg)
        discrete = discrete_hamiltonian(rho, P, grid, scheme, cfg)
        shift = hs_inner(P, rho) + 2.0 * alpha * grid * grid * cfg.dt

        np.testing.assert_allclose(contact - discrete, shift, atol=1e-13)
        if alpha == 0.0:
            assert contact[np.argmax(discrete)] >= np.max(contact) - 1e-13


def test_control_grid_is_symmetric_with_exact_zero():
    grid = control_grid(6.0, 241)

    assert len(grid) == 241
    assert grid[120] == 0.0
    assert grid[0] == -6.0 and grid[-1] == 6.0
    np.testing.assert_array_equal(grid, -grid[::-1])


def test_tie_break_prefers_small_then_negative_controls():
    rank = _tie_break_rank(np.array([-1.0, -0.5, 0.0, 0.5, 1.0]))

    assert rank.tolist() == [3, 1, 0, 2, 4]


def test_maximize_control_without_costate_returns_zero():
    cfg = OcpConfig()

    assert maximize_control(Herm2(0.3, 0.7, 0.2j), Herm2.zero(), Scheme.CONTACT_LGVI, cfg) == 0.0
    no_penalty = OcpConfig(alpha=0.0)
    assert maximize_control(Herm2(0.3, 0.7, 0.2j), Herm2.zero(), Scheme.CONTACT_LGVI,
                            no_penalty) == 0.0


def test_maximize_control_matches_exhaustive_scan():
    cfg = OcpConfig(T=3.0, dt=0.01, gamma=1.0, alpha=0.05, u_max=6.0)
    rng = np.random.default_rng(41)
    scan = np.linspace(-6.0, 6.0, 100_000)
    for _ in range(100):
        rho, P = _random_state(rng), _random_costate(rng)

        u_star = maximize_control(rho, P, Scheme.CONTACT_LGVI, cfg)

        assert -6.0 <= u_star <= 6.0
        best_scan = np.max(discrete_hamiltonian(rho, P, scan, Scheme.CONTACT_LGVI, cfg))
        attained = discrete_hamiltonian(rho, P, u_star, Scheme.CONTACT_LGVI, cfg)
        assert attained >= best_scan - 1e-8


def test_shoot_from_target_is_already_optimal():
    cfg = OcpConfig()

    result = shoot(cfg, Scheme.CONTACT_LGVI, Herm2.ground(), Herm2.ground(), zero_controls(cfg.N))

    assert result.converged
    assert result.iterations == 0
    assert result.cost_history == [0.0]
    assert np.all(result.controls == 0.0)


def test_shoot_rejects_malformed_initial_guess():
    cfg = OcpConfig()

    with pytest.raises(ValueError):
        shoot(cfg, Scheme.CONTACT_LGVI, Herm2.excited(), Herm2.ground(), zero_controls(cfg.N - 1))
    with pytest.raises(ValueError):
        shoot(cfg, Scheme.CONTACT_LGVI, Herm2.excited(), Herm2.ground(),
              sine_pulse(cfg.T, cfg.dt, amplitude=7.0))


@pytest.fixture(scope='module')
def full_runs():
    cfg = OcpConfig()
    u0 = sine_pulse(cfg.T, cfg.dt)
    return cfg, {scheme: shoot(cfg, scheme, Herm2.excited(), Herm2.ground(), u0)
                 for scheme in (Scheme.CONTACT_LGVI, Scheme.RK2_HEUN)}


@pytest.mark.parametrize('scheme', [Scheme.CONTACT_LGVI, Scheme.RK2_HEUN])
def test_full_run_cost_never_increases(full_runs, scheme):
    cfg, results = full_runs
    result = results[scheme]

    history = np.array(result.cost_history)
    assert np.all(np.isfinite(history))
    assert np.all(np.diff(history) <= 0.0)
    assert history[-1] < history[0]
    assert len(history) == result.iterations + 1 <= cfg.max_iters + 1
    assert len(result.relaxations) == result.iterations
    assert all(0.0 < beta <= cfg.beta for beta in result.relaxations)
    assert 0.0 <= stationary_fraction(result, scheme, cfg) <= 1.0


def test_full_run_lgvi_reaches_at_least_the_rk2_cost(full_runs):
    cfg, results = full_runs
    lgvi, rk2 = results[Scheme.CONTACT_LGVI], results[Scheme.RK2_HEUN]

    # the two discretizations have slightly different optima
    assert lgvi.final_cost <= rk2.final_cost + 1e-3

    summary = summarize(lgvi.trajectory, lgvi.costates, lgvi.cost)
    assert summary.max_abs_theta <= 1e-2
    assert summary.max_pos_drift <= 1e-14


def test_lgvi_shooting_lowers_cost_and_stays_physical(full_runs):
    cfg, results = full_runs
    result = results[Scheme.CONTACT_LGVI]

    history = np.array(result.cost_history)
    assert np.all(np.isfinite(history))
    assert len(history) <= cfg.max_iters + 1
    assert history[-1] < history[0]
    assert np.all(np.abs(result.controls) <= cfg.u_max)
    for u in result.control_history:
        assert np.all(np.abs(u) <= cfg.u_max)

    states = result.trajectory.stacked()
    assert np.max(positivity_drift(states)) <= 1e-14

    # |theta_k| <= alpha u_max^2 dt + ||P_{k+1}|| ||rho_{k+1} - rho_k||
    for k in range(cfg.N):
        rho_k, rho_next = result.trajectory.states[k], result.trajectory.states[k + 1]
        P_next = result.costates[k + 1]
        theta = (result.cost.z[k + 1] - result.cost.z[k]) - hs_inner(P_next, rho_next - rho_k)
        bound = (cfg.alpha * cfg.u_max ** 2 * cfg.dt
                 + P_next.frobenius_norm() * (rho_next - rho_k).frobenius_norm())
        assert abs(theta) <= bound + 1e-15


def test_shooting_is_deterministic():
    cfg = OcpConfig(T=0.5, dt=0.01, max_iters=3)
    u0 = sine_pulse(cfg.T, cfg.dt)

    first = shoot(cfg, Scheme.RK2_HEUN, Herm2.excited(), Herm2.ground(), u0)
    second = shoot(cfg, Scheme.RK2_HEUN, Herm2.excited(), Herm2.ground(), u0)

    assert first.cost_history == second.cost_history
    np.testing.assert_array_equal(first.controls, second.controls)


def test_shooting_aborts_on_diverged_trajectory(capsys):
    cfg = OcpConfig(T=400.0, dt=0.5, gamma=20.0, max_iters=5)
    u0 = sine_pulse(cfg.T, cfg.dt)

    result = shoot(cfg, Scheme.RK2_HEUN, Herm2.excited(), Herm2.ground(), u0)

    assert not result.converged
    assert "diverged" in result.reason
    assert result.cost_history == []
    assert result.trajectory.diverged
    assert "Warning" in capsys.readouterr().out


def test_rkmk2_shooting_runs_on_linearized_costates():
    cfg = OcpConfig(T=0.2, dt=0.01, max_iters=2)
    u0 = sine_pulse(cfg.T, cfg.dt)

    result = shoot(cfg, Scheme.RKMK2, Herm2.excited(), Herm2.ground(), u0)

    assert 1 <= len(result.cost_history) <= cfg.max_iters + 1
    assert np.all(np.isfinite(result.cost_history))
    assert np.all(np.abs(result.controls) <= cfg.u_max)


def test_shoot_rejects_updates_that_raise_the_cost(monkeypatch):
    cfg = OcpConfig(T=0.5, dt=0.01, max_iters=5)
    # from the target any nonzero control costs more than zero
    monkeypatch.setattr(pmp, '_pointwise_maximizers',
                        lambda traj, costates, scheme, cfg: np.full(cfg.N, cfg.u_max))

    result = shoot(cfg, Scheme.CONTACT_LGVI, Herm2.ground(), Herm2.ground(), zero_controls(cfg.N))

    assert result.converged
    assert result.reason == "no cost decrease along the relaxed update"
    assert result.cost_history == [0.0]
    assert result.relaxations == []
    np.testing.assert_array_equal(result.controls, zero_controls(cfg.N))


def test_stationary_fraction_of_trivial_problems():
    cfg = OcpConfig()
    at_target = shoot(cfg, Scheme.CONTACT_LGVI, Herm2.ground(), Herm2.ground(),
                      zero_controls(cfg.N))

    assert at_target.reason == "stationary control"
    assert stationary_fraction(at_target, Scheme.CONTACT_LGVI, cfg) == 1.0
