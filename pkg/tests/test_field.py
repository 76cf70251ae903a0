import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robin_disk.basis import project
from robin_disk.config import DiskConfig, Dirichlet, Robin
from robin_disk.field import (
    FieldGrid,
    FieldState,
    analyze,
    angular_momentum_integral,
    angular_momentum_mode,
    energy_integral,
    energy_mode,
    evaluate,
    evolve,
    random_state,
    solution_certificate,
    state_from_modes,
    synthesize,
    time_derivative,
    uncaptured_power,
    zero_state,
)
from robin_disk.verify import make_setup


def rel(a, b):
    return abs(a - b) / abs(b)


def test_zero_state_gives_zero_field(default_setup):
    field = synthesize(zero_state(default_setup.basis), 0.3, default_setup.grid)
    assert not np.any(field.phi) and not np.any(field.pi)
    assert energy_integral(field).value == 0.0
    assert energy_integral(field, "bulk").value == 0.0
    assert energy_mode(zero_state(default_setup.basis)) == 0.0


def test_single_mode_matches_series_oracle(default_setup, oracle):
    state = state_from_modes(default_setup.basis, {(0, 1): 1.0})
    nodes = np.array(oracle["single_mode_nodes"])
    phi, pi = evaluate(state, 0.0, nodes[:, 0], nodes[:, 1])
    np.testing.assert_allclose(phi, oracle["single_mode_phi_lam-1"], rtol=1e-13, atol=1e-15)
    # real amplitude and real mode: no momentum at t = 0
    assert np.max(np.abs(pi)) < 1e-15


def test_pointwise_evaluation_agrees_with_grid(default_setup):
    state = random_state(default_setup.basis, seed=5)
    field = synthesize(state, 0.4, default_setup.grid)
    grid = default_setup.grid
    rr, tt = np.meshgrid(grid.r[::9], grid.theta[::7], indexing="ij")
    phi, pi = evaluate(state, 0.4, rr, tt)
    assert np.max(np.abs(phi - field.phi[::9, ::7])) < 1e-12
    assert np.max(np.abs(pi - field.pi[::9, ::7])) < 1e-12


def test_synthesized_fields_are_real(default_setup):
    field = synthesize(random_state(default_setup.basis, seed=11), 2.5, default_setup.grid)
    assert field.imag_residual < 1e-12
    assert field.phi.dtype == np.float64 and field.pi.dtype == np.float64


@pytest.mark.parametrize("seed", range(5))
def test_round_trip(default_setup, seed):
    state = random_state(default_setup.basis, seed=seed)
    t = 0.37 * seed
    back = analyze(synthesize(state, t, default_setup.grid), default_setup.basis, state.t0)
    assert np.max(np.abs(back.amplitudes - state.amplitudes)) < 1e-8


def test_round_trip_forty_excited_modes(default_setup):
    state = random_state(default_setup.basis, n_excited=40)
    assert np.count_nonzero(state.amplitudes) == 40
    back = analyze(synthesize(state, 0.0, default_setup.grid), default_setup.basis)
    err = np.max(np.abs(back.amplitudes - state.amplitudes))
    # observed ~2e-14 on the default grid
    assert err < 1e-12


def test_single_mode_recovered_in_one_slot(default_setup):
    basis = default_setup.basis
    state = state_from_modes(basis, {(3, 2): 1.0})
    back = analyze(synthesize(state, 0.0, default_setup.grid), basis).amplitudes
    expected = np.zeros(len(basis))
    expected[basis.position(3, 2)] = 1.0
    assert np.max(np.abs(back - expected)) < 1e-12
    assert uncaptured_power(synthesize(state, 0.0, default_setup.grid), basis) < 1e-12


def test_amplitudes_are_referred_to_t0(default_setup):
    state = random_state(default_setup.basis, seed=3)
    moved = evolve(state, 1.3)
    # same physical trajectory, so the same field at any time
    a = synthesize(state, 2.0, default_setup.grid)
    b = synthesize(moved, 2.0, default_setup.grid)
    assert np.max(np.abs(a.phi - b.phi)) < 1e-12
    np.testing.assert_allclose(moved.heisenberg_constants(), state.amplitudes, atol=1e-15)


def test_evolve_identity_and_full_period(default_setup):
    basis = default_setup.basis
    state = random_state(basis, seed=2)
    same = evolve(state, 0.0)
    assert np.array_equal(same.amplitudes, state.amplitudes)
    single = state_from_modes(basis, {(1, 2): 0.3 - 0.8j})
    period = 2 * math.pi / basis.omega[basis.position(1, 2)]
    assert np.max(np.abs(evolve(single, period).amplitudes - single.amplitudes)) < 1e-14


@settings(max_examples=30, deadline=None)
@given(dt=st.floats(-50.0, 50.0), seed=st.integers(0, 2**16))
def test_evolve_preserves_moduli_and_charges(default_setup, dt, seed):
    state = random_state(default_setup.basis, seed=seed)
    moved = evolve(state, dt)
    assert moved.t0 == state.t0 + dt
    np.testing.assert_allclose(np.abs(moved.amplitudes), np.abs(state.amplitudes), rtol=1e-15)
    assert rel(energy_mode(moved), energy_mode(state)) < 1e-12
    assert abs(angular_momentum_mode(moved) - angular_momentum_mode(state)) < 1e-12 * energy_mode(state)


@settings(max_examples=20, deadline=None)
@given(dt1=st.floats(-10.0, 10.0), dt2=st.floats(-10.0, 10.0))
def test_evolve_is_a_group(default_setup, dt1, dt2):
    state = random_state(default_setup.basis, seed=9)
    a = evolve(evolve(state, dt1), dt2).amplitudes
    b = evolve(state, dt1 + dt2).amplitudes
    assert np.max(np.abs(a - b)) < 1e-13


@pytest.mark.parametrize(
    "config",
    [
        DiskConfig(),
        DiskConfig(mass=0.7, boundary=Robin(-10.0), l_max=4, n_max=4),
        DiskConfig(mass=1.2, boundary=Robin(0.0), l_max=4, n_max=4),
        DiskConfig(radius=2.0, mass=0.3, boundary=Dirichlet(), l_max=4, n_max=4),
    ],
)
def test_energy_forms_agree(config):
    setup = make_setup(config)
    for seed in range(3):
        state = random_state(setup.basis, seed=seed)
        field = synthesize(state, 0.8, setup.grid)
        mode = energy_mode(state)
        boundary = energy_integral(field, "boundary")
        bulk = energy_integral(field, "bulk")
        assert rel(boundary.value, mode) < 1e-6
        assert rel(bulk.value, mode) < 1e-6
        assert rel(boundary.value, bulk.value) < 1e-6
        assert boundary.error < 1e-6 * mode


def test_neumann_boundary_term_vanishes():
    setup = make_setup(DiskConfig(boundary=Robin(0.0), l_max=3, n_max=3))
    field = synthesize(random_state(setup.basis), 0.0, setup.grid)
    silenced = FieldGrid(**{**field.__dict__, "phi_ring": np.full_like(field.phi_ring, 5.0)})
    assert energy_integral(silenced).value == energy_integral(field).value


def test_energy_needs_the_boundary_ring(default_setup):
    field = synthesize(random_state(default_setup.basis), 0.0, default_setup.grid)
    broken = FieldGrid(**{**field.__dict__, "phi_ring": np.zeros(0)})
    with pytest.raises(ValueError, match="ring"):
        energy_integral(broken)
    with pytest.raises(ValueError):
        energy_integral(field, "sideways")


def test_angular_momentum_examples(default_setup):
    basis = default_setup.basis
    assert angular_momentum_mode(state_from_modes(basis, {(2, 1): 1.0})) == 2.0
    s0 = state_from_modes(basis, {(0, 1): 1.0, (0, 4): 0.5j})
    assert angular_momentum_mode(s0) == 0.0
    assert abs(angular_momentum_integral(synthesize(s0, 0.2, default_setup.grid)).value) < 1e-14


@pytest.mark.parametrize("seed", range(4))
def test_angular_momentum_integral_matches_mode_form(default_setup, seed):
    state = random_state(default_setup.basis, seed=seed)
    field = synthesize(state, 1.1, default_setup.grid)
    # relative to the energy scale: L itself can be near zero
    gap = abs(angular_momentum_integral(field).value - angular_momentum_mode(state))
    assert gap < 1e-6 * energy_mode(state)


def test_integral_charges_do_not_drift(massive_setup):
    state = random_state(massive_setup.basis, seed=4)
    e0 = energy_mode(state)
    l0 = angular_momentum_mode(state)
    current = state
    worst = 0.0
    for _ in range(100):
        current = evolve(current, 0.05)
        field = synthesize(current, current.t0, massive_setup.grid)
        worst = max(worst, rel(energy_integral(field).value, e0),
                    abs(angular_momentum_integral(field).value - l0) / e0)
    assert worst < 1e-6


def test_hamilton_equation_holds(massive_setup):
    basis, grid = massive_setup.basis, massive_setup.grid
    state = random_state(basis, seed=8)
    field = synthesize(state, 0.6, grid)
    dphi_dt = synthesize(time_derivative(state), 0.6, grid).phi
    residual = dphi_dt - field.pi / grid.r[:, None]
    assert np.max(np.abs(project(basis, residual, grid))) < 1e-9


def test_certificate_accepts_free_trajectories(default_setup):
    state = random_state(default_setup.basis, seed=6)
    times = np.linspace(0, 3, 5)
    assert solution_certificate(state, times, default_setup.grid) < 1e-8
    assert solution_certificate(lambda t: evolve(state, t), times, default_setup.grid) < 1e-8


def test_certificate_flags_a_frozen_snapshot(default_setup):
    state = random_state(default_setup.basis, seed=6)
    # the same amplitudes shown at every time with the clock reset: not a solution
    frozen = lambda t: state.replace(t0=t)  # noqa: E731
    assert solution_certificate(frozen, [0.0, 0.5, 1.0], default_setup.grid) > 0.1


@pytest.mark.parametrize(
    "amps",
    [np.zeros(3), np.full(78, np.nan), np.full(78, np.inf)],
)
def test_state_validation(default_setup, amps):
    with pytest.raises(ValueError):
        FieldState(default_setup.basis, amps)


def test_states_are_immutable(default_setup):
    state = random_state(default_setup.basis)
    with pytest.raises(ValueError):
        state.amplitudes[0] = 1.0
    moved = evolve(state, 1.0)
    assert moved is not state and state.t0 == 0.0


def test_random_state_is_reproducible(default_setup):
    a = random_state(default_setup.basis, seed=123)
    b = random_state(default_setup.basis, seed=123)
    c = random_state(default_setup.basis, seed=124)
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert not np.array_equal(a.amplitudes, c.amplitudes)


def test_evaluate_outside_disk_raises(default_setup):
    with pytest.raises(ValueError):
        evaluate(zero_state(default_setup.basis), 0.0, np.array([1.5]), np.array([0.0]))
