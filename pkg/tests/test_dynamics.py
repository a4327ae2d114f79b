import math

import numpy as np
import pytest

from pyzeno.analysis import effective_t1, eq4_t1
from pyzeno.helpers import ConfigError
from pyzeno.linalg import density_matrix
from pyzeno.model import (DEPHASING, JUMP, SIGMA_MINUS, SIGMA_Z, Dissipator, HybridParams,
                          LindbladModel, basis_index, basis_ket, lindblad_model)
from pyzeno.dynamics import (TrotterState, integrate, lindblad_rhs, liouvillian,
                             measured_evolution, period_taus, rk4_propagator, rk4_step,
                             trotter_average_step, trotter_closed_form, trotter_run,
                             trotter_step)


@pytest.fixture
def params():
    return HybridParams.from_mhz(25, 1250, t2_sc_ns = 10)


def mixed_state(seed, dim = 4):
    rng = np.random.default_rng(seed)
    kets = rng.normal(size = (3, dim)) + 1j * rng.normal(size = (3, dim))
    kets = kets / np.linalg.norm(kets, axis = 1, keepdims = True)
    weights = [0.5, 0.3, 0.2]
    return sum(w * np.outer(k, np.conj(k)) for w, k in zip(weights, kets))


def test_trotter_state_validation():
    with pytest.raises(ValueError):
        TrotterState(0.3, 0.3)
    with pytest.raises(ValueError):
        TrotterState(-0.5, 1.5)


def test_trotter_step_conserves_population(params):
    s = TrotterState(0.0, 1.0)
    for tau in [0.1, 0.37, 2.0, 5.5]:
        s = trotter_step(s, params, tau)
        assert s.p_a + s.p_b == pytest.approx(1.0, abs = 1e-12)
    assert s.step_index == 4


def test_trotter_step_without_coupling_is_frozen():
    p = HybridParams(g = 0.0, delta = 1.0)
    s = trotter_step(TrotterState(0.2, 0.8), p, 3.0)
    assert (s.p_a, s.p_b) == pytest.approx((0.2, 0.8))


def test_trotter_step_rejects_non_positive_tau(params):
    with pytest.raises(ValueError):
        trotter_step(TrotterState(0.0, 1.0), params, 0.0)


def test_closed_form_values():
    # Delta = 2g gives r = 1/2
    p = HybridParams(g = 0.5, delta = 1.0)

    assert trotter_closed_form(0, p).p_b == 1.0
    assert trotter_closed_form(1, p).p_b == pytest.approx(0.75)
    assert trotter_closed_form(2, p).p_b == pytest.approx(0.625)


def test_closed_form_quarter_decay_at_reference_parameters(params):
    # r^n = 1/2 near n = 434 for g/2pi = 25 MHz, Delta/2pi = 1250 MHz
    assert trotter_closed_form(434, params).p_b == pytest.approx(0.75, abs = 1e-3)
    assert trotter_closed_form(10 ** 6, params).p_b == pytest.approx(0.5, abs = 1e-12)


def test_average_step_reproduces_closed_form(params):
    s = TrotterState(0.0, 1.0)
    for _ in range(250):
        s = trotter_average_step(s, params)
    assert s.p_b == pytest.approx(trotter_closed_form(250, params).p_b, abs = 1e-12)


def test_period_taus_span_one_period():
    p = HybridParams.from_mhz(25, 500)
    taus = period_taus(p, 1.0, 4)

    period = 2 * math.pi / p.rabi_frequency
    assert len(taus) == 4
    assert np.allclose(np.diff(taus), period / 4)


def test_spread_intervals_track_closed_form_at_whole_cycles():
    p = HybridParams.from_mhz(25, 500)
    taus = period_taus(p, 1.0, 4)

    s = TrotterState(0.0, 1.0)
    for _ in range(20):
        s = trotter_run(s, p, taus)

    assert s.step_index == 80
    assert s.p_b == pytest.approx(trotter_closed_form(80, p).p_b, abs = 2e-3)


def test_measured_evolution_matches_trotter_step(params):
    rho = density_matrix(basis_ket(0, 1))
    s = TrotterState(0.0, 1.0)

    for tau in [0.3, 1.1, 0.05]:
        rho = measured_evolution(rho, params, tau)
        s = trotter_step(s, params, tau)

        assert rho[basis_index(0, 1), basis_index(0, 1)].real == pytest.approx(s.p_b, abs = 1e-10)
        assert rho[basis_index(1, 0), basis_index(1, 0)].real == pytest.approx(s.p_a, abs = 1e-10)
        assert abs(rho[basis_index(0, 1), basis_index(1, 0)]) < 1e-12


def test_liouvillian_matches_rhs():
    p = HybridParams.from_mhz(25, 800, t2_sc_ns = 10, t1_sc_ns = 400)
    m = lindblad_model(p)
    rho = mixed_state(7)

    drho = lindblad_rhs(rho, m)
    vec = liouvillian(m) @ rho.reshape(-1)

    assert np.allclose(vec.reshape(4, 4), drho, atol = 1e-12)
    assert abs(np.trace(drho)) < 1e-12


def test_rk4_propagator_matches_rk4_step():
    p = HybridParams.from_mhz(25, 800, t2_sc_ns = 10, t1_sc_ns = 400)
    m = lindblad_model(p)
    rho = mixed_state(11)

    h = 0.01
    stepped = rk4_step(rho, m, h)
    propagated = (rk4_propagator(liouvillian(m), h) @ rho.reshape(-1)).reshape(4, 4)

    assert np.allclose(stepped, propagated, atol = 1e-13)


def test_integrate_rejects_bad_grids(params):
    m = lindblad_model(params)
    rho0 = density_matrix(basis_ket(0, 1))

    with pytest.raises(ConfigError):
        integrate(rho0, m, -1.0, 1.0)
    with pytest.raises(ConfigError):
        integrate(rho0, m, 10.0, 0.0)
    with pytest.raises(ConfigError):
        integrate(rho0, m, 10.0, 1.0, step = 1e-8)
    with pytest.raises(ConfigError):
        integrate(density_matrix(basis_ket(0, 0, 1)), m, 10.0, 1.0)


def test_integrate_without_noise_conserves_excitation():
    p = HybridParams.from_mhz(25, 100)
    trace = integrate(density_matrix(basis_ket(0, 1)), lindblad_model(p), 50.0, 0.5)

    assert len(trace.times) == 101
    assert trace.times[-1] == pytest.approx(50.0)
    assert np.allclose(trace.excitation, 1.0, atol = 1e-9)
    assert np.allclose(trace.p_memory + trace.p_control, 1.0, atol = 1e-9)
    assert trace.trace_error < 1e-9


def test_integrate_coherent_exchange_matches_rabi_formula():
    p = HybridParams.from_mhz(25, 100)
    trace = integrate(density_matrix(basis_ket(0, 1)), lindblad_model(p), 20.0, 0.1)

    omega = p.rabi_frequency
    expected = 4 * p.g ** 2 / omega ** 2 * np.sin(omega * trace.times / 2) ** 2

    assert np.allclose(trace.p_control, expected, atol = 1e-8)


def test_integrate_with_noise_stays_physical():
    p = HybridParams.from_mhz(25, 600, t2_sc_ns = 10, t1_sc_ns = 400)
    trace = integrate(density_matrix(basis_ket(0, 1)), lindblad_model(p), 2000.0, 2.0)

    assert trace.trace_error < 1e-9
    assert trace.min_eigenvalue > -1e-9
    assert np.all(np.diff(trace.excitation) <= 1e-12)


def test_to_frame_columns(params):
    trace = integrate(density_matrix(basis_ket(0, 1)), lindblad_model(params), 10.0, 1.0)
    frame = trace.to_frame()

    assert list(frame.columns) == ["t_ns", "p_memory", "p_control"]
    assert len(frame) == 11
    assert frame["p_memory"].iloc[0] == pytest.approx(1.0)


@pytest.mark.slow
def test_dephasing_only_lifetime_matches_analytic_formula(params):
    t_max = 20 * eq4_t1(params, 0.5)
    trace = integrate(density_matrix(basis_ket(0, 1)), lindblad_model(params), t_max, t_max / 5000)

    estimate = effective_t1(trace)

    assert estimate.p_asymptote == pytest.approx(0.5, abs = 1e-3)
    assert estimate.t1_eff == pytest.approx(eq4_t1(params, 0.5), rel = 0.05)


def test_step_halving_changes_little():
    p = HybridParams.from_mhz(25, 600, t2_sc_ns = 10, t1_sc_ns = 400)
    m = lindblad_model(p)
    rho0 = density_matrix(basis_ket(0, 1))

    coarse = integrate(rho0, m, 200.0, 1.0, step = 0.002)
    fine = integrate(rho0, m, 200.0, 1.0, step = 0.001)

    assert np.max(np.abs(coarse.p_memory - fine.p_memory)) < 1e-7


def test_integrate_stops_at_the_last_whole_interval(params):
    trace = integrate(density_matrix(basis_ket(0, 1)), lindblad_model(params), 10.0, 6.0)

    assert list(trace.times) == pytest.approx([0.0, 6.0])
    assert trace.times[-1] <= 10.0


def test_dephasing_alone_conserves_excitation():
    p = HybridParams.from_mhz(25, 600, t2_sc_ns = 10)
    trace = integrate(density_matrix(basis_ket(0, 1)), lindblad_model(p), 2000.0, 2.0)

    assert np.max(np.abs(trace.excitation - 1.0)) <= 1e-6
    assert trace.p_memory[-1] < 0.99


def test_unitary_propagation_preserves_purity():
    p = HybridParams.from_mhz(25, 600)
    rho = density_matrix((basis_ket(0, 1) + basis_ket(1, 0)) / math.sqrt(2))

    step = np.linalg.matrix_power(rk4_propagator(liouvillian(lindblad_model(p)), 0.002), 1000)

    vec = rho.reshape(-1)
    for _ in range(10):
        vec = step @ vec
        evolved = vec.reshape(4, 4)
        assert np.trace(evolved @ evolved).real == pytest.approx(1.0, abs = 1e-8)


def test_single_qubit_dephasing_rate():
    t2 = 10.0
    m = LindbladModel(np.zeros((2, 2)), [Dissipator(SIGMA_Z, 1 / (2 * t2), DEPHASING)])
    rho = np.array([[0.5, 0.5], [0.5, 0.5]])

    drho = lindblad_rhs(rho, m)

    assert drho[0, 1] == pytest.approx(-2 / t2 * rho[0, 1])
    assert drho[1, 0] == pytest.approx(-2 / t2 * rho[1, 0])
    assert np.allclose(np.diag(drho), 0.0)


def test_single_qubit_relaxation_rate():
    t1 = 400.0
    m = LindbladModel(np.zeros((2, 2)), [Dissipator(SIGMA_MINUS, 1 / t1, JUMP)])

    drho = lindblad_rhs(np.diag([0.0, 1.0]), m)

    assert drho[1, 1] == pytest.approx(-1 / t1)
    assert drho[0, 0] == pytest.approx(1 / t1)


def test_effective_t1_does_not_depend_on_sampling():
    p = HybridParams.from_mhz(25, 600, t2_sc_ns = 10)
    m = lindblad_model(p)
    rho0 = density_matrix(basis_ket(0, 1))

    fine = effective_t1(integrate(rho0, m, 10000.0, 4.0))
    coarse = effective_t1(integrate(rho0, m, 10000.0, 16.0))

    assert coarse.t1_eff == pytest.approx(fine.t1_eff, rel = 0.005)
