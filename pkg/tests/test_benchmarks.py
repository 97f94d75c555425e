import numpy as np
import pytest

from oracles import match_spectrum, poisson
from spmor import benchmarks, simulate
from spmor.exceptions import ContractViolation
from spmor.lti import ASYMPTOTICALLY_STABLE, MARGINAL, PURE_MARGINALLY_STABLE, STABLE, classify_stability, decompose
from spmor.symplectic import check_generalized_hamiltonian, hamiltonian_energy


def test_example_1d_spectrum(ex1d):
    w = np.linalg.eigvals(ex1d.sys.A)
    assert match_spectrum(w, [-3, -2 + 1j, -2 - 1j, -1, 1j, -1j, 2j, -2j], 1e-8)


def test_example_1d_metric(ex1d):
    res = ex1d.A_s.T @ ex1d.Theta + ex1d.Theta @ ex1d.A_s + np.eye(4)
    assert np.abs(res).max() <= 1e-12


def test_example_1d_hamiltonian_block(ex1d):
    np.testing.assert_array_equal(ex1d.A_m, poisson(2) @ np.diag([2.0, 1, 2, 1]))


def test_example_1d_decompose_recovers_blocks(ex1d):
    dec = decompose(ex1d.sys)
    assert match_spectrum(np.linalg.eigvals(dec.block(STABLE).A), [-3, -2 + 1j, -2 - 1j, -1], 1e-8)
    assert match_spectrum(np.linalg.eigvals(dec.block(MARGINAL).A), [1j, -1j, 2j, -2j], 1e-8)


def test_spline_values():
    np.testing.assert_allclose(benchmarks.spline([0.0, 1.0, 2.0, 3.0]), [1, 0.25, 0, 0])


def test_spring_single_mass():
    prob = benchmarks.mass_spring_2d(benchmarks.MassSpringConfig(grid=1, k_y=3.0, m=2.0))
    np.testing.assert_allclose(prob.A_m, [[0, 0.5], [-6.0, 0]])
    w = np.linalg.eigvals(prob.A_m)
    np.testing.assert_allclose(np.sort(w.imag), [-np.sqrt(3.0), np.sqrt(3.0)], rtol=1e-14)


def test_spring_classes():
    prob = benchmarks.mass_spring_2d(benchmarks.MassSpringConfig(grid=5))
    assert classify_stability(prob.A_s) == ASYMPTOTICALLY_STABLE
    assert classify_stability(prob.A_m) == PURE_MARGINALLY_STABLE
    assert prob.sys.n == 100


def test_spring_canonical_structure():
    prob = benchmarks.mass_spring_2d(benchmarks.MassSpringConfig(grid=5))
    n2 = 25
    assert check_generalized_hamiltonian(prob.A_m, poisson(n2)) <= 1e-14
    np.testing.assert_allclose(prob.A_m, poisson(n2) @ prob.L_y, atol=0)
    np.testing.assert_array_equal(prob.dec.T, np.eye(100))


def test_spring_initial_condition_symmetric():
    prob = benchmarks.mass_spring_2d(benchmarks.MassSpringConfig(grid=9))
    q = prob.x0[:81].reshape(9, 9)
    np.testing.assert_allclose(q, q.T, atol=1e-15)
    np.testing.assert_allclose(q, q[::-1, ::-1], atol=1e-15)
    assert q[4, 4] == 1.0  # centre mass sits at l/2
    np.testing.assert_array_equal(prob.x0[81:162], 0.0)
    np.testing.assert_array_equal(prob.x0[162:243], prob.x0[:81])


def test_spring_hamiltonian_conserved():
    prob = benchmarks.mass_spring_2d(benchmarks.MassSpringConfig(grid=5))
    y0 = prob.x0[50:]
    tr = simulate.analytic_trajectory(prob.A_m, y0, simulate.TimeGrid.from_final(0.01, 1.0))
    H = hamiltonian_energy(prob.L_y, tr.states)
    assert simulate.hamiltonian_drift(H) <= 1e-10


def test_spring_energy_nonincreasing():
    prob = benchmarks.mass_spring_2d(benchmarks.MassSpringConfig(grid=5))
    tr = simulate.analytic_trajectory(prob.sys.A, prob.x0, simulate.TimeGrid.from_final(0.002, 1.0))
    E = simulate.quadratic_energy(prob.energy_operator, tr.states)
    assert np.all(np.diff(E) <= 1e-10 * E[0])


def test_spring_config_validation():
    with pytest.raises(ContractViolation):
        benchmarks.MassSpringConfig(grid=0)
    with pytest.raises(ContractViolation):
        benchmarks.MassSpringConfig(b=-1.0)
