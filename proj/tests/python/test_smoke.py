import math

import numpy as np
import pytest

qd = pytest.importorskip("qdecouple")


def test_basis_and_cartan():
    basis = qd.gellmann_basis(3)
    assert basis.size == 8
    for el in basis.elements:
        assert abs(np.trace(el)) < 1e-12
        assert np.abs(el - el.conj().T).max() < 1e-12
    basis_p, split = qd.preset_split(qd.SplitPreset.qutrit_v)
    report = qd.verify_cartan(basis_p, split)
    assert report.ok


def test_one_qubit_worked_example():
    sys = qd.preset_system(qd.SystemPreset.one_qubit)
    vs = qd.vectorize(sys.spec, sys.basis, sys.split)
    assert qd.check_assumptions(vs).all()
    blocks = qd.block_split(vs)

    analytic = qd.analytic_one_qubit(np.array([math.sqrt(2) / 2, 0.0, math.sqrt(2) / 2]), 0.2)
    xi = analytic.solution.xi
    assert abs(xi[0]) < 1e-14
    assert abs(xi[1] + 0.2 * math.sqrt(2) / 2) < 1e-14
    assert abs(analytic.amplitude - 0.2 * math.sqrt(2) / 2) < 1e-14

    law = qd.make_control_law(vs, blocks, analytic.solution, 0.0)
    for t in np.linspace(0.0, 5.0, 23):
        u = law.at(t)
        assert abs(u[0] - 0.2 * math.sqrt(2) / 2 * math.sin(3 * t)) < 1e-12
        assert abs(u[1] + 0.2 * math.sqrt(2) / 2 * math.cos(3 * t)) < 1e-12


def test_integration_matches_density_oracle():
    sys = qd.preset_system(qd.SystemPreset.one_qubit)
    vs = qd.vectorize(sys.spec, sys.basis, sys.split)
    blocks = qd.block_split(vs)
    analytic = qd.analytic_one_qubit(np.array([math.sqrt(2) / 2, 0.0, math.sqrt(2) / 2]), 0.2)
    law = qd.make_control_law(vs, blocks, analytic.solution, 0.0)

    grid = np.linspace(0.0, 5.0, 51)
    m0 = qd.rho_to_coherence(sys.rho0, sys.basis)
    traj = qd.integrate(vs, law.at, m0.m, grid)
    oracle = qd.integrate_density_oracle(sys.spec, law.at, sys.rho0, grid, sys.basis)
    assert np.abs(traj.states - oracle.states).max() < 1e-8
    assert oracle.max_trace_error < 1e-9
    assert oracle.min_eigenvalue > -1e-8


def test_entanglement_measure():
    assert qd.entanglement_measure(np.eye(4, dtype=complex) / 4) == 0.0
    bell = qd.bell_phi0_density()
    assert abs(qd.entanglement_measure(bell) - 1.0) < 1e-12
    mixed = 0.5 * np.eye(4, dtype=complex) / 4 + 0.5 * bell
    assert qd.entanglement_measure(mixed) == 0.0


def test_scenario_run(tmp_path):
    cfg = qd.preset_config("two_qubit_mixed")
    cfg.output_directory = str(tmp_path)
    report = qd.run_scenario(cfg)
    assert report.cartan_ok
    assert report.assumptions.all()
    assert report.solution.status == qd.SolveStatus.exact
    assert abs(report.solution.xi[8] - 0.25 * 0.2) < 1e-10  # u_zz = Gamma/4
    assert (tmp_path / "two_qubit_mixed_controls.csv").exists()
    assert (tmp_path / "two_qubit_mixed_checks.json").exists()
