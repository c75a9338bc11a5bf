"""Test the symplectic and extended (energy-conserving) mechanics schemes."""

import pytest
import sys
import numpy as np
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from codes.discrete_mechanics import (
    MechTrajectory,
    Potential,
    SolverError,
    cyclic_momentum_check,
    energy_drift,
    energy_drift_check,
    extended_action,
    extended_step,
    run_extended,
    run_symplectic,
    symplectic_step,
    symplectic_step_inverse,
    time_reversal_error,
)


class TestPotential:
    def test_presets_consistent(self):
        for name in ("free", "constant", "linear", "harmonic"):
            phi = Potential.named(name)
            assert phi.name == name
            assert phi.check_consistency() < 1e-6

    def test_unknown(self):
        with pytest.raises(ValueError, match="unknown potential"):
            Potential.named("quartic")

    def test_inconsistent_derivative(self):
        wrong = Potential(lambda q: q**2, lambda q: q)
        with pytest.raises(ValueError, match="inconsistent"):
            wrong.check_consistency()


class TestSymplectic:
    def test_step(self):
        harmonic = Potential.harmonic()
        q_next, p_j = symplectic_step(1.0, 0.0, harmonic)
        assert (q_next, p_j) == (0.0, -1.0)
        assert symplectic_step_inverse(q_next, p_j, harmonic) == (1.0, 0.0)

    def test_energy_drift_formula(self):
        harmonic = Potential.harmonic()
        assert energy_drift(1.0, -1.0, harmonic) == -0.5
        assert energy_drift(0.3, 0.7, Potential.free()) == 0.0

    def test_drift_matches_measured(self):
        traj = run_symplectic(0.8, -0.6, Potential.harmonic(), 1000)
        assert len(traj) == 1001
        assert energy_drift_check(traj, Potential.harmonic()) < 1e-12

    def test_long_harmonic_run(self):
        phi = Potential.harmonic()
        traj = run_symplectic(0.8, -0.6, phi, 10_000)
        assert energy_drift_check(traj, phi) < 1e-12
        H = traj.energy(phi)
        assert 0.4 < H.min() and H.max() < 1.4, f"H left its band: [{H.min()}, {H.max()}]"
        first, second = H[:5000], H[5000:]
        assert abs(first.max() - second.max()) < 1e-9, "no secular growth of H"

    def test_time_reversal(self):
        phi = Potential.harmonic()
        traj = run_symplectic(0.8, -0.6, phi, 1000)
        assert time_reversal_error(traj, phi) < 1e-11

    def test_initial_momentum(self):
        phi = Potential.harmonic()
        traj = run_symplectic(0.8, -0.6, phi, 3)
        assert traj.q[0] == 0.8
        assert abs(traj.p[0] - (-0.6 - 0.8)) < 1e-15
        assert abs(traj.q[1] - (traj.q[0] + traj.p[0])) < 1e-15

    def test_constant_potential_conserves(self):
        phi = Potential.constant(2.0)
        traj = run_symplectic(0.1, 0.4, phi, 200)
        H = traj.energy(phi)
        assert np.max(np.abs(H - H[0])) == 0.0
        report = cyclic_momentum_check(traj, phi)
        assert report["scheme"] == "symplectic"
        assert report["max_delta_p"] == 0.0
        assert report["energy_excursion"] == 0.0

    def test_harmonic_energy_not_conserved(self):
        phi = Potential.harmonic()
        report = cyclic_momentum_check(run_symplectic(0.8, -0.6, phi, 100), phi)
        assert report["energy_excursion"] > 1e-3

    def test_invalid_steps(self):
        with pytest.raises(ValueError):
            run_symplectic(0.0, 1.0, Potential.free(), 0)


class TestExtended:
    def test_free_uniform_motion(self):
        traj = run_extended(0.0, 2.0, Potential.free(), 5, v0=0.5)
        np.testing.assert_allclose(traj.q, [0, 1, 2, 3, 4, 5])
        np.testing.assert_allclose(traj.t, [0, 0.5, 1.0, 1.5, 2.0, 2.5])
        np.testing.assert_allclose(traj.p, 2.0)
        np.testing.assert_allclose(traj.Pi, -2.0)

    def test_harmonic_conserves_pi(self):
        traj = run_extended(0.8, -0.6, Potential.harmonic(), 50, v0=0.01)
        assert traj.extended
        assert abs(traj.Pi[0] + 0.5) < 1e-15
        assert cyclic_momentum_check(traj)["max_delta_Pi"] < 1e-10
        assert np.all(np.diff(traj.t) > 0)
        assert traj.q[-1] < traj.q[0], "particle moves towards the minimum"

    def test_reflection_at_turning_point(self):
        phi = Potential.harmonic()
        q_j = -0.999
        q_next, V, u = extended_step(q_j, 0.0, -0.1, -0.5, phi, v_guess=1e-3)
        assert u > 0, "velocity reverses at the wall"
        assert V > 0 and q_next > q_j
        assert abs(-0.5 * u**2 - phi(q_j) + 0.5) < 1e-12
        assert abs(u + 0.1 + V * phi.derivative(q_j)) < 1e-12

    def test_harmonic_crosses_turning_point(self):
        phi = Potential.harmonic()
        traj = run_extended(0.8, -0.6, phi, 1000, v0=0.01)
        assert cyclic_momentum_check(traj)["max_delta_Pi"] <= 1e-10
        assert traj.q.min() < -0.9, "run reaches the far wall"
        assert traj.p.max() > 0, "velocity reverses"
        assert np.max(np.abs(traj.q)) < 1.0 + 1e-12

    def test_linear_potential(self):
        phi = Potential.linear()
        traj = run_extended(0.0, 1.0, phi, 1000, v0=1e-3)
        assert abs(traj.Pi[0] + 0.5) < 1e-15
        assert cyclic_momentum_check(traj)["max_delta_Pi"] <= 1e-10
        assert np.all(np.diff(traj.p) > 0), "constant force accelerates"

    def test_no_real_velocity(self):
        with pytest.raises(SolverError, match="no real velocity"):
            extended_step(0.0, 0.0, 0.0, 1.0, Potential.harmonic(), j=3)

    def test_invalid_settings(self):
        with pytest.raises(ValueError):
            extended_step(0.5, 0.0, -0.5, -0.5, Potential.harmonic(), solver_tol=0.0)
        with pytest.raises(ValueError):
            run_extended(0.0, 1.0, Potential.free(), 10, v0=0.0)

    def test_rows(self):
        phi = Potential.harmonic()
        rows = run_extended(0.8, -0.6, phi, 3, v0=0.01).rows(phi)
        assert len(rows) == 4
        assert set(rows[0]) == {"j", "q", "p", "t", "Pi"}
        rows = run_symplectic(0.8, -0.6, phi, 3).rows(phi)
        assert set(rows[0]) == {"j", "q", "p", "H"}


STIFFENING = 0.1


def _driven_phi(q, t):
    return 0.5 * (1.0 + STIFFENING * t) * q**2


def _driven_sigma(u, q, t):
    return 0.5 * u**2 - _driven_phi(q, t)


def _driven_run(q0, u0, v0, steps):
    """
    Points 0..steps of an oscillator whose spring stiffens in time. Each step solves the
    momentum update together with Pi_j - Pi_{j-1} = V_j (d sigma / dt)_j, a quadratic in
    V_j; the positive root nearest the previous step is kept.
    """
    q, t, u = [q0, q0 + v0 * u0], [0.0, v0], [u0]
    V = v0
    for j in range(1, steps):
        a, q_j, t_j = u[-1], q[j], t[j]
        Pi_prev = -0.5 * a**2 - _driven_phi(q[j - 1], t[j - 1])
        force = (1.0 + STIFFENING * t_j) * q_j
        dsigma_dt = -0.5 * STIFFENING * q_j**2
        rest = -_driven_phi(q_j, t_j) - Pi_prev - 0.5 * a**2
        roots = np.roots([0.5 * force**2, -(a * force - dsigma_dt), -rest])
        roots = roots[np.isreal(roots)].real
        V = min(roots[roots > 0], key=lambda r: abs(r - V))
        u.append(a - V * force)
        q.append(q_j + V * u[-1])
        t.append(t_j + V)
    return np.array(q), np.array(t)


def _action_gradient(q, t, sigma, h=1e-7):
    """Central differences of the extended action in every interior q_j and t_j."""
    grads = []
    for j in range(1, len(q) - 1):
        for which in (0, 1):
            plus, minus = [q.copy(), t.copy()], [q.copy(), t.copy()]
            plus[which][j] += h
            minus[which][j] -= h
            grads.append((extended_action(*plus, sigma) - extended_action(*minus, sigma))
                         / (2.0 * h))
    return np.array(grads)


class TestExtendedAction:
    def test_free_value(self):
        value = extended_action([0.0, 1.0, 3.0], [0.0, 1.0, 2.0],
                                lambda u, q, t: 0.5 * u**2)
        assert value == 0.5 + 2.0

    def test_extended_run_is_stationary(self):
        phi = Potential.harmonic()
        traj = run_extended(0.8, -0.6, phi, 20, v0=0.01)
        grads = _action_gradient(traj.q, traj.t, lambda u, q, t: 0.5 * u**2 - phi.value(q))
        assert np.max(np.abs(grads)) < 1e-8, f"max gradient {np.max(np.abs(grads)):.3e}"

    def test_time_dependent_sigma_drives_pi(self):
        q, t = _driven_run(0.8, -0.6, 0.01, 20)
        grads = _action_gradient(q, t, _driven_sigma)
        assert np.max(np.abs(grads)) < 1e-8, f"max gradient {np.max(np.abs(grads)):.3e}"

        V = np.diff(t)
        u = np.diff(q) / V
        Pi = -0.5 * u**2 - _driven_phi(q[:-1], t[:-1])
        rate = np.diff(Pi) / V[1:]
        expected = -0.5 * STIFFENING * q[1:-1] ** 2
        np.testing.assert_allclose(rate, expected, atol=1e-9)
        assert abs(Pi[-1] - Pi[0]) > 1e-3, "Pi is not conserved once sigma depends on t"


class TestMechTrajectory:
    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="differ in length"):
            MechTrajectory(q=[0.0, 1.0], p=[0.0])

    def test_time_must_increase(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            MechTrajectory(q=[0.0, 1.0], p=[1.0, 1.0], t=[0.0, 0.0], Pi=[0.0, 0.0])


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
