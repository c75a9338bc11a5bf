"""Test spin frames, frame changes and the covariant action."""

import pytest
import sys
import numpy as np
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from codes.lattice_core import SIGMA3, CoinField, SpinorField, Trajectory, evolve, onshell_partner
from codes.observables import energy_density, momentum_current, momentum_density
from codes.extended_action import CoordinateField, coordinate_gradients, sigma_terms
from codes.lorentz_covariance import (
    FrameError,
    FrameSpec,
    clifford_check,
    covariant_action,
    dirac_lagrangian,
    dirac_lagrangian_spin_basis,
    frame_invariance_report,
    solt_transform,
    spin_frame_of,
    stress_energy_grid,
    stress_energy_transform,
    two_bein_change,
)


def _onshell(n_sites=16, steps=6, seed=0, coin=None):
    rng = np.random.default_rng(seed)
    coin = coin or CoinField.haar(n_sites, rng)
    phi = evolve(SpinorField.random(n_sites, rng), coin, steps)
    return phi, onshell_partner(phi, coin), coin


def _sampled_fields(nt=40, nx=40, h=0.05):
    t = np.arange(nt)[:, None] * h
    x = np.arange(nx)[None, :] * h
    minus = np.exp(-((x - 1.0) ** 2) - 0.5 * (t - 1.0) ** 2) * np.exp(0.7j * x)
    plus = np.cos(2.0 * x - t) + 0.3j * np.sin(x + t)
    return np.stack([minus, plus]), h


class TestSpinFrame:
    def test_degenerate_coin(self):
        sf = spin_frame_of(SIGMA3)
        np.testing.assert_allclose(sf.basis_matrix, np.eye(2))
        np.testing.assert_allclose(sf.sigma_bar3, SIGMA3)
        assert sf.alpha_L == 0.0 and sf.alpha_R == 0.0

    def test_identity_coin(self):
        sf = spin_frame_of(np.eye(2))
        np.testing.assert_allclose(sf.basis_matrix, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(sf.sigma_bar3, SIGMA3, atol=1e-15)
        assert abs(sf.alpha_L) < 1e-15
        assert abs(sf.alpha_R - np.pi) < 1e-15

    def test_random_coin_eigenbasis(self):
        coin = CoinField.haar(1, np.random.default_rng(3)).matrix
        sf = spin_frame_of(coin, lam=1.5)
        B = sf.basis_matrix
        np.testing.assert_allclose(B.conj().T @ B, np.eye(2), atol=1e-13)
        diag = B.conj().T @ coin @ SIGMA3 @ B
        expected = np.diag(np.exp(1j * np.array([sf.alpha_L, sf.alpha_R])))
        np.testing.assert_allclose(diag, expected, atol=1e-12)
        np.testing.assert_allclose(sf.sigma_bar3 @ sf.sigma_bar3, np.eye(2), atol=1e-13)
        assert -np.pi < sf.alpha_L <= sf.alpha_R <= np.pi

    def test_frame_components_round_trip(self):
        rng = np.random.default_rng(4)
        sf = spin_frame_of(CoinField.haar(1, rng).matrix, lam=0.7)
        v = SpinorField.random(8, rng).amplitudes
        np.testing.assert_allclose(sf.from_frame(sf.to_frame(v)), v, atol=1e-14)

    def test_invalid_lambda(self):
        with pytest.raises(FrameError):
            spin_frame_of(np.eye(2), lam=0.0)


class TestSpinBasis:
    def test_solt(self):
        out = solt_transform([[1, 2], [3, 4]], 2.0)
        np.testing.assert_allclose(out, [[4, 2], [3, 1]])
        with pytest.raises(FrameError):
            solt_transform(np.eye(2), -1.0)

    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 3.7])
    def test_clifford_preserved(self, lam):
        assert clifford_check(lam) < 1e-13


class TestFrameSpec:
    def test_lambda_from_rapidity(self):
        frame = FrameSpec(0.5)
        assert abs(frame.lam ** 2 - np.exp(0.5)) < 1e-15
        assert FrameSpec.identity().lam == 1.0

    def test_inconsistent_lambda(self):
        with pytest.raises(FrameError):
            FrameSpec(0.5, lam=2.0)
        with pytest.raises(FrameError):
            FrameSpec.from_lambda(-1.0)

    def test_from_lambda(self):
        frame = FrameSpec.from_lambda(2.0)
        assert abs(frame.rapidity - 2.0 * np.log(2.0)) < 1e-15

    def test_two_bein_is_inverse_jacobian(self):
        frame = FrameSpec(0.8)
        np.testing.assert_allclose(frame.two_bein @ frame.coordinate_matrix, np.eye(2),
                                   atol=1e-13)
        ch, sh = np.cosh(0.8), np.sinh(0.8)
        np.testing.assert_allclose(frame.two_bein, [[ch, -sh], [-sh, ch]], atol=1e-13)

    def test_projector_annihilates_time_direction(self):
        frame = FrameSpec(-0.6)
        np.testing.assert_allclose(frame.projector() @ frame.U_upper, 0.0, atol=1e-13)

    def test_two_bein_change(self):
        e = np.array([[1.0, 0.2], [0.1, 0.9]])
        np.testing.assert_allclose(two_bein_change(e, np.eye(2)), e)
        frame = FrameSpec(0.4)
        np.testing.assert_allclose(two_bein_change(np.eye(2), frame.coordinate_matrix),
                                   frame.two_bein, atol=1e-13)
        n1, n2 = FrameSpec(0.3).coordinate_matrix, np.array([[2.0, 0.5], [0.0, 1.0]])
        np.testing.assert_allclose(two_bein_change(two_bein_change(e, n2), n1),
                                   two_bein_change(e, n2 @ n1), atol=1e-13)
        with pytest.raises(FrameError):
            two_bein_change(e, np.zeros((2, 2)))


class TestCovariantAction:
    def test_identity_frame_matches_sigma_offshell(self):
        rng = np.random.default_rng(5)
        coin = CoinField.haar(12, rng)
        phi = Trajectory.from_slices([SpinorField.random(12, rng) for _ in range(5)])
        psi = Trajectory.from_slices([SpinorField.random(12, rng) for _ in range(5)])
        covariant = covariant_action(phi, psi, coin, FrameSpec.identity()).sigma_L
        grid = sigma_terms(phi, psi, coin, CoordinateField.grid(5, 12)).sigma
        assert abs(covariant - grid) < 1e-12

    @pytest.mark.parametrize("rapidity", [1.0, -1.0, 0.5, -0.5, 0.1])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_boosted_frame_invariance(self, rapidity, seed):
        phi, psi, coin = _onshell(seed=seed)
        reference = covariant_action(phi, psi, coin, FrameSpec.identity()).sigma_L
        boosted = covariant_action(phi, psi, coin, FrameSpec(rapidity)).sigma_L
        assert abs(boosted - reference) < 1e-10, f"rapidity {rapidity}, seed {seed}"

    def test_volume_element(self):
        for phi in (0.1, 0.5, 1.0, -0.7):
            delta = coordinate_gradients(FrameSpec(phi).coordinates(2, 16)).delta
            assert np.max(np.abs(delta - 1.0)) < 1e-13, f"volume changes at rapidity {phi}"

    def test_terms_listed(self):
        phi, psi, coin = _onshell(steps=4)
        terms = covariant_action(phi, psi, coin, FrameSpec(0.3)).as_dict()
        assert set(terms) == {"Kbar", "dKj", "dKp", "Ksupp", "M1", "M2", "M3", "Sigma_L"}

    def test_invariance_report(self):
        phi, psi, coin = _onshell(seed=2)
        report = frame_invariance_report(phi, psi, coin, [0.1, 0.5, -0.7])
        assert report["passed"], report
        assert len(report["frames"]) == 3
        row = report["frames"][1]
        assert row["rapidity"] == 0.5
        assert abs(row["lambda"] ** 2 - np.exp(0.5)) < 1e-14
        assert row["volume_error"] < 1e-13


class TestStressEnergy:
    def test_grid_components(self):
        phi, _, coin = _onshell(seed=6)
        T = stress_energy_grid(phi, coin)
        for j in (0, 3):
            state = phi[j]
            np.testing.assert_allclose(T.component("j", "j")[j],
                                       energy_density(state, coin).values, atol=1e-14)
            np.testing.assert_allclose(T.component("p", "j")[j],
                                       momentum_density(state).values, atol=1e-14)
            np.testing.assert_allclose(T.component("p", "p")[j],
                                       momentum_current(state).values, atol=1e-14)

    def test_zero_state(self):
        coin = CoinField.named("hadamard", 8)
        T = stress_energy_grid(Trajectory(np.zeros((3, 2, 8))), coin)
        assert np.all(T.tensor == 0)

    def test_identity_transform(self):
        phi, _, coin = _onshell(seed=7)
        T = stress_energy_grid(phi, coin)
        boosted = stress_energy_transform(T, FrameSpec.identity())
        np.testing.assert_allclose(boosted.tensor, T.tensor, atol=1e-15)
        assert boosted.lower_labels == ("0", "1")

    def test_boosted_energy(self):
        phi, _, coin = _onshell(seed=8)
        T = stress_energy_grid(phi, coin)
        rapidity = 0.6
        H, P = T.component("j", "j"), T.component("p", "j")
        np.testing.assert_allclose(
            stress_energy_transform(T, FrameSpec(rapidity)).component("0", "j"),
            np.cosh(rapidity) * H - np.sinh(rapidity) * P, atol=1e-13)
        np.testing.assert_allclose(
            stress_energy_transform(T, FrameSpec(-rapidity)).component("0", "j"),
            np.cosh(rapidity) * H + np.sinh(rapidity) * P, atol=1e-13)

    def test_boosted_conservation(self):
        phi, _, coin = _onshell(n_sites=32, steps=12, seed=9)
        boosted = stress_energy_transform(stress_energy_grid(phi, coin), FrameSpec(1.0))
        residuals = boosted.conservation_residuals()
        assert set(residuals) == {"0", "1"}
        assert max(residuals.values()) < 1e-12

    def test_transform_needs_grid_frame(self):
        phi, _, coin = _onshell(seed=10)
        boosted = stress_energy_transform(stress_energy_grid(phi, coin), FrameSpec(0.2))
        with pytest.raises(FrameError):
            stress_energy_transform(boosted, FrameSpec(0.2))

    def test_inhomogeneous_coin(self):
        rng = np.random.default_rng(11)
        coin = CoinField.haar_field(8, rng)
        phi = evolve(SpinorField.random(8, rng), coin, 3)
        with pytest.raises(FrameError):
            stress_energy_grid(phi, coin)


class TestDiracLagrangian:
    def test_massless_right_mover(self):
        h, n = 0.1, 48
        t = np.arange(n)[:, None] * h
        x = np.arange(n)[None, :] * h
        plus = np.exp(-((x - t - 2.0) ** 2)) * np.exp(1.5j * (x - t))
        fields = np.stack([np.zeros_like(plus), plus])
        L = dirac_lagrangian(fields, 0.0, FrameSpec.identity(), h, h)
        assert np.max(np.abs(L[1:-1, 1:-1])) < 1e-10

    @pytest.mark.parametrize("lam", [0.5, 2.0])
    def test_frame_equality(self, lam):
        fields, h = _sampled_fields()
        grid = dirac_lagrangian(fields, 0.8, FrameSpec.identity(), h, h)
        framed = dirac_lagrangian(fields, 0.8, FrameSpec.from_lambda(lam), h, h)
        np.testing.assert_allclose(framed, grid, atol=1e-11)

    def test_spin_basis_form(self):
        fields, h = _sampled_fields()
        grid = dirac_lagrangian(fields, 1.2, FrameSpec.identity(), h, h)
        np.testing.assert_allclose(dirac_lagrangian_spin_basis(fields, 1.2, 2.0, h, h), grid,
                                   atol=1e-11)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
