"""Test the MCP tools through the shared session."""

import json
import pytest
import sys
import numpy as np
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from mcp_utils import Session, get_session, reset_session
from codes.run_config import ConfigError
from tools import (
    action_scaling,
    boosted_stress_energy,
    check_conservation,
    clear_session,
    compute_action,
    compute_statistics,
    compute_totals,
    continuum_convergence,
    delete_dataset,
    describe_dataset,
    evolve_walk,
    extended_action_terms,
    frame_invariance,
    list_datasets,
    make_coin,
    make_initial_state,
    plot_convergence,
    plot_mechanics_energy,
    plot_residual_map,
    polar_form,
    preview_dataset,
    run_experiment,
    run_mechanics,
    walk_dispersion,
)

K = np.pi / 8


@pytest.fixture(autouse=True)
def fresh_session(tmp_path, monkeypatch):
    reset_session()
    monkeypatch.setenv("QWALK_OUTPUT_DIR", str(tmp_path))
    yield
    reset_session()


def _walk(coin_kind="hadamard", n_sites=16, steps=6):
    coin = json.loads(make_coin(kind=coin_kind, n_sites=n_sites, steps=steps))["dataset_name"]
    state = json.loads(make_initial_state(kind="random:1", n_sites=n_sites))["dataset_name"]
    traj = json.loads(evolve_walk(state=state, coin=coin, steps=steps))
    assert traj["slices"] == steps + 1
    return state, coin, traj["dataset_name"]


class TestWalkTools:
    def test_make_coin(self):
        result = json.loads(make_coin(kind="random-field:4", n_sites=8))
        assert result["site_dependent"] and not result["time_dependent"]
        coin = get_session().get(result["dataset_name"])
        assert coin.matrices.shape == (1, 8, 2, 2)

    def test_invalid_inputs(self):
        with pytest.raises(ConfigError):
            make_coin(kind="walrus", n_sites=8)
        with pytest.raises(ConfigError):
            make_initial_state(kind="delta:2", n_sites=5)

    def test_state_norm(self):
        result = json.loads(make_initial_state(kind="gaussian:8,2", n_sites=16))
        assert abs(result["norm_squared"] - 1.0) < 1e-14

    def test_action_on_shell(self):
        _, coin, traj = _walk()
        result = json.loads(compute_action(trajectory=traj, coin=coin))
        assert abs(result["action_S"]["re"]) < 1e-12
        assert abs(result["action_S"]["im"]) < 1e-12
        assert result["stationarity_residual"] < 1e-7

    def test_two_slice_action(self):
        _, coin, traj = _walk(steps=1)
        assert json.loads(compute_action(trajectory=traj, coin=coin))[
            "stationarity_residual"] is None


class TestConservationTools:
    def test_check_conservation(self):
        _, coin, traj = _walk()
        report = json.loads(check_conservation(trajectory=traj, coin=coin))
        names = [check[0] for check in report["checks"]]
        assert names == ["charge_residual", "charge_drift", "energy_residual", "energy_drift",
                         "momentum_drift"]
        assert all(check[3] for check in report["checks"]), report["checks"]
        residual = get_session().get(report["residual_dataset"])
        assert residual.shape == (6, 16)

    def test_totals(self):
        _, coin, traj = _walk()
        result = json.loads(compute_totals(trajectory=traj, coin=coin))
        assert result["drift"]["Q"] < 1e-12
        stored = get_session().get(result["dataset_name"])
        assert set(stored) == {"H", "P", "Q"} and len(stored["Q"]) == 7

    def test_polar_form(self):
        state, _, _ = _walk()
        result = json.loads(polar_form(state=state))
        assert "charge_density" in result["keys"]
        polar = get_session().get(result["dataset_name"])
        np.testing.assert_allclose(polar["charge_density"],
                                   polar["rho_minus"] ** 2 + polar["rho_plus"] ** 2)


class TestCovarianceTools:
    def test_extended_action_terms(self):
        _, coin, traj = _walk()
        result = json.loads(extended_action_terms(trajectory=traj, coin=coin))
        sigma, alternate = result["terms"]["Sigma"], result["alternate_action"]
        assert abs(sigma["re"] - alternate["re"]) < 1e-12
        assert abs(sigma["im"] - alternate["im"]) < 1e-12
        assert result["onshell"]["passed"]

    def test_frame_invariance(self):
        _, coin, traj = _walk()
        result = json.loads(frame_invariance(trajectory=traj, coin=coin,
                                             rapidities=[0.1, 0.5]))
        assert result["passed"]
        assert [row["rapidity"] for row in result["frames"]] == [0.1, 0.5]

    def test_boosted_stress_energy(self):
        _, coin, traj = _walk()
        result = json.loads(boosted_stress_energy(trajectory=traj, coin=coin, rapidity=0.5))
        assert max(result["residuals"].values()) < 1e-12
        stored = get_session().get(result["dataset_name"])
        assert stored["T0j"].shape == (7, 16)

    def test_inhomogeneous_coin_rejected(self):
        _, coin, traj = _walk(coin_kind="random-field:2")
        with pytest.raises(ValueError):
            extended_action_terms(trajectory=traj, coin=coin)


class TestContinuumTools:
    def test_convergence(self):
        result = json.loads(continuum_convergence(mass=1.0, wavenumber=K, t_final=2.0,
                                                  epsilon_list=[0.1, 0.05, 0.025]))
        assert result["dataset_name"] == "convergence"
        assert result["order"] >= 0.9
        assert len(result["rows"]) == 3

    def test_dispersion(self):
        result = json.loads(walk_dispersion(mass=1.0, epsilon=0.1, k_values=[0.0, 1.0, 5.0]))
        phases = np.array(result["eigenphases"])
        np.testing.assert_allclose(np.cos(phases[:, 1]),
                                   np.cos(0.1) * np.cos(0.1 * np.array([0.0, 1.0, 5.0])),
                                   atol=1e-12)

    def test_action_scaling(self):
        result = json.loads(action_scaling(mass=1.0, wavenumber=K,
                                           epsilon_list=[0.1, 0.05, 0.025]))
        assert result["slopes"]["M2"] is None
        assert set(result["excess_over_leading"]) == {"M2", "M3", "Ksupp", "dKj", "dKp"}


class TestMechanicsTools:
    def test_symplectic(self):
        result = json.loads(run_mechanics(potential="harmonic", q0=0.8, p0=-0.6, steps=500))
        assert result["scheme"] == "symplectic"
        assert result["drift_formula_error"] < 1e-12
        assert result["dataset_name"] == "symplectic_harmonic"

    def test_extended(self):
        result = json.loads(run_mechanics(potential="harmonic", q0=0.8, p0=-0.6, steps=50,
                                          scheme="extended", v0=0.01))
        assert result["max_delta_Pi"] < 1e-10

    def test_unknown_scheme(self):
        with pytest.raises(ValueError, match="scheme must be"):
            run_mechanics(potential="free", q0=0.0, p0=1.0, steps=5, scheme="leapfrog")


class TestExperimentTool:
    def test_shipped_config(self, tmp_path):
        result = json.loads(run_experiment(config="mechanics.conf",
                                           overrides=["mech_steps=100", "extended_steps=10"]))
        assert result["exit_code"] == 0, result["lines"]
        assert result["output_path"] == str(tmp_path / "mechanics")
        assert any(line.startswith("PASS energy_drift_identity") for line in result["lines"])
        assert result["report"]["experiment"] == "mechanics"
        assert (tmp_path / "mechanics" / "mechanics_extended.csv").exists()

    def test_missing_config(self):
        with pytest.raises(FileNotFoundError):
            run_experiment(config="absent.conf")


class TestPlotTools:
    def test_plot_convergence(self, tmp_path):
        continuum_convergence(mass=1.0, wavenumber=K, t_final=1.0,
                              epsilon_list=[0.1, 0.05, 0.025])
        message = plot_convergence(table="convergence", save_path="conv")
        assert message == f"Plot saved to: {tmp_path / 'conv.png'}"
        assert (tmp_path / "conv.png").exists()

    def test_plot_residual_map(self, tmp_path):
        _, coin, traj = _walk()
        report = json.loads(check_conservation(trajectory=traj, coin=coin))
        plot_residual_map(residual=report["residual_dataset"], title="charge")
        assert (tmp_path / "residual_map.png").exists()

    def test_plot_mechanics_energy(self, tmp_path):
        run_mechanics(potential="harmonic", q0=0.8, p0=-0.6, steps=100)
        run_mechanics(potential="harmonic", q0=0.8, p0=-0.6, steps=50, scheme="extended",
                      v0=0.01)
        plot_mechanics_energy(symplectic="symplectic_harmonic", potential="harmonic",
                              extended="extended_harmonic", save_path="energy.png")
        assert (tmp_path / "energy.png").exists()


class TestSessionStore:
    def test_names_follow_kind_and_lineage(self):
        session = Session()
        assert session.add(np.zeros((3, 4)))[0] == "field"
        assert session.add(np.zeros(2))[0] == "field_2"
        name, info = session.add({"H": [1.0, 1.0]}, parent="field", transform="totals(x)")
        assert name == "field_totals"
        assert info.kind == "table" and info.length == 1 and info.labels == ["H"]

    def test_explicit_name_replaces(self):
        session = Session()
        session.add(np.zeros(2), name="x")
        session.add(np.ones(3), name="x")
        assert len(session.entries()) == 1
        assert session.get("x").shape == (3,)

    def test_eviction_keeps_parents(self):
        session = Session(capacity=2)
        session.add(np.zeros(2))
        session.add(np.zeros(2), parent="field", transform="t")
        session.add(np.zeros(2))
        names = [e.name for e in session.entries()]
        assert names == ["field", "field_2"], f"unexpected survivors {names}"

    def test_missing_name(self):
        with pytest.raises(KeyError, match="not found"):
            Session().info("nothing")

    def test_walk_objects_classified(self):
        state, coin, traj = _walk()
        session = get_session()
        assert session.info(traj).kind == "trajectory"
        assert session.info(traj).length == 7
        assert session.info(coin).kind == "coin" and session.info(coin).length == 1
        assert session.info(state).kind == "state"
        assert session.info(traj).parent == state


class TestSessionTools:
    def test_list_and_describe(self):
        _, _, traj = _walk()
        listing = list_datasets()
        assert listing["count"] == 3
        info = describe_dataset(name=traj)
        assert info["type"] == "Trajectory"
        assert info["shapes"] == {"slices": [7, 2, 16]}
        assert info["parent"] is not None

    def test_preview_complex(self):
        state, _, _ = _walk()
        preview = preview_dataset(name=state, n=1)
        values = preview["preview"]["amplitudes"]
        assert set(values) == {"re", "im"}
        assert len(values["re"]) == 1 and len(values["re"][0]) == 16

    def test_statistics(self):
        _, coin, _ = _walk()
        stats = compute_statistics(name=coin)["stats"]["matrices"]
        assert abs(stats["max"] - 1.0 / np.sqrt(2.0)) < 1e-15
        assert stats["count"] == 1 * 16 * 4

    def test_delete_and_clear(self):
        state, _, _ = _walk()
        assert delete_dataset(name=state) == f"Deleted '{state}'"
        assert delete_dataset(name=state) == f"Dataset '{state}' not found"
        assert clear_session() == "Cleared 2 datasets"
        assert list_datasets()["count"] == 0


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
