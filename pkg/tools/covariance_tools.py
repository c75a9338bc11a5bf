"""Tools for the extended action and its Lorentz-frame evaluation."""

from smolagents import tool
from mcp_utils.session import get_session


@tool
def extended_action_terms(trajectory: str, coin: str) -> str:
    """
    Extended-action terms on grid coordinates for an on-shell trajectory Phi, with
    Psi = U Phi, and the on-shell identification of the coordinate-gradient derivatives
    with minus the energy-momentum densities.

    Args:
        trajectory: dataset_name from evolve_walk() (at least 3 slices, homogeneous coin)
        coin: dataset_name of the coin used for the trajectory

    Returns:
        JSON with term totals (M1, M2, M3, Kj, Kp, Ksupp, Sigma), the alternate action
        over the same slices and the on-shell check report
    """
    from codes.export import dumps
    from codes.extended_action import grid_trajectories, onshell_energy_momentum_check
    from codes.extended_action import sigma_terms
    from codes.lattice_core import alternate_action

    session = get_session()
    coin_field = session.get(coin)
    phi, psi, X = grid_trajectories(session.get(trajectory), coin_field)
    return dumps({
        "terms": sigma_terms(phi, psi, coin_field, X).as_dict(),
        "alternate_action": alternate_action(phi, psi, coin_field, first_slice=1),
        "onshell": onshell_energy_momentum_check(phi, coin_field),
    })


@tool
def frame_invariance(trajectory: str, coin: str, rapidities: list) -> str:
    """
    Evaluate the covariant action Sigma_L in boosted frames and compare with the grid frame.

    Args:
        trajectory: dataset_name from evolve_walk() (at least 3 slices, homogeneous coin)
        coin: dataset_name of the coin used for the trajectory
        rapidities: List of rapidities phi; each frame uses lambda = exp(phi / 2)

    Returns:
        JSON with one row per frame (Sigma_L, difference to the grid frame, volume error)
        and the overall pass flag at 1e-10
    """
    from codes.export import dumps
    from codes.lattice_core import onshell_partner
    from codes.lorentz_covariance import frame_invariance_report

    session = get_session()
    traj, coin_field = session.get(trajectory), session.get(coin)
    psi = onshell_partner(traj, coin_field)
    return dumps(frame_invariance_report(traj, psi, coin_field, [float(r) for r in rapidities]))


@tool
def boosted_stress_energy(trajectory: str, coin: str, rapidity: float) -> str:
    """
    Stress-energy tensor of a trajectory expressed in a boosted frame.

    Args:
        trajectory: dataset_name from evolve_walk()
        coin: dataset_name of the homogeneous coin used for the trajectory
        rapidity: Boost rapidity phi

    Returns:
        JSON with dataset_name of a dict {'T0j', 'T0p', 'T1j', 'T1p'} of (J+1, N) arrays
        and the conservation residual of each row
    """
    from codes.export import dumps
    from codes.lorentz_covariance import FrameSpec, stress_energy_grid, stress_energy_transform

    session = get_session()
    grid = stress_energy_grid(session.get(trajectory), session.get(coin))
    boosted = stress_energy_transform(grid, FrameSpec(rapidity))
    result = {f"T{lo}{up}": boosted.component(lo, up) for lo in "01" for up in "jp"}
    name, _ = session.add(result, parent=trajectory, transform=f"stress_energy({rapidity})")
    return dumps({"dataset_name": name, "residuals": boosted.conservation_residuals()})
