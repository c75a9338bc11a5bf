"""Tools for charge, energy and momentum conservation diagnostics."""

from smolagents import tool
from mcp_utils.session import get_session


@tool
def check_conservation(trajectory: str, coin: str, tolerance: float = 1e-12) -> str:
    """
    Local and global conservation report for a walk trajectory.

    Charge is checked for every coin. Energy and momentum drift are checked for
    homogeneous coins. For site-dependent, time-independent coins the energy residual is
    reported under inhomogeneous_energy without a check, as is the momentum local
    balance. The per-site charge residual is stored in the session for plotting.

    Args:
        trajectory: dataset_name from evolve_walk()
        coin: dataset_name of the coin used for the trajectory
        tolerance: Pass threshold for the asserted residuals

    Returns:
        JSON with checks [(name, value, tol, passed)], drifts, momentum_local_balance and
        residual_dataset (per-site charge residual of shape (J, N))
    """
    from codes.export import dumps
    from codes.observables import charge_residual_field, conservation_report

    session = get_session()
    traj, coin_field = session.get(trajectory), session.get(coin)
    report = conservation_report(traj, coin_field, tolerance)
    residual_name, _ = session.add(charge_residual_field(traj), parent=trajectory,
                                   transform="charge_residual")
    report["residual_dataset"] = residual_name
    return dumps(report)


@tool
def compute_totals(trajectory: str, coin: str) -> str:
    """
    Per-slice totals of energy H, momentum P and charge Q.

    Args:
        trajectory: dataset_name from evolve_walk()
        coin: dataset_name of the coin used for the trajectory

    Returns:
        JSON with dataset_name of a dict {'H', 'P', 'Q'} of arrays (H and P complex) and
        the max drift of each total
    """
    from codes.export import dumps
    from codes.observables import totals

    session = get_session()
    tot = totals(session.get(trajectory), session.get(coin))
    name, _ = session.add({"H": tot.H, "P": tot.P, "Q": tot.Q}, parent=trajectory,
                          transform="totals")
    return dumps({"dataset_name": name, "drift": tot.drift()})


@tool
def polar_form(state: str) -> str:
    """
    Moduli and phases (rho_minus, rho_plus, mu, delta) of a spinor slice, with the charge
    density and current rho_minus^2 + rho_plus^2 and rho_plus^2 - rho_minus^2.

    Args:
        state: dataset_name of a SpinorField

    Returns:
        JSON with dataset_name of a dict of per-site arrays
    """
    from codes.export import dumps
    from codes.observables import polar_currents, polar_decomposition

    session = get_session()
    polar = polar_decomposition(session.get(state))
    density, current = polar_currents(polar)
    result = {
        "rho_minus": polar.rho_minus,
        "rho_plus": polar.rho_plus,
        "mu": polar.mu,
        "delta": polar.delta,
        "charge_density": density.values,
        "charge_current": current.values,
    }
    name, _ = session.add(result, parent=state, transform="polar_form")
    return dumps({"dataset_name": name, "keys": list(result)})
