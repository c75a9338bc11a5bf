"""Tools for the discrete mechanics schemes."""

from smolagents import tool
from mcp_utils.session import get_session


@tool
def run_mechanics(potential: str, q0: float, p0: float, steps: int,
                  scheme: str = "symplectic", v0: float = 1e-3,
                  solver_tol: float = 1e-12) -> str:
    """
    Run the symplectic or the extended (energy-conserving) scheme.

    Args:
        potential: 'free', 'constant', 'linear' (phi = -q) or 'harmonic' (phi = q^2/2)
        q0: Initial position
        p0: Initial momentum; p_{-1} for 'symplectic', the initial velocity u_0 for
            'extended'
        steps: Number of steps
        scheme: 'symplectic' or 'extended'
        v0: First time step of the extended scheme
        solver_tol: Newton residual tolerance of the extended scheme

    Returns:
        JSON with dataset_name of the MechTrajectory and its conservation report
        (max |delta p| and energy excursion, or max |delta Pi|)
    """
    from codes.discrete_mechanics import (
        Potential,
        cyclic_momentum_check,
        energy_drift_check,
        run_extended,
        run_symplectic,
    )
    from codes.export import dumps

    phi = Potential.named(potential)
    if scheme == "symplectic":
        traj = run_symplectic(q0, p0, phi, steps)
        report = cyclic_momentum_check(traj, phi)
        report["drift_formula_error"] = energy_drift_check(traj, phi)
    elif scheme == "extended":
        traj = run_extended(q0, p0, phi, steps, v0=v0, solver_tol=solver_tol)
        report = cyclic_momentum_check(traj)
    else:
        raise ValueError(f"scheme must be 'symplectic' or 'extended', got '{scheme}'")
    name, _ = get_session().add(traj, name=f"{scheme}_{potential}")
    report["dataset_name"] = name
    return dumps(report)
