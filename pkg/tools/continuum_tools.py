"""Tools for the continuum (Dirac) limit of the walk."""

from smolagents import tool
from mcp_utils.session import get_session


@tool
def continuum_convergence(mass: float, wavenumber: float, t_final: float,
                          epsilon_list: list) -> str:
    """
    Compare the walk with coin exp(i eps m sigma1) against the Dirac plane-wave solution.

    Args:
        mass: Mass m (non-negative)
        wavenumber: Physical wavenumber k; the periodic domain is 2 pi n / k long
        t_final: Evolution time; t_final / eps must be an integer for every eps
        epsilon_list: At least 3 step sizes in geometric progression, e.g. [0.1, 0.05, 0.025]

    Returns:
        JSON with dataset_name of the convergence table, its rows
        (epsilon, error, local_order, order) and the fitted order
    """
    from codes.continuum_limit import convergence_study
    from codes.export import dumps

    table = convergence_study(mass, wavenumber, t_final, [float(e) for e in epsilon_list])
    name, _ = get_session().add(table, name="convergence")
    return dumps({"dataset_name": name, "rows": table.rows(), "order": table.order,
                  "roundoff_limited": table.roundoff_limited})


@tool
def walk_dispersion(mass: float, epsilon: float, k_values: list) -> str:
    """
    Eigenphases of one walk step per wavenumber, with cos(theta) = cos(eps m) cos(eps k).

    Args:
        mass: Mass m
        epsilon: Step size eps
        k_values: Physical wavenumbers

    Returns:
        JSON with the sorted eigenphase pair per wavenumber and the Dirac value
        eps sqrt(k^2 + m^2)
    """
    import numpy as np

    from codes.continuum_limit import walk_eigenphases
    from codes.export import dumps

    ks = np.asarray(k_values, dtype=float)
    phases = walk_eigenphases(mass, epsilon, ks)
    return dumps({"k": ks, "eigenphases": phases, "dirac": epsilon * np.hypot(ks, mass)})


@tool
def action_scaling(mass: float, wavenumber: float, epsilon_list: list) -> str:
    """
    Scaling of the covariant action terms with eps on an exact walk eigenmode.

    Args:
        mass: Mass m
        wavenumber: Physical wavenumber k
        epsilon_list: At least 3 step sizes in geometric progression

    Returns:
        JSON with per-term magnitudes, fitted slopes and the excess slope of each extra
        term over the leading terms Kbar and M1
    """
    from codes.continuum_limit import action_term_scaling
    from codes.export import dumps

    return dumps(action_term_scaling(mass, wavenumber, [float(e) for e in epsilon_list]))
