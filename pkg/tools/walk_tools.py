"""Tools for building coins and states, evolving walks and evaluating the action."""

from smolagents import tool
from mcp_utils.session import get_session


def _spec(**values):
    from codes.run_config import RunSpec, validate

    spec = RunSpec(experiment="simulate", **values)
    validate(spec)
    return spec


@tool
def make_coin(kind: str, n_sites: int, steps: int = 1) -> str:
    """
    Build a coin field and store it in the session.

    Args:
        kind: One of 'hadamard', 'identity', 'swap', 'sigma3', 'angles:theta,xi,zeta,alpha',
            'random:<seed>' (one Haar coin for all sites), 'random-field:<seed>' (a Haar
            coin per site) or 'random-spacetime:<seed>' (a Haar coin per site and step,
            cycled over `steps` steps)
        n_sites: Number of lattice sites (even, at least 4)
        steps: Number of distinct time steps for 'random-spacetime'

    Returns:
        JSON with dataset_name of the CoinField and its homogeneity flags
    """
    from codes.export import dumps
    from codes.run_config import build_coin

    coin = build_coin(_spec(n_sites=n_sites, steps=steps, coin=kind))
    name, _ = get_session().add(coin)
    return dumps({
        "dataset_name": name,
        "n_sites": coin.n_sites,
        "site_dependent": coin.site_dependent,
        "time_dependent": coin.time_dependent,
    })


@tool
def make_initial_state(kind: str, n_sites: int) -> str:
    """
    Build a normalized initial spinor state and store it in the session.

    Args:
        kind: One of 'random:<seed>', 'delta:<p>[:minus|plus]',
            'plane_wave:<k_index>[:minus|plus]' (k = 2 pi k_index / n_sites) or
            'gaussian:<center>,<width>[,<k_index>]'
        n_sites: Number of lattice sites (even, at least 4)

    Returns:
        JSON with dataset_name of the SpinorField and its squared norm
    """
    from codes.export import dumps
    from codes.run_config import build_state

    state = build_state(_spec(n_sites=n_sites, initial_state=kind))
    name, _ = get_session().add(state)
    return dumps({"dataset_name": name, "norm_squared": state.norm_squared()})


@tool
def evolve_walk(state: str, coin: str, steps: int) -> str:
    """
    Evolve a state with Psi_{j+1} = W T Psi_j.

    Args:
        state: dataset_name from make_initial_state()
        coin: dataset_name from make_coin()
        steps: Number of steps J (at least 1)

    Returns:
        JSON with dataset_name of the Trajectory (J+1 slices)
    """
    from codes.export import dumps
    from codes.lattice_core import evolve

    session = get_session()
    traj = evolve(session.get(state), session.get(coin), steps)
    name, info = session.add(traj, parent=state, transform=f"evolve({coin}, {steps})")
    return dumps({"dataset_name": name, "slices": info.length})


@tool
def compute_action(trajectory: str, coin: str, fd_step: float = 1e-5) -> str:
    """
    Evaluate the walk action S and its finite-difference stationarity residual.

    Args:
        trajectory: dataset_name from evolve_walk()
        coin: dataset_name of the coin used for the trajectory
        fd_step: Finite-difference step in [1e-7, 1e-3]

    Returns:
        JSON with action_S (re/im) and stationarity_residual (null for 2-slice runs)
    """
    from codes.export import dumps
    from codes.lattice_core import action_S, stationarity_residual

    session = get_session()
    traj, coin_field = session.get(trajectory), session.get(coin)
    residual = None
    if len(traj) >= 3:
        residual = stationarity_residual(traj, coin_field, fd_step)
    return dumps({"action_S": action_S(traj, coin_field), "stationarity_residual": residual})
