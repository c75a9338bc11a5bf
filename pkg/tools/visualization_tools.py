from smolagents import tool
from mcp_utils.session import get_session


def _png_path(save_path, default):
    from mcp_utils import get_output_path

    if save_path is None:
        return get_output_path(default)
    if not save_path.endswith('.png'):
        save_path = save_path + '.png'
    return get_output_path(save_path)


@tool
def plot_convergence(table: str, save_path: str = None) -> str:
    """
    Log-log plot of the walk-versus-Dirac error with the fitted order.

    Args:
        table: dataset_name from continuum_convergence()
        save_path: Optional filename (e.g., 'convergence.png'). Bare filenames are saved
            in QWALK_OUTPUT_DIR (default ./qwalk_output). Default: 'convergence.png'

    Returns:
        str: Path to saved plot PNG file
    """
    import matplotlib.pyplot as plt

    from codes.viz import plot_convergence as plot_table

    final_path = _png_path(save_path, 'convergence.png')
    fig = plot_table(get_session().get(table), final_path)
    plt.close(fig)
    return f"Plot saved to: {final_path}"


@tool
def plot_residual_map(residual: str, title: str = 'residual', save_path: str = None) -> str:
    """
    Space-time map of a per-site residual.

    Args:
        residual: dataset_name of a (J, N) array, e.g. residual_dataset from
            check_conservation()
        title: Figure title
        save_path: Optional filename. Default: 'residual_map.png'

    Returns:
        str: Path to saved plot PNG file
    """
    import matplotlib.pyplot as plt

    from codes.viz import plot_residual_map as plot_map

    final_path = _png_path(save_path, 'residual_map.png')
    fig = plot_map(get_session().get(residual), title, final_path)
    plt.close(fig)
    return f"Plot saved to: {final_path}"


@tool
def plot_mechanics_energy(symplectic: str, potential: str, extended: str = None,
                          save_path: str = None) -> str:
    """
    Energy change of a symplectic run, optionally against -Pi of an extended run.

    Args:
        symplectic: dataset_name from run_mechanics(scheme='symplectic')
        potential: Potential name used for the runs
        extended: Optional dataset_name from run_mechanics(scheme='extended')
        save_path: Optional filename. Default: 'mechanics_energy.png'

    Returns:
        str: Path to saved plot PNG file
    """
    import matplotlib.pyplot as plt

    from codes.discrete_mechanics import Potential
    from codes.viz import plot_mechanics_energy as plot_energy

    session = get_session()
    final_path = _png_path(save_path, 'mechanics_energy.png')
    ext = session.get(extended) if extended else None
    fig = plot_energy(session.get(symplectic), Potential.named(potential), ext,
                      final_path)
    plt.close(fig)
    return f"Plot saved to: {final_path}"
