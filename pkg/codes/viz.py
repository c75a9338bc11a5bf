"""
Visualization functions for walk residuals, continuum convergence and mechanics runs
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_convergence(table, save_path='convergence.png'):
    """
    Log-log plot of walk-versus-Dirac error against the step size.

    Args:
        table: ConvergenceTable from convergence_study()
        save_path: Path to save the figure

    Returns:
        matplotlib Figure
    """
    fig, ax = plt.subplots(figsize=(6, 5))
    eps, err = table.epsilons, np.maximum(table.errors, np.finfo(float).tiny)
    ax.loglog(eps, err, 'ko-', markerfacecolor='none', label='walk vs Dirac')

    # reference slope anchored at the coarsest step
    ref = err[0] * (eps / eps[0]) ** table.order
    ax.loglog(eps, ref, 'r--', linewidth=1.0, label=f'order {table.order:.2f}')

    ax.set_xlabel('ε', fontsize='x-large')
    ax.set_ylabel('relative L² error', fontsize='x-large')
    ax.legend(loc='upper left', fontsize='medium')
    plt.tight_layout()

    if save_path is not None:
        plt.savefig(save_path, dpi=150, bbox_inches='tight')

    return fig


def plot_residual_map(values, title='residual', save_path='residual_map.png'):
    """
    Space-time map of a per-site residual (absolute value), time upward.

    Args:
        values: Array of shape (J, N), real or complex
        title: Figure title
        save_path: Path to save the figure
    """
    magnitude = np.abs(np.asarray(values))
    fig, ax = plt.subplots(figsize=(7, 5))
    image = ax.imshow(magnitude, origin='lower', aspect='auto', cmap='viridis')
    fig.colorbar(image, ax=ax, label='|residual|')
    ax.set_xlabel('site p', fontsize='large')
    ax.set_ylabel('step j', fontsize='large')
    ax.set_title(title, fontsize='x-large')
    plt.tight_layout()

    if save_path is not None:
        plt.savefig(save_path, dpi=150, bbox_inches='tight')

    return fig


def plot_mechanics_energy(symplectic, phi, extended=None, save_path='mechanics_energy.png'):
    """
    Energy traces: H = p²/2 + φ(q) for the symplectic run and -Π for the extended run.

    Args:
        symplectic: MechTrajectory from run_symplectic()
        phi: Potential used for both runs
        extended: Optional MechTrajectory from run_extended()
        save_path: Path to save the figure
    """
    fig, ax = plt.subplots(figsize=(8, 4))
    H = symplectic.energy(phi)
    ax.plot(np.arange(len(H)), H - H[0], color='black', linewidth=1.0,
            label='symplectic  H_j - H_0')
    if extended is not None:
        ax.plot(np.arange(len(extended)), -(extended.Pi - extended.Pi[0]), color='red',
                linestyle='--', linewidth=1.5, label='extended  -(Π_j - Π_0)')
    ax.axhline(y=0, color='gray', linewidth=0.8)
    ax.set_xlabel('step j', fontsize='large')
    ax.set_ylabel('energy change', fontsize='large')
    ax.legend(loc='best', fontsize='medium')
    plt.tight_layout()

    if save_path is not None:
        plt.savefig(save_path, dpi=150, bbox_inches='tight')

    return fig
