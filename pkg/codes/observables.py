"""
Charge, energy and momentum densities of the walk, their currents, slice totals, and the
local discrete conservation residuals.

Densities are complex quadratic forms in the state. The energy forms use the walk
adjoint U^dagger and are only conserved for coins that do not change in time.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .lattice_core import (
    SIGMA3,
    SpinorField,
    Trajectory,
    avg_c,
    check_sites,
    grad_p,
    grad_p_doubled,
    translate,
    walk_dagger,
)

logger = logging.getLogger(__name__)


class InhomogeneousCoinError(ValueError):
    """Energy quantities requested for a coin outside their validity domain."""


class TrajectoryTooShortError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Per-site complex (or real) values, site axis last."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if not np.all(np.isfinite(vals)):
            raise ValueError("scalar field values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def n_sites(self):
        return self.values.shape[-1]

    def total(self):
        return self.values.sum(axis=-1)


@dataclass(frozen=True, eq=False)
class PolarDecomposition:
    """psi_minus = rho_minus e^{i(mu - delta)}, psi_plus = rho_plus e^{i(mu + delta)}."""

    rho_minus: np.ndarray
    rho_plus: np.ndarray
    mu: np.ndarray
    delta: np.ndarray

    def reconstruct(self):
        return SpinorField(np.stack([
            self.rho_minus * np.exp(1j * (self.mu - self.delta)),
            self.rho_plus * np.exp(1j * (self.mu + self.delta)),
        ]))


@dataclass(frozen=True, eq=False)
class EnergySplit:
    """H = Q + h and J_H = J_Q + J_h, site by site."""

    charge: np.ndarray
    h: np.ndarray
    charge_current: np.ndarray
    h_current: np.ndarray

    @property
    def energy(self):
        return self.charge + self.h

    @property
    def energy_current(self):
        return self.charge_current + self.h_current


@dataclass(frozen=True, eq=False)
class Totals:
    """Per-slice sums of energy H, momentum P and charge Q."""

    H: np.ndarray
    P: np.ndarray
    Q: np.ndarray

    def drift(self):
        return {
            "H": float(np.max(np.abs(self.H - self.H[0]))),
            "P": float(np.max(np.abs(self.P - self.P[0]))),
            "Q": float(np.max(np.abs(self.Q - self.Q[0]))),
        }

    def rows(self):
        return list(zip(self.H, self.P, self.Q))


def _wrap_phase(x):
    return np.where(x <= -np.pi, x + 2.0 * np.pi, x)


def polar_decomposition(state):
    """
    Moduli and half-sum/half-difference phases of a spinor slice.

    Zero-modulus components get phase 0.

    Args:
        state: SpinorField

    Returns:
        PolarDecomposition with mu, delta in (-pi, pi]
    """
    amps = state.amplitudes
    rho = np.abs(amps)
    phase = _wrap_phase(np.where(rho > 0.0, np.angle(amps), 0.0))
    return PolarDecomposition(
        rho_minus=rho[0],
        rho_plus=rho[1],
        mu=0.5 * (phase[0] + phase[1]),
        delta=0.5 * (phase[1] - phase[0]),
    )


def charge_density(state):
    return ScalarField(np.sum(np.abs(state.amplitudes) ** 2, axis=0))


def polar_currents(polar):
    """
    Charge density and current from the polar form.

    Args:
        polar: PolarDecomposition

    Returns:
        (J_j, J_p): ScalarFields rho_minus^2 + rho_plus^2 and -rho_minus^2 + rho_plus^2
    """
    rm2, rp2 = polar.rho_minus ** 2, polar.rho_plus ** 2
    return ScalarField(rm2 + rp2), ScalarField(rp2 - rm2)


def _charge_current(arr):
    return np.abs(arr[..., 1, :]) ** 2 - np.abs(arr[..., 0, :]) ** 2


def charge_conservation_residual(traj):
    """
    Largest local charge balance violation over all time transitions.

    Evaluates Q_{j+1,p} - (Q_{j,p+1} + Q_{j,p-1})/2 + ((J_p)_{j,p+1} - (J_p)_{j,p-1})/2,
    which vanishes for every unitary coin field, site and time dependent included.

    Args:
        traj: Trajectory with at least 2 slices

    Returns:
        float: max absolute residual
    """
    if len(traj) < 2:
        raise TrajectoryTooShortError("charge residual needs at least 2 slices")
    return float(np.max(np.abs(charge_residual_field(traj))))


def charge_residual_field(traj):
    s = traj.slices
    q = np.sum(np.abs(s) ** 2, axis=1)
    jp = _charge_current(s)
    return q[1:] - avg_c(q[:-1]) + 0.5 * grad_p_doubled(jp[:-1])


def _check_energy_coin(coin, allow_inhomogeneous):
    if coin.time_dependent:
        raise InhomogeneousCoinError("energy is not defined for time-dependent coins")
    if coin.site_dependent and not allow_inhomogeneous:
        raise InhomogeneousCoinError(
            "energy conservation needs a homogeneous coin; "
            "pass allow_inhomogeneous=True for site-dependent coins"
        )


def _energy_split_raw(arr, mats):
    adj = walk_dagger(arr, mats)
    conj = arr.conj()
    s3 = SIGMA3.diagonal()[:, None]
    return EnergySplit(
        charge=np.sum(np.abs(arr) ** 2, axis=-2),
        h=-np.sum(conj * adj, axis=-2),
        charge_current=-np.sum(conj * s3 * arr, axis=-2),
        h_current=np.sum(conj * s3 * adj, axis=-2),
    )


def energy_split(state, coin, allow_inhomogeneous=False):
    check_sites(state, coin)
    _check_energy_coin(coin, allow_inhomogeneous)
    return _energy_split_raw(state.amplitudes, coin.at(0))


def energy_density(state, coin, allow_inhomogeneous=False):
    """
    Energy density H_p = Psi_p^dagger ((1 - U^dagger) Psi)_p.

    Args:
        state: SpinorField
        coin: Homogeneous CoinField
        allow_inhomogeneous: Accept site-dependent, time-independent coins

    Returns:
        ScalarField of complex values

    Raises:
        InhomogeneousCoinError: If the coin is outside the accepted domain
    """
    return ScalarField(energy_split(state, coin, allow_inhomogeneous).energy)


def energy_current(state, coin, allow_inhomogeneous=False):
    """Energy current -Psi^dagger sigma3 ((1 - U^dagger) Psi), same contract as energy_density."""
    return ScalarField(energy_split(state, coin, allow_inhomogeneous).energy_current)


def _balance_field(density, current):
    return density[1:] - avg_c(density[:-1]) + grad_p(current[:-1])


def _balance(density, current):
    res = _balance_field(density, current)
    return max(float(np.max(np.abs(res.real))), float(np.max(np.abs(res.imag))))


def energy_conservation_residual(traj, coin, allow_inhomogeneous=False):
    """
    Largest violation of H_{j+1,p} - (H_{j,p+1}+H_{j,p-1})/2 + grad_p J_H over all
    transitions, real and imaginary parts taken separately.
    """
    if len(traj) < 2:
        raise TrajectoryTooShortError("energy residual needs at least 2 slices")
    check_sites(traj, coin)
    _check_energy_coin(coin, allow_inhomogeneous)
    split = _energy_split_raw(traj.slices, coin.at(0))
    return _balance(split.energy, split.energy_current)


def energy_residual_field(traj, coin, allow_inhomogeneous=False):
    """Per-site energy balance residual, shape (J, N), complex."""
    if len(traj) < 2:
        raise TrajectoryTooShortError("energy residual needs at least 2 slices")
    check_sites(traj, coin)
    _check_energy_coin(coin, allow_inhomogeneous)
    split = _energy_split_raw(traj.slices, coin.at(0))
    return _balance_field(split.energy, split.energy_current)


def _momentum_raw(arr):
    diff = translate(arr) - translate(arr, dagger=True)
    conj = arr.conj()
    s3 = SIGMA3.diagonal()[:, None]
    density = 0.5 * np.sum(conj * s3 * diff, axis=-2)
    current = -0.5 * np.sum(conj * diff, axis=-2)
    return density, current


def momentum_density(state):
    """Momentum density (1/2) Psi^dagger sigma3 (T - T^dagger) Psi; complex valued."""
    return ScalarField(_momentum_raw(state.amplitudes)[0])


def momentum_current(state):
    """Momentum current -(1/2) Psi^dagger (T - T^dagger) Psi."""
    return ScalarField(_momentum_raw(state.amplitudes)[1])


def momentum_conservation_residual(traj):
    """
    Momentum local balance with the energy stencils. Measured, not guaranteed: it vanishes
    for homogeneous coins and is reported for anything else.
    """
    if len(traj) < 2:
        raise TrajectoryTooShortError("momentum residual needs at least 2 slices")
    density, current = _momentum_raw(traj.slices)
    residual = _balance(density, current)
    logger.info("momentum local balance residual %.3e", residual)
    return residual


def totals(traj, coin):
    """
    Per-slice totals (H_j, P_j, Q_j).

    Slice j uses the coin of step j, so time-dependent coins are accepted and show
    the drift of H.

    Args:
        traj: Trajectory
        coin: CoinField

    Returns:
        Totals
    """
    check_sites(traj, coin)
    s = traj.slices
    H = np.array([_energy_split_raw(s[j], coin.at(j)).energy.sum() for j in range(len(traj))])
    P = _momentum_raw(s)[0].sum(axis=-1)
    Q = np.sum(np.abs(s) ** 2, axis=(1, 2))
    return Totals(H=H, P=P, Q=Q)


def conservation_report(traj, coin, tolerance=1e-12):
    """
    Residuals and drifts for one walk run, with PASS flags for the asserted ones.

    Energy is asserted for homogeneous coins only. For site-dependent, time-independent
    coins its residual and drift are measured and reported under
    'inhomogeneous_energy', outside the checks.

    Returns:
        dict with residual values and a 'checks' list of (name, value, tol, passed)
    """
    q0 = float(np.sum(np.abs(traj.slices[0]) ** 2))
    drift = totals(traj, coin).drift()
    checks = [("charge_residual", charge_conservation_residual(traj), tolerance),
              ("charge_drift", drift["Q"] / q0, tolerance)]
    report = {
        "momentum_local_balance": momentum_conservation_residual(traj),
        "drift": drift,
    }
    if not coin.time_dependent and not coin.site_dependent:
        checks += [("energy_residual", energy_conservation_residual(traj, coin), tolerance),
                   ("energy_drift", drift["H"] / q0, tolerance),
                   ("momentum_drift", drift["P"] / q0, tolerance)]
    elif not coin.time_dependent:
        report["inhomogeneous_energy"] = {
            "residual": energy_conservation_residual(traj, coin, allow_inhomogeneous=True),
            "drift": float(drift["H"] / q0),
        }
    report["checks"] = [(name, float(v), tol, bool(v < tol)) for name, v, tol in checks]
    return report
