"""
Coordinate fields on the walk grid and the extended action built on them.

Each grid point (j, p) carries continuous coordinates X^0 (time) and X^1 (space). The
extended action multiplies the walk's mass and kinetic terms by combinations of the
coordinate gradients

    a = grad_j X^0,  b = grad_p X^0,  c = grad_j X^1,  d = grad_p X^1,  Delta = ad - bc

with grad_j X = (X_{j,p-1} + X_{j,p+1})/2 - X_{j-1,p} and grad_p X = (X_{j,p+1} - X_{j,p-1})/2,
so gradients exist for slices j >= 1. Action slices run over j = 1..J-1 and pair the
gradients at j with Phi_j, Phi_{j+1} and Psi_j.

The action is multilinear in (a, b, c, d), and its partial derivatives with respect to the
gradient values are the (minus) energy-momentum densities on shell.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .lattice_core import (
    SIGMA3,
    apply_coin,
    avg_c,
    check_sites,
    grad_p,
    onshell_partner,
    translate,
    walk,
)
from .observables import InhomogeneousCoinError, ScalarField, _energy_split_raw, _momentum_raw

logger = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-14
TERM_NAMES = ("M1", "M2", "M3", "Kj", "Kp", "Ksupp")


class DegenerateCoordinatesError(ValueError):
    """The coordinate Jacobian determinant vanishes somewhere on the grid."""


@dataclass(frozen=True, eq=False)
class CoordinateField:
    """
    X^mu_{j,p} = (M @ (j, p))^mu + offset^mu + perturbation[j, mu, p].

    The affine part carries linear-in-p coordinates exactly on the periodic lattice; only the
    perturbation is wrapped.
    """

    matrix: np.ndarray
    perturbation: np.ndarray
    offset: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        pert = np.asarray(self.perturbation, dtype=float)
        if m.shape != (2, 2):
            raise ValueError(f"affine matrix must be 2x2, got {m.shape}")
        if pert.ndim != 3 or pert.shape[1] != 2 or pert.shape[0] < 2:
            raise ValueError(f"perturbation needs shape (J+1 >= 2, 2, N), got {pert.shape}")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(pert))):
            raise ValueError("coordinates must be finite")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "perturbation", pert)
        object.__setattr__(self, "offset", np.asarray(self.offset, dtype=float))

    @classmethod
    def affine(cls, matrix, n_slices, n_sites, offset=(0.0, 0.0)):
        return cls(matrix, np.zeros((n_slices, 2, n_sites)), np.asarray(offset, dtype=float))

    @classmethod
    def grid(cls, n_slices, n_sites):
        return cls.affine(np.eye(2), n_slices, n_sites)

    def with_perturbation(self, perturbation):
        return CoordinateField(self.matrix, perturbation, self.offset)

    @property
    def n_slices(self):
        return self.perturbation.shape[0]

    @property
    def n_sites(self):
        return self.perturbation.shape[2]

    def values(self):
        """Full coordinate values, shape (J+1, 2, N)."""
        j, p = np.meshgrid(np.arange(self.n_slices), np.arange(self.n_sites), indexing="ij")
        affine = np.einsum("mq,qjp->jmp", self.matrix, np.stack([j, p]).astype(float))
        return affine + self.offset[None, :, None] + self.perturbation


@dataclass(frozen=True, eq=False)
class CoordinateGradients:
    """Gradient slots for slices j = 1..J, each of shape (J, N)."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    @property
    def delta(self):
        return self.a * self.d - self.b * self.c

    def matrix(self):
        """Per-site Jacobian [[a, b], [c, d]], rows X^0, X^1 and columns j, p."""
        return np.stack([np.stack([self.a, self.b], -1), np.stack([self.c, self.d], -1)], -2)

    def replace(self, **slots):
        values = {k: getattr(self, k) for k in "abcd"}
        values.update(slots)
        return CoordinateGradients(**values)


@dataclass(frozen=True, eq=False)
class TetradCoefficients:
    Cj0: np.ndarray
    Cp0: np.ndarray
    Cj1: np.ndarray
    Cp1: np.ndarray

    def matrix(self):
        """Per-site [[C^j_0, C^j_1], [C^p_0, C^p_1]], the inverse of the Jacobian."""
        return np.stack([np.stack([self.Cj0, self.Cj1], -1),
                         np.stack([self.Cp0, self.Cp1], -1)], -2)


def coordinate_gradients(X, check=True):
    """
    Discrete coordinate gradients and their determinant.

    Args:
        X: CoordinateField with at least 2 slices
        check: Raise on a degenerate Jacobian

    Returns:
        CoordinateGradients for slices 1..J

    Raises:
        DegenerateCoordinatesError: If |Delta| < 1e-14 at any site
    """
    pert = X.perturbation
    grad_time = avg_c(pert[1:]) - pert[:-1]
    grad_space = grad_p(pert[1:])
    m = X.matrix
    grads = CoordinateGradients(
        a=m[0, 0] + grad_time[:, 0],
        b=m[0, 1] + grad_space[:, 0],
        c=m[1, 0] + grad_time[:, 1],
        d=m[1, 1] + grad_space[:, 1],
    )
    if check and np.min(np.abs(grads.delta)) < DEGENERACY_TOL:
        raise DegenerateCoordinatesError("coordinate Jacobian determinant vanishes")
    return grads


def c_coefficients(X):
    """
    Inverse-Jacobian (2-bein) coefficients.

    Args:
        X: CoordinateField or CoordinateGradients

    Returns:
        TetradCoefficients with C^j_0 = d/Delta, C^p_0 = -c/Delta, C^j_1 = -b/Delta,
        C^p_1 = a/Delta
    """
    g = X if isinstance(X, CoordinateGradients) else coordinate_gradients(X)
    delta = g.delta
    if np.min(np.abs(delta)) < DEGENERACY_TOL:
        raise DegenerateCoordinatesError("coordinate Jacobian determinant vanishes")
    return TetradCoefficients(Cj0=g.d / delta, Cp0=-g.c / delta, Cj1=-g.b / delta,
                              Cp1=g.a / delta)


@dataclass(frozen=True, eq=False)
class SigmaTerms:
    """Per-site term densities over action slices j = 1..J-1, each (J-1, N)."""

    densities: dict

    def totals(self):
        return {name: complex(self.densities[name].sum()) for name in TERM_NAMES}

    @property
    def sigma(self):
        return complex(sum(self.densities[name].sum() for name in TERM_NAMES))

    def as_dict(self):
        out = self.totals()
        out["Sigma"] = self.sigma
        return out


@dataclass(frozen=True, eq=False)
class FunctionalDerivatives:
    """Derivatives of the action density with respect to a, b, c, d."""

    wrt_grad_j_x0: ScalarField
    wrt_grad_p_x0: ScalarField
    wrt_grad_j_x1: ScalarField
    wrt_grad_p_x1: ScalarField

    def as_tuple(self):
        return (self.wrt_grad_j_x0, self.wrt_grad_p_x0, self.wrt_grad_j_x1, self.wrt_grad_p_x1)


def _dens(x, y):
    return np.sum(x.conj() * y, axis=-2)


def check_extended_inputs(phi_traj, psi_traj, coin, n_coordinate_slices=None):
    check_sites(phi_traj, psi_traj, coin)
    if phi_traj.slices.shape != psi_traj.slices.shape:
        raise ValueError("Phi and Psi trajectories differ in shape")
    if len(phi_traj) < 3:
        raise ValueError("extended action needs at least 3 slices")
    if coin.site_dependent or coin.time_dependent:
        raise InhomogeneousCoinError("extended action needs a homogeneous coin")
    if n_coordinate_slices is not None and n_coordinate_slices != len(phi_traj):
        raise ValueError(
            f"coordinates have {n_coordinate_slices} slices, trajectory has {len(phi_traj)}"
        )


class _SliceOperators:
    """Operator images of the slices entering action slices j = 1..J-1."""

    def __init__(self, phi_traj, psi_traj, coin):
        mats = coin.at(0)
        phi = phi_traj.slices[1:-1]
        self.psi = psi_traj.slices[1:-1]
        self.dj = phi_traj.slices[2:] - phi
        self.dp = grad_p(phi)

        def one_minus_wc(v):
            return v - apply_coin(mats, avg_c(v))

        t_phi = translate(phi)
        self.m1 = 0.5 * one_minus_wc(phi + t_phi)
        self.m2 = 0.5 * one_minus_wc(phi - t_phi)
        self.w_s3_dp = apply_coin(mats, SIGMA3 @ self.dp)
        self.u_dp = walk(self.dp, mats)
        self.s3_dj = SIGMA3 @ self.dj
        self.t_dj = translate(self.dj)

    def densities(self):
        psi = self.psi
        return {
            "m1": _dens(psi, self.m1),
            "m2": _dens(psi, self.m2),
            "w_s3_dp": _dens(psi, self.w_s3_dp),
            "u_dp": _dens(psi, self.u_dp),
            "s3_dj": _dens(psi, self.s3_dj),
            "t_dj": _dens(psi, self.t_dj),
            "dj": _dens(psi, self.dj),
        }


def _interior(grads, n_slices):
    # gradient slices 1..J-1 pair with action slices
    k = n_slices - 2
    return grads.a[:k], grads.b[:k], grads.c[:k], grads.d[:k]


def sigma_terms_from_gradients(phi_traj, psi_traj, coin, grads):
    """
    Action terms for explicit gradient slots, the entry point for slot derivatives.

    Args:
        phi_traj, psi_traj: Trajectories with J+1 >= 3 slices
        coin: Homogeneous CoinField
        grads: CoordinateGradients covering at least slices 1..J-1

    Returns:
        SigmaTerms
    """
    check_extended_inputs(phi_traj, psi_traj, coin)
    a, b, c, d = _interior(grads, len(phi_traj))
    n = _SliceOperators(phi_traj, psi_traj, coin).densities()
    return SigmaTerms({
        "M1": n["m1"] * (a * d - b * c),
        "M2": n["m2"] * (a - d),
        "M3": n["m2"],
        "Kj": -a * n["w_s3_dp"] - c * n["u_dp"],
        "Kp": b * n["s3_dj"] + d * n["t_dj"],
        "Ksupp": n["dj"] - n["t_dj"],
    })


def sigma_terms(phi_traj, psi_traj, coin, X):
    """
    Mass terms M1..M3, kinetic terms K^j, K^p, K^supp and their sum Sigma.

    Args:
        phi_traj: Trajectory Phi
        psi_traj: Trajectory Psi, independent of Phi (on-shell callers pass U Phi)
        coin: Homogeneous CoinField
        X: CoordinateField with as many slices as the trajectories

    Returns:
        SigmaTerms

    Raises:
        DegenerateCoordinatesError: If X is degenerate
    """
    check_extended_inputs(phi_traj, psi_traj, coin, X.n_slices)
    return sigma_terms_from_gradients(phi_traj, psi_traj, coin, coordinate_gradients(X))


def functional_derivatives_from_gradients(phi_traj, psi_traj, coin, grads):
    check_extended_inputs(phi_traj, psi_traj, coin)
    a, b, c, d = _interior(grads, len(phi_traj))
    n = _SliceOperators(phi_traj, psi_traj, coin).densities()
    return FunctionalDerivatives(
        wrt_grad_j_x0=ScalarField(d * n["m1"] + n["m2"] - n["w_s3_dp"]),
        wrt_grad_p_x0=ScalarField(-c * n["m1"] + n["s3_dj"]),
        wrt_grad_j_x1=ScalarField(-b * n["m1"] - n["u_dp"]),
        wrt_grad_p_x1=ScalarField(a * n["m1"] - n["m2"] + n["t_dj"]),
    )


def functional_derivatives_closed_form(phi_traj, psi_traj, coin, X):
    """
    Closed-form derivatives of the action density with respect to the four gradients.

    Returns:
        FunctionalDerivatives, each field of shape (J-1, N)
    """
    check_extended_inputs(phi_traj, psi_traj, coin, X.n_slices)
    return functional_derivatives_from_gradients(phi_traj, psi_traj, coin,
                                                 coordinate_gradients(X))


def coordinate_euler_lagrange(derivs, n_slices):
    """
    Variation of the action with respect to each coordinate value X^mu_{j,p}.

    Chains the gradient derivatives through the stencils:
    dS/dX^0_{j,p} = avg_C(F_a)_j - F_a(j+1) - grad_p(F_b)_j, likewise for X^1 with F_c, F_d.

    Args:
        derivs: FunctionalDerivatives over action slices 1..J-1
        n_slices: J+1

    Returns:
        numpy array of shape (J+1, 2, N)
    """
    fa, fb, fc, fd = (f.values for f in derivs.as_tuple())
    n_sites = fa.shape[-1]
    out = np.zeros((n_slices, 2, n_sites), dtype=complex)
    last = n_slices - 1
    for mu, (ft, fs) in enumerate(((fa, fb), (fc, fd))):
        out[1:last, mu] += avg_c(ft) - grad_p(fs)
        out[0:last - 1, mu] -= ft
    return out


def naive_action(phi_traj, psi_traj, coin, X):
    """
    Action with grad_j, grad_p replaced by frame derivatives C^q_a grad_q and the volume
    factor Delta. Diagnostic only.
    """
    check_extended_inputs(phi_traj, psi_traj, coin, X.n_slices)
    grads = coordinate_gradients(X)
    C = c_coefficients(grads)
    k = len(phi_traj) - 2
    cj0, cp0, cj1, cp1 = (arr[:k, None, :] for arr in (C.Cj0, C.Cp0, C.Cj1, C.Cp1))
    ops = _SliceOperators(phi_traj, psi_traj, coin)
    mats = coin.at(0)
    grad0 = cj0 * ops.dj + cp0 * ops.dp
    grad1 = cj1 * ops.dj + cp1 * ops.dp
    phi = phi_traj.slices[1:-1]
    bracket = grad0 - apply_coin(mats, SIGMA3 @ grad1) + phi - apply_coin(mats, avg_c(phi))
    value = complex(np.sum(_dens(ops.psi, bracket) * grads.delta[:k]))
    logger.info("naive-substitution action %.6e%+.6ej", value.real, value.imag)
    return value


def onshell_energy_momentum_check(phi_traj, coin, tolerance=1e-12):
    """
    Compare the closed-form derivatives at grid coordinates with minus the observables.

    Psi_j = U Phi_j is built internally; the densities are evaluated on those states.

    Args:
        phi_traj: Trajectory, expected on shell
        coin: Homogeneous CoinField
        tolerance: Pass threshold on the discrepancy

    Returns:
        dict with discrepancy, per-component discrepancies, stress-energy conservation
        residuals and a passed flag
    """
    psi_traj = onshell_partner(phi_traj, coin)
    X = CoordinateField.grid(len(phi_traj), phi_traj.n_sites)
    derivs = functional_derivatives_closed_form(phi_traj, psi_traj, coin, X)
    states = psi_traj.slices[1:-1]
    split = _energy_split_raw(states, coin.at(0))
    momentum, momentum_flux = _momentum_raw(states)
    expected = (split.energy, split.energy_current, momentum, momentum_flux)
    names = ("energy", "energy_current", "momentum", "momentum_current")
    components = {
        name: float(np.max(np.abs(f.values + e)))
        for name, f, e in zip(names, derivs.as_tuple(), expected)
    }
    discrepancy = max(components.values())
    eom = coordinate_euler_lagrange(derivs, len(phi_traj))
    interior = eom[1:len(phi_traj) - 2]
    residuals = {
        "energy": float(np.max(np.abs(interior[:, 0]))) if len(interior) else 0.0,
        "momentum": float(np.max(np.abs(interior[:, 1]))) if len(interior) else 0.0,
    }
    passed = discrepancy < tolerance
    if not passed:
        logger.warning("on-shell identification failed: discrepancy %.3e", discrepancy)
    return {
        "discrepancy": discrepancy,
        "components": components,
        "conservation_residuals": residuals,
        "tolerance": tolerance,
        "passed": bool(passed),
    }


def grid_trajectories(phi_traj, coin):
    """Phi, Psi = U Phi and grid coordinates, the on-shell triple."""
    return phi_traj, onshell_partner(phi_traj, coin), CoordinateField.grid(len(phi_traj),
                                                                          phi_traj.n_sites)


def _density_sum(terms):
    return sum(terms.densities[name] for name in TERM_NAMES)


def functional_derivatives_fd(phi_traj, psi_traj, coin, X, h=1e-6):
    """
    Central finite differences of the action density in each gradient slot.

    The density at a site depends only on that site's slots, so shifting a slot everywhere
    at once gives every site's derivative from two evaluations.
    """
    check_extended_inputs(phi_traj, psi_traj, coin, X.n_slices)
    grads = coordinate_gradients(X)
    fields = []
    for slot in "abcd":
        base = getattr(grads, slot)
        up = sigma_terms_from_gradients(phi_traj, psi_traj, coin,
                                        grads.replace(**{slot: base + h}))
        down = sigma_terms_from_gradients(phi_traj, psi_traj, coin,
                                          grads.replace(**{slot: base - h}))
        fields.append(ScalarField((_density_sum(up) - _density_sum(down)) / (2.0 * h)))
    return FunctionalDerivatives(*fields)


def derivative_discrepancy(closed_form, finite_difference):
    return max(float(np.max(np.abs(c.values - f.values)))
               for c, f in zip(closed_form.as_tuple(), finite_difference.as_tuple()))
