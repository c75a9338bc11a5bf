"""
Spin frames, the SOLT law and Lorentz-covariant evaluation of the extended action.

A frame is a boost of rapidity phi acting on the grid coordinates together with the spin
basis rescaling b_L -> lambda b_L, b_R -> b_R / lambda, lambda^2 = e^phi. The frame's
coordinate map is

    (X^0, X^1) = [[cosh phi, sinh phi], [sinh phi, cosh phi]] (j, p)

whose inverse Jacobian is the 2-bein block [[cosh, -sinh], [-sinh, cosh]] =
[[(l^2 + l^-2)/2, (l^-2 - l^2)/2], [(l^-2 - l^2)/2, (l^2 + l^-2)/2]].

Spinor components in the frame are Phi' = S^-1 B^dagger Phi with S = diag(lambda, 1/lambda)
and B the eigenbasis of W sigma3; operators with both spin indices down transform as
SOLT(M) = S M S.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .extended_action import (
    CoordinateField,
    c_coefficients,
    check_extended_inputs,
    coordinate_gradients,
)
from .lattice_core import SIGMA3, IDENTITY2, apply_coin, avg_c, grad_p, translate
from .observables import _balance, _energy_split_raw, _momentum_raw

logger = logging.getLogger(__name__)

FRAME_TOL = 1e-12
DEGENERATE_SPECTRUM_TOL = 1e-12

ETA = np.diag([1.0, -1.0])
GAMMA0 = np.array([[0, 1], [1, 0]], dtype=complex)
GAMMA1 = np.array([[0, 1], [-1, 0]], dtype=complex)


class FrameError(ValueError):
    """Inconsistent or degenerate Lorentz frame."""


@dataclass(frozen=True, eq=False)
class SpinFrame:
    lam: float
    alpha_L: float
    alpha_R: float
    basis_matrix: np.ndarray
    sigma_bar3: np.ndarray

    @property
    def scaling(self):
        return np.diag([self.lam, 1.0 / self.lam])

    def to_frame(self, arr):
        """Frame components S^-1 B^dagger v of spinors with shape (..., 2, N)."""
        m = np.diag([1.0 / self.lam, self.lam]) @ self.basis_matrix.conj().T
        return m @ arr

    def from_frame(self, arr):
        return (self.basis_matrix @ self.scaling) @ arr

    def frame_operator(self, op, arr_frame):
        """Action of a grid-basis operator on frame components, S B^dagger O (B S v')."""
        image = op(self.from_frame(arr_frame))
        return (self.scaling @ self.basis_matrix.conj().T) @ image


def _wrap_phase(x):
    return x + 2.0 * np.pi if x <= -np.pi else x


def spin_frame_of(coin_matrix, lam=1.0):
    """
    Eigenbasis of W sigma3 with deterministic ordering and phases.

    Eigenphases are sorted ascending in (-pi, pi]; each eigenvector is rotated so that its
    first non-vanishing component is real positive. A degenerate W sigma3 (a multiple of the
    identity) gives the identity basis and sigma_bar3 = sigma3.

    Args:
        coin_matrix: 2x2 unitary W
        lam: Spin basis scaling lambda > 0

    Returns:
        SpinFrame
    """
    if lam <= 0:
        raise FrameError(f"lambda must be positive, got {lam}")
    m = np.asarray(coin_matrix, dtype=complex) @ SIGMA3
    values, vectors = np.linalg.eig(m)
    phases = np.array([_wrap_phase(a) for a in np.angle(values)])
    if abs(values[0] - values[1]) < DEGENERATE_SPECTRUM_TOL:
        basis = IDENTITY2.copy()
        phases = np.sort(phases)
    else:
        order = np.argsort(phases)
        phases = phases[order]
        first = vectors[:, order[0]] / np.linalg.norm(vectors[:, order[0]])
        # eigenvectors of a normal matrix are orthogonal; in 2D the second is the complement
        basis = np.stack([first, np.array([-first[1].conj(), first[0].conj()])], axis=1)
        for col in range(2):
            v = basis[:, col]
            lead = v[np.argmax(np.abs(v) > DEGENERATE_SPECTRUM_TOL)]
            basis[:, col] = v * (abs(lead) / lead)
    sigma_bar3 = basis @ SIGMA3 @ basis.conj().T
    return SpinFrame(lam=float(lam), alpha_L=float(phases[0]), alpha_R=float(phases[1]),
                     basis_matrix=basis, sigma_bar3=sigma_bar3)


def solt_transform(op_components, lam):
    """
    Spin operator Lorentz transformation: LL entry times lambda^2, RR entry times
    lambda^-2, off-diagonal entries unchanged.
    """
    if lam <= 0:
        raise FrameError(f"lambda must be positive, got {lam}")
    s = np.diag([lam, 1.0 / lam])
    return s @ np.asarray(op_components, dtype=complex) @ s


def spin_basis_change(lam):
    """Clifford data after b_L -> lambda b_L, b_R -> b_R / lambda: gamma' = S^-1 gamma S."""
    s = np.diag([lam, 1.0 / lam])
    s_inv = np.diag([1.0 / lam, lam])
    return {
        "gamma0": s_inv @ GAMMA0 @ s,
        "gamma1": s_inv @ GAMMA1 @ s,
        "eta": s.T @ IDENTITY2 @ s,
    }


def clifford_invariants(gamma0, gamma1, eta):
    return {
        "gamma0_squared": gamma0 @ gamma0,
        "gamma1_squared": gamma1 @ gamma1,
        "gamma0_gamma1": gamma0 @ gamma1,
        "eta_gamma0": eta.T @ gamma0,
    }


def clifford_check(lam):
    """
    Largest deviation of the rescaled-basis Clifford data from the expected images:
    squares and the product gamma0 gamma1 unchanged, eta gamma0 transformed by SOLT.
    """
    primed = spin_basis_change(lam)
    found = clifford_invariants(primed["gamma0"], primed["gamma1"], primed["eta"])
    expected = {
        "gamma0_squared": IDENTITY2,
        "gamma1_squared": -IDENTITY2,
        "gamma0_gamma1": GAMMA0 @ GAMMA1,
        "eta_gamma0": solt_transform(GAMMA0, lam),
    }
    return max(float(np.max(np.abs(found[k] - expected[k]))) for k in expected)


def boost_matrix(rapidity):
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    return np.array([[ch, sh], [sh, ch]])


@dataclass(frozen=True)
class FrameSpec:
    """Boost frame: rapidity and spin scaling with lambda^2 = e^rapidity."""

    rapidity: float = 0.0
    lam: float = None

    def __post_init__(self):
        lam = np.exp(0.5 * self.rapidity) if self.lam is None else float(self.lam)
        if lam <= 0:
            raise FrameError(f"lambda must be positive, got {lam}")
        if abs(lam ** 2 - np.exp(self.rapidity)) > FRAME_TOL * np.exp(self.rapidity):
            raise FrameError(
                f"inconsistent frame: lambda^2 = {lam ** 2:.15g} but e^phi = "
                f"{np.exp(self.rapidity):.15g}"
            )
        object.__setattr__(self, "lam", lam)

    @classmethod
    def identity(cls):
        return cls(0.0)

    @classmethod
    def from_lambda(cls, lam):
        if lam <= 0:
            raise FrameError(f"lambda must be positive, got {lam}")
        return cls(2.0 * np.log(lam), lam)

    @property
    def coordinate_matrix(self):
        return boost_matrix(self.rapidity)

    @property
    def two_bein(self):
        """e'^mu_a, the inverse of the coordinate Jacobian."""
        l2, li2 = self.lam ** 2, self.lam ** -2
        return np.array([[(l2 + li2) / 2, (li2 - l2) / 2], [(li2 - l2) / 2, (l2 + li2) / 2]])

    @property
    def U_upper(self):
        return self.coordinate_matrix[:, 0]

    @property
    def V_upper(self):
        return self.coordinate_matrix[:, 1]

    @property
    def U_lower(self):
        return ETA @ self.U_upper

    @property
    def V_lower(self):
        return ETA @ self.V_upper

    def projector(self):
        """Pi_{mu nu} = U_mu U_nu - eta_{mu nu}, so Pi A = (A.V) V_mu."""
        return np.outer(self.U_lower, self.U_lower) - ETA

    def coordinates(self, n_slices, n_sites):
        return CoordinateField.affine(self.coordinate_matrix, n_slices, n_sites)


def two_bein_change(e_prime_components, coordinate_map):
    """
    Re-express 2-bein components after a change of coordinates.

    Args:
        e_prime_components: 2x2 array (e')^{nu'}_a in the new coordinates
        coordinate_map: 2x2 Jacobian [[dt'/dt, dt'/dx], [dx'/dt, dx'/dx]]

    Returns:
        2x2 array (N^-1)^mu_{nu'} (e')^{nu'}_a

    Raises:
        FrameError: If the Jacobian determinant vanishes
    """
    jac = np.asarray(coordinate_map, dtype=float)
    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    if abs(det) < FRAME_TOL:
        raise FrameError("coordinate map has a degenerate Jacobian")
    n_inv = np.array([[jac[1, 1], -jac[0, 1]], [-jac[1, 0], jac[0, 0]]]) / det
    return n_inv @ np.asarray(e_prime_components)


@dataclass(frozen=True, eq=False)
class CovariantTerms:
    densities: dict

    def totals(self):
        return {name: complex(v.sum()) for name, v in self.densities.items()}

    @property
    def sigma_L(self):
        return complex(sum(v.sum() for v in self.densities.values()))

    def as_dict(self):
        out = self.totals()
        out["Sigma_L"] = self.sigma_L
        return out


def _fdens(x, y):
    return np.sum(x.conj() * y, axis=-2)


def covariant_action(phi_traj, psi_traj, coin, frame, coords=None):
    """
    Extended action evaluated term by term in a Lorentz frame.

    Args:
        phi_traj, psi_traj: Trajectories (grid spin basis)
        coin: Homogeneous CoinField
        frame: FrameSpec
        coords: Optional CoordinateField in the frame; defaults to the frame's boost map

    Returns:
        CovariantTerms with Kbar, dKj, dKp, Ksupp, M1, M2, M3 and Sigma_L
    """
    check_extended_inputs(phi_traj, psi_traj, coin)
    n_slices, n_sites = len(phi_traj), phi_traj.n_sites
    X = frame.coordinates(n_slices, n_sites) if coords is None else coords
    grads = coordinate_gradients(X)
    C = c_coefficients(grads)
    k = n_slices - 2
    a, b, c, d = grads.a[:k], grads.b[:k], grads.c[:k], grads.d[:k]
    delta = grads.delta[:k]
    cj0, cp0, cj1, cp1 = C.Cj0[:k], C.Cp0[:k], C.Cj1[:k], C.Cp1[:k]

    W = coin.matrix
    mats = coin.at(0)
    sf = spin_frame_of(W, frame.lam)
    sbar = sf.sigma_bar3

    phi_f = sf.to_frame(phi_traj.slices[1:-1])
    psi_f = sf.to_frame(psi_traj.slices[1:-1])
    dj_f = sf.to_frame(phi_traj.slices[2:]) - phi_f
    dp_f = grad_p(phi_f)

    # kinetic term diagonal in the eigenbasis: gamma0 gamma^a -> (1, -s_f), D_p -> d_f
    s_f = np.array([1.0, -1.0])[:, None]
    d_f = np.array([np.exp(1j * sf.alpha_L), -np.exp(1j * sf.alpha_R)])[:, None]
    kin = ((cj0[:, None] - s_f * cj1[:, None]) * dj_f
           + (cp0[:, None] - s_f * cp1[:, None]) * d_f * dp_f)
    kbar = _fdens(psi_f, kin) * delta

    def w_s3(v):
        return apply_coin(mats, SIGMA3 @ v)

    def one_minus_wc(v):
        return v - apply_coin(mats, avg_c(v))

    def m1(v):
        return 0.5 * one_minus_wc(v + translate(v))

    def m2(v):
        return 0.5 * one_minus_wc(v - translate(v))

    def dk_j(v):
        tv = translate(v) - v
        return w_s3((SIGMA3 - sbar) @ v + sbar @ tv + (SIGMA3 - sbar) @ tv)

    def s3_minus_sbar(v):
        return (SIGMA3 - sbar) @ v

    def t_minus_one(v):
        return translate(v) - v

    def term(op, v_f):
        return _fdens(psi_f, sf.frame_operator(op, v_f))

    u_lo, v_lo = frame.U_lower, frame.V_lower
    v_grad_j = v_lo[0] * a + v_lo[1] * c
    u_grad_p = u_lo[0] * b + u_lo[1] * d
    v_grad_p = v_lo[0] * b + v_lo[1] * d
    u_grad_j = u_lo[0] * a + u_lo[1] * c

    m2_dens = term(m2, phi_f)
    densities = {
        "Kbar": kbar,
        "dKj": term(dk_j, dp_f) * v_grad_j,
        "dKp": term(s3_minus_sbar, dj_f) * u_grad_p - term(t_minus_one, dj_f) * v_grad_p,
        "Ksupp": -term(t_minus_one, dj_f),
        "M1": term(m1, phi_f) * delta,
        "M2": m2_dens * (u_grad_j + v_grad_p),
        "M3": m2_dens,
    }
    return CovariantTerms(densities)


@dataclass(frozen=True, eq=False)
class StressEnergyField:
    """
    tensor[lower, upper, j, p]; upper index in (j, p), lower index labelled by
    lower_labels ("j", "p") in the grid frame or ("0", "1") in a boosted frame.
    """

    tensor: np.ndarray
    lower_labels: tuple = ("j", "p")

    def component(self, lower, upper):
        lo = self.lower_labels.index(str(lower))
        up = ("j", "p").index(upper)
        return self.tensor[lo, up]

    def conservation_residuals(self):
        """Energy-stencil balance of each lower-index row."""
        return {label: _balance(self.tensor[i, 0], self.tensor[i, 1])
                for i, label in enumerate(self.lower_labels)}


def stress_energy_grid(phi_traj, coin):
    """
    Grid-frame stress-energy: T_j^j = H, T_j^p = J_H, T_p^j = P, T_p^p = J_P on every slice.
    """
    if coin.site_dependent or coin.time_dependent:
        raise FrameError("stress-energy needs a homogeneous coin")
    split = _energy_split_raw(phi_traj.slices, coin.at(0))
    momentum, momentum_flux = _momentum_raw(phi_traj.slices)
    tensor = np.array([[split.energy, split.energy_current], [momentum, momentum_flux]])
    return StressEnergyField(tensor)


def stress_energy_transform(T, frame):
    """
    Contract the lower index with the frame's C-coefficients:
    T_a^q = C^j_a T_j^q + C^p_a T_p^q.

    For a frame at rapidity phi this gives T_0^j = cosh(phi) H - sinh(phi) P.
    """
    if T.lower_labels != ("j", "p"):
        raise FrameError("stress-energy must be in the grid frame")
    e = frame.two_bein
    if abs(np.linalg.det(e)) < FRAME_TOL:
        raise FrameError("degenerate frame")
    tensor = np.einsum("qa,qu...->au...", e, T.tensor)
    return StressEnergyField(tensor, lower_labels=("0", "1"))


def _dirac_derivatives(fields, dt, dx):
    psi = np.asarray(fields, dtype=complex)
    return (psi, np.gradient(psi, dt, axis=1, edge_order=2),
            np.gradient(psi, dx, axis=2, edge_order=2))


def lagrangian_from_triplet(psi, dpsi_dt, dpsi_dx, m, eta, gamma0, gamma1, two_bein):
    """
    L = eta_{fg} Psi^f* [(e^mu_a gamma0 gamma^a d_mu + i m gamma0) Psi]^g on sample arrays
    of shape (2, nt, nx).
    """
    derivs = (dpsi_dt, dpsi_dx)
    out = np.zeros(psi.shape[1:], dtype=complex)
    g0g = (gamma0 @ gamma0, gamma0 @ gamma1)
    for a in range(2):
        for mu in range(2):
            image = np.einsum("fg,gh,h...->f...", eta, two_bein[mu, a] * g0g[a], derivs[mu])
            out += np.sum(psi.conj() * image, axis=0)
    mass = np.einsum("fg,gh,h...->f...", eta, 1j * m * gamma0, psi)
    return out + np.sum(psi.conj() * mass, axis=0)


def dirac_lagrangian(fields, m, frame, dt, dx):
    """
    2D Dirac Lagrangian density on sampled fields.

    In the identity frame this is
    Psi-^* (d_t - d_x) Psi- + Psi+^* (d_t + d_x) Psi+ + i m (Psi-^* Psi+ + Psi+^* Psi-).
    In a boosted frame the fields are taken in frame components (Psi-/lambda, lambda Psi+)
    with the frame's 2-bein; the value agrees pointwise with the identity frame.

    Args:
        fields: complex samples of shape (2, nt, nx), rows (Psi-, Psi+)
        m: mass
        frame: FrameSpec
        dt, dx: sample spacings for central differences

    Returns:
        complex array of shape (nt, nx)
    """
    psi, d_t, d_x = _dirac_derivatives(fields, dt, dx)
    scale = np.array([1.0 / frame.lam, frame.lam])[:, None, None]
    return lagrangian_from_triplet(scale * psi, scale * d_t, scale * d_x, m, IDENTITY2,
                                   GAMMA0, GAMMA1, frame.two_bein)


def dirac_lagrangian_spin_basis(fields, m, lam, dt, dx):
    """Rescaled-spin-basis form: lambda^2 Psi-'^*(d_t - d_x)Psi-' + lambda^-2 Psi+'^*(...)."""
    psi, d_t, d_x = _dirac_derivatives(fields, dt, dx)
    scale = np.array([1.0 / lam, lam])[:, None, None]
    p, pt, px = scale * psi, scale * d_t, scale * d_x
    return (lam ** 2 * p[0].conj() * (pt[0] - px[0])
            + lam ** -2 * p[1].conj() * (pt[1] + px[1])
            + 1j * m * (p[0].conj() * p[1] + p[1].conj() * p[0]))


def frame_invariance_report(phi_traj, psi_traj, coin, rapidities, tolerance=1e-10):
    """Sigma_L across frames compared with the identity frame."""
    reference = covariant_action(phi_traj, psi_traj, coin, FrameSpec.identity()).sigma_L
    rows = []
    for phi in rapidities:
        frame = FrameSpec(phi)
        value = covariant_action(phi_traj, psi_traj, coin, frame).sigma_L
        delta = coordinate_gradients(frame.coordinates(2, phi_traj.n_sites)).delta
        rows.append({
            "rapidity": float(phi),
            "lambda": frame.lam,
            "sigma_L_re": value.real,
            "sigma_L_im": value.imag,
            "difference": abs(value - reference),
            "volume_error": float(np.max(np.abs(delta - 1.0))),
        })
    worst = max((r["difference"] for r in rows), default=0.0)
    logger.info("frame convention: lambda^2 = e^phi, coordinates boosted by (cosh, sinh)")
    return {
        "reference_sigma_L": [reference.real, reference.imag],
        "frames": rows,
        "max_difference": worst,
        "passed": bool(worst < tolerance),
    }
