"""
Lattice states, coins and the walk operator for (1+1)-D discrete-time quantum walks.

Every array keeps the site axis last:

    spinor slice      (2, N)          rows (psi_minus, psi_plus)
    trajectory        (J+1, 2, N)
    coin matrices     (n_steps, N, 2, 2)

Site indices are periodic. The walk operator is U = W T: the translation T moves
psi_minus one site to the left and psi_plus one site to the right, then the coin W
mixes the two components site by site.
"""

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

UNITARY_TOL = 1e-12
MINUS, PLUS = 0, 1

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA3 = np.diag([1.0, -1.0]).astype(complex)
IDENTITY2 = np.eye(2, dtype=complex)

STENCIL_KINDS = ("grad_p", "avg_C", "grad_j_plain", "grad_j_avg", "grad_p_doubled")


class DimensionMismatchError(ValueError):
    """Site counts of two lattice objects disagree."""


class NonUnitaryCoinError(ValueError):
    """A coin matrix fails the unitarity check."""


class NonFiniteAmplitudesError(NonUnitaryCoinError):
    """A state or trajectory holds NaN or infinite amplitudes."""


def is_unitary(matrix, tol=UNITARY_TOL):
    """
    Check unitarity of one matrix or a stack of 2x2 matrices.

    Args:
        matrix: Array of shape (..., 2, 2)
        tol: Max-norm tolerance on W^dagger W - 1

    Returns:
        bool: True if every matrix in the stack is unitary within tol
    """
    m = np.asarray(matrix, dtype=complex)
    gram = np.einsum("...ba,...bc->...ac", m.conj(), m)
    return bool(np.max(np.abs(gram - IDENTITY2)) < tol)


def coin_from_angles(theta, xi=0.0, zeta=0.0, alpha=0.0):
    """
    Build the general U(2) coin e^{i alpha} [[e^{i xi} cos t, e^{i zeta} sin t],
    [-e^{-i zeta} sin t, e^{-i xi} cos t]].
    """
    c, s = np.cos(theta), np.sin(theta)
    return np.exp(1j * alpha) * np.array(
        [[np.exp(1j * xi) * c, np.exp(1j * zeta) * s],
         [-np.exp(-1j * zeta) * s, np.exp(-1j * xi) * c]],
        dtype=complex,
    )


def haar_unitaries(rng, shape=()):
    """
    Draw Haar-distributed 2x2 unitaries.

    QR of a complex Gaussian matrix, with the phases of R's diagonal moved into Q so the
    distribution is exactly Haar.

    Args:
        rng: numpy Generator
        shape: Leading batch shape

    Returns:
        Array of shape (*shape, 2, 2)
    """
    z = (rng.standard_normal((*shape, 2, 2)) + 1j * rng.standard_normal((*shape, 2, 2)))
    z /= np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[..., None, :]


NAMED_COINS = {
    "hadamard": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0),
    "identity": IDENTITY2,
    "swap": SIGMA1,
    "sigma3": SIGMA3,
}


@dataclass(frozen=True, eq=False)
class SpinorField:
    """Two complex amplitudes per site at one time slice."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 2 or amps.shape[0] != 2 or amps.shape[1] < 1:
            raise ValueError(f"SpinorField needs shape (2, N), got {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise NonFiniteAmplitudesError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_sites(self):
        return self.amplitudes.shape[1]

    @property
    def minus(self):
        return self.amplitudes[MINUS]

    @property
    def plus(self):
        return self.amplitudes[PLUS]

    def norm_squared(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def normalized(self):
        norm = np.sqrt(self.norm_squared())
        if norm == 0.0:
            raise ValueError("cannot normalize the zero state")
        return SpinorField(self.amplitudes / norm)

    def rotated(self, phase):
        """Global phase rotation e^{i phase} psi."""
        return SpinorField(np.exp(1j * phase) * self.amplitudes)

    @classmethod
    def zeros(cls, n_sites):
        return cls(np.zeros((2, n_sites), dtype=complex))

    @classmethod
    def delta(cls, n_sites, site, component=MINUS):
        amps = np.zeros((2, n_sites), dtype=complex)
        amps[component, site % n_sites] = 1.0
        return cls(amps)

    @classmethod
    def plane_wave(cls, n_sites, k_index, component=PLUS):
        """Normalized e^{ikp}/sqrt(N) in one component, k = 2 pi k_index / N."""
        k = 2.0 * np.pi * k_index / n_sites
        amps = np.zeros((2, n_sites), dtype=complex)
        amps[component] = np.exp(1j * k * np.arange(n_sites)) / np.sqrt(n_sites)
        return cls(amps)

    @classmethod
    def gaussian(cls, n_sites, center, width, k_index=0, components=(MINUS, PLUS)):
        """Normalized Gaussian packet, equal weight in the listed components."""
        p = np.arange(n_sites)
        d = (p - center + n_sites / 2) % n_sites - n_sites / 2
        k = 2.0 * np.pi * k_index / n_sites
        profile = np.exp(-0.5 * (d / width) ** 2) * np.exp(1j * k * p)
        amps = np.zeros((2, n_sites), dtype=complex)
        for c in components:
            amps[c] = profile
        return cls(amps).normalized()

    @classmethod
    def random(cls, n_sites, rng):
        amps = rng.standard_normal((2, n_sites)) + 1j * rng.standard_normal((2, n_sites))
        return cls(amps).normalized()


@dataclass(frozen=True, eq=False)
class CoinField:
    """
    Per-site U(2) coins, optionally cycling over time steps.

    matrices has shape (n_steps, N, 2, 2); step j uses matrices[j % n_steps].
    """

    matrices: np.ndarray
    homogeneous_flag: bool = False

    def __post_init__(self):
        mats = np.array(self.matrices, dtype=complex)
        if mats.ndim == 3:
            mats = mats[None]
        if mats.ndim != 4 or mats.shape[-2:] != (2, 2):
            raise ValueError(f"CoinField needs shape (n_steps, N, 2, 2), got {mats.shape}")
        if not is_unitary(mats):
            raise NonUnitaryCoinError("Coin operator must be unitary")
        if self.homogeneous_flag and not np.all(mats == mats[0, 0]):
            raise ValueError("homogeneous_flag set but coin matrices differ")
        object.__setattr__(self, "matrices", mats)

    @classmethod
    def homogeneous(cls, matrix, n_sites):
        mats = np.broadcast_to(np.asarray(matrix, dtype=complex), (1, n_sites, 2, 2))
        return cls(mats.copy(), homogeneous_flag=True)

    @classmethod
    def named(cls, name, n_sites):
        if name not in NAMED_COINS:
            raise ValueError(f"Unknown coin '{name}'. Available: {sorted(NAMED_COINS)}")
        return cls.homogeneous(NAMED_COINS[name], n_sites)

    @classmethod
    def haar(cls, n_sites, rng):
        return cls.homogeneous(haar_unitaries(rng), n_sites)

    @classmethod
    def haar_field(cls, n_sites, rng, n_steps=1):
        return cls(haar_unitaries(rng, (n_steps, n_sites)))

    @property
    def n_sites(self):
        return self.matrices.shape[1]

    @property
    def n_steps(self):
        return self.matrices.shape[0]

    @property
    def time_dependent(self):
        return self.n_steps > 1 and not np.all(self.matrices == self.matrices[0])

    @property
    def site_dependent(self):
        return not np.all(self.matrices == self.matrices[:, :1])

    @property
    def matrix(self):
        """The single 2x2 coin of a homogeneous field."""
        if not self.homogeneous_flag:
            raise ValueError("coin field is not homogeneous")
        return self.matrices[0, 0]

    def at(self, j):
        return self.matrices[j % self.n_steps]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Walk slices j = 0..J stacked as an array of shape (J+1, 2, N)."""

    slices: np.ndarray

    def __post_init__(self):
        arr = np.array(self.slices, dtype=complex)
        if arr.ndim != 3 or arr.shape[1] != 2:
            raise ValueError(f"Trajectory needs shape (J+1, 2, N), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteAmplitudesError("amplitudes must be finite")
        object.__setattr__(self, "slices", arr)

    @classmethod
    def from_slices(cls, states):
        sizes = {s.n_sites for s in states}
        if len(sizes) != 1:
            raise DimensionMismatchError(f"slices disagree on n_sites: {sorted(sizes)}")
        return cls(np.stack([s.amplitudes for s in states]))

    @property
    def n_sites(self):
        return self.slices.shape[2]

    @property
    def steps(self):
        return self.slices.shape[0] - 1

    def __len__(self):
        return self.slices.shape[0]

    def __getitem__(self, j):
        return SpinorField(self.slices[j])

    def rotated(self, phase):
        return Trajectory(np.exp(1j * phase) * self.slices)


def check_sites(*objects):
    sizes = [obj.n_sites for obj in objects]
    if len(set(sizes)) != 1:
        raise DimensionMismatchError(f"n_sites mismatch: {sizes}")
    return sizes[0]


# Raw-array kernels; the site axis is last and any leading axes are carried along.

def translate(arr, dagger=False):
    out = np.empty_like(arr)
    shift = 1 if dagger else -1
    out[..., MINUS, :] = np.roll(arr[..., MINUS, :], shift, axis=-1)
    out[..., PLUS, :] = np.roll(arr[..., PLUS, :], -shift, axis=-1)
    return out


def apply_coin(mats, arr):
    """Per-site product W_p psi_p for mats (N, 2, 2) and arr (..., 2, N)."""
    return np.einsum("pab,...bp->...ap", mats, arr)


def apply_coin_dagger(mats, arr):
    return np.einsum("pba,...bp->...ap", mats.conj(), arr)


def walk(arr, mats):
    return apply_coin(mats, translate(arr))


def walk_dagger(arr, mats):
    return translate(apply_coin_dagger(mats, arr), dagger=True)


def grad_p(f):
    return 0.5 * (np.roll(f, -1, axis=-1) - np.roll(f, 1, axis=-1))


def avg_c(f):
    return 0.5 * (np.roll(f, -1, axis=-1) + np.roll(f, 1, axis=-1))


def grad_p_doubled(f):
    return np.roll(f, -1, axis=-1) - np.roll(f, 1, axis=-1)


def apply_translation(state, dagger=False):
    """
    Apply T (or T^dagger) to a spinor slice.

    Args:
        state: SpinorField
        dagger: Apply the adjoint shift instead

    Returns:
        SpinorField: shifted state, norm preserved exactly
    """
    return SpinorField(translate(state.amplitudes, dagger))


def step(state, coin, j=0):
    """
    One walk step W_j T psi.

    Args:
        state: SpinorField at time j
        coin: CoinField with the same n_sites
        j: Time index selecting the coin slice

    Returns:
        SpinorField at time j+1

    Raises:
        DimensionMismatchError: If state and coin disagree on n_sites
    """
    check_sites(state, coin)
    return SpinorField(walk(state.amplitudes, coin.at(j)))


def evolve(initial, coin, steps):
    """
    Iterate the walk from an initial slice.

    Args:
        initial: SpinorField at j = 0
        coin: CoinField
        steps: Number of steps J >= 1

    Returns:
        Trajectory with J+1 slices

    Raises:
        ValueError: If steps < 1
        DimensionMismatchError: If initial and coin disagree on n_sites
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    check_sites(initial, coin)
    out = np.empty((steps + 1, 2, initial.n_sites), dtype=complex)
    out[0] = initial.amplitudes
    for j in range(steps):
        out[j + 1] = walk(out[j], coin.at(j))
    logger.debug("evolved %d steps on %d sites", steps, initial.n_sites)
    return Trajectory(out)


def stencil(field, kind, next_slice=None):
    """
    Discrete derivative and average stencils with periodic wrap.

    Args:
        field: Per-site values at slice j (site axis last)
        kind: One of grad_p, avg_C, grad_j_plain, grad_j_avg, grad_p_doubled
        next_slice: Values at slice j+1, required by the time-differencing kinds

    Returns:
        numpy array with the shape of field
    """
    f = np.asarray(field)
    if kind == "grad_p":
        return grad_p(f)
    if kind == "avg_C":
        return avg_c(f)
    if kind == "grad_p_doubled":
        return grad_p_doubled(f)
    if kind in ("grad_j_plain", "grad_j_avg"):
        if next_slice is None:
            raise ValueError(f"stencil '{kind}' needs next_slice")
        nxt = np.asarray(next_slice)
        return nxt - f if kind == "grad_j_plain" else nxt - avg_c(f)
    raise ValueError(f"Unknown stencil kind '{kind}'. Available: {STENCIL_KINDS}")


def _bracket(nxt, prev, mats):
    return np.vdot(nxt, nxt - walk(prev, mats))


def action_S(traj, coin):
    """
    Basic action S = sum_j <Psi_{j+1} | Psi_{j+1} - U_j Psi_j>.

    Args:
        traj: Trajectory with at least 2 slices
        coin: CoinField

    Returns:
        complex: action value, zero on walk trajectories
    """
    if len(traj) < 2:
        raise ValueError("action needs at least 2 slices")
    check_sites(traj, coin)
    s = traj.slices
    return complex(sum(_bracket(s[j + 1], s[j], coin.at(j)) for j in range(traj.steps)))


def alternate_action(phi_traj, psi_traj, coin, first_slice=0):
    """
    Action in the Phi/Psi form
    sum_j <Psi_j | Phi_{j+1} - Phi_j - W sigma3 grad_p Phi_j - (W C - 1) Phi_j>,
    summed over j = first_slice..J-1.
    """
    check_sites(phi_traj, psi_traj, coin)
    if phi_traj.slices.shape != psi_traj.slices.shape:
        raise DimensionMismatchError("Phi and Psi trajectories differ in shape")
    phi, psi = phi_traj.slices, psi_traj.slices
    total = 0j
    for j in range(first_slice, phi_traj.steps):
        mats = coin.at(j)
        bracket = (phi[j + 1] - phi[j]
                   - apply_coin(mats, SIGMA3 @ grad_p(phi[j]))
                   - (apply_coin(mats, avg_c(phi[j])) - phi[j]))
        total += np.vdot(psi[j], bracket)
    return complex(total)


def onshell_partner(phi_traj, coin):
    """Psi_j = U_j Phi_j for every slice of Phi."""
    check_sites(phi_traj, coin)
    return Trajectory(np.stack([walk(s, coin.at(j)) for j, s in enumerate(phi_traj.slices)]))


def stationarity_residual(traj, coin, fd_step=1e-5):
    """
    Largest central-difference derivative of S over interior slices.

    Each real and imaginary amplitude component of slices 1..J-1 is perturbed by
    +-fd_step; only the two brackets touching that slice change, so the local sum is
    differentiated.

    Args:
        traj: Trajectory with at least 3 slices
        coin: CoinField
        fd_step: Step in [1e-7, 1e-3]

    Returns:
        float: max over components of |d Re S| and |d Im S|
    """
    if not 1e-7 <= fd_step <= 1e-3:
        raise ValueError(f"fd_step must lie in [1e-7, 1e-3], got {fd_step}")
    if len(traj) < 3:
        raise ValueError("stationarity check needs at least 3 slices")
    check_sites(traj, coin)
    s = traj.slices
    worst = 0.0
    for j in range(1, traj.steps):
        before, after = coin.at(j - 1), coin.at(j)

        def local(slice_j):
            return _bracket(slice_j, s[j - 1], before) + _bracket(s[j + 1], slice_j, after)

        for c in range(2):
            for p in range(traj.n_sites):
                for unit in (1.0, 1j):
                    plus, minus = s[j].copy(), s[j].copy()
                    plus[c, p] += unit * fd_step
                    minus[c, p] -= unit * fd_step
                    d = (local(plus) - local(minus)) / (2.0 * fd_step)
                    worst = max(worst, abs(d.real), abs(d.imag))
    logger.debug("stationarity residual %.3e at fd_step %.1e", worst, fd_step)
    return worst
