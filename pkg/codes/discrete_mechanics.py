"""
Discrete mechanics for the action S(q) = sum_j [ (q_{j+1} - q_j)^2 / 2 - phi(q_j) ].

Two schemes are provided:

- the symplectic scheme p_j = p_{j-1} - phi'(q_j), q_{j+1} = q_j + p_j, which conserves
  H = p^2/2 + phi(q) only for constant potentials;
- the extended scheme, where the time t_j becomes a dynamical variable with step
  V_j = t_{j+1} - t_j. Its equation of motion fixes the Legendre transform
  Pi = -u^2/2 - phi(q) (u = velocity), so Pi is conserved by construction. Note the sign:
  Pi is minus the usual mechanical energy.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

logger = logging.getLogger(__name__)

MAX_NEWTON_ITERATIONS = 50
MAX_BACKTRACKS = 30
FD_STEP = 1e-5
FD_TOL = 1e-6


class SolverError(RuntimeError):
    """The extended-scheme step could not be solved."""


@dataclass(frozen=True)
class Potential:
    """A potential phi(q) with its analytic derivative."""

    value: Callable[[float], float]
    derivative: Callable[[float], float]
    name: str = "custom"

    def __call__(self, q):
        return self.value(q)

    @classmethod
    def free(cls):
        return cls(lambda q: 0.0 * q, lambda q: 0.0 * q, name="free")

    @classmethod
    def constant(cls, level=1.0):
        return cls(lambda q: level + 0.0 * q, lambda q: 0.0 * q, name="constant")

    @classmethod
    def linear(cls, force=1.0):
        """phi = -force q, a constant force pushing towards +q."""
        return cls(lambda q: -force * q, lambda q: -force + 0.0 * q, name="linear")

    @classmethod
    def harmonic(cls, omega=1.0):
        return cls(lambda q: 0.5 * omega**2 * q**2, lambda q: omega**2 * q, name="harmonic")

    @classmethod
    def named(cls, name):
        presets = {"free": cls.free, "constant": cls.constant,
                   "linear": cls.linear, "harmonic": cls.harmonic}
        if name not in presets:
            raise ValueError(f"unknown potential '{name}', expected one of {sorted(presets)}")
        return presets[name]()

    def check_consistency(self, samples=None, h=FD_STEP, tol=FD_TOL):
        """
        Compare the analytic derivative with a central difference of the value.

        Returns:
            float: max absolute discrepancy over the samples

        Raises:
            ValueError: If the discrepancy exceeds tol
        """
        q = np.linspace(-2.0, 2.0, 41) if samples is None else np.asarray(samples, float)
        fd = (self.value(q + h) - self.value(q - h)) / (2.0 * h)
        err = float(np.max(np.abs(fd - self.derivative(q))))
        if err > tol:
            raise ValueError(f"potential '{self.name}': derivative inconsistent, error {err:.3e}")
        return err


@dataclass(frozen=True, eq=False)
class MechTrajectory:
    """Points j = 0..n of a mechanics run; t and Pi are set by the extended scheme."""

    q: np.ndarray
    p: np.ndarray
    t: Optional[np.ndarray] = None
    Pi: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("q", "p", "t", "Pi"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, np.asarray(value, dtype=float))
        lengths = {len(v) for v in (self.q, self.p, self.t, self.Pi) if v is not None}
        if len(lengths) != 1:
            raise ValueError(f"trajectory sequences differ in length: {sorted(lengths)}")
        if self.t is not None and np.any(np.diff(self.t) <= 0):
            raise ValueError("extended trajectory time must be strictly increasing")

    @property
    def extended(self):
        return self.t is not None

    def __len__(self):
        return len(self.q)

    def energy(self, phi):
        """Mechanical energy p^2/2 + phi(q) per point."""
        return 0.5 * self.p**2 + phi.value(self.q)

    def rows(self, phi):
        out = []
        for j in range(len(self)):
            row = {"j": j, "q": float(self.q[j]), "p": float(self.p[j])}
            if self.extended:
                row["t"] = float(self.t[j])
                row["Pi"] = float(self.Pi[j])
            else:
                row["H"] = float(0.5 * self.p[j] ** 2 + phi.value(self.q[j]))
            out.append(row)
        return out


def symplectic_step(q_j, p_prev, phi):
    """
    One step of the symplectic scheme.

    Args:
        q_j: position at step j
        p_prev: momentum p_{j-1}
        phi: Potential

    Returns:
        (q_next, p_j)
    """
    p_j = p_prev - phi.derivative(q_j)
    return q_j + p_j, p_j


def symplectic_step_inverse(q_next, p_j, phi):
    """Undo symplectic_step: returns (q_j, p_prev)."""
    q_j = q_next - p_j
    return q_j, p_j + phi.derivative(q_j)


def energy_drift(q_j, p_j, phi):
    """
    H_{j+1} - H_j for the symplectic scheme, H = p^2/2 + phi(q):

        phi(q_j + p_j) - phi(q_j) - p_j phi'(q_{j+1}) + phi'(q_{j+1})^2 / 2
    """
    q_next = q_j + p_j
    force = phi.derivative(q_next)
    return phi.value(q_next) - phi.value(q_j) - p_j * force + 0.5 * force**2


def run_symplectic(q0, p0, phi, steps):
    """
    Iterate the symplectic scheme from q_0 with p_{-1} = p0.

    Returns:
        MechTrajectory with points 0..steps; p holds p_j = (Dq)_j
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    q = np.empty(steps + 1)
    p = np.empty(steps + 1)
    q_j, p_prev = float(q0), float(p0)
    for j in range(steps + 1):
        q_next, p_j = symplectic_step(q_j, p_prev, phi)
        q[j], p[j] = q_j, p_j
        q_j, p_prev = q_next, p_j
    return MechTrajectory(q=q, p=p)


def time_reversal_error(traj, phi):
    """Run the inverse scheme back from the last point; distance to (q_0, p_{-1})."""
    q, p = traj.q[-1] + traj.p[-1], traj.p[-1]
    for _ in range(len(traj)):
        q, p = symplectic_step_inverse(q, p, phi)
    p_start = traj.p[0] + phi.derivative(traj.q[0])
    return float(max(abs(q - traj.q[0]), abs(p - p_start)))


def energy_drift_check(traj, phi):
    """Max difference between the drift formula and the measured H_{j+1} - H_j."""
    H = traj.energy(phi)
    predicted = np.array([energy_drift(traj.q[j], traj.p[j], phi) for j in range(len(traj) - 1)])
    return float(np.max(np.abs(predicted - np.diff(H))))


def _kinetic2(q, Pi_target, phi):
    """u^2 required by the energy equation at q; negative outside the allowed region."""
    return -2.0 * (Pi_target + phi.value(q))


def _extended_residual(u, V, u_prev, q_j, Pi_target, phi):
    return np.array([
        u - u_prev + V * phi.derivative(q_j),
        -0.5 * u**2 - phi.value(q_j) - Pi_target,
    ])


def extended_step(q_j, t_j, pi_prev, Pi_target, phi, solver_tol=1e-12, v_guess=1.0, j=None):
    """
    Solve one step of the extended scheme.

    The unknowns (u_j, V_j) satisfy

        u_j - u_{j-1} + V_j phi'(q_j) = 0
        -u_j^2 / 2 - phi(q_j) = Pi_target

    and are found by damped Newton iteration started from V = v_guess,
    u = u_{j-1} - v_guess phi'(q_j). Where phi'(q_j) vanishes the step length is not
    determined by the equations and v_guess is kept.

    Args:
        q_j, t_j: current position and time
        pi_prev: momentum u_{j-1}
        Pi_target: conserved Pi
        phi: Potential
        solver_tol: residual tolerance
        v_guess: previous step V_{j-1}
        j: step index for error messages

    Returns:
        (q_next, t_next, pi_j) with pi_j = u_j

    Raises:
        SolverError: No real velocity for the energy equation, Newton failure, or V_j <= 0
    """
    where = f"step {j}: " if j is not None else ""
    if solver_tol <= 0:
        raise ValueError(f"solver_tol must be positive, got {solver_tol}")
    kinetic2 = _kinetic2(q_j, Pi_target, phi)
    if kinetic2 < 0:
        raise SolverError(f"{where}no real velocity, -2(Pi + phi(q)) = {kinetic2:.3e}")

    force = phi.derivative(q_j)
    if force == 0:
        u, V = pi_prev, v_guess
    else:
        u, V = pi_prev - v_guess * force, v_guess
        res = _extended_residual(u, V, pi_prev, q_j, Pi_target, phi)
        for iteration in range(MAX_NEWTON_ITERATIONS):
            norm = np.max(np.abs(res))
            if norm <= solver_tol:
                break
            jac = np.array([[1.0, force], [-u, 0.0]])
            try:
                du, dV = np.linalg.solve(jac, -res)
            except np.linalg.LinAlgError as e:
                raise SolverError(f"{where}singular Newton system at u = {u:.3e}") from e
            damping = 1.0
            for _ in range(MAX_BACKTRACKS):
                trial = _extended_residual(u + damping * du, V + damping * dV,
                                           pi_prev, q_j, Pi_target, phi)
                if np.max(np.abs(trial)) < norm:
                    break
                damping *= 0.5
            u, V, res = u + damping * du, V + damping * dV, trial
            logger.debug("%snewton iteration %d residual %.3e", where, iteration, norm)
        else:
            if np.max(np.abs(res)) > solver_tol:
                raise SolverError(
                    f"{where}Newton did not converge in {MAX_NEWTON_ITERATIONS} iterations"
                )
    q_next = q_j + V * u
    if force != 0 and (V <= 0 or _kinetic2(q_next, Pi_target, phi) < 0):
        # turning point: the other root of the energy equation reverses the motion
        u_other = -u
        V_other = (pi_prev - u_other) / force
        q_other = q_j + V_other * u_other
        if V_other > 0 and _kinetic2(q_other, Pi_target, phi) >= 0:
            logger.debug("%sreflected at q = %.6f, u = %.3e", where, q_j, u_other)
            u, V, q_next = u_other, V_other, q_other
    if V <= 0:
        raise SolverError(f"{where}non-positive time step V = {V:.3e}")
    if _kinetic2(q_next, Pi_target, phi) < 0:
        raise SolverError(
            f"{where}both velocity roots leave the allowed region at q = {q_j:.6f}")
    return q_next, t_j + V, u


def run_extended(q0, u0, phi, steps, v0=1e-3, solver_tol=1e-12):
    """
    Iterate the extended scheme.

    Pi is fixed from the initial data, q_1 = q0 + v0 u0 and t_1 = v0; every later step
    is an extended_step.

    Returns:
        MechTrajectory with points 0..steps; p holds u_j and Pi the directly evaluated
        -u_j^2/2 - phi(q_j)
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if v0 <= 0:
        raise ValueError(f"v0 must be positive, got {v0}")
    Pi_target = -0.5 * u0**2 - phi.value(q0)
    q = [float(q0)]
    t = [0.0]
    u = [float(u0)]
    q_j, t_j, V = q0 + v0 * u0, v0, v0
    for j in range(1, steps + 1):
        q_next, t_next, u_j = extended_step(q_j, t_j, u[-1], Pi_target, phi,
                                            solver_tol=solver_tol, v_guess=V, j=j)
        q.append(q_j)
        t.append(t_j)
        u.append(u_j)
        V = t_next - t_j
        q_j, t_j = q_next, t_next
    q, u = np.array(q), np.array(u)
    Pi = -0.5 * u**2 - phi.value(q)
    return MechTrajectory(q=q, p=u, t=np.array(t), Pi=Pi)


def extended_action(q, t, sigma):
    """
    S~ = sum_j V_j sigma(u_j, q_j, t_j) over a trajectory with points 0..n, where
    V_j = t_{j+1} - t_j and u_j = (q_{j+1} - q_j) / V_j.

    sigma(u, q, t) is called with arrays and may depend on t explicitly. Its stationary
    points in t_j satisfy Pi_j - Pi_{j-1} = V_j (d sigma / dt)_j with
    Pi = sigma - u (d sigma / du); the mechanical case sigma = u^2/2 - phi(q) has no t and
    conserves Pi.
    """
    q, t = np.asarray(q, dtype=float), np.asarray(t, dtype=float)
    V = np.diff(t)
    u = np.diff(q) / V
    return float(np.sum(V * sigma(u, q[:-1], t[:-1])))


def cyclic_momentum_check(traj, phi=None):
    """
    Conservation report for a mechanics run.

    Extended runs report max |Pi_j - Pi_0|. Symplectic runs report max |p_{j+1} - p_j|,
    which vanishes when q is cyclic (constant potential), and, if phi is given, the
    energy excursion max |H_j - H_0|, which is measured and not expected to vanish.
    """
    if traj.extended:
        report = {"scheme": "extended",
                  "max_delta_Pi": float(np.max(np.abs(traj.Pi - traj.Pi[0])))}
    else:
        report = {"scheme": "symplectic",
                  "max_delta_p": float(np.max(np.abs(np.diff(traj.p))))}
        if phi is not None:
            H = traj.energy(phi)
            report["energy_excursion"] = float(np.max(np.abs(H - H[0])))
            logger.info("symplectic energy excursion %.3e", report["energy_excursion"])
    return report
