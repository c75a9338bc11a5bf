"""
qwalk-action command line: run one experiment from a configuration file.

    qwalk-action <config-path> [--override key=value ...] [--rapidity R] [--lambda L]

Writes CSV/JSON artifacts into output_path, prints one PASS/FAIL line per assertion and
exits 0 when every assertion passes, 1 when one fails, 2 on usage or configuration errors.
"""

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import export
from .continuum_limit import (
    FASTER_DECAY_ORDER,
    SCALING_FIT_TOL,
    action_term_scaling,
    convergence_study,
    walk_eigenphases,
)
from .discrete_mechanics import (
    Potential,
    cyclic_momentum_check,
    energy_drift_check,
    run_extended,
    run_symplectic,
    time_reversal_error,
)
from .extended_action import (
    CoordinateField,
    coordinate_gradients,
    derivative_discrepancy,
    functional_derivatives_closed_form,
    functional_derivatives_fd,
    naive_action,
    onshell_energy_momentum_check,
    sigma_terms,
)
from .lattice_core import action_S, alternate_action, evolve, onshell_partner, stationarity_residual
from .lorentz_covariance import (
    FrameSpec,
    clifford_check,
    dirac_lagrangian,
    frame_invariance_report,
    stress_energy_grid,
    stress_energy_transform,
)
from .observables import (
    charge_residual_field,
    conservation_report,
    energy_residual_field,
    totals,
)
from .run_config import ConfigError, build_coin, build_state, effective_rapidity, parse_config

logger = logging.getLogger(__name__)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_RAPIDITIES = (-1.0, -0.5, 0.1, 0.5, 1.0)
FD_DERIVATIVE_TOL = 1e-6
STATIONARITY_TOL = 1e-7
FRAME_INVARIANCE_TOL = 1e-10
VOLUME_TOL = 1e-13
CLIFFORD_TOL = 1e-13
MIN_ORDER = 0.9


class Checks:
    """Collects named assertions and prints a PASS/FAIL line for each."""

    def __init__(self):
        self.items = []

    def add(self, name, value, tol, passed=None):
        value = float(value)
        passed = bool(value < tol) if passed is None else bool(passed)
        self.items.append({"name": name, "value": value, "tol": tol, "passed": passed})
        print(f"{'PASS' if passed else 'FAIL'} {name} = {value:.3e} (tol {tol:.1e})")

    def at_least(self, name, value, bound):
        self.add(name, value, bound, passed=value >= bound)

    @property
    def passed(self):
        return all(item["passed"] for item in self.items)


def threads_from_env():
    raw = os.environ.get("QWALK_THREADS", "1")
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigError(f"QWALK_THREADS must be a positive integer, got '{raw}'")
    if threads < 1:
        raise ConfigError(f"QWALK_THREADS must be a positive integer, got '{raw}'")
    return threads


def run_simulate(spec, out, checks, threads):
    coin, state = build_coin(spec), build_state(spec)
    traj = evolve(state, coin, int(spec.steps))
    density = np.sum(np.abs(traj.slices) ** 2, axis=1)
    export.write_csv(export.field_rows(density, "charge"), out, "trajectory.csv")
    tot = totals(traj, coin)
    export.write_csv([{"j": j, "Q": q} for j, q in enumerate(tot.Q)], out, "norm.csv")
    checks.add("norm_drift", tot.drift()["Q"] / tot.Q[0], spec.tolerance)
    action = action_S(traj, coin)
    checks.add("action_S", abs(action), 1e-13 * len(traj) * traj.n_sites)
    result = {"action_S": action}
    if len(traj) >= 3:
        residual = stationarity_residual(traj, coin, spec.fd_step)
        checks.add("stationarity_residual", residual, STATIONARITY_TOL)
        result["stationarity_residual"] = residual
    return result


def _conserve_trial(spec, trial):
    coin = build_coin(spec, seed_offset=trial)
    traj = evolve(build_state(spec), coin, int(spec.steps))
    return traj, coin, conservation_report(traj, coin, spec.tolerance)


def run_conserve(spec, out, checks, threads):
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(lambda t: _conserve_trial(spec, t), range(int(spec.trials))))
    traj, coin, _ = results[0]
    export.write_csv(export.field_rows(charge_residual_field(traj), "residual"), out,
                     "charge_residual.csv")
    if not coin.time_dependent:
        field = energy_residual_field(traj, coin, allow_inhomogeneous=True)
        export.write_csv(export.field_rows(field, "residual"), out, "energy_residual.csv")
    rows = []
    for trial, (t_traj, t_coin, _) in enumerate(results):
        tot = totals(t_traj, t_coin)
        rows += [{"trial": trial, "j": j, "H": h, "P": p, "Q": q}
                 for j, (h, p, q) in enumerate(tot.rows())]
    export.write_csv(rows, out, "totals.csv")

    worst = {}
    for _, _, report in results:
        for name, value, tol, _ in report["checks"]:
            worst[name] = max(worst.get(name, 0.0), value)
    for name, value in worst.items():
        checks.add(name, value, spec.tolerance)
    momentum = max(report["momentum_local_balance"] for _, _, report in results)
    logger.info("momentum local balance (not asserted): %.3e", momentum)
    result = {"momentum_local_balance": momentum,
              "drift": [report["drift"] for _, _, report in results]}
    inhomogeneous = [r["inhomogeneous_energy"] for _, _, r in results
                     if "inhomogeneous_energy" in r]
    if inhomogeneous:
        result["inhomogeneous_energy"] = inhomogeneous
        logger.info("site-dependent coin energy residual (not asserted): %.3e",
                    max(e["residual"] for e in inhomogeneous))
    return result


def run_extended_action(spec, out, checks, threads):
    coin = build_coin(spec)
    phi = evolve(build_state(spec), coin, int(spec.steps))
    psi = onshell_partner(phi, coin)
    X = CoordinateField.grid(len(phi), phi.n_sites)
    terms = sigma_terms(phi, psi, coin, X)
    alternate = alternate_action(phi, psi, coin, first_slice=1)
    export.write_csv([{"term": name, "value": value} for name, value in terms.as_dict().items()]
                     + [{"term": "alternate_action", "value": alternate}], out,
                     "sigma_terms.csv")
    checks.add("sigma_minus_alternate", abs(terms.sigma - alternate), spec.tolerance)
    checks.add("M2_on_grid", np.max(np.abs(terms.densities["M2"])), spec.tolerance)

    closed = functional_derivatives_closed_form(phi, psi, coin, X)
    fd = functional_derivatives_fd(phi, psi, coin, X)
    checks.add("derivative_fd_discrepancy", derivative_discrepancy(closed, fd),
               FD_DERIVATIVE_TOL)
    a, b, c, d = (f.values for f in closed.as_tuple())
    rows = [{"j": j + 1, "p": p, "dS_da": a[j, p], "dS_db": b[j, p], "dS_dc": c[j, p],
             "dS_dd": d[j, p]} for j in range(a.shape[0]) for p in range(a.shape[1])]
    export.write_csv(rows, out, "functional_derivatives.csv")

    onshell = onshell_energy_momentum_check(phi, coin, spec.tolerance)
    checks.add("onshell_energy_momentum", onshell["discrepancy"], spec.tolerance)
    naive = naive_action(phi, psi, coin, X)
    return {"sigma_terms": terms.as_dict(), "alternate_action": alternate,
            "onshell": onshell, "naive_action": naive}


def _smooth_fields(n):
    t, x = np.meshgrid(np.linspace(0.0, 1.0, n), np.linspace(0.0, 1.0, n), indexing="ij")
    envelope = np.exp(-((x - 0.5) ** 2 + (t - 0.5) ** 2) / 0.1)
    return np.stack([envelope * np.exp(2j * np.pi * (x - t)),
                     (1.0 + 0.5j) * envelope * np.exp(-2j * np.pi * (x + t))])


def run_lorentz(spec, out, checks, threads):
    rapidity = effective_rapidity(spec)
    frame = FrameSpec(rapidity, spec.lam)
    coin = build_coin(spec)
    phi = evolve(build_state(spec), coin, int(spec.steps))
    psi = onshell_partner(phi, coin)

    rapidities = spec.rapidities or tuple(sorted(set(DEFAULT_RAPIDITIES) | {rapidity}))
    report = frame_invariance_report(phi, psi, coin, rapidities, FRAME_INVARIANCE_TOL)
    checks.add("sigma_L_frame_invariance", report["max_difference"], FRAME_INVARIANCE_TOL)
    volume = coordinate_gradients(frame.coordinates(2, phi.n_sites)).delta
    checks.add("volume_element", np.max(np.abs(volume - 1.0)), VOLUME_TOL)

    boosted = stress_energy_transform(stress_energy_grid(phi, coin), frame)
    rows = []
    for j in range(len(phi)):
        for p in range(phi.n_sites):
            rows.append({"j": j, "p": p,
                         "T0j": boosted.tensor[0, 0, j, p], "T0p": boosted.tensor[0, 1, j, p],
                         "T1j": boosted.tensor[1, 0, j, p], "T1p": boosted.tensor[1, 1, j, p]})
    export.write_csv(rows, out, "stress_energy_frame.csv")
    residuals = boosted.conservation_residuals()
    checks.add("stress_energy_conservation", max(residuals.values()), spec.tolerance)

    fields, h = _smooth_fields(64), 1.0 / 63
    grid_value = dirac_lagrangian(fields, spec.mass, FrameSpec.identity(), h, h)
    frame_value = dirac_lagrangian(fields, spec.mass, frame, h, h)
    checks.add("dirac_lagrangian_frame_equality",
               np.max(np.abs(frame_value - grid_value)) / max(1.0, np.max(np.abs(grid_value))),
               spec.tolerance)
    checks.add("clifford_preservation", clifford_check(frame.lam), CLIFFORD_TOL)
    report["stress_energy_residuals"] = residuals
    export.write_json(report, out, "invariance_report.json")
    return report


def run_continuum(spec, out, checks, threads):
    table = convergence_study(spec.mass, spec.wavenumber, spec.t_final, spec.epsilon_list,
                              threads=threads)
    export.write_csv(table.rows(), out, "convergence.csv")
    if table.roundoff_limited:
        print(f"NOTE massless walk is exact; errors at round-off, order {table.order:.3f} "
              "not asserted")
        checks.add("massless_error", np.max(table.errors), 1e-10)
    else:
        checks.at_least("convergence_order", table.order, MIN_ORDER)

    scaling = action_term_scaling(spec.mass, spec.wavenumber, spec.epsilon_list)
    rows = [{"epsilon": e, **{name: scaling["magnitudes"][name][i]
                              for name in scaling["magnitudes"]}}
            for i, e in enumerate(scaling["epsilons"])]
    export.write_csv(rows, out, "term_scaling.csv")
    if not table.roundoff_limited:
        for name, excess in scaling["excess_over_leading"].items():
            if excess is not None:
                checks.at_least(f"faster_decay_{name}", excess,
                                FASTER_DECAY_ORDER - SCALING_FIT_TOL)

    eps = min(spec.epsilon_list)
    ks = np.linspace(-0.9, 0.9, 61) * np.pi / eps
    phases = walk_eigenphases(spec.mass, eps, ks)
    rows = [{"k": k, "theta_minus": lo, "theta_plus": hi, "dirac": eps * np.hypot(k, spec.mass)}
            for k, (lo, hi) in zip(ks, phases)]
    export.write_csv(rows, out, "dispersion.csv")
    expected = np.cos(eps * spec.mass) * np.cos(eps * ks)
    checks.add("dispersion_relation", np.max(np.abs(np.cos(phases[:, 1]) - expected)), 1e-12)
    return {"order": table.order, "roundoff_limited": table.roundoff_limited,
            "slopes": scaling["slopes"]}


def run_mechanics(spec, out, checks, threads):
    phi = Potential.named(spec.potential)
    phi.check_consistency()
    traj = run_symplectic(spec.q0, spec.p0, phi, int(spec.mech_steps))
    export.write_csv(traj.rows(phi), out, "mechanics_symplectic.csv")
    checks.add("energy_drift_identity", energy_drift_check(traj, phi), spec.tolerance)
    checks.add("time_reversal", time_reversal_error(traj, phi), spec.tolerance)
    symplectic = cyclic_momentum_check(traj, phi)
    if spec.potential in ("free", "constant"):
        checks.add("free_momentum_change", symplectic["max_delta_p"], spec.tolerance,
                   passed=symplectic["max_delta_p"] == 0.0)
        checks.add("free_energy_change", symplectic["energy_excursion"], spec.tolerance,
                   passed=symplectic["energy_excursion"] == 0.0)

    ext = run_extended(spec.q0, spec.p0, phi, int(spec.extended_steps), spec.v0,
                       spec.solver_tol)
    export.write_csv(ext.rows(phi), out, "mechanics_extended.csv")
    extended = cyclic_momentum_check(ext)
    checks.add("extended_Pi_conservation", extended["max_delta_Pi"], 100 * spec.solver_tol)
    return {"symplectic": symplectic, "extended": extended}


EXPERIMENT_RUNNERS = {
    "simulate": run_simulate,
    "conserve": run_conserve,
    "extended": run_extended_action,
    "lorentz": run_lorentz,
    "continuum": run_continuum,
    "mechanics": run_mechanics,
}


def run(spec, threads=1):
    """
    Run one experiment and write its artifacts.

    Args:
        spec: RunSpec
        threads: worker cap for independent sub-runs

    Returns:
        int: EXIT_PASS if every assertion passed, else EXIT_FAIL
    """
    out = spec.output_path
    checks = Checks()
    logger.info("running %s into %s", spec.experiment, out)
    result = EXPERIMENT_RUNNERS[spec.experiment](spec, out, checks, threads)
    export.write_json({"experiment": spec.experiment, "result": result,
                       "checks": checks.items, "passed": checks.passed}, out, "report.json")
    print(f"artifacts written to {os.path.abspath(out)}")
    return EXIT_PASS if checks.passed else EXIT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qwalk-action",
        description="Run a discrete-time quantum walk action experiment.",
    )
    parser.add_argument("config", help="path to a key=value configuration file")
    parser.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="override a configuration key (repeatable)")
    parser.add_argument("--rapidity", type=float, help="shorthand for --override rapidity=R")
    parser.add_argument("--lambda", dest="lam", type=float,
                        help="shorthand for --override lambda=L")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s")

    overrides = list(args.override)
    if args.rapidity is not None:
        overrides.append(f"rapidity={args.rapidity!r}")
    if args.lam is not None:
        overrides.append(f"lambda={args.lam!r}")
    try:
        with open(args.config, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        print(f"error: cannot read config: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        spec = parse_config(text, overrides)
        threads = threads_from_env()
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(spec, threads)
    except (ValueError, RuntimeError, OSError) as e:
        print(f"error: {spec.experiment}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
