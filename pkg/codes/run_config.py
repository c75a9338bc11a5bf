"""
Run configuration for the qwalk-action CLI.

A configuration is a flat ``key=value`` document, one key per line, '#' starting a
comment. Scalar values are typed by yaml.safe_load; comma-separated lists become lists of
floats. Every error reports the line it comes from (line 0 for command-line overrides).
"""

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import yaml

from .lattice_core import MINUS, NAMED_COINS, PLUS, CoinField, SpinorField, coin_from_angles

EXPERIMENTS = ("simulate", "conserve", "extended", "lorentz", "continuum", "mechanics")
POTENTIALS = ("free", "constant", "linear", "harmonic")
STRING_KEYS = ("experiment", "coin", "initial_state", "potential", "output_path")
LIST_KEYS = ("epsilon_list", "rapidities")
COMPONENTS = {"minus": MINUS, "plus": PLUS}


class ConfigError(ValueError):
    """Invalid configuration; `line` is the offending line (0 for overrides, None if absent)."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.message = message
        self.line = line

    def __str__(self):
        if self.line is None:
            return self.message
        return f"line {self.line}: {self.message}"


@dataclass(frozen=True)
class RunSpec:
    experiment: str
    n_sites: int = 64
    steps: int = 32
    seed: int = 0
    coin: str = "hadamard"
    initial_state: str = "random:0"
    fd_step: float = 1e-5
    tolerance: float = 1e-12
    trials: int = 1
    rapidity: float = 0.5
    rapidities: Optional[tuple] = None
    mass: float = 1.0
    wavenumber: float = math.pi / 8
    t_final: float = 4.0
    epsilon_list: tuple = (0.1, 0.05, 0.025)
    potential: str = "harmonic"
    q0: float = 0.8
    p0: float = -0.6
    mech_steps: int = 10000
    extended_steps: int = 50
    v0: float = 1e-3
    solver_tol: float = 1e-12
    output_path: str = "qwalk_output"
    lam: Optional[float] = None
    lines: dict = field(default_factory=dict, compare=False, repr=False)

    def line_of(self, key):
        return self.lines.get(key)


# config key -> RunSpec field
KEY_FIELDS = {
    f.name: f.name for f in dataclasses.fields(RunSpec) if f.name not in ("lines", "lam")
}
KEY_FIELDS["lambda"] = "lam"


def _parse_value(key, raw, line):
    raw = raw.strip()
    if key in STRING_KEYS:
        return raw
    if key in LIST_KEYS:
        try:
            return tuple(float(v) for v in raw.split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"{key} must be a comma-separated list of numbers", line)
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError:
        raise ConfigError(f"cannot parse value for {key}: '{raw}'", line)
    if isinstance(value, str):
        # PyYAML reads exponents without a dot (1e-5) as strings
        try:
            value = float(value)
        except ValueError:
            pass
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be numeric, got '{raw}'", line)
    return value


def _entries(text, first_line=1):
    for offset, raw_line in enumerate(text.splitlines()):
        line = first_line + offset
        content = raw_line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigError(f"expected key=value, got '{content}'", line)
        key, value = content.split("=", 1)
        yield key.strip(), value, line


def parse_config(text, overrides=()):
    """
    Parse and validate a configuration document.

    Args:
        text: key=value document
        overrides: extra "key=value" strings applied afterwards (reported as line 0)

    Returns:
        RunSpec

    Raises:
        ConfigError: Unknown key, missing experiment or invalid value
    """
    values, lines = {}, {}
    entries = list(_entries(text))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got '{item}'", 0)
        key, value = item.split("=", 1)
        entries.append((key.strip(), value, 0))
    for key, raw, line in entries:
        if key not in KEY_FIELDS:
            raise ConfigError(f"unknown key '{key}'", line)
        name = KEY_FIELDS[key]
        values[name] = _parse_value(key, raw, line)
        lines[name] = line
    spec = RunSpec(**{"experiment": None, **values}, lines=lines)
    validate(spec)
    return spec


def _require(condition, message, spec, key):
    if not condition:
        raise ConfigError(message, spec.line_of(key))


def _is_int(value):
    return isinstance(value, int) or (isinstance(value, float) and value.is_integer())


def validate(spec):
    _require(_is_int(spec.n_sites) and spec.n_sites >= 4 and int(spec.n_sites) % 2 == 0,
             "n_sites must be even and ≥ 4", spec, "n_sites")
    _require(_is_int(spec.steps) and spec.steps >= 1, "steps must be ≥ 1", spec, "steps")
    _require(_is_int(spec.trials) and spec.trials >= 1, "trials must be ≥ 1", spec, "trials")
    _require(_is_int(spec.seed) and spec.seed >= 0, "seed must be a non-negative integer",
             spec, "seed")
    _require(1e-7 <= spec.fd_step <= 1e-3, "fd_step must lie in [1e-7, 1e-3]", spec, "fd_step")
    _require(spec.tolerance > 0, "tolerance must be positive", spec, "tolerance")
    _require(math.isfinite(spec.rapidity), "rapidity must be finite", spec, "rapidity")
    if spec.lam is not None:
        _require(spec.lam > 0, "lambda must be positive", spec, "lam")
        if "rapidity" in spec.lines:
            boost = math.exp(spec.rapidity)
            _require(abs(spec.lam**2 - boost) <= 1e-12 * boost,
                     "lambda must equal exp(rapidity/2)", spec, "lam")
    _require(spec.mass >= 0, "mass must be non-negative", spec, "mass")
    _require(spec.t_final > 0, "t_final must be positive", spec, "t_final")
    _require(len(spec.epsilon_list) >= 3 and min(spec.epsilon_list) > 0,
             "epsilon_list needs at least 3 positive values", spec, "epsilon_list")
    _require(spec.potential in POTENTIALS,
             f"potential must be one of {', '.join(POTENTIALS)}", spec, "potential")
    _require(_is_int(spec.mech_steps) and spec.mech_steps >= 1, "mech_steps must be ≥ 1",
             spec, "mech_steps")
    _require(_is_int(spec.extended_steps) and spec.extended_steps >= 1,
             "extended_steps must be ≥ 1", spec, "extended_steps")
    _require(spec.v0 > 0, "v0 must be positive", spec, "v0")
    _require(spec.solver_tol > 0, "solver_tol must be positive", spec, "solver_tol")
    _require(bool(spec.output_path), "output_path must not be empty", spec, "output_path")
    build_coin(spec)
    build_state(spec)
    if spec.experiment is None:
        raise ConfigError("experiment required")
    _require(spec.experiment in EXPERIMENTS,
             f"experiment must be one of {', '.join(EXPERIMENTS)}", spec, "experiment")


def effective_rapidity(spec):
    """Rapidity of the run; a lone lambda sets it to 2 ln(lambda)."""
    if spec.lam is not None and "rapidity" not in spec.lines:
        return 2.0 * math.log(spec.lam)
    return spec.rapidity


def build_coin(spec, seed_offset=0):
    """
    Coin field named by spec.coin.

    seed_offset shifts the seed of random coins, which the conserve experiment uses to
    draw independent trials.
    """
    n = int(spec.n_sites)
    kind, _, arg = spec.coin.partition(":")
    try:
        if kind in NAMED_COINS and not arg:
            return CoinField.named(kind, n)
        if kind == "angles":
            angles = [float(a) for a in arg.split(",")]
            if not 1 <= len(angles) <= 4:
                raise ValueError("angles takes theta[,xi,zeta,alpha]")
            return CoinField.homogeneous(coin_from_angles(*angles), n)
        seed = int(arg) + seed_offset if arg else int(spec.seed) + seed_offset
        rng = np.random.default_rng(seed)
        if kind == "random":
            return CoinField.haar(n, rng)
        if kind == "random-field":
            return CoinField.haar_field(n, rng)
        if kind == "random-spacetime":
            return CoinField.haar_field(n, rng, n_steps=int(spec.steps))
    except ValueError as e:
        raise ConfigError(f"invalid coin '{spec.coin}': {e}", spec.line_of("coin"))
    raise ConfigError(f"unknown coin '{spec.coin}'", spec.line_of("coin"))


def _component(name, spec):
    if name not in COMPONENTS:
        raise ConfigError(f"component must be minus or plus, got '{name}'",
                          spec.line_of("initial_state"))
    return COMPONENTS[name]


def build_state(spec):
    n = int(spec.n_sites)
    parts = spec.initial_state.split(":")
    kind, args = parts[0], parts[1:]
    line = spec.line_of("initial_state")
    try:
        if kind == "random":
            seed = int(args[0]) if args else int(spec.seed)
            return SpinorField.random(n, np.random.default_rng(seed))
        if kind == "delta" and args:
            comp = _component(args[1], spec) if len(args) > 1 else MINUS
            return SpinorField.delta(n, int(args[0]), comp)
        if kind == "plane_wave" and args:
            comp = _component(args[1], spec) if len(args) > 1 else PLUS
            return SpinorField.plane_wave(n, int(args[0]), comp)
        if kind == "gaussian" and args:
            numbers = [float(a) for a in args[0].split(",")]
            if len(numbers) not in (2, 3) or numbers[1] <= 0:
                raise ValueError("gaussian takes center,width[,k_index] with width > 0")
            k_index = int(numbers[2]) if len(numbers) == 3 else 0
            return SpinorField.gaussian(n, numbers[0], numbers[1], k_index)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(f"invalid initial_state '{spec.initial_state}': {e}", line)
    raise ConfigError(f"unknown initial_state '{spec.initial_state}'", line)
