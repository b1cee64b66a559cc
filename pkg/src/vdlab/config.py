"""Flat sectioned key = value run configuration.

Grammar: INI-style sections with scalar values only — no nesting, no
interpolation.  Lists are comma-separated; intervals are written lo:hi.
Unknown sections or keys are rejected, every parse error names the
offending section.key.

    [run]
    experiment = identity-suite   ; one of the seven experiment names
    seed = 3
    out = runs/demo               ; optional, overridden by --out / VDLAB_OUT

    [grid]
    extents = 0:6.283185307179586, 0:6.283185307179586
    points = 32, 32
    metric = 1, -1
    boundary = periodic, periodic
    stencil_order = 2

    [physics]
    mass = 1.0
    hbar = 1.0
    kappa = 1.0
    sigma = 1.0
    lam0 = 0.75
    x0 = 1.2
    domain = 1.0:3.0
    m_sequence = 0.8, 0.4, 0.2, 0.1, 0.05, 0.025, 0.0125
    probes = 1.8, 2.4
    protocol = re-solved
    anchor_scaling = proportional
    vacuum_mass = 0.45
    k_max = 4.0
    include_conformal = false

    [numerics]
    delta_u = 1e-6
    delta_q = 1e-6
    gradient_eps = 1e-6
    gradient_tol = 1e-3
    refine_levels = 3
    n_k = 50
    smoothness = 1.0
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .grid import ONE_SIDED, PERIODIC, SpacetimeGrid

EXPERIMENTS = (
    "identity-suite",
    "convergence-suite",
    "lambda-profile",
    "mass-landscape",
    "neutrino-limit",
    "dispersion-scan",
    "action-gradient",
)


class ConfigError(ValueError):
    """Malformed run configuration; the message names section.key."""


def _fail(section: str, key: str, why: str) -> None:
    raise ConfigError(f"config error at {section}.{key}: {why}")


@dataclass(frozen=True)
class PhysicsParams:
    mass: float = 1.0
    hbar: float = 1.0
    kappa: float = 1.0
    sigma: float = 1.0
    lam0: float = 0.75
    x0: float = 1.2
    domain: tuple[float, float] = (1.0, 3.0)
    m_sequence: tuple[float, ...] = (0.8, 0.4, 0.2, 0.1, 0.05, 0.025, 0.0125)
    probes: tuple[float, ...] = (1.8, 2.4)
    protocol: str = "re-solved"
    anchor_scaling: str = "proportional"
    vacuum_mass: float = 0.45
    k_max: float = 4.0
    include_conformal: bool = False


@dataclass(frozen=True)
class NumericsParams:
    delta_u: float = 1e-6
    delta_q: float = 1e-6
    gradient_eps: float = 1e-6
    gradient_tol: float = 1e-3
    refine_levels: int = 3
    n_k: int = 50
    smoothness: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    seed: int
    out: str | None
    grid: SpacetimeGrid
    physics: PhysicsParams
    numerics: NumericsParams
    raw: dict = field(repr=False, default_factory=dict)


_GRID_DEFAULTS = {
    "extents": "0:6.283185307179586, 0:6.283185307179586",
    "points": "32, 32",
    "metric": "1, -1",
    "boundary": "periodic, periodic",
    "stencil_order": "2",
}

_KNOWN_KEYS = {
    "run": {"experiment", "seed", "out"},
    "grid": set(_GRID_DEFAULTS),
    "physics": {f.name for f in PhysicsParams.__dataclass_fields__.values()},
    "numerics": {f.name for f in NumericsParams.__dataclass_fields__.values()},
}


def _parse_float(section: str, key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        _fail(section, key, f"expected a number, got {text!r}")


def _parse_int(section: str, key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        _fail(section, key, f"expected an integer, got {text!r}")


def _parse_bool(section: str, key: str, text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    _fail(section, key, f"expected true/false, got {text!r}")


def _parse_list(section: str, key: str, text: str, conv) -> tuple:
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        _fail(section, key, "expected a comma-separated list")
    return tuple(conv(section, key, s) for s in items)


def _parse_interval(section: str, key: str, text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        _fail(section, key, f"expected lo:hi, got {text!r}")
    lo = _parse_float(section, key, parts[0])
    hi = _parse_float(section, key, parts[1])
    if not lo < hi:
        _fail(section, key, f"interval must increase, got {text!r}")
    return lo, hi


def _build_grid(raw: dict[str, str]) -> SpacetimeGrid:
    section = "grid"
    extents = _parse_list(
        section, "extents", raw["extents"], lambda s, k, t: _parse_interval(s, k, t)
    )
    points = _parse_list(section, "points", raw["points"], _parse_int)
    metric = _parse_list(section, "metric", raw["metric"], _parse_float)
    boundary = tuple(s.strip() for s in raw["boundary"].split(",") if s.strip())
    for b in boundary:
        if b not in (PERIODIC, ONE_SIDED):
            _fail(section, "boundary", f"each entry must be periodic or one-sided, got {b!r}")
    order = _parse_int(section, "stencil_order", raw["stencil_order"])
    if order not in (2, 4):
        _fail(section, "stencil_order", f"must be 2 or 4, got {order}")
    if not len(extents) == len(points) == len(metric) == len(boundary):
        _fail(section, "points", "extents, points, metric and boundary lengths differ")
    for n in points:
        if n < 5:
            _fail(section, "points", f"at least 5 points per axis required, got {n}")
    try:
        return SpacetimeGrid(
            extents=extents,
            points=points,
            metric=metric,
            boundary=boundary,
            stencil_order=order,
        )
    except ValueError as exc:
        _fail(section, "extents", str(exc))


def _merged_raw(parser: configparser.ConfigParser) -> dict[str, dict[str, str]]:
    raw: dict[str, dict[str, str]] = {
        "run": {},
        "grid": dict(_GRID_DEFAULTS),
        "physics": {},
        "numerics": {},
    }
    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"config error at {section}: unknown section")
        for key, value in parser.items(section):
            if key not in _KNOWN_KEYS[section]:
                _fail(section, key, "unknown key")
            raw[section][key] = value.strip()
    return raw


def _physics_from(raw: dict[str, str]) -> PhysicsParams:
    kwargs = {}
    for key, value in raw.items():
        if key in ("m_sequence", "probes"):
            kwargs[key] = _parse_list("physics", key, value, _parse_float)
        elif key == "domain":
            kwargs[key] = _parse_interval("physics", key, value)
        elif key == "protocol":
            if value not in ("zero", "fixed", "re-solved"):
                _fail("physics", key, f"must be zero, fixed or re-solved, got {value!r}")
            kwargs[key] = value
        elif key == "anchor_scaling":
            if value not in ("fixed", "proportional"):
                _fail("physics", key, f"must be fixed or proportional, got {value!r}")
            kwargs[key] = value
        elif key == "include_conformal":
            kwargs[key] = _parse_bool("physics", key, value)
        else:
            kwargs[key] = _parse_float("physics", key, value)
    p = PhysicsParams(**kwargs)
    if p.mass <= 0:
        _fail("physics", "mass", "must be positive")
    if p.hbar <= 0:
        _fail("physics", "hbar", "must be positive")
    if p.sigma <= 0:
        _fail("physics", "sigma", "must be positive")
    if any(a <= b for a, b in zip(p.m_sequence, p.m_sequence[1:])) or p.m_sequence[-1] <= 0:
        _fail("physics", "m_sequence", "must be strictly decreasing and positive")
    return p


def _numerics_from(raw: dict[str, str]) -> NumericsParams:
    kwargs = {}
    for key, value in raw.items():
        if key in ("refine_levels", "n_k"):
            kwargs[key] = _parse_int("numerics", key, value)
        else:
            kwargs[key] = _parse_float("numerics", key, value)
    n = NumericsParams(**kwargs)
    if n.refine_levels < 2:
        _fail("numerics", "refine_levels", "need at least 2 levels")
    if n.n_k < 2:
        _fail("numerics", "n_k", "need at least 2 scan points")
    if n.smoothness < 0:
        _fail("numerics", "smoothness", "must be non-negative")
    return n


def apply_overrides(
    raw: dict[str, dict[str, str]], overrides: list[str]
) -> dict[str, dict[str, str]]:
    """Apply --set section.key=value pairs onto the raw string table."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        dotted, value = item.split("=", 1)
        if "." not in dotted:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        section, key = dotted.split(".", 1)
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"config error at {section}: unknown section")
        if key not in _KNOWN_KEYS[section]:
            _fail(section, key, "unknown key")
        raw[section][key] = value.strip()
    return raw


def load_config(path: str | Path, overrides: list[str] | None = None) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(path.read_text(), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"config parse failure in {path}: {exc}") from exc
    raw = _merged_raw(parser)
    if overrides:
        apply_overrides(raw, overrides)

    experiment = raw["run"].get("experiment")
    if experiment is None:
        _fail("run", "experiment", "required")
    if experiment not in EXPERIMENTS:
        _fail("run", "experiment", f"must be one of {', '.join(EXPERIMENTS)}; got {experiment!r}")
    seed = _parse_int("run", "seed", raw["run"].get("seed", "0"))
    out = raw["run"].get("out")

    grid = _build_grid(raw["grid"])
    physics = _physics_from(raw["physics"])
    numerics = _numerics_from(raw["numerics"])
    return RunConfig(
        experiment=experiment,
        seed=seed,
        out=out,
        grid=grid,
        physics=physics,
        numerics=numerics,
        raw=raw,
    )
