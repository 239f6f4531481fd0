"""
Plain-text run configuration.

One ``key = value`` per line with dotted section prefixes; ``#`` starts a
comment. Example::

    solver.n = 32
    solver.t_end = 0.1
    ic.type = abc
    cylinder.0.x0 = 3.14, 3.14, 3.14
    cylinder.0.t0 = 0.1
    cylinder.0.r = 0.15
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from pathlib import Path

import numpy as np

from .cutoff import Cylinder, CutoffSpec
from .flows import init_abc, init_perturbed_beltrami, init_random_solenoidal, init_taylor_green
from .solver import SCHEMES, SolverConfig
from .spectral import Grid

__all__ = ["ConfigError", "InitialCondition", "RunConfig", "parse_config", "load_config", "IC_TYPES"]

IC_TYPES = ("abc", "taylor-green", "random", "perturbed-beltrami")

# key -> (type, default); None marks a required key
_SCALAR_KEYS = {
    "solver.n": (int, 32),
    "solver.box_length": (float, 2.0 * math.pi),
    "solver.nu": (float, 1.0),
    "solver.dt": (float, 1e-3),
    "solver.t_end": (float, None),
    "solver.snapshot_interval": (float, 0.01),
    "solver.scheme": (str, SCHEMES[0]),
    "ic.type": (str, None),
    "ic.A": (float, 1.0),
    "ic.B": (float, 1.0),
    "ic.C": (float, 1.0),
    "ic.amplitude": (float, 1.0),
    "ic.seed": (int, 0),
    "ic.slope": (float, 4.0),
    "ic.k_peak": (float, 2.0),
    "ic.epsilon": (float, 0.0),
    "diagnostics.M": (float, 1.0),
    "diagnostics.eps_reg": (float, None),
    "cutoff.delta": (float, 0.5),
    "cutoff.profile_order": (int, 1),
    "output.dir": (str, "run"),
}
_OPTIONAL_NONE = {"diagnostics.eps_reg"}
_CYLINDER_FIELDS = ("x0", "t0", "r")


class ConfigError(ValueError):
    """Invalid configuration; ``line`` is the 1-based source line when known."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass(frozen=True)
class InitialCondition:
    """Tagged initial-condition choice."""

    kind: str
    params: dict = field(default_factory=dict)

    def build(self, grid: Grid) -> np.ndarray:
        p = self.params
        if self.kind == "abc":
            return init_abc(grid, p["A"], p["B"], p["C"])
        if self.kind == "taylor-green":
            return init_taylor_green(grid, p["amplitude"])
        if self.kind == "random":
            return init_random_solenoidal(grid, p["seed"], p["slope"], p["k_peak"], p["amplitude"])
        return init_perturbed_beltrami(grid, p["epsilon"], p["seed"], p["A"], p["B"], p["C"], p["k_peak"])


@dataclass(frozen=True)
class RunConfig:
    solver: SolverConfig
    initial_condition: InitialCondition
    cylinders: tuple[Cylinder, ...]
    M: float
    delta: float
    eps_reg: float | None
    output_dir: Path
    profile_order: int = 1

    @property
    def grid(self) -> Grid:
        return self.solver.grid

    def cutoff_spec(self, index: int) -> CutoffSpec:
        return CutoffSpec(self.cylinder(index), self.delta, self.profile_order)

    def cylinder(self, index: int) -> Cylinder:
        if not 0 <= index < len(self.cylinders):
            raise ConfigError(f"no cylinder {index}; the config defines {len(self.cylinders)}")
        return self.cylinders[index]


def _convert(kind, raw: str, key: str, line: int):
    try:
        if kind is int:
            value = float(raw)
            if value != int(value):
                raise ValueError
            return int(value)
        if kind is float:
            value = float(raw)
            if math.isnan(value):
                raise ValueError
            return value
        return raw
    except ValueError:
        raise ConfigError(f"cannot parse {key} = {raw!r} as {kind.__name__}", line) from None


def _parse_vector(raw: str, key: str, line: int) -> tuple[float, float, float]:
    parts = [p for p in raw.replace(",", " ").split() if p]
    if len(parts) != 3:
        raise ConfigError(f"{key} needs three coordinates, got {raw!r}", line)
    return tuple(_convert(float, p, key, line) for p in parts)


def parse_config(text: str) -> RunConfig:
    """
    Parse and validate a configuration.

    Required keys are ``ic.type`` and ``solver.t_end``. Cylinders are given as
    ``cylinder.<i>.x0``, ``cylinder.<i>.t0`` and ``cylinder.<i>.r`` with
    consecutive indices from 0.
    """
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    cyl_raw: dict[int, dict[str, tuple[object, int]]] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        content = raw_line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigError(f"expected 'key = value', got {content!r}", lineno)
        key, raw = (s.strip() for s in content.split("=", 1))
        if not raw:
            raise ConfigError(f"{key} has no value", lineno)
        if key in lines:
            raise ConfigError(f"{key} set twice (first on line {lines[key]})", lineno)
        lines[key] = lineno
        parts = key.split(".")
        if parts[0] == "cylinder":
            if len(parts) != 3 or not parts[1].isdigit() or parts[2] not in _CYLINDER_FIELDS:
                raise ConfigError(f"unknown key {key!r}; cylinders use cylinder.<i>.x0|t0|r", lineno)
            name = parts[2]
            value = _parse_vector(raw, key, lineno) if name == "x0" else _convert(float, raw, key, lineno)
            cyl_raw.setdefault(int(parts[1]), {})[name] = (value, lineno)
            continue
        if key not in _SCALAR_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        values[key] = _convert(_SCALAR_KEYS[key][0], raw, key, lineno)

    for key, (_, default) in _SCALAR_KEYS.items():
        if key not in values:
            if default is None and key not in _OPTIONAL_NONE:
                raise ConfigError(f"missing required key {key}")
            values[key] = default

    def at(key):
        return lines.get(key)

    ic_type = values["ic.type"]
    if ic_type not in IC_TYPES:
        raise ConfigError(f"ic.type must be one of {IC_TYPES}, got {ic_type!r}", at("ic.type"))
    try:
        grid = Grid(values["solver.n"], values["solver.box_length"], values["solver.nu"])
    except ValueError as exc:
        msg = str(exc)
        bad = "solver.n" if "grid size" in msg else "solver.box_length" if "box_length" in msg else "solver.nu"
        raise ConfigError(msg, at(bad)) from None
    interval = min(values["solver.snapshot_interval"], values["solver.t_end"])
    try:
        solver = SolverConfig(grid, values["solver.dt"], values["solver.t_end"], interval, values["solver.scheme"])
    except ValueError as exc:
        raise ConfigError(str(exc), at("solver.dt") or at("solver.t_end")) from None

    params = {k.split(".", 1)[1]: values[k] for k in _SCALAR_KEYS if k.startswith("ic.") and k != "ic.type"}
    try:
        ic = InitialCondition(ic_type, params)
        if params["epsilon"] < 0:
            raise ValueError(f"ic.epsilon must be non-negative, got {params['epsilon']}")
        if params["k_peak"] <= 0 or params["slope"] <= 0:
            raise ValueError("ic.k_peak and ic.slope must be positive")
    except ValueError as exc:
        raise ConfigError(str(exc), at("ic.epsilon") or at("ic.k_peak") or at("ic.slope")) from None

    cylinders = []
    for idx in sorted(cyl_raw):
        if idx != len(cylinders):
            first = min(ln for _, ln in cyl_raw[idx].values())
            raise ConfigError(f"cylinder indices must be consecutive from 0; found {idx}", first)
        entry = cyl_raw[idx]
        missing = [f for f in _CYLINDER_FIELDS if f not in entry]
        first = min(ln for _, ln in entry.values())
        if missing:
            raise ConfigError(f"cylinder {idx} is missing {', '.join(missing)}", first)
        try:
            cyl = Cylinder(entry["x0"][0], entry["t0"][0], entry["r"][0])
            cyl.validate(grid)
            if cyl.t0 > solver.t_end + 1e-12:
                raise ValueError(f"t0={cyl.t0} is after t_end={solver.t_end}")
        except ValueError as exc:
            raise ConfigError(f"invalid cylinder {idx}: {exc}", entry["r"][1]) from None
        cylinders.append(cyl)

    M = values["diagnostics.M"]
    if not M >= 0:
        raise ConfigError(f"diagnostics.M must be non-negative, got {M}", at("diagnostics.M"))
    eps = values["diagnostics.eps_reg"]
    if eps is not None and not eps > 0:
        raise ConfigError(f"diagnostics.eps_reg must be positive, got {eps}", at("diagnostics.eps_reg"))
    try:
        CutoffSpec(Cylinder((0, 0, 0), 0, 1), values["cutoff.delta"], values["cutoff.profile_order"])
    except ValueError as exc:
        raise ConfigError(str(exc), at("cutoff.delta") or at("cutoff.profile_order")) from None

    return RunConfig(
        solver=solver,
        initial_condition=ic,
        cylinders=tuple(cylinders),
        M=M,
        delta=values["cutoff.delta"],
        eps_reg=eps,
        output_dir=Path(values["output.dir"]),
        profile_order=values["cutoff.profile_order"],
    )


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())
