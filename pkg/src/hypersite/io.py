"""Run configuration parsing and deterministic file emission.

Config file (JSON)::

    {
      "command": "simulate",                       # optional, must match the subcommand
      "lattice": {"kind": "square", "extent": [4, 4], "step": 1.0},
      "spin": {"s": 0.5} | {"nu": 1.0},           # exactly one of s / nu
      "J": 1.0,
      "gauge": "canonical" | {"random": 3},
      "seed": 0,
      "tolerance": 1e-10,
      "output": {"dir": "out", "format": "csv"},
      "verify":   {"samples": 10000, "kinds": ["chain", "triangular", "square"]},
      "decompose": {"input": "spins.json"},
      "simulate": {"initial": {"family": "random"}, "restarts": 1,
                   "minimize": {"max_sweeps": 10000, "energy_tol": 1e-10},
                   "metropolis": {"beta": 10.0, "sweeps": 100, "proposal_angle": 0.5}},
      "scan": {"steps": [...], "spins": [...], "kappa": 0.1}
    }
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .lattice import LatticeSpec
from .spins import spin_length

COMMANDS = ("verify", "decompose", "simulate", "scan")
FORMATS = ("csv", "json")


@dataclass
class RunConfig:
    command: str
    lattice: LatticeSpec | None = None
    nu: float = 1.0
    J: float = 1.0
    gauge: str = "canonical"
    gauge_seed: int | None = None
    seed: int = 0
    tolerance: float = 1e-10
    out_dir: Path = Path("out")
    fmt: str = "csv"
    parallel: bool = False
    sections: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    def section(self, name: str) -> dict:
        value = self.sections.get(name, {})
        if not isinstance(value, dict):
            raise ConfigurationError(f"field {name!r} must be an object")
        return value

    def gauge_angles(self, n_hyper: int):
        if self.gauge == "canonical":
            return None
        return np.random.default_rng(self.gauge_seed).uniform(0, 2 * np.pi, n_hyper)

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p


def _number(d: dict, key: str, default, kind=float):
    value = d.get(key, default)
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"field {key!r} must be a {kind.__name__}, got {value!r}") from None


def parse_config(raw: dict, command: str | None = None, base_dir: Path | str = ".") -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigurationError("config must be a JSON object")
    cmd = raw.get("command", command)
    if cmd is None:
        raise ConfigurationError("config is missing field 'command'")
    if command is not None and cmd != command:
        raise ConfigurationError(f"config command {cmd!r} does not match subcommand {command!r}")
    if cmd not in COMMANDS:
        raise ConfigurationError(f"field 'command' must be one of {COMMANDS}, got {cmd!r}")

    lattice = None
    if "lattice" in raw:
        lat = raw["lattice"]
        if not isinstance(lat, dict):
            raise ConfigurationError("field 'lattice' must be an object")
        lattice = LatticeSpec.from_dict(lat)
        lattice.validate()
    elif cmd in ("simulate", "scan"):
        raise ConfigurationError("config is missing field 'lattice'")

    spin = raw.get("spin", {"nu": 1.0})
    if not isinstance(spin, dict) or ("s" in spin) == ("nu" in spin):
        raise ConfigurationError("field 'spin' needs exactly one of 's' or 'nu'")
    if "s" in spin:
        try:
            nu = spin_length(_number(spin, "s", None))
        except ValueError as exc:
            raise ConfigurationError(f"field 'spin.s': {exc}") from None
    else:
        nu = _number(spin, "nu", None)
        if not nu > 0:
            raise ConfigurationError("field 'spin.nu' must be positive")

    J = _number(raw, "J", 1.0)
    if not J > 0:
        raise ConfigurationError("field 'J' must be positive")

    gauge, gauge_seed = "canonical", None
    g = raw.get("gauge", "canonical")
    if isinstance(g, dict) and set(g) == {"random"}:
        gauge, gauge_seed = "random", _number(g, "random", None, int)
    elif g != "canonical":
        raise ConfigurationError("field 'gauge' must be \"canonical\" or {\"random\": seed}")

    tol = _number(raw, "tolerance", 1e-10)
    if not tol > 0:
        raise ConfigurationError("field 'tolerance' must be positive")

    out = raw.get("output", {})
    fmt = out.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigurationError(f"field 'output.format' must be one of {FORMATS}, got {fmt!r}")

    base_dir = Path(base_dir)
    out_dir = Path(out.get("dir", "out"))
    sections = {k: raw[k] for k in COMMANDS if k in raw}
    return RunConfig(command=cmd, lattice=lattice, nu=nu, J=J, gauge=gauge, gauge_seed=gauge_seed,
                     seed=_number(raw, "seed", 0, int), tolerance=tol,
                     out_dir=out_dir if out_dir.is_absolute() else base_dir / out_dir,
                     fmt=fmt, parallel=bool(raw.get("parallel", False)), sections=sections,
                     base_dir=base_dir)


def read_config(path, command: str | None = None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_config(raw, command, path.parent)


def write_outputs(out_dir, payloads: dict[str, str]) -> list[Path]:
    """Write text payloads with LF line endings; returns the written paths."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigurationError(f"cannot create output directory {out_dir}: {exc.strerror}") from None
    written = []
    for name, text in payloads.items():
        target = out_dir / name
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        written.append(target)
    return written


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, allow_nan=True) + "\n"

