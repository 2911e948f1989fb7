"""Continuum-limit scans: shrink the step and grow the spin at fixed physical twist."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from . import decomposition as dec
from .errors import ConfigurationError
from .lattice import LatticeKind, LatticeSpec, build_lattice
from .observables import frame_residual_max, normalization_deficit
from .report import format_float
from .spins import reference_config, spin_length

DEFAULT_EXTENT = {LatticeKind.CHAIN: (8,), LatticeKind.TRIANGULAR: (4, 4), LatticeKind.SQUARE: (4, 4)}
COLUMNS = ("k", "a", "s", "nu", "max_deficit", "mean_deficit", "frame_residual_max")


@dataclass
class ScanSchedule:
    steps: list[float]
    spins: list[float]
    kappa: float = 0.1
    family: str = "twist"
    u: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def validate(self) -> None:
        if len(self.steps) != len(self.spins):
            raise ConfigurationError("steps and spins must have equal length")
        if len(self.steps) < 3:
            raise ConfigurationError("a scan needs at least 3 points")
        if np.any(np.diff(self.steps) >= 0) or min(self.steps) <= 0:
            raise ConfigurationError("steps must be positive and strictly decreasing")
        if np.any(np.diff(self.spins) <= 0) or min(self.spins) <= 0:
            raise ConfigurationError("spin quantum numbers must be positive and strictly increasing")
        if self.family != "twist":
            raise ConfigurationError(f"scan family must be a twist texture, got {self.family!r}")

    @classmethod
    def geometric(cls, n_points: int = 6, kappa: float = 0.1, s0: float = 1.0, **kw) -> "ScanSchedule":
        """a_k = 2^-k, s_k = s0 * 2^k."""
        k = np.arange(n_points)
        return cls(steps=list(2.0 ** -k), spins=list(s0 * 2.0 ** k), kappa=kappa, **kw)


@dataclass
class ScanTable:
    kind: LatticeKind
    kappa: float
    rows: list[dict] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in self.rows:
            writer.writerow([r["k"], *(format_float(r[c]) for c in COLUMNS[1:])])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, kind="chain", kappa: float = float("nan")) -> "ScanTable":
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            rows.append({"k": int(rec["k"]), **{c: float(rec[c]) for c in COLUMNS[1:]}})
        return cls(LatticeKind.parse(kind), kappa, rows)

    def summary(self) -> dict:
        try:
            slope = fit_slope(self)
        except ConfigurationError:
            slope = None
        return {"kind": self.kind.value, "kappa": self.kappa, "points": len(self.rows),
                "fitted_slope": slope}

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2) + "\n"


def affleck_scan(kind, schedule: ScanSchedule, extent=None) -> ScanTable:
    """Sample the twist texture at each (a_k, s_k) and record normalization deficits."""
    kind = LatticeKind.parse(kind)
    schedule.validate()
    extent = DEFAULT_EXTENT[kind] if extent is None else extent
    table = ScanTable(kind, schedule.kappa)
    for k, (a, s) in enumerate(zip(schedule.steps, schedule.spins)):
        nu = spin_length(s)
        lattice = build_lattice(LatticeSpec(kind, extent, a))
        cfg = reference_config(lattice, nu, "twist", u=schedule.u, kappa=schedule.kappa)
        fm = dec.decompose(cfg)
        deficit = normalization_deficit(fm)
        table.rows.append({
            "k": k, "a": float(a), "s": float(s), "nu": nu,
            "max_deficit": float(deficit.max()),
            "mean_deficit": float(np.sum(deficit) / deficit.size),
            "frame_residual_max": frame_residual_max(fm) if kind is not LatticeKind.CHAIN else 0.0,
        })
    return table


def fit_slope(table: ScanTable, column: str = "max_deficit") -> float:
    """Least-squares slope of log(deficit) against log(a); non-positive deficits are dropped."""
    a = table.column("a")
    y = table.column(column)
    keep = y > 0
    if keep.sum() < 3:
        raise ConfigurationError("fewer than 3 positive deficits to fit")
    la, ly = np.log(a[keep]), np.log(y[keep])
    if np.ptp(la) == 0 or np.ptp(ly) == 0:
        raise ConfigurationError("degenerate fit: constant step or constant deficit")
    slope, _ = np.polyfit(la, ly, 1)
    return float(slope)
