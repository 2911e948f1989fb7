"""Classical spin configurations of uniform length nu and reference states."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .lattice import Lattice, LatticeKind, LatticeSpec, build_lattice
from .report import ResidualReport

NORM_RTOL = 1e-12


def spin_length(s: float) -> float:
    """nu = sqrt(s(s+1)) for spin quantum number s > 0."""
    s = float(s)
    if not s > 0:
        raise ValueError(f"spin quantum number must be positive, got {s}")
    return float(np.sqrt(s * (s + 1.0)))


@dataclass(eq=False)
class SpinConfiguration:
    lattice: Lattice
    nu: float
    spins: np.ndarray  # (N, 3)
    seed: int | None = None

    def __post_init__(self):
        self.spins = np.ascontiguousarray(self.spins, dtype=np.float64)
        if self.spins.shape != (self.lattice.n_sites, 3):
            raise ConfigurationError(
                f"expected spins of shape {(self.lattice.n_sites, 3)}, got {self.spins.shape}")
        self.nu = float(self.nu)

    def copy(self) -> "SpinConfiguration":
        return SpinConfiguration(self.lattice, self.nu, self.spins.copy(), self.seed)

    def hyper_spins(self) -> np.ndarray:
        """Spins grouped as (P, m, 3) in polytope-label order."""
        return self.spins[self.lattice.hyper_sites]

    def rotated(self, rotation: np.ndarray) -> "SpinConfiguration":
        return SpinConfiguration(self.lattice, self.nu, self.spins @ np.asarray(rotation).T, self.seed)

    def to_dict(self) -> dict:
        return {
            "lattice_spec": self.lattice.spec.to_dict(),
            "nu": self.nu,
            "seed": self.seed,
            "spins": self.spins.tolist(),
        }

    def to_json(self) -> str:
        # json emits repr(float), which round-trips doubles exactly
        return json.dumps(self.to_dict()) + "\n"

    @classmethod
    def from_dict(cls, d: dict, lattice: Lattice | None = None) -> "SpinConfiguration":
        for key in ("lattice_spec", "nu", "spins"):
            if key not in d:
                raise ConfigurationError(f"spin configuration is missing field {key!r}")
        if lattice is None:
            lattice = build_lattice(LatticeSpec.from_dict(d["lattice_spec"]))
        return cls(lattice, d["nu"], np.array(d["spins"], dtype=np.float64), d.get("seed"))

    @classmethod
    def from_json(cls, text: str) -> "SpinConfiguration":
        return cls.from_dict(json.loads(text))


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if v.shape != (3,) or not norm > 0:
        raise ConfigurationError(f"expected a non-zero 3-vector, got {v!r}")
    return v / norm


def orthogonal_axis(u: np.ndarray) -> np.ndarray:
    """Deterministic unit vector orthogonal to u."""
    u = _unit(u)
    e = np.eye(3)[np.argmin(np.abs(u))]
    return _unit(np.cross(u, e))


def rotation_matrices(axis: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Rodrigues rotations about a fixed unit axis, shape (len(angles), 3, 3)."""
    k = _unit(axis)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    angles = np.asarray(angles, dtype=float)[:, None, None]
    return np.eye(3) + np.sin(angles) * K + (1 - np.cos(angles)) * (K @ K)


def _tri120(lattice: Lattice, e1, e2) -> np.ndarray:
    e1 = _unit(e1)
    e2 = np.asarray(e2, dtype=float) - np.dot(e2, e1) * e1
    e2 = _unit(e2)
    theta = 2 * np.pi * lattice.labels / 3
    return np.cos(theta)[:, None] * e1 + np.sin(theta)[:, None] * e2


def _staggered(lattice: Lattice, u, frame=None) -> np.ndarray:
    if lattice.kind is LatticeKind.TRIANGULAR:
        e2 = frame if frame is not None else orthogonal_axis(u)
        return _tri120(lattice, u, e2)
    sign = np.where(lattice.labels % 2 == 0, 1.0, -1.0)
    return sign[:, None] * _unit(u)


def reference_config(lattice: Lattice, nu: float, family: str, **params) -> SpinConfiguration:
    """Reference states.

    Families: ``ferro(u)``, ``neel(u)`` (chain/square), ``tri120(e1, e2)``
    (triangular), ``columnar(u)`` (square), ``twist(u, kappa)`` (all kinds).
    ``twist`` rotates the staggered state (Neel or 120 degree) about an axis
    orthogonal to u by angle kappa * x, with x the first physical coordinate.
    For the triangular lattice the 120 degree plane contains u and the twist axis.
    """
    kind = lattice.kind
    nu = float(nu)
    if not nu > 0:
        raise ConfigurationError(f"nu must be positive, got {nu}")
    family = family.lower()
    u = params.get("u", (0.0, 0.0, 1.0))

    if family == "ferro":
        dirs = np.tile(_unit(u), (lattice.n_sites, 1))
    elif family == "neel":
        if kind is LatticeKind.TRIANGULAR:
            raise ConfigurationError("neel state is defined for chain and square lattices only")
        dirs = _staggered(lattice, u)
    elif family == "tri120":
        if kind is not LatticeKind.TRIANGULAR:
            raise ConfigurationError("tri120 state is defined for the triangular lattice only")
        e1 = params.get("e1", (1.0, 0.0, 0.0))
        e2 = params.get("e2", (0.0, 1.0, 0.0))
        dirs = _tri120(lattice, e1, e2)
    elif family == "columnar":
        if kind is not LatticeKind.SQUARE:
            raise ConfigurationError("columnar state is defined for the square lattice only")
        y = np.rint(lattice.site_positions[:, 1]).astype(np.int64)
        dirs = np.where(y % 2 == 0, 1.0, -1.0)[:, None] * _unit(u)
    elif family == "twist":
        kappa = float(params.get("kappa", 0.0))
        axis = orthogonal_axis(u)
        base = _staggered(lattice, u, frame=axis)
        x = lattice.site_positions[:, 0] * lattice.step
        R = rotation_matrices(axis, kappa * x)
        dirs = np.einsum("nij,nj->ni", R, base)
    else:
        raise ConfigurationError(f"unknown state family {family!r}")

    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    return SpinConfiguration(lattice, nu, nu * dirs)


def random_config(lattice: Lattice, nu: float, seed: int) -> SpinConfiguration:
    """i.i.d. spins uniform on the sphere of radius nu (normalized Gaussian triples)."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((lattice.n_sites, 3))
    g /= np.linalg.norm(g, axis=1)[:, None]
    return SpinConfiguration(lattice, nu, float(nu) * g, seed)


def validate_norms(config: SpinConfiguration) -> ResidualReport:
    report = ResidualReport()
    dev = np.linalg.norm(config.spins, axis=1) - config.nu
    report.add("norm", dev)
    bad = np.flatnonzero(np.abs(dev) > NORM_RTOL * config.nu)
    report.violations.extend(f"site {i}: |S| - nu = {dev[i]!r}" for i in bad)
    return report
