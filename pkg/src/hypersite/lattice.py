"""Periodic chain, triangular and square lattices partitioned into hyper-sites.

Each lattice is built as a grid of hyper-cells. A hyper-cell holds one
hyper-site: 2 sites (chain), an up-pointing triangle (triangular) or a 2x2
plaquette (square). Site index = cell_index * m + k, where cells are
ordered row-major and k is the polytope label position.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigurationError, UnsupportedFeatureError
from .report import ResidualReport

SQRT3 = np.sqrt(3.0)
BOND_TOL = 1e-9


class LatticeKind(str, enum.Enum):
    CHAIN = "chain"
    TRIANGULAR = "triangular"
    SQUARE = "square"

    @classmethod
    def parse(cls, value) -> "LatticeKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigurationError(f"unknown lattice kind {value!r}") from None

    @property
    def dim(self) -> int:
        return 1 if self is LatticeKind.CHAIN else 2

    @property
    def cell_size(self) -> int:
        return {LatticeKind.CHAIN: 2, LatticeKind.TRIANGULAR: 3, LatticeKind.SQUARE: 4}[self]

    @property
    def coordination(self) -> int:
        return {LatticeKind.CHAIN: 2, LatticeKind.TRIANGULAR: 6, LatticeKind.SQUARE: 4}[self]


# Polytope labels as unit complex numbers, tuple position k <-> label k.
_W = np.exp(2j * np.pi / 3)
POLYTOPE_LABELS = {
    LatticeKind.CHAIN: np.array([1.0, -1.0], dtype=complex),
    LatticeKind.TRIANGULAR: np.array([1.0, _W, _W * _W]),
    LatticeKind.SQUARE: np.array([1.0, 1j, -1.0, -1j]),
}

# Hyper-cell geometry in units of the step: (cell translation vectors, basis).
_GEOMETRY = {
    LatticeKind.CHAIN: (np.array([[2.0]]), np.array([[0.0], [1.0]])),
    LatticeKind.TRIANGULAR: (
        np.array([[1.5, SQRT3 / 2], [0.0, SQRT3]]),
        np.array([[0.0, 0.0], [1.0, 0.0], [0.5, SQRT3 / 2]]),
    ),
    LatticeKind.SQUARE: (
        np.array([[2.0, 0.0], [0.0, 2.0]]),
        np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]),
    ),
}


@dataclass(frozen=True)
class LatticeSpec:
    kind: LatticeKind
    extent: tuple[int, ...]
    step: float = 1.0
    periodic: bool = True

    def __post_init__(self):
        object.__setattr__(self, "kind", LatticeKind.parse(self.kind))
        ext = (self.extent,) if np.isscalar(self.extent) else tuple(self.extent)
        object.__setattr__(self, "extent", tuple(int(e) for e in ext))
        object.__setattr__(self, "step", float(self.step))

    def validate(self) -> None:
        if len(self.extent) != self.kind.dim:
            raise ConfigurationError(
                f"{self.kind.value} lattice needs {self.kind.dim} extent value(s), got {self.extent}")
        if any(e < 2 for e in self.extent):
            raise ConfigurationError(f"extent must be >= 2 in every direction, got {self.extent}")
        if not np.isfinite(self.step) or self.step <= 0:
            raise ConfigurationError(f"step must be positive, got {self.step}")
        if not self.periodic:
            raise UnsupportedFeatureError("only periodic boundary conditions are supported")

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "extent": list(self.extent), "step": self.step,
                "periodic": self.periodic}

    @classmethod
    def from_dict(cls, d: dict) -> "LatticeSpec":
        for key in ("kind", "extent"):
            if key not in d:
                raise ConfigurationError(f"lattice spec is missing field {key!r}")
        return cls(d["kind"], d["extent"], d.get("step", 1.0), d.get("periodic", True))


@dataclass(frozen=True, eq=False)
class Lattice:
    spec: LatticeSpec
    site_positions: np.ndarray  # (N, dim), units of step
    bonds: np.ndarray  # (B, 2) int, i < j, sorted
    hyper_sites: np.ndarray  # (P, m) int

    @property
    def kind(self) -> LatticeKind:
        return self.spec.kind

    @property
    def step(self) -> float:
        return self.spec.step

    @property
    def n_sites(self) -> int:
        return len(self.site_positions)

    @property
    def n_hyper(self) -> int:
        return len(self.hyper_sites)

    @property
    def labels(self) -> np.ndarray:
        """Polytope label index k of every site."""
        out = np.empty(self.n_sites, dtype=np.int64)
        for k in range(self.hyper_sites.shape[1]):
            out[self.hyper_sites[:, k]] = k
        return out

    @cached_property
    def neighbours(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR adjacency (offsets, indices), neighbour lists sorted."""
        n = self.n_sites
        i = np.concatenate([self.bonds[:, 0], self.bonds[:, 1]])
        j = np.concatenate([self.bonds[:, 1], self.bonds[:, 0]])
        order = np.lexsort((j, i))
        i, j = i[order], j[order]
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.add.at(offsets, i + 1, 1)
        return np.cumsum(offsets), j.astype(np.int64)

    @cached_property
    def colouring(self) -> np.ndarray:
        """Proper colouring of the bond graph used by the parallel sweeps."""
        if self.kind is LatticeKind.TRIANGULAR:
            return self.labels
        return self.labels % 2

    def to_dict(self) -> dict:
        pos = self.site_positions
        return {
            "kind": self.kind.value,
            "extent": list(self.spec.extent),
            "step": self.step,
            "sites": [[float(v) for v in (p if self.kind.dim == 2 else (p[0], 0.0))] for p in pos],
            "bonds": self.bonds.tolist(),
            "hyper_sites": self.hyper_sites.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=None) + "\n"


def _supercell(spec: LatticeSpec) -> np.ndarray:
    cell_vectors, _ = _GEOMETRY[spec.kind]
    return cell_vectors * np.array(spec.extent, dtype=float)[:, None]


def build_lattice(spec: LatticeSpec) -> Lattice:
    spec.validate()
    cell_vectors, basis = _GEOMETRY[spec.kind]
    m = len(basis)
    grids = np.meshgrid(*[np.arange(e) for e in spec.extent], indexing="ij")
    cells = np.stack([g.ravel() for g in grids], axis=1).astype(float)  # row-major
    origins = cells @ cell_vectors
    positions = (origins[:, None, :] + basis[None, :, :]).reshape(-1, basis.shape[1])
    hyper_sites = np.arange(len(positions), dtype=np.int64).reshape(-1, m)
    bonds = _distance_bonds(positions, _supercell(spec))
    return Lattice(spec, positions, bonds, hyper_sites)


def _distance_bonds(positions: np.ndarray, supercell: np.ndarray) -> np.ndarray:
    """Pairs at unit distance under periodic images, matched within BOND_TOL."""
    dim = positions.shape[1]
    tree = cKDTree(positions)
    shifts = np.stack(np.meshgrid(*[[-1, 0, 1]] * dim, indexing="ij"), -1).reshape(-1, dim)
    found = set()
    for shift in shifts:
        image = positions + shift @ supercell
        hits = tree.query_ball_point(image, 1.0 + BOND_TOL)
        i = np.repeat(np.arange(len(image)), [len(h) for h in hits])
        j = np.fromiter((x for h in hits for x in h), dtype=np.int64, count=len(i))
        dist = np.linalg.norm(image[i] - positions[j], axis=1)
        keep = (i != j) & (np.abs(dist - 1.0) <= BOND_TOL)
        found.update(zip(np.minimum(i, j)[keep].tolist(), np.maximum(i, j)[keep].tolist()))
    return np.array(sorted(found), dtype=np.int64).reshape(-1, 2)


def validate_partition(lattice: Lattice) -> ResidualReport:
    """Check the hyper-site partition, label order and bond lengths; never raises."""
    report = ResidualReport()
    n = lattice.n_sites
    counts = np.zeros(n, dtype=np.int64)
    for tup in lattice.hyper_sites:
        for s in tup:
            if 0 <= s < n:
                counts[s] += 1
            else:
                report.violations.append(f"invalid site index {s}")
    for s in np.flatnonzero(counts == 0):
        report.violations.append(f"orphan site {s}")
    for s in np.flatnonzero(counts > 1):
        report.violations.append(f"double assignment of site {s}")

    kind = lattice.kind
    _, basis = _GEOMETRY[kind]
    if lattice.hyper_sites.ndim != 2 or lattice.hyper_sites.shape[1] != kind.cell_size:
        report.violations.append("hyper-site tuples have the wrong size")
    else:
        pos = lattice.site_positions
        sc = _supercell(lattice.spec)
        for p, tup in enumerate(lattice.hyper_sites):
            if np.any((tup < 0) | (tup >= n)):
                continue
            rel = _minimum_image(pos[tup] - pos[tup[0]], sc)
            if not np.allclose(rel, basis, atol=BOND_TOL):
                report.violations.append(f"label order mismatch in hyper-site {p}")

    if len(lattice.bonds):
        d = lattice.site_positions[lattice.bonds[:, 1]] - lattice.site_positions[lattice.bonds[:, 0]]
        lengths = np.linalg.norm(_minimum_image(d, _supercell(lattice.spec)), axis=1)
        report.add("bond_length", lengths - 1.0)
        for b in np.flatnonzero(np.abs(lengths - 1.0) > BOND_TOL):
            report.violations.append(f"bond {b} has length {lengths[b]!r}")
    return report


def _minimum_image(d: np.ndarray, supercell: np.ndarray) -> np.ndarray:
    dim = supercell.shape[0]
    shifts = np.stack(np.meshgrid(*[[-1, 0, 1]] * dim, indexing="ij"), -1).reshape(-1, dim)
    frac = d @ np.linalg.inv(supercell)
    base = (frac - np.round(frac)) @ supercell
    images = base[:, None, :] + (shifts @ supercell)[None, :, :]
    best = np.argmin(np.einsum("nsk,nsk->ns", images, images), axis=1)
    return images[np.arange(len(d)), best]
