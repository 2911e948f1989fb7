"""Energies, lattice-wide constraint residuals and frame diagnostics."""
from __future__ import annotations

import numpy as np

from . import decomposition as dec
from .errors import ConfigurationError, UnsupportedFeatureError
from .lattice import LatticeKind
from .report import ResidualReport
from .spins import SpinConfiguration


def _coupling(J: float) -> float:
    J = float(J)
    if not J > 0:
        raise ConfigurationError(f"coupling J must be positive (antiferromagnetic), got {J}")
    return J


def bond_energies(config: SpinConfiguration, J: float = 1.0) -> np.ndarray:
    b = config.lattice.bonds
    return _coupling(J) * np.einsum("ij,ij->i", config.spins[b[:, 0]], config.spins[b[:, 1]])


def heisenberg_energy(config: SpinConfiguration, J: float = 1.0) -> float:
    """E = J sum_<ij> S_i . S_j with every bond counted once."""
    return float(np.sum(bond_energies(config, J)))


def constraint_residuals(config: SpinConfiguration, gauge=None, kind=None) -> ResidualReport:
    """Per-hyper-site residuals of every constraint identity of the lattice kind.

    ``gauge`` is None (canonical) or one angle per hyper-site.
    """
    kind = config.lattice.kind if kind is None else LatticeKind.parse(kind)
    if kind is not config.lattice.kind:
        raise ConfigurationError(f"configuration lives on a {config.lattice.kind.value} lattice, not {kind.value}")
    fm = dec.decompose(config, gauge)
    a, nu = config.lattice.step, config.nu
    report = ResidualReport(gauge="canonical" if gauge is None else "custom")
    if kind is LatticeKind.CHAIN:
        res = dec.chain_residuals(fm.fields, a, nu)
    elif kind is LatticeKind.TRIANGULAR:
        res = dec.tri_residuals(fm.fields, a, nu)
        S = config.hyper_spins()
        extra = dec.tri_consistency_report(S[:, 0], S[:, 1], S[:, 2], fm.fields.gamma, a, nu)
        res.update({k: v for k, v in extra.residuals.items() if ":" not in k})
    else:
        res = dec.square_residuals(fm.fields, a, nu)
    for name, values in res.items():
        report.add(name, values)
    return report


def frame_residuals(fm: dec.FieldMap) -> ResidualReport:
    """Orthonormal-trihedron (triangular) or orthogonal-dihedron (square) deviations."""
    f = fm.fields
    report = ResidualReport()
    dot = dec._dot
    if isinstance(f, dec.TriFields):
        report.add("nX_dot_nY", dot(f.nX, f.nY))
        report.add("nX_norm_dev", dot(f.nX, f.nX) - 1)
        report.add("nY_norm_dev", dot(f.nY, f.nY) - 1)
        report.add("nZ_norm_dev", dot(f.nZ, f.nZ) - 1)
    elif isinstance(f, dec.SquareFields):
        re, im = np.real(f.d), np.imag(f.d)
        report.add("dre_dot_dim", dot(re, im))
        report.add("dre_dim_length_diff", np.linalg.norm(re, axis=-1) - np.linalg.norm(im, axis=-1))
        report.add("n_dot_dre", dot(f.n, re))
        report.add("n_dot_dim", dot(f.n, im))
    else:
        raise UnsupportedFeatureError("frame diagnostics need triangular or square fields")
    return report


def frame_residual_max(fm: dec.FieldMap) -> float:
    rep = frame_residuals(fm)
    return max(rep.max(name) for name in rep.residuals)


def nude_chirality_map(config: SpinConfiguration, kind=None) -> np.ndarray:
    """Nude chirality per hyper-site; n.l on the chain."""
    if kind is not None and LatticeKind.parse(kind) is not config.lattice.kind:
        raise ConfigurationError("kind does not match the configuration's lattice")
    return np.asarray(dec.decompose(config).fields.nude_chi, dtype=float)


def normalization_deficit(fm: dec.FieldMap) -> np.ndarray:
    """1 - |n|^2 per hyper-site (n^dag n for the complex triangular n)."""
    n = fm.fields.n
    return 1.0 - np.real(dec._dot(n, np.conj(n)))
