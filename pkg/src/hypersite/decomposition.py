"""Hyper-site transforms: local antiferromagnetic fields from groups of spins.

All functions broadcast over leading axes, so ``S0`` may be a single
3-vector or an ``(P, 3)`` batch. Complex 3-vectors are numpy complex128.
Dot products never conjugate; ``np.conj`` is applied only where a dagger
is meant.

Conventions on lattice step ``a`` and spin length ``nu``::

    chain       n = (S0 - S1) / (2 nu)              l = (S0 + S1) / (2 a)
    triangular  n = sqrt2/(3 nu) e^{-i g} (S0 + w S1 + w^2 S2)
                l = (S0 + S1 + S2) / (3 a^2)
    square      n = ((S0 + S2) - (S1 + S3)) / (4 nu)
                d = sqrt2/(4 a nu) e^{-i g} (S0 + i S1 - S2 - i S3)
                l = (S0 + S1 + S2 + S3) / (4 a^2)
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, fields as dc_fields, replace

import numpy as np

from .errors import ConfigurationError, PreconditionError
from .lattice import Lattice, LatticeKind
from .report import ResidualReport, format_float

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)
W = np.exp(2j * np.pi / 3)
NORM_TOL = 1e-9


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def _check_norms(spins, nu: float) -> None:
    for k, S in enumerate(spins):
        dev = np.abs(np.linalg.norm(S, axis=-1) - nu)
        if np.any(dev > NORM_TOL * nu):
            where = np.flatnonzero(np.atleast_1d(dev) > NORM_TOL * nu)
            raise PreconditionError(
                f"spin S{k} deviates from length nu={nu!r} by {np.max(dev)!r}"
                + (f" (hyper-sites {where[:5].tolist()})" if np.ndim(dev) else ""))


def _as_spins(*spins):
    return [np.asarray(S, dtype=np.float64) for S in spins]


def _phase(gamma):
    return np.exp(-1j * np.asarray(gamma, dtype=np.float64))[..., None]


@dataclass
class ChainFields:
    n: np.ndarray
    l: np.ndarray

    @property
    def nude_chi(self):
        return _dot(self.n, self.l)


@dataclass
class TriFields:
    n: np.ndarray  # complex
    l: np.ndarray
    nX: np.ndarray
    nY: np.ndarray
    nZ: np.ndarray
    chi: np.ndarray
    nude_chi: np.ndarray
    gamma: np.ndarray


@dataclass
class SquareFields:
    n: np.ndarray
    d: np.ndarray  # complex
    l: np.ndarray
    nude_chi: np.ndarray
    gamma: np.ndarray


# -- chain ------------------------------------------------------------------

def chain_decompose(S0, S1, step: float = 1.0, nu: float = 1.0) -> ChainFields:
    S0, S1 = _as_spins(S0, S1)
    _check_norms((S0, S1), nu)
    return ChainFields(n=(S0 - S1) / (2 * nu), l=(S0 + S1) / (2 * step))


def chain_reconstruct(fields: ChainFields, step: float = 1.0, nu: float = 1.0):
    """Haldane decomposition: S0 = nu n + a l, S1 = -nu n + a l."""
    return nu * fields.n + step * fields.l, -nu * fields.n + step * fields.l


# -- triangular -------------------------------------------------------------

def chirality(S0, S1, S2, nu: float = 1.0):
    """Scalar chirality 3 sqrt3 / (2 nu^3) S0 . (S1 x S2)."""
    return 3 * SQRT3 / (2 * nu**3) * _dot(S0, np.cross(S1, S2))


def tri_decompose(S0, S1, S2, gamma=0.0, step: float = 1.0, nu: float = 1.0) -> TriFields:
    S0, S1, S2 = _as_spins(S0, S1, S2)
    _check_norms((S0, S1, S2), nu)
    gamma = np.broadcast_to(np.asarray(gamma, dtype=np.float64), S0.shape[:-1]).copy()
    n = SQRT2 / (3 * nu) * _phase(gamma) * (S0 + W * S1 + W * W * S2)
    l = (S0 + S1 + S2) / (3 * step**2)
    nX = 2 / (3 * nu) * (S0 - 0.5 * (S1 + S2))
    nY = 2 / (3 * nu) * (SQRT3 / 2) * (S1 - S2)
    nZ = np.cross(nX, nY)
    return TriFields(n=n, l=l, nX=nX, nY=nY, nZ=nZ, chi=chirality(S0, S1, S2, nu),
                     nude_chi=_dot(nZ, l), gamma=gamma)


def tri_reconstruct(fields: TriFields, step: float = 1.0, nu: float = 1.0):
    """Inverse cyclic Fourier sum: S_j = a^2 l + sqrt2 nu Re(w^-j e^{i g} n)."""
    m = np.exp(1j * np.asarray(fields.gamma))[..., None] * fields.n
    return tuple(step**2 * fields.l + SQRT2 * nu * np.real(W ** (-j) * m) for j in range(3))


# -- square -----------------------------------------------------------------

def _square_nude_chi(d, nu):
    return (nu / 4) * np.real(_dot(d, d) + _dot(np.conj(d), np.conj(d)))


def square_decompose(S0, S1, S2, S3, gamma=0.0, step: float = 1.0, nu: float = 1.0) -> SquareFields:
    S0, S1, S2, S3 = _as_spins(S0, S1, S2, S3)
    _check_norms((S0, S1, S2, S3), nu)
    gamma = np.broadcast_to(np.asarray(gamma, dtype=np.float64), S0.shape[:-1]).copy()
    n = ((S0 + S2) - (S1 + S3)) / (4 * nu)
    d = SQRT2 / (4 * step * nu) * _phase(gamma) * (S0 + 1j * S1 - S2 - 1j * S3)
    l = (S0 + S1 + S2 + S3) / (4 * step**2)
    return SquareFields(n=n, d=d, l=l, nude_chi=_square_nude_chi(d, nu), gamma=gamma)


def square_reconstruct(fields: SquareFields, step: float = 1.0, nu: float = 1.0):
    m = np.exp(1j * np.asarray(fields.gamma))[..., None] * fields.d
    return tuple(step**2 * fields.l + (-1) ** j * nu * fields.n
                 + SQRT2 * step * nu * np.real((1j) ** (-j) * m) for j in range(4))


# -- identity residuals -----------------------------------------------------
# Each entry is |LHS - RHS| per hyper-site.

def chain_residuals(f: ChainFields, step: float, nu: float) -> dict[str, np.ndarray]:
    return {
        "chain_unit": np.abs(_dot(f.n, f.n) - (1 - step**2 / nu**2 * _dot(f.l, f.l))),
        "chain_orthogonality": np.abs(_dot(f.n, f.l)),
    }


def tri_residuals(f: TriFields, step: float, nu: float) -> dict[str, np.ndarray]:
    a2 = step**2
    nn_dag = np.real(_dot(f.n, np.conj(f.n)))
    ll = _dot(f.l, f.l)
    xl = _dot(f.nX, f.l)
    return {
        "tri_unit": np.abs(nn_dag - (1 - a2**2 / nu**2 * ll)),
        "tri_nn_phase": nn_phase_residual(f, step, nu, 1),
        "nX_norm": np.abs(_dot(f.nX, f.nX) - (1 - 2 * a2 / nu * xl - a2**2 / nu**2 * ll)),
        "nY_norm": np.abs(_dot(f.nY, f.nY) - (1 + 2 * a2 / nu * xl - a2**2 / nu**2 * ll)),
        "nX_nY_overlap": np.abs(_dot(f.nX, f.nY) - 2 * a2 / nu * _dot(f.nY, f.l)),
    }


def nn_phase_residual(f: TriFields, step: float, nu: float, phase_power: int) -> np.ndarray:
    """|n.n + 2 sqrt2 a^2/nu e^{-i k g} l.n^dag| for gauge phase power k.

    k = 1 is the printed form; only k = 3 is gauge-covariant, and all
    powers coincide in the canonical gauge.
    """
    lhs = _dot(f.n, f.n)
    rhs = -2 * SQRT2 * step**2 / nu * np.exp(-1j * phase_power * f.gamma) * _dot(f.l, np.conj(f.n))
    return np.abs(lhs - rhs)


def nZ_from_spins(S0, S1, S2, nu: float = 1.0):
    return 2 * SQRT3 / (9 * nu**2) * (np.cross(S0, S1) + np.cross(S1, S2) + np.cross(S2, S0))


def nZ_pseudoscalar(n):
    """(i/2) e_abc (n^dag^b n^c - n^b n^dag^c), which equals i (conj(n) x n)."""
    nb = np.conj(n)
    return np.real(0.5j * (np.cross(nb, n) - np.cross(n, nb)))


def tri_consistency_report(S0, S1, S2, gamma=0.0, step: float = 1.0, nu: float = 1.0) -> ResidualReport:
    """Residuals of the spin form of nZ, the frame form of n, both signs of the
    pseudo-scalar form of nZ and both prefactors of the chirality relation."""
    S0, S1, S2 = _as_spins(S0, S1, S2)
    f = tri_decompose(S0, S1, S2, gamma, step, nu)
    report = ResidualReport(gauge="canonical" if not np.any(f.gamma) else "custom")
    report.add("nZ_spin_form", np.linalg.norm(nZ_from_spins(S0, S1, S2, nu) - f.nZ, axis=-1))
    frame = _phase(f.gamma) / SQRT2 * (f.nX + 1j * f.nY)
    report.add("n_frame_form", np.linalg.norm(frame - f.n, axis=-1))
    ps = nZ_pseudoscalar(f.n)
    report.add("nZ_pseudoscalar:+", np.linalg.norm(ps - f.nZ, axis=-1))
    report.add("nZ_pseudoscalar:-", np.linalg.norm(ps + f.nZ, axis=-1))
    report.add("chirality_nZ_l", chirality_relation_residual(f, step, nu, 1.0))
    report.add("chirality_nZ_l:27/4", chirality_relation_residual(f, step, nu, 27 / 4))
    return report


def chirality_relation_residual(f: TriFields, step: float, nu: float, factor: float = 1.0):
    """|chi - factor a^2/nu nZ.l|; factor 1 is the printed relation, 27/4 the one that holds."""
    return np.abs(f.chi - factor * step**2 / nu * _dot(f.nZ, f.l))


def square_residuals(f: SquareFields, step: float, nu: float) -> dict[str, np.ndarray]:
    a2 = step**2
    dd_dag = np.real(_dot(f.d, np.conj(f.d)))
    n_dot_d = _dot(f.n, f.d) + a2 / nu * _dot(f.d, f.l)
    rhs_c = _square_nude_chi(f.d, nu)
    nl = _dot(f.n, f.l)
    return {
        "square_unit": np.abs(_dot(f.n, f.n) - (1 - a2 * dd_dag - a2**2 / nu**2 * _dot(f.l, f.l))),
        "square_n_dot_d": np.abs(n_dot_d),
        "square_n_dot_l": np.abs(nl - rhs_c),
        "square_nude_chi": np.abs(f.nude_chi - rhs_c),
    }


def square_variant_residuals(f: SquareFields, step: float, nu: float) -> dict[str, np.ndarray]:
    """Corrected forms: real part of the n.d relation and the sign-flipped n.l relation."""
    n_dot_d = _dot(f.n, f.d) + step**2 / nu * _dot(f.d, f.l)
    return {
        "square_n_dot_d:real_part": np.abs(np.real(n_dot_d)),
        "square_n_dot_l:-": np.abs(_dot(f.n, f.l) + _square_nude_chi(f.d, nu)),
    }


def square_parseval_residual(S0, S1, S2, S3, f: SquareFields, step: float, nu: float):
    """Sum of |DFT|^2 over the plaquette against 4 sum |S|^2, with components
    mapped to the fields: |F0| = 4a^2|l|, |F2| = 4 nu |n|, |F1| = |F3| = 2 sqrt2 a nu |d|."""
    F = np.fft.fft(np.stack(_as_spins(S0, S1, S2, S3), axis=-2), axis=-2)
    power = np.sum(np.abs(F) ** 2, axis=(-2, -1))
    total = 4 * sum(_dot(S, S) for S in _as_spins(S0, S1, S2, S3))
    from_fields = (16 * step**4 * _dot(f.l, f.l) + 16 * nu**2 * _dot(f.n, f.n)
                   + 2 * 8 * step**2 * nu**2 * np.real(_dot(f.d, np.conj(f.d))))
    return np.abs(power - total), np.abs(from_fields - total)


# -- whole lattices ---------------------------------------------------------

@dataclass
class FieldMap:
    lattice: Lattice
    nu: float
    fields: ChainFields | TriFields | SquareFields

    @property
    def kind(self) -> LatticeKind:
        return self.lattice.kind

    def columns(self) -> dict[str, np.ndarray]:
        """Flat named columns, fixed order: vectors as _x,_y,_z; complex as _re/_im."""
        cols: dict[str, np.ndarray] = {}
        for fd in dc_fields(self.fields):
            value = np.asarray(getattr(self.fields, fd.name))
            parts = [("_re", value.real), ("_im", value.imag)] if np.iscomplexobj(value) else [("", value)]
            for suffix, part in parts:
                if part.ndim == 2:
                    for c, axis in enumerate("xyz"):
                        cols[f"{fd.name}{suffix}_{axis}"] = part[:, c]
                else:
                    cols[f"{fd.name}{suffix}"] = part
        if isinstance(self.fields, ChainFields):
            cols["nude_chi"] = self.fields.nude_chi
        return cols

    def to_csv(self) -> str:
        cols = self.columns()
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["hyper_site_index", *cols])
        for p in range(self.lattice.n_hyper):
            writer.writerow([p, *(format_float(v[p]) for v in cols.values())])
        return buf.getvalue()

    def to_dict(self) -> dict:
        records = []
        for p in range(self.lattice.n_hyper):
            rec = {}
            for fd in dc_fields(self.fields):
                v = np.asarray(getattr(self.fields, fd.name))[p]
                if np.iscomplexobj(v):
                    rec[fd.name] = {"re": np.real(v).tolist(), "im": np.imag(v).tolist()}
                else:
                    rec[fd.name] = v.tolist()
            records.append(rec)
        return {"kind": self.kind.value, "nu": self.nu, "step": self.lattice.step, "hyper_sites": records}

    def to_json(self) -> str:
        return json.dumps(self.to_dict()) + "\n"


def decompose(config, gamma=None) -> FieldMap:
    """Decompose every hyper-site of a SpinConfiguration."""
    lat = config.lattice
    P = lat.n_hyper
    gamma = np.zeros(P) if gamma is None else np.broadcast_to(np.asarray(gamma, float), (P,))
    S = config.hyper_spins()
    parts = [S[:, k] for k in range(S.shape[1])]
    a, nu = lat.step, config.nu
    if lat.kind is LatticeKind.CHAIN:
        f = chain_decompose(*parts, step=a, nu=nu)
    elif lat.kind is LatticeKind.TRIANGULAR:
        f = tri_decompose(*parts, gamma=gamma, step=a, nu=nu)
    else:
        f = square_decompose(*parts, gamma=gamma, step=a, nu=nu)
    return FieldMap(lat, nu, f)


def reconstruct(fm: FieldMap) -> np.ndarray:
    """Site-ordered spins (N, 3) from a FieldMap."""
    a, nu = fm.lattice.step, fm.nu
    if isinstance(fm.fields, ChainFields):
        parts = chain_reconstruct(fm.fields, a, nu)
    elif isinstance(fm.fields, TriFields):
        parts = tri_reconstruct(fm.fields, a, nu)
    else:
        parts = square_reconstruct(fm.fields, a, nu)
    spins = np.empty((fm.lattice.n_sites, 3))
    for k, part in enumerate(parts):
        spins[fm.lattice.hyper_sites[:, k]] = part
    return spins


def apply_gauge(fm: FieldMap, delta) -> FieldMap:
    """Rotate the complex representation of every hyper-site by e^{-i delta_p}.

    Real fields are untouched. On the square lattice the nude chirality is
    recomputed from the rotated d, since it depends on the gauge there.
    """
    delta = np.asarray(delta, dtype=np.float64)
    if delta.ndim == 0:
        delta = np.full(fm.lattice.n_hyper, float(delta))
    if delta.shape != (fm.lattice.n_hyper,):
        raise ConfigurationError(f"expected {fm.lattice.n_hyper} gauge angles, got shape {delta.shape}")
    f = fm.fields
    if isinstance(f, ChainFields):
        return FieldMap(fm.lattice, fm.nu, replace(f))
    phase = np.exp(-1j * delta)[:, None]
    gamma = np.mod(f.gamma + delta, 2 * np.pi)
    if isinstance(f, TriFields):
        new = replace(f, n=phase * f.n, gamma=gamma)
    else:
        d = phase * f.d
        new = replace(f, d=d, gamma=gamma, nude_chi=_square_nude_chi(d, fm.nu))
    return FieldMap(fm.lattice, fm.nu, new)
