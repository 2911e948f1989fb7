"""Brute-force identity suites over random hyper-sites.

Every constraint relation is evaluated on independent random norm-nu spins.
Relations whose printed form does not hold for generic spins are evaluated
in all candidate forms (``group:variant``); the suite expects exactly one
variant per group to pass.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import decomposition as dec
from .lattice import LatticeKind
from .report import ResidualReport

KINDS = (LatticeKind.CHAIN, LatticeKind.TRIANGULAR, LatticeKind.SQUARE)

# group -> variants; the first entry is the printed form
DISCREPANCY_GROUPS = {
    "tri_nn_phase": ("exp(-1i*gamma)", "exp(-2i*gamma)", "exp(-3i*gamma)"),
    "nZ_pseudoscalar": ("+", "-"),
    "chirality_nZ_l": ("1", "27/4"),
    "square_n_dot_d": ("complex", "real_part"),
    "square_n_dot_l": ("+", "-"),
}


def random_spins(rng: np.random.Generator, n: int, m: int, nu: float) -> list[np.ndarray]:
    g = rng.standard_normal((m, n, 3))
    g /= np.linalg.norm(g, axis=-1, keepdims=True)
    return list(nu * g)


@dataclass
class SuiteResult:
    identities: dict[str, ResidualReport] = field(default_factory=dict)
    discrepancies: dict[str, dict[str, float]] = field(default_factory=dict)
    tolerance: float = 1e-10

    def failures(self) -> list[str]:
        out = []
        for kind, rep in self.identities.items():
            for name in rep.residuals:
                if not rep.max(name) <= self.tolerance:
                    out.append(f"{kind}.{name}: max residual {rep.max(name)!r}")
        for group, variants in self.discrepancies.items():
            passing = [v for v, r in variants.items() if r <= self.tolerance]
            if len(passing) != 1:
                out.append(f"{group}: {len(passing)} passing variants {passing}, expected exactly one")
        return out

    @property
    def passed(self) -> bool:
        return not self.failures()

    def summary(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "passed": self.passed,
            "identities": {k: rep.summary() for k, rep in self.identities.items()},
            "discrepancies": {
                g: {"max_residual": v, "passing": [n for n, r in v.items() if r <= self.tolerance]}
                for g, v in self.discrepancies.items()
            },
            "failures": self.failures(),
        }


def chain_suite(rng, n, nu=1.0, step=1.0) -> ResidualReport:
    S0, S1 = random_spins(rng, n, 2, nu)
    f = dec.chain_decompose(S0, S1, step, nu)
    rep = ResidualReport()
    for name, v in dec.chain_residuals(f, step, nu).items():
        rep.add(name, v)
    R0, R1 = dec.chain_reconstruct(f, step, nu)
    rep.add("round_trip", np.maximum(np.abs(R0 - S0).max(-1), np.abs(R1 - S1).max(-1)) / nu)
    return rep


def tri_suite(rng, n, nu=1.0, step=1.0):
    """Canonical-gauge identities, round trip and gauge sweep; returns (report, variant maxima)."""
    S = random_spins(rng, n, 3, nu)
    gamma = rng.uniform(0, 2 * np.pi, n)
    f0 = dec.tri_decompose(*S, 0.0, step, nu)
    fg = dec.tri_decompose(*S, gamma, step, nu)
    rep = ResidualReport()
    for name, v in dec.tri_residuals(f0, step, nu).items():
        rep.add(name, v)
    cons = dec.tri_consistency_report(*S, 0.0, step, nu)
    rep.add("nZ_spin_form", cons.residuals["nZ_spin_form"])
    rep.add("n_frame_form", cons.residuals["n_frame_form"])
    rep.add("n_frame_form_gauged", dec.tri_consistency_report(*S, gamma, step, nu).residuals["n_frame_form"])
    rep.add("chi_gauge_invariance", fg.chi - f0.chi)
    rep.add("nude_chi_gauge_invariance", fg.nude_chi - f0.nude_chi)
    back = dec.tri_reconstruct(fg, step, nu)
    rep.add("round_trip", np.max([np.abs(B - A).max(-1) for A, B in zip(S, back)], axis=0) / nu)

    variants = {
        "tri_nn_phase": {v: float(dec.nn_phase_residual(fg, step, nu, k).max())
                         for k, v in zip((1, 2, 3), DISCREPANCY_GROUPS["tri_nn_phase"])},
        "nZ_pseudoscalar": {s: float(cons.residuals[f"nZ_pseudoscalar:{s}"].max()) for s in "+-"},
        "chirality_nZ_l": {"1": float(cons.residuals["chirality_nZ_l"].max()),
                           "27/4": float(cons.residuals["chirality_nZ_l:27/4"].max())},
    }
    return rep, variants


def square_suite(rng, n, nu=1.0, step=1.0):
    S = random_spins(rng, n, 4, nu)
    gamma = rng.uniform(0, 2 * np.pi, n)
    f0 = dec.square_decompose(*S, 0.0, step, nu)
    fg = dec.square_decompose(*S, gamma, step, nu)
    rep = ResidualReport()
    base = dec.square_residuals(f0, step, nu)
    for name in ("square_unit", "square_nude_chi"):
        rep.add(name, base[name])
    rep.add("square_unit_gauged", dec.square_residuals(fg, step, nu)["square_unit"])
    dft, fields = dec.square_parseval_residual(*S, f0, step, nu)
    rep.add("parseval_dft", dft / nu**2)
    rep.add("parseval_fields", fields / nu**2)
    back = dec.square_reconstruct(fg, step, nu)
    rep.add("round_trip", np.max([np.abs(B - A).max(-1) for A, B in zip(S, back)], axis=0) / nu)

    alt = dec.square_variant_residuals(f0, step, nu)
    variants = {
        "square_n_dot_d": {"complex": float(base["square_n_dot_d"].max()),
                           "real_part": float(alt["square_n_dot_d:real_part"].max())},
        "square_n_dot_l": {"+": float(base["square_n_dot_l"].max()),
                           "-": float(alt["square_n_dot_l:-"].max())},
    }
    return rep, variants


def run_identity_suite(n: int = 10_000, seed: int = 0, nu: float = 1.0, step: float = 1.0,
                       tolerance: float = 1e-10, kinds=KINDS) -> SuiteResult:
    result = SuiteResult(tolerance=tolerance)
    for i, kind in enumerate(LatticeKind.parse(k) for k in kinds):
        rng = np.random.default_rng([seed, i])
        if kind is LatticeKind.CHAIN:
            result.identities[kind.value] = chain_suite(rng, n, nu, step)
        elif kind is LatticeKind.TRIANGULAR:
            rep, var = tri_suite(rng, n, nu, step)
            result.identities[kind.value] = rep
            result.discrepancies.update(var)
        else:
            rep, var = square_suite(rng, n, nu, step)
            result.identities[kind.value] = rep
            result.discrepancies.update(var)
    return result
