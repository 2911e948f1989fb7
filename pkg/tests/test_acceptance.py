"""Acceptance criteria, each at its stated tolerance.

Run alone with ``pytest tests/test_acceptance.py -v``; the terminal summary
prints one PASS/FAIL line per criterion.
"""
import json

import numpy as np
import pytest

from hypersite import decomposition as dec
from hypersite.cli import main
from hypersite.dynamics import MinimizeOptions, minimize, minimize_with_restarts
from hypersite.lattice import LatticeSpec, build_lattice
from hypersite.observables import frame_residual_max, heisenberg_energy
from hypersite.scaling import ScanSchedule, affleck_scan, fit_slope
from hypersite.spins import random_config, reference_config
from hypersite.verify import run_identity_suite

TOL = 1e-10
N_SAMPLES = 10_000


@pytest.fixture(scope="module")
def suite():
    return run_identity_suite(n=N_SAMPLES, seed=0, nu=1.0, step=1.0, tolerance=TOL)


# (relation, lattice kind, residual name or (discrepancy group, printed variant))
RELATIONS = [
    ("chain pair norm", "chain", "chain_unit"),
    ("chain n.l orthogonality", "chain", "chain_orthogonality"),
    ("triangle order parameter norm", "triangular", "tri_unit"),
    ("nX norm", "triangular", "nX_norm"),
    ("nY norm", "triangular", "nY_norm"),
    ("nX.nY overlap", "triangular", "nX_nY_overlap"),
    ("nZ from spins", "triangular", "nZ_spin_form"),
    ("chirality = a^2/nu nZ.l", "triangular", ("chirality_nZ_l", "1")),
    ("plaquette order parameter norm", "square", "square_unit"),
    ("n.d = -a^2/nu d.l", "square", ("square_n_dot_d", "complex")),
    ("n.l = nu/4 (d.d + conj)", "square", ("square_n_dot_l", "+")),
]


@pytest.mark.criterion("1 identity suite")
@pytest.mark.parametrize("relation, kind, name", RELATIONS, ids=[r[0] for r in RELATIONS])
def test_identity_suite(suite, relation, kind, name):
    if isinstance(name, tuple):
        worst = suite.discrepancies[name[0]][name[1]]
    else:
        worst = suite.identities[kind].max(name)
    print(f"{relation}: max residual {worst:.3e}")
    assert worst <= TOL


@pytest.mark.criterion("1 identity suite")
@pytest.mark.parametrize("name", ["chi_gauge_invariance", "nude_chi_gauge_invariance"])
def test_chirality_gauge_invariance(suite, name):
    assert suite.identities["triangular"].max(name) <= TOL


@pytest.mark.criterion("2 round trip")
@pytest.mark.parametrize("kind", ["chain", "triangular", "square"])
def test_round_trip(suite, kind):
    # the suite samples random gauge angles for the 2-d kinds; residual is relative to nu
    assert suite.identities[kind].max("round_trip") <= 1e-12


@pytest.mark.criterion("3 pair recovery")
@pytest.mark.parametrize("n, l, S0, S1", [
    ((1, 0, 0), (0, 0, 0), (1, 0, 0), (-1, 0, 0)),
    ((0, 0, 0), (0, 0, 1), (0, 0, 1), (0, 0, 1)),
    ((0.6, 0, 0), (0, 0, 0.8), (0.6, 0, 0.8), (-0.6, 0, 0.8)),
])
def test_pair_recovery(n, l, S0, S1):
    f = dec.ChainFields(np.array(n, float), np.array(l, float))
    R0, R1 = dec.chain_reconstruct(f, 1.0, 1.0)
    np.testing.assert_allclose(R0, S0, rtol=0, atol=1e-15)
    np.testing.assert_allclose(R1, S1, rtol=0, atol=1e-15)
    back = dec.chain_decompose(R0, R1, 1.0, 1.0)
    np.testing.assert_allclose(back.n, n, rtol=0, atol=1e-15)
    np.testing.assert_allclose(back.l, l, rtol=0, atol=1e-15)


@pytest.mark.criterion("4 reference states")
def test_tri120_state():
    cfg = reference_config(build_lattice(LatticeSpec("triangular", (3, 3))), 1.0, "tri120")
    f = dec.decompose(cfg).fields
    assert np.abs(np.real(np.sum(f.n * np.conj(f.n), -1)) - 1).max() <= 1e-12
    frame = np.stack([f.nX, f.nY, f.nZ], axis=-2)
    gram = frame @ np.swapaxes(frame, -1, -2)
    assert np.abs(gram - np.eye(3)).max() <= 1e-12
    assert np.abs(f.chi).max() <= 1e-12 and np.abs(f.nude_chi).max() <= 1e-12


@pytest.mark.criterion("4 reference states")
def test_neel_square_state():
    f = dec.decompose(reference_config(build_lattice(LatticeSpec("square", (2, 2))), 1.0, "neel")).fields
    assert np.abs(np.linalg.norm(f.n, axis=-1) - 1).max() <= 1e-12
    assert np.abs(f.d).max() <= 1e-12 and np.abs(f.nude_chi).max() <= 1e-12


@pytest.mark.criterion("4 reference states")
@pytest.mark.parametrize("kind, extent, dim", [("chain", 4, 1), ("triangular", (3, 3), 2), ("square", (2, 2), 2)])
@pytest.mark.parametrize("step, nu", [(1.0, 1.0), (0.5, 2.0)])
def test_ferro_states(kind, extent, dim, step, nu):
    cfg = reference_config(build_lattice(LatticeSpec(kind, extent, step)), nu, "ferro")
    f = dec.decompose(cfg).fields
    assert np.abs(f.n).max() <= 1e-12
    direction = cfg.spins[0] / nu
    np.testing.assert_allclose(f.l, np.broadcast_to(nu / step**dim * direction, f.l.shape), rtol=1e-12, atol=1e-12)


@pytest.mark.criterion("5 ground-state energies")
def test_chain_ground_energy():
    lat = build_lattice(LatticeSpec("chain", 8))
    _, trace = minimize(random_config(lat, 1.0, 0), 1.0, MinimizeOptions(energy_tol=1e-12))
    assert abs(trace.energies[-1] / lat.n_sites + 1.0) <= 1e-8


@pytest.mark.criterion("5 ground-state energies")
def test_square_ground_energy():
    lat = build_lattice(LatticeSpec("square", (4, 4)))
    _, trace = minimize(random_config(lat, 1.0, 0), 1.0, MinimizeOptions(energy_tol=1e-12))
    assert abs(trace.energies[-1] / lat.n_sites + 2.0) <= 1e-6


@pytest.mark.criterion("5 ground-state energies")
def test_triangular_ground_energy():
    lat = build_lattice(LatticeSpec("triangular", (4, 4)))
    _, trace = minimize_with_restarts(lat, 1.0, 1.0, MinimizeOptions(energy_tol=1e-12), restarts=5, seed=0)
    assert abs(trace.energies[-1] / lat.n_sites + 1.5) <= 1e-4


@pytest.mark.criterion("6 emergent order")
def test_square_emergent_order():
    lat = build_lattice(LatticeSpec("square", (4, 4)))
    cfg, _ = minimize(random_config(lat, 1.0, 0), 1.0, MinimizeOptions(energy_tol=1e-12))
    f = dec.decompose(cfg).fields
    assert np.mean(np.linalg.norm(f.n, axis=-1)) >= 0.999
    assert np.abs(f.nude_chi).max() <= 1e-6


@pytest.mark.criterion("7 continuum scan")
def test_chain_scan_slope():
    table = affleck_scan("chain", ScanSchedule.geometric(6, kappa=0.1))
    assert table.column("a").tolist() == [2.0**-k for k in range(6)]
    slope = fit_slope(table)
    print(f"fitted slope {slope:.6f}")
    assert abs(slope - 2.0) <= 0.02


@pytest.mark.criterion("7 continuum scan")
def test_square_dihedron_residuals():
    lat = build_lattice(LatticeSpec("square", (4, 4)))
    res = [frame_residual_max(dec.decompose(reference_config(lat, 1.0, "twist", kappa=k)))
           for k in (0.2, 0.1, 0.05)]
    print("dihedron residuals", res)
    assert res[0] > res[1] > res[2]
    assert res[2] < res[0] / 2


@pytest.mark.criterion("8 discrepancy report")
def test_discrepancy_report(tmp_path, capsys):
    assert main(["verify", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    report = json.loads((tmp_path / "verify_summary.json").read_text())["discrepancies"]
    for group in ("tri_nn_phase", "nZ_pseudoscalar"):
        assert f"{group}:" in out
        variants = report[group]["max_residual"]
        assert len(variants) >= 2
        assert len([v for v in variants.values() if v <= TOL]) == 1
    assert report["tri_nn_phase"]["passing"] == ["exp(-3i*gamma)"]
    assert report["nZ_pseudoscalar"]["passing"] == ["-"]


def _configs(tmp_path):
    lat = {"kind": "square", "extent": [4, 4]}
    spins = tmp_path / "spins.json"
    spins.write_text(random_config(build_lattice(LatticeSpec("square", (4, 4))), 1.0, 9).to_json())
    return {
        "verify": {"command": "verify", "verify": {"samples": 2000}},
        "decompose": {"command": "decompose", "gauge": {"random": 5}, "decompose": {"input": str(spins)}},
        "simulate": {"command": "simulate", "lattice": lat, "seed": 3,
                     "simulate": {"minimize": {"max_sweeps": 20}, "metropolis": {"beta": 2.0, "sweeps": 20}}},
        "scan": {"command": "scan", "lattice": {"kind": "chain", "extent": 8}, "scan": {"points": 6}},
    }


@pytest.mark.criterion("9 determinism")
@pytest.mark.parametrize("command", ["verify", "decompose", "simulate", "scan"])
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_byte_identical_reruns(tmp_path, command, fmt):
    cfg = _configs(tmp_path)[command]
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    trees = []
    for run in ("first", "second"):
        out = tmp_path / run
        assert main([command, "--config", str(path), "--out", str(out), "--format", fmt]) == 0
        trees.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert trees[0] and trees[0] == trees[1]


@pytest.mark.parametrize("group, variant", [
    ("chirality_nZ_l", "27/4"), ("square_n_dot_d", "real_part"), ("square_n_dot_l", "-"),
])
def test_corrected_forms_hold(suite, group, variant):
    # companions of the three printed relations above that fail on generic spins
    assert suite.discrepancies[group][variant] <= TOL
