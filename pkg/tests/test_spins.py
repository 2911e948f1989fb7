import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.transform import Rotation

from hypersite.errors import ConfigurationError
from hypersite.lattice import LatticeSpec, build_lattice
from hypersite.spins import (
    SpinConfiguration, random_config, reference_config, spin_length, validate_norms,
)


@pytest.mark.parametrize("s, nu", [(0.5, 0.8660254037844386), (1, 1.4142135623730951),
                                   (3, 3.4641016151377544)])
def test_spin_length(s, nu):
    assert spin_length(s) == pytest.approx(nu, abs=1e-15)


@pytest.mark.parametrize("s", [0, -0.5])
def test_spin_length_domain(s):
    with pytest.raises(ValueError):
        spin_length(s)


def test_neel_chain(chain8):
    cfg = reference_config(chain8, 2.0, "neel", u=(0, 0, 1))
    S = cfg.hyper_spins()
    assert np.array_equal(S[:, 0], np.tile([0, 0, 2.0], (4, 1)))
    assert np.array_equal(S[:, 1], np.tile([0, 0, -2.0], (4, 1)))


def test_tri120(tri33):
    cfg = reference_config(tri33, 1.0, "tri120", e1=(1, 0, 0), e2=(0, 1, 0))
    S = cfg.hyper_spins()
    h = np.sqrt(3) / 2
    np.testing.assert_allclose(S[:, 0], np.tile([1, 0, 0], (9, 1)), atol=1e-15)
    np.testing.assert_allclose(S[:, 1], np.tile([-0.5, h, 0], (9, 1)), atol=1e-15)
    np.testing.assert_allclose(S[:, 2], np.tile([-0.5, -h, 0], (9, 1)), atol=1e-15)


def test_twist_chain_neighbour_angle():
    lat = build_lattice(LatticeSpec("chain", 6, step=0.5))
    cfg = reference_config(lat, 1.0, "twist", u=(0, 0, 1), kappa=0.1)
    S = cfg.spins
    cos = np.einsum("ij,ij->i", S[:-1], S[1:])
    np.testing.assert_allclose(np.arccos(cos), np.pi - 0.1 * 0.5, atol=1e-12)


def test_columnar(square22):
    cfg = reference_config(square22, 1.0, "columnar")
    S = cfg.hyper_spins()
    z = np.array([0, 0, 1.0])
    assert np.array_equal(S[0], [z, z, -z, -z])


@pytest.mark.parametrize("kind, extent, family", [
    ("triangular", (2, 2), "neel"), ("chain", 2, "tri120"), ("chain", 2, "columnar"),
    ("square", (2, 2), "spiral"),
])
def test_family_mismatch(kind, extent, family):
    with pytest.raises(ConfigurationError):
        reference_config(build_lattice(LatticeSpec(kind, extent)), 1.0, family)


def test_random_reproducible(square44):
    a, b = random_config(square44, 1.3, 42), random_config(square44, 1.3, 42)
    assert a.to_json() == b.to_json()
    assert not np.array_equal(a.spins, random_config(square44, 1.3, 43).spins)


def test_random_isotropy():
    lat = build_lattice(LatticeSpec("chain", 5000))
    cfg = random_config(lat, 2.0, 1)
    mean = cfg.spins.mean(axis=0)
    assert np.all(np.abs(mean) < 5 / np.sqrt(lat.n_sites) * cfg.nu)


@pytest.mark.parametrize("family, kw", [("ferro", {}), ("neel", {}), ("columnar", {}),
                                        ("twist", {"kappa": 0.3, "u": (1, 2, 3)})])
def test_generators_norms(square44, family, kw):
    cfg = reference_config(square44, 1.7, family, **kw)
    assert validate_norms(cfg).max("norm") <= 1e-12 * 1.7


def test_validate_norms_detects_scaled_spin(square22):
    cfg = random_config(square22, 1.0, 0)
    cfg.spins[5] *= 1.01
    rep = validate_norms(cfg)
    assert rep.residuals["norm"][5] == pytest.approx(0.01, rel=1e-9)
    assert len(rep.violations) == 1 and rep.violations[0].startswith("site 5")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_global_rotation_preserves_norms(seed):
    lat = build_lattice(LatticeSpec("triangular", (2, 2)))
    cfg = random_config(lat, 1.0, seed)
    R = Rotation.random(random_state=seed).as_matrix()
    assert validate_norms(cfg.rotated(R)).max("norm") <= 1e-12


def test_json_round_trip_bit_exact(tri33):
    cfg = random_config(tri33, spin_length(2.5), 9)
    back = SpinConfiguration.from_json(cfg.to_json())
    assert np.array_equal(back.spins, cfg.spins) and back.nu == cfg.nu
    assert back.to_json() == cfg.to_json()
