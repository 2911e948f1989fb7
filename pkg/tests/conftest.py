import numpy as np
import pytest

from hypersite.lattice import LatticeSpec, build_lattice


def unit_spins(rng, n, nu=1.0):
    g = rng.standard_normal((n, 3))
    return nu * g / np.linalg.norm(g, axis=1)[:, None]


@pytest.fixture
def rng():
    return np.random.default_rng(20001015)


@pytest.fixture(scope="session")
def chain8():
    return build_lattice(LatticeSpec("chain", 4))


@pytest.fixture(scope="session")
def square44():
    return build_lattice(LatticeSpec("square", (4, 4)))


@pytest.fixture(scope="session")
def square22():
    return build_lattice(LatticeSpec("square", (2, 2)))


@pytest.fixture(scope="session")
def tri33():
    return build_lattice(LatticeSpec("triangular", (3, 3)))


@pytest.fixture(scope="session")
def tri44():
    return build_lattice(LatticeSpec("triangular", (4, 4)))


# one PASS/FAIL line per acceptance criterion, aggregated over its test cases
_criteria: dict[str, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion this test belongs to")


def pytest_runtest_logreport(report):
    label = dict(report.user_properties).get("criterion")
    if label is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria.setdefault(label, []).append(report.outcome == "passed")


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        item.user_properties.append(("criterion", mark.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_criteria, key=lambda s: int(s.split()[0])):
        ok = _criteria[label]
        status = "PASS" if all(ok) else "FAIL"
        terminalreporter.write_line(f"{status} criterion {label} ({sum(ok)}/{len(ok)} cases)")
