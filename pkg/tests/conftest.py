import numpy as np
import pytest

from geoloops.flat import make_lattice

ACCEPTANCE = {}


def random_lattices(count=20, seed=2024):
    """Full-rank 2D/3D lattices, entries in [-3, 3], condition number <= 10."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = 2 if len(out) % 2 == 0 else 3
        B = rng.uniform(-3, 3, size=(n, n))
        if abs(np.linalg.det(B)) > 0.5 and np.linalg.cond(B) <= 10:
            out.append(make_lattice(B, name=f"random-{len(out)}"))
    return out


@pytest.fixture(scope="session")
def lattices20():
    return random_lattices()


@pytest.fixture
def Z2():
    return make_lattice(np.eye(2), name="z2")


@pytest.fixture
def hexagonal():
    return make_lattice([[1, 0], [0.5, 0.8660254]], name="hexagonal")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key:>2}. {title}{'  ' + detail if detail else ''}")
