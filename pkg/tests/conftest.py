import numpy as np
import pytest

from nsbeltrami.cutoff import Cylinder, CutoffSpec, build_cutoff
from nsbeltrami.flows import init_abc, init_random_solenoidal
from nsbeltrami.solver import SolverConfig, simulate
from nsbeltrami.spectral import Grid, fft_forward, fft_inverse


def band_limited(grid, rng, shape=(3,), fraction=0.25):
    """Random real field with every ``|k_i| < fraction * n``."""
    kx, ky, kz = (np.abs(k) for k in grid.integer_wavenumbers)
    keep = np.maximum(np.maximum(kx, ky), kz) < fraction * grid.n
    fh = fft_forward(rng.standard_normal(shape + grid.real_shape)) * keep
    return fft_inverse(fh, grid)


@pytest.fixture(scope="session")
def abc_run():
    grid = Grid(16)
    return simulate(SolverConfig(grid, 1e-3, 0.1, 0.01), init_abc(grid))


@pytest.fixture(scope="session")
def random_run():
    """Decaying random flow resolved at n=32, snapshots every 0.04 up to 1.44."""
    grid = Grid(32, nu=0.2)
    return simulate(SolverConfig(grid, 0.005, 1.44, 0.04), init_random_solenoidal(grid, seed=7))


@pytest.fixture(scope="session")
def random_cylinder():
    return Cylinder((np.pi,) * 3, 1.44, 0.6)


@pytest.fixture(scope="session")
def random_cutoff(random_run, random_cylinder):
    return build_cutoff(CutoffSpec(random_cylinder, profile_order=2), random_run.grid)


# acceptance bookkeeping: criterion id -> (title, [(check, ok, detail)])
ACCEPTANCE: dict[int, tuple[str, list]] = {}


def record(criterion: int, title: str, check: str, ok: bool, detail: str = "") -> bool:
    ACCEPTANCE.setdefault(criterion, (title, []))[1].append((check, bool(ok), detail))
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        title, checks = ACCEPTANCE[cid]
        ok = all(c[1] for c in checks)
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {cid}: {title}")
        for name, passed, detail in checks:
            tr.write_line(f"      {'ok  ' if passed else 'FAIL'} {name}{': ' + detail if detail else ''}")
