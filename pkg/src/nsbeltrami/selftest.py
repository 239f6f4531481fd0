"""
Oracle suite run by ``nsbeltrami selftest``.

Each check compares against a closed form or an exact discrete identity and
prints one PASS/FAIL line. The whole suite takes a few seconds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cutoff import Cylinder, CutoffSpec, build_cutoff, verify_cutoff
from .diagnostics import alpha
from .flows import exact_abc, init_abc, init_random_solenoidal
from .ledger import Ledger, LedgerConfig
from .solver import SolverConfig, simulate
from .spectral import (
    Grid,
    cross,
    curl,
    divergence,
    fft_forward,
    fft_inverse,
    gradient,
    inner,
    integrate,
    leray_project,
    spectral_energy,
)

__all__ = ["OracleResult", "ORACLES", "run_selftest"]


@dataclass
class OracleResult:
    name: str
    passed: bool
    value: float
    tolerance: float

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.value:.3e} (tol {self.tolerance:.0e})"


def _band_limited(grid: Grid, rng: np.random.Generator, shape=(3,)) -> np.ndarray:
    """Random field with ``max|k_i| < n/4``, so pairwise products are alias free."""
    kx, ky, kz = (np.abs(k) for k in grid.integer_wavenumbers)
    kmax = np.maximum(np.maximum(kx, ky), kz)
    fh = fft_forward(rng.standard_normal(shape + grid.real_shape)) * (kmax < grid.n / 4)
    return fft_inverse(fh, grid)


def _roundtrip() -> tuple[float, float]:
    grid = Grid(16)
    f = np.random.default_rng(1).standard_normal((3,) + grid.real_shape)
    return float(np.max(np.abs(fft_inverse(fft_forward(f), grid) - f))), 1e-12


def _curl_adjoint() -> tuple[float, float]:
    grid = Grid(16)
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(10):
        a, b = _band_limited(grid, rng), _band_limited(grid, rng)
        ca = fft_inverse(curl(fft_forward(a), grid), grid)
        cb = fft_inverse(curl(fft_forward(b), grid), grid)
        lhs, rhs = inner(ca, b, grid), inner(a, cb, grid)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    return worst, 1e-10


def _product_rule() -> tuple[float, float]:
    grid = Grid(24)
    rng = np.random.default_rng(3)
    f, g = _band_limited(grid, rng), _band_limited(grid, rng)
    lhs = fft_inverse(divergence(fft_forward(cross(f, g)), grid), grid)
    cf = fft_inverse(curl(fft_forward(f), grid), grid)
    cg = fft_inverse(curl(fft_forward(g), grid), grid)
    rhs = np.sum(g * cf - f * cg, axis=0)
    return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs))), 1e-10


def _leray() -> tuple[float, float]:
    grid = Grid(16)
    rng = np.random.default_rng(4)
    vh = fft_forward(rng.standard_normal((3,) + grid.real_shape))
    p1 = leray_project(vh, grid)
    idem = np.max(np.abs(leray_project(p1, grid) - p1))
    qh = fft_forward(rng.standard_normal(grid.real_shape))
    grad = gradient(qh, grid)
    annihilated = np.max(np.abs(leray_project(grad, grid)))
    return float(max(idem, annihilated / np.max(np.abs(grad)))), 1e-12


def _abc_decay() -> tuple[float, float]:
    grid = Grid(16)
    traj = simulate(SolverConfig(grid, 1e-3, 0.05, 0.01), init_abc(grid))
    snap = traj.snapshots[-1]
    return float(np.max(np.abs(snap.u - exact_abc(grid, snap.t)))), 1e-8


def _abc_alignment() -> tuple[float, float]:
    grid = Grid(16)
    traj = simulate(SolverConfig(grid, 1e-3, 0.02, 0.01), init_abc(grid))
    everywhere = np.ones(grid.real_shape, bool)
    return max(alpha(s, everywhere) for s in traj.snapshots), 1e-6


def _cutoff() -> tuple[float, float]:
    grid = Grid(32)
    spec = CutoffSpec(Cylinder((np.pi,) * 3, 1.0, 0.4))
    report = verify_cutoff(build_cutoff(spec, grid))
    return (0.0 if report.passed else 1.0), 0.5


_ledger_cache: dict = {}


def _ledger_report():
    if "rep" not in _ledger_cache:
        grid = Grid(32, nu=0.2)
        traj = simulate(SolverConfig(grid, 0.005, 1.44, 0.04), init_random_solenoidal(grid, seed=7))
        cyl = Cylinder((np.pi,) * 3, 1.44, 0.6)
        cutoff = build_cutoff(CutoffSpec(cyl, profile_order=2), grid)
        cfg = LedgerConfig(cyl, 1.0, cutoff, time_quadrature="simpson", padding=2.0)
        _ledger_cache["rep"] = Ledger(traj, cfg).report()
    return _ledger_cache["rep"]


def _identity(name: str, tol: float) -> Callable[[], tuple[float, float]]:
    def check():
        return float(getattr(_ledger_report(), name)), tol

    return check


def _partition() -> tuple[float, float]:
    rep = _ledger_report()
    e2 = abs(rep.I2_lo + rep.I2_hi - rep.I2) / max(abs(rep.I2), 1e-300)
    e3 = abs(rep.I3_lo + rep.I3_hi - rep.I3) / max(abs(rep.I3), 1e-300)
    return max(e2, e3), 1e-12


def _kinetic_parseval() -> tuple[float, float]:
    grid = Grid(16)
    u = _band_limited(grid, np.random.default_rng(5))
    direct = integrate(np.sum(u * u, axis=0), grid)
    return abs(spectral_energy(fft_forward(u), grid) - direct) / direct, 1e-12


ORACLES: list[tuple[str, Callable[[], tuple[float, float]]]] = [
    ("FFT round trip (max abs error)", _roundtrip),
    ("Parseval identity (relative)", _kinetic_parseval),
    ("curl adjointness (relative)", _curl_adjoint),
    ("div(f x g) product rule (relative)", _product_rule),
    ("Leray idempotence and gradient annihilation", _leray),
    ("ABC exact decay (max abs error)", _abc_decay),
    ("ABC alignment sup sin(theta)", _abc_alignment),
    ("cutoff contract (0 = all checks pass)", _cutoff),
    ("energy identity residual", _identity("residual_major1", 1e-3)),
    ("diffusion integration by parts residual", _identity("residual_est1", 1e-3)),
    ("time integration by parts residual", _identity("residual_est2", 1e-3)),
    ("nonlinear integration by parts residual", _identity("residual_est3", 1e-3)),
    ("high/low vorticity partition (relative)", _partition),
]


def run_selftest(echo: Callable[[str], None] = print) -> bool:
    ok = True
    for name, check in ORACLES:
        value, tol = check()
        result = OracleResult(name, bool(value <= tol), value, tol)
        echo(result.line())
        ok &= result.passed
    _ledger_cache.clear()
    return ok
