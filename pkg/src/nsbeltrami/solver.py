"""
Pseudo-spectral time integration of the incompressible Navier-Stokes
equations on the periodic box.

The velocity equation is advanced in rotational form,

    u_t = P(u x omega) + nu * Laplacian(u),

where ``P`` is the Leray projector. The pressure gradient, the gradient part
of the nonlinearity and any potential body force all lie in the null space
of ``P``, so none of them needs to be computed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
import logging
import warnings

import numpy as np

from .spectral import (
    Grid,
    cross,
    curl,
    dealias,
    divergence,
    fft_forward,
    fft_inverse,
    leray_project,
    spectral_energy,
)

__all__ = [
    "SCHEMES",
    "SolverConfig",
    "SolverError",
    "Snapshot",
    "Trajectory",
    "rhs",
    "vorticity_rhs",
    "step",
    "simulate",
    "kinetic_energy",
    "spectral_divergence",
]

log = logging.getLogger(__name__)

SCHEMES = ("rk4-integrating-factor", "rk4-plain")

DIVERGENCE_TOL = 1e-8


class SolverError(RuntimeError):
    """Numerical failure during time stepping (non-finite state)."""


@dataclass(frozen=True)
class SolverConfig:
    """
    Time-stepping parameters.

    ``snapshot_interval`` must be a whole number of steps and ``t_end`` a
    whole number of steps from zero. ``tail_tolerance`` is the largest
    admissible fraction of kinetic energy in the outer band of the retained
    spectrum (``n/4 < max|k_i| <= n/3``) before the run is declared
    under-resolved and stopped.
    """

    grid: Grid
    dt: float
    t_end: float
    snapshot_interval: float
    scheme: str = "rk4-integrating-factor"
    tail_tolerance: float = 1e-6

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if self.snapshot_interval < self.dt * (1 - 1e-9):
            raise ValueError(
                f"snapshot_interval {self.snapshot_interval} is shorter than dt {self.dt}"
            )
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        ratio = self.snapshot_interval / self.dt
        if abs(ratio - round(ratio)) > 1e-6 * ratio:
            raise ValueError("snapshot_interval must be an integer multiple of dt")
        steps = self.t_end / self.dt
        if abs(steps - round(steps)) > 1e-6 * steps:
            raise ValueError("t_end must be an integer multiple of dt")

    @property
    def steps_per_snapshot(self) -> int:
        return int(round(self.snapshot_interval / self.dt))

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def cfl_ok(self, u: np.ndarray) -> bool:
        """Advisory check ``dt <= h / (4 max|u|)``."""
        umax = float(np.max(np.sqrt(np.sum(u * u, axis=0))))
        return umax == 0 or self.dt <= self.grid.h / (4.0 * umax)


@dataclass(frozen=True, eq=False)
class Snapshot:
    """Velocity and its cached vorticity at one instant."""

    t: float
    u: np.ndarray
    omega: np.ndarray
    grid: Grid

    @classmethod
    def from_spectral(cls, grid: Grid, uh: np.ndarray, t: float) -> "Snapshot":
        u = fft_inverse(uh, grid)
        omega = fft_inverse(curl(uh, grid), grid)
        u.setflags(write=False)
        omega.setflags(write=False)
        snap = cls(float(t), u, omega, grid)
        snap.__dict__["u_hat"] = uh
        return snap

    @classmethod
    def from_velocity(cls, grid: Grid, u: np.ndarray, t: float = 0.0) -> "Snapshot":
        return cls.from_spectral(grid, fft_forward(u), t)

    @cached_property
    def u_hat(self) -> np.ndarray:
        return fft_forward(self.u)

    @cached_property
    def omega_hat(self) -> np.ndarray:
        return curl(self.u_hat, self.grid)

    @property
    def energy(self) -> float:
        return kinetic_energy(self.u_hat, self.grid)


@dataclass
class Trajectory:
    """Time-ordered snapshots plus the reason the run stopped."""

    config: SolverConfig
    snapshots: list[Snapshot] = field(default_factory=list)
    status: str = "complete"
    message: str = ""

    @property
    def grid(self) -> Grid:
        return self.config.grid

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    @property
    def interval(self) -> float:
        t = self.times
        return float(t[1] - t[0]) if len(t) > 1 else self.config.snapshot_interval

    def index_of(self, t: float, tol: float = 1e-9) -> int:
        """Index of the snapshot at time ``t``; ``KeyError`` if there is none."""
        times = self.times
        if len(times) == 0:
            raise KeyError(t)
        i = int(np.argmin(np.abs(times - t)))
        if abs(times[i] - t) > tol * max(1.0, abs(t)):
            raise KeyError(t)
        return i

    def energies(self) -> np.ndarray:
        return np.array([s.energy for s in self.snapshots])


def kinetic_energy(uh: np.ndarray, grid: Grid) -> float:
    """``(1/2) integral |u|^2``."""
    return 0.5 * spectral_energy(uh, grid)


def spectral_divergence(uh: np.ndarray, grid: Grid) -> float:
    """Largest modulus of the divergence coefficients."""
    return float(np.max(np.abs(divergence(uh, grid))))


def _check_solenoidal(uh: np.ndarray, grid: Grid) -> None:
    scale = float(np.max(np.abs(uh))) * grid.k0 * grid.n
    div = spectral_divergence(uh, grid)
    if div > DIVERGENCE_TOL * max(scale, 1e-300):
        raise ValueError(f"velocity is not solenoidal (max |div| coefficient {div:.3e})")


def _nonlinear(uh: np.ndarray, grid: Grid) -> np.ndarray:
    u = fft_inverse(uh, grid)
    omega = fft_inverse(curl(uh, grid), grid)
    return leray_project(dealias(fft_forward(cross(u, omega)), grid), grid)


def rhs(uh: np.ndarray, grid: Grid) -> np.ndarray:
    """
    Semi-discrete velocity tendency ``P(u x omega) + nu Lap u``.

    The product is formed on the grid and truncated by the 2/3 rule before
    projection.
    """
    _check_solenoidal(uh, grid)
    return _nonlinear(uh, grid) - grid.nu * grid.k_squared * uh


def vorticity_rhs(uh: np.ndarray, grid: Grid, omega_hat: np.ndarray | None = None) -> np.ndarray:
    """
    Vorticity tendency ``nu Lap omega - curl(omega x u)``.

    The product ``omega x u`` is dealiased exactly as in :func:`rhs`, so the
    result equals ``curl(rhs(u))`` to round-off.
    """
    _check_solenoidal(uh, grid)
    if omega_hat is None:
        omega_hat = curl(uh, grid)
    u = fft_inverse(uh, grid)
    omega = fft_inverse(omega_hat, grid)
    flux = dealias(fft_forward(cross(omega, u)), grid)
    return -grid.nu * grid.k_squared * omega_hat - curl(flux, grid)


@lru_cache(maxsize=8)
def _factors(grid: Grid, dt: float) -> tuple[np.ndarray, np.ndarray]:
    lin = -grid.nu * grid.k_squared
    return np.exp(lin * dt), np.exp(lin * dt / 2)


def _step_if(uh: np.ndarray, dt: float, grid: Grid) -> np.ndarray:
    e, e2 = _factors(grid, dt)
    n1 = _nonlinear(uh, grid)
    n2 = _nonlinear(e2 * (uh + 0.5 * dt * n1), grid)
    n3 = _nonlinear(e2 * uh + 0.5 * dt * n2, grid)
    n4 = _nonlinear(e * uh + dt * e2 * n3, grid)
    return e * uh + (dt / 6.0) * (e * n1 + 2.0 * e2 * (n2 + n3) + n4)


def _step_plain(uh: np.ndarray, dt: float, grid: Grid) -> np.ndarray:
    lin = -grid.nu * grid.k_squared

    def f(v):
        return _nonlinear(v, grid) + lin * v

    k1 = f(uh)
    k2 = f(uh + 0.5 * dt * k1)
    k3 = f(uh + 0.5 * dt * k2)
    k4 = f(uh + dt * k3)
    return uh + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _advance(uh: np.ndarray, dt: float, grid: Grid, scheme: str) -> np.ndarray:
    if scheme == "rk4-integrating-factor":
        new = _step_if(uh, dt, grid)
    elif scheme == "rk4-plain":
        new = _step_plain(uh, dt, grid)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    if not np.all(np.isfinite(new)):
        raise SolverError("non-finite values produced by time step")
    return leray_project(dealias(new, grid), grid)


def step(state: Snapshot, dt: float, scheme: str = "rk4-integrating-factor") -> Snapshot:
    """
    Advance one RK4 step.

    The result is truncated to the retained 2/3 band and re-projected onto
    solenoidal fields; round-off outside the band would otherwise be
    amplified by the stiff viscous modes under the plain scheme.
    """
    if not (np.all(np.isfinite(state.u))):
        raise SolverError(f"non-finite values in state at t={state.t}")
    new = _advance(state.u_hat, dt, state.grid, scheme)
    return Snapshot.from_spectral(state.grid, new, state.t + dt)


def tail_fraction(uh: np.ndarray, grid: Grid) -> float:
    """Energy fraction in the outer band ``n/4 < max|k_i|`` of the spectrum."""
    kx, ky, kz = grid.integer_wavenumbers
    kinf = np.maximum(np.maximum(np.abs(kx), np.abs(ky)), np.abs(kz))
    p = np.sum(np.abs(uh) ** 2, axis=0) * grid.parseval_weights
    total = float(np.sum(p))
    if total == 0:
        return 0.0
    return float(np.sum(np.where(kinf > grid.n / 4, p, 0.0))) / total


def simulate(config: SolverConfig, ic: np.ndarray) -> Trajectory:
    """
    Integrate from ``ic`` at t=0 and record snapshots every
    ``snapshot_interval``.

    The initial field is dealiased and projected first. The run stops early,
    keeping the snapshots recorded so far, when the state becomes
    non-finite (status ``"nan"``), the kinetic energy grows (``"energy-growth"``)
    or the spectral tail exceeds ``tail_tolerance`` (``"under-resolved"``).
    """
    grid = config.grid
    ic = np.asarray(ic, dtype=np.float64)
    if ic.shape != (3,) + grid.real_shape:
        raise ValueError(f"initial condition has shape {ic.shape}, expected {(3,) + grid.real_shape}")
    uh = leray_project(dealias(fft_forward(ic), grid), grid)
    if not config.cfl_ok(ic):
        warnings.warn(
            f"dt={config.dt} exceeds the advisory CFL limit h/(4 max|u|)", RuntimeWarning, stacklevel=2
        )
    traj = Trajectory(config)
    traj.snapshots.append(Snapshot.from_spectral(grid, uh, 0.0))
    energy = kinetic_energy(uh, grid)
    if tail_fraction(uh, grid) > config.tail_tolerance:
        traj.status = "under-resolved"
        traj.message = "initial condition exceeds spectral tail tolerance"
        return traj
    every = config.steps_per_snapshot
    for i in range(1, config.n_steps + 1):
        try:
            uh = _advance(uh, config.dt, grid, config.scheme)
        except SolverError as exc:
            traj.status = "nan"
            traj.message = f"{exc} at step {i}"
            log.warning("run halted: %s", traj.message)
            return traj
        if i % every and i != config.n_steps:
            continue
        new_energy = kinetic_energy(uh, grid)
        if new_energy > energy * (1 + 1e-10) + 1e-300:
            traj.status = "energy-growth"
            traj.message = f"kinetic energy increased at t={i * config.dt:.6g}"
            log.warning("run halted: %s", traj.message)
            return traj
        frac = tail_fraction(uh, grid)
        if frac > config.tail_tolerance:
            traj.status = "under-resolved"
            traj.message = f"spectral tail fraction {frac:.2e} at t={i * config.dt:.6g}"
            log.warning("run halted: %s", traj.message)
            return traj
        energy = new_energy
        traj.snapshots.append(Snapshot.from_spectral(grid, uh, i * config.dt))
    return traj
