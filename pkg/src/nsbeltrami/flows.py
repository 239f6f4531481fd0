"""Initial conditions and the closed-form ABC solution."""

from __future__ import annotations

import numpy as np

from .spectral import Grid, dealias, fft_forward, fft_inverse, leray_project

__all__ = [
    "init_abc",
    "exact_abc",
    "init_taylor_green",
    "init_random_solenoidal",
    "init_perturbed_beltrami",
]


def init_abc(grid: Grid, A: float = 1.0, B: float = 1.0, C: float = 1.0) -> np.ndarray:
    """
    Arnold-Beltrami-Childress field at the fundamental wavenumber ``k0``.

    ``curl u = k0 u``, so on the default 2*pi box the field is its own curl.
    """
    k0 = grid.k0
    x, y, z = grid.mesh
    return np.stack(
        [
            A * np.sin(k0 * z) + C * np.cos(k0 * y),
            B * np.sin(k0 * x) + A * np.cos(k0 * z),
            C * np.sin(k0 * y) + B * np.cos(k0 * x),
        ]
    )


def exact_abc(grid: Grid, t: float, A: float = 1.0, B: float = 1.0, C: float = 1.0) -> np.ndarray:
    """Exact Navier-Stokes solution from ``init_abc``: pure heat decay ``exp(-nu k0^2 t)``."""
    return np.exp(-grid.nu * grid.k0**2 * t) * init_abc(grid, A, B, C)


def init_taylor_green(grid: Grid, amplitude: float = 1.0) -> np.ndarray:
    k0 = grid.k0
    x, y, z = grid.mesh
    return amplitude * np.stack(
        [
            np.sin(k0 * x) * np.cos(k0 * y) * np.cos(k0 * z),
            -np.cos(k0 * x) * np.sin(k0 * y) * np.cos(k0 * z),
            np.zeros(grid.real_shape),
        ]
    )


def init_random_solenoidal(
    grid: Grid,
    seed: int = 0,
    spectrum_slope: float = 4.0,
    k_peak: float = 2.0,
    amplitude: float = 1.0,
) -> np.ndarray:
    """
    Random divergence-free field with a prescribed shell spectrum.

    The shell energy spectrum is
    ``E(k) ~ (k/k_peak)**s * exp(-(s/2) * ((k/k_peak)**2 - 1))`` with
    ``s = spectrum_slope``: it rises as ``k**s`` at low wavenumber and peaks
    at ``k_peak`` for any ``s > 0``. Phases come from real white noise drawn
    with ``numpy.random.default_rng(seed)``, so the field is reproducible per
    seed. The result is dealiased, projected and scaled so that the box mean
    of ``|u|^2`` equals ``amplitude**2``.
    """
    if spectrum_slope <= 0:
        raise ValueError(f"spectrum_slope must be positive, got {spectrum_slope}")
    if k_peak <= 0:
        raise ValueError(f"k_peak must be positive, got {k_peak}")
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((3,) + grid.real_shape)
    kx, ky, kz = grid.integer_wavenumbers
    kmag = np.sqrt(kx**2 + ky**2 + kz**2)
    s = spectrum_slope
    with np.errstate(divide="ignore", invalid="ignore"):
        q = kmag / k_peak
        shell = q**s * np.exp(-0.5 * s * (q**2 - 1.0))
        amp = np.where(kmag > 0, np.sqrt(shell / (4.0 * np.pi * kmag**2)), 0.0)
    uh = leray_project(dealias(fft_forward(noise) * amp, grid), grid)
    u = fft_inverse(uh, grid)
    ms = np.mean(np.sum(u * u, axis=0))
    if ms == 0:
        return u
    return u * (amplitude / np.sqrt(ms))


def init_perturbed_beltrami(
    grid: Grid,
    epsilon: float,
    seed: int = 0,
    A: float = 1.0,
    B: float = 1.0,
    C: float = 1.0,
    k_peak: float = 2.0,
) -> np.ndarray:
    """ABC field plus ``epsilon`` times a unit-rms random solenoidal field."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon}")
    base = init_abc(grid, A, B, C)
    if epsilon == 0:
        return base
    return base + epsilon * init_random_solenoidal(grid, seed=seed, k_peak=k_peak)
