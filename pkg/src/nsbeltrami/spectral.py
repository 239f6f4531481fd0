"""
Fourier-space vector calculus on a triply periodic box.

Real fields are numpy arrays whose last three axes are the grid axes
``(x1, x2, x3)`` (``indexing="ij"``); leading axes hold components, so a
scalar is ``(n, n, n)``, a vector ``(3, n, n, n)`` and a velocity gradient
``(3, 3, n, n, n)`` with ``[i, j] = d u_i / d x_j``.

Spectral fields use the half-spectrum layout of ``scipy.fft.rfftn`` over the
last three axes, shape ``(..., n, n, n // 2 + 1)``, with the 1/n^3 factor on
the forward transform so the k=0 coefficient is the spatial mean and
coefficients do not depend on the resolution used to sample a band-limited
field.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
import os

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "fft_forward",
    "fft_inverse",
    "gradient",
    "divergence",
    "curl",
    "laplacian",
    "leray_project",
    "dealias",
    "pad",
    "cross",
    "dot",
    "norm",
    "integrate",
    "inner",
    "masked_l2",
    "spectral_energy",
]

_AXES = (-3, -2, -1)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("NSE_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Grid:
    """
    Uniform periodic grid on the cube ``[0, box_length)^3``.

    Parameters
    ----------
    n : int
        Points per axis; even and at least 4.
    box_length : float
        Side length of the periodic box.
    nu : float
        Kinematic viscosity carried with the grid so that every operator
        that needs it sees the same value.
    """

    n: int
    box_length: float = 2.0 * np.pi
    nu: float = 1.0

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 4 or self.n % 2:
            raise ValueError(f"grid size n must be an even integer >= 4, got {self.n}")
        if not (np.isfinite(self.box_length) and self.box_length > 0):
            raise ValueError(f"box_length must be positive, got {self.box_length}")
        if not (np.isfinite(self.nu) and self.nu > 0):
            raise ValueError(f"viscosity nu must be positive, got {self.nu}")

    @property
    def h(self) -> float:
        return self.box_length / self.n

    @property
    def cell_volume(self) -> float:
        return self.h**3

    @property
    def k0(self) -> float:
        """Physical wavenumber of the fundamental mode."""
        return 2.0 * np.pi / self.box_length

    @property
    def real_shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    @property
    def spectral_shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n // 2 + 1)

    @cached_property
    def x(self) -> np.ndarray:
        """1-D coordinates of the grid points along any axis."""
        return np.arange(self.n) * self.h

    @cached_property
    def mesh(self) -> np.ndarray:
        """Coordinates of every grid point, shape ``(3, n, n, n)``."""
        return np.stack(np.meshgrid(self.x, self.x, self.x, indexing="ij"))

    @cached_property
    def integer_wavenumbers(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Integer wavevector components, broadcastable to the spectral shape."""
        full = np.rint(np.fft.fftfreq(self.n) * self.n)
        half = np.rint(np.fft.rfftfreq(self.n) * self.n)
        return full[:, None, None], full[None, :, None], half[None, None, :]

    @cached_property
    def derivative_wavenumbers(self) -> np.ndarray:
        """
        Physical wavevector with the Nyquist components zeroed, shape
        ``(3, n, n, n//2+1)``.

        Zeroing the unpaired Nyquist mode keeps odd derivatives real and the
        discrete derivative skew-adjoint.
        """
        ks = []
        for k in self.integer_wavenumbers:
            kd = np.where(np.abs(k) == self.n // 2, 0.0, k) * self.k0
            ks.append(np.broadcast_to(kd, self.spectral_shape))
        return np.stack(ks)

    @cached_property
    def k_squared(self) -> np.ndarray:
        kx, ky, kz = self.integer_wavenumbers
        return (kx**2 + ky**2 + kz**2) * self.k0**2

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """True on retained modes: every ``|k_i| <= n/3``."""
        kx, ky, kz = self.integer_wavenumbers
        cut = self.n / 3.0
        return (np.abs(kx) <= cut) & (np.abs(ky) <= cut) & (np.abs(kz) <= cut)

    @cached_property
    def parseval_weights(self) -> np.ndarray:
        """Multiplicity of each stored half-spectrum mode in the full spectrum."""
        w = np.full(self.n // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        return np.broadcast_to(w[None, None, :], self.spectral_shape)

    def padded(self, factor: float) -> "Grid":
        """Grid with ``round(n * factor)`` points (rounded up to even)."""
        m = int(np.ceil(self.n * factor))
        m += m % 2
        return Grid(m, self.box_length, self.nu)


def fft_forward(f: np.ndarray) -> np.ndarray:
    """Forward transform of a real field over its last three axes."""
    f = np.asarray(f, dtype=np.float64)
    if not np.all(np.isfinite(f)):
        bad = int(np.count_nonzero(~np.isfinite(f)))
        raise ValueError(f"fft_forward: field has {bad} non-finite samples")
    return sfft.rfftn(f, axes=_AXES, norm="forward", workers=_workers())


def fft_inverse(fh: np.ndarray, grid: Grid) -> np.ndarray:
    return sfft.irfftn(fh, s=grid.real_shape, axes=_AXES, norm="forward", workers=_workers())


def gradient(fh: np.ndarray, grid: Grid) -> np.ndarray:
    """
    Spectral gradient; appends a derivative axis before the grid axes.

    A scalar ``(n, n, nh)`` becomes ``(3, n, n, nh)``; a vector becomes the
    ``(3, 3, ...)`` tensor with ``[i, j] = d_j f_i``.
    """
    return 1j * grid.derivative_wavenumbers * fh[..., None, :, :, :]


def divergence(uh: np.ndarray, grid: Grid) -> np.ndarray:
    return 1j * np.einsum("i...,i...->...", grid.derivative_wavenumbers, uh)


def curl(uh: np.ndarray, grid: Grid) -> np.ndarray:
    kx, ky, kz = grid.derivative_wavenumbers
    ux, uy, uz = uh
    return 1j * np.stack([ky * uz - kz * uy, kz * ux - kx * uz, kx * uy - ky * ux])


def laplacian(fh: np.ndarray, grid: Grid) -> np.ndarray:
    return -grid.k_squared * fh


def leray_project(uh: np.ndarray, grid: Grid) -> np.ndarray:
    """
    Project onto divergence-free fields: ``u - k (k . u) / |k|^2``.

    Modes whose derivative wavevector vanishes (the mean, pure Nyquist
    modes) are passed through unchanged.
    """
    k = grid.derivative_wavenumbers
    k2 = np.einsum("i...,i...->...", k, k)
    kdotu = np.einsum("i...,i...->...", k, uh)
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(k2 > 0, kdotu / np.where(k2 > 0, k2, 1.0), 0.0)
    return uh - k * factor


def dealias(fh: np.ndarray, grid: Grid) -> np.ndarray:
    """2/3 rule: zero every mode with some ``|k_i| > n/3``."""
    return np.where(grid.dealias_mask, fh, 0.0)


def pad(fh: np.ndarray, grid: Grid, target: Grid) -> np.ndarray:
    """
    Re-express a spectral field on a finer grid by zero padding.

    Nyquist modes of the source are dropped, so the result is the
    trigonometric interpolant of the band-limited part. With forward
    normalization the retained coefficients are copied unchanged.
    """
    n, m = grid.n, target.n
    if m < n:
        raise ValueError(f"cannot pad from n={n} down to n={m}")
    if m == n:
        return fh.copy()
    half = n // 2
    out = np.zeros(fh.shape[:-3] + target.spectral_shape, dtype=np.complex128)
    pos = slice(0, half)
    neg_src = slice(n - half + 1, n)
    neg_dst = slice(m - half + 1, m)
    for a_src, a_dst in ((pos, pos), (neg_src, neg_dst)):
        for b_src, b_dst in ((pos, pos), (neg_src, neg_dst)):
            out[..., a_dst, b_dst, :half] = fh[..., a_src, b_src, :half]
    return out


def cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pointwise cross product of two real vector fields."""
    return np.stack(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    )


def dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("i...,i...->...", a, b)


def norm(a: np.ndarray) -> np.ndarray:
    """Pointwise Euclidean (Frobenius for tensors) norm over the component axes."""
    lead = tuple(range(a.ndim - 3))
    return np.sqrt(np.sum(a * a, axis=lead))


def integrate(f: np.ndarray, grid: Grid, mask: np.ndarray | None = None) -> float:
    """
    Midpoint/trapezoid quadrature of a scalar field over the box or a mask.

    Summation is numpy's fixed pairwise order, so the result is
    reproducible run to run.
    """
    if mask is not None:
        f = np.where(mask, f, 0.0)
    return float(np.sum(f) * grid.cell_volume)


def inner(f: np.ndarray, g: np.ndarray, grid: Grid) -> float:
    """L2 inner product of two real fields of equal shape."""
    lead = tuple(range(f.ndim - 3))
    return integrate(np.sum(f * g, axis=lead), grid)


def masked_l2(f: np.ndarray, mask: np.ndarray | None, grid: Grid) -> float:
    """
    L2 norm of a scalar, vector or tensor field restricted to a region.

    Parameters
    ----------
    f : ndarray
        Real field; any leading component axes are summed pointwise.
    mask : ndarray of bool or None
        Region membership per grid point; ``None`` means the whole box.
        An empty mask gives 0.
    grid : Grid
    """
    if mask is not None and np.shape(mask) != grid.real_shape:
        raise ValueError(f"mask shape {np.shape(mask)} does not match grid {grid.real_shape}")
    lead = tuple(range(f.ndim - 3))
    sq = np.sum(f * f, axis=lead) if lead else f * f
    return float(np.sqrt(integrate(sq, grid, mask)))


def spectral_energy(fh: np.ndarray, grid: Grid) -> float:
    """``integral |f|^2`` evaluated from the coefficients (Parseval)."""
    lead = tuple(range(fh.ndim - 3))
    p = np.abs(fh) ** 2
    if lead:
        p = np.sum(p, axis=lead)
    return float(np.sum(grid.parseval_weights * p) * grid.box_length**3)
