"""
Velocity-vorticity alignment and localized diagnostics.

``sin(theta) = |u x omega| / (|u| |omega|)`` is evaluated pointwise; its
supremum over a ball is ``alpha``. The criterion functional combines
``alpha`` with the L2 norm of the velocity gradient on the vorticity
super-level set ``{|omega| > M}`` inside the ball.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from .solver import Snapshot, Trajectory
from .spectral import Grid, cross, fft_inverse, gradient, integrate, masked_l2

__all__ = [
    "AlignmentField",
    "DiagnosticsSeries",
    "HelicityStats",
    "alignment_sine",
    "default_eps_reg",
    "alpha",
    "superlevel_set",
    "velocity_gradient",
    "gradient_norm",
    "criterion",
    "localized_enstrophy",
    "helicity_stats",
    "diagnostics_series",
]


@dataclass
class AlignmentField:
    sin_theta: np.ndarray
    valid: np.ndarray
    eps_reg: float


def default_eps_reg(u: np.ndarray, omega: np.ndarray) -> float:
    """``1e-12 * max|u| * max|omega|``."""
    umax = float(np.max(np.sqrt(np.sum(u * u, axis=0))))
    wmax = float(np.max(np.sqrt(np.sum(omega * omega, axis=0))))
    return 1e-12 * umax * wmax


def alignment_sine(u: np.ndarray, omega: np.ndarray, eps_reg: float | None = None) -> AlignmentField:
    """
    Pointwise sine of the angle between velocity and vorticity.

    Points with ``|u| |omega| <= eps_reg`` carry no direction information;
    they are marked invalid and assigned 0. Valid values are clamped to
    ``[0, 1]`` against round-off.
    """
    u = np.asarray(u)
    omega = np.asarray(omega)
    if u.shape != omega.shape or u.shape[0] != 3:
        raise ValueError(f"velocity {u.shape} and vorticity {omega.shape} are not on the same grid")
    if eps_reg is None:
        eps_reg = default_eps_reg(u, omega)
    elif eps_reg <= 0:
        raise ValueError(f"eps_reg must be positive, got {eps_reg}")
    mag = np.sqrt(np.sum(u * u, axis=0)) * np.sqrt(np.sum(omega * omega, axis=0))
    c = cross(u, omega)
    cmag = np.sqrt(np.sum(c * c, axis=0))
    valid = mag > eps_reg
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(valid, cmag / np.where(valid, mag, 1.0), 0.0)
    return AlignmentField(np.clip(s, 0.0, 1.0), valid, float(eps_reg))


def _max_over(values: np.ndarray, mask: np.ndarray) -> float:
    return float(np.max(values[mask])) if np.any(mask) else 0.0


def alpha(snap: Snapshot, region: np.ndarray, eps_reg: float | None = None) -> float:
    """Supremum of the valid alignment sine over ``region`` (0 if none)."""
    al = alignment_sine(snap.u, snap.omega, eps_reg)
    return _max_over(al.sin_theta, region & al.valid)


def superlevel_set(omega: np.ndarray, M: float, ball: np.ndarray) -> np.ndarray:
    """``{|omega| > M}`` intersected with ``ball`` (strict inequality)."""
    return (np.sqrt(np.sum(omega * omega, axis=0)) > M) & ball


def velocity_gradient(snap: Snapshot) -> np.ndarray:
    """``(3, 3, n, n, n)`` tensor ``[i, j] = d u_i / d x_j``."""
    return fft_inverse(gradient(snap.u_hat, snap.grid), snap.grid)


def gradient_norm(grad: np.ndarray, kind: str = "frobenius") -> np.ndarray:
    """Pointwise matrix norm of a velocity gradient tensor."""
    if kind == "frobenius":
        return np.sqrt(np.sum(grad * grad, axis=(0, 1)))
    if kind == "operator":
        mats = np.moveaxis(grad, (0, 1), (-2, -1))
        return np.linalg.norm(mats, ord=2, axis=(-2, -1))
    raise ValueError(f"unknown gradient norm {kind!r}; use 'frobenius' or 'operator'")


def _grad_l2(snap: Snapshot, mask: np.ndarray, kind: str, grad: np.ndarray | None = None) -> float:
    if not np.any(mask):
        return 0.0
    grad = velocity_gradient(snap) if grad is None else grad
    return masked_l2(gradient_norm(grad, kind), mask, snap.grid)


def criterion(
    snap: Snapshot,
    M: float,
    ball: np.ndarray,
    eps_reg: float | None = None,
    norm: str = "frobenius",
    alpha_region: str = "ball",
) -> float:
    """
    ``alpha(s) * ||grad u(s)||_{L2(S_s)}^(1/2)``.

    ``alpha_region="ball"`` takes the sup over the whole ball;
    ``"superlevel"`` restricts it to ``S_s``.
    """
    S = superlevel_set(snap.omega, M, ball)
    if not np.any(S):
        return 0.0
    region = {"ball": ball, "superlevel": S}[alpha_region]
    return alpha(snap, region, eps_reg) * np.sqrt(_grad_l2(snap, S, norm))


def localized_enstrophy(omega: np.ndarray, phi: np.ndarray, grid: Grid) -> float:
    """``integral |omega|^2 phi^2``."""
    return integrate(np.sum(omega * omega, axis=0) * phi * phi, grid)


@dataclass
class HelicityStats:
    """
    Histograms (densities) of ``cos(theta)`` conditioned on dissipation, and
    the correlation between ``|u . omega|`` and ``|omega|^2``.
    """

    bin_edges: np.ndarray
    hist_high: np.ndarray
    hist_low: np.ndarray
    threshold: float
    correlation: float


def helicity_stats(snap: Snapshot, dissipation_quantile: float = 0.9, bins: int = 41) -> HelicityStats:
    """
    Conditional statistics of the velocity-vorticity angle.

    Points with ``|grad u|^2`` above its ``dissipation_quantile`` quantile
    form the high-dissipation sample, the rest the low one. Points where
    ``u`` or ``omega`` vanishes are left out of the histograms. A correlation
    with a constant argument is reported as 0.
    """
    if not 0.0 < dissipation_quantile < 1.0:
        raise ValueError("dissipation_quantile must lie in (0, 1)")
    u, w = snap.u, snap.omega
    diss = np.sum(velocity_gradient(snap) ** 2, axis=(0, 1))
    thresh = float(np.quantile(diss, dissipation_quantile))
    umag = np.sqrt(np.sum(u * u, axis=0))
    wmag = np.sqrt(np.sum(w * w, axis=0))
    dens = np.sum(u * w, axis=0)
    valid = umag * wmag > default_eps_reg(u, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        cos = np.clip(np.where(valid, dens / np.where(valid, umag * wmag, 1.0), 0.0), -1.0, 1.0)
    edges = np.linspace(-1.0, 1.0, bins + 1)
    hi = valid & (diss > thresh)
    lo = valid & ~(diss > thresh)

    def hist(sel):
        if not np.any(sel):
            return np.zeros(bins)
        return np.histogram(cos[sel], bins=edges, density=True)[0]

    a = np.abs(dens).ravel()
    b = (wmag**2).ravel()
    if np.std(a) == 0 or np.std(b) == 0:
        corr = 0.0
    else:
        corr = float(np.clip(np.corrcoef(a, b)[0, 1], -1.0, 1.0))
    return HelicityStats(edges, hist(hi), hist(lo), thresh, corr)


COLUMNS = ("t", "alpha", "grad_norm_S", "criterion", "local_enstrophy", "set_volume")
EXTRA_COLUMNS = ("alpha_S", "criterion_alpha_S", "criterion_ball")


@dataclass
class DiagnosticsSeries:
    """
    Per-snapshot diagnostics for one cylinder.

    The first six fields are the stable CSV columns. ``alpha_S`` is the
    supremum restricted to ``S_s``; ``criterion_alpha_S`` uses it, and
    ``criterion_ball`` takes the gradient norm over the whole ball instead
    of ``S_s``.
    """

    t: np.ndarray
    alpha: np.ndarray
    grad_norm_S: np.ndarray
    criterion: np.ndarray
    local_enstrophy: np.ndarray
    set_volume: np.ndarray
    alpha_S: np.ndarray = field(default_factory=lambda: np.zeros(0))
    criterion_alpha_S: np.ndarray = field(default_factory=lambda: np.zeros(0))
    criterion_ball: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self) -> int:
        return len(self.t)

    def rows(self):
        names = [f.name for f in fields(self)]
        for i in range(len(self)):
            yield {name: float(getattr(self, name)[i]) for name in names}


def diagnostics_series(
    traj: Trajectory,
    ball: np.ndarray,
    phi: np.ndarray,
    M: float,
    eps_reg: float | None = None,
    norm: str = "frobenius",
    indices=None,
) -> DiagnosticsSeries:
    """Evaluate every diagnostic on the selected snapshots (default: all)."""
    grid = traj.grid
    indices = range(len(traj.snapshots)) if indices is None else indices
    cols: dict[str, list[float]] = {name: [] for name in COLUMNS + EXTRA_COLUMNS}
    for i in indices:
        snap = traj.snapshots[i]
        al = alignment_sine(snap.u, snap.omega, eps_reg)
        S = superlevel_set(snap.omega, M, ball)
        grad = velocity_gradient(snap)
        gnorm = gradient_norm(grad, norm)
        a_ball = _max_over(al.sin_theta, ball & al.valid)
        a_S = _max_over(al.sin_theta, S & al.valid)
        g_S = masked_l2(gnorm, S, grid)
        g_ball = masked_l2(gnorm, ball, grid)
        cols["t"].append(snap.t)
        cols["alpha"].append(a_ball)
        cols["grad_norm_S"].append(g_S)
        cols["criterion"].append(a_ball * np.sqrt(g_S))
        cols["local_enstrophy"].append(localized_enstrophy(snap.omega, phi, grid))
        cols["set_volume"].append(float(np.count_nonzero(S)) * grid.cell_volume)
        cols["alpha_S"].append(a_S)
        cols["criterion_alpha_S"].append(a_S * np.sqrt(g_S))
        cols["criterion_ball"].append(a_ball * np.sqrt(g_ball))
    return DiagnosticsSeries(**{k: np.asarray(v, dtype=float) for k, v in cols.items()})
