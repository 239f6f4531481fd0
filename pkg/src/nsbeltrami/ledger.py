"""
Localized energy ledger over a parabolic cylinder.

Multiplying the vorticity equation ``omega_t - nu Lap omega + curl(omega x u) = 0``
by ``psi^2 omega`` and integrating over ``B(x0, 2r) x (t0 - 4r^2, t)`` gives
a balance whose terms, their integration-by-parts forms and the split of
the nonlinear terms into low and high vorticity regions are evaluated here
from a stored trajectory.

Spatial integrals are taken on a padded grid (``padding`` times the
simulation resolution) where products of the band-limited velocity and
vorticity are alias free. Cutoff gradients are analytic. Time integrals use
the stored snapshots as quadrature nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.integrate import simpson, trapezoid

from .cutoff import CutoffPair, Cylinder
from .diagnostics import DiagnosticsSeries, alignment_sine, diagnostics_series
from .solver import Trajectory, vorticity_rhs
from .spectral import (
    cross,
    curl,
    dot,
    fft_forward,
    fft_inverse,
    gradient,
    integrate,
    laplacian,
    pad,
)

__all__ = [
    "LedgerConfig",
    "LedgerReport",
    "Bound",
    "Ledger",
    "evaluate_identity_major1",
    "verify_est1",
    "verify_est2",
    "verify_est3",
    "decompose_I_terms",
    "check_bounds",
    "theorem_monitor",
]

QUADRATURES = ("trapezoid", "simpson")
OMEGA_T_MODES = ("semi-discrete-rhs", "central-difference")


@dataclass(frozen=True)
class LedgerConfig:
    """
    Ledger settings for one cylinder.

    ``M`` may be 0 (everything is high vorticity) or ``inf`` (nothing is).
    """

    cylinder: Cylinder
    M: float
    cutoff: CutoffPair
    time_quadrature: str = "trapezoid"
    omega_t_mode: str = "semi-discrete-rhs"
    padding: float = 1.5
    eps_reg: float | None = None

    def __post_init__(self) -> None:
        if not self.M >= 0:
            raise ValueError(f"vorticity threshold M must be non-negative, got {self.M}")
        if self.time_quadrature not in QUADRATURES:
            raise ValueError(f"time_quadrature must be one of {QUADRATURES}")
        if self.omega_t_mode not in OMEGA_T_MODES:
            raise ValueError(f"omega_t_mode must be one of {OMEGA_T_MODES}")
        if self.padding < 1:
            raise ValueError("padding factor must be >= 1")


@dataclass
class Bound:
    """
    One estimate: ``lhs <= rhs``.

    Explicit bounds carry a boolean; empirical ones (generic constants) have
    ``holds=None`` and report ``ratio = lhs / rhs`` as a measured constant.
    """

    name: str
    lhs: float
    rhs: float
    holds: bool | None
    kind: str = "explicit"

    @property
    def ratio(self) -> float:
        if self.rhs > 0:
            return self.lhs / self.rhs
        return 0.0 if self.lhs == 0 else math.inf


@dataclass
class LedgerReport:
    """
    Every term of the localized balance at one endpoint ``t``.

    ``residual_*`` are relative to the matching ``scale_*`` (the largest
    term magnitude entering that identity).
    """

    t: float
    t_start: float
    n_nodes: int
    term_time: float
    term_time_ibp: float
    term_diff_raw: float
    term_diff: float
    term_nl: float
    term_nl_ibp: float
    I1: float
    I2: float
    I2_lo: float
    I2_hi: float
    I3: float
    I3_lo: float
    I3_hi: float
    residual_major1: float
    residual_est1: float
    residual_est2: float
    residual_est3: float
    scale_major1: float
    scale_est1: float
    scale_est2: float
    scale_est3: float
    grad_psi_omega_sq: float
    endpoint_enstrophy: float
    sup_K_S: float
    sup_K_ball: float
    u0_local: float
    u0_global: float
    bounds: list[Bound] = field(default_factory=list)

    SCALARS = (
        "t", "t_start", "n_nodes", "term_time", "term_time_ibp", "term_diff_raw", "term_diff",
        "term_nl", "term_nl_ibp", "I1", "I2", "I2_lo", "I2_hi", "I3", "I3_lo", "I3_hi",
        "residual_major1", "residual_est1", "residual_est2", "residual_est3",
        "scale_major1", "scale_est1", "scale_est2", "scale_est3",
        "grad_psi_omega_sq", "endpoint_enstrophy", "sup_K_S", "sup_K_ball", "u0_local", "u0_global",
    )

    def as_row(self) -> dict:
        row = {name: getattr(self, name) for name in self.SCALARS}
        for b in self.bounds:
            row[f"{b.name}:lhs"] = b.lhs
            row[f"{b.name}:rhs"] = b.rhs
            row[f"{b.name}:holds"] = "" if b.holds is None else int(b.holds)
        return row

    def text(self) -> str:
        lines = [f"localized energy ledger on ({self.t_start:.6g}, {self.t:.6g}], {self.n_nodes} time nodes"]
        for name in self.SCALARS[3:]:
            lines.append(f"  {name:<20s} {getattr(self, name): .10e}")
        lines.append("bounds:")
        for b in self.bounds:
            tag = "ratio" if b.holds is None else ("holds" if b.holds else "FAILS")
            lines.append(f"  [{tag:>5s}] {b.name}: lhs={b.lhs:.6e} rhs={b.rhs:.6e} lhs/rhs={b.ratio:.4g}")
        return "\n".join(lines)


def _relative(diff: float, *terms: float) -> tuple[float, float]:
    scale = max(abs(x) for x in terms)
    if scale == 0:
        return 0.0, 0.0
    return abs(diff) / scale, scale


class Ledger:
    """
    Ledger engine for one trajectory and cylinder.

    Per-snapshot spatial integrals are cached, so reports at several
    endpoints, strides (snapshot-interval refinement) or quadrature rules
    reuse them.
    """

    def __init__(self, traj: Trajectory, config: LedgerConfig):
        self.traj = traj
        self.config = config
        self.grid = traj.grid
        cyl = config.cylinder
        if not traj.snapshots:
            raise ValueError("trajectory has no snapshots")
        cyl.validate(self.grid, t_min=traj.snapshots[0].t)
        if cyl.r < 2.0 * self.grid.h:
            raise ValueError(f"cylinder radius {cyl.r} is below two grid spacings ({2 * self.grid.h:.4g})")
        times = traj.times
        if len(times) < 3:
            raise ValueError("ledger needs at least three snapshots")
        steps = np.diff(times)
        self.interval = float(steps[0])
        if np.max(np.abs(steps - self.interval)) > 1e-9 * max(1.0, times[-1]):
            raise ValueError("snapshots are not uniformly spaced")
        ratio = cyl.r**2 / self.interval
        if abs(ratio - round(ratio)) > 1e-6 * ratio:
            raise ValueError(f"snapshot interval {self.interval} does not divide r^2 = {cyl.r**2}")
        try:
            self.start_index = traj.index_of(cyl.t_start)
        except KeyError:
            raise ValueError(f"no snapshot at t0 - 4r^2 = {cyl.t_start:.6g}") from None
        self.pad_grid = self.grid.padded(config.padding)
        self.cutoff = config.cutoff.resample(self.pad_grid)
        self.ball = cyl.ball(self.pad_grid)
        self._cache: dict[int, dict] = {}

    # -- slices ------------------------------------------------------------

    def _omega_t_hat(self, i: int, mode: str) -> np.ndarray:
        snaps = self.traj.snapshots
        snap = snaps[i]
        if mode == "semi-discrete-rhs":
            return vorticity_rhs(snap.u_hat, self.grid, snap.omega_hat)
        n = len(snaps)
        if 0 < i < n - 1:
            return (snaps[i + 1].omega_hat - snaps[i - 1].omega_hat) / (snaps[i + 1].t - snaps[i - 1].t)
        dt = self.interval
        if i == 0:
            return (-3 * snaps[0].omega_hat + 4 * snaps[1].omega_hat - snaps[2].omega_hat) / (2 * dt)
        return (3 * snaps[i].omega_hat - 4 * snaps[i - 1].omega_hat + snaps[i - 2].omega_hat) / (2 * dt)

    def slice_terms(self, i: int) -> dict:
        """Spatial integrals of every ledger integrand at snapshot ``i``."""
        if i in self._cache:
            return self._cache[i]
        g, G = self.grid, self.pad_grid
        nu = g.nu
        M = self.config.M
        r = self.config.cylinder.r
        snap = self.traj.snapshots[i]

        uh = pad(snap.u_hat, g, G)
        wh = pad(snap.omega_hat, g, G)
        u = fft_inverse(uh, G)
        w = fft_inverse(wh, G)
        lap_w = fft_inverse(laplacian(wh, G), G)
        gw = fft_inverse(gradient(wh, G), G)
        gu = fft_inverse(gradient(uh, G), G)
        F = cross(w, u)
        curl_F = fft_inverse(curl(fft_forward(F), G), G)

        eta = float(self.cutoff.eta(snap.t))
        deta = float(self.cutoff.eta_prime(snap.t))
        phi = self.cutoff.phi
        gpsi = self.cutoff.grad_phi * eta
        psi = phi * eta
        psi2 = psi * psi

        w2 = np.sum(w * w, axis=0)
        wmag = np.sqrt(w2)
        u2 = np.sum(u * u, axis=0)
        umag = np.sqrt(u2)
        hi = wmag > M
        lo = ~hi
        ball = self.ball
        S = hi & ball

        gpw = w[:, None] * gpsi[None, :] + psi * gw
        gpw2 = np.sum(gpw * gpw, axis=(0, 1))
        curl_w = np.stack([gw[2, 1] - gw[1, 2], gw[0, 2] - gw[2, 0], gw[1, 0] - gw[0, 1]])
        pw = psi * w
        pw_mag = np.abs(psi) * wmag
        curl_pw = psi * curl_w + cross(gpsi, w)
        curl_pw_mag = np.sqrt(np.sum(curl_pw * curl_pw, axis=0))
        gpsi_mag = np.sqrt(np.sum(gpsi * gpsi, axis=0))
        gpsi2 = gpsi_mag**2
        gu2 = np.sum(gu * gu, axis=(0, 1))

        g2 = psi * dot(F, curl_pw)
        g3 = dot(F, cross(gpsi, pw))
        weight = phi * phi * abs(eta * deta) + nu * gpsi2

        al = alignment_sine(u, w, self.config.eps_reg)
        region = ball & al.valid
        a = float(np.max(al.sin_theta[region])) if np.any(region) else 0.0

        def q(f, mask=None):
            return integrate(f, G, mask)

        c7 = umag * pw_mag * curl_pw_mag
        c8 = gpsi_mag * wmag * umag * pw_mag
        w_psi2 = w * psi2
        terms = {"t": snap.t}
        for mode in OMEGA_T_MODES:
            wt = fft_inverse(pad(self._omega_t_hat(i, mode), g, G), G)
            terms[f"T:{mode}"] = q(dot(wt, w_psi2))
        terms.update({
            "D_raw": -nu * q(dot(lap_w, w) * psi2),
            "grad_pw2": nu * q(gpw2),
            "gpsi_w2": nu * q(gpsi2 * w2),
            "grad_pw2_plain": q(gpw2),
            "Nl": q(dot(curl_F, w) * psi2),
            "I2": q(g2),
            "I2_lo": q(g2, lo),
            "I2_hi": q(g2, hi),
            "I3": q(g3),
            "I3_lo": q(g3, lo),
            "I3_hi": q(g3, hi),
            "E_half": 0.5 * q(w2 * psi2),
            "Pt": q(w2 * phi * phi * eta * deta),
            "I1": q(w2 * weight),
            "weight_sup": float(np.max(weight)) * r**2,
            "ball_w2": q(w2, ball),
            "psi2_w2": q(psi2 * w2),
            "ball_gu2": q(gu2, ball),
            "S_gu2": q(gu2, S),
            "lo_a": q(psi2 * u2 * w2, lo),
            "lo_b": q(gpw2, lo),
            "lo_b_curl": q(curl_pw_mag**2, lo),
            "ball_u2": q(u2, ball),
            "ball_u1": q(umag, ball),
            "gpsi_inf": float(np.max(gpsi_mag)),
            "wmax": float(np.max(wmag[ball])) if np.any(ball) else 0.0,
            "alpha": a,
            "pw2": q(pw_mag**2),
            "est7_first": a * q(c7, hi),
            "est7_scale": q(c7, hi),
            "est8_first": a * q(c8, hi),
            "est8_scale": q(c8, hi),
            "enstrophy_phi": q(w2 * phi * phi),
        })
        self._cache[i] = terms
        return terms

    # -- windows and quadrature ----------------------------------------------

    def window(self, t: float, stride: int = 1) -> list[int]:
        """Snapshot indices of the quadrature nodes on ``[t0 - 4r^2, t]``."""
        cyl = self.config.cylinder
        if not (cyl.t_start < t <= cyl.t0 + 1e-12):
            raise ValueError(f"endpoint t={t} outside ({cyl.t_start:.6g}, {cyl.t0:.6g}]")
        try:
            end = self.traj.index_of(t)
        except KeyError:
            raise ValueError(f"no snapshot at t={t}") from None
        span = end - self.start_index
        if stride < 1 or span % stride:
            raise ValueError(f"stride {stride} does not divide the {span} intervals of the window")
        if stride > 1:
            ratio = cyl.r**2 / (self.interval * stride)
            if abs(ratio - round(ratio)) > 1e-6 * ratio:
                raise ValueError("strided snapshot interval does not divide r^2")
        return list(range(self.start_index, end + 1, stride))

    def _integrate(self, values, times, rule: str) -> float:
        if rule == "trapezoid":
            return float(trapezoid(values, x=times))
        return float(simpson(values, x=times))

    def report(
        self,
        t: float | None = None,
        stride: int = 1,
        quadrature: str | None = None,
        omega_t_mode: str | None = None,
    ) -> LedgerReport:
        """
        Evaluate the ledger at endpoint ``t`` (default ``t0``).

        ``stride``, ``quadrature`` and ``omega_t_mode`` override the
        configured node spacing, time rule and time-derivative source while
        reusing cached slices.
        """
        cfg = self.config
        cyl = cfg.cylinder
        t = cyl.t0 if t is None else t
        rule = quadrature or cfg.time_quadrature
        if rule not in QUADRATURES:
            raise ValueError(f"unknown quadrature {rule!r}")
        mode = omega_t_mode or cfg.omega_t_mode
        if mode not in OMEGA_T_MODES:
            raise ValueError(f"unknown omega_t_mode {mode!r}")
        idx = self.window(t, stride)
        sl = [self.slice_terms(i) for i in idx]
        times = np.array([s["t"] for s in sl])

        def Q(key):
            return self._integrate(np.array([s[key] for s in sl]), times, rule)

        def sup(key):
            return max(s[key] for s in sl)

        last = sl[-1]
        T = Q(f"T:{mode}")
        D_raw = Q("D_raw")
        grad_pw2, gpsi_w2 = Q("grad_pw2"), Q("gpsi_w2")
        D_ibp = grad_pw2 - gpsi_w2
        Nl = Q("Nl")
        I2, I3 = Q("I2"), Q("I3")
        Pt = Q("Pt")
        T_ibp = -Pt + last["E_half"]

        r_m1, s_m1 = _relative(T + D_raw + Nl, T, D_raw, Nl)
        r_e1, s_e1 = _relative(D_raw - D_ibp, D_raw, grad_pw2, gpsi_w2)
        r_e2, s_e2 = _relative(T - T_ibp, T, Pt, last["E_half"])
        r_e3, s_e3 = _relative(Nl - (I2 + I3), Nl, I2, I3)

        K_S = [s["alpha"] * math.sqrt(s["S_gu2"]) ** 0.5 for s in sl]
        K_ball = [s["alpha"] * math.sqrt(s["ball_gu2"]) ** 0.5 for s in sl]

        G = self.pad_grid
        u0 = self.traj.snapshots[0]
        u0p = fft_inverse(pad(u0.u_hat, self.grid, G), G)
        u0sq = np.sum(u0p * u0p, axis=0)
        u0_local = math.sqrt(integrate(u0sq, G, self.ball))
        u0_global = math.sqrt(integrate(u0sq, G))

        rep = LedgerReport(
            t=float(t),
            t_start=self.traj.snapshots[self.start_index].t,
            n_nodes=len(idx),
            term_time=T,
            term_time_ibp=T_ibp,
            term_diff_raw=D_raw,
            term_diff=D_ibp,
            term_nl=Nl,
            term_nl_ibp=I2 + I3,
            I1=Q("I1"),
            I2=I2,
            I2_lo=Q("I2_lo"),
            I2_hi=Q("I2_hi"),
            I3=I3,
            I3_lo=Q("I3_lo"),
            I3_hi=Q("I3_hi"),
            residual_major1=r_m1,
            residual_est1=r_e1,
            residual_est2=r_e2,
            residual_est3=r_e3,
            scale_major1=s_m1,
            scale_est1=s_e1,
            scale_est2=s_e2,
            scale_est3=s_e3,
            grad_psi_omega_sq=Q("grad_pw2_plain"),
            endpoint_enstrophy=last["enstrophy_phi"],
            sup_K_S=max(K_S),
            sup_K_ball=max(K_ball),
            u0_local=u0_local,
            u0_global=u0_global,
        )
        rep.bounds = self._bounds(rep, sl, Q, sup, times)
        return rep

    def _bounds(self, rep: LedgerReport, sl, Q, sup, times) -> list[Bound]:
        cfg = self.config
        r = cfg.cylinder.r
        G = self.pad_grid
        duration = float(times[-1] - times[0])
        out: list[Bound] = []

        def explicit(name, lhs, rhs, slack=0.0):
            out.append(Bound(name, lhs, rhs, bool(lhs <= rhs * (1 + 1e-12) + slack)))

        def empirical(name, lhs, rhs):
            out.append(Bound(name, lhs, rhs, None, "empirical"))

        c_weight = sup("weight_sup")
        Q_w2 = Q("ball_w2")
        explicit("est4 I1 <= (c/r^2) int_Q |omega|^2", rep.I1, c_weight / r**2 * Q_w2)
        explicit("est4 int psi^2 |omega|^2 <= int_Q |grad u|^2", Q("psi2_w2"), Q("ball_gu2"))

        lo_a, lo_b = Q("lo_a"), Q("lo_b")
        i2lo = abs(rep.I2_lo)
        explicit("est5 |I2'| <= 1/2 int_lo psi^2|u|^2|omega|^2 + 1/2 int_lo |grad(psi omega)|^2",
                 i2lo, 0.5 * lo_a + 0.5 * lo_b)
        explicit("est5 |I2'| <= 1/2 int_lo psi^2|u|^2|omega|^2 + 1/2 int_lo |curl(psi omega)|^2",
                 i2lo, 0.5 * lo_a + 0.5 * Q("lo_b_curl"))
        wmax = sup("wmax")
        M_eff = min(cfg.M, wmax)
        sup_u2 = sup("ball_u2")
        half_all = 0.5 * rep.grad_psi_omega_sq
        explicit("est5 |I2'| <= 2 M^2 r^2 sup_s ||u(s)||^2_B2r + 1/2 int |grad(psi omega)|^2",
                 i2lo, 2 * M_eff**2 * r**2 * sup_u2 + half_all)
        explicit("est5 |I2'| <= 2 M^2 r^2 ||u0||^2_B2r + 1/2 int |grad(psi omega)|^2",
                 i2lo, 2 * M_eff**2 * r**2 * rep.u0_local**2 + half_all)
        explicit("est5 |I2'| <= 2 M^2 r^2 ||u0||^2 + 1/2 int |grad(psi omega)|^2",
                 i2lo, 2 * M_eff**2 * r**2 * rep.u0_global**2 + half_all)

        i3lo = abs(rep.I3_lo)
        gpsi_inf = sup("gpsi_inf")
        explicit("est6 |I3'| <= ||grad psi||_inf M^2 int_Q |u|", i3lo, gpsi_inf * M_eff**2 * Q("ball_u1"))
        ball_volume = float(np.count_nonzero(self.ball)) * G.cell_volume
        explicit("est6 |I3'| <= (c M^2/r) 4r^2 |B2r|^(1/2) sup_s ||u(s)||_B2r",
                 i3lo, (r * gpsi_inf) * M_eff**2 / r * max(duration, 0.0) * math.sqrt(ball_volume * sup_u2))
        empirical("est6 |I3'| vs r^(5/2) ||u0||_B2r", i3lo, r**2.5 * rep.u0_local)

        i2hi = abs(rep.I2_hi)
        explicit("est7 |I2''| <= int_hi alpha |u| |psi omega| |curl(psi omega)|",
                 i2hi, Q("est7_first"), slack=1e-12 * Q("est7_scale"))
        gu_Q = math.sqrt(max(Q("ball_gu2"), 0.0))
        gpw_Q2 = rep.grad_psi_omega_sq
        sup_pw2 = sup("pw2")
        empirical("est7 |I2''| vs sup K ||grad u||_Q^(1/2) (3/4 ||grad(psi omega)||_Q^2 + 1/4 sup ||psi omega||^2)",
                  i2hi, rep.sup_K_S * math.sqrt(gu_Q) * (0.75 * gpw_Q2 + 0.25 * sup_pw2))

        i3hi = abs(rep.I3_hi)
        explicit("est8 |I3''| <= int_hi alpha |grad psi| |omega| |u| |psi omega|",
                 i3hi, Q("est8_first"), slack=1e-12 * Q("est8_scale"))
        empirical("est8 |I3''| vs r^-1 ||u0||^(1/2) sup K ||grad u||_Q ||grad(psi omega)||_Q",
                  i3hi, math.sqrt(rep.u0_local) / r * rep.sup_K_S * gu_Q * math.sqrt(gpw_Q2))
        empirical("est8 |I3''| vs r^-2 ||u0|| (sup K)^2 ||grad u||_Q^2 + 1/4 ||grad(psi omega)||_Q^2",
                  i3hi, rep.u0_local / r**2 * rep.sup_K_S**2 * gu_Q**2 + 0.25 * gpw_Q2)
        return out


# -- functional interface ------------------------------------------------------


def evaluate_identity_major1(traj: Trajectory, config: LedgerConfig, t: float | None = None):
    """``(term_time, term_diff_raw, term_nl, residual_major1)`` at endpoint ``t``."""
    rep = Ledger(traj, config).report(t)
    return rep.term_time, rep.term_diff_raw, rep.term_nl, rep.residual_major1


def verify_est1(traj: Trajectory, config: LedgerConfig, t: float | None = None) -> float:
    return Ledger(traj, config).report(t).residual_est1


def verify_est2(traj: Trajectory, config: LedgerConfig, t: float | None = None) -> float:
    return Ledger(traj, config).report(t).residual_est2


def verify_est3(traj: Trajectory, config: LedgerConfig, t: float | None = None) -> float:
    return Ledger(traj, config).report(t).residual_est3


def decompose_I_terms(traj: Trajectory, config: LedgerConfig, t: float | None = None):
    """``(I1, I2_lo, I2_hi, I3_lo, I3_hi)`` at endpoint ``t``."""
    rep = Ledger(traj, config).report(t)
    return rep.I1, rep.I2_lo, rep.I2_hi, rep.I3_lo, rep.I3_hi


def check_bounds(traj: Trajectory, config: LedgerConfig, t: float | None = None) -> list[Bound]:
    return Ledger(traj, config).report(t).bounds


@dataclass
class Verdict:
    """Empirical outcome of a monitored run; not a regularity statement."""

    sup_K: float
    K_threshold: float
    K_ok: bool
    enstrophy_initial: float
    enstrophy_max: float
    enstrophy_factor: float
    enstrophy_ok: bool
    grad_psi_omega_sq: float

    @property
    def bounded(self) -> bool:
        return self.K_ok and self.enstrophy_ok


def theorem_monitor(
    traj: Trajectory,
    config: LedgerConfig,
    K_threshold: float = 1.0,
    enstrophy_factor: float = 2.0,
) -> tuple[DiagnosticsSeries, Verdict]:
    """
    Track the criterion and the localized enstrophy over the cylinder window.

    The series covers the snapshots in ``[t0 - 4r^2, t0]`` on the simulation
    grid. The verdict records whether ``sup K`` stayed below ``K_threshold``
    and the localized enstrophy below ``enstrophy_factor`` times its value at
    the start of the window.
    """
    ledger = Ledger(traj, config)
    cyl = config.cylinder
    idx = ledger.window(cyl.t0)
    grid = traj.grid
    ball = cyl.ball(grid)
    phi = config.cutoff.resample(grid).phi
    series = diagnostics_series(traj, ball, phi, config.M, config.eps_reg, indices=idx)
    rep = ledger.report(cyl.t0)
    sup_K = float(np.max(series.criterion))
    e0 = float(series.local_enstrophy[0])
    emax = float(np.max(series.local_enstrophy))
    verdict = Verdict(
        sup_K=sup_K,
        K_threshold=K_threshold,
        K_ok=sup_K <= K_threshold,
        enstrophy_initial=e0,
        enstrophy_max=emax,
        enstrophy_factor=enstrophy_factor,
        enstrophy_ok=emax <= enstrophy_factor * e0 if e0 > 0 else emax == 0,
        grad_psi_omega_sq=rep.grad_psi_omega_sq,
    )
    return series, verdict
