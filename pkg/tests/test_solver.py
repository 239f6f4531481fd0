import numpy as np
import pytest

from nsbeltrami.flows import exact_abc, init_abc, init_random_solenoidal, init_taylor_green
from nsbeltrami.solver import (
    Snapshot,
    SolverConfig,
    kinetic_energy,
    rhs,
    simulate,
    spectral_divergence,
    step,
    tail_fraction,
    vorticity_rhs,
)
from nsbeltrami.spectral import Grid, curl, fft_forward, fft_inverse, laplacian


class TestConfig:
    def test_rejects_non_multiple_interval(self):
        with pytest.raises(ValueError, match="integer multiple"):
            SolverConfig(Grid(8), 0.004, 0.1, 0.025)

    def test_rejects_interval_below_dt(self):
        with pytest.raises(ValueError, match="shorter than dt"):
            SolverConfig(Grid(8), 0.01, 0.1, 0.005)

    def test_rejects_unknown_scheme(self):
        with pytest.raises(ValueError, match="unknown scheme"):
            SolverConfig(Grid(8), 0.01, 0.1, 0.01, scheme="euler")

    def test_cfl_advisory(self):
        cfg = SolverConfig(Grid(8), 0.5, 1.0, 0.5)
        assert not cfg.cfl_ok(init_abc(cfg.grid))
        assert SolverConfig(Grid(8), 0.01, 1.0, 0.5).cfl_ok(init_abc(cfg.grid))

    def test_cfl_warning_on_simulate(self):
        g = Grid(8)
        with pytest.warns(RuntimeWarning, match="CFL"):
            simulate(SolverConfig(g, 0.5, 0.5, 0.5), init_abc(g))


class TestRightHandSide:
    def test_beltrami_is_pure_diffusion(self):
        g = Grid(16, nu=0.3)
        uh = fft_forward(init_abc(g))
        assert np.max(np.abs(rhs(uh, g) - g.nu * laplacian(uh, g))) <= 1e-13

    def test_vorticity_rhs_is_curl_of_velocity_rhs(self):
        g = Grid(16, nu=0.1)
        uh = fft_forward(init_random_solenoidal(g, seed=2))
        assert np.max(np.abs(vorticity_rhs(uh, g) - curl(rhs(uh, g), g))) <= 1e-12

    def test_rhs_conserves_energy_without_viscosity(self):
        # the projected rotational nonlinearity does no work
        g = Grid(16, nu=1e-300)
        uh = fft_forward(init_random_solenoidal(g, seed=3))
        u = fft_inverse(uh, g)
        du = fft_inverse(rhs(uh, g), g)
        assert abs(np.sum(u * du)) <= 1e-12 * np.sum(np.abs(u * du))


class TestStepping:
    def test_abc_exact_under_integrating_factor(self):
        g = Grid(16)
        s = step(Snapshot.from_velocity(g, init_abc(g)), 0.01)
        assert np.max(np.abs(s.u - exact_abc(g, 0.01))) <= 1e-14

    def test_plain_rk4_is_fourth_order(self):
        g = Grid(8, nu=50.0)
        u0 = init_abc(g)
        errors = []
        for n_steps in (4, 8, 16):
            dt = 0.004 / n_steps
            s = Snapshot.from_velocity(g, u0)
            for _ in range(n_steps):
                s = step(s, dt, "rk4-plain")
            errors.append(np.max(np.abs(s.u - exact_abc(g, 0.004))))
        ratios = [errors[i] / errors[i + 1] for i in range(2)]
        assert all(r >= 12.0 for r in ratios), ratios

    def test_step_keeps_solenoidal(self):
        g = Grid(16, nu=0.1)
        s = step(Snapshot.from_velocity(g, init_random_solenoidal(g, seed=1)), 0.01)
        assert spectral_divergence(s.u_hat, g) <= 1e-12


class TestSimulate:
    def test_snapshot_times_and_energy_decay(self, abc_run):
        assert abc_run.status == "complete"
        assert np.allclose(abc_run.times, np.arange(11) * 0.01, atol=1e-14)
        e = abc_run.energies()
        assert np.all(np.diff(e) < 0)

    def test_abc_matches_exact(self, abc_run):
        g = abc_run.grid
        worst = max(np.max(np.abs(s.u - exact_abc(g, s.t))) for s in abc_run.snapshots)
        assert worst <= 1e-12

    def test_snapshots_are_read_only(self, abc_run):
        with pytest.raises(ValueError):
            abc_run.snapshots[0].u[0, 0, 0, 0] = 1.0

    def test_index_of(self, abc_run):
        assert abc_run.index_of(0.05) == 5
        with pytest.raises(KeyError):
            abc_run.index_of(0.055)

    def test_taylor_green_keeps_zero_helicity(self):
        g = Grid(16, nu=0.1)
        traj = simulate(SolverConfig(g, 0.01, 0.2, 0.1), init_taylor_green(g))
        for s in traj.snapshots:
            assert abs(np.mean(np.sum(s.u * s.omega, axis=0))) <= 1e-13

    def test_energy_dissipation_balance(self, random_run):
        # dE/dt = -nu * enstrophy, checked with centred differences
        g = random_run.grid
        s = random_run.snapshots
        dt = random_run.interval
        i = 5
        dE = (s[i + 1].energy - s[i - 1].energy) / (2 * dt)
        enstrophy = np.mean(np.sum(s[i].omega ** 2, axis=0)) * g.box_length**3
        assert dE == pytest.approx(-g.nu * enstrophy, rel=5e-3)

    @pytest.mark.filterwarnings("ignore:dt=.*CFL")
    def test_under_resolved_run_stops(self):
        g = Grid(16, nu=1e-3)
        traj = simulate(SolverConfig(g, 0.01, 1.0, 0.01), 5.0 * init_random_solenoidal(g, seed=0, k_peak=3.0))
        assert traj.status in ("under-resolved", "energy-growth", "nan")
        assert traj.message
        assert len(traj.snapshots) >= 1

    def test_tail_fraction_of_low_mode_is_zero(self):
        g = Grid(16)
        assert tail_fraction(fft_forward(init_abc(g)), g) <= 1e-28

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError, match="shape"):
            simulate(SolverConfig(Grid(8), 0.01, 0.01, 0.01), np.zeros((3, 4, 4, 4)))

    def test_kinetic_energy_of_abc(self):
        g = Grid(8)
        # mean |u|^2 = 3 for A = B = C = 1
        assert kinetic_energy(fft_forward(init_abc(g)), g) == pytest.approx(0.5 * 3 * (2 * np.pi) ** 3)
