import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import band_limited
from nsbeltrami.spectral import (
    Grid,
    cross,
    curl,
    dealias,
    divergence,
    fft_forward,
    fft_inverse,
    gradient,
    inner,
    integrate,
    laplacian,
    leray_project,
    masked_l2,
    norm,
    pad,
    spectral_energy,
)

SEEDS = st.integers(min_value=0, max_value=2**32 - 1)
PROPERTY = settings(max_examples=100, deadline=None, derandomize=True)


def _real(fh, grid):
    return fft_inverse(fh, grid)


class TestGrid:
    @pytest.mark.parametrize("n", [7, 2, 0, 5])
    def test_rejects_bad_sizes(self, n):
        with pytest.raises(ValueError, match="even integer"):
            Grid(n)

    @pytest.mark.parametrize("kw", [{"box_length": 0.0}, {"box_length": -1.0}, {"nu": 0.0}, {"nu": np.nan}])
    def test_rejects_bad_parameters(self, kw):
        with pytest.raises(ValueError):
            Grid(8, **kw)

    def test_spacing_and_shapes(self):
        g = Grid(12, box_length=3.0)
        assert g.h == pytest.approx(0.25)
        assert g.real_shape == (12, 12, 12)
        assert g.spectral_shape == (12, 12, 7)
        assert g.k0 == pytest.approx(2 * np.pi / 3.0)

    def test_padded_rounds_to_even(self):
        assert Grid(10).padded(1.5).n == 16
        assert Grid(64).padded(1.5).n == 96

    def test_dealias_mask_keeps_two_thirds(self):
        g = Grid(12)
        kx = g.integer_wavenumbers[0].ravel()
        kept = np.unique(kx[g.dealias_mask[:, 0, 0]])
        assert set(kept.tolist()) == {-4, -3, -2, -1, 0, 1, 2, 3, 4}


class TestTransforms:
    @PROPERTY
    @given(seed=SEEDS, n=st.sampled_from([4, 8, 12, 16]))
    def test_round_trip(self, seed, n):
        g = Grid(n)
        f = np.random.default_rng(seed).standard_normal((3,) + g.real_shape)
        assert np.max(np.abs(fft_inverse(fft_forward(f), g) - f)) <= 1e-12

    def test_rejects_non_finite(self):
        f = np.zeros((8, 8, 8))
        f[1, 2, 3] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            fft_forward(f)

    def test_mean_is_zero_mode(self):
        g = Grid(8)
        f = np.random.default_rng(0).standard_normal(g.real_shape)
        assert fft_forward(f)[0, 0, 0].real == pytest.approx(f.mean(), abs=1e-14)

    def test_parseval(self):
        g = Grid(10, box_length=1.7)
        f = np.random.default_rng(3).standard_normal((3,) + g.real_shape)
        direct = integrate(np.sum(f * f, axis=0), g)
        assert spectral_energy(fft_forward(f), g) == pytest.approx(direct, rel=1e-12)

    def test_thread_count_does_not_change_bits(self, monkeypatch):
        g = Grid(16)
        f = np.random.default_rng(5).standard_normal((3,) + g.real_shape)
        monkeypatch.setenv("NSE_THREADS", "1")
        a = fft_forward(f)
        monkeypatch.setenv("NSE_THREADS", "4")
        b = fft_forward(f)
        assert np.array_equal(a, b)


class TestDerivatives:
    def test_gradient_of_trig(self):
        g = Grid(16, box_length=3.0)
        x, y, z = g.mesh
        k = g.k0
        f = np.sin(2 * k * x) * np.cos(3 * k * y) + np.sin(k * z)
        grad = _real(gradient(fft_forward(f), g), g)
        exact = np.stack([
            2 * k * np.cos(2 * k * x) * np.cos(3 * k * y),
            -3 * k * np.sin(2 * k * x) * np.sin(3 * k * y),
            k * np.cos(k * z),
        ])
        assert np.max(np.abs(grad - exact)) <= 1e-11

    def test_gradient_of_vector_appends_axis(self):
        g = Grid(8)
        uh = fft_forward(np.random.default_rng(0).standard_normal((3,) + g.real_shape))
        assert gradient(uh, g).shape == (3, 3) + g.spectral_shape

    def test_laplacian_eigenvalue(self):
        g = Grid(12)
        x, y, z = g.mesh
        f = np.cos(x + 2 * y - 3 * z)
        lap = _real(laplacian(fft_forward(f), g), g)
        assert np.max(np.abs(lap + 14 * f)) <= 1e-11

    def test_laplacian_keeps_nyquist(self):
        g = Grid(8)
        x = g.mesh[0]
        f = np.cos(4 * x)
        assert np.max(np.abs(_real(laplacian(fft_forward(f), g), g) + 16 * f)) <= 1e-11

    def test_gradient_drops_nyquist(self):
        g = Grid(8)
        f = np.cos(4 * g.mesh[0])
        assert np.max(np.abs(gradient(fft_forward(f), g))) == 0.0

    def test_curl_of_abc_is_itself(self):
        from nsbeltrami.flows import init_abc

        g = Grid(16)
        u = init_abc(g, 1.0, 0.5, 2.0)
        assert np.max(np.abs(_real(curl(fft_forward(u), g), g) - u)) <= 1e-12

    @PROPERTY
    @given(seed=SEEDS)
    def test_div_curl_and_curl_grad_vanish(self, seed):
        g = Grid(8)
        rng = np.random.default_rng(seed)
        uh = fft_forward(rng.standard_normal((3,) + g.real_shape))
        assert np.max(np.abs(divergence(curl(uh, g), g))) <= 1e-12
        ph = fft_forward(rng.standard_normal(g.real_shape))
        assert np.max(np.abs(curl(gradient(ph, g), g))) <= 1e-12

    @PROPERTY
    @given(seed=SEEDS)
    def test_curl_is_self_adjoint(self, seed):
        g = Grid(12, box_length=2.5)
        rng = np.random.default_rng(seed)
        a, b = band_limited(g, rng), band_limited(g, rng)
        ca = _real(curl(fft_forward(a), g), g)
        cb = _real(curl(fft_forward(b), g), g)
        lhs, rhs = inner(ca, b, g), inner(a, cb, g)
        assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1e-300)

    @PROPERTY
    @given(seed=SEEDS)
    def test_product_rule(self, seed):
        # div(f x g) = g . curl f - f . curl g, exact for alias-free products
        g = Grid(12)
        rng = np.random.default_rng(seed)
        f, h = band_limited(g, rng), band_limited(g, rng)
        lhs = _real(divergence(fft_forward(cross(f, h)), g), g)
        cf = _real(curl(fft_forward(f), g), g)
        ch = _real(curl(fft_forward(h), g), g)
        rhs = np.sum(h * cf - f * ch, axis=0)
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * np.max(np.abs(rhs))


class TestProjection:
    @PROPERTY
    @given(seed=SEEDS)
    def test_idempotent_and_solenoidal(self, seed):
        g = Grid(8)
        vh = fft_forward(np.random.default_rng(seed).standard_normal((3,) + g.real_shape))
        p = leray_project(vh, g)
        assert np.max(np.abs(leray_project(p, g) - p)) <= 1e-12 * np.max(np.abs(p))
        assert np.max(np.abs(divergence(p, g))) <= 1e-12 * np.max(np.abs(vh))

    @PROPERTY
    @given(seed=SEEDS)
    def test_annihilates_gradients(self, seed):
        g = Grid(8)
        ph = fft_forward(np.random.default_rng(seed).standard_normal(g.real_shape))
        grad = gradient(ph, g)
        assert np.max(np.abs(leray_project(grad, g))) <= 1e-12 * np.max(np.abs(grad))

    def test_mean_passes_through(self):
        g = Grid(8)
        u = np.ones((3,) + g.real_shape) * np.array([1.0, -2.0, 0.5])[:, None, None, None]
        p = _real(leray_project(fft_forward(u), g), g)
        assert np.allclose(p, u, atol=1e-14)


class TestPaddingAndDealiasing:
    def test_pad_interpolates_band_limited_field(self):
        g = Grid(12, box_length=2.0)
        fine = g.padded(1.5)
        kx, ky = 3 * g.k0, 2 * g.k0

        def field(grid):
            x, y, z = grid.mesh
            return np.sin(kx * x + 0.3) * np.cos(ky * y) + np.cos(g.k0 * z)

        padded = _real(pad(fft_forward(field(g)), g, fine), fine)
        assert np.max(np.abs(padded - field(fine))) <= 1e-12

    def test_pad_refuses_coarsening(self):
        with pytest.raises(ValueError):
            pad(np.zeros(Grid(12).spectral_shape, complex), Grid(12), Grid(8))

    def test_product_exact_on_padded_grid(self):
        g = Grid(12)
        fine = g.padded(1.5)
        rng = np.random.default_rng(1)
        a = fft_inverse(dealias(fft_forward(rng.standard_normal(g.real_shape)), g), g)
        b = fft_inverse(dealias(fft_forward(rng.standard_normal(g.real_shape)), g), g)
        ap = fft_inverse(pad(fft_forward(a), g, fine), fine)
        bp = fft_inverse(pad(fft_forward(b), g, fine), fine)
        # mean of a product: coarse grid value equals padded value only without aliasing
        exact = integrate(ap * bp, fine)
        again = fft_inverse(pad(fft_forward(a), g, fine.padded(2.0)), fine.padded(2.0))
        again_b = fft_inverse(pad(fft_forward(b), g, fine.padded(2.0)), fine.padded(2.0))
        assert exact == pytest.approx(integrate(again * again_b, fine.padded(2.0)), rel=1e-12)

    def test_dealias_zeroes_outer_band(self):
        g = Grid(12)
        x = g.mesh[0]
        f = np.cos(5 * x) + np.cos(4 * x)
        assert np.max(np.abs(_real(dealias(fft_forward(f), g), g) - np.cos(4 * x))) <= 1e-13


class TestIntegrals:
    def test_integrate_constant(self):
        g = Grid(8, box_length=3.0)
        assert integrate(np.ones(g.real_shape), g) == pytest.approx(27.0)

    def test_masked_l2(self):
        g = Grid(8)
        mask = np.zeros(g.real_shape, bool)
        assert masked_l2(np.ones((3,) + g.real_shape), mask, g) == 0.0
        mask[0, 0, 0] = True
        assert masked_l2(np.full(g.real_shape, 2.0), mask, g) == pytest.approx(2.0 * g.h**1.5)
        with pytest.raises(ValueError, match="mask shape"):
            masked_l2(np.ones(g.real_shape), np.ones((4, 4, 4), bool), g)

    def test_norm_of_tensor_is_frobenius(self):
        a = np.ones((3, 3, 2, 2, 2))
        assert np.allclose(norm(a), 3.0)
