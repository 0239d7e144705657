import numpy as np
import pytest

from nlslab import (
    BoundaryMassWarning,
    ExtTangent,
    Field,
    inner,
    make_grid,
    moment,
    omega,
    quadrature,
    read_field_csv,
    spectral_derivative,
    write_field_csv,
)
from conftest import random_field


def sech(x):
    return 1.0 / np.cosh(x)


class TestMakeGrid:
    def test_basic_16(self):
        g = make_grid(16, 16.0)
        assert g.dx == 1.0
        assert g.nodes[0] == -8.0
        assert g.nodes[-1] == 7.0

    def test_wavenumbers_contain_fundamental(self):
        g = make_grid(256, 40.0)
        k1 = 2 * np.pi / 40.0
        assert np.isclose(g.wavenumbers, 0.0).sum() == 1
        assert np.any(np.isclose(g.wavenumbers, k1))
        assert np.any(np.isclose(g.wavenumbers, -k1))

    def test_uniform_spacing(self):
        g = make_grid(128, 25.0)
        assert np.allclose(np.diff(g.nodes), g.dx, rtol=0, atol=1e-14)

    def test_wavenumbers_closed_under_negation_except_nyquist(self):
        g = make_grid(64, 10.0)
        k = set(np.round(g.wavenumbers, 12))
        nyquist = g.wavenumbers[g.n // 2]
        unmatched = [kk for kk in k if -kk not in k]
        assert unmatched == [pytest.approx(nyquist)]

    @pytest.mark.parametrize("n", [100, 8, 0, 48])
    def test_rejects_bad_n(self, n):
        with pytest.raises(ValueError):
            make_grid(n, 10.0)

    @pytest.mark.parametrize("length", [0.0, -1.0])
    def test_rejects_bad_length(self, length):
        with pytest.raises(ValueError):
            make_grid(64, length)


class TestField:
    def test_rejects_nonfinite(self, grid512):
        vals = np.zeros(512, complex)
        vals[3] = np.nan
        with pytest.raises(ValueError):
            Field(grid512, vals)

    def test_rejects_wrong_length(self, grid512):
        with pytest.raises(ValueError):
            Field(grid512, np.zeros(17, complex))

    def test_immutable(self, grid512):
        u = Field(grid512, np.ones(512, complex))
        with pytest.raises(ValueError):
            u.values[0] = 2.0

    def test_arithmetic(self, grid512):
        u = random_field(grid512, 1)
        v = random_field(grid512, 2)
        w = u + 2.0 * v - u
        assert np.allclose(w.values, 2.0 * v.values)

    def test_ext_tangent_finite(self, grid512):
        u = random_field(grid512, 1)
        with pytest.raises(ValueError):
            ExtTangent(u, np.inf)


class TestQuadrature:
    def test_constant(self):
        g = make_grid(16, 16.0)
        assert quadrature(g, np.ones(16)) == pytest.approx(16.0)

    def test_sech_squared(self):
        g = make_grid(512, 40.0)
        assert quadrature(g, sech(g.nodes) ** 2) == pytest.approx(2.0, abs=1e-10)

    def test_periodic_sine(self):
        g = make_grid(256, 40.0)
        assert abs(quadrature(g, np.sin(2 * np.pi * g.nodes / 40.0))) < 1e-12

    def test_shape_mismatch(self, grid512):
        with pytest.raises(ValueError):
            quadrature(grid512, np.ones(100))


class TestSpectralDerivative:
    def test_plane_wave_eigenfunction(self, grid512):
        k = 2 * np.pi / 40.0
        u = Field(grid512, np.exp(1j * k * grid512.nodes))
        du = spectral_derivative(u, 1)
        assert np.max(np.abs(du.values - 1j * k * u.values)) < 1e-12

    def test_sech_closed_form(self):
        # tails at the seam limit the accuracy: sech(L/2) ~ 4e-9 on L = 40,
        # ~ machine precision on L = 80
        for n, L, tol in [(512, 40.0, 1e-8), (1024, 80.0, 1e-12)]:
            g = make_grid(n, L)
            u = Field(g, sech(g.nodes).astype(complex))
            du = spectral_derivative(u, 1)
            target = -sech(g.nodes) * np.tanh(g.nodes)
            assert np.max(np.abs(du.values - target)) < tol

    def test_constant_second_derivative(self, grid512):
        u = Field(grid512, np.full(512, 2.7 + 0.3j))
        ddu = spectral_derivative(u, 2)
        assert np.max(np.abs(ddu.values)) < 1e-12

    def test_twice_first_equals_second(self, grid512):
        u = random_field(grid512, 5)
        twice = spectral_derivative(spectral_derivative(u, 1), 1)
        second = spectral_derivative(u, 2)
        scale = np.max(np.abs(second.values))
        assert np.max(np.abs(twice.values - second.values)) < 1e-8 * scale

    def test_order_validation(self, grid512):
        with pytest.raises(ValueError):
            spectral_derivative(random_field(grid512, 1), 3)


class TestInnerOmega:
    def test_inner_self_nonnegative(self, grid512):
        u = random_field(grid512, 3)
        assert inner(u, u) >= 0.0

    def test_inner_sech(self, grid512):
        u = Field(grid512, sech(grid512.nodes).astype(complex))
        assert inner(u, u) == pytest.approx(2.0, abs=1e-10)

    def test_omega_self_zero_exactly(self, grid512):
        u = random_field(grid512, 4)
        assert omega(u, u) == 0.0

    def test_omega_u_iu(self, grid512):
        u = Field(grid512, sech(grid512.nodes).astype(complex))
        assert omega(u, 1j * u) == pytest.approx(-2.0, abs=1e-10)

    def test_omega_gaussian_pair(self, grid512):
        u = Field(grid512, np.exp(-grid512.nodes**2).astype(complex))
        assert omega(u, 1j * u) == pytest.approx(-np.sqrt(np.pi / 2), abs=1e-10)

    def test_antisymmetry_random(self, grid512):
        for seed in range(100):
            u = random_field(grid512, 2 * seed)
            v = random_field(grid512, 2 * seed + 1)
            bound = 1e-12 * u.norm() * v.norm()
            assert abs(omega(u, v) + omega(v, u)) < bound

    def test_compatibility_with_inner_exact(self, grid512):
        # omega(u, v) and inner(u, i v) are the same floating-point value
        for seed in range(20):
            u = random_field(grid512, 100 + seed)
            v = random_field(grid512, 200 + seed)
            assert omega(u, v) == inner(u, 1j * v)

    def test_real_bilinearity(self, grid512):
        u = random_field(grid512, 7)
        w = random_field(grid512, 8)
        v = random_field(grid512, 9)
        a, b = 1.7, -0.39
        lhs = omega(a * u + b * w, v)
        rhs = a * omega(u, v) + b * omega(w, v)
        assert abs(lhs - rhs) < 1e-12 * max(abs(lhs), 1.0)

    def test_parseval(self, grid512):
        u = random_field(grid512, 10)
        phys = inner(u, u)
        uhat = np.fft.fft(u.values)
        spect = grid512.dx / grid512.n * float(np.sum(np.abs(uhat) ** 2))
        assert abs(phys - spect) < 1e-10 * phys

    def test_grid_mismatch(self, grid512):
        other = make_grid(256, 40.0)
        u = random_field(grid512, 1)
        v = Field(other, np.ones(256, complex))
        with pytest.raises(ValueError):
            inner(u, v)


class TestMoment:
    def test_even_density_first_moment(self, grid512):
        u = Field(grid512, sech(grid512.nodes).astype(complex))
        assert abs(moment(u, 1)) < 1e-10

    def test_sech_second_moment(self, grid512):
        u = Field(grid512, sech(grid512.nodes).astype(complex))
        assert moment(u, 2) == pytest.approx(np.pi**2 / 6, abs=1e-8)

    def test_translated_first_moment(self, grid512):
        u = Field(grid512, sech(grid512.nodes - 3.0).astype(complex))
        assert moment(u, 1) == pytest.approx(6.0, abs=1e-9)

    def test_boundary_mass_warning(self, grid512):
        u = Field(grid512, sech(grid512.nodes - 17.0).astype(complex))
        with pytest.warns(BoundaryMassWarning):
            moment(u, 1)

    def test_order_validation(self, grid512):
        with pytest.raises(ValueError):
            moment(random_field(grid512, 1), 3)


class TestFieldCsv:
    def test_roundtrip(self, grid512, tmp_path):
        u = random_field(grid512, 12)
        path = tmp_path / "field.csv"
        write_field_csv(u, path)
        v = read_field_csv(path)
        assert v.grid == grid512
        assert np.max(np.abs(v.values - u.values)) < 1e-16

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            read_field_csv(path)
