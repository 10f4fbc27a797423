import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from fracreg.frac_calc import TimeGrid
from fracreg.spaces import (
    Field,
    MixedNormSpec,
    SpaceGrid,
    SpaceTimeField,
    apply_multiplier,
    bessel_potential,
    derivative,
    eta,
    kappa_prime,
    lp_decompose,
    lp_square_function_norm,
    mixed_norm,
    partition_of_unity,
    psi_hat,
    smoothness_norm,
    sobolev_norm,
    temporal_norm,
    weighted_lp_norm,
    zygmund_seminorm,
)
from fracreg.spaces.io import read_field, read_space_time, write_field, write_field_csv, write_space_time
from fracreg.weights import Weight

PI = math.pi


@pytest.fixture
def g1():
    return SpaceGrid(1, PI, 256)


@pytest.fixture
def g2():
    return SpaceGrid(2, PI, 32)


def trig_poly(grid, seed, kmax=8):
    rng = np.random.default_rng(seed)
    vals = np.zeros(grid.shape)
    for _ in range(6):
        k = rng.integers(0, kmax, size=grid.d)
        ph = rng.uniform(0, 2 * PI)
        arg = sum(kk * c for kk, c in zip(k, grid.coords)) + ph
        vals = vals + rng.standard_normal() * np.cos(arg)
    return Field(grid, vals)


class TestGrid:
    @pytest.mark.parametrize("n", [8, 100])
    def test_bad_n(self, n):
        with pytest.raises(ValueError):
            SpaceGrid(1, PI, n)

    def test_bad_dim(self):
        with pytest.raises(ValueError):
            SpaceGrid(3, PI, 16)

    def test_nodes(self, g1):
        assert g1.x[0] == -PI and g1.x[128] == pytest.approx(0.0, abs=1e-15)
        assert g1.h == pytest.approx(2 * PI / 256)

    def test_field_validation(self, g1):
        with pytest.raises(ValueError):
            Field(g1, np.zeros(10))
        with pytest.raises(ValueError):
            Field(g1, np.full(256, np.inf))

    def test_space_time_shape(self, g1):
        tg = TimeGrid(1.0, 4)
        F = SpaceTimeField.from_function(tg, g1, lambda t, x: t * np.sin(x))
        assert F.values.shape == (5, 256)
        with pytest.raises(ValueError):
            SpaceTimeField(tg, g1, np.zeros((4, 256)))


class TestMultipliers:
    def test_identity(self, g1):
        u = trig_poly(g1, 0)
        out = apply_multiplier(lambda xi: 1.0, u)
        np.testing.assert_allclose(out.values, u.values, atol=1e-14)

    def test_eigenfunction(self, g1):
        u = g1.sample(lambda x: np.sin(5 * x))
        out = apply_multiplier(lambda xi: (1 + xi[0] ** 2) ** 0.5, u)
        np.testing.assert_allclose(out.values, math.sqrt(26) * u.values, atol=1e-12)

    def test_spectral_derivative(self, g1):
        out = apply_multiplier(lambda xi: 1j * xi[0], g1.sample(np.sin))
        np.testing.assert_allclose(out.values, np.cos(g1.x), atol=1e-13)

    def test_singular_symbol_rejected(self, g1):
        with pytest.raises(ValueError, match="xi"):
            apply_multiplier(lambda xi: 1 / np.abs(xi[0]), g1.sample(np.sin))
        out = apply_multiplier(lambda xi: 1 / np.abs(xi[0]), g1.sample(np.sin), at_zero=0.0)
        np.testing.assert_allclose(out.values, np.sin(g1.x), atol=1e-13)

    def test_composition(self, g2):
        u = trig_poly(g2, 1)
        m1 = lambda xi: np.exp(-0.1 * (xi[0] ** 2 + xi[1] ** 2))
        m2 = lambda xi: 1 + xi[0] ** 2
        a = apply_multiplier(m1, apply_multiplier(m2, u))
        b = apply_multiplier(lambda xi: m1(xi) * m2(xi), u)
        np.testing.assert_allclose(a.values, b.values, atol=1e-12)

    def test_derivative_2d(self, g2):
        u = g2.sample(lambda x, y: np.sin(x) * np.cos(2 * y))
        d = derivative(u, (1, 1))
        np.testing.assert_allclose(d.values, -2 * np.cos(g2.coords[0]) * np.sin(2 * g2.coords[1]), atol=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.floats(-3, 3), st.floats(-2, 2))
    def test_linear(self, seed, c, gamma):
        g = SpaceGrid(1, PI, 64)
        u, v = trig_poly(g, seed), trig_poly(g, seed + 1)
        lhs = bessel_potential(u + c * v, gamma).values
        rhs = bessel_potential(u, gamma).values + c * bessel_potential(v, gamma).values
        assert np.max(np.abs(lhs - rhs)) <= 1e-11 * (1 + np.max(np.abs(rhs)))


class TestBessel:
    def test_zero_order(self, g1):
        u = trig_poly(g1, 2)
        assert np.array_equal(bessel_potential(u, 0).values, u.values)

    def test_inverse(self, g1):
        u = trig_poly(g1, 3)
        back = bessel_potential(bessel_potential(u, 1.7), -1.7)
        np.testing.assert_allclose(back.values, u.values, atol=1e-12 * u.sup())

    def test_eigen(self, g1):
        u = g1.sample(lambda x: np.sin(3 * x))
        np.testing.assert_allclose(bessel_potential(u, 2).values, 10 * u.values, atol=1e-11)

    def test_isometry(self):
        g = SpaceGrid(1, PI, 256)
        u = trig_poly(g, 4)
        w = Weight.power(0.5, L=PI)
        for nu in (-1.0, 0.5, 2.0):
            a = sobolev_norm(bessel_potential(u, nu), 1.0 - nu, 3.0, w)
            b = sobolev_norm(u, 1.0, 3.0, w)
            assert a == pytest.approx(b, rel=1e-12)

    def test_sobolev_eigen(self, g1):
        u = g1.sample(lambda x: np.sin(4 * x))
        w = Weight.constant(L=PI)
        for gamma in (-1.0, 0.0, 1.5):
            assert sobolev_norm(u, gamma, 2.0, w) == pytest.approx(17 ** (gamma / 2) * math.sqrt(PI), rel=1e-12)


class TestNorms:
    def test_zero(self, g1):
        assert weighted_lp_norm(Field(g1, np.zeros(256)), 2.0, Weight.constant(L=PI)) == 0.0

    def test_box_measure(self, g1):
        one = Field(g1, np.ones(256))
        assert weighted_lp_norm(one, 2.0, Weight.constant(L=PI)) == pytest.approx(math.sqrt(2 * PI), rel=1e-14)
        assert math.sqrt(2 * PI) == pytest.approx(2.5066, abs=1e-4)

    def test_power_weight_exact(self):
        g = SpaceGrid(1, 1.0, 64)
        one = Field(g, np.ones(64))
        assert weighted_lp_norm(one, 2.0, Weight.power(0.5, L=1.0)) == pytest.approx(math.sqrt(4 / 3), rel=1e-14)

    def test_weighted_against_quadrature(self):
        # smooth u on a fine grid: the node rule converges to the integral
        g = SpaceGrid(1, PI, 2048)
        u = g.sample(lambda x: np.exp(np.cos(x)))
        ref = quad(lambda x: np.exp(3 * np.cos(x)) * abs(x) ** -0.5, -PI, PI, points=[0], limit=200)[0] ** (1 / 3)
        assert weighted_lp_norm(u, 3.0, Weight.power(-0.5, L=PI)) == pytest.approx(ref, rel=1e-4)

    def test_p_rejected(self, g1):
        with pytest.raises(ValueError):
            weighted_lp_norm(g1.sample(np.sin), 1.0, Weight.constant(L=PI))

    def test_2d_constant(self, g2):
        one = Field(g2, np.ones(g2.shape))
        assert weighted_lp_norm(one, 2.0, Weight.constant(dim=2, L=PI)) == pytest.approx(2 * PI, rel=1e-13)


class TestMixed:
    def spec(self, q=2.0, p=2.0, gamma=0.0, w2=None, T=1.0):
        return MixedNormSpec(q, p, gamma, w2 or Weight.temporal_power(0.0, T), Weight.constant(L=PI), T)

    def test_zero(self, g1):
        F = SpaceTimeField.zeros(TimeGrid(1.0, 8), g1)
        assert mixed_norm(F, self.spec()) == 0.0

    def test_constant(self, g1):
        F = SpaceTimeField.from_function(TimeGrid(2.0, 8), g1, lambda t, x: 1.0 + 0 * t * x)
        val = mixed_norm(F, self.spec(q=3.0, p=2.0, T=2.0))
        assert val == pytest.approx(2.0 ** (1 / 3) * (2 * PI) ** 0.5, rel=1e-13)

    def test_t_sin(self, g1):
        F = SpaceTimeField.from_function(TimeGrid(1.0, 8), g1, lambda t, x: t * np.sin(x))
        assert mixed_norm(F, self.spec()) == pytest.approx(math.sqrt(PI / 3), rel=1e-12)
        assert math.sqrt(PI / 3) == pytest.approx(1.0233, abs=1e-4)

    def test_temporal_power_weight(self):
        tg = TimeGrid(1.0, 32, 2.0)
        s = tg.nodes  # s(t) = t, exact under linear interpolation
        val = temporal_norm(s, tg, 2.0, Weight.temporal_power(-0.5, 1.0))
        assert val == pytest.approx(math.sqrt(1 / 2.5), rel=1e-12)

    def test_beyond_T_rejected(self, g1):
        F = SpaceTimeField.zeros(TimeGrid(2.0, 4), g1)
        with pytest.raises(ValueError):
            mixed_norm(F, self.spec(T=1.0))


class TestLittlewoodPaley:
    def test_eta(self):
        s = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 3.0])
        np.testing.assert_allclose(eta(s), [1, 1, 1, 0.5, 0, 0], atol=1e-15)
        assert np.all(psi_hat(np.array([0.4, 2.1])) == 0)

    def test_reconstruction(self, g1, g2):
        for g in (g1, g2):
            u = trig_poly(g, 5, kmax=g.n // 2)
            dec = lp_decompose(u)
            assert np.max(np.abs(dec.reconstruct().values - u.values)) <= 1e-12 * u.sup()

    def test_annulus_support(self):
        g = SpaceGrid(1, PI, 512)
        jstar = 4  # annulus 2^3.5 < |xi| < 2^4.5, i.e. 12..22
        u = g.sample(lambda x: np.cos(12 * x) + np.sin(17 * x) + np.cos(22 * x))
        dec = lp_decompose(u)
        nonzero = [j for j, f in enumerate(dec.pieces) if f.sup() > 1e-13]
        assert set(nonzero) <= {jstar - 1, jstar, jstar + 1}

    def test_square_function_zero(self, g1):
        dec = lp_decompose(Field(g1, np.zeros(256)))
        assert lp_square_function_norm(dec, 0.0, 2.0, Weight.constant(L=PI)) == 0.0

    def test_single_annulus_comparable(self, g1):
        u = g1.sample(lambda x: np.cos(6 * x))
        w = Weight.constant(L=PI)
        r = lp_square_function_norm(lp_decompose(u), 0.0, 2.0, w) / weighted_lp_norm(u, 2.0, w)
        assert 0.5 < r < 2.0


class TestSmoothness:
    def test_constant(self, g1):
        a = Field(g1, np.full(256, -2.5))
        for r in (0, 0.5, 1, 1.5, 2, 2.3):
            assert smoothness_norm(a, r) == pytest.approx(2.5, abs=1e-12)

    def test_sine_lipschitz(self, g1):
        assert smoothness_norm(g1.sample(np.sin), 1) == pytest.approx(2.0, abs=1e-3)

    def test_zygmund_bounded_by_lipschitz(self, g1):
        a = g1.sample(np.sin)
        z = zygmund_seminorm(a, 1.0)
        # |f(x+2y) - 2f(x+y) + f(x)| <= 2 Lip |y|
        assert 0 < z <= 2 * 1.0 + 1e-9

    def test_kappa(self):
        for r in (0.3, 0.9, 1.5, 2.95, 0.85):
            k = kappa_prime(r)
            assert 0 < k < 1 and abs((r + k) - round(r + k)) > 1e-9
        assert kappa_prime(2.0) == 0.0

    def test_holder_of_sine(self, g1):
        # sup|sin| + sup|cos| + [cos]_{kappa'} for r = 1.5
        v = smoothness_norm(g1.sample(np.sin), 1.5)
        assert 2.0 < v < 4.0

    def test_negative_rejected(self, g1):
        with pytest.raises(ValueError):
            smoothness_norm(g1.sample(np.sin), -1)


class TestPartition:
    def test_single_centre(self, g1):
        P = partition_of_unity(g1, 10.0, [[0.0]])
        assert len(P) == 1 and np.allclose(P[0].values, 1.0)

    def test_sums_to_one(self, g2):
        c = [(x, y) for x in np.linspace(-PI, PI, 4, endpoint=False) for y in np.linspace(-PI, PI, 4, endpoint=False)]
        P = partition_of_unity(g2, 2.5, c)
        np.testing.assert_allclose(sum(z.values for z in P), 1.0, atol=1e-14)
        assert P.lower_bound(2.0) > 0
        assert all(v > 0 for v in P.derivative_sums.values())

    def test_gap_rejected(self, g1):
        with pytest.raises(ValueError, match="uncovered"):
            partition_of_unity(g1, 0.5, [[0.0], [1.0]])


class TestIO:
    def test_field_roundtrip(self, tmp_path, g2):
        u = trig_poly(g2, 9)
        write_field(tmp_path / "u.bin", u)
        v = read_field(tmp_path / "u.bin")
        assert v.grid == u.grid and np.array_equal(v.values, u.values)

    def test_space_time_roundtrip(self, tmp_path, g1):
        F = SpaceTimeField.from_function(TimeGrid(1.0, 4, 2.0), g1, lambda t, x: t * np.cos(x))
        write_space_time(tmp_path / "F.bin", F, {"alpha": 0.5})
        G, meta = read_space_time(tmp_path / "F.bin")
        assert meta["alpha"] == 0.5 and G.tgrid == F.tgrid
        assert np.array_equal(G.values, F.values)

    def test_bad_magic(self, tmp_path):
        (tmp_path / "x.bin").write_bytes(b"nope" + bytes(20))
        with pytest.raises(ValueError):
            read_field(tmp_path / "x.bin")

    def test_csv(self, tmp_path):
        g = SpaceGrid(1, PI, 16)
        write_field_csv(tmp_path / "u.csv", g.sample(np.sin))
        data = np.loadtxt(tmp_path / "u.csv", delimiter=",", skiprows=1)
        np.testing.assert_array_equal(data[:, 1], np.sin(g.x))
