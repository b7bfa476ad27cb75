import numpy as np
import pytest

from laplab.family import FamilySpec, shell_stress_family, standard_family
from laplab.lattice import Field, GridSpec, PHYSICAL, forward_transform, \
    inverse_transform, sample
from laplab.spaces import (CompositeNormConfig, DyadicShells, LorentzExponents,
                           WeightParams, b_norm, bstar_norm, lorentz_norm,
                           lp_norm, mu_weight, slab_l2_profile,
                           stein_tomas_exponent, x_norm_upper, xstar_norm)

from conftest import gaussian_field

SQRT2 = np.sqrt(2.0)


def indicator_ball(grid, radius=1.0):
    r = np.broadcast_to(grid.radius_grid(), grid.shape)
    return Field(grid, np.where(r <= radius, 1.0 + 0j, 0.0), PHYSICAL)


class TestLorentz:
    def test_exponent_validation(self):
        with pytest.raises(ValueError):
            LorentzExponents(1.0, 2.0)
        with pytest.raises(ValueError):
            LorentzExponents(2.0, 0.5)

    def test_stein_tomas_values(self):
        assert stein_tomas_exponent(2) == pytest.approx((6.0 / 5.0, 6.0))
        assert stein_tomas_exponent(3) == pytest.approx((4.0 / 3.0, 4.0))

    def test_indicator_weak_norm(self, g2):
        f = indicator_ball(g2)
        a = g2.cell_volume * np.count_nonzero(f.values)
        got = lorentz_norm(f, LorentzExponents(3.0, np.inf))
        assert got == pytest.approx(a ** (1.0 / 3.0), rel=1e-12)

    def test_indicator_finite_q(self, g2):
        f = indicator_ball(g2)
        a = g2.cell_volume * np.count_nonzero(f.values)
        p, q = 2.5, 1.5
        got = lorentz_norm(f, LorentzExponents(p, q))
        assert got == pytest.approx((p / q) ** (1.0 / q) * a ** (1.0 / p),
                                    rel=1e-12)

    def test_q_equals_p_matches_lp(self, g2, gauss2):
        for p in (1.2, 2.0, 4.0):
            got = lorentz_norm(gauss2, LorentzExponents(p, p))
            assert got == pytest.approx(lp_norm(gauss2, p), rel=1e-10)

    def test_rearrangement_invariance(self, g2, gauss2):
        rng = np.random.default_rng(5)
        perm = rng.permutation(gauss2.values.size)
        shuffled = Field(g2, gauss2.values.ravel()[perm].reshape(g2.shape),
                         PHYSICAL)
        e = LorentzExponents(1.5, 2.0)
        assert lorentz_norm(shuffled, e) == pytest.approx(
            lorentz_norm(gauss2, e), rel=1e-12)


class TestDyadic:
    def test_rejects_tiny_box(self):
        g = GridSpec(2, 1.5, 32)
        with pytest.raises(ValueError, match="shell"):
            DyadicShells(g)

    def test_tie_goes_to_lower_shell(self):
        g = GridSpec(2, 8.0, 128)
        shells = DyadicShells(g)
        r = np.broadcast_to(g.radius_grid(), g.shape)
        on_2 = np.isclose(r, 2.0, rtol=1e-12)
        assert np.any(on_2)
        assert np.all(shells.index[on_2] == 1)   # D_1 = {1 <= |x| <= 2}

    def test_ball_indicator_equal_norms(self, g2):
        f = indicator_ball(g2)
        vol = g2.cell_volume * np.count_nonzero(f.values)
        assert b_norm(f) == pytest.approx(np.sqrt(vol), rel=1e-12)
        assert bstar_norm(f) == pytest.approx(np.sqrt(vol), rel=1e-12)
        d = g2.dimension
        assert vol == pytest.approx(np.pi, rel=5e-2)   # unit disk area

    def test_single_shell_weights(self, g2):
        r = np.broadcast_to(g2.radius_grid(), g2.shape)
        j = 2
        mask = (r > 2.0 ** (j - 1)) & (r < 2.0**j)
        f = Field(g2, np.where(mask, 1.0 + 0j, 0.0), PHYSICAL)
        l2 = f.l2()
        assert b_norm(f) == pytest.approx(2.0 ** (j / 2.0) * l2, rel=1e-12)
        assert bstar_norm(f) == pytest.approx(2.0 ** (-j / 2.0) * l2, rel=1e-12)

    def test_l2_sandwich(self, g2):
        for _, f in standard_family(g2, FamilySpec(count=8, seed=2)):
            assert f.l2() <= b_norm(f) * (1 + 1e-12)
            assert bstar_norm(f) <= f.l2() * (1 + 1e-12)


class TestMuWeight:
    def test_at_zero_and_gamma_one(self):
        for N in (0.0, 1.0, 2.0):
            assert mu_weight(0.0, WeightParams(N, 0.3)) == 1.0
            assert mu_weight(7.7, WeightParams(N, 1.0)) == 1.0

    def test_hand_value(self):
        assert mu_weight(10.0, WeightParams(1.0, 0.01)) == pytest.approx(50.5)

    def test_bounds_and_monotonicity(self):
        w = WeightParams(2.0, 0.1)
        t = np.linspace(0.0, 50.0, 400)
        v = mu_weight(t, w)
        assert np.all(v >= 1.0 - 1e-15)
        assert np.all(v <= 0.1 ** (-2.0) + 1e-9)
        assert np.all(np.diff(v) >= -1e-12)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            WeightParams(-1.0, 0.5)
        with pytest.raises(ValueError):
            WeightParams(1.0, 0.0)


class TestComposite:
    def test_theta_formula(self):
        for m in (1, 2, 3):
            for d in (2, 3, 4):
                cfg = CompositeNormConfig(m=m, d=d)
                assert cfg.theta == pytest.approx(m - d / (d + 1.0))

    def test_zero_field(self, g2):
        cfg = CompositeNormConfig(m=1, d=2)
        z = Field(g2, np.zeros(g2.shape, dtype=complex), PHYSICAL)
        assert xstar_norm(z, cfg) == 0.0
        assert x_norm_upper(z, cfg) == 0.0

    def test_xstar_recomputation(self, g2, gauss2):
        from laplab.spaces import _bessel_apply
        cfg = CompositeNormConfig(m=1, d=2)
        _, pdp = cfg.exponents
        lor = lorentz_norm(_bessel_apply(gauss2, cfg.theta),
                           LorentzExponents(pdp, 2.0))
        bst = bstar_norm(_bessel_apply(gauss2, 1.0))
        assert xstar_norm(gauss2, cfg) == pytest.approx(max(lor, bst),
                                                        rel=1e-12)

    def test_xstar_homogeneity(self, g2, gauss2):
        cfg = CompositeNormConfig(m=2, d=2)
        base = xstar_norm(gauss2, cfg)
        scaled = xstar_norm(gauss2.with_values(-3.5j * gauss2.values), cfg)
        assert scaled == pytest.approx(3.5 * base, rel=1e-12)

    def test_xstar_triangle(self, g2, gauss2):
        cfg = CompositeNormConfig(m=1, d=2)
        g = gaussian_field(g2, width=0.8, wavevector=(1.0, 0.3))
        s = gauss2.with_values(gauss2.values + g.values)
        assert xstar_norm(s, cfg) <= xstar_norm(gauss2, cfg) \
            + xstar_norm(g, cfg) + 1e-10

    def test_witness_mismatch_rejected(self, g2, gauss2):
        cfg = CompositeNormConfig(m=1, d=2)
        bad = gauss2.with_values(0.5 * gauss2.values)
        zero = gauss2.with_values(np.zeros_like(gauss2.values))
        with pytest.raises(ValueError, match="witness"):
            x_norm_upper(gauss2, cfg, witness=(bad, zero))

    def test_witnessed_at_most_trivial(self, g2, gauss2):
        cfg = CompositeNormConfig(m=1, d=2)
        zero = gauss2.with_values(np.zeros_like(gauss2.values))
        t1 = x_norm_upper(gauss2, cfg, witness=(gauss2, zero))
        t2 = x_norm_upper(gauss2, cfg, witness=(zero, gauss2))
        assert x_norm_upper(gauss2, cfg) <= min(t1, t2) + 1e-12

    def test_far_spectral_support_uses_lorentz_term(self, g2):
        # spectral support concentrated around |xi| = 4, far above the
        # splitting spheres (lambda_ref = 1)
        cfg = CompositeNormConfig(m=1, d=2)
        f = gaussian_field(g2, width=2.0, wavevector=(4.0, 0.0))
        zero = f.with_values(np.zeros_like(f.values))
        lorentz_term = x_norm_upper(f, cfg, witness=(f, zero))
        assert x_norm_upper(f, cfg) <= lorentz_term + 1e-12


class TestEmbeddings:
    def test_sqrt2_bounds_large_family(self, g2):
        fields = standard_family(g2, FamilySpec(count=48, seed=0))
        fields += shell_stress_family(g2, 60, seed=1)
        assert len(fields) >= 100
        bound = SQRT2 * (1.0 + 1e-6)
        for label, f in fields:
            prof = slab_l2_profile(f)
            integral = float(np.sum(prof) * g2.spacing)
            sup = float(np.max(prof))
            b, bs = b_norm(f), bstar_norm(f)
            if b > 0:
                assert integral / b <= bound, label
            if sup > 0:
                assert bs / sup <= bound, label

    def test_d0_indicator_profile(self, g2):
        f = indicator_ball(g2)
        prof = slab_l2_profile(f)
        assert float(np.sum(prof) * g2.spacing) <= SQRT2 * b_norm(f)
