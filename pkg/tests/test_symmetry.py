"""Tests for transformation groups, their classification, and invariance."""

import math

import numpy as np
import pytest

from fracnoether import fracops as F
from fracnoether import lagrangian as Lmod
from fracnoether import symmetry as G

# analytic value of both chain-rule sides for the dilation group with
# c = 1 at s = 0.3, alpha = 0.5, x = t^2, evaluated at t = 0.6:
# Gamma(3)/Gamma(2.5) * 0.6^1.5 * e^{-0.15}
CHAIN_RULE_POINT = 0.6018336952584199


def not_a_group():
    # phi0_s(t) = t + s^2 fails the composition law (s = s' = 0.5 gives
    # t + 1 vs t + 0.5)
    return G.GroupSpec(
        phi0=lambda s, t: t + s * s,
        phi1=lambda s, x: np.asarray(x, dtype=float),
        zeta=lambda t: 0.0,
        xi=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
    )


def quadratic_lagrangian():
    return Lmod.make_lagrangian(
        2,
        eval=lambda t, x, v: 0.5 * (np.dot(x, x) + np.dot(v, v)),
        d_t=lambda t, x, v: 0.0,
        d_x=lambda t, x, v: x,
        d_v=lambda t, x, v: v,
    )


def smooth_trajectory(n_sub=64):
    grid = F.make_grid(0.0, 1.0, n_sub)
    values = np.column_stack([np.sin(grid.nodes), grid.nodes**2])
    return grid, F.make_trajectory(grid, values)


ALL_FACTORIES = [
    G.time_translation,
    lambda: G.dilation(0.9),
    lambda: G.localized_dilation(0.5, 1.0),
    G.space_rotation,
    G.quadratic_time,
]


class TestGroupSpecs:
    @pytest.mark.parametrize("factory", ALL_FACTORIES)
    def test_s_zero_is_identity(self, factory):
        g = factory()
        for t in (0.0, 0.3, 1.7):
            # (t - a) + a style maps can round; the identity is exact
            # only up to one addition
            assert abs(g.phi0(0.0, t) - t) < 1e-15
        x = np.array([0.4, -1.2])
        assert np.allclose(g.phi1(0.0, x), x, atol=1e-15)

    @pytest.mark.parametrize("factory", ALL_FACTORIES)
    def test_generators_match_finite_differences(self, factory):
        g = factory()
        step = 1e-6
        for t in (0.2, 0.7, 1.5):
            fd = (g.phi0(step, t) - g.phi0(-step, t)) / (2.0 * step)
            assert abs(fd - g.zeta(t)) < 1e-5 * max(1.0, abs(fd))
        x = np.array([0.3, -0.8])
        fd = (np.asarray(g.phi1(step, x)) - np.asarray(g.phi1(-step, x))) / (
            2.0 * step
        )
        assert np.allclose(fd, g.xi(x), atol=1e-5)

    def test_affine_form_where_declared(self):
        # phi0_s(t) = e^{lam s} t + beta(s) whenever lam/beta are stored
        for g in (G.time_translation(), G.dilation(-0.7), G.localized_dilation(0.3, 2.0)):
            for s in (-0.4, 0.25):
                for t in (0.1, 1.9):
                    affine = math.exp(g.lam * s) * t + g.beta(s)
                    assert abs(g.phi0(s, t) - affine) < 1e-14

    def test_rotation_requires_two_components(self):
        g = G.space_rotation()
        with pytest.raises(ValueError, match="2-vector"):
            g.phi1(0.1, np.array([1.0, 2.0, 3.0]))

    def test_localized_dilation_reduces_to_dilation(self):
        ga = G.localized_dilation(0.8, 0.0)
        gb = G.dilation(0.8)
        for s in (-0.5, 0.2):
            for t in (0.0, 0.6, 1.0):
                assert ga.phi0(s, t) == gb.phi0(s, t)


class TestGroupLaw:
    def test_translation_passes(self):
        report = G.check_group_law(G.time_translation())
        assert report.passed
        # the law holds identically; only addition rounding remains
        assert report.max_violation < 1e-14
        assert report.samples == 16 * 33

    @pytest.mark.parametrize(
        "group", [G.dilation(1.0), G.localized_dilation(0.6, 0.5)]
    )
    def test_affine_families_pass(self, group):
        report = G.check_group_law(group)
        assert report.passed
        assert "beta and factor laws" in report.context

    def test_non_group_fails(self):
        report = G.check_group_law(not_a_group())
        assert not report.passed
        # s = s' = 0.5 alone forces a gap of 0.5
        assert report.max_violation >= 0.5

    def test_custom_samples(self):
        report = G.check_group_law(
            G.dilation(2.0), s_samples=[0.1], t_samples=np.linspace(0.0, 0.5, 5)
        )
        assert report.passed
        assert report.samples == 5

    def test_empty_samples_rejected(self):
        with pytest.raises(ValueError, match="non-empty"):
            G.check_group_law(G.dilation(1.0), s_samples=[])


class TestAdmissible:
    @pytest.mark.parametrize(
        "group",
        [G.time_translation(), G.dilation(-0.7), G.localized_dilation(0.4, 1.5)],
    )
    def test_affine_time_maps_pass(self, group):
        report = G.check_admissible(group)
        assert report.passed
        assert report.max_violation <= 1e-9

    def test_quadratic_time_fails(self):
        report = G.check_admissible(G.quadratic_time())
        assert not report.passed
        assert report.max_violation > 1e-3

    def test_wrong_declared_rate_fails(self):
        # affine map whose stored lam disagrees with the actual slope
        g = G.GroupSpec(
            phi0=lambda s, t: math.exp(0.5 * s) * t,
            phi1=lambda s, x: np.asarray(x, dtype=float),
            zeta=lambda t: 0.5 * t,
            xi=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            lam=0.3,
            beta=lambda s: 0.0,
        )
        report = G.check_admissible(g)
        assert not report.passed

    def test_needs_three_time_samples(self):
        with pytest.raises(ValueError, match="3 time samples"):
            G.check_admissible(G.dilation(1.0), t_samples=[0.0, 1.0])


class TestLocalization:
    def test_localized_family_passes(self):
        report = G.check_localization(G.localized_dilation(0.8, 2.0), 2.0)
        assert report.passed
        assert report.max_violation == 0.0

    def test_dilation_about_origin_passes(self):
        report = G.check_localization(G.dilation(1.3), 0.0)
        assert report.passed

    def test_translation_fails_endpoint(self):
        report = G.check_localization(G.time_translation(), 0.0)
        assert not report.passed
        # worst sampled |phi0_s(a) - a| = max |s| = 0.5
        assert report.max_violation == pytest.approx(0.5, abs=1e-15)
        assert "classification not evaluated" in report.context

    def test_fixed_endpoint_but_nonaffine_fails_classification(self):
        # t + s t^2 fixes t = 0 yet is not of dilation form
        report = G.check_localization(G.quadratic_time(), 0.0)
        assert not report.passed
        assert report.max_violation > 1e-3


class TestChainRule:
    def setup_method(self):
        self.grid = F.make_grid(0.0, 1.0, 250)
        self.x = F.make_trajectory(self.grid, self.grid.nodes**2)

    def test_dilation_both_sides_near_analytic_point(self):
        # node 150 sits at t = 0.6 on the original grid and at
        # tau = 0.6 e^{0.3} on the transformed one
        order = F.FractionalOrder(0.5)
        s = 0.3
        factor = math.exp(s)
        tau = np.array([factor * t for t in self.grid.nodes])
        tgrid = F.make_grid(tau[0], tau[-1], 250)
        z = np.interp(tgrid.nodes, tau, self.grid.nodes**2)
        lhs = F.caputo_left(tgrid, order, F.make_trajectory(tgrid, z)).values[150, 0]
        rhs = F.caputo_left(self.grid, order, self.x).values[150, 0] * factor**-0.5
        assert abs(lhs - CHAIN_RULE_POINT) < 1e-3
        assert abs(rhs - CHAIN_RULE_POINT) < 1e-3

    def test_dilation_commutes_with_discretization(self):
        # the L1 weights scale exactly under a dilation of the grid, so
        # the two sides agree far below the discretization error
        report = G.check_chain_rule(G.dilation(1.0), self.x, 0.5, 0.3, tol=1e-12)
        assert report.passed

    def test_translation_shifts_base_point_only(self):
        report = G.check_chain_rule(
            G.time_translation(), self.x, 0.5, 0.4, tol=1e-9
        )
        assert report.passed

    def test_identity_transform_exact(self):
        report = G.check_chain_rule(G.dilation(1.0), self.x, 0.5, 0.0, tol=0.0)
        assert report.passed
        assert report.max_violation == 0.0

    def test_non_affine_map_fails(self):
        report = G.check_chain_rule(G.quadratic_time(), self.x, 0.5, 0.3, tol=1e-3)
        assert not report.passed
        assert report.max_violation > 1e-2

    def test_non_increasing_map_rejected(self):
        # t + s t^2 with s = -1 turns around inside [0, 1]
        with pytest.raises(ValueError, match="strictly increasing"):
            G.check_chain_rule(G.quadratic_time(), self.x, 0.5, -1.0, tol=1.0)

    def test_masked_trajectory_rejected(self):
        values = self.grid.nodes**2
        mask = np.ones(self.grid.n_nodes, dtype=bool)
        mask[3] = False
        x = F.make_trajectory(self.grid, values, mask=mask)
        with pytest.raises(ValueError, match="fully defined"):
            G.check_chain_rule(G.dilation(1.0), x, 0.5, 0.3, tol=1.0)


class TestInvariance:
    def test_autonomous_under_translation_exact(self):
        _, traj = smooth_trajectory()
        for alpha in (0.5, 1.0):
            report = G.check_invariance(
                quadratic_lagrangian(), G.time_translation(), traj, alpha
            )
            assert report.passed
            assert report.max_violation == 0.0

    def test_rotation_invariance_of_isotropic_lagrangian(self):
        _, traj = smooth_trajectory()
        report = G.check_invariance(
            quadratic_lagrangian(), G.space_rotation(), traj, 0.6, tol=1e-12
        )
        assert report.passed

    def test_time_dependent_lagrangian_fails_translation(self):
        _, traj = smooth_trajectory()
        L = Lmod.make_lagrangian(2, eval=lambda t, x, v: t * np.dot(v, v))
        report = G.check_invariance(L, G.time_translation(), traj, 0.6)
        assert not report.passed
        assert report.max_violation > 1e-2

    def test_identity_parameter_exact(self):
        _, traj = smooth_trajectory()
        L = Lmod.make_lagrangian(2, eval=lambda t, x, v: t * np.dot(v, v))
        report = G.check_invariance(
            L, G.dilation(0.5), traj, 0.6, s_samples=[0.0], tol=0.0
        )
        assert report.passed
        assert report.max_violation == 0.0

    def test_dilation_invariant_lagrangian(self):
        # L = t v^2 satisfies L(e^s t, x, e^{-s} v) e^s = L(t, x, v), an
        # invariance the check should confirm at alpha = 1 in both modes
        grid = F.make_grid(0.0, 1.0, 64)
        traj = F.make_trajectory(grid, grid.nodes**2)
        L = Lmod.make_lagrangian(1, eval=lambda t, x, v: t * v[0] ** 2)
        for fixed_base in (False, True):
            report = G.check_invariance(
                L, G.dilation(1.0), traj, 1.0, tol=1e-13, fixed_base=fixed_base
            )
            assert report.passed

    @pytest.mark.parametrize("alpha", [0.5, 1.0])
    def test_fixed_base_equals_rewritten_form_for_localized_groups(self, alpha):
        # for an affine map fixing a, evaluating on the transformed grid
        # is exactly the change of variables of the original-grid form,
        # so the two modes must agree to rounding even off invariance
        _, traj = smooth_trajectory()
        group = G.localized_dilation(0.4, 0.0)
        default = G.check_invariance(quadratic_lagrangian(), group, traj, alpha)
        fixed = G.check_invariance(
            quadratic_lagrangian(), group, traj, alpha, fixed_base=True
        )
        assert fixed.max_violation == pytest.approx(
            default.max_violation, rel=1e-12
        )

    def test_fixed_base_rejects_moving_base_point(self):
        _, traj = smooth_trajectory()
        with pytest.raises(ValueError, match="phi0_s\\(a\\) = a"):
            G.check_invariance(
                quadratic_lagrangian(),
                G.time_translation(),
                traj,
                0.6,
                fixed_base=True,
            )

    def test_dimension_mismatch_rejected(self):
        grid = F.make_grid(0.0, 1.0, 16)
        traj = F.make_trajectory(grid, grid.nodes)
        with pytest.raises(ValueError, match="dim"):
            G.check_invariance(quadratic_lagrangian(), G.time_translation(), traj, 0.5)

    def test_report_counts_parameter_samples(self):
        _, traj = smooth_trajectory()
        report = G.check_invariance(
            quadratic_lagrangian(),
            G.time_translation(),
            traj,
            0.5,
            s_samples=[-0.2, 0.1, 0.3],
        )
        assert report.samples == 3
