import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from hybrid_teleport import averages as av
from hybrid_teleport import channels as ch
from hybrid_teleport.teleport import Direction

R_GRID = [round(0.05 * i, 2) for i in range(20)]


def moment_kernel(kind):
    return {
        1: lambda th, ph: np.cos(th / 2) ** 4,
        2: lambda th, ph: (np.cos(th / 2) * np.sin(th / 2)) ** 2,
        3: lambda th, ph: np.sin(th) * np.cos(ph),
        4: lambda th, ph: 2 * (np.cos(th / 2) * np.sin(th / 2)) ** 2 * np.cos(2 * ph),
    }[kind]


class TestQuadrature:
    def test_normalization(self):
        assert av.bloch_average(lambda th, ph: np.ones_like(th)) == pytest.approx(
            1.0, abs=1e-14)

    def test_odd_moment_vanishes(self):
        val = av.bloch_average(lambda th, ph: np.sin(th) * np.cos(ph))
        assert abs(val) < 1e-13

    def test_standard_moments(self):
        assert av.bloch_average(moment_kernel(1)) == pytest.approx(1 / 3, abs=1e-13)
        assert av.bloch_average(moment_kernel(2)) == pytest.approx(1 / 6, abs=1e-13)
        assert abs(av.bloch_average(moment_kernel(4))) < 1e-13

    def test_deterministic(self):
        f = lambda th, ph: np.cos(th) ** 2 / (1 + 0.3 * np.sin(th) * np.cos(ph))
        assert av.bloch_average(f) == av.bloch_average(f)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            av.QuadratureSpec(1, 10)


class TestMomentIntegrals:
    def test_small_x_limits(self):
        assert av.moment_integral(1, 0.0) == pytest.approx(1 / 3, abs=1e-15)
        assert av.moment_integral(2, 0.0) == pytest.approx(1 / 6, abs=1e-15)
        assert av.moment_integral(3, 0.0) == 0.0
        assert av.moment_integral(4, 0.0) == 0.0

    def test_reference_point_kind3(self):
        # 1/x - artanh(x)/x^2 at x = 1/2
        assert av.moment_integral(3, 0.5) == pytest.approx(-0.19722457733621912, abs=1e-13)
        oracle = oracles.sphere_average(
            lambda th, ph: moment_kernel(3)(th, ph) / (1 + 0.5 * np.sin(th) * np.cos(ph)))
        assert av.moment_integral(3, 0.5) == pytest.approx(oracle, abs=1e-10)

    @pytest.mark.parametrize("kind", [1, 2, 3, 4])
    @pytest.mark.parametrize("x", [0.0005, 0.05, 0.3, 0.7, 0.9])
    def test_against_independent_quadrature(self, kind, x):
        oracle = oracles.sphere_average(
            lambda th, ph: moment_kernel(kind)(th, ph) / (1 + x * np.sin(th) * np.cos(ph)))
        assert av.moment_integral(kind, x) == pytest.approx(oracle, abs=1e-10)

    def test_series_and_closed_agree_at_the_seam(self):
        for kind in (1, 2, 3, 4):
            for x in (9e-4, 1.5e-3, 5e-3):
                assert av._moment_series(kind, x) == pytest.approx(
                    av._moment_closed(kind, x), abs=1e-9)

    def test_variant_kind4_has_wrong_limit(self):
        # deviation approaches -1/6 at x -> 0 and follows the measured law
        assert av.moment_integral_variant4(1e-3) == pytest.approx(-1 / 6, abs=1e-5)
        for x in (0.1, 0.5, 0.9):
            dev = av.moment_integral_variant4(x) - av.moment_integral(4, x)
            law = (1 - x * x) * math.atanh(x) / (4 * x**3) - 1 / (4 * x * x)
            assert dev == pytest.approx(law, abs=1e-12)

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            av.moment_integral(5, 0.5)
        with pytest.raises(ValueError):
            av.moment_integral(1, 1.0)


class TestPairMoments:
    @pytest.mark.parametrize("kind", [1, 2, 3, 4])
    @pytest.mark.parametrize("xy", [(0.4, 0.1), (0.7, 0.7), (0.95, 0.001),
                                    (0.02, 0.01), (0.3, 0.2999), (1e-6, 1e-7)])
    def test_against_independent_quadrature(self, kind, xy):
        x, y = xy
        oracle = oracles.sphere_average(
            lambda th, ph: moment_kernel(kind)(th, ph)
            / ((1 + x * np.sin(th) * np.cos(ph)) * (1 + y * np.sin(th) * np.cos(ph))),
            n_theta=300, n_phi=600)
        assert av.pair_moment(kind, x, y) == pytest.approx(oracle, abs=1e-9)

    def test_symmetric_in_arguments(self):
        for kind in (1, 2, 3, 4):
            assert av.pair_moment(kind, 0.6, 0.2) == pytest.approx(
                av.pair_moment(kind, 0.2, 0.6), abs=1e-13)

    def test_coincident_arguments_are_exact(self):
        # equality x == y hits the derivative limit and must not blow up
        for kind in (1, 2, 3, 4):
            same = av.pair_moment(kind, 0.5, 0.5)
            near = av.pair_moment(kind, 0.5, 0.5 - 1e-9)
            assert same == pytest.approx(near, abs=1e-7)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=1, max_value=4),
           st.floats(min_value=-80.0, max_value=-0.01),
           st.floats(min_value=-80.0, max_value=-0.01))
    def test_high_precision_reference(self, kind, log_x, log_y):
        # divided differences against scaled-precision arbitrary arithmetic,
        # across eighty orders of magnitude and both branch regimes
        import mpmath as mp
        x, y = 10.0**log_x, 10.0**log_y
        mp.mp.dps = 60 + int(2.5 * abs(min(log_x, log_y)))
        vals = []
        for z in (mp.mpf(x), mp.mpf(y)):
            at = mp.atanh(z)
            m = {1: (z + (3 * z**2 - 1) * at) / (8 * z**3),
                 2: (-z + (1 + z**2) * at) / (8 * z**3),
                 3: 1 / z - at / z**2,
                 4: (3 - z**2) * at / (4 * z**3) - mp.mpf(3) / (4 * z**2)}[kind]
            vals.append(z * m)
        ref = float((vals[0] - vals[1]) / (mp.mpf(x) - mp.mpf(y))) if x != y \
            else av.pair_moment(kind, x, y)
        lib = av.pair_moment(kind, x, y)
        assert min(abs(lib - ref), abs(lib - ref) / max(1e-30, abs(ref))) < 1e-11


class TestGFunctional:
    def test_vanishes_without_decoherence(self):
        params = ch.ChannelParams(t=1.0, alpha=1.0)
        for kind in (1, 2, 3, 4):
            assert av.g_functional(kind, params) == 0.0

    def test_reference_point(self):
        params = ch.ChannelParams(t=math.sqrt(0.5), alpha=1.0)
        s = params.basis_overlap
        qs = params.coherence_factor * s
        oracle = (
            oracles.sphere_average(lambda th, ph: moment_kernel(3)(th, ph)
                                   / (1 + qs * np.sin(th) * np.cos(ph)))
            - oracles.sphere_average(lambda th, ph: moment_kernel(3)(th, ph)
                                     / (1 + s * np.sin(th) * np.cos(ph)))
        )
        assert av.g_functional(3, params) == pytest.approx(oracle, abs=1e-10)

    def test_degenerate_basis_limit(self):
        # both moment arguments tend to 1; the difference stays finite with
        # limit h(1) log t where h is the artanh cofactor of each moment
        t = 0.8
        limits = {1: math.log(t) / 4, 2: math.log(t) / 4,
                  3: -math.log(t), 4: math.log(t) / 2}
        for kind, expect in limits.items():
            assert av.g_functional(kind, ch.ChannelParams(t, 1e-8)) == \
                pytest.approx(expect, abs=1e-9)
            assert av.g_functional(kind, ch.ChannelParams(t, 0.0)) == \
                pytest.approx(expect, abs=1e-12)

    def test_accurate_on_both_sides_of_the_grouped_switch(self):
        import mpmath as mp
        mp.mp.dps = 50

        def reference(kind, t, alpha):
            tm, am = mp.mpf(t), mp.mpf(alpha)
            vals = []
            for z in (mp.e ** (-2 * am**2), mp.e ** (-2 * tm**2 * am**2)):
                at = mp.atanh(z)
                vals.append({
                    1: (z + (3 * z**2 - 1) * at) / (8 * z**3),
                    2: (-z + (1 + z**2) * at) / (8 * z**3),
                    3: 1 / z - at / z**2,
                    4: (3 - z**2) * at / (4 * z**3) - mp.mpf(3) / (4 * z**2),
                }[kind])
            return float(vals[0] - vals[1])

        cases = [(t, a) for t in (0.4, 0.9) for a in (6e-4 / t, 8e-4 / t)]
        cases += [(1e-6, 3.0), (1e-4, 2.0)]  # overlap ~ 1 with a far-off second scale
        for kind in (1, 2, 3, 4):
            for t, alpha in cases:
                lib = av.g_functional(kind, ch.ChannelParams(t, alpha))
                ref = reference(kind, t, alpha)
                assert min(abs(lib - ref), abs(lib - ref) / abs(ref)) < 1e-10


class TestAveragedFidelities:
    def test_cp_ideal(self):
        assert av.avg_fidelity(Direction.C_TO_P, ch.ChannelParams(1.0, 1.0)) == 1.0

    def test_ps_reference_value(self):
        params = ch.ChannelParams(t=0.5, alpha=1.0)
        assert av.avg_fidelity(Direction.P_TO_S, params) == pytest.approx(
            17 / 24, abs=1e-15)

    def test_cp_reference_value(self):
        params = ch.ChannelParams(t=0.8, alpha=1.0)
        assert av.avg_fidelity(Direction.C_TO_P, params) == pytest.approx(
            0.5305071479381273, abs=1e-14)

    def test_sp_ideal_series_branch(self):
        assert av.avg_fidelity(Direction.S_TO_P, ch.ChannelParams(1.0, 1.0)) == \
            pytest.approx(1.0, abs=1e-12)

    def test_sp_moments_match_scipy_integration(self):
        t = 0.55
        a1, a2, a3 = av._success_weighted_moments(t)
        c1, c2 = t * t, 2 - t * t
        den = lambda p: c1 * p + c2 * (1 - p)
        assert a1 == pytest.approx(oracles.segment_average(lambda p: p**2 / den(p)), abs=1e-12)
        assert a2 == pytest.approx(
            oracles.segment_average(lambda p: (1 - p) ** 2 / den(p)), abs=1e-12)
        assert a3 == pytest.approx(
            oracles.segment_average(lambda p: p * (1 - p) / den(p)), abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.1, 0.54, 1.0, 2.0, 10.0])
    def test_all_closed_forms_match_quadrature(self, alpha):
        for r in (0.0, 0.25, 0.5, 0.75, 0.95):
            params = ch.ChannelParams.from_r(r, alpha)
            for d in Direction:
                assert av.avg_fidelity(d, params) == pytest.approx(
                    av.avg_fidelity_quadrature(d, params), abs=1e-8)
            for d in (Direction.C_TO_P, Direction.S_TO_P):
                assert av.avg_fidelity(d, params, postselected=True) == pytest.approx(
                    av.avg_fidelity_quadrature(d, params, postselected=True), abs=1e-8)

    def test_pc_variant_assembly_is_off(self):
        params = ch.ChannelParams.from_r(0.6, 1.0)
        exact = av.avg_fidelity(Direction.P_TO_C, params)
        assert abs(av.avg_fidelity_variant_pc(params) - exact) > 0.1

    def test_postselection_rejected_for_field_targets(self):
        params = ch.ChannelParams(t=0.8, alpha=1.0)
        with pytest.raises(ValueError):
            av.avg_fidelity(Direction.P_TO_C, params, postselected=True)
        with pytest.raises(ValueError):
            av.avg_fidelity(Direction.P_TO_S, params, postselected=True)


class TestClassicalLimit:
    def test_orthogonal_targets(self):
        params = ch.ChannelParams(t=0.5, alpha=1.0)
        for d in (Direction.C_TO_P, Direction.P_TO_S, Direction.S_TO_P):
            assert av.classical_limit(d, params) == 2 / 3

    def test_small_overlap_limit(self):
        params = ch.ChannelParams(t=1.0, alpha=10.0)
        assert av.classical_limit(Direction.P_TO_C, params) == pytest.approx(
            2 / 3, abs=1e-12)

    def test_merging_basis_limit(self):
        params = ch.ChannelParams(t=1.0, alpha=0.0)
        assert av.classical_limit(Direction.P_TO_C, params) == 1.0

    @pytest.mark.parametrize("alpha", [0.3, 1.0, 2.0])
    def test_matches_quadrature_of_classical_strategy(self, alpha):
        for r in (0.0, 0.4, 0.8):
            params = ch.ChannelParams.from_r(r, alpha)
            assert av.classical_limit(Direction.P_TO_C, params) == pytest.approx(
                av.classical_limit_quadrature(params), abs=1e-10)

    def test_half_overlap_reference(self):
        t = math.sqrt(math.log(2.0) / 2.0)
        params = ch.ChannelParams(t=t, alpha=1.0)
        assert params.basis_overlap == pytest.approx(0.5, abs=1e-15)
        oracle = av.classical_limit_quadrature(params)
        assert av.classical_limit(Direction.P_TO_C, params) == pytest.approx(
            oracle, abs=1e-10)

    def test_variant_expression_is_off(self):
        params = ch.ChannelParams.from_r(0.6, 1.0)
        assert abs(av.classical_limit_variant(params)
                   - av.classical_limit(Direction.P_TO_C, params)) > 0.1


class TestAveragedProbabilities:
    def test_pc_is_half_survival(self):
        for r in R_GRID:
            params = ch.ChannelParams.from_r(r, 1.0)
            assert av.avg_success_probability(Direction.P_TO_C, params) == \
                params.t**2 / 2

    def test_cp_reference_point(self):
        t = math.sqrt(math.log(2.0) / 2.0)
        params = ch.ChannelParams(t=t, alpha=1.0)
        assert av.avg_success_probability(Direction.C_TO_P, params) == pytest.approx(
            0.5493061443340548, abs=1e-13)

    def test_cp_orthogonal_limit(self):
        params = ch.ChannelParams(t=1.0, alpha=10.0)
        assert av.avg_success_probability(Direction.C_TO_P, params) == pytest.approx(
            1.0, abs=1e-12)

    def test_cp_merging_limit(self):
        params = ch.ChannelParams(t=1e-6, alpha=1.0)
        assert av.avg_success_probability(Direction.C_TO_P, params) < 1e-9

    def test_sp_is_half(self):
        for t in (0.3, 0.8, 1.0):
            assert av.avg_success_probability(
                Direction.S_TO_P, ch.ChannelParams(t, 1.0)) == 0.5

    @pytest.mark.parametrize("alpha", [0.1, 1.0, 2.0])
    def test_match_quadrature(self, alpha):
        for r in (0.0, 0.5, 0.95):
            params = ch.ChannelParams.from_r(r, alpha)
            for d in Direction:
                assert av.avg_success_probability(d, params) == pytest.approx(
                    av.avg_success_quadrature(d, params), abs=1e-8)

    def test_postselected_factor(self):
        params = ch.ChannelParams(t=0.8, alpha=1.0)
        for d in (Direction.C_TO_P, Direction.S_TO_P):
            assert av.avg_success_probability(d, params, postselected=True) == \
                pytest.approx(av.avg_success_probability(d, params) * params.t**2 / 2,
                              abs=1e-15)


class TestGapFormula:
    def test_vanishes_without_loss(self):
        assert av.fidelity_gap_large_alpha(ch.ChannelParams(1.0, 10.0)) == 0.0

    def test_matches_closed_forms_at_large_amplitude(self):
        params = ch.ChannelParams(t=math.sqrt(0.99), alpha=10.0)
        gap = (av.avg_fidelity(Direction.P_TO_C, params)
               - av.avg_fidelity(Direction.C_TO_P, params))
        assert abs(gap - av.fidelity_gap_large_alpha(params)) < 1e-3

    def test_strong_loss_limit(self):
        params = ch.ChannelParams(t=1e-3, alpha=10.0)
        assert av.fidelity_gap_large_alpha(params) == pytest.approx(2 / 3, abs=1e-5)


class TestPostselectionIdentities:
    def test_cp_postselected_average(self):
        params = ch.ChannelParams(t=0.8, alpha=1.0)
        q = params.coherence_factor
        assert av.avg_fidelity(Direction.C_TO_P, params, postselected=True) == \
            pytest.approx((2 + q) / 3, abs=1e-15)

    def test_sp_gap_profile(self):
        # the p->s and postselected s->p averages stay close only while the
        # channel is mildly decohered; the gap tops out above 0.05 near r = 0.92
        gap = lambda r: abs(
            av.avg_fidelity(Direction.P_TO_S, ch.ChannelParams.from_r(r, 1.0))
            - av.avg_fidelity(Direction.S_TO_P, ch.ChannelParams.from_r(r, 1.0),
                              postselected=True))
        assert gap(0.3) < 0.01
        assert gap(0.5) < 0.01
        assert 0.05 < gap(0.92) < 0.06
        assert max(gap(r) for r in np.linspace(0.01, 0.99, 99)) == pytest.approx(
            0.0536, abs=5e-4)

    def test_sp_success_weighted_averages_coincide(self):
        # weighting the postselected s->p fidelity by success probability
        # reproduces the p->s average identically, for every decay
        for t in (0.3, 0.6, 0.9):
            params = ch.ChannelParams(t, 1.0)
            num = oracles.segment_average(
                lambda p: (t * t * p**2 + (1 - p) ** 2 + (1 + 2 * t - t * t) * p * (1 - p)))
            den = oracles.segment_average(
                lambda p: t * t * p + (2 - t * t) * (1 - p))
            weighted = num / den
            assert weighted == pytest.approx(
                av.avg_fidelity(Direction.P_TO_S, params), abs=1e-12)


def test_closed_forms_are_continuous_in_r():
    # no jumps across series/algebra switch points
    eps = 1e-6
    for alpha in (0.1, 1.0, 10.0):
        for r in R_GRID[1:]:
            lo = ch.ChannelParams.from_r(r - eps, alpha)
            hi = ch.ChannelParams.from_r(r + eps, alpha)
            for d in Direction:
                assert abs(av.avg_fidelity(d, lo) - av.avg_fidelity(d, hi)) < 1e-4
                assert abs(av.avg_success_probability(d, lo)
                           - av.avg_success_probability(d, hi)) < 1e-4


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.05, max_value=0.999), st.floats(min_value=0.05, max_value=3.0))
def test_averages_respect_bounds(t, alpha):
    params = ch.ChannelParams(t=t, alpha=alpha)
    for d in Direction:
        assert 0.0 <= av.avg_fidelity(d, params) <= 1.0 + 1e-12
        assert 0.0 <= av.avg_success_probability(d, params) <= 1.0 + 1e-12
    assert 0.0 <= av.classical_limit(Direction.P_TO_C, params) <= 1.0 + 1e-12
