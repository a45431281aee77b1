"""Model hierarchy: parameterisation, densities, transforms, sampling."""

import math

import numpy as np
import pytest
from scipy import integrate

from msglen import (
    CtsDatum,
    DiscreteDatum,
    DomainError,
    ParameterError,
    ReversePermutation,
    Rotation,
    TransformError,
    VecDatum,
    cartesian2polar,
    compose,
    exp,
    identity,
    linear,
    log,
    polar2cartesian,
)
from msglen.models import (
    bounded_uniform,
    independent_rd,
    multistate,
    normal,
)

HALF_LN_2PI = 0.9189385332046727


class TestParameterise:
    def test_standard_normal(self):
        m = normal((0, 1))
        assert m.mean == 0.0 and m.sd == 1.0
        assert m.msg1 == 0.0  # given parameters cost nothing to state

    def test_negative_sd_rejected(self):
        with pytest.raises(ParameterError):
            normal((0, -1))

    def test_malformed_sp(self):
        with pytest.raises(ParameterError):
            normal((1.0,))

    def test_bounded_uniform(self):
        m = bounded_uniform(0, 3)(())
        assert all(m.pr(DiscreteDatum(k)) == pytest.approx(0.25, rel=1e-15) for k in range(4))

    def test_uniform_singleton(self):
        m = bounded_uniform(0, 0)(())
        assert m.pr(DiscreteDatum(0)) == pytest.approx(1.0, rel=1e-15)

    def test_bad_bounds(self):
        with pytest.raises(ParameterError):
            bounded_uniform(3, 0)

    def test_fair_coin(self):
        m = multistate(0, 1)((0.5, 0.5))
        assert m.pr(DiscreteDatum(0)) == pytest.approx(0.5, rel=1e-15)
        assert m.pr(DiscreteDatum(1)) == pytest.approx(0.5, rel=1e-15)

    def test_multistate_must_sum_to_one(self):
        with pytest.raises(ParameterError):
            multistate(0, 1)((0.5, 0.6))

    def test_multistate_shape(self):
        with pytest.raises(ParameterError):
            multistate(0, 2)((0.5, 0.5))

    def test_independent_product_pdf(self):
        m = independent_rd([normal, normal])(((0, 1), (0, 1)))
        assert m.pdf([0.0, 0.0]) == pytest.approx(0.15915494309189535, rel=1e-12)


class TestNlPr:
    def test_standard_normal_at_zero(self):
        m = normal((0, 1))
        assert m.nl_pr(CtsDatum(0.0, 1.0)) == pytest.approx(HALF_LN_2PI, rel=1e-12)

    def test_doubling_aom_subtracts_ln2(self):
        m = normal((0, 1))
        got = m.nl_pr(CtsDatum(0.0, 2.0))
        assert got == pytest.approx(HALF_LN_2PI - math.log(2.0), rel=1e-12)

    def test_uniform(self):
        m = bounded_uniform(0, 3)(())
        assert m.nl_pr(DiscreteDatum(2)) == pytest.approx(math.log(4.0), rel=1e-15)

    def test_out_of_space(self):
        with pytest.raises(DomainError):
            bounded_uniform(0, 3)(()).nl_pr(DiscreteDatum(7))

    def test_nl_pr_matches_pr(self):
        models = [
            (normal((2, 0.5)), CtsDatum(1.7, 0.01)),
            (multistate(0, 2)((0.2, 0.3, 0.5)), DiscreteDatum(1)),
            (independent_rd([normal, normal])(((0, 1), (1, 2))), VecDatum((0.3, 0.7), (0.01, 0.02))),
        ]
        for m, d in models:
            assert m.pr(d) == pytest.approx(math.exp(-m.nl_pr(d)), rel=1e-12)

    def test_vector_aoms_enter_additively(self):
        m = independent_rd([normal, normal])(((0, 1), (0, 1)))
        base = m.nl_pr(VecDatum((0.1, 0.2), (0.01, 0.01)))
        doubled = m.nl_pr(VecDatum((0.1, 0.2), (0.02, 0.01)))
        assert base - doubled == pytest.approx(math.log(2.0), abs=1e-12)

    def test_discrete_sums_to_one(self):
        for m in (bounded_uniform(0, 5)(()), multistate(0, 3)((0.1, 0.2, 0.3, 0.4))):
            total = math.fsum(m.pr_value(k) for k in m.space())
            assert total == pytest.approx(1.0, abs=1e-9)


class TestRandom:
    def test_normal_moments(self):
        rng = np.random.default_rng(42)
        m = normal((0, 1))
        n = 100_000
        xs = [m.random(rng).x for x in range(n)]
        assert abs(np.mean(xs)) < 3.0 / math.sqrt(n)
        assert abs(np.std(xs, ddof=1) - 1.0) < 3.0 / math.sqrt(2 * n)

    def test_log_normal_draws_positive(self):
        rng = np.random.default_rng(42)
        m = normal.transform(log)((0, 1))
        assert all(m.random(rng).x > 0 for _ in range(10_000))

    def test_fixed_seed_repeats(self):
        m = normal.transform(log)((0.5, 1.5))
        a = [m.random(np.random.default_rng(7)).x for _ in range(1)]
        first = [m.random(np.random.default_rng(123)).x for _ in range(50)]
        second = [m.random(np.random.default_rng(123)).x for _ in range(50)]
        assert first == second

    def test_draw_carries_synthetic_aom(self):
        rng = np.random.default_rng(0)
        assert normal((0, 1)).random(rng).aom == 1e-6
        assert normal((0, 1)).random(rng, aom=0.5).aom == 0.5

    def test_discrete_random_in_space(self):
        rng = np.random.default_rng(11)
        m = multistate(2, 4)((0.2, 0.2, 0.6))
        draws = [m.random(rng).value for _ in range(2000)]
        assert set(draws) <= {2, 3, 4}
        assert np.mean([d == 4 for d in draws]) == pytest.approx(0.6, abs=0.05)

    def test_vector_random(self):
        rng = np.random.default_rng(5)
        m = independent_rd([normal, normal])(((0, 1), (5, 2)))
        d = m.random(rng)
        assert d.dim == 2 and d.aoms == (1e-6, 1e-6)


class TestTransform:
    def test_log_normal_pdf_at_one(self):
        log_normal = normal.transform(log)((0, 1))
        assert log_normal.pdf(1.0) == pytest.approx(0.3989422804014327, rel=1e-12)

    def test_log_normal_support(self):
        log_normal = normal.transform(log)((0, 1))
        with pytest.raises(DomainError):
            log_normal.nl_pr(CtsDatum(-1.0, 0.1))

    def test_exp_transform_opens_support(self):
        # a model of (0, inf) becomes one of the whole line
        folded = normal.transform(log)  # supported on (0, inf)
        reopened = folded.transform(compose(exp, identity))
        m = reopened(((0, 1)))
        assert math.isfinite(m.nl_pr(CtsDatum(-5.0, 0.1)))

    def test_identity_transform_is_noop(self):
        rng = np.random.default_rng(42)
        base = normal((2, 0.5))
        wrapped = normal.transform(identity)((2, 0.5))
        for _ in range(100):
            d = CtsDatum(float(rng.normal(2, 0.5)), 0.01)
            assert wrapped.nl_pr(d) == pytest.approx(base.nl_pr(d), abs=1e-12)

    def test_kind_mismatch(self):
        with pytest.raises(TransformError):
            normal.transform(polar2cartesian)
        with pytest.raises(TransformError):
            bounded_uniform(0, 3).transform(log)

    def test_non_invertible_rejected(self):
        from msglen.functions import Cts2Cts

        class Halve(Cts2Cts):
            name = "halve"

            def apply_x(self, x):
                return 0.5 * x

            def d_dx(self, x):
                return 0.5

        with pytest.raises(TransformError):
            normal.transform(Halve())

    def test_parameterise_transform_commute(self):
        rng = np.random.default_rng(42)
        for sp in ((0.0, 1.0), (2.0, 0.5), (-1.0, 3.0)):
            for f in (log, linear(2.0, 1.0)):
                lhs = normal(sp).transform(f)
                rhs = normal.transform(f)(sp)
                f_inv = f.inverse()
                for _ in range(100):
                    x = f_inv.apply_x(float(rng.normal(sp[0], sp[1])))
                    d = CtsDatum(x, 10.0 ** float(rng.uniform(-4, -1)))
                    assert abs(lhs.nl_pr(d) - rhs.nl_pr(d)) < 1e-9

    def test_transform_then_inverse_recovers(self):
        rng = np.random.default_rng(42)
        base = normal((1.0, 2.0))
        roundtrip = base.transform(log).transform(exp)
        for _ in range(50):
            d = CtsDatum(float(rng.normal(1, 2)), 0.01)
            assert roundtrip.nl_pr(d) == pytest.approx(base.nl_pr(d), abs=1e-9)

    def test_double_transform_equals_composition(self):
        rng = np.random.default_rng(42)
        f, g = log, linear(2.0, 1.0)
        stacked = normal((0.5, 1.2)).transform(f).transform(g)
        composed = normal((0.5, 1.2)).transform(compose(f, g))
        for _ in range(100):
            y = float(rng.uniform(0.05, 4.0))  # g(y) = 2y+1 > 0 keeps log happy
            d = CtsDatum(y, 10.0 ** float(rng.uniform(-4, -1)))
            assert abs(stacked.nl_pr(d) - composed.nl_pr(d)) < 1e-9

    def test_msg1_carried_over(self):
        from msglen.models import NormalModel

        m = NormalModel(1.0, 2.0, msg1=3.5)
        assert m.transform(log).msg1 == 3.5

    def test_random_uses_inverse(self):
        # log-normal drawing = exp of a normal draw, stream for stream
        seed = 99
        m = normal((0.25, 1.5))
        draws = [m.random(np.random.default_rng(seed)).x for _ in range(1)]
        t = normal.transform(log)((0.25, 1.5))
        t_draws = [t.random(np.random.default_rng(seed)).x for _ in range(1)]
        assert t_draws[0] == pytest.approx(math.exp(draws[0]), rel=1e-12)


class TestDiscreteTransform:
    def test_pointwise_relabelling(self):
        m = multistate(0, 3)((0.1, 0.2, 0.3, 0.4))
        for g in (ReversePermutation(0, 3), Rotation(0, 3, 1)):
            t = m.transform(g)
            for k in t.space():
                assert t.pr_value(k) == m.pr_value(g.apply_i(k))  # exact
            assert math.fsum(t.pr_value(k) for k in t.space()) == pytest.approx(1.0, abs=1e-12)

    def test_uniform_is_permutation_invariant(self):
        m = bounded_uniform(0, 3)(())
        t = m.transform(ReversePermutation(0, 3))
        assert all(t.pr_value(k) == pytest.approx(0.25, rel=1e-15) for k in t.space())

    def test_random_maps_back(self):
        rng = np.random.default_rng(3)
        m = multistate(0, 2)((0.7, 0.2, 0.1))
        t = m.transform(ReversePermutation(0, 2))
        draws = [t.random(rng).value for _ in range(3000)]
        assert np.mean([d == 2 for d in draws]) == pytest.approx(0.7, abs=0.05)


class TestVectorTransform:
    def test_polar_density_closed_form(self):
        plane = independent_rd([normal, normal])
        m = plane.transform(polar2cartesian)(((0, 1), (0, 1)))
        rng = np.random.default_rng(42)
        for _ in range(100):
            r = float(rng.uniform(0.05, 5.0))
            theta = float(rng.uniform(0.0, 2 * math.pi))
            want = r * math.exp(-0.5 * r * r) / (2.0 * math.pi)
            assert m.pdf([r, theta]) == pytest.approx(want, rel=1e-12)

    def test_polar_random_roundtrip_stream(self):
        plane = independent_rd([normal, normal])
        m = plane.transform(polar2cartesian)(((0, 1), (0, 1)))
        d = m.random(np.random.default_rng(1))
        base = plane(((0, 1), (0, 1))).random_v(np.random.default_rng(1))
        np.testing.assert_allclose(
            polar2cartesian.apply_v(d.components), base, rtol=1e-12
        )

    def test_origin_rejected(self):
        plane = independent_rd([normal, normal])
        m = plane.transform(cartesian2polar)(((0, 1), (0, 1)))
        with pytest.raises(DomainError):
            m.nl_pr(VecDatum((0.0, 0.0), (0.1, 0.1)))


class TestNormalisation:
    def test_normal_integrates_to_one(self):
        m = normal((1.5, 0.7))
        mass, _ = integrate.quad(m.pdf, -math.inf, math.inf)
        assert mass == pytest.approx(1.0, abs=1e-4)

    def test_log_normal_integrates_to_one(self):
        m = normal.transform(log)((0, 1))
        mass, _ = integrate.quad(
            lambda x: m.pdf(x) if x > 0 else 0.0,
            0.0,
            1e6,
            points=[0.05, 1.0, 10.0, 100.0],
            limit=200,
        )
        assert mass == pytest.approx(1.0, abs=1e-4)

    def test_polar_integrates_to_one(self):
        plane = independent_rd([normal, normal])
        m = plane.transform(polar2cartesian)(((0, 1), (0, 1)))
        mass, _ = integrate.dblquad(
            lambda theta, r: m.pdf([r, theta]) if r > 0 else 0.0,
            0.0,
            20.0,
            0.0,
            2.0 * math.pi,
        )
        assert mass == pytest.approx(1.0, abs=1e-3)

    def test_independent_product_integrates_to_one(self):
        m = independent_rd([normal, normal])(((0.5, 1.2), (-0.3, 0.8)))
        mass, _ = integrate.dblquad(
            lambda y, x: m.pdf([x, y]), -8, 9, -7, 6.5
        )
        assert mass == pytest.approx(1.0, abs=1e-3)

    def test_log_mapped_draws_recover_base_moments(self):
        rng = np.random.default_rng(42)
        m = normal.transform(log)((0, 1))
        n = 100_000
        ys = [math.log(m.random(rng).x) for _ in range(n)]
        assert abs(np.mean(ys)) < 3.0 / math.sqrt(n)
        assert abs(np.std(ys, ddof=1) - 1.0) < 3.0 / math.sqrt(2 * n)
