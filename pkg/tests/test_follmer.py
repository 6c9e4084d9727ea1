import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from truncvar import (
    PathError,
    SimConfig,
    backlash,
    correlated_brownian_pair,
    covariation,
    generate,
    identity_report,
    integral_X,
    integral_Xprime,
    integral_Xsecond,
    make_path,
    qv_bracket,
    realized_jump_square_sum,
    variation_triple,
)
from truncvar.follmer import EpsFloorWarning, bracket_samples, eps_floor, richardson
from truncvar.skorohod import identity_family
from truncvar.stieltjes import constant, preset
from truncvar.variation import total_variation

from .strategies import paths


class TestBracket:
    def test_example(self, climb):
        q = qv_bracket(climb, [0.4])
        assert q.final() == pytest.approx(1.28)

    def test_identity_family_gives_zero(self, climb):
        assert not qv_bracket(climb, [0.4, 0.2], family=identity_family).values.any()

    @pytest.mark.parametrize("ladder", [[], [0.1, 0.2], [0.1, 0.1], [0.1, -0.1]])
    def test_bad_ladders(self, climb, ladder):
        with pytest.raises(ValueError):
            qv_bracket(climb, ladder)

    def test_floor_warning(self):
        p = generate(SimConfig(n=4096, seed=1))
        with pytest.warns(EpsFloorWarning):
            q = qv_bracket(p, [0.1, 0.001])
        assert len(q.warnings) == 1 and "0.001" in q.warnings[0]

    def test_floor_scale(self):
        p = generate(SimConfig(n=4096, seed=1))
        assert eps_floor(p) == pytest.approx(5 * 0.6745 / 64, rel=0.1)

    def test_grid_and_cauchy(self):
        p = generate(SimConfig(n=2**14, seed=3))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", EpsFloorWarning)
            q = qv_bracket(p, [0.2, 0.1, 0.05], grid=np.linspace(0, 1, 11))
        assert q.values.shape == (11,) and len(q.cauchy) == 2
        assert all(c["ok"] for c in q.crosscheck.values())
        assert np.array_equal(q.values, q.curves[0.05])
        assert richardson(q.curves).shape == (11,)

    @given(paths(min_size=2), st.floats(1e-3, 5.0))
    def test_crosscheck_bound(self, p, eps):
        q = qv_bracket(p, [eps])
        c = q.crosscheck[eps]
        assert c["max_dev"] <= 4 * eps**2 * (1 + 1e-9) + 1e-9 * len(p)

    @given(paths(min_size=2), st.floats(1e-3, 5.0))
    def test_non_decreasing_with_jump_slack(self, p, eps):
        b = bracket_samples(backlash(p, eps))
        inc = np.diff(b)
        tol = 1e-12 * max(1.0, np.abs(p.values).max()) * len(p)
        assert np.all(inc >= -tol)
        assert np.all(inc <= 2 * eps * (np.abs(np.diff(p.values)) + 2 * eps) + tol)

    def test_boundedness_condition(self):
        p = generate(SimConfig(n=2**16, seed=11))
        ladder = [0.16, 0.08, 0.04]
        lhs = max(e * total_variation(backlash(p, e).env.values) for e in ladder)
        rhs = max(2 * e * variation_triple(p, 2 * e).ttv for e in ladder)
        assert lhs <= 2 * rhs


class TestIntegrals:
    def test_unit_integrand(self, climb):
        y = backlash(climb, 0.4).env.values
        one = constant(1.0)
        assert integral_X(climb, one, 0.4) == pytest.approx(y[-1] - climb.values[0])
        assert integral_Xsecond(climb, one, 0.4) == pytest.approx(y[-1] - climb.values[0])

    def test_identity_example(self, climb):
        assert integral_X(climb, preset("x"), 0.4) == pytest.approx(0.5)

    def test_constant_path(self):
        p = make_path([0, 1, 2], [1, 1, 1])
        for integral in (integral_X, integral_Xprime, integral_Xsecond):
            assert integral(p, preset("cos"), 0.1) == 0.0

    @given(paths(min_size=2), st.floats(-3, 3), st.floats(1e-3, 5))
    def test_xprime_constant_integrand(self, p, c, eps):
        got = integral_Xprime(p, constant(c), eps)
        assert got == pytest.approx(c * (p.values[-1] - p.values[0]), abs=1e-9 * max(1, abs(c)) * len(p))

    @given(paths(min_size=2), st.floats(1e-3, 5))
    def test_xprime_is_left_sum_against_path(self, p, eps):
        y = backlash(p, eps).env.values
        ref = np.sum(np.cos(y[:-1]) * np.diff(p.values))
        assert integral_Xprime(p, preset("cos"), eps) == pytest.approx(ref, abs=1e-9 * len(p) * max(1, np.abs(p.values).max()))

    def test_finite_variation_xsecond(self, climb):
        got = integral_Xsecond(climb, preset("x"), 0.0, family=identity_family)
        assert got == pytest.approx(np.sum(climb.values[:-1] * np.diff(climb.values)))

    def test_xprime_square_brownian(self):
        p = generate(SimConfig(n=2**18, seed=5))
        eps = 0.04
        bracket = qv_bracket(p, [eps]).final()
        ref = 0.5 * (p.values[-1] ** 2 - p.values[0] ** 2 - bracket)
        assert integral_Xprime(p, preset("x"), eps) == pytest.approx(ref, abs=0.05)


class TestReport:
    @given(paths(min_size=2), st.floats(-2, 2), st.floats(1e-3, 5))
    def test_constant_integrand(self, p, c, eps):
        # at fixed eps only the envelope gap x_t - y_t survives
        r = identity_report(p, constant(c), eps)
        gap = c * (p.values[-1] - backlash(p, eps).env.values[-1])
        tol = 1e-9 * len(p) * max(1.0, abs(c)) * max(1.0, np.abs(p.values).max())
        assert r.bracket_term == 0.0 and r.jump_term == pytest.approx(0.0, abs=tol)
        assert r.residual_prop1 == pytest.approx(0.0, abs=tol)
        assert r.residual_thm2 == pytest.approx(gap, abs=tol)
        assert r.residual_relation == pytest.approx(gap, abs=tol)
        assert r.gap_second_prime == pytest.approx(-gap, abs=tol)
        assert r.gap_x_second == pytest.approx(0.0, abs=tol)
        assert abs(gap) <= abs(c) * eps + tol

    @given(paths(min_size=2, max_size=60), st.sampled_from(["cos", "sin", "x2", "x3"]))
    def test_classical_case_exact(self, p, name):
        p = make_path(p.times, np.clip(p.values, -3, 3))
        r = identity_report(p, preset(name), 0.0, family=identity_family)
        assert abs(r.residual_thm2) <= 1e-10 * max(1.0, abs(r.F_increment), r.I_X ** 2)

    def test_upto(self, climb):
        r = identity_report(climb, preset("x"), 0.4, upto=1.5)
        assert r.t == 1.0 and r.I_X == pytest.approx(0.0)

    @pytest.mark.parametrize("seed", [42, 43, 44, 45])
    def test_tied_residuals_within_cauchy(self, seed):
        p = generate(SimConfig(n=2**20, seed=seed))
        q = qv_bracket(p, [0.04, 0.02])
        r = identity_report(p, preset("cos"), 0.02)
        for v in (r.residual_relation, r.gap_second_prime, r.gap_x_second):
            assert abs(v) <= q.cauchy[0]


class TestCovariation:
    def test_zero_partner(self):
        x = generate(SimConfig(n=1024, seed=1))
        c = covariation(x, x.with_values(np.zeros(len(x)), x.jump_mask), 0.05)
        assert not c.values.any()

    @given(paths(min_size=2), st.floats(1e-3, 5))
    def test_self_is_quarter_ttv_of_double(self, p, eps):
        c = covariation(p, p, eps)
        ref = eps * variation_triple(make_path(p.times, 2 * p.values), eps).ttv / 4
        assert c.final() == pytest.approx(ref, rel=1e-12, abs=1e-12)

    @given(st.integers(0, 2**16), st.floats(-1, 1), st.floats(1e-3, 1))
    def test_symmetric(self, seed, rho, eps):
        x, y = correlated_brownian_pair(SimConfig(n=256, seed=seed), rho)
        assert np.array_equal(covariation(x, y, eps).values, covariation(y, x, eps).values)

    def test_grid_mismatch(self):
        with pytest.raises(PathError):
            covariation(make_path([0, 1], [0, 1]), make_path([0, 2], [0, 1]), 0.1)


class TestJumpSquares:
    def test_examples(self):
        assert realized_jump_square_sum(make_path([0, 1], [0, 3])) == 9.0
        assert realized_jump_square_sum(make_path([0, 1, 2], [0, 1, -1])) == 5.0

    def test_diffusion_has_none(self):
        assert realized_jump_square_sum(generate(SimConfig(n=1024, seed=2))) == 0.0

    def test_compound_poisson_uses_flagged_jumps(self):
        p = generate(SimConfig(kind="compound_poisson", lam=5, n=1024, seed=4))
        assert realized_jump_square_sum(p) == pytest.approx(np.sum(np.diff(p.values) ** 2))
