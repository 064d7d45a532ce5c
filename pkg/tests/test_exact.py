"""Exact-algebra layer: polynomials, rational functions, identity proofs."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mudeform.core import MuContext, deformed_binomial
from mudeform.exact import (MuPolynomial, MuRationalFunction, binom_mu_exact,
                            eval_rational, gamma_mu_exact, p_2n_sum_closed,
                            p_4n_closed, p_4n_minus_2_closed, p_at_exact,
                            verify_closed_forms, verify_odd_vanishing)

Q = Fraction


def rational(num, den=(1,)):
    return MuRationalFunction(MuPolynomial(num), MuPolynomial(den))


class TestMuPolynomial:
    def test_trim_and_zero(self):
        assert MuPolynomial((1, 2, 0, 0)).degree == 1
        assert MuPolynomial((0,)).is_zero
        assert MuPolynomial().degree == -1

    def test_arithmetic(self):
        p = MuPolynomial((1, 2))       # 1 + 2 mu
        q = MuPolynomial((3, 0, 1))    # 3 + mu^2
        assert (p + q).coeffs == (Q(4), Q(2), Q(1))
        assert (p * q).coeffs == (Q(3), Q(6), Q(1), Q(2))
        assert (p - p).is_zero
        assert p.scale(Q(1, 2)).coeffs == (Q(1, 2), Q(1))
        assert p.times_mu().coeffs == (Q(0), Q(1), Q(2))

    def test_evaluate(self):
        p = MuPolynomial((1, 0, 3))
        assert p.evaluate(Q(2)) == 13
        assert p.evaluate(0.5) == pytest.approx(1.75)

    def test_divide_linear_exact(self):
        # (mu + 1/2)(mu + 3) = mu^2 + 7/2 mu + 3/2
        p = MuPolynomial.mu_plus(Q(1, 2)) * MuPolynomial.mu_plus(3)
        quot, rem = p.divide_linear(Q(1, 2))
        assert rem == 0
        assert quot == MuPolynomial.mu_plus(3)
        _, rem2 = p.divide_linear(Q(7))
        assert rem2 != 0


class TestMuRationalFunction:
    def test_monic_denominator(self):
        f = rational((4, 0), (1, 2))  # 4 mu? no: (4)/(1+2mu) -> 2/(mu+1/2)
        assert f.den.lead == 1
        assert f.den.coeffs == (Q(1, 2), Q(1))
        assert f.num.coeffs == (Q(2),)

    def test_zero_denominator_rejected(self):
        with pytest.raises(ZeroDivisionError):
            rational((1,), (0,))

    def test_cross_equal(self):
        # 4 mu / (1 + 2 mu) == 2 mu / (mu + 1/2)
        a = rational((0, 4), (1, 2))
        b = rational((0, 2), (Q(1, 2), 1))
        assert a.cross_equal(b)
        assert not a.cross_equal(rational((0, 4), (1, 1)))

    def test_pole_evaluation(self):
        f = rational((1,), (Q(1, 2), 1))
        with pytest.raises(ZeroDivisionError):
            f.evaluate(Q(-1, 2))


class TestGammaExact:
    def test_base_case(self):
        assert gamma_mu_exact(0) == MuPolynomial((1,))

    def test_n1_forced_by_recursion(self):
        assert gamma_mu_exact(1) == MuPolynomial((1, 2))

    def test_n4_hand_recursion(self):
        # gamma(3) = (3+2mu) 2 (1+2mu);  gamma(4) = 4 gamma(3) = 8(1+2mu)(3+2mu)
        assert gamma_mu_exact(4) == MuPolynomial((24, 64, 32))

    def test_degree(self):
        for n in range(20):
            assert gamma_mu_exact(n).degree == (n + 1) // 2

    def test_pochhammer_closed_form(self):
        # Independent oracle: gamma(2m) = 2^(2m) m! (mu+1/2)_m and
        # gamma(2m+1) = 2^(2m+1) m! (mu+1/2)_(m+1), built directly.
        def poch(m):
            acc = MuPolynomial((1,))
            for i in range(m):
                acc = acc * MuPolynomial.mu_plus(Q(2 * i + 1, 2))
            return acc

        import math
        for m in range(12):
            even = poch(m).scale(Q(4) ** m * math.factorial(m))
            assert gamma_mu_exact(2 * m) == even
            odd = poch(m + 1).scale(2 * Q(4) ** m * math.factorial(m))
            assert gamma_mu_exact(2 * m + 1) == odd


class TestBinomExact:
    def test_j_zero_is_one(self):
        one = rational((1,))
        for k in (0, 1, 5, 12):
            assert binom_mu_exact(k, 0) == one
            assert binom_mu_exact(k, k) == one

    def test_2_choose_1(self):
        assert binom_mu_exact(2, 1) == rational((2,), (1, 2))

    def test_symmetry(self):
        for k in range(8):
            for j in range(k + 1):
                assert binom_mu_exact(k, j) == binom_mu_exact(k, k - j)

    def test_against_definitional_ratio(self):
        # binom must equal gamma(k)/(gamma(j) gamma(k-j)) built from the
        # plain recursion polynomials, by cross-multiplication.
        for k in (3, 7, 10, 15):
            for j in range(k + 1):
                b = binom_mu_exact(k, j)
                lhs = b.num * (gamma_mu_exact(j) * gamma_mu_exact(k - j))
                rhs = b.den * gamma_mu_exact(k)
                assert lhs == rhs

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            binom_mu_exact(2, 3)
        with pytest.raises(ValueError):
            binom_mu_exact(2, -1)

    @settings(max_examples=60, deadline=None)
    @given(
        st.fractions(min_value=Q(-49, 100), max_value=Q(5)),
        st.integers(min_value=0, max_value=30),
        st.data(),
    )
    def test_float_binomial_matches_exact(self, mu, k, data):
        j = data.draw(st.integers(min_value=0, max_value=k))
        ctx = MuContext(float(mu))
        approx = deformed_binomial(k, j, ctx)
        # evaluate the exact value at the *float-rounded* mu the context saw
        exact_val = binom_mu_exact(k, j).evaluate(Q(ctx.mu))
        assert approx == pytest.approx(float(exact_val), rel=1e-11)


class TestPAtExact:
    def test_odd_vanishes(self):
        for k in range(1, 42, 2):
            assert p_at_exact(k).is_zero

    def test_k0_is_one(self):
        assert p_at_exact(0) == rational((1,))

    def test_k2(self):
        assert p_at_exact(2) == rational((0, 4), (1, 2))

    def test_k4(self):
        assert p_at_exact(4) == rational((0, 8), (1, 2))

    def test_even_k_at_mu_zero(self):
        # the classical alternating binomial sum vanishes for even k >= 2
        assert eval_rational(p_at_exact(0), Q(0)) == 1
        for k in range(2, 41, 2):
            assert eval_rational(p_at_exact(k), Q(0)) == 0

    def test_eval_rational_examples(self):
        assert eval_rational(p_at_exact(2), Q(1)) == Q(4, 3)
        g3 = MuRationalFunction(gamma_mu_exact(3))
        assert eval_rational(g3, Q(0)) == 6


class TestClosedForms:
    def test_families_at_n1_hand_values(self):
        # 2 mu/(mu+1/2) == 4 mu/(1+2 mu) and 4 mu/(mu+1/2) == 8 mu/(1+2 mu)
        assert p_4n_minus_2_closed(1) == rational((0, 4), (1, 2))
        assert p_4n_closed(1) == rational((0, 8), (1, 2))

    def test_index2_family_overlap(self):
        # index 2 is 4n-2 at n=1 and 2n at n=1: the formulas must agree
        # with each other, not only with the expansion
        assert p_4n_minus_2_closed(1) == p_2n_sum_closed(1)

    def test_verify_odd_vanishing_report(self):
        rep = verify_odd_vanishing(5)
        assert rep.all_passed
        assert [c.index for c in rep.checks] == [1, 3, 5]
        rep41 = verify_odd_vanishing(41)
        assert rep41.all_passed and len(rep41.checks) == 21

    def test_verify_closed_forms_n12(self):
        rep = verify_closed_forms(12)
        assert rep.all_passed
        assert len(rep.checks) == 36
        # results are labelled per n (per-n evidence, not a general proof)
        assert all(c.n is not None for c in rep.checks)
        assert all(c.sampled_equal for c in rep.checks)

    def test_report_json_schema(self):
        import json

        rep = verify_closed_forms(1)
        payload = json.loads(rep.to_json())
        assert payload["schema_version"] == 1
        assert payload["all_passed"] is True
        entry = payload["checks"][0]
        assert {"family", "index", "n", "passed", "lhs", "rhs"} <= set(entry)
        assert isinstance(entry["lhs"]["num"], list)
