from fractions import Fraction as F

import pytest

import charp as ch
from charp import CartierAlgebraSpec, Ideal, MixedPair, poly_str


def ring(p=3, names=("x", "y")):
    return ch.RingCtx(tuple(names), ch.PrimeModulus(p))


def I(R, *exprs):
    return Ideal(R, [R.poly(s) for s in exprs])


def pair(R, *items):
    return MixedPair.of([(I(R, expr), F(t)) for expr, t in items])


@pytest.fixture
def R():
    return ring()


@pytest.fixture
def full(R):
    return CartierAlgebraSpec.full_algebra(R)


class TestCplusSigma:
    def test_cplus_examples(self, R, full):
        tw = CartierAlgebraSpec.from_twists(R, [(1, R.poly("x^3"))])
        assert ch.cplus(I(R, "1"), tw).basis_strings() == ("x",)
        assert ch.cplus(I(R, "1"), full).basis_strings() == ("1",)
        assert ch.cplus(Ideal(R, []), tw).basis_strings() == ()

    def test_sigma_examples(self, R, full):
        tw = CartierAlgebraSpec.from_twists(R, [(1, R.poly("x^3"))])
        assert ch.sigma(tw, I(R, "1")).basis_strings() == ("x",)
        tw2 = CartierAlgebraSpec.from_twists(R, [(1, R.poly("x^2"))])
        assert ch.sigma(tw2, I(R, "1")).basis_strings() == ("1",)
        assert ch.sigma(full, I(R, "1")).basis_strings() == ("1",)

    def test_sigma_idempotent(self, R):
        for twist in ("x^3", "x^2*y^4", "x^4*y^4"):
            C = CartierAlgebraSpec.from_twists(R, [(1, R.poly(twist))])
            stable = ch.sigma(C, I(R, "1"))
            assert ch.ideal_eq(ch.cplus(stable, C), stable)

    def test_mixed_degrees_rejected(self, R):
        C = CartierAlgebraSpec.from_twists(R, [(1, R.poly("x")),
                                               (2, R.poly("y"))])
        with pytest.raises(ValueError):
            C.degree()

    def test_sigma_budget_reported(self, R):
        C = CartierAlgebraSpec.from_twists(R, [(1, R.poly("x^3"))])
        with pytest.raises(ch.BudgetExceeded):
            ch.sigma(C, I(R, "1"), budget=0)


class TestTauMixed:
    def test_three_lines_point(self, R, full):
        # tau((x+y)^(1/3) (xy)^(2/3)) lands inside (x,y) and is not the unit
        # ideal; the chain evaluates to exactly (x,y)
        tau = ch.tau_mixed(pair(R, ("x+y", F(1, 3)), ("x*y", F(2, 3))), full)
        assert I(R, "x", "y").contains_ideal(tau)
        assert not tau.is_unit()
        assert tau.basis_strings() == ("x", "y")

    def test_zero_exponents(self, R, full):
        tau = ch.tau_mixed(pair(R, ("x+y", 0), ("x*y", 0)), full)
        assert tau.basis_strings() == ("1",)

    def test_below_monomial_threshold(self, R, full):
        tau = ch.tau_mixed(pair(R, ("x*y", F(5, 9))), full)
        assert tau.basis_strings() == ("1",)

    def test_plateau_does_not_fool_stabilization(self, R, full):
        # exponent denominator 3^4: the chain is constant for three steps and
        # only jumps to (1) at e = 4
        tau = ch.tau_mixed(pair(R, ("x+y", F(1, 3)), ("x*y", F(53, 81))), full)
        assert tau.is_unit()

    def test_monotone_in_exponents(self, R, full):
        grid = [F(1, 3), F(2, 3), F(1), F(4, 3)]
        prev = None
        for t in grid:
            tau = ch.tau_mixed(pair(R, ("x*y", t)), full)
            if prev is not None:
                assert prev.contains_ideal(tau)
            prev = tau

    def test_right_continuity_probe(self, R, full):
        # at a non-jumping point, adding p^-k for large k leaves tau unchanged
        base = ch.tau_mixed(pair(R, ("x*y", F(1, 2))), full)
        bumped = ch.tau_mixed(pair(R, ("x*y", F(1, 2) + F(1, 3 ** 6))), full)
        assert ch.ideal_eq(base, bumped)

    def test_start_index_exposed(self, R, full):
        a = ch.tau_mixed(pair(R, ("x+y", F(1, 3)), ("x*y", F(2, 3))), full,
                         start_e=1)
        b = ch.tau_mixed(pair(R, ("x+y", F(1, 3)), ("x*y", F(2, 3))), full,
                         start_e=3)
        assert ch.ideal_eq(a, b)

    def test_twisted_algebra_chain(self, R):
        # principal algebra <kappa o x^3> on (x*y)^(1/3): by hand,
        # e=1: kappa(x^3 * xy) = (x); e=2,3 repeat (x); tau = (x)
        C = CartierAlgebraSpec.from_twists(R, [(1, R.poly("x^3"))])
        tau = ch.tau_mixed(pair(R, ("x*y", F(1, 3))), C)
        assert tau.basis_strings() == ("x",)


class TestSkodaAndScaling:
    def test_skoda_reduce_examples(self, R, full):
        p1 = pair(R, ("x+y", F(3, 2)))
        reduced, mult = ch.skoda_reduce(p1, 0)
        assert reduced.exponents == (F(1, 2),)
        lhs = ch.tau_mixed(p1, full)
        rhs = ch.product(mult, ch.tau_mixed(reduced, full))
        assert ch.ideal_eq(lhs, rhs)

        p2 = pair(R, ("x*y", F(2)))
        reduced, mult = ch.skoda_reduce(p2, 0)
        assert mult.basis_strings() == ("x*y",)
        assert ch.ideal_eq(ch.tau_mixed(p2, full),
                           ch.product(mult, ch.tau_mixed(reduced, full)))

    def test_skoda_precondition(self, R):
        with pytest.raises(ValueError):
            ch.skoda_reduce(pair(R, ("x+y", F(1, 2))), 0)

    def test_skoda_non_principal(self, R, full):
        # two generators, so the reduction needs t >= 2
        m = Ideal(R, [R.var("x"), R.var("y")])
        p2 = MixedPair.of([(m, F(2))])
        with pytest.raises(ValueError):
            ch.skoda_reduce(MixedPair.of([(m, F(3, 2))]), 0)
        reduced, mult = ch.skoda_reduce(p2, 0)
        lhs = ch.tau_mixed(p2, full)
        rhs = ch.product(mult, ch.tau_mixed(reduced, full))
        assert ch.ideal_eq(lhs, rhs)
        assert lhs.basis_strings() == ("x", "y")

    def test_scale_examples(self, R, full):
        t1 = ch.tau_mixed(pair(R, ("x+y", F(1))), full)
        assert ch.ideal_eq(ch.scale_test_ideal(t1, full),
                           ch.tau_mixed(pair(R, ("x+y", F(1, 3))), full))
        assert ch.scale_test_ideal(I(R, "1"), full).basis_strings() == ("1",)
        assert ch.scale_test_ideal(Ideal(R, []), full).basis_strings() == ()

    def test_scaling_law_grid(self, R, full):
        for expr in ("x+y", "x*y"):
            for t in (F(1, 3), F(2, 3), F(1), F(4, 3), F(5, 9)):
                lhs = ch.tau_mixed(pair(R, (expr, t / 3)), full)
                rhs = ch.scale_test_ideal(ch.tau_mixed(pair(R, (expr, t)), full),
                                          full)
                assert ch.ideal_eq(lhs, rhs)


class TestPullback:
    def test_pulled_action_values(self):
        chart = ch.RelativeChart.build(("t",), ("x",), 3)
        S, Rb = chart.ring, chart.base_ring
        kappa = CartierAlgebraSpec.from_twists(Rb, [(1, Rb.one())])
        act = ch.pullback_cartier(kappa, chart).generators[0].apply
        assert poly_str(act(S.poly("x^2*t^2"))) == "1"
        assert act(S.poly("x^2")).is_zero()

    def test_sigma_commutes_with_pullback(self):
        for fiber in (("x",), ("x", "y")):
            chart = ch.RelativeChart.build(("t",), fiber, 3)
            S, Rb = chart.ring, chart.base_ring
            alg = CartierAlgebraSpec.from_twists(Rb, [(1, Rb.poly("t^4"))])
            sig_base = ch.sigma(alg, Ideal(Rb, [Rb.one()]))
            assert sig_base.basis_strings() == ("t",)
            sig_top = ch.sigma(ch.pullback_cartier(alg, chart),
                               Ideal(S, [S.one()]))
            assert ch.ideal_eq(sig_top, chart.extend_ideal(sig_base))

    def test_chart_validates_fiber_basis(self):
        chart = ch.RelativeChart.build(("t",), ("x", "y"), 3)
        chart.validate()
        assert chart.form == "dx^dy"

    def test_theorem_b_examples(self):
        chart1 = ch.RelativeChart.build(("t",), ("x",), 3)
        chart2 = ch.RelativeChart.build(("t",), ("x", "y"), 3)
        Rb = chart1.base_ring
        full = CartierAlgebraSpec.full_algebra(Rb)
        p_half = MixedPair.of([(Ideal(Rb, [Rb.var("t")]), F(1, 2))])
        p_23 = MixedPair.of([(Ideal(Rb, [Rb.poly("t*(t+1)")]), F(2, 3))])
        p_zero = MixedPair.of([(Ideal(Rb, [Rb.var("t")]), F(0))])
        assert ch.theorem_b_check(full, p_half, chart1)
        assert ch.theorem_b_check(full, p_half, chart2)
        assert ch.theorem_b_check(full, p_23, chart2)
        assert ch.theorem_b_check(full, p_zero, chart1)

    def test_theorem_b_twisted_algebras(self):
        # the commutation also holds for single-degree twisted algebras
        chart1 = ch.RelativeChart.build(("t",), ("x",), 3)
        chart2 = ch.RelativeChart.build(("t",), ("x", "y"), 3)
        Rb = chart1.base_ring
        C1 = CartierAlgebraSpec.from_twists(Rb, [(1, Rb.var("t"))])
        pair1 = MixedPair.of([(Ideal(Rb, [Rb.var("t")]), F(1, 2))])
        assert ch.tau_mixed(pair1, C1).basis_strings() == ("t",)
        assert ch.theorem_b_check(C1, pair1, chart1)
        C2 = CartierAlgebraSpec.from_twists(Rb, [(1, Rb.poly("t^2"))])
        pair2 = MixedPair.of([(Ideal(Rb, [Rb.poly("t+1")]), F(2, 3))])
        assert ch.theorem_b_check(C2, pair2, chart2)

    def test_theorem_b_nontrivial_tau(self):
        # exponent 3/2 > fpt(t) = 1, so both sides are the proper ideal (t)S
        chart = ch.RelativeChart.build(("t",), ("x",), 3)
        Rb = chart.base_ring
        full = CartierAlgebraSpec.full_algebra(Rb)
        p32 = MixedPair.of([(Ideal(Rb, [Rb.var("t")]), F(3, 2))])
        assert ch.theorem_b_check(full, p32, chart)
        tau = ch.tau_mixed(p32, full)
        assert tau.basis_strings() == ("t",)


def test_budget_reported():
    # fresh variable names so the tau memo cannot serve a finished result
    R2 = ring(names=("u", "v"))
    full = CartierAlgebraSpec.full_algebra(R2)
    with pytest.raises(ch.BudgetExceeded):
        ch.tau_mixed(pair(R2, ("u*v", F(1))), full, budget=1)
