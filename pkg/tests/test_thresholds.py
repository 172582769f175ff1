from fractions import Fraction as F

import pytest

import charp as ch
from charp import CartierAlgebraSpec, Ideal, MixedPair


def ring(p=3):
    return ch.RingCtx(("x", "y"), ch.PrimeModulus(p))


@pytest.fixture(scope="module")
def R():
    return ring()


@pytest.fixture(scope="module")
def family(R):
    return Ideal(R, [R.poly("x+y")]), Ideal(R, [R.poly("x*y")])


class TestFptSearch:
    # the four worked threshold values: (fixed t1, expected threshold in t2)
    CASES = [(F(1, 3), F(2, 3)), (F(2, 3), F(2, 3)),
             (F(1, 9), F(8, 9)), (F(7, 9), F(5, 9))]

    @pytest.mark.parametrize("t1,expected", CASES)
    def test_worked_values(self, family, t1, expected):
        f1, f2 = family
        res = ch.fpt_search([(f1, t1)], f2, depth=6)
        assert res.candidate == expected
        assert res.lo < expected <= res.hi

    def test_bracket_invariants(self, family):
        f1, f2 = family
        res = ch.fpt_search([(f1, F(1, 3))], f2, depth=5)
        assert res.lo < res.hi
        assert res.width() == F(1, 3 ** 5)
        full = CartierAlgebraSpec.full_algebra(f1.ring)
        lo_tau = ch.tau_mixed(MixedPair.of([(f1, F(1, 3)), (f2, res.lo)]), full)
        hi_tau = ch.tau_mixed(MixedPair.of([(f1, F(1, 3)), (f2, res.hi)]), full)
        assert lo_tau.is_unit() and not hi_tau.is_unit()

    def test_transcript_is_monotone_consistent(self, family):
        # every recorded unit evaluation sits at or below every non-unit one
        f1, f2 = family
        res = ch.fpt_search([(f1, F(1, 3))], f2, depth=4)
        unit_hash = Ideal(f1.ring, [f1.ring.one()]).content_hash()
        units = [t for t, h in res.transcript if h == unit_hash]
        others = [t for t, h in res.transcript if h != unit_hash]
        assert max(units) < min(others)

    def test_lct_line_consistency(self, family):
        # at even-digit t1 the threshold is the log-canonical line 1 - t1/2
        f1, f2 = family
        for t1 in (F(0), F(2, 3), F(80, 81)):
            res = ch.fpt_search([(f1, t1)], f2, depth=6)
            assert res.candidate == 1 - t1 / 2
        # at t1 = 1 the fixed slice itself has tau = (x+y) != (1), so the
        # region never reaches the right edge and the search must refuse
        with pytest.raises(ch.ThresholdError):
            ch.fpt_search([(f1, F(1))], f2, depth=3)

    @pytest.mark.parametrize("p,t1,expected", [
        (5, F(1, 5), F(4, 5)), (5, F(2, 5), F(4, 5)), (5, F(3, 5), F(3, 5)),
        (5, F(1, 25), F(24, 25)), (7, F(1, 7), F(6, 7)),
    ])
    def test_other_primes(self, p, t1, expected):
        # odd left endpoints give 1 - (a+1)/(2p); even digits give the
        # log-canonical line; both at arbitrary odd primes
        Rp = ring(p)
        f1 = Ideal(Rp, [Rp.poly("x+y")])
        f2 = Ideal(Rp, [Rp.poly("x*y")])
        res = ch.fpt_search([(f1, t1)], f2, depth=4)
        assert res.candidate == expected

    def test_not_f_regular_at_zero(self, R):
        f = Ideal(R, [R.poly("x*y")])
        with pytest.raises(ch.ThresholdError):
            ch.fpt_search([(f, F(2))], Ideal(R, [R.poly("x+y")]), depth=3)

    def test_threshold_avoidance_probe_logged(self, family):
        # the observed avoidance of (a/q, a/(q-1)) windows is recorded but
        # deliberately NOT asserted
        from charp.thresholds import avoidance_windows
        f1, f2 = family
        log = []
        for t1, _ in self.CASES:
            res = ch.fpt_search([(f1, t1)], f2, depth=6)
            log.append((str(res.candidate),
                        avoidance_windows(res.candidate, 3)))
        print("avoidance probe:", log)
        assert len(log) == len(self.CASES)


class TestJumpingNumbers:
    def test_monomial_family(self, R):
        f = Ideal(R, [R.poly("x*y")])
        runs = ch.jumping_numbers([], f, 1, 3)
        assert len(runs) == 2
        (a0, b0, h0), (a1, b1, h1) = runs
        assert (a0, b0) == (F(0), F(26, 27))
        assert (a1, b1) == (F(1), F(1))
        assert h0 == Ideal(R, [R.one()]).content_hash()
        assert h0 != h1

    def test_smooth_divisor_breakpoint_at_one(self, R):
        f = Ideal(R, [R.poly("x+y")])
        runs = ch.jumping_numbers([], f, 1, 3)
        assert ch.breakpoints(runs) == [F(1)]

    def test_degenerate_range(self, R):
        f = Ideal(R, [R.poly("x*y")])
        runs = ch.jumping_numbers([], f, 0, 2)
        assert len(runs) == 1
        assert runs[0][2] == Ideal(R, [R.one()]).content_hash()

    def test_mixed_family_breakpoint(self, R):
        # with (x+y)^(1/3) fixed, the free family over xy jumps at 2/3
        f1 = Ideal(R, [R.poly("x+y")])
        f2 = Ideal(R, [R.poly("x*y")])
        runs = ch.jumping_numbers([(f1, F(1, 3))], f2, 1, 2)
        assert F(2, 3) in ch.breakpoints(runs)

    def test_refinement_never_merges_classes(self, R):
        f = Ideal(R, [R.poly("x+y")])
        coarse = ch.jumping_numbers([], f, 1, 2)
        fine = ch.jumping_numbers([], f, 1, 3)
        assert len({h for _, _, h in fine}) >= len({h for _, _, h in coarse})


class TestJumpScaling:
    def test_scaled_jump_confirmed(self, R):
        f = Ideal(R, [R.poly("x*y")])
        # t = 1/3 is not a jump; t = 1 is; both scale soundly
        assert ch.jump_scaling_probe(f, F(1, 3), 3, 4) is True
        assert ch.jump_scaling_probe(f, F(1), 3, 4) is True

    def test_zero_is_trivial(self, R):
        f = Ideal(R, [R.poly("x*y")])
        assert ch.jump_scaling_probe(f, F(0), 1, 3) is True

    def test_out_of_range_is_vacuous(self, R):
        f = Ideal(R, [R.poly("x*y")])
        assert ch.jump_scaling_probe(f, F(1), 1, 3) == "vacuous"
