import math
from collections import Counter
from fractions import Fraction
from math import comb

import pytest

from illume.exceptions import CapExceededError
from illume.randomized import (
    RandomSetRealization,
    bound_chain,
    build_Rk,
    check_Ek,
    estimate_threshold_n,
    make_rng,
    monte_carlo_hit_frequency,
    rate_function,
    sample_trial,
    trial_success_prob,
    union_size_holds,
)

from conftest import brute_trial_prob

F = Fraction


def _real(n, k, supports, signs):
    return RandomSetRealization(n, k, None, tuple(map(tuple, supports)), tuple(map(tuple, signs)))


class TestSampleTrial:
    def test_full_support(self):
        t = sample_trial(3, 2, make_rng(0))
        assert sum(1 for v in t.vector if v) == 3

    def test_rank_one(self):
        rng = make_rng(1)
        for _ in range(20):
            v = sample_trial(4, 1, rng).vector
            assert sum(1 for a in v if a) == 1 and set(v) <= {-1, 0, 1}

    def test_support_uniformity(self):
        real = build_Rk(6, 2, count=100_000, seed=2)
        counts = Counter(real.supports)
        assert len(counts) == comb(6, 3)
        p = 1 / 20
        sigma = math.sqrt(p * (1 - p) / 100_000)
        for c in counts.values():
            assert abs(c / 100_000 - p) <= 3 * sigma


class TestBuildRk:
    def test_default_count(self):
        real = build_Rk(12, 2)
        assert real.count == 4096 // 144 == 28
        assert all(sum(1 for a in v if a) == 3 for v in real.vectors)

    def test_degenerate(self):
        for k in (1, 2):
            real = build_Rk(3, k)
            assert real.count == 0 and real.degenerate

    def test_deterministic(self):
        assert build_Rk(8, 2, 10, 99) == build_Rk(8, 2, 10, 99)
        assert build_Rk(8, 2, 10, 99) != build_Rk(8, 2, 10, 100)
        assert build_Rk(8, 2, 10, 99, stream=1) != build_Rk(8, 2, 10, 99)

    def test_dump_round_trip(self):
        real = build_Rk(7, 3, 12, 5)
        back = RandomSetRealization.loads(real.dumps())
        assert back.supports == real.supports and back.signs == real.signs
        assert back.dumps() == real.dumps()


class TestCheckEk:
    def test_single_trial(self):
        res = check_Ek(_real(2, 1, [(0,)], [(-1, 1)]))
        assert not res.covered
        assert set(res.missing) == {(1, 0), (0, 1), (0, -1)}

    def test_four_trials(self):
        res = check_Ek(_real(2, 1, [(0,), (0,), (1,), (1,)], [(-1, 1), (1, 1), (1, -1), (1, 1)]))
        assert res.covered and res.missing == []

    def test_support_never_reaches_last(self):
        res = check_Ek(_real(4, 2, [(0, 1, 2)] * 8, [(1, 1, 1, 1), (-1, -1, -1, 1)] * 4))
        assert not res.covered
        # 3 partners for coordinate 4, times 4 sign choices
        assert sum(1 for p in res.missing if p[3]) == 12

    def test_cap(self):
        real = build_Rk(22, 2, 5, 1)
        with pytest.raises(CapExceededError):
            check_Ek(real, cap=20)
        assert check_Ek(real, cap=20, sample=50).sampled

    def test_sampled_agrees_when_covered(self):
        real = build_Rk(6, 2, 2000, 3)
        assert check_Ek(real).covered
        assert check_Ek(real, cap=4, sample=500).covered


class TestTrialProbability:
    @pytest.mark.parametrize("n, k, q", [(4, 1, F(1, 8)), (2, 1, F(1, 4)), (5, 3, F(1, 8))])
    def test_examples(self, n, k, q):
        assert trial_success_prob(n, k) == q
        assert brute_trial_prob(n, k) == q

    @pytest.mark.parametrize("n", range(2, 7))
    def test_matches_enumeration(self, n):
        for k in range(1, (n + 1) // 2 + 1):
            assert trial_success_prob(n, k) == brute_trial_prob(n, k)

    def test_simulated_table_entry(self):
        assert trial_success_prob(12, 2) == F(comb(10, 1), comb(12, 3) * 4)


class TestBoundChain:
    def test_n3(self):
        r = bound_chain(3, 1)
        assert r.q == F(1, 6)
        assert r.stirling == pytest.approx(4 / 243, rel=1e-12)
        assert r.final == pytest.approx((8 / 27) / 18, rel=1e-12)
        assert r.chain_holds

    def test_minimum_at_one_third(self):
        r = bound_chain(6, 2)
        assert r.stirling == pytest.approx(r.final, rel=1e-12)
        assert r.chain_holds

    def test_n2(self):
        r = bound_chain(2, 1)
        assert r.q == F(1, 4)
        assert r.q >= r.stirling and r.q >= r.final

    def test_rate_identity(self):
        for n, k in [(6, 2), (10, 3), (30, 7), (50, 25)]:
            t = k / n
            lhs = 2.0**k * (1 - t) ** (n - k) * t**k
            assert lhs == pytest.approx(rate_function(t) ** n, rel=1e-10)
        assert rate_function(1 / 3) == pytest.approx(2 / 3, rel=1e-15)


class TestMonteCarlo:
    def test_deterministic(self):
        a = monte_carlo_hit_frequency(6, 2, 5000, seed=4)
        b = monte_carlo_hit_frequency(6, 2, 5000, seed=4)
        assert a.hits == b.hits

    def test_other_pattern(self):
        r = monte_carlo_hit_frequency(5, 2, 20_000, seed=8, pattern=(0, 0, 1, 0, 1))
        assert abs(r.z) <= 4


class TestThreshold:
    def test_n4_fails(self):
        scan = estimate_threshold_n(4, 4)
        assert not scan.rows[0]["holds"]
        lhs = math.log(1 - 1 / 8)
        rhs = math.log(0.5) - 8 - math.log(4)
        assert scan.rows[0]["worst_margin"] <= rhs - lhs + 1e-12

    def test_union_size(self):
        assert union_size_holds(8)
        assert 4 * (256 // 64) == 16 < 128

    def test_n0_reported(self):
        scan = estimate_threshold_n(2, 120)
        assert scan.n0 is not None and scan.n0 > 4
        assert all(r["holds"] for r in scan.rows if r["n"] >= scan.n0)
        assert not next(r for r in scan.rows if r["n"] == scan.n0 - 1)["holds"]
        assert scan.to_csv().count("\n") == len(scan.rows) + 1
