import itertools
import math
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from diophlab.core import Matrix, PrecisionReal, nearest_integer_distance, plus_product
from diophlab.errors import BudgetExceeded, DomainError
from diophlab.search import (
    Objective,
    SearchConfig,
    Strategy,
    best_multiplicative,
    best_supnorm,
    min_ladder,
    tie_key,
)
from diophlab.witnesses import HyperplaneSpec, hyperplane_point, liouville_number, quadratic_irrational

EXH = SearchConfig(strategy=Strategy.EXHAUSTIVE)
RED = SearchConfig(strategy=Strategy.REDUCTION)


def residual(X, theta, q):
    return [sum(F(a) * b for a, b in zip(row, q)) + F(t) for row, t in zip(X, theta)]


def brute_supnorm(X, theta, Q):
    n = len(X[0])
    best = None
    for q in itertools.product(range(-Q, Q + 1), repeat=n):
        if any(q):
            v = max(nearest_integer_distance(r) for r in residual(X, theta, q))
            best = v if best is None else min(best, v)
    return best


def brute_mult(X, theta, Q):
    n = len(X[0])
    cap = Q ** n
    best = None
    for q in itertools.product(range(-cap, cap + 1), repeat=n):
        if any(q) and plus_product(q) <= cap:
            v = math.prod(nearest_integer_distance(r) for r in residual(X, theta, q))
            best = v if best is None else min(best, v)
    return best


class TestSupnorm:
    def test_rational_kill(self):
        w = best_supnorm([[F(1, 3)]], [0], 3)
        assert w.q == (3,) and w.value == 0 and w.exact_solution and w.p == (-1,)

    def test_tie_break_prefers_smaller_q(self):
        w = best_supnorm([[F(1, 2)]], [F(1, 4)], 2)
        assert w.q == (1,) and w.value == F(1, 4)

    @pytest.mark.parametrize("strategy", list(Strategy))
    def test_golden_ratio_at_fibonacci_bounds(self, strategy):
        phi = quadratic_irrational().value
        mpmath.mp.prec = 200
        phi_mp = (1 + mpmath.sqrt(5)) / 2
        fib = [1, 1]
        while fib[-1] < 10**4:
            fib.append(fib[-1] + fib[-2])
        cfg = SearchConfig(strategy=strategy)
        for k in range(2, len(fib) - 1):
            w = best_supnorm([[phi]], [0], fib[k], cfg)
            assert w.q in ((fib[k],), (-fib[k],))
            want = abs(fib[k] * phi_mp - fib[k + 1])
            assert abs(w.value - F(str(want))) <= w.value_error + F(1, 10**40)

    def test_golden_ratio_matches_brute_force(self):
        phi = quadratic_irrational().value
        for Q in (5, 17, 100, 611):
            w = best_supnorm([[phi]], [0], Q)
            exact = min((abs(q * phi.at(128).value - round(q * phi.at(128).value)), q)
                        for q in range(1, Q + 1))
            assert abs(w.q[0]) == exact[1]

    def test_value_is_reproduced_from_witness(self):
        X = [[F(2, 7), F(3, 11)], [F(5, 13), F(1, 17)]]
        theta = [F(1, 9), F(2, 5)]
        w = best_supnorm(X, theta, 6)
        res = residual(X, theta, w.q)
        assert w.value == max(nearest_integer_distance(r) for r in res)
        assert [r + p for r, p in zip(res, w.p)] == [r - round(r) for r in res]
        assert max(abs(v) for v in w.q) <= 6

    def test_positive_q_restriction(self):
        w = best_supnorm(Matrix.column([F(1, 5)]), [F(1, 5)], 4, SearchConfig(positive_q=True))
        assert w.q[0] >= 1 and w.q == (4,)
        assert best_supnorm([[F(1, 5)]], [F(1, 5)], 4).q == (-1,)

    def test_rejects_bad_q(self):
        with pytest.raises(DomainError):
            best_supnorm([[F(1, 3)]], [0], 0)


class TestMultiplicative:
    def test_small_brute_force_example(self):
        X = [[F(1, 3), F(1, 5)]]
        w = best_multiplicative(X, [0], 2)
        assert w.value == brute_mult(X, [0], 2)
        assert plus_product(w.q) <= 4

    def test_one_by_one_coincides_with_supnorm(self):
        phi = quadratic_irrational().value
        for Q in (3, 10, 50):
            a = best_multiplicative([[phi]], [F(1, 3)], Q)
            b = best_supnorm([[phi]], [F(1, 3)], Q)
            assert a.value == b.value and a.q == b.q

    def test_exact_kill(self):
        assert best_multiplicative([[F(1, 2), F(1, 3)]], [0], 2).value == 0

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.fractions(0, 1, max_denominator=40), min_size=4, max_size=4),
           st.lists(st.fractions(0, 1, max_denominator=12), min_size=2, max_size=2),
           st.integers(1, 3))
    def test_two_by_two_matches_brute_force(self, entries, theta, Q):
        X = [entries[:2], entries[2:]]
        assert best_multiplicative(X, theta, Q).value == brute_mult(X, theta, Q)

    def test_dominates_supnorm(self):
        X = [[F(3, 29), F(7, 31)], [F(11, 37), F(13, 41)]]
        for Q in (2, 3, 5):
            mult = best_multiplicative(X, [0, 0], Q).value
            sup = best_supnorm(X, [0, 0], Q).value
            assert mult <= sup * F(1, 2)


class TestLadder:
    def test_rational_ladder(self):
        rungs = min_ladder([[F(1, 2)]], [0], Objective.SUPNORM, [1, 2, 4])
        assert [r.running_min for r in rungs] == [F(1, 2), 0, 0]

    def test_singleton_ladder_searches_unit_vectors(self):
        (r,) = min_ladder([[F(2, 7), F(3, 7)]], [0], Objective.SUPNORM, [1])
        assert max(abs(v) for v in r.witness.q) <= 1

    def test_golden_ratio_near_hurwitz(self):
        phi = quadratic_irrational().value
        Qs = [1 << k for k in range(1, 21)]
        for r in min_ladder([[phi]], [0], Objective.SUPNORM, Qs):
            ref = 1 / (math.sqrt(5) * r.Q)
            assert ref / 2 <= float(r.running_min) <= 2 * ref

    def test_rejects_unsorted_ladder(self):
        with pytest.raises(DomainError):
            min_ladder([[F(1, 3)]], [0], Objective.SUPNORM, [4, 2])

    def test_budget_failure_is_recorded_per_rung(self):
        cfg = SearchConfig(strategy=Strategy.EXHAUSTIVE, node_budget=10)
        rungs = min_ladder([[F(1, 97), F(1, 89)]], [0], Objective.SUPNORM, [1, 64], cfg)
        assert rungs[0].ok and not rungs[1].ok and "BudgetExceeded" in rungs[1].error

    def test_running_minimum_is_monotone(self):
        X = [[F(13, 97)], [F(29, 89)]]
        rungs = min_ladder(X, [F(1, 7), F(2, 9)], Objective.SUPNORM, list(range(1, 40)))
        vals = [r.running_min for r in rungs]
        assert all(a >= b for a, b in zip(vals, vals[1:]))


class TestStrategiesAgree:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 2), st.integers(1, 3), st.data())
    def test_rational_instances(self, m, n, data):
        Q = data.draw(st.integers(1, {1: 200, 2: 15, 3: 5}[n]))
        den = st.fractions(-2, 2, max_denominator=1000)
        X = [[data.draw(den) for _ in range(n)] for _ in range(m)]
        theta = [data.draw(den) for _ in range(m)]
        a = best_supnorm(X, theta, Q, EXH)
        b = best_supnorm(X, theta, Q, RED)
        assert a.value == b.value
        assert tie_key(0, a.q) == tie_key(0, b.q)

    def test_small_instance_against_plain_loop(self):
        X = [[F(5, 23), F(7, 19)]]
        theta = [F(1, 3)]
        assert best_supnorm(X, theta, 7, RED).value == brute_supnorm(X, theta, 7)

    def test_irrational_column(self):
        x = (PrecisionReal.sqrt(2), PrecisionReal.sqrt(3))
        for Q in (10, 100, 1000):
            a = best_supnorm(Matrix.column(x), [F(1, 5), F(1, 7)], Q, EXH)
            b = best_supnorm(Matrix.column(x), [F(1, 5), F(1, 7)], Q, RED)
            assert a.q == b.q


def test_hyperplane_with_rational_shift_terminates():
    # a near-rational line once made the reduction bracket oscillate forever
    a = liouville_number(4, 4).value
    spec = HyperplaneSpec(2, (a,))
    x = hyperplane_point(spec, (PrecisionReal.uniform("0:y:0:0"),))
    w = best_supnorm(Matrix.column(x), [F(1, 17), F(1, 5)], 1 << 31, SearchConfig(positive_q=True))
    assert 1 <= w.q[0] <= 1 << 31 and w.value < F(1, 100)


def test_budget_exceeded_is_raised_when_enumeration_cannot_finish():
    with pytest.raises(BudgetExceeded):
        best_supnorm([[F(1, 1009), F(1, 1013), F(1, 1019)]], [0], 50,
                     SearchConfig(strategy=Strategy.EXHAUSTIVE, node_budget=1000))
