from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from diophlab.bounds import kleinbock_hyperplane_dual
from diophlab.core import PrecisionReal
from diophlab.errors import DimensionError, DomainError, PrecisionError
from diophlab.estimator import LadderSpec, estimate_exponent
from diophlab.search import best_supnorm
from diophlab.witnesses import (
    HyperplaneForm,
    HyperplaneSpec,
    ParamTarget,
    QuadraticSeed,
    continued_fraction,
    convergents,
    hyperplane_point,
    hyperplane_with_exponent,
    liouville_levels,
    liouville_number,
    quadratic_irrational,
    verify_oracle,
)


class TestLiouville:
    def test_levels(self):
        assert liouville_levels(2, 5) == [2, 6, 18, 54, 162]
        pt = liouville_number(2, 5)
        assert [a for a, _ in pt.construction_log] == [2, 6, 18, 54, 162]
        assert pt.value == sum(F(1, 1 << a) for a in (2, 6, 18, 54, 162))
        assert pt.ladder_cap == 1 << 54 and pt.ladder_cap_exponent == 54

    @pytest.mark.parametrize("tau", [1, F(1, 2), 0])
    def test_tau_must_exceed_one(self, tau):
        with pytest.raises(DomainError):
            liouville_number(tau)

    def test_level_count_and_precision(self):
        with pytest.raises(DomainError):
            liouville_number(2, 2)
        with pytest.raises(PrecisionError):
            liouville_number(2, 8, precision=1000)

    def test_tau3_oracle(self):
        rec = verify_oracle(liouville_number(3, 5))
        assert rec.passed and 2.7 <= rec.tail_max <= 3.3
        assert rec.as_record()["ladder"] == "1:128"

    def test_oracle_refuses_to_run_past_cap(self):
        with pytest.raises(DomainError):
            verify_oracle(liouville_number(2, 4), LadderSpec(1, 60))

    def test_truncation_stability(self):
        short, long = liouville_number(2, 5), liouville_number(2, 6)
        assert 0 < long.value - short.value < F(1, 1 << 162)
        a = estimate_exponent([[short.value]], ladder="1:54").slopes
        b = estimate_exponent([[long.value]], ladder="1:54").slopes
        assert [Q for Q, _ in a] == [Q for Q, _ in b]
        assert all(abs(x - y) < 1e-12 for (_, x), (_, y) in zip(a, b))


class TestQuadratic:
    def test_golden_ratio_digits(self):
        pt = quadratic_irrational("golden_ratio", 256)
        assert abs(pt.value.at(256).value - F("1.6180339887")) < F(1, 10**9)
        assert pt.claimed_exponent == 1 and pt.name == "phi"

    def test_sqrt2_is_badly_approximable(self):
        bits = 128
        d = quadratic_irrational(QuadraticSeed.SQRT2).value.digits(bits)
        one = 1 << bits
        for q in range(1, 10**6 + 1):
            r = (q * d) % one
            dist = min(r, one - r)
            # ||q sqrt2|| >= 1/(4q), with the 2^-128 digit error far below the margin
            assert 4 * q * dist >= one

    def test_best_approximations_are_fibonacci(self):
        phi = quadratic_irrational().value
        fib = {1, 2}
        a, b = 2, 3
        while b <= 10**4:
            fib.add(b)
            a, b = b, a + b
        best, record = [], None
        x = phi.at(128).value
        for q in range(1, 10**4 + 1):
            d = abs(q * x - round(q * x))
            if record is None or d < record:
                record = d
                best.append(q)
        assert set(best) <= fib and set(best) >= fib - {1}

    def test_convergents(self):
        assert continued_fraction(F(355, 113), 10) == [3, 7, 16]
        cs = convergents(quadratic_irrational().value, 8)
        assert cs[-1] == F(34, 21)


class TestHyperplanes:
    def test_zero_parameters(self):
        spec = HyperplaneSpec(3, (0, 0))
        assert hyperplane_point(spec, (F(1, 3), F(2, 5))) == (0, F(1, 3), F(2, 5))
        assert spec.s_count == 1

    def test_golden_ratio_parameter(self):
        phi = quadratic_irrational().value
        x = hyperplane_point(HyperplaneSpec(2, (phi,)), (1,))
        assert x[1] == 1 and abs(x[0].at(64).value - phi.at(64).value) < F(1, 1 << 60)

    def test_affine(self):
        spec = HyperplaneSpec(3, (1, 0, 5), HyperplaneForm.AFFINE)
        assert hyperplane_point(spec, (2, 3)) == (7, 2, 3)
        assert spec.s_count == 2

    def test_dimension_checks(self):
        with pytest.raises(DimensionError):
            HyperplaneSpec(3, (1,))
        with pytest.raises(DimensionError):
            HyperplaneSpec(1, ())
        with pytest.raises(DimensionError):
            hyperplane_point(HyperplaneSpec(2, (1,)), (1, 2))

    @given(st.lists(st.fractions(-5, 5), min_size=2, max_size=2),
           st.lists(st.fractions(-5, 5), min_size=2, max_size=2))
    def test_injective(self, y1, y2):
        spec = HyperplaneSpec(3, (F(1, 3), F(-2, 7)))
        if y1 != y2:
            assert hyperplane_point(spec, y1) != hyperplane_point(spec, y2)

    def test_irrational_product_coordinates(self):
        spec = HyperplaneSpec(2, (PrecisionReal.sqrt(2),))
        (lead, y) = hyperplane_point(spec, (PrecisionReal.sqrt(3),))
        assert abs(lead.at(100).value - PrecisionReal.sqrt(6).at(100).value) < F(1, 1 << 90)

    def test_liouville_hyperplane(self):
        spec = hyperplane_with_exponent(2, ParamTarget.SIM_A, 4, levels=4)
        assert spec.a[0] == liouville_number(4, 4).value
        assert kleinbock_hyperplane_dual(4, 2) == 4

    def test_golden_hyperplane_is_extremal(self):
        spec = hyperplane_with_exponent(2, "sim", 1)
        assert isinstance(spec.a[0], PrecisionReal)
        assert kleinbock_hyperplane_dual(1, 2) == 2

    def test_three_dimensional_parameters(self):
        spec = hyperplane_with_exponent(3, "sim", 2, levels=4)
        assert len(spec.a) == 2
        spec = hyperplane_with_exponent(3, "dual", 9, levels=4)
        assert isinstance(spec.a[1], PrecisionReal)

    def test_infeasible_targets(self):
        with pytest.raises(DomainError):
            hyperplane_with_exponent(3, "dual", 1)
        with pytest.raises(DomainError):
            hyperplane_with_exponent(3, "sim", F(1, 3))
        with pytest.raises(DomainError):
            hyperplane_with_exponent(2, "sim", "inf")


def test_best_q_for_sqrt2_is_pell():
    x = quadratic_irrational("sqrt2").value
    assert best_supnorm([[x]], [0], 100).q in ((70,), (-70,))
