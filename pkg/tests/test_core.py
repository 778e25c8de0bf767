import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from diophlab.core import (
    INF,
    Matrix,
    PrecisionReal,
    ScaledPow2,
    TargetShift,
    as_shift,
    ext_real,
    fundamental_representative,
    less_than,
    nearest_integer_distance,
    parse_scalar,
    plus_product,
    product_norm,
    render,
)
from diophlab.errors import DimensionError, DomainError

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=1000)


class TestNearestIntegerDistance:
    def test_integer(self):
        assert nearest_integer_distance(0) == 0

    def test_quarter(self):
        assert nearest_integer_distance(F(5, 4)) == F(1, 4)

    def test_negative_float(self):
        assert nearest_integer_distance(-0.3) == pytest.approx(0.3)

    def test_half_is_half_either_side(self):
        assert nearest_integer_distance(F(1, 2)) == F(1, 2)
        assert nearest_integer_distance(F(-1, 2)) == F(1, 2)

    @given(rationals)
    def test_matches_brute_force(self, y):
        brute = min(abs(y - k) for k in range(math.floor(y) - 1, math.ceil(y) + 2))
        assert nearest_integer_distance(y) == brute


class TestFundamentalRepresentative:
    def test_zero(self):
        assert fundamental_representative((0, 0)) == (0, 0)

    def test_half_maps_to_minus_half(self):
        assert fundamental_representative((F(1, 2),)) == (F(-1, 2),)

    def test_hand_example(self):
        assert fundamental_representative((F(7, 4), F(-1, 3))) == (F(-1, 4), F(-1, 3))

    def test_rejects_precision_real(self):
        with pytest.raises(DomainError):
            fundamental_representative((PrecisionReal.sqrt(2),))

    @given(st.lists(rationals, min_size=1, max_size=4))
    def test_range_congruence_idempotence(self, y):
        r = fundamental_representative(y)
        assert all(F(-1, 2) <= v < F(1, 2) for v in r)
        assert all((a - b).denominator == 1 for a, b in zip(y, r))
        assert fundamental_representative(r) == r

    @given(rationals)
    def test_distance_is_abs_of_representative(self, y):
        assert nearest_integer_distance(y) == abs(fundamental_representative((y,))[0])

    @given(st.lists(rationals, min_size=1, max_size=4))
    def test_product_of_representative_is_small(self, y):
        assert product_norm(fundamental_representative(y)) <= F(1, 2) ** len(y)


class TestProducts:
    def test_product_norm_examples(self):
        assert product_norm((F(1, 2), F(1, 3))) == F(1, 6)
        assert product_norm((0, 5)) == 0
        assert product_norm((-2,)) == 2

    def test_plus_product_examples(self):
        assert plus_product((0, 0, 0)) == 1
        assert plus_product((2, -3, 0)) == 6
        assert plus_product((1, 1)) == 1

    @given(st.integers(1, 6), st.integers(1, 3), st.data())
    def test_plus_product_bounded_by_box(self, Q, n, data):
        q = data.draw(st.lists(st.integers(-Q, Q), min_size=n, max_size=n))
        assert plus_product(q) <= Q ** n


class TestExtReal:
    def test_parsing(self):
        assert ext_real("inf") == INF
        assert ext_real("3/4") == F(3, 4)
        assert ext_real(2) == 2

    def test_rejects_negative_and_nan(self):
        with pytest.raises(DomainError):
            ext_real(-1)
        with pytest.raises(DomainError):
            ext_real(float("nan"))

    @given(st.fractions(min_value=0, max_value=10**6))
    def test_every_finite_value_is_below_infinity(self, x):
        assert ext_real(x) < ext_real("inf")

    def test_render(self):
        assert render(F(2, 3)) == "2/3"
        assert render(INF) == "inf"
        assert render(F(4)) == "4"


class TestPrecisionReal:
    def test_golden_ratio_digits(self):
        phi = PrecisionReal.golden_ratio()
        assert abs(float(phi) - 1.6180339887) < 1e-9

    @pytest.mark.parametrize("bits", [8, 64, 256, 1024])
    def test_error_bound_holds(self, bits):
        x = PrecisionReal.sqrt(2, bits)
        lo, hi = x.interval()
        assert lo * lo <= 2 <= hi * hi

    def test_error_bound_shrinks_with_bits(self):
        x = PrecisionReal.sqrt(3)
        assert x.at(512).error_bound < x.at(256).error_bound

    def test_uniform_is_prefix_consistent(self):
        u = PrecisionReal.uniform("k")
        for bits in (16, 64, 256):
            fine = u.at(bits * 2).value
            assert abs(fine - u.at(bits).value) <= 2 * u.at(bits).error_bound
        assert 0 <= float(u) < 1

    def test_uniform_depends_on_key(self):
        assert PrecisionReal.uniform("a").value != PrecisionReal.uniform("b").value

    def test_less_than_three_valued(self):
        r2 = PrecisionReal.sqrt(2)
        assert less_than(r2, F(3, 2)) is True
        assert less_than(F(3, 2), r2) is False
        # two names for the same number cannot be separated
        assert less_than(r2, parse_scalar("sqrt(2)")) is None


class TestParsing:
    @pytest.mark.parametrize("text, expected", [
        ("1/3", F(1, 3)), ("0.25", F(1, 4)), ("-2", F(-2)), ("sqrt(9)", F(3)), ("2*sqrt(4)", F(4)),
    ])
    def test_exact(self, text, expected):
        assert parse_scalar(text) == expected

    def test_irrational_names_round_trip(self):
        for text in ("phi", "sqrt(2)", "uniform(s:0)"):
            x = parse_scalar(text)
            assert isinstance(x, PrecisionReal)
            assert render(x) == text

    def test_liouville(self):
        x = parse_scalar("liouville(2,4)")
        assert x == F(1, 4) + F(1, 2**6) + F(1, 2**18) + F(1, 2**54)

    def test_bad_input(self):
        with pytest.raises(DomainError):
            parse_scalar("banana")

    def test_matrix_parse(self):
        X = Matrix.parse("1/3, 1/5; phi, 0")
        assert (X.m, X.n) == (2, 2)
        assert not X.is_exact
        assert Matrix.parse("liouville(3,3), 1").n == 2

    def test_ragged_matrix(self):
        with pytest.raises(DimensionError):
            Matrix(((1, 2), (3,)))

    def test_shift_dimension(self):
        with pytest.raises(DimensionError):
            as_shift((1, 2), 3)
        assert TargetShift.zero(2).is_zero


class TestScaledPow2:
    def test_integral_exponent_folds(self):
        assert ScaledPow2(3, 2) == 12

    def test_exact_comparison_with_rational_exponent(self):
        # 2^(1/2) lies strictly between 1.414 and 1.415
        r = ScaledPow2(1, F(1, 2))
        assert ScaledPow2(F(1414, 1000)) < r < ScaledPow2(F(1415, 1000))

    @given(st.fractions(min_value=-20, max_value=20, max_denominator=12),
           st.fractions(min_value=-20, max_value=20, max_denominator=12))
    def test_order_matches_exponent_order(self, a, b):
        assert (ScaledPow2(1, a) < ScaledPow2(1, b)) == (a < b)
