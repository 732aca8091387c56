"""Number formatting and structural equality."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from statbench.values import fmt_number, values_equal


class TestFmtNumber:
    def test_integral_floats_drop_the_point(self):
        assert fmt_number(0.0) == "0"
        assert fmt_number(4.0) == "4"
        assert fmt_number(-12.0) == "-12"

    def test_ints_pass_through(self):
        assert fmt_number(7) == "7"

    def test_shortest_round_trip(self):
        assert fmt_number(0.1) == "0.1"
        assert fmt_number(1 / 3) == "0.3333333333333333"

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            fmt_number(math.inf)
        with pytest.raises(ValueError):
            fmt_number(math.nan)

    def test_bool_rejected(self):
        with pytest.raises(TypeError):
            fmt_number(True)

    @given(st.floats(allow_nan=False, allow_infinity=False, width=64))
    @settings(max_examples=300, deadline=None)
    def test_parse_back_equal(self, x):
        assert float(fmt_number(x)) == x


class TestValuesEqual:
    def test_scalars_are_type_strict(self):
        assert not values_equal(1, 1.0)
        assert not values_equal(True, 1)
        assert values_equal(True, True)
        assert values_equal("a", "a")
        assert not values_equal("a", "b")

    def test_floats_compare_bitwise(self):
        assert values_equal(0.1 + 0.2, 0.1 + 0.2)
        assert not values_equal(0.1 + 0.2, 0.3)
        assert values_equal(math.nan, math.nan)
        assert not values_equal(0.0, -0.0)

    def test_containers_recurse(self):
        assert values_equal({"a": [1.0, (2, "x")]}, {"a": [1.0, (2, "x")]})
        assert not values_equal([1.0], (1.0,))
        assert not values_equal({"a": 1}, {"b": 1})
        assert not values_equal([1, 2], [1, 2, 3])

    def test_none_and_identity(self):
        assert values_equal(None, None)
        assert not values_equal(None, 0)
