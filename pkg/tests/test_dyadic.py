from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vpwalsh.dyadic import DyadicPoint, binary_digits, dyadic_sum, rademacher, top_bit
from vpwalsh.errors import PreconditionError


def digits_oracle(n: int) -> tuple[int, ...]:
    # repeated division by two
    out = []
    while n:
        n, r = divmod(n, 2)
        out.append(r)
    return tuple(out)


def rademacher_oracle(j: int, x: DyadicPoint) -> int:
    floor_val = (2 ** (j + 1) * x.numerator) // (2**x.resolution)
    return (-1) ** floor_val


class TestBinaryDigits:
    def test_zero_is_empty(self):
        assert binary_digits(0) == ()

    def test_six(self):
        assert binary_digits(6) == digits_oracle(6) == (0, 1, 1)

    @pytest.mark.parametrize("k", [0, 1, 5, 40, 300])
    def test_power_of_two(self, k):
        digits = binary_digits(2**k)
        assert digits == (0,) * k + (1,)

    def test_round_trip_exhaustive(self):
        for n in range(1 << 16):
            digits = binary_digits(n)
            assert sum(d << j for j, d in enumerate(digits)) == n
            assert not digits or digits[-1] == 1  # no trailing zeros

    @given(st.integers(min_value=0, max_value=10**40))
    def test_matches_oracle(self, n):
        assert binary_digits(n) == digits_oracle(n)

    def test_rejects_negative(self):
        with pytest.raises(PreconditionError):
            binary_digits(-1)


class TestTopBit:
    def test_one(self):
        assert top_bit(1) == 0

    def test_twelve_via_digit_scan(self):
        digits = binary_digits(12)
        assert top_bit(12) == max(j for j, d in enumerate(digits) if d) == 3

    @pytest.mark.parametrize("k", [0, 1, 7, 100])
    def test_power_of_two(self, k):
        assert top_bit(2**k) == k

    @given(st.integers(min_value=1, max_value=10**30))
    def test_bracketing(self, n):
        t = top_bit(n)
        assert 2**t <= n < 2 ** (t + 1)

    def test_rejects_zero(self):
        with pytest.raises(PreconditionError):
            top_bit(0)


class TestDyadicSum:
    def test_self_annihilation(self):
        for n in (0, 1, 7, 12345):
            assert dyadic_sum(n, n) == 0

    def test_five_three(self):
        assert dyadic_sum(5, 3) == 6

    def test_identity_element(self):
        for n in (0, 9, 2**40):
            assert dyadic_sum(n, 0) == n

    def test_digitwise_definition_oracle(self):
        for n in range(128):
            for m in range(128):
                dn, dm = binary_digits(n), binary_digits(m)
                width = max(len(dn), len(dm))
                dn += (0,) * (width - len(dn))
                dm += (0,) * (width - len(dm))
                recombined = sum(abs(a - b) << j for j, (a, b) in enumerate(zip(dn, dm)))
                assert dyadic_sum(n, m) == recombined

    def test_group_law_exhaustive(self):
        # associativity and self-inverse for all n, m, p < 2^10
        a = np.arange(1 << 10, dtype=np.int64)
        nm = a[:, None] ^ a[None, :]
        assert (a[:, None] ^ nm).min() == 0  # n ^ (n ^ m) == m ...
        assert np.array_equal(a[:, None] ^ nm, np.broadcast_to(a[None, :], nm.shape))
        for p in range(1 << 10):
            assert np.array_equal(nm ^ p, a[:, None] ^ (a[None, :] ^ p))

    @given(st.integers(min_value=0, max_value=10**30), st.integers(min_value=0, max_value=10**30))
    def test_commutative(self, n, m):
        assert dyadic_sum(n, m) == dyadic_sum(m, n)


class TestDyadicPoint:
    def test_reduced_equality(self):
        assert DyadicPoint(1, 1) == DyadicPoint(2, 2)
        assert DyadicPoint(3, 3) != DyadicPoint(3, 4)
        assert hash(DyadicPoint(1, 1)) == hash(DyadicPoint(4, 3))

    def test_range_validation(self):
        with pytest.raises(PreconditionError):
            DyadicPoint(4, 2)
        with pytest.raises(PreconditionError):
            DyadicPoint(-1, 2)

    def test_as_fraction(self):
        assert DyadicPoint(3, 3).as_fraction() == Fraction(3, 8)

    def test_cell_index_both_directions(self):
        x = DyadicPoint(3, 3)  # 3/8
        assert x.cell_index(3) == 3
        assert x.cell_index(5) == 12
        assert x.cell_index(1) == 0


class TestRademacher:
    def test_at_zero(self):
        assert rademacher(0, DyadicPoint(0, 0)) == 1

    def test_three_eighths(self):
        assert rademacher(1, DyadicPoint(3, 3)) == -1

    def test_past_resolution_is_plus_one(self):
        x = DyadicPoint(5, 4)
        for j in range(4, 10):
            assert rademacher(j, x) == 1

    def test_matches_floor_formula(self):
        for M in range(0, 7):
            for k in range(1 << M):
                x = DyadicPoint(k, M)
                for j in range(0, 8):
                    assert rademacher(j, x) == rademacher_oracle(j, x)

    @pytest.mark.parametrize("j", [0, 1, 2, 3, 5])
    def test_half_of_intervals_positive(self, j):
        # exactly half of the 2^(j+1) dyadic intervals of length 2^-(j+1) carry +1
        res = j + 1
        values = [rademacher(j, DyadicPoint(i, res)) for i in range(1 << res)]
        assert values.count(1) == values.count(-1) == 1 << j

    def test_constant_on_cells(self):
        j = 2
        for i in range(8):  # cells of length 2^-3
            v = {rademacher(j, DyadicPoint(i * 4 + t, 5)) for t in range(4)}
            assert len(v) == 1
