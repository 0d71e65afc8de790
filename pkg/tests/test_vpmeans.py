from fractions import Fraction

import numpy as np
import pytest

from vpwalsh.dyadic import DyadicPoint
from vpwalsh.errors import PreconditionError
from vpwalsh.vpmeans import (
    cesaro_maximal,
    domination_report,
    vp_maximal,
    vp_mean,
    vp_mean_curve,
    weak_type_experiment,
    weak_type_profile,
    weak_type_sup,
)
from vpwalsh.walsh import GridFunction, forward_fwht, inverse_fwht, random_grid
from vpwalsh.windows import WindowSequence

from test_walsh import partial_sum_oracle

FULL = WindowSequence.proportional(Fraction(1))  # lambda_n = n
HALF = WindowSequence.proportional(Fraction(1, 2))
ROOT = WindowSequence.root(Fraction(1, 2))


def vp_mean_oracle(f, window, n, x):
    lam = window.value(n)
    total = sum(partial_sum_oracle(f, k, x) for k in range(n - lam, n + 1))
    return Fraction(total, lam + 1)


class TestVpMean:
    def test_constant_function_small_order(self):
        f = GridFunction.constant(1, 3)
        r = vp_mean(f, FULL, 2, DyadicPoint(0, 0))
        assert r.value == Fraction(2, 3)  # (S_0 + S_1 + S_2)/3 = (0 + 1 + 1)/3
        assert r.window == 2 and not r.clamped

    def test_window_past_degree_reproduces_polynomial(self):
        # degree < 4 polynomial; any window with n - lambda_n >= 4 gives f back
        M = 4
        coeffs = [2, -1, 3, 5] + [0] * 12
        f = inverse_fwht(forward_fwht(random_grid(M, "exact", 1)).__class__.from_coeffs(coeffs))
        for n in (8, 12, 16):
            lam = HALF.value(n)
            assert n - lam >= 4
            for i in range(1 << M):
                x = DyadicPoint(i, M)
                assert vp_mean(f, HALF, n, x).value == f.value_at(x)

    def test_matches_oracle(self):
        M = 4
        f = random_grid(M, "exact", seed=2)
        for n in (1, 2, 5, 11, 16):
            for i in range(0, 1 << M, 3):
                x = DyadicPoint(i, M)
                assert vp_mean(f, ROOT, n, x).value == vp_mean_oracle(f, ROOT, n, x)

    def test_exact_convergence_identity_quantified(self):
        # every polynomial of degree < d is reproduced exactly by every mean
        # whose window starts at or past d, at every cell
        from vpwalsh.walsh import SpectrumVector

        M, d = 5, 6
        coeffs = list(random_grid(3, "exact", seed=77).values)[:d] + [Fraction(0)] * (
            (1 << M) - d
        )
        f = inverse_fwht(SpectrumVector.from_coeffs(coeffs))
        rows = vp_mean_curve(f, HALF, 1 << M)
        hits = 0
        for n in range(1, (1 << M) + 1):
            if n - HALF.value(n) >= d:
                hits += 1
                assert list(rows[n]) == list(f.values)
        assert hits > 0

    def test_clamped_flag(self):
        f = random_grid(3, "exact", seed=3)
        r = vp_mean(f, FULL, 20, DyadicPoint(0, 3))
        assert r.clamped and r.value != 0 or r.clamped

    def test_invalid_table_window_reports_n(self):
        w = WindowSequence.table([1, 2])
        f = random_grid(3, "exact", seed=4)
        with pytest.raises(PreconditionError, match="3"):
            vp_mean(f, w, 3, DyadicPoint(0, 3))


class TestVpCurve:
    @pytest.mark.parametrize("M", [5, 6])
    def test_matches_per_point_oracle_exhaustive(self, M):
        f = random_grid(M, "exact", seed=5)
        rows = vp_mean_curve(f, ROOT, 1 << M)
        for n in range(1, (1 << M) + 1):
            for i in range(1 << M):
                assert rows[n][i] == vp_mean_oracle(f, ROOT, n, DyadicPoint(i, M))

    def test_row_past_degree_equals_f(self):
        M = 4
        f = random_grid(M, "exact", seed=6)
        rows = vp_mean_curve(f, HALF, 1 << M)
        # n = 16: window starts at 8 < 16 = degree bound; no row past degree for
        # generic f, so check with a low-degree function instead
        coeffs = [1, 2, 0, -3] + [0] * 12
        from vpwalsh.walsh import SpectrumVector

        g = inverse_fwht(SpectrumVector.from_coeffs(coeffs))
        rows = vp_mean_curve(g, HALF, 1 << M)
        for n in (8, 12, 16):
            assert list(rows[n]) == list(g.values)

    def test_zero_function(self):
        f = GridFunction.constant(0, 4)
        rows = vp_mean_curve(f, ROOT, 16)
        assert all(all(v == 0 for v in row) for row in rows)

    def test_float_mode_agrees_with_exact(self):
        M = 4
        fe = random_grid(M, "exact", seed=7)
        ff = GridFunction.from_values([float(v) for v in fe.values], "float")
        re_, rf = vp_mean_curve(fe, ROOT, 16), vp_mean_curve(ff, ROOT, 16)
        for n in range(1, 17):
            assert np.allclose([float(v) for v in re_[n]], rf[n], rtol=1e-12, atol=1e-12)


class TestMaximalOperators:
    def test_cesaro_on_constant(self):
        f = GridFunction.constant(1, 3)  # S_k = 1 for k >= 1
        star = cesaro_maximal(f)
        assert all(v == 1 for v in star.values)

    def test_cesaro_zero(self):
        assert all(v == 0 for v in cesaro_maximal(GridFunction.constant(0, 3)).values)

    def test_cesaro_monotone_in_order_cap(self):
        f = random_grid(4, "exact", seed=31)
        prev = None
        for n_max in (1, 2, 4, 8, 16):
            star = cesaro_maximal(f, n_max)
            if prev is not None:
                assert all(b >= a for a, b in zip(prev.values, star.values))
            prev = star

    def test_cesaro_matches_triple_loop_oracle(self):
        M = 5
        f = random_grid(M, "exact", seed=8)
        star = cesaro_maximal(f)
        for i in range(1 << M):
            x = DyadicPoint(i, M)
            best = max(
                Fraction(
                    sum(abs(partial_sum_oracle(f, k, x)) for k in range(1, n + 1)), n
                )
                for n in range(1, (1 << M) + 1)
            )
            assert star.values[i] == best

    def test_vp_maximal_on_constant_full_window(self):
        f = GridFunction.constant(1, 3)
        big = vp_maximal(f, FULL, 8)
        assert all(v == Fraction(8, 9) for v in big.values)  # max_n n/(n+1), n <= 8

    def test_vp_maximal_matches_oracle(self):
        M = 4
        f = random_grid(M, "exact", seed=9)
        big = vp_maximal(f, ROOT)
        for i in range(1 << M):
            x = DyadicPoint(i, M)
            best = max(abs(vp_mean_oracle(f, ROOT, n, x)) for n in range(1, (1 << M) + 1))
            assert big.values[i] == best

    def test_vp_maximal_beyond_grid_orders(self):
        # orders past 2^M use clamped partial sums; the oracle clamps the same way
        M = 3
        f = random_grid(M, "exact", seed=10)
        big64 = vp_maximal(f, HALF, 64)
        for i in range(1 << M):
            x = DyadicPoint(i, M)
            best = max(abs(vp_mean_oracle(f, HALF, n, x)) for n in range(1, 65))
            assert big64.values[i] == best

    def test_domination_by_cesaro(self):
        # |V_n| averages |S_k| over a window inside [0, n], so C = 1/theta + 1 works
        for seed in (11, 12):
            f = random_grid(5, "exact", seed=seed)
            rep = domination_report(f, HALF, Fraction(1, 2))
            assert rep["n0"] == 1 and rep["constant"] == 3
            assert rep["holds"]


class TestWeakType:
    def test_profile_trivial_cases(self):
        g = GridFunction.constant(1, 3)
        assert weak_type_profile(g, [2]) == [(Fraction(2), Fraction(0))]
        assert weak_type_profile(g, [Fraction(1, 2)]) == [
            (Fraction(1, 2), Fraction(1, 2))
        ]

    def test_profile_requires_nonnegative(self):
        g = GridFunction.from_values([1, -1])
        with pytest.raises(PreconditionError):
            weak_type_profile(g, [1])

    def test_sup_exact(self):
        g = GridFunction.from_values([0, 1, 2, 4])
        # candidates: 1 * 3/4, 2 * 2/4, 4 * 1/4
        assert weak_type_sup(g) == 1

    def test_sup_dominates_profile(self):
        g = GridFunction.from_values([Fraction(k % 7, 3) for k in range(16)])
        sup = weak_type_sup(g)
        for t, tm in weak_type_profile(g, [Fraction(1, 10), 1, 2]):
            assert tm <= sup

    def test_experiment_reproducible(self):
        a = weak_type_experiment(3, 6, seed=99)
        b = weak_type_experiment(3, 6, seed=99)
        assert a["per_function"] == b["per_function"]
        assert a["max_constant"] > 0
