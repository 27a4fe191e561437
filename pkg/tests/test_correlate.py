import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from majorant.arith import FunctionTable, restricted_divisor
from majorant.correlate import (
    correlation,
    correlation_all,
    correlation_all_fft,
    correlation_all_naive,
    kernel_expansion,
    mixed_symmetry_integral,
    signed_window_sum,
    symmetry_integral,
    trivial_bound,
    weighted_correlation_sum,
)
from majorant.window import weight, weight_table


def ones(n, mean_value=0):
    return FunctionTable.from_values(np.ones(n, dtype=np.int64), mean_value)


def ident(n):
    return FunctionTable.from_values(np.arange(1, n + 1, dtype=np.int64))


def rand_table(rng, n, lo=-3, hi=3):
    return FunctionTable.from_values(rng.integers(lo, hi + 1, size=n, dtype=np.int64))


def integrand(f, x, h):
    """The signed short sum straight from its definition."""
    lo, hi = int(np.ceil(x - h)), int(np.floor(x + h))
    return sum(f[n] * np.sign(n - x) for n in range(max(lo, 1), hi + 1))


def test_correlation_examples():
    N = 50
    f = ones(N)
    for a in (1, -4, 10):
        assert correlation(f, f, a, N) == N - 2 * abs(a)
    assert correlation(f, f, 0, N) == N
    assert correlation(f, f, 25, N) == 0
    assert correlation(f, f, -30, N) == 0


def test_correlation_brute_force():
    rng = np.random.default_rng(0)
    N = 40
    f1, f2 = rand_table(rng, N), rand_table(rng, N)
    for a in range(-10, 11):
        brute = sum(f1[n] * f2[n - a] for n in range(abs(a) + 1, N - abs(a) + 1))
        assert correlation(f1, f2, a, N) == brute


def test_correlation_table_too_short():
    with pytest.raises(IndexError):
        correlation(ones(10), ones(10), 1, 11)


def test_fft_and_naive_agree_exactly_on_integers():
    rng = np.random.default_rng(1)
    N, h = 700, 30
    f1, f2 = rand_table(rng, N), rand_table(rng, N)
    a = correlation_all_naive(f1, f2, N, h)
    b = correlation_all_fft(f1, f2, N, h)
    assert np.array_equal(np.asarray(a.values, dtype=np.int64), b.values)


def test_fft_and_naive_agree_on_reals():
    rng = np.random.default_rng(2)
    N, h = 2000, 50
    f1 = FunctionTable.from_values(rng.normal(size=N))
    f2 = FunctionTable.from_values(rng.normal(size=N))
    a = correlation_all_naive(f1, f2, N, h).values
    b = correlation_all_fft(f1, f2, N, h).values
    assert np.max(np.abs(a - b)) <= 1e-6 * np.max(np.abs(a))


def test_fft_handles_lags_past_half_range():
    f = ones(10)
    C = correlation_all(f, f, 10, 4)
    assert [C[a] for a in range(-8, 9)] == [max(10 - 2 * abs(a), 0) for a in range(-8, 9)]


def test_correlation_all_of_ones():
    N, h = 300, 20
    C = correlation_all(ones(N), ones(N), N, h)
    assert [C[a] for a in range(-2 * h, 2 * h + 1)] == [N - 2 * abs(a) for a in range(-2 * h, 2 * h + 1)]


def test_lag_symmetry_within_boundary_terms():
    rng = np.random.default_rng(3)
    N, h = 300, 10
    f1, f2 = rand_table(rng, N + h), rand_table(rng, N + h)
    C12 = correlation_all(f1, f2, N, h)
    C21 = correlation_all(f2, f1, N, h)
    m = f1.max_abs(N + h) * f2.max_abs(N + h)
    for a in range(-2 * h, 2 * h + 1):
        assert abs(C12[-a] - C21[a]) <= 2 * abs(a) * m


def test_signed_window_sum_examples():
    h = 4
    f = ones(50)
    assert all(signed_window_sum(f, k + 0.5, h) == 0 for k in range(h, 40))
    g = ident(50)
    assert all(signed_window_sum(g, k + 0.5, h) == h * h for k in range(h, 40))
    rng = np.random.default_rng(5)
    r = rand_table(rng, 30)
    assert all(signed_window_sum(r, k + 0.5, 1) == r[k + 1] - r[k] for k in range(1, 29))


def test_signed_window_sum_bounds():
    with pytest.raises(ValueError):
        signed_window_sum(ones(20), 5, 2)
    with pytest.raises(IndexError):
        signed_window_sum(ones(20), 1.5, 3)


@pytest.mark.parametrize("N,h", [(100, 3), (1000, 10), (5000, 40)])
def test_symmetry_integral_closed_forms(N, h):
    assert symmetry_integral(ones(N + h), N, h).value == 0
    assert symmetry_integral(ident(N + h), N, h).value == (N - h) * h**4


@pytest.mark.parametrize("N,h,seed", [(120, 4, 0), (300, 9, 1), (500, 12, 2)])
def test_symmetry_integral_against_quadrature(N, h, seed):
    rng = np.random.default_rng(seed)
    f = rand_table(rng, N + h)
    total = 0.0
    for k in range(h, N):
        val, _ = quad(lambda x: integrand(f, x, h) ** 2, k, k + 1)
        total += val
    exact = symmetry_integral(f, N, h).value
    assert exact == pytest.approx(total, rel=1e-8)


def test_symmetry_integral_exact_with_huge_values():
    # int64 would overflow in the square; the exact path must widen
    N, h = 60, 5
    vals = np.array([(n % 7 - 3) * 2**40 for n in range(1, N + h)], dtype=np.int64)
    f = FunctionTable.from_values(vals)
    brute = sum(int(signed_window_sum(f, k + 0.5, h)) ** 2 for k in range(h, N))
    assert symmetry_integral(f, N, h).value == brute


def test_mixed_integral_properties():
    rng = np.random.default_rng(7)
    N, h = 400, 8
    f1, f2 = rand_table(rng, N + h), rand_table(rng, N + h)
    I1 = symmetry_integral(f1, N, h).value
    I2 = symmetry_integral(f2, N, h).value
    I12 = mixed_symmetry_integral(f1, f2, N, h).value
    assert mixed_symmetry_integral(f1, f1, N, h).value == I1
    assert I12 * I12 <= I1 * I2
    assert mixed_symmetry_integral(f1, ones(N + h), N, h).value == 0


def test_weighted_sum_of_ones():
    N, h = 500, 7
    moment = sum(weight(a, h) * abs(a) for a in range(-2 * h, 2 * h + 1))
    assert weighted_correlation_sum(ones(N), ones(N), N, h) == -2 * moment


def test_weighted_sum_single_spike():
    vals = np.zeros(10, dtype=np.int64)
    vals[4] = 1  # f(5) = 1
    f = FunctionTable.from_values(vals)
    assert weighted_correlation_sum(f, f, 10, 1) == 2


def test_weighted_sum_methods_agree():
    rng = np.random.default_rng(9)
    N, h = 800, 15
    f1, f2 = rand_table(rng, N), rand_table(rng, N)
    assert weighted_correlation_sum(f1, f2, N, h, "fft") == weighted_correlation_sum(f1, f2, N, h, "naive")


@pytest.mark.parametrize("h", [1, 2, 5])
def test_kernel_expansion_identity(h):
    rng = np.random.default_rng(h)
    N = 150
    f1, f2 = rand_table(rng, N + h), rand_table(rng, N + h)
    assert kernel_expansion(f1, f2, N, h) == mixed_symmetry_integral(f1, f2, N, h).value


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_trivial_bound(h, seed):
    rng = np.random.default_rng(seed)
    N = 20 * h
    f = rand_table(rng, N + h, -5, 5)
    I = symmetry_integral(f, N, h).value
    assert 0 <= I <= trivial_bound(f, N, h)


def test_dQ_weighted_sum_matches_table():
    N, h = 600, 6
    f = restricted_divisor(N + h, 40)
    W = weight_table(h)
    C = correlation_all(f, f, N, h, "naive")
    assert weighted_correlation_sum(f, f, N, h) == sum(int(W[i]) * C[a] for i, a in enumerate(range(-2 * h, 2 * h + 1)))
