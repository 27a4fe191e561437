import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from majorant.arith import FunctionTable, SieveBasis, delta_basis, indicator_basis, restricted_divisor
from majorant.correlate import kernel_expansion, symmetry_integral, trivial_bound
from majorant.expsum import minimal_mean_value
from majorant.verify import (
    NOT_APPLICABLE,
    BoundFit,
    corollary_bound_check,
    divisor_setup,
    fit_bound,
    h_for,
    lemma0_check,
    lemma1_check,
    lemma2_check,
    random_sign_table,
    random_table,
    scaling_experiment,
    positivity_bound_check,
    spectral_form_check,
    star_identity_check,
    theorem_bound_check,
)
from majorant.window import dft_weight, weight


def ones(n, mean_value=0):
    return FunctionTable.from_values(np.ones(n, dtype=np.int64), mean_value)


# -- Lemma 0 -----------------------------------------------------------------

def test_lemma0_ones_by_counting():
    N, h, a = 100, 5, 3
    rep = lemma0_check(ones(N), ones(N), N, h, a)
    # 2h < n < N-h and 2h < n-a < N-h  ->  13 < n < 95
    assert rep.lhs == len(range(14, 95)) == 81
    assert rep.rhs == N - 2 * a
    assert rep.residual == -13
    assert rep.passed and rep.budget == 8 * h


def test_lemma0_spike_outside_both_ranges():
    N, h = 100, 5
    vals = np.zeros(N, dtype=np.int64)
    vals[N - 1] = 1  # f2(N) = 1 lies in neither sum
    rep = lemma0_check(ones(N), FunctionTable.from_values(vals), N, h, 2)
    assert rep.lhs == rep.rhs == 0 and rep.residual == 0


@pytest.mark.parametrize("a", [-10, -9, 9, 10])
def test_lemma0_extreme_lags_within_budget(a):
    rng = np.random.default_rng(abs(a))
    N, h = 300, 5
    rep = lemma0_check(random_table(rng, N), random_table(rng, N), N, h, a)
    assert rep.passed


def test_lemma0_rejects_bad_lag():
    with pytest.raises(ValueError):
        lemma0_check(ones(50), ones(50), 50, 4, 0)
    with pytest.raises(ValueError):
        lemma0_check(ones(50), ones(50), 50, 4, 9)


# -- Lemma 1 -----------------------------------------------------------------

def test_lemma1_random_signs():
    rng = np.random.default_rng(2024)
    N, h = 500, 8
    for _ in range(20):
        rep = lemma1_check(random_sign_table(rng, N + h), random_sign_table(rng, N + h), N, h)
        assert abs(rep.residual) <= 40 * h**3


@pytest.mark.parametrize("h", [3, 8, 20])
def test_lemma1_ones_closed_form(h):
    N = 50 * h
    rep = lemma1_check(ones(N + h), ones(N + h), N, h)
    moment = sum(weight(a, h) * abs(a) for a in range(-2 * h, 2 * h + 1))
    assert rep.lhs == 0
    assert rep.rhs == -2 * moment
    assert rep.residual == 2 * moment
    # the residual is a fixed multiple of h^3, approaching 8/3 from above
    assert 8 / 3 <= rep.ratio <= 3


def test_lemma1_h1_residual_is_boundary_only():
    rng = np.random.default_rng(11)
    N, h = 200, 1
    f1, f2 = random_table(rng, N + h), random_table(rng, N + h)
    rep = lemma1_check(f1, f2, N, h)
    assert rep.lhs == kernel_expansion(f1, f2, N, h)
    # interior pairs carry kernel W(m-n): only strips of width 2h at each end differ
    assert abs(rep.residual) <= 8 * 4 * h * h * 3 * 3


def test_lemma1_residual_exact_on_integers():
    rng = np.random.default_rng(5)
    rep = lemma1_check(random_table(rng, 310), random_table(rng, 310), 300, 10)
    assert isinstance(rep.residual, int)
    assert rep.residual == rep.lhs - rep.rhs


# -- identity (*) ------------------------------------------------------------

def brute_star_rhs(f, g, N, h):
    """Main term and both corrections, term by term over n and lags."""
    lags = range(-2 * h, 2 * h + 1)
    fe = lambda n: f.mean_value if n == 0 else f[abs(n)]
    main = sum(
        weight(a, h) * gq * fe(n) for a in lags for q, gq in g.items() for n in range(0, N + 1) if (n - a) % q == 0
    )
    gsum = sum(gq for _, gq in g.items())
    c1 = gsum * sum(weight(a, h) * f[a] for a in range(1, 2 * h + 1))
    c2 = f.mean_value * sum(weight(a, h) * gq for a in lags for q, gq in g.items() if a % q == 0)
    return main - c1 - c2


def test_star_delta1_ones():
    N, h = 200, 6
    rep = star_identity_check(ones(N + h), delta_basis(), N, h)
    assert rep.lhs == 0
    assert rep.rhs == brute_star_rhs(ones(N + h), delta_basis(), N, h)
    assert rep.passed


def test_star_indicator_gives_dQ_integral():
    from majorant.correlate import mixed_symmetry_integral

    N, h, Q = 300, 5, 12
    f = restricted_divisor(N + h, Q).with_mean_value(2)
    rep = star_identity_check(f, indicator_basis(Q), N, h)
    assert rep.lhs == mixed_symmetry_integral(f, restricted_divisor(N + h, Q), N, h).value


@pytest.mark.parametrize("seed", range(4))
def test_star_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    N, h = 120, 3
    g = SieveBasis.from_values(rng.integers(-2, 3, size=8, dtype=np.int64))
    f = random_table(rng, N + h, mean_value=int(rng.integers(0, 4)))
    rep = star_identity_check(f, g, N, h)
    assert rep.rhs == brute_star_rhs(f, g, N, h)
    assert rep.residual == rep.lhs - rep.rhs


def test_star_support_guard():
    with pytest.raises(ValueError):
        star_identity_check(ones(60), indicator_basis(100), 50, 4)


# -- spectral form -----------------------------------------------------------

def brute_spectral_lhs(f, g, N, h):
    fe = lambda n: f.mean_value if n == 0 else f[abs(n)]
    return sum(
        weight(a, h) * gq * fe(n)
        for a in range(-2 * h, 2 * h + 1)
        for q, gq in g.items()
        for n in range(-N, N + 1)
        if (n - a) % q == 0
    )


def brute_spectral_rhs(f, g, N, h):
    fe = lambda n: f.mean_value if n == 0 else f[abs(n)]
    total = 0.0
    for q, gq in g.items():
        for j in range(q):
            T = sum(fe(n) * np.exp(-2j * np.pi * n * j / q) for n in range(-N, N + 1))
            total += gq / q * dft_weight(Fraction(j, q), h) * T.real
    return total


def test_spectral_delta1():
    f = ones(100, mean_value=3)
    rep = spectral_form_check(f, delta_basis(), 100, 4)
    assert rep.lhs == 0
    assert rep.rhs == pytest.approx(0, abs=1e-9)


def test_spectral_single_modulus_two():
    N, h = 80, 4
    f = restricted_divisor(N, 9).with_mean_value(1)
    g = SieveBasis.from_values(np.array([0, 1], dtype=np.int64))
    rep = spectral_form_check(f, g, N, h)
    assert rep.lhs == brute_spectral_lhs(f, g, N, h)
    # j = 0 drops out (W-hat(0) = 0); j = 1 weights the alternating sum
    alt = f.mean_value + 2 * sum((-1) ** n * f[n] for n in range(1, N + 1))
    assert rep.rhs == pytest.approx(0.5 * dft_weight(Fraction(1, 2), h) * alt, rel=1e-12)
    assert rep.passed


@pytest.mark.parametrize("seed", range(3))
def test_spectral_random_small_brute_force(seed):
    rng = np.random.default_rng(seed)
    N, h = 50, 3
    g = SieveBasis.from_values(rng.integers(-3, 4, size=5, dtype=np.int64))
    f = random_table(rng, N + h, mean_value=1)
    rep = spectral_form_check(f, g, N, h)
    assert rep.lhs == brute_spectral_lhs(f, g, N, h)
    assert rep.rhs == pytest.approx(brute_spectral_rhs(f, g, N, h), rel=1e-8, abs=1e-8)
    assert abs(rep.residual) <= 1e-8 * max(1.0, abs(rep.lhs))


def test_spectral_one_sided_variant():
    rng = np.random.default_rng(8)
    N, h = 200, 5
    f = random_table(rng, N + h, mean_value=2)
    rep = spectral_form_check(f, indicator_basis(7), N, h, two_sided=False)
    assert rep.passed


# -- Lemma 2 -----------------------------------------------------------------

def positive_dQ(N, Q):
    f, _ = divisor_setup(N, 1, Q)
    return f


def test_lemma2_indicator_equal_sides():
    N, Q, h = 500, 20, 4
    rep = lemma2_check(indicator_basis(Q), positive_dQ(N, Q), N, h, Q)
    assert rep.passed and rep.gmax == 1
    assert rep.lhs == pytest.approx(rep.rhs, rel=1e-12)


def test_lemma2_scaled_indicator():
    N, Q, h = 500, 20, 4
    g = SieveBasis.from_values(np.full(Q, 2, dtype=np.int64))
    rep = lemma2_check(g, positive_dQ(N, Q), N, h, Q)
    assert rep.passed and rep.gmax == 2
    assert rep.lhs == pytest.approx(2 * rep.rhs, rel=1e-12)


def test_lemma2_mixed_signs():
    rng = np.random.default_rng(3)
    N, Q, h = 500, 20, 4
    f = positive_dQ(N, Q)
    g = SieveBasis.from_values(rng.choice(np.array([-1, 0, 1], dtype=np.int64), size=Q))
    rep = lemma2_check(g, f, N, h, Q)
    assert rep.passed
    assert abs(rep.lhs) <= rep.rhs
    assert all(t >= -1e-6 for _, _, t in rep.terms)


def test_lemma2_not_applicable_without_positivity():
    rng = np.random.default_rng(0)
    N, Q = 400, 15
    f = random_table(rng, N)
    rep = lemma2_check(indicator_basis(Q), f, N, 4, Q)
    assert rep.status == NOT_APPLICABLE and not rep.passed


# -- Theorem / Corollary -----------------------------------------------------

def test_theorem_zero_table():
    N, h, Q = 400, 5, 25
    f = FunctionTable.from_values(np.zeros(N + h, dtype=np.int64), mean_value=1)
    g = SieveBasis.from_values(np.zeros(1, dtype=np.int64))
    p = theorem_bound_check(f, g, N, h, Q)
    assert p.applicable and p.lhs == 0 and p.ratio == 0


def test_theorem_not_applicable_without_mean_value():
    N, Q = 2000, 50
    h = 6
    f = restricted_divisor(N + h, Q)
    p = theorem_bound_check(f, indicator_basis(Q), N, h, Q)
    assert p.status == NOT_APPLICABLE and math.isnan(p.ratio)


def test_theorem_pipeline_point():
    N = 10**4
    h = h_for(N, 0.3)
    Q = h * h
    f, g = divisor_setup(N, h, Q)
    p = theorem_bound_check(f, g, N, h, Q)
    assert p.applicable and 0 < p.ratio < math.inf


def test_theorem_rejects_mismatched_basis():
    N, h = 200, 4
    with pytest.raises(ValueError):
        theorem_bound_check(ones(N + h, 1), indicator_basis(3), N, h, 3)


def test_corollary_guards():
    f = ones(5000, 10)
    with pytest.raises(ValueError):
        corollary_bound_check(f, 4096, 64, 1000)
    with pytest.raises(ValueError):
        corollary_bound_check(f, 100, 10, 100)  # theta = 1/2


def test_corollary_point():
    N = 4096
    h = h_for(N, 0.3)
    Q = h * h
    f, _ = divisor_setup(N, h, Q)
    p = corollary_bound_check(f, N, h, Q)
    assert p.applicable and p.ratio > 0


def test_section4_records_both_mean_values():
    out = positivity_bound_check(indicator_basis(20), 1000, 4, 20)
    assert out["passes_positivity"]
    assert out["f0_minimal"] == minimal_mean_value(indicator_basis(20), 1000, 20).value
    assert out["f0_nominal"] == pytest.approx(20 * 1000**0.1)


def test_h_for_guards_float_roundoff():
    assert h_for(2**20, 0.4) == 256
    assert h_for(1000, 1 / 3) == 10


# -- scaling experiment ------------------------------------------------------

def test_scaling_needs_two_points():
    with pytest.raises(ValueError):
        scaling_experiment("dQ", 0.3, [1024])
    with pytest.raises(ValueError):
        scaling_experiment("dQ", 0.3, [2048, 1024])
    with pytest.raises(ValueError):
        scaling_experiment("dQ", 0.5, [1024, 2048])


def test_scaling_rows_and_trivial_estimate():
    fit, rows = scaling_experiment("dQ", 0.3, [1024, 2048, 4096])
    assert isinstance(fit, BoundFit) and fit.two_sided
    for r in rows:
        f = restricted_divisor(r["N"] + r["h"] - 1, r["Q"])
        assert r["I"] == symmetry_integral(f, r["N"], r["h"]).value
        assert r["I"] <= trivial_bound(f, r["N"], r["h"])


def test_scaling_custom_family():
    ident = lambda N, h: FunctionTable.from_values(np.arange(1, N + h, dtype=np.int64))
    fit, rows = scaling_experiment("custom", 0.3, [512, 1024, 2048], make_table=ident)
    assert all(r["I"] == (r["N"] - r["h"]) * r["h"] ** 4 for r in rows)
    assert fit.slope > 0.15 and not fit.passed


# -- fit_bound ---------------------------------------------------------------

def test_fit_recovers_power_law():
    xs = [2.0**k for k in range(10, 16)]
    fit = fit_bound(xs, [3 * x**0.25 for x in xs], claim_exponent=0.25)
    assert fit.slope == pytest.approx(0.25)
    assert fit.constant == pytest.approx(3)
    assert fit.passed
    assert not fit_bound(xs, [x**0.5 for x in xs]).passed


def test_fit_two_sided():
    xs = [2.0**k for k in range(5)]
    decay = [x**-0.3 for x in xs]
    assert fit_bound(xs, decay).passed
    assert not fit_bound(xs, decay, two_sided=True).passed


@settings(max_examples=30, deadline=None)
@given(st.permutations(list(range(6))))
def test_fit_order_free(perm):
    xs = [10.0 * (k + 1) for k in range(6)]
    ys = [1.0 + (k * 7919 % 5) for k in range(6)]
    base = fit_bound(xs, ys)
    shuffled = fit_bound([xs[i] for i in perm], [ys[i] for i in perm])
    assert shuffled.slope == pytest.approx(base.slope, abs=1e-12)


def test_fit_errors():
    with pytest.raises(ValueError):
        fit_bound([1.0], [1.0])
    with pytest.raises(ValueError):
        fit_bound([1.0, 1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        fit_bound([1.0, 2.0], [0.0, 1.0])
