"""Identity checks and growth-trend fits for the majorant-principle bounds.

Each identity check returns an :class:`IdentityReport` with both sides
computed independently and the residual exact on integer tables.  The
asymptotic claims carry no constants, so they are tested as log-log slopes
of measured ratios over a grid (:class:`BoundFit`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import (
    FunctionTable,
    SieveBasis,
    dirichlet_convolve,
    exact_dot,
    indicator_basis,
    restricted_divisor,
)
from .correlate import (
    correlation,
    mixed_symmetry_integral,
    symmetry_integral,
    weighted_correlation_sum,
)
from .expsum import check_nonneg_farey, exp_sum, farey_enumerate, minimal_mean_value
from .window import dft_weight, weight_table

__all__ = [
    "IdentityReport",
    "BoundFit",
    "BoundPoint",
    "Lemma2Report",
    "NOT_APPLICABLE",
    "fit_bound",
    "random_table",
    "random_sign_table",
    "lemma0_check",
    "lemma1_check",
    "star_identity_check",
    "spectral_form_check",
    "lemma2_check",
    "theorem_bound_check",
    "corollary_bound_check",
    "positivity_bound_check",
    "scaling_experiment",
    "bound_grid",
    "divisor_setup",
    "h_for",
]

NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class IdentityReport:
    lhs: float
    rhs: float
    residual: float
    budget: float

    @property
    def ratio(self) -> float:
        if self.budget == 0:
            return 0.0 if self.residual == 0 else math.inf
        return abs(self.residual) / self.budget

    @property
    def passed(self) -> bool:
        return abs(self.residual) <= self.budget


def _report(lhs, rhs, budget) -> IdentityReport:
    return IdentityReport(lhs, rhs, lhs - rhs, budget)


@dataclass(frozen=True)
class BoundFit:
    xs: tuple
    ys: tuple
    slope: float
    constant: float
    claim_exponent: float
    tolerance: float
    two_sided: bool = False

    @property
    def passed(self) -> bool:
        excess = self.slope - self.claim_exponent
        if self.two_sided:
            return abs(excess) <= self.tolerance
        return excess <= self.tolerance


def fit_bound(xs, ys, claim_exponent: float = 0.0, tolerance: float = 0.15, two_sided: bool = False) -> BoundFit:
    """Least-squares slope of log y against log x.

    ``constant`` is max y / x**claim_exponent, the implied constant at the
    claimed exponent.  Point order is irrelevant: pairs are sorted by x.
    """
    pairs = sorted(zip((float(x) for x in xs), (float(y) for y in ys)))
    if len(pairs) < 2:
        raise ValueError("a slope needs at least two grid points")
    x = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    if np.any(np.diff(x) <= 0):
        raise ValueError("grid values must be distinct")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs positive xs and ys")
    slope = float(np.polyfit(np.log(x), np.log(y), 1)[0])
    constant = float(np.max(y / x**claim_exponent))
    return BoundFit(tuple(x), tuple(y), slope, constant, claim_exponent, tolerance, two_sided)


def random_table(rng: np.random.Generator, n_max: int, low: int = -3, high: int = 3, mean_value=0) -> FunctionTable:
    return FunctionTable.from_values(rng.integers(low, high + 1, size=n_max, dtype=np.int64), mean_value)


def random_sign_table(rng: np.random.Generator, n_max: int) -> FunctionTable:
    return FunctionTable.from_values(rng.choice(np.array([-1, 1], dtype=np.int64), size=n_max))


# -- Lemma 0 / Lemma 1 ------------------------------------------------------

def lemma0_check(f1: FunctionTable, f2: FunctionTable, N: int, h: int, a: int) -> IdentityReport:
    """Interior-trimmed correlation sum against C_{f1,f2}(a); budget 8 h max|f1| max|f2|."""
    if a == 0 or abs(a) > 2 * h:
        raise ValueError("lag must satisfy 0 < |a| <= 2h")
    lo = max(2 * h + 1, 2 * h + 1 + a)
    hi = min(N - h - 1, N - h - 1 + a)
    if hi >= lo:
        lhs = exact_dot(f1.segment(lo, hi), f2.segment(lo - a, hi - a))
    else:
        lhs = 0
    rhs = correlation(f1, f2, a, N)
    budget = 8 * h * f1.max_abs(N) * f2.max_abs(N)
    return _report(lhs, rhs, budget)


def lemma1_check(f1: FunctionTable, f2: FunctionTable, N: int, h: int) -> IdentityReport:
    lhs = mixed_symmetry_integral(f1, f2, N, h).value
    rhs = weighted_correlation_sum(f1, f2, N, h)
    top = N + h - 1
    budget = h**3 * f1.max_abs(top) * f2.max_abs(top)
    return _report(lhs, rhs, budget)


# -- identity (*) and its spectral form -------------------------------------

def _extended(f: FunctionTable, N: int, two_sided: bool) -> tuple[np.ndarray, np.ndarray]:
    """(n, f(|n|)) over 0 <= n <= N or 0 <= |n| <= N, with f(0) the mean value."""
    f.require(N)
    mv = f.mean_value
    exact = f.exact and float(mv).is_integer()
    vals = f.values[: N + 1].astype(np.int64 if exact else np.float64)
    vals[0] = int(mv) if exact else float(mv)
    n = np.arange(N + 1, dtype=np.int64)
    if two_sided:
        n = np.concatenate((-n[:0:-1], n))
        vals = np.concatenate((vals[:0:-1], vals))
    return n, vals


def _residue_sums(n: np.ndarray, vals: np.ndarray, q: int) -> np.ndarray:
    """R(r) = sum of vals over n = r (mod q), exact for integer vals."""
    r = n % q
    if vals.dtype.kind in "iu":
        out = np.zeros(q, dtype=np.int64)
        np.add.at(out, r, vals)
        return out
    return np.bincount(r, weights=vals, minlength=q)


def _residue_main_term(f: FunctionTable, g: SieveBasis, N: int, h: int, two_sided: bool):
    """sum_a W(a) sum_q g(q) sum_{n = a (mod q)} f(n), n over the chosen range."""
    n, vals = _extended(f, N, two_sided)
    W = weight_table(h)
    lags = np.arange(-2 * h, 2 * h + 1)
    total = 0
    for q, gq in g.items():
        R = _residue_sums(n, vals, q)
        total += gq * exact_dot(W, R[lags % q])
    return total


def star_identity_check(f: FunctionTable, g: SieveBasis, N: int, h: int) -> IdentityReport:
    """I_{f, g*1}(N, h) against the residue-class main term minus its two corrections.

    The main term runs over 0 <= n <= N; the corrections remove the n = a
    diagonal, (sum g)(sum_{a>0} W(a) f(a)), and the n = 0 term,
    f(0) sum_a W(a) sum_{q | a} g(q).  Budget h^3 + f(0)h^2 + M h f(0) + M h^2.
    """
    M = g.support_max
    top = N + h - 1
    if M > top:
        raise ValueError(f"basis support {M} exceeds table range {top}")
    f.require(top)
    f2 = dirichlet_convolve(g, top)
    lhs = mixed_symmetry_integral(f, f2, N, h).value
    main = _residue_main_term(f, g, N, h, two_sided=False)
    W = weight_table(h)
    gsum = sum(gq for _, gq in g.items())
    pos = W[2 * h + 1 :]
    corr1 = gsum * exact_dot(pos, f.segment(1, 2 * h))
    f0 = f.mean_value
    div_w = 0
    a = np.arange(-2 * h, 2 * h + 1)
    for q, gq in g.items():
        div_w += gq * int(np.sum(W[a % q == 0], dtype=np.int64))
    corr2 = f0 * div_w
    rhs = main - corr1 - corr2
    budget = h**3 + f0 * h**2 + M * h * f0 + M * h**2
    return _report(lhs, rhs, budget)


def spectral_form_check(
    f: FunctionTable, g: SieveBasis, N: int, h: int, two_sided: bool = True, rel_tol: float = 1e-6
) -> IdentityReport:
    """Residue main term against sum_q g(q)/q sum_{j mod q} W-hat(j/q) T(-j/q).

    T is the two-sided sum over 0 <= |n| <= N (f(0) counted once) or, with
    ``two_sided=False``, the real part of the one-sided sum over 0 <= n <= N.
    Both identities are exact; the budget is ``rel_tol`` times the sum of
    absolute values of the terms, so it measures trig round-off only.
    """
    lhs = _residue_main_term(f, g, N, h, two_sided)
    rhs = 0.0
    for q, gq in g.items():
        acc = 0.0
        for j in range(q):
            alpha = Fraction(-j, q)
            one = exp_sum(f, alpha, N)
            T = 2.0 * one - float(f.mean_value) if two_sided else one
            acc += dft_weight(Fraction(j, q), h) * T
        rhs += gq * acc / q
    W = weight_table(h)
    fabs = float(np.sum(np.abs(f.values[1 : N + 1])))
    mass = abs(float(f.mean_value)) + (2.0 if two_sided else 1.0) * fabs
    scale = float(np.sum(np.abs(W))) * sum(abs(gq) for _, gq in g.items()) * max(mass, 1.0)
    return _report(lhs, rhs, rel_tol * scale)


# -- Lemma 2 -----------------------------------------------------------------

@dataclass(frozen=True)
class Lemma2Report:
    lhs: float
    rhs: float
    gmax: float
    status: str  # "pass", "fail" or NOT_APPLICABLE
    terms: tuple = field(default=(), repr=False)  # (q, g(q), per-modulus term)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def lemma2_check(g: SieveBasis, f: FunctionTable, N: int, h: int, Q: int, rel_tol: float = 1e-9) -> Lemma2Report:
    """Termwise majorisation sum_q g(q) t_q against gmax * sum_q t_q.

    t_q = (1/q) sum_{j mod q} W-hat(j/q) Re S_f(-j/q) is nonnegative once
    Re S_f >= 0 on the Farey points and W-hat >= 0; that precondition is
    checked first and a violation gives NOT_APPLICABLE.
    """
    S = {}
    for p in farey_enumerate(Q):
        S[(p.j, p.q)] = exp_sum(f, p.value, N)
    scale = max(1.0, float(f.mean_value) + float(np.sum(np.abs(f.values[1 : N + 1]))))
    tol = rel_tol * scale
    gvals = [g[q] for q in range(1, Q + 1)]
    gmax = max(abs(v) for v in gvals)
    if min(S.values()) < -tol:
        return Lemma2Report(math.nan, math.nan, gmax, NOT_APPLICABLE)
    terms = []
    for q in range(1, Q + 1):
        t = 0.0
        for j in range(q):
            d = math.gcd(j, q)
            jj, qq = (j // d, q // d) if j else (1, 1)
            t += dft_weight(Fraction(j, q), h) * S[(jj, qq)]
        terms.append((q, gvals[q - 1], t / q))
    lhs = sum(gq * t for _, gq, t in terms)
    rhs = sum(t for _, _, t in terms)
    wtol = tol * sum(abs(dft_weight(Fraction(j, q), h)) for q in range(1, Q + 1) for j in range(q))
    ok = all(abs(gq * t) <= gmax * t + wtol for _, gq, t in terms) and abs(lhs) <= gmax * rhs + wtol
    return Lemma2Report(lhs, rhs, gmax, "pass" if ok else "fail", tuple(terms))


# -- Theorem, Corollary and the positivity construction ----------------------

@dataclass(frozen=True)
class BoundPoint:
    N: int
    h: int
    Q: int
    lhs: float
    rhs: float
    f0: float
    status: str  # "ok" or NOT_APPLICABLE

    @property
    def ratio(self) -> float:
        if self.status != "ok":
            return math.nan
        if self.lhs == 0:
            return 0.0
        return self.lhs / self.rhs if self.rhs > 0 else math.inf

    @property
    def applicable(self) -> bool:
        return self.status == "ok"


def _check_basis(f: FunctionTable, g: SieveBasis, Q: int, top: int) -> None:
    if g.support_max > Q:
        raise ValueError(f"basis support {g.support_max} exceeds Q={Q}")
    built = dirichlet_convolve(g, top)
    if not np.array_equal(built.values[1 : top + 1], f.values[1 : top + 1]):
        if not np.allclose(built.values[1 : top + 1], f.values[1 : top + 1], rtol=1e-12, atol=1e-12):
            raise ValueError("f does not match g*1 on the working range")


def theorem_bound_check(f: FunctionTable, g: SieveBasis, N: int, h: int, Q: int) -> BoundPoint:
    """I_f / (I_{f,d_Q} + h^3 + f(0)h^2 + Q h f(0) + Q h^2), after the Farey positivity check."""
    top = N + h - 1
    _check_basis(f, g, Q, top)
    f0 = float(f.mean_value)
    if not check_nonneg_farey(f, Q, N).passed:
        return BoundPoint(N, h, Q, math.nan, math.nan, f0, NOT_APPLICABLE)
    dQ = restricted_divisor(top, Q)
    lhs = symmetry_integral(f, N, h).value
    rhs = mixed_symmetry_integral(f, dQ, N, h).value + h**3 + f0 * h**2 + Q * h * f0 + Q * h**2
    return BoundPoint(N, h, Q, lhs, rhs, f0, "ok")


def _corollary_guard(N: int, h: int, Q: int) -> None:
    if h * h > Q:
        raise ValueError(f"need h^2 <= Q, got h^2={h * h} > Q={Q}")
    if h > 1 and not math.log(h) / math.log(N) < 0.5:
        raise ValueError("need theta = log h / log N < 1/2")


def corollary_bound_check(f: FunctionTable, N: int, h: int, Q: int) -> BoundPoint:
    """I_f / (N h^{3/2} + Q h f(0) + Q h^2) under h^2 <= Q and theta < 1/2."""
    _corollary_guard(N, h, Q)
    f0 = float(f.mean_value)
    if not check_nonneg_farey(f, Q, N).passed:
        return BoundPoint(N, h, Q, math.nan, math.nan, f0, NOT_APPLICABLE)
    lhs = symmetry_integral(f, N, h).value
    rhs = N * h**1.5 + Q * h * f0 + Q * h**2
    return BoundPoint(N, h, Q, lhs, rhs, f0, "ok")


def positivity_bound_check(g: SieveBasis, N: int, h: int, Q: int, eps: float = 0.05) -> dict:
    """I_f / (I_{f,d_Q} + Q^2 h + Q h^2) for f = g*1 with f(0) the minimal admissible value.

    Also records the nominal choice f(0) = Q N^{2 eps} for comparison.
    """
    if not g.nonnegative and np.any(g.coeffs < 0):
        raise ValueError("the positivity construction needs g >= 0")
    top = N + h - 1
    choice = minimal_mean_value(g, N, Q)
    f = dirichlet_convolve(g, top).with_mean_value(choice.value)
    dQ = restricted_divisor(top, Q)
    lhs = symmetry_integral(f, N, h).value
    rhs = mixed_symmetry_integral(f, dQ, N, h).value + Q * Q * h + Q * h * h
    return {
        "N": N,
        "h": h,
        "Q": Q,
        "lhs": lhs,
        "rhs": rhs,
        "ratio": lhs / rhs if rhs > 0 else math.inf,
        "f0_minimal": choice.value,
        "f0_nominal": Q * N ** (2 * eps),
        "passes_positivity": check_nonneg_farey(f, Q, N).passed,
    }


def divisor_setup(N: int, h: int, Q: int, f0: str | float = "auto") -> tuple[FunctionTable, SieveBasis]:
    """f = d_Q on 1..N+h-1 with g = 1_[1,Q]; f(0) minimal ("auto") or given."""
    g = indicator_basis(Q)
    f = restricted_divisor(N + h - 1, Q)
    if f0 == "auto":
        f0 = minimal_mean_value(g, N, Q).value
    return f.with_mean_value(f0), g


def h_for(N: int, theta: float) -> int:
    # guard against N**theta landing a hair under an integer
    return int(math.floor(N**theta + 1e-9))


def bound_grid(kind: str, theta: float, N_grid, tolerance: float = 0.15) -> tuple[BoundFit | None, list[BoundPoint]]:
    """Theorem or Corollary ratios over N_grid with h = floor(N^theta), Q = h^2.

    Returns (fit, points); fit is None when any point is not applicable.
    """
    points = []
    for N in N_grid:
        h = h_for(N, theta)
        Q = h * h
        f, g = divisor_setup(N, h, Q)
        if kind == "theorem":
            points.append(theorem_bound_check(f, g, N, h, Q))
        elif kind == "corollary":
            points.append(corollary_bound_check(f, N, h, Q))
        else:
            raise ValueError(f"unknown bound kind {kind!r}")
    if not all(p.applicable for p in points):
        return None, points
    fit = fit_bound([p.N for p in points], [p.ratio for p in points], 0.0, tolerance)
    return fit, points


def scaling_experiment(
    family: str, theta: float, N_grid, Q_of_h=None, make_table=None, tolerance: float = 0.15
) -> tuple[BoundFit, list[dict]]:
    """I_f(N, h) / (N h) with h = floor(N^theta), fitted against N.

    ``family="dQ"`` uses the restricted divisor function with Q = Q_of_h(h)
    (default h^2); ``family="custom"`` calls ``make_table(N, h)``.
    """
    N_grid = list(N_grid)
    if len(N_grid) < 2:
        raise ValueError("a slope needs at least two grid points")
    if any(b <= a for a, b in zip(N_grid, N_grid[1:])):
        raise ValueError("N_grid must be increasing")
    if not 0 < theta < 0.5:
        raise ValueError("theta must lie in (0, 1/2)")
    Q_of_h = Q_of_h or (lambda h: h * h)
    rows = []
    for N in N_grid:
        h = h_for(N, theta)
        if family == "dQ":
            Q = Q_of_h(h)
            f = restricted_divisor(N + h - 1, Q)
        elif family == "custom":
            Q = None
            f = make_table(N, h)
        else:
            raise ValueError(f"unknown family {family!r}")
        I = symmetry_integral(f, N, h).value
        rows.append({"N": N, "h": h, "Q": Q, "I": I, "ratio": I / (N * h)})
    fit = fit_bound([r["N"] for r in rows], [r["ratio"] for r in rows], 0.0, tolerance, two_sided=True)
    return fit, rows
