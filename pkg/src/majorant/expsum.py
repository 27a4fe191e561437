"""Exponential sums of arithmetic functions at Farey fractions.

Two normalisations appear:

* ``exp_sum``: the one-sided real part  f(0) + sum_{1<=n<=N} f(n) cos(2 pi n alpha);
* the two-sided sum over 0 < |n| <= N of an evenly extended f, which is
  ``2 * (exp_sum - f(0))``.  Positivity is certified for  f(0) + two-sided,
  the form used when f(0) is chosen to make the sum nonnegative.

For f = g*1 the two-sided sum splits by divisor d into moduli divisible by
q (sigma1, plain counting) and the rest (sigma2, Dirichlet kernels).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import FunctionTable, SieveBasis, dirichlet_convolve

__all__ = [
    "FareyPoint",
    "SigmaSplit",
    "MeanValueChoice",
    "FareyReport",
    "exp_sum",
    "two_sided_sum",
    "farey_enumerate",
    "farey_count",
    "dist_to_int",
    "mod_inverse",
    "symmetric_geometric_sum",
    "sigma_split",
    "minimal_mean_value",
    "check_nonneg_farey",
    "residue_spectrum",
]


@dataclass(frozen=True, order=True)
class FareyPoint:
    j: int
    q: int

    def __post_init__(self):
        if not (1 <= self.j <= self.q and math.gcd(self.j, self.q) == 1):
            raise ValueError(f"{self.j}/{self.q} is not a reduced fraction in (0, 1]")

    @property
    def value(self) -> Fraction:
        return Fraction(self.j, self.q)

    def __str__(self):
        return f"{self.j}/{self.q}"


@dataclass(frozen=True)
class SigmaSplit:
    sigma1: float
    sigma2: float

    @property
    def total(self) -> float:
        return self.sigma1 + self.sigma2


@dataclass(frozen=True)
class MeanValueChoice:
    value: float
    argmin: FareyPoint
    min_total: float  # smallest two-sided sum over the Farey points, before f(0)


@dataclass(frozen=True)
class FareyReport:
    min_value: float
    argmin: FareyPoint
    passed: bool
    tolerance: float


def _as_fraction(alpha):
    if isinstance(alpha, FareyPoint):
        return alpha.value
    return alpha


def exp_sum(f: FunctionTable, alpha, N: int) -> float:
    """Re sum_{0<=n<=N} f(n) e(n alpha), with f(0) the table's mean value.

    Rational alpha has n*j reduced mod q before the cosine.
    """
    f.require(N)
    alpha = _as_fraction(alpha)
    n = np.arange(1, N + 1, dtype=np.int64)
    if isinstance(alpha, Fraction):
        q = alpha.denominator
        ph = ((n * (alpha.numerator % q)) % q) / q
    else:
        ph = np.mod(n * float(alpha), 1.0)
    vals = f.values[1 : N + 1].astype(float)
    return float(f.mean_value) + float(np.dot(vals, np.cos(2 * math.pi * ph)))


def two_sided_sum(f: FunctionTable, alpha, N: int) -> float:
    """sum over 0 < |n| <= N of f(|n|) e(n alpha), computed term by term."""
    return 2.0 * (exp_sum(f.with_mean_value(0), alpha, N))


def farey_enumerate(Q: int) -> list[FareyPoint]:
    """Reduced j/q in (0, 1], q <= Q, ascending (next-term recurrence)."""
    if Q < 1:
        raise ValueError("Q must be >= 1")
    out = []
    a, b, c, d = 0, 1, 1, Q
    while c <= d:
        out.append(FareyPoint(c, d))
        k = (Q + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
    return out


def farey_count(Q: int) -> int:
    """sum_{q<=Q} phi(q) by a totient sieve."""
    phi = np.arange(Q + 1, dtype=np.int64)
    for p in range(2, Q + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return int(phi[1:].sum())


def dist_to_int(alpha) -> float:
    return float(abs(alpha - round(alpha)))


def mod_inverse(j: int, q: int) -> int:
    """j-bar with j * j-bar = 1 (mod q)."""
    if q < 2:
        raise ValueError("modulus must be >= 2")
    if math.gcd(j, q) != 1:
        raise ValueError(f"{j} is not invertible mod {q}")
    return pow(j, -1, q)


def symmetric_geometric_sum(r, q: int, M) -> np.ndarray:
    """sum_{0<|m|<=M} e(m r/q) for integer r not divisible by q.

    Equals D_M(r/q) - 1 with the Dirichlet kernel
    D_M(t) = sin((2M+1) pi t) / sin(pi t).  Numerator phases are reduced
    mod 2q in integers.
    """
    r = np.asarray(r, dtype=np.int64) % q
    M = np.asarray(M, dtype=np.int64)
    num = ((2 * M + 1) * r) % (2 * q)
    return np.sin(math.pi * num / q) / np.sin(math.pi * r / q) - 1.0


def _check_support(g: SieveBasis, Q: int) -> None:
    if g.support_max > Q:
        raise ValueError(f"basis support {g.support_max} exceeds Q={Q}")


def sigma_split(g: SieveBasis, N: int, Q: int, point: FareyPoint) -> SigmaSplit:
    """Split sum_{0<|n|<=N} (g*1)(n) e(n j/q) by whether q divides d."""
    _check_support(g, Q)
    d = np.flatnonzero(g.coeffs)
    d = d[d <= N]
    gd = g.coeffs[d].astype(float)
    counts = N // d
    major = d % point.q == 0
    sigma1 = float(np.dot(gd[major], 2.0 * counts[major]))
    dm = d[~major]
    inner = symmetric_geometric_sum(dm * point.j, point.q, counts[~major])
    sigma2 = float(np.dot(gd[~major], inner))
    return SigmaSplit(sigma1, sigma2)


def _split_totals_for_q(g: SieveBasis, N: int, q: int, js: np.ndarray) -> np.ndarray:
    d = np.flatnonzero(g.coeffs)
    d = d[d <= N]
    gd = g.coeffs[d].astype(float)
    counts = N // d
    major = d % q == 0
    s1 = float(np.dot(gd[major], 2.0 * counts[major]))
    dm = d[~major]
    if len(dm) == 0:
        return np.full(len(js), s1)
    inner = symmetric_geometric_sum(np.outer(js, dm), q, counts[~major][None, :])
    return s1 + inner @ gd[~major]


def residue_spectrum(f: FunctionTable, N: int, q: int) -> np.ndarray:
    """sum_{1<=n<=N} f(n) e(n j/q) for j = 0..q-1, via residue classes and an FFT."""
    n = np.arange(1, N + 1, dtype=np.int64)
    F = np.bincount(n % q, weights=f.values[1 : N + 1].astype(float), minlength=q)
    # numpy's forward FFT uses e(-rj/q): conjugate to get e(+rj/q)
    return np.conj(np.fft.fft(F))


def _coprime(q: int) -> np.ndarray:
    j = np.arange(1, q + 1)
    return j[np.gcd(j, q) == 1]


def _farey_min_two_sided(total_for_q, Q: int):
    best, arg = math.inf, None
    for q in range(1, Q + 1):
        js = _coprime(q)
        t = total_for_q(q, js)
        i = int(np.argmin(t))
        if t[i] < best:
            best, arg = float(t[i]), FareyPoint(int(js[i]), q)
    return best, arg


def minimal_mean_value(g: SieveBasis, N: int, Q: int, method: str = "auto") -> MeanValueChoice:
    """Least f(0) >= 0 with f(0) + sigma1 + sigma2 >= 0 at every j/q, q <= Q.

    ``method="split"`` evaluates sigma1 + sigma2 per point, O(|F_Q| * M).
    ``method="residue"`` evaluates the same two-sided sum of f = g*1 from
    residue-class FFTs, O(Q * N); "auto" picks the cheaper.
    """
    _check_support(g, Q)
    if method == "auto":
        work_split = 0.3 * Q * Q * len(np.flatnonzero(g.coeffs))
        method = "split" if work_split <= Q * N else "residue"
    if method == "split":
        best, arg = _farey_min_two_sided(lambda q, js: _split_totals_for_q(g, N, q, js), Q)
    elif method == "residue":
        f = dirichlet_convolve(g, max(N, g.support_max))
        best, arg = _farey_min_two_sided(
            lambda q, js: 2.0 * residue_spectrum(f, N, q).real[js % q], Q
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    return MeanValueChoice(max(0.0, -best), arg, best)


def check_nonneg_farey(f: FunctionTable, Q: int, N: int, rel_tol: float = 1e-9) -> FareyReport:
    """Scan f(0) + sum_{0<|n|<=N} f(|n|) e(n j/q) over every j/q with q <= Q.

    Passes iff the minimum is >= -rel_tol * scale, scale = f(0) + 2 sum |f(n)|.
    """
    f.require(N)
    best, arg = _farey_min_two_sided(
        lambda q, js: 2.0 * residue_spectrum(f, N, q).real[js % q], Q
    )
    mv = float(f.mean_value)
    scale = max(1.0, mv + 2.0 * float(np.sum(np.abs(f.values[1 : N + 1]))))
    tol = rel_tol * scale
    value = mv + best
    return FareyReport(value, arg, value >= -tol, tol)
