"""Mixed correlations C_{f1,f2}(a) and exact symmetry integrals.

For integer h the signed short sum sum_{|n-x|<=h} f(n) sgn(n-x) is constant
on every open interval (k, k+1), so the integral over [h, N] is the finite
sum of its squares at the midpoints k + 1/2, k = h..N-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import FunctionTable, exact_cumsum, exact_dot, exact_sum
from .window import kernel_array, weight_table

__all__ = [
    "CorrelationVector",
    "SymmetryValue",
    "correlation",
    "correlation_all",
    "correlation_all_naive",
    "correlation_all_fft",
    "signed_window_sum",
    "midpoint_sums",
    "symmetry_integral",
    "mixed_symmetry_integral",
    "weighted_correlation_sum",
    "kernel_expansion",
    "trivial_bound",
]

# doubles carry integers exactly below 2**53; leave room for FFT round-off
_FFT_EXACT_LIMIT = 2**50


@dataclass(frozen=True)
class CorrelationVector:
    h: int
    values: np.ndarray  # index i holds lag i - 2h

    @property
    def lags(self) -> np.ndarray:
        return np.arange(-2 * self.h, 2 * self.h + 1)

    def __getitem__(self, a: int):
        if abs(a) > 2 * self.h:
            raise IndexError(f"lag {a} outside [-2h, 2h]")
        v = self.values[a + 2 * self.h]
        return v.item() if isinstance(v, np.generic) else v


@dataclass(frozen=True)
class SymmetryValue:
    N: int
    h: int
    value: int | float


def _check_Nh(N: int, h: int) -> None:
    if h < 1 or N < 1:
        raise ValueError("N and h must be positive integers")
    if not h < N:
        raise ValueError(f"need h < N, got h={h}, N={N}")


def correlation(f1: FunctionTable, f2: FunctionTable, a: int, N: int):
    """sum over |a| < n <= N - |a| of f1(n) f2(n - a)."""
    f1.require(N)
    f2.require(N)
    lo, hi = abs(a) + 1, N - abs(a)
    if hi < lo:
        return 0 if (f1.exact and f2.exact) else 0.0
    x = f1.values[lo : hi + 1]
    y = f2.values[lo - a : hi - a + 1]
    return exact_dot(x, y)


def correlation_all_naive(f1: FunctionTable, f2: FunctionTable, N: int, h: int) -> CorrelationVector:
    exact = f1.exact and f2.exact
    vals = [correlation(f1, f2, a, N) for a in range(-2 * h, 2 * h + 1)]
    arr = np.array(vals, dtype=object if exact else np.float64)
    if exact and all(abs(v) < 2**62 for v in vals):
        arr = arr.astype(np.int64)
    return CorrelationVector(h, arr)


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def correlation_all_fft(f1: FunctionTable, f2: FunctionTable, N: int, h: int) -> CorrelationVector:
    """Full cross-correlation by zero-padded FFT, then trimmed to |a| < n <= N - |a|.

    The FFT gives sum over 1 <= n, n - a <= N; the trimmed range drops the
    top |a| values of n for a > 0 and the bottom |a| for a < 0.
    """
    f1.require(N)
    f2.require(N)
    exact = f1.exact and f2.exact
    if exact and N * f1.max_abs(N) * f2.max_abs(N) >= _FFT_EXACT_LIMIT:
        # rounding would no longer be exact
        return correlation_all_naive(f1, f2, N, h)
    x = f1.values[1 : N + 1].astype(float)
    y = f2.values[1 : N + 1].astype(float)
    size = _next_pow2(2 * N)
    full = np.fft.irfft(np.fft.rfft(x, size) * np.conj(np.fft.rfft(y, size)), size)
    out = []
    for a in range(-2 * h, 2 * h + 1):
        raw = full[a % size]
        if exact:
            raw = int(round(raw))
        if 2 * abs(a) >= N:
            out.append(0 if exact else 0.0)
            continue
        if a > 0:
            n = np.arange(N - a + 1, N + 1)
        else:
            n = np.arange(1, -a + 1)
        trim = exact_dot(f1.values[n], f2.values[n - a]) if len(n) else 0
        out.append(raw - trim)
    arr = np.array(out, dtype=np.int64 if exact else np.float64)
    return CorrelationVector(h, arr)


def correlation_all(f1: FunctionTable, f2: FunctionTable, N: int, h: int, method: str = "fft") -> CorrelationVector:
    if method == "naive":
        return correlation_all_naive(f1, f2, N, h)
    if method == "fft":
        return correlation_all_fft(f1, f2, N, h)
    raise ValueError(f"unknown method {method!r}")


def signed_window_sum(f: FunctionTable, x, h: int):
    """sum_{|n-x|<=h} f(n) sgn(n-x) at a half-integer x = k + 1/2."""
    k = math.floor(x)
    if x - k != 0.5:
        raise ValueError("x must be a half-integer k + 1/2")
    if k - h + 1 < 1 or k + h > f.n_max:
        raise IndexError(f"window [{k - h + 1}, {k + h}] outside table 1..{f.n_max}")
    return exact_sum(f.segment(k + 1, k + h)) - exact_sum(f.segment(k - h + 1, k))


def midpoint_sums(f: FunctionTable, N: int, h: int) -> np.ndarray:
    """signed_window_sum at k + 1/2 for k = h..N-1, from prefix sums."""
    _check_Nh(N, h)
    f.require(N + h - 1)
    P = exact_cumsum(f.values[1 : N + h])  # P[i] = f(1) + ... + f(i)
    k = np.arange(h, N)
    return P[k + h] - 2 * P[k] + P[k - h]


def symmetry_integral(f: FunctionTable, N: int, h: int) -> SymmetryValue:
    s = midpoint_sums(f, N, h)
    return SymmetryValue(N, h, exact_dot(s, s))


def mixed_symmetry_integral(f1: FunctionTable, f2: FunctionTable, N: int, h: int) -> SymmetryValue:
    return SymmetryValue(N, h, exact_dot(midpoint_sums(f1, N, h), midpoint_sums(f2, N, h)))


def weighted_correlation_sum(f1: FunctionTable, f2: FunctionTable, N: int, h: int, method: str = "fft"):
    """sum_{|a|<=2h} W(a) C_{f1,f2}(a)."""
    _check_Nh(N, h)
    C = correlation_all(f1, f2, N, h, method)
    return exact_dot(weight_table(h), C.values)


def kernel_expansion(f1: FunctionTable, f2: FunctionTable, N: int, h: int):
    """sum over n, m <= N+h-1, |n-m| <= 2h of f1(n) f2(m) kernel(m, n, N, h).

    Exchanging sum and integral in the definition of I_{f1,f2} gives exactly
    this, with no truncation.
    """
    _check_Nh(N, h)
    top = N + h - 1
    f1.require(top)
    f2.require(top)
    total = 0
    for a in range(-2 * h, 2 * h + 1):
        # pairs (n, m = n - a) with 1 <= n, m <= top
        n = np.arange(max(1, 1 + a), min(top, top + a) + 1)
        if len(n) == 0:
            continue
        K = kernel_array(n - a, n, N, h)
        nz = K != 0
        if not nz.any():
            continue
        n = n[nz]
        prod = f1.values[n] * K[nz] if f1.exact else f1.values[n] * K[nz].astype(float)
        total += exact_dot(prod, f2.values[n - a])
    return total


def trivial_bound(f: FunctionTable, N: int, h: int):
    """(N - h) ((2h + 1) max|f|)^2, a crude ceiling for I_f."""
    m = f.max_abs(N + h - 1)
    return (N - h) * ((2 * h + 1) * m) ** 2
