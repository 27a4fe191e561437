"""The symmetry weight W(a) = max(2h - 3|a|, |a| - 2h), its transform, and
the exact kernel of the truncated signed-window integral.

With integer h every breakpoint of the integrands here is an integer, so the
kernel is an exact integer and W is the autocorrelation of the signed window
(-1)^h (+1)^h.  That makes W-hat a squared modulus, hence nonnegative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "WindowWeight",
    "sgn",
    "weight",
    "weight_table",
    "kernel",
    "kernel_array",
    "dft_weight",
    "dft_weight_many",
    "dft_weight_modulus",
]


def sgn(r) -> int:
    """Sign of r, with sgn(0) = 0."""
    return (r > 0) - (r < 0)


def weight(a: int, h: int) -> int:
    if h < 1:
        raise ValueError("h must be a positive integer")
    a = abs(a)
    if a > 2 * h:
        return 0
    return max(2 * h - 3 * a, a - 2 * h)


def weight_table(h: int) -> np.ndarray:
    """W(a) for a = -2h..2h, so index i holds lag i - 2h."""
    if h < 1:
        raise ValueError("h must be a positive integer")
    a = np.abs(np.arange(-2 * h, 2 * h + 1, dtype=np.int64))
    return np.maximum(2 * h - 3 * a, a - 2 * h)


@dataclass(frozen=True)
class WindowWeight:
    h: int

    @property
    def values(self) -> np.ndarray:
        return weight_table(self.h)

    @property
    def lags(self) -> np.ndarray:
        return np.arange(-2 * self.h, 2 * self.h + 1)

    def __call__(self, a: int) -> int:
        return weight(a, self.h)

    def hat(self, beta) -> float:
        return dft_weight(beta, self.h)


def kernel(m: int, n: int, N: int, h: int) -> int:
    """Integral of sgn(x-n) sgn(x-m) over h < x < N, |x-n| <= h, |x-m| <= h.

    The range is cut at x = n and x = m; the integrand is constant on each
    piece, so the sign is read at the piece midpoint.
    """
    if not h < N:
        raise ValueError("kernel needs h < N")
    lo = max(n - h, m - h, h)
    hi = min(n + h, m + h, N)
    if hi <= lo:
        return 0
    cuts = sorted({lo, hi, *(p for p in (n, m) if lo < p < hi)})
    total = 0
    for a, b in zip(cuts, cuts[1:]):
        # sign of (mid - n) with mid = (a + b) / 2, kept in integers
        total += sgn(a + b - 2 * n) * sgn(a + b - 2 * m) * (b - a)
    return total


def kernel_array(m, n, N: int, h: int) -> np.ndarray:
    """Vectorised kernel via overlap lengths: |range| - 2 |range cap [min, max]|."""
    m = np.asarray(m, dtype=np.int64)
    n = np.asarray(n, dtype=np.int64)
    p = np.minimum(m, n)
    r = np.maximum(m, n)
    lo = np.maximum(r - h, h)
    hi = np.minimum(p + h, N)
    length = np.maximum(hi - lo, 0)
    inner = np.maximum(np.minimum(hi, r) - np.maximum(lo, p), 0)
    return np.where(length > 0, length - 2 * inner, 0)


def _phases(beta, a: np.ndarray) -> np.ndarray:
    """a*beta mod 1 as floats; exact residue arithmetic for rational beta."""
    if isinstance(beta, Fraction):
        q = beta.denominator
        return ((a * (beta.numerator % q)) % q) / q
    return np.mod(a * float(beta), 1.0)


def dft_weight(beta, h: int) -> float:
    """W-hat(beta) = sum_a W(a) e(a beta), real by evenness of W."""
    w = weight_table(h)
    a = np.arange(1, 2 * h + 1, dtype=np.int64)
    c = np.cos(2 * math.pi * _phases(beta, a))
    # exact zero at beta = 0 needs integer-valued summation order
    return float(w[2 * h]) + 2.0 * float(np.dot(w[2 * h + 1 :].astype(float), c))


def dft_weight_many(betas, h: int) -> np.ndarray:
    """W-hat on an array of float betas (or a list of Fractions)."""
    w = weight_table(h)[2 * h + 1 :].astype(float)
    a = np.arange(1, 2 * h + 1, dtype=np.int64)
    if len(betas) and isinstance(betas[0], Fraction):
        return np.array([dft_weight(b, h) for b in betas])
    betas = np.asarray(betas, dtype=float)
    ph = np.mod(np.outer(betas, a), 1.0)
    return 2.0 * h + 2.0 * (np.cos(2 * math.pi * ph) @ w)


def dft_weight_modulus(beta: float, h: int) -> float:
    """|sum_{i=1}^{h} e(i beta) - sum_{i=0}^{h-1} e(-i beta)|^2.

    Independent route to W-hat: W is the autocorrelation of that signed window.
    """
    i = np.arange(h)
    z = np.sum(np.exp(2j * math.pi * (i + 1) * beta)) - np.sum(np.exp(-2j * math.pi * i * beta))
    return float(abs(z) ** 2)
