"""Arithmetic-function tables: Moebius sieve, f = g*1 convolution, inversion.

Tables are 1-based numpy arrays.  Slot 0 of ``values`` is padding and is
never read; the constant f(0) is kept separately in ``mean_value``.

Two numeric paths exist.  Integer tables (dtype int64) are exact and every
reduction over them goes through :func:`exact_dot` / :func:`exact_sum`,
which fall back to Python integers when an int64 accumulator could
overflow.  Float tables are the fast path for large fits.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from pathlib import Path

import numpy as np

__all__ = [
    "FunctionTable",
    "SieveBasis",
    "mobius_sieve",
    "mobius_bruteforce",
    "dirichlet_convolve",
    "mobius_invert",
    "restricted_divisor",
    "even_extend",
    "indicator_basis",
    "delta_basis",
    "growth_diagnostic",
    "exact_dot",
    "exact_sum",
    "read_table_csv",
    "write_table_csv",
]

# keep int64 partial sums well away from wraparound
_INT64_SAFE = 2**62


def _is_int_array(x: np.ndarray) -> bool:
    return x.dtype.kind in "iu" or x.dtype == object


def exact_dot(x: np.ndarray, y: np.ndarray):
    """Inner product; exact for integer arrays (Python int result)."""
    if not (_is_int_array(x) and _is_int_array(y)):
        return float(np.dot(np.asarray(x, dtype=float), np.asarray(y, dtype=float)))
    if len(x) == 0:
        return 0
    bound = int(np.max(np.abs(x))) * int(np.max(np.abs(y))) * len(x)
    if bound < _INT64_SAFE and x.dtype != object and y.dtype != object:
        return int(np.dot(x.astype(np.int64), y.astype(np.int64)))
    return sum(int(a) * int(b) for a, b in zip(x.tolist(), y.tolist()))


def exact_sum(x: np.ndarray):
    if not _is_int_array(x):
        return float(np.sum(x))
    if len(x) == 0:
        return 0
    if x.dtype != object and int(np.max(np.abs(x))) * len(x) < _INT64_SAFE:
        return int(np.sum(x, dtype=np.int64))
    return sum(int(a) for a in x.tolist())


def exact_cumsum(x: np.ndarray) -> np.ndarray:
    """Prefix sums with a leading 0; object dtype if int64 could overflow."""
    if _is_int_array(x):
        if len(x) and (x.dtype == object or int(np.max(np.abs(x))) * len(x) >= _INT64_SAFE):
            out = np.empty(len(x) + 1, dtype=object)
            out[0] = 0
            acc = 0
            for i, v in enumerate(x.tolist(), start=1):
                acc += int(v)
                out[i] = acc
            return out
        return np.concatenate(([0], np.cumsum(x, dtype=np.int64)))
    return np.concatenate(([0.0], np.cumsum(np.asarray(x, dtype=float))))


@dataclass(frozen=True)
class FunctionTable:
    """Values f(1..n_max) plus the free constant f(0) (``mean_value``)."""

    values: np.ndarray
    mean_value: Real = 0

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 1 or len(vals) < 2:
            raise ValueError("table needs at least one entry beyond the padding slot")
        if vals.dtype.kind in "iu":
            vals = vals.astype(np.int64)
        elif vals.dtype.kind == "f":
            vals = vals.astype(np.float64)
        else:
            raise TypeError(f"unsupported table dtype {vals.dtype}")
        vals = vals.copy()
        vals[0] = 0
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.mean_value < 0:
            raise ValueError("mean_value (f(0)) must be nonnegative")

    @classmethod
    def from_values(cls, vals, mean_value=0) -> "FunctionTable":
        """Build from f(1), f(2), ... (no padding slot)."""
        vals = np.asarray(vals)
        return cls(np.concatenate((np.zeros(1, dtype=vals.dtype), vals)), mean_value)

    @classmethod
    def from_function(cls, fn, n_max: int, mean_value=0) -> "FunctionTable":
        return cls.from_values([fn(n) for n in range(1, n_max + 1)], mean_value)

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    @property
    def exact(self) -> bool:
        return self.values.dtype.kind in "iu"

    def __getitem__(self, n: int):
        if not 1 <= n <= self.n_max:
            raise IndexError(f"n={n} outside table range 1..{self.n_max}")
        v = self.values[n]
        return int(v) if self.exact else float(v)

    def segment(self, lo: int, hi: int) -> np.ndarray:
        """f(lo..hi) inclusive, 1 <= lo."""
        if lo < 1 or hi > self.n_max:
            raise IndexError(f"range [{lo},{hi}] outside table range 1..{self.n_max}")
        return self.values[lo : hi + 1]

    def require(self, n: int) -> None:
        if n > self.n_max:
            raise IndexError(f"table covers 1..{self.n_max}, need {n}")

    def max_abs(self, upto: int | None = None):
        upto = self.n_max if upto is None else min(upto, self.n_max)
        m = np.max(np.abs(self.values[1 : upto + 1]))
        return int(m) if self.exact else float(m)

    def with_mean_value(self, mean_value) -> "FunctionTable":
        return FunctionTable(self.values, mean_value)

    def as_float(self) -> "FunctionTable":
        return FunctionTable(self.values.astype(np.float64), self.mean_value)


@dataclass(frozen=True)
class SieveBasis:
    """Coefficients g(1..support_max); f = g*1 is the table it seeds."""

    coeffs: np.ndarray
    nonnegative: bool = field(default=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if c.ndim != 1 or len(c) < 2:
            raise ValueError("basis needs g(1) at least")
        c = c.astype(np.int64) if c.dtype.kind in "iub" else c.astype(np.float64)
        c = c.copy()
        c[0] = 0
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if self.nonnegative and np.any(c < 0):
            raise ValueError("basis flagged nonnegative has a negative coefficient")

    @classmethod
    def from_values(cls, vals, nonnegative: bool = False) -> "SieveBasis":
        vals = np.asarray(vals)
        return cls(np.concatenate((np.zeros(1, dtype=vals.dtype), vals)), nonnegative)

    @property
    def support_max(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if len(nz) else 1

    @property
    def exact(self) -> bool:
        return self.coeffs.dtype.kind in "iu"

    def __getitem__(self, d: int):
        if d < 1 or d >= len(self.coeffs):
            return 0
        v = self.coeffs[d]
        return int(v) if self.exact else float(v)

    def items(self):
        """(d, g(d)) for every nonzero coefficient."""
        for d in np.flatnonzero(self.coeffs).tolist():
            yield d, self[d]

    def max_abs(self):
        m = np.max(np.abs(self.coeffs))
        return int(m) if self.exact else float(m)


def indicator_basis(Q: int) -> SieveBasis:
    """g = 1 on [1, Q]; g*1 is the restricted divisor function d_Q."""
    if Q < 1:
        raise ValueError("Q must be >= 1")
    return SieveBasis.from_values(np.ones(Q, dtype=np.int64), nonnegative=True)


def delta_basis() -> SieveBasis:
    return SieveBasis.from_values(np.ones(1, dtype=np.int64), nonnegative=True)


def _primes_upto(n: int) -> np.ndarray:
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p)


def mobius_sieve(n_max: int) -> np.ndarray:
    """mu(0..n_max) as int64 (slot 0 set to 0)."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    mu = np.ones(n_max + 1, dtype=np.int64)
    mu[0] = 0
    for p in _primes_upto(n_max).tolist():
        mu[p::p] *= -1
        if p * p <= n_max:
            mu[p * p :: p * p] = 0
    return mu


def mobius_bruteforce(n: int) -> int:
    """mu(n) by trial division; test oracle for the sieve."""
    if n < 1:
        raise ValueError("n must be >= 1")
    sign, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            sign = -sign
        p += 1
    return -sign if n > 1 else sign


def dirichlet_convolve(g: SieveBasis, n_max: int) -> FunctionTable:
    """f = g*1 on 1..n_max via the multiples sieve; f(0) left at 0."""
    if g.support_max > n_max:
        raise ValueError(f"basis support {g.support_max} exceeds n_max={n_max}")
    f = np.zeros(n_max + 1, dtype=g.coeffs.dtype)
    c = g.coeffs
    bound = 0
    for d, gd in g.items():
        f[d::d] += c[d]
        bound += abs(gd)
    if g.exact and bound >= _INT64_SAFE:
        raise OverflowError("convolution values may exceed int64")
    return FunctionTable(f)


def mobius_invert(f: FunctionTable) -> SieveBasis:
    """g = f*mu; exact on integer tables."""
    if not f.exact:
        raise TypeError("mobius_invert needs an integer table for an exact round trip")
    n_max = f.n_max
    mu = mobius_sieve(n_max)
    vals = f.values
    if f.max_abs() * n_max >= _INT64_SAFE:
        raise OverflowError("inversion may exceed int64")
    g = np.zeros(n_max + 1, dtype=np.int64)
    for d in np.flatnonzero(mu).tolist():
        k = n_max // d
        # g(d*k) += mu(d) f(k)
        if mu[d] > 0:
            g[d::d] += vals[1 : k + 1]
        else:
            g[d::d] -= vals[1 : k + 1]
    support = np.flatnonzero(g)
    top = int(support[-1]) if len(support) else 1
    return SieveBasis(g[: top + 1])


def restricted_divisor(n_max: int, Q: int) -> FunctionTable:
    """d_Q(n) = #{q | n : q <= Q} on 1..n_max."""
    if Q < 1:
        raise ValueError("Q must be >= 1")
    return dirichlet_convolve(indicator_basis(min(Q, n_max)), n_max)


def even_extend(f: FunctionTable, n: int):
    """f(|n|) for n != 0, the stored constant f(0) for n = 0."""
    if abs(n) > f.n_max:
        raise IndexError(f"|n|={abs(n)} outside table range 0..{f.n_max}")
    if n == 0:
        return f.mean_value
    return f[abs(n)]


def growth_diagnostic(f: FunctionTable, eps: float) -> float:
    """max |f(n)| * n**(-eps): a look at how far f is from essentially bounded.

    Reported only; nothing downstream enforces it.
    """
    n = np.arange(1, f.n_max + 1, dtype=float)
    return float(np.max(np.abs(f.values[1:].astype(float)) * n ** (-eps)))


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else str(v.numerator)
    return repr(float(v))


def write_table_csv(f: FunctionTable, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# mean_value={_fmt(f.mean_value)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "value"])
        for n, v in enumerate(f.values[1:].tolist(), start=1):
            w.writerow([n, _fmt(v)])


def _parse_number(s: str):
    s = s.strip()
    try:
        return int(s)
    except ValueError:
        pass
    if "/" in s:
        return Fraction(s)
    return float(s)


def read_table_csv(path) -> FunctionTable:
    """Inverse of :func:`write_table_csv`; integer-valued files load exactly."""
    mean_value = 0
    rows = []
    with Path(path).open(newline="") as fh:
        lines = []
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                if key.strip() == "mean_value":
                    mean_value = _parse_number(val)
                continue
            lines.append(line)
        reader = csv.reader(lines)
        header = next(reader)
        if [h.strip() for h in header] != ["n", "value"]:
            raise ValueError(f"expected header 'n,value', got {header!r}")
        for row in reader:
            if row:
                rows.append((int(row[0]), _parse_number(row[1])))
    rows.sort()
    if [n for n, _ in rows] != list(range(1, len(rows) + 1)):
        raise ValueError("table rows must cover n = 1..n_max without gaps")
    vals = [v for _, v in rows]
    if all(isinstance(v, int) for v in vals):
        arr = np.array(vals, dtype=np.int64)
    else:
        arr = np.array([float(v) for v in vals], dtype=np.float64)
    return FunctionTable.from_values(arr, mean_value)
