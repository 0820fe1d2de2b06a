"""Exact truncated power series in q with arbitrary-precision integer coefficients.

Two multiplication kernels are used:

* sparse x dense: the sparse operand's nonzero terms drive shifted slice
  additions over a numpy array (``int64`` when a bound proves no overflow,
  ``object`` otherwise). This is how eta powers are built.
* dense x dense: Kronecker substitution, i.e. both series are packed into a
  single big integer, multiplied once, and unpacked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import TruncationMismatch

try:  # GMP multiplication is ~50x faster than CPython's for multi-megabit operands
    from gmpy2 import mpz as _bigint
except ImportError:  # pragma: no cover
    _bigint = int

_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class QSeries:
    """sum_{i=0}^{n_max} coeffs[i] q^i, truncated at q^{n_max}."""

    coeffs: tuple[int, ...]
    n_max: int

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError(f"n_max must be >= 0, got {self.n_max}")
        if len(self.coeffs) != self.n_max + 1:
            raise ValueError(
                f"expected {self.n_max + 1} coefficients, got {len(self.coeffs)}"
            )

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int], n_max: int | None = None) -> QSeries:
        """Build a series, zero-padding or truncating ``coeffs`` to ``n_max``."""
        c = [int(x) for x in coeffs]
        if n_max is None:
            n_max = len(c) - 1
        c = c[: n_max + 1]
        c.extend([0] * (n_max + 1 - len(c)))
        return cls(tuple(c), n_max)

    @classmethod
    def one(cls, n_max: int) -> QSeries:
        return cls.from_coeffs([1], n_max)

    @classmethod
    def monomial(cls, e: int, n_max: int, c: int = 1) -> QSeries:
        return cls.from_coeffs([0] * e + [c], n_max)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeffs[:8])
        more = ", ..." if self.n_max >= 8 else ""
        return f"QSeries([{head}{more}], n_max={self.n_max})"

    def nonzero_terms(self) -> list[tuple[int, int]]:
        return [(i, c) for i, c in enumerate(self.coeffs) if c]

    def _check(self, other: QSeries) -> None:
        if self.n_max != other.n_max:
            raise TruncationMismatch(
                f"truncation orders differ: {self.n_max} vs {other.n_max}"
            )

    def __add__(self, other):
        if isinstance(other, int):
            other = QSeries.monomial(0, self.n_max, other)
        if not isinstance(other, QSeries):
            return NotImplemented
        self._check(other)
        return QSeries(tuple(x + y for x, y in zip(self.coeffs, other.coeffs)), self.n_max)

    __radd__ = __add__

    def __neg__(self) -> QSeries:
        return QSeries(tuple(-x for x in self.coeffs), self.n_max)

    def __sub__(self, other):
        if isinstance(other, int):
            other = QSeries.monomial(0, self.n_max, other)
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return QSeries(tuple(other * x for x in self.coeffs), self.n_max)
        if not isinstance(other, QSeries):
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> QSeries:
        return pow(self, e)

    def exact_div(self, c: int) -> QSeries:
        """Divide every coefficient by ``c``; raises if any division is inexact."""
        out = []
        for x in self.coeffs:
            q, r = divmod(x, c)
            if r:
                raise ArithmeticError(f"{x} is not divisible by {c}")
            out.append(q)
        return QSeries(tuple(out), self.n_max)

    def rescale(self, d: int, n_max: int | None = None) -> QSeries:
        """Substitute q -> q^d, truncating at ``n_max`` (defaults to own order)."""
        if n_max is None:
            n_max = self.n_max
        out = [0] * (n_max + 1)
        for i in range(min(self.n_max, n_max // d) + 1):
            out[i * d] = self.coeffs[i]
        return QSeries(tuple(out), n_max)


def _is_sparse(a: QSeries, nnz: int) -> bool:
    return nnz <= 2 * math.isqrt(a.n_max + 1) + 2


def _mul_sparse(sparse: Sequence[tuple[int, int]], dense: Sequence[int], n_max: int) -> tuple[int, ...]:
    max_dense = max((abs(x) for x in dense), default=0)
    l1_sparse = sum(abs(c) for _, c in sparse)
    dtype = np.int64 if max_dense * l1_sparse < _INT64_SAFE else object
    d = np.array(dense, dtype=dtype)
    out = np.zeros(n_max + 1, dtype=dtype)
    size = n_max + 1
    for e, c in sparse:
        if e > n_max:
            break
        if c == 1:
            out[e:] += d[: size - e]
        elif c == -1:
            out[e:] -= d[: size - e]
        else:
            out[e:] += c * d[: size - e]
    return tuple(int(x) for x in out.tolist())


def _pack(coeffs: Sequence[int], width: int) -> int:
    """Evaluate sum c_i 2^(8*width*i) for signed c_i with |c_i| < 2^(8*width-1)."""
    half = 1 << (8 * width - 1)
    raw = b"".join((c + half).to_bytes(width, "little") for c in coeffs)
    return int.from_bytes(raw, "little") - _offset(len(coeffs), width)


def _offset(length: int, width: int) -> int:
    # Integer whose base-2^(8*width) digits are all 2^(8*width-1).
    half = 1 << (8 * width - 1)
    return int.from_bytes(half.to_bytes(width, "little") * length, "little")


def _mul_dense(a: Sequence[int], b: Sequence[int], n_max: int) -> tuple[int, ...]:
    la = len(a)
    lb = len(b)
    bound = max(map(abs, a)) * max(map(abs, b)) * min(la, lb)
    if bound == 0:
        return (0,) * (n_max + 1)
    width = (bound.bit_length() + 2 + 7) // 8
    prod = int(_bigint(_pack(a, width)) * _bigint(_pack(b, width)))
    length = la + lb - 1
    # Biasing every digit by 2^(8w-1) makes all digits nonnegative, so the
    # low n_max+1 digits can be read directly from the byte string.
    prod += _offset(length, width)
    keep = min(n_max + 1, length)
    raw = (prod & ((1 << (8 * width * keep)) - 1)).to_bytes(width * keep, "little")
    half = 1 << (8 * width - 1)
    out = [
        int.from_bytes(raw[i : i + width], "little") - half
        for i in range(0, width * keep, width)
    ]
    out.extend([0] * (n_max + 1 - keep))
    return tuple(out)


def _trim(c: Sequence[int]) -> list[int]:
    end = len(c)
    while end > 1 and c[end - 1] == 0:
        end -= 1
    return list(c[:end])


def mul(a: QSeries, b: QSeries) -> QSeries:
    """Truncated Cauchy product of two series of equal truncation order."""
    a._check(b)
    n = a.n_max
    ta = a.nonzero_terms()
    tb = b.nonzero_terms()
    if not ta or not tb:
        return QSeries((0,) * (n + 1), n)
    if len(tb) < len(ta):
        ta, tb, a, b = tb, ta, b, a
    if _is_sparse(a, len(ta)):
        return QSeries(_mul_sparse(ta, b.coeffs, n), n)
    return QSeries(_mul_dense(_trim(a.coeffs), _trim(b.coeffs), n), n)


def pow(a: QSeries, e: int) -> QSeries:
    """a**e. Sparse bases are applied e times to a running dense product."""
    if e < 0:
        raise ValueError("negative exponent; use inverse()")
    n = a.n_max
    result = QSeries.one(n)
    if e == 0:
        return result
    terms = a.nonzero_terms()
    if _is_sparse(a, len(terms)):
        coeffs = a.coeffs
        for _ in range(e - 1):
            coeffs = _mul_sparse(terms, coeffs, n)
        return QSeries(coeffs, n)
    base = a
    while True:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if not e:
            return result
        base = mul(base, base)


def inverse(a: QSeries) -> QSeries:
    """Multiplicative inverse of a series with constant term 1.

    O(n_max * nnz(a)); meant for sparse denominators such as eta factors
    with negative exponents.
    """
    if a.coeffs[0] != 1:
        raise ValueError("inverse requires constant term 1")
    n = a.n_max
    terms = [(i, c) for i, c in a.nonzero_terms() if i > 0]
    out = [0] * (n + 1)
    out[0] = 1
    for m in range(1, n + 1):
        acc = 0
        for i, c in terms:
            if i > m:
                break
            acc -= c * out[m - i]
        out[m] = acc
    return QSeries(tuple(out), n)


def eta_factor(n_max: int) -> QSeries:
    """prod_{n>=1} (1 - q^n) truncated at q^{n_max}, via pentagonal numbers."""
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    out = [0] * (n_max + 1)
    out[0] = 1
    k = 1
    while True:
        sign = -1 if k & 1 else 1
        lo = k * (3 * k - 1) // 2
        if lo > n_max:
            break
        out[lo] = sign
        hi = k * (3 * k + 1) // 2
        if hi <= n_max:
            out[hi] = sign
        k += 1
    return QSeries(tuple(out), n_max)


def sigma(n: int, k: int) -> int:
    """Sum of k-th powers of the divisors of n."""
    if n < 1:
        raise ValueError(f"sigma needs n >= 1, got {n}")
    total = 0
    r = math.isqrt(n)
    for d in range(1, r + 1):
        if n % d == 0:
            total += d**k
            e = n // d
            if e != d:
                total += e**k
    return total


def sigma_table(n_max: int, k: int) -> list[int]:
    """[0, sigma_k(1), ..., sigma_k(n_max)] by a divisor sieve."""
    out = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        dk = d**k
        for m in range(d, n_max + 1, d):
            out[m] += dk
    return out


_EISENSTEIN_SCALE = {4: 240, 6: -504}


def eisenstein(k: int, n_max: int) -> QSeries:
    """Level-one Eisenstein series E_4 or E_6."""
    if k not in _EISENSTEIN_SCALE:
        raise ValueError(f"only weights 4 and 6 are supported, got {k}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    c = _EISENSTEIN_SCALE[k]
    sig = sigma_table(n_max, k - 1)
    coeffs = [1] + [c * s for s in sig[1:]]
    return QSeries(tuple(coeffs), n_max)
