"""Normalized Hecke eigenvalues, exact dominance comparisons and the
polynomials P_m(x) = U_m(x/2) giving a(p^m) in terms of a(p)."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import BadPrimeError


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1

    def reverse(self) -> Ordering:
        return Ordering(-self.value)


def div_sqrt(a: int, q: int) -> float:
    """a / sqrt(q) correctly rounded to the nearest double, for q >= 1.

    floor(sqrt(a^2 4^m / q)) is computed with at least 64 significant bits;
    a sticky bit records inexactness so the final int/int division (itself
    correctly rounded) never lands on a false tie.
    """
    if q < 1:
        raise ValueError("q must be positive")
    if a == 0:
        return 0.0
    sign = -1 if a < 0 else 1
    a = abs(a)
    m = max(0, 66 + (q.bit_length() + 1) // 2 - a.bit_length())
    quot, rem = divmod(a * a << (2 * m), q)
    root = math.isqrt(quot)
    sticky = 0 if (rem == 0 and root * root == quot) else 1
    return sign * ((2 * root + sticky) / (1 << (m + 1)))


def normalized_value(a_p: int, p: int, k: int) -> float:
    """lambda = a_p / p^((k-1)/2), correctly rounded."""
    return div_sqrt(a_p, p ** (k - 1))


@dataclass(frozen=True)
class NormalizedEigenvalue:
    """Exact lambda_f(p) = a_p / p^((k-1)/2); render with ``float()``."""

    a_p: int
    p: int
    weight: int

    def __float__(self) -> float:
        return normalized_value(self.a_p, self.p, self.weight)

    def within_deligne(self) -> bool:
        return self.a_p * self.a_p <= 4 * self.p ** (self.weight - 1)


def _check_weights(kF: int, kG: int) -> None:
    if (kG - kF) % 2:
        raise ValueError(f"weights {kF} and {kG} differ by an odd amount")


def scaled_difference(aF: int, kF: int, aG: int, kG: int, p: int, squared: bool = False) -> tuple[int, int]:
    """Integers (D, Q) with lambda_f(p) - lambda_g(p) == D / sqrt(Q) exactly.

    With ``squared`` the identity is for lambda_f^2 - lambda_g^2 instead.
    Q > 0 always, so sign(D) is the sign of the difference.
    """
    _check_weights(kF, kG)
    if squared:
        K = max(kF, kG) - 1
        D = aF * aF * p ** (K - kF + 1) - aG * aG * p ** (K - kG + 1)
        return D, p ** (2 * K)
    if kG >= kF:
        return aF * p ** ((kG - kF) // 2) - aG, p ** (kG - 1)
    return aF - aG * p ** ((kF - kG) // 2), p ** (kF - 1)


def _sign(x: int) -> Ordering:
    return Ordering((x > 0) - (x < 0))


def dominance_compare(aF: int, kF: int, aG: int, kG: int, p: int) -> Ordering:
    """Exact ordering of lambda_f(p) against lambda_g(p)."""
    return _sign(scaled_difference(aF, kF, aG, kG, p)[0])


def square_dominance_compare(aF: int, kF: int, aG: int, kG: int, p: int) -> Ordering:
    """Exact ordering of lambda_f(p)^2 against lambda_g(p)^2."""
    return _sign(scaled_difference(aF, kF, aG, kG, p, squared=True)[0])


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients in ascending degree."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = list(self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c) or (0,))

    @property
    def degree(self) -> int:
        return -1 if self.coeffs == (0,) else len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: IntPolynomial) -> IntPolynomial:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> IntPolynomial:
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: IntPolynomial) -> IntPolynomial:
        return self + (-other)

    def times_x(self) -> IntPolynomial:
        return IntPolynomial((0,) + self.coeffs)

    def __str__(self) -> str:
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(c) == 1:
                coef = "-" if c < 0 else ""
            else:
                coef = str(c)
            terms.append(coef + mono)
        return " + ".join(terms).replace("+ -", "- ") or "0"


@lru_cache(maxsize=None)
def chebyshev_P(m: int) -> IntPolynomial:
    """P_0 = 1, P_1 = x, P_m = x P_{m-1} - P_{m-2}."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if m == 0:
        return IntPolynomial((1,))
    if m == 1:
        return IntPolynomial((0, 1))
    return chebyshev_P(m - 1).times_x() - chebyshev_P(m - 2)


def a_prime_power(a_p: int, p: int, k: int, N: int, m: int) -> int:
    """a(p^m) from a(p) at a good prime p: A_m = a_p A_{m-1} - p^{k-1} A_{m-2}."""
    if N % p == 0:
        raise BadPrimeError(f"p={p} divides the level {N}")
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    pk = p ** (k - 1)
    prev, cur = 1, a_p
    if m == 0:
        return 1
    for _ in range(m - 1):
        prev, cur = cur, a_p * cur - pk * prev
    return cur


def sym_power_lambda(a_p: int, p: int, k: int, N: int, m: int) -> float:
    """lambda_f(p^m), the p-th coefficient of the m-th symmetric power."""
    return div_sqrt(a_prime_power(a_p, p, k, N, m), p ** (m * (k - 1)))


@dataclass(frozen=True)
class SatoTateSample:
    theta: float
    lam: float


def satake_angle(lam: float) -> SatoTateSample:
    """theta in [0, pi] with lam = 2 cos(theta); Satake roots are e^{+-i theta}."""
    if abs(lam) > 2:
        raise ValueError(f"|lambda| = {abs(lam)} exceeds the Deligne bound 2")
    return SatoTateSample(math.acos(lam / 2), lam)
