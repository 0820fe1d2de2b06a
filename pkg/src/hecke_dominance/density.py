"""Prime sieve and finite-truncation density estimators over primes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Container, Iterable, Mapping, Union

import numpy as np

Member = Union[Callable[[int], bool], Container[int]]
Weights = Union[Callable[[int], float], Mapping[int, float]]

DEFAULT_S_GRID = (1.2, 1.1, 1.05, 1.02)


@dataclass(frozen=True)
class PrimeSieve:
    limit: int
    primes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def up_to(self, X: int) -> tuple[int, ...]:
        import bisect

        return self.primes[: bisect.bisect_right(self.primes, X)]


@lru_cache(maxsize=16)
def sieve(X: int) -> PrimeSieve:
    """All primes <= X (Eratosthenes over a numpy boolean mask)."""
    if X < 2:
        raise ValueError(f"sieve needs X >= 2, got {X}")
    mask = np.ones(X + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(X) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return PrimeSieve(X, tuple(int(p) for p in np.flatnonzero(mask)))


def primes_up_to(X: int) -> tuple[int, ...]:
    if X < 2:
        return ()
    return sieve(X).primes


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in (2, 3, 5, 7):
        if n % d == 0:
            return n == d
    d = 11
    while d * d <= n:
        if n % d == 0 or n % (d + 2) == 0:
            return False
        d += 6
    return True


def prime_factors(n: int) -> tuple[int, ...]:
    """Distinct prime factors of n in ascending order."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return tuple(out)


def _check_s(s: float) -> None:
    if not s > 1:
        raise ValueError(f"s must be > 1, got {s}")


def _terms(weights: Weights, primes: Iterable[int], s: float):
    if isinstance(weights, Mapping):
        for p in primes:
            w = weights.get(p)
            if w is not None:
                yield w * p**-s
    else:
        for p in primes:
            yield weights(p) * p**-s


def dirichlet_sum(weights: Weights, s: float, X: int) -> float:
    """sum_{p <= X} w(p) p^{-s}.

    A mapping skips primes it does not contain (e.g. bad primes); a callable
    is evaluated at every prime. Summation is exactly rounded (``math.fsum``),
    so the result does not depend on term order.
    """
    _check_s(s)
    return math.fsum(_terms(weights, primes_up_to(X), s))


@dataclass(frozen=True)
class DensityEstimate:
    s: float
    X: int
    value: float
    numerator: float
    denominator: float


def _membership(member: Member) -> Callable[[int], bool]:
    if callable(member):
        return member
    return member.__contains__


def analytic_density_proxy(member: Member, s: float, X: int) -> DensityEstimate:
    """(sum_{p in A, p <= X} p^-s) / (sum_{p <= X} p^-s)."""
    _check_s(s)
    primes = primes_up_to(X)
    if not primes:
        raise ValueError(f"no primes up to X={X}")
    inside = _membership(member)
    num = math.fsum(p**-s for p in primes if inside(p))
    den = math.fsum(p**-s for p in primes)
    return DensityEstimate(s, X, num / den, num, den)


def natural_density(member: Member, X: int) -> float:
    """#{p in A, p <= X} / pi(X)."""
    primes = primes_up_to(X)
    if not primes:
        raise ValueError(f"no primes up to X={X}")
    inside = _membership(member)
    return sum(1 for p in primes if inside(p)) / len(primes)


def density_grid(member: Member, X: int, s_grid: Iterable[float] = DEFAULT_S_GRID) -> list[DensityEstimate]:
    return [analytic_density_proxy(member, s, X) for s in s_grid]
