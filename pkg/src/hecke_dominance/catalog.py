"""Built-in rational newforms and their exact coefficient tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from . import qseries
from .errors import AuditError, UnsupportedRecipe
from .density import is_prime, prime_factors, primes_up_to

AUDIT_BOUND = 10**4
DEFAULT_N_MAX_ETA = 10**5
DEFAULT_N_MAX_DELTA = 10**4


@dataclass(frozen=True)
class EtaQuotient:
    """prod_d eta(d z)^{r_d}, given as ((d, r_d), ...)."""

    factors: tuple[tuple[int, int], ...]

    @property
    def q_shift(self) -> int:
        total = sum(d * r for d, r in self.factors)
        if total % 24:
            raise UnsupportedRecipe(f"sum d*r_d = {total} is not divisible by 24")
        return total // 24

    @property
    def weight(self) -> Union[int, float]:
        return sum(r for _, r in self.factors) / 2


@dataclass(frozen=True)
class DeltaTimes:
    """Delta * E4^e4 * E6^e6."""

    e4: int
    e6: int

    @property
    def weight(self) -> int:
        return 12 + 4 * self.e4 + 6 * self.e6


Recipe = Union[EtaQuotient, DeltaTimes]


@dataclass(frozen=True)
class FormSpec:
    label: str
    weight: int
    level: int
    recipe: Recipe | None = None
    cm_expected: bool = False
    twist_class: str = ""

    def __post_init__(self):
        if self.weight < 2 or self.weight % 2:
            raise ValueError(f"{self.label}: weight must be even and >= 2, got {self.weight}")
        if self.level < 1:
            raise ValueError(f"{self.label}: level must be >= 1, got {self.level}")
        r = self.recipe
        if isinstance(r, EtaQuotient):
            if r.q_shift <= 0:
                raise ValueError(f"{self.label}: eta quotient must vanish at infinity")
            if r.weight != self.weight:
                raise ValueError(f"{self.label}: eta quotient has weight {r.weight}, not {self.weight}")
            for d, _ in r.factors:
                if d < 1 or self.level % d:
                    raise ValueError(f"{self.label}: scale {d} does not divide level {self.level}")
        elif isinstance(r, DeltaTimes):
            if min(r.e4, r.e6) < 0:
                raise ValueError(f"{self.label}: negative Eisenstein exponent")
            if r.weight != self.weight:
                raise ValueError(f"{self.label}: Delta*E4^a*E6^b has weight {r.weight}, not {self.weight}")
        if not self.twist_class:
            object.__setattr__(self, "twist_class", self.label)

    @property
    def bad_primes(self) -> tuple[int, ...]:
        return prime_factors(self.level)

    def default_n_max(self) -> int:
        if isinstance(self.recipe, DeltaTimes):
            return DEFAULT_N_MAX_DELTA
        return DEFAULT_N_MAX_ETA


@dataclass(frozen=True)
class EigenvalueTable:
    """a_f(n) for 1 <= n <= n_max; ``coeffs[0]`` is an unused 0."""

    spec: FormSpec
    n_max: int
    coeffs: tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if len(self.coeffs) != self.n_max + 1:
            raise ValueError(f"expected {self.n_max + 1} entries, got {len(self.coeffs)}")

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.n_max:
            raise IndexError(f"n={n} outside [1, {self.n_max}]")
        return self.coeffs[n]

    @property
    def label(self) -> str:
        return self.spec.label

    @property
    def weight(self) -> int:
        return self.spec.weight

    @property
    def level(self) -> int:
        return self.spec.level

    def is_good(self, p: int) -> bool:
        return self.spec.level % p != 0

    def ap(self, p: int) -> int:
        return self[p]


def _eta(*factors: tuple[int, int]) -> EtaQuotient:
    return EtaQuotient(tuple(factors))


_CATALOG = (
    FormSpec("1.12.delta", 12, 1, DeltaTimes(0, 0)),
    FormSpec("1.16.delta_e4", 16, 1, DeltaTimes(1, 0)),
    FormSpec("1.18.delta_e6", 18, 1, DeltaTimes(0, 1)),
    FormSpec("1.20.delta_e4e4", 20, 1, DeltaTimes(2, 0)),
    FormSpec("1.22.delta_e4e6", 22, 1, DeltaTimes(1, 1)),
    FormSpec("1.26.delta_e4e4e6", 26, 1, DeltaTimes(2, 1)),
    FormSpec("11.2.eta", 2, 11, _eta((1, 2), (11, 2))),
    FormSpec("14.2.eta", 2, 14, _eta((1, 1), (2, 1), (7, 1), (14, 1))),
    FormSpec("15.2.eta", 2, 15, _eta((1, 1), (3, 1), (5, 1), (15, 1))),
    FormSpec("20.2.eta", 2, 20, _eta((2, 2), (10, 2))),
    FormSpec("24.2.eta", 2, 24, _eta((2, 1), (4, 1), (6, 1), (12, 1))),
    # 27a and 36a both have CM by Q(sqrt(-3)) but differ by a sextic, not a
    # quadratic, twist: |a(p)| already differs at p = 7.
    FormSpec("27.2.eta", 2, 27, _eta((3, 2), (9, 2)), cm_expected=True),
    FormSpec("32.2.eta", 2, 32, _eta((4, 2), (8, 2)), cm_expected=True),
    FormSpec("36.2.eta", 2, 36, _eta((6, 4),), cm_expected=True),
)


def builtin_catalog() -> list[FormSpec]:
    return list(_CATALOG)


def get_form(label: str) -> FormSpec:
    for spec in _CATALOG:
        if spec.label == label:
            return spec
    raise KeyError(f"unknown form label {label!r}")


def _expand_eta(recipe: EtaQuotient, n_max: int) -> list[int]:
    t = recipe.q_shift
    if n_max < t:
        raise ValueError(f"n_max={n_max} is below the q-power prefactor {t}")
    m = n_max - t
    series = qseries.QSeries.one(m)
    for d, r in sorted(recipe.factors):
        base = qseries.eta_factor(m // d).rescale(d, m)
        if r < 0:
            base = qseries.inverse(base)
            r = -r
        series = series * qseries.pow(base, r)
    return [0] * t + list(series.coeffs)


def _expand_delta(recipe: DeltaTimes, n_max: int) -> list[int]:
    # Delta = q * eta^24: sparse path, no Eisenstein identity needed.
    m = n_max - 1
    series = qseries.pow(qseries.eta_factor(m), 24)
    if recipe.e4 or recipe.e6:
        eis = qseries.pow(qseries.eisenstein(4, m), recipe.e4) * qseries.pow(
            qseries.eisenstein(6, m), recipe.e6
        )
        series = series * eis
    return [0] + list(series.coeffs)


def expand(spec: FormSpec, n_max: int | None = None, audit_bound: int | None = AUDIT_BOUND) -> EigenvalueTable:
    """Exact coefficients a(1..n_max) of ``spec``, audited up to ``audit_bound``.

    Pass ``audit_bound=None`` to skip the audit.
    """
    if n_max is None:
        n_max = spec.default_n_max()
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    r = spec.recipe
    if isinstance(r, EtaQuotient):
        q = _expand_eta(r, n_max)
    elif isinstance(r, DeltaTimes):
        q = _expand_delta(r, n_max)
    else:
        raise UnsupportedRecipe(f"{spec.label}: cannot expand recipe {r!r}")
    # q[i] is the coefficient of q^i, i.e. a(i).
    table = EigenvalueTable(spec, n_max, tuple(q[: n_max + 1]))
    if audit_bound:
        report = audit_hecke(table, min(audit_bound, n_max))
        if not report.ok:
            raise AuditError(report)
    return table


def elliptic_ap(p: int) -> int:
    """Trace of Frobenius of y^2 + y = x^3 - x^2 - 10x - 20 (conductor 11) at p."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 11:
        raise ValueError("p = 11 is the bad prime of this curve")
    # Count affine solutions: for each y tabulate y^2 + y, for each x the RHS,
    # and pair them up by residue.
    lhs_count = [0] * p
    for y in range(p):
        lhs_count[(y * y + y) % p] += 1
    affine = 0
    for x in range(p):
        affine += lhs_count[(x * x * x - x * x - 10 * x - 20) % p]
    return p + 1 - (affine + 1)


@dataclass(frozen=True)
class AuditReport:
    label: str
    bound: int
    ok: bool
    check: str = ""
    indices: tuple[int, ...] = ()
    detail: str = ""

    def __str__(self) -> str:
        if self.ok:
            return f"{self.label}: Hecke audit passed up to {self.bound}"
        return f"{self.label}: {self.check} fails at {self.indices}: {self.detail}"


def audit_hecke(table: EigenvalueTable, bound: int) -> AuditReport:
    """Check normalization, multiplicativity, the good-prime recurrence and the
    Deligne bound for all indices up to ``bound``; report the first failure."""
    if bound > table.n_max:
        raise ValueError(f"bound {bound} exceeds table n_max {table.n_max}")
    a = table.coeffs
    label = table.label
    k = table.weight
    N = table.level

    def fail(check, indices, detail):
        return AuditReport(label, bound, False, check, tuple(indices), detail)

    if bound >= 1 and a[1] != 1:
        return fail("normalization", (1,), f"a(1) = {a[1]}")

    for m in range(2, bound // 2 + 1):
        am = a[m]
        for n in range(m + 1, bound // m + 1):
            if math.gcd(m, n) == 1 and a[m * n] != am * a[n]:
                return fail(
                    "multiplicativity",
                    (m, n),
                    f"a({m * n}) = {a[m * n]} != a({m})a({n}) = {am * a[n]}",
                )

    for p in primes_up_to(bound):
        if N % p == 0:
            continue
        pk = p ** (k - 1)
        ap = a[p]
        if ap * ap > 4 * pk:
            return fail("deligne", (p,), f"a({p})^2 = {ap * ap} > 4 p^(k-1)")
        prev2, prev1 = 1, ap
        q = p * p
        e = 2
        while q <= bound:
            expected = ap * prev1 - pk * prev2
            if a[q] != expected:
                return fail(
                    "prime-power recurrence",
                    (p, e),
                    f"a({p}^{e}) = {a[q]} != {expected}",
                )
            prev2, prev1 = prev1, expected
            q *= p
            e += 1
    return AuditReport(label, bound, True)
