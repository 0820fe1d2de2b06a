"""Dominance partitions, moment sums and the inequality-chain audit for pairs
of eigenvalue tables, evaluated at a finite prime bound X."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from . import density
from .catalog import EigenvalueTable
from .errors import CMInconclusive, HypothesisError
from .hecke import Ordering, div_sqrt, normalized_value, scaled_difference, sym_power_lambda

CM_THRESHOLD = 0.4
NOT_CM_THRESHOLD = 0.1
DENSITY_FLOOR = 1 / 16
EQUALITY_CEILING = 7 / 8

# Targets for the moment ratios sum(w(p) p^-s) / sum(p^-s) as s -> 1+.
MOMENT_TARGETS = {
    "lambda_f^2": 1.0,
    "lambda_g^2": 1.0,
    "lambda_f^4": 2.0,
    "lambda_g^4": 2.0,
    "sym2_f": 0.0,
    "sym2_g": 0.0,
    "sym4_f": 0.0,
    "sym4_g": 0.0,
    "lambda_f*lambda_g": 0.0,
    "lambda_f^2*lambda_g^2": 1.0,
    "(lambda_f-lambda_g)^2": 2.0,
    "(lambda_f^2-lambda_g^2)^2": 2.0,
}


def _check_bound(f: EigenvalueTable, g: EigenvalueTable, X: int) -> None:
    limit = min(f.n_max, g.n_max)
    if X > limit:
        raise ValueError(f"X={X} exceeds the available coefficients (n_max={limit})")
    if X < 2:
        raise ValueError(f"X must be >= 2, got {X}")


def good_primes(f: EigenvalueTable, g: EigenvalueTable, X: int) -> tuple[list[int], list[int]]:
    """(good, excluded): primes <= X split by whether they divide N_f * N_g."""
    NN = f.level * g.level
    good, bad = [], []
    for p in density.primes_up_to(X):
        (bad if NN % p == 0 else good).append(p)
    return good, bad


def _diff(f: EigenvalueTable, g: EigenvalueTable, p: int, squared: bool) -> tuple[int, int]:
    return scaled_difference(f[p], f.weight, g[p], g.weight, p, squared)


@dataclass(frozen=True)
class PrimePartition:
    f: str
    g: str
    X: int
    squared: bool
    F: tuple[int, ...]
    Fprime: tuple[int, ...]
    E: tuple[int, ...]
    excluded: tuple[int, ...]

    def counts(self) -> dict[str, int]:
        return {
            "F": len(self.F),
            "Fprime": len(self.Fprime),
            "E": len(self.E),
            "excluded": len(self.excluded),
        }


def partition(f: EigenvalueTable, g: EigenvalueTable, X: int, squared: bool = False) -> PrimePartition:
    """Split the good primes p <= X by the exact sign of lambda_f(p) - lambda_g(p)
    (or of the squared difference)."""
    _check_bound(f, g, X)
    good, bad = good_primes(f, g, X)
    buckets: dict[Ordering, list[int]] = {o: [] for o in Ordering}
    for p in good:
        D, _ = _diff(f, g, p, squared)
        buckets[Ordering((D > 0) - (D < 0))].append(p)
    return PrimePartition(
        f.label,
        g.label,
        X,
        squared,
        tuple(buckets[Ordering.LESS]),
        tuple(buckets[Ordering.GREATER]),
        tuple(buckets[Ordering.EQUAL]),
        tuple(bad),
    )


def lambdas(t: EigenvalueTable, primes: Iterable[int]) -> dict[int, float]:
    return {p: normalized_value(t[p], p, t.weight) for p in primes}


# -- hypothesis detectors ----------------------------------------------------


@dataclass(frozen=True)
class CMResult:
    status: str  # "cm" or "not_cm"
    fraction: float
    X: int

    @property
    def is_cm(self) -> bool:
        return self.status == "cm"


def cm_detect(f: EigenvalueTable, X: int) -> CMResult:
    """Classify by the fraction of good primes p <= X with a(p) == 0."""
    if X > f.n_max:
        raise ValueError(f"X={X} exceeds n_max={f.n_max}")
    good = [p for p in density.primes_up_to(X) if f.is_good(p)]
    if not good:
        raise ValueError(f"no good primes up to X={X}")
    frac = sum(1 for p in good if f[p] == 0) / len(good)
    if frac > CM_THRESHOLD:
        return CMResult("cm", frac, X)
    if frac < NOT_CM_THRESHOLD:
        return CMResult("not_cm", frac, X)
    raise CMInconclusive(frac, X)


@dataclass(frozen=True)
class TwistResult:
    status: str  # "twist_equivalent" or "not_twist"
    witness: int | None = None  # first good prime with |lambda_f| != |lambda_g|

    @property
    def is_twist(self) -> bool:
        return self.status == "twist_equivalent"


def twist_detect(f: EigenvalueTable, g: EigenvalueTable, X: int) -> TwistResult:
    """Twist-equivalent iff |lambda_f(p)| == |lambda_g(p)| at every common good p <= X."""
    if X > min(f.n_max, g.n_max):
        raise ValueError(f"X={X} exceeds the available coefficients")
    if f.weight != g.weight:
        return TwistResult("not_twist")
    for p in good_primes(f, g, X)[0]:
        if f[p] * f[p] != g[p] * g[p]:
            return TwistResult("not_twist", p)
    return TwistResult("twist_equivalent")


def check_square_hypotheses(f: EigenvalueTable, g: EigenvalueTable, X: int) -> None:
    """Raise HypothesisError unless neither form has CM and they are not twists."""
    for t in (f, g):
        try:
            cm = cm_detect(t, X)
        except CMInconclusive as exc:
            raise HypothesisError(
                f"cannot decide whether {t.label} has complex multiplication: {exc}"
            ) from exc
        if cm.is_cm:
            raise HypothesisError(
                f"squared comparison requires forms without complex multiplication; "
                f"{t.label} has a(p) = 0 for {cm.fraction:.1%} of good primes up to {X}"
            )
    tw = twist_detect(f, g, X)
    if tw.is_twist:
        raise HypothesisError(
            f"squared comparison requires that neither form is a quadratic twist of "
            f"the other; |lambda| of {f.label} and {g.label} agree at every good prime up to {X}"
        )


# -- moment sums ---------------------------------------------------------------


def _delta(f: EigenvalueTable, g: EigenvalueTable, p: int, squared: bool) -> float:
    D, Q = _diff(f, g, p, squared)
    return div_sqrt(D, Q)


def _average(values: list[float]) -> float:
    return math.fsum(values) / len(values) if values else float("nan")


def proposition_ratio(
    f: EigenvalueTable,
    g: EigenvalueTable,
    s: float | None,
    X: int,
    squared: bool = False,
) -> float:
    """sum (lambda_f - lambda_g)^2 p^-s / sum p^-s over good p <= X.

    ``squared`` uses lambda^2 in place of lambda and enforces the no-CM and
    no-twist hypotheses. ``s=None`` gives the unweighted average over primes.
    """
    _check_bound(f, g, X)
    if squared:
        check_square_hypotheses(f, g, X)
    good, _ = good_primes(f, g, X)
    terms = {p: _delta(f, g, p, squared) ** 2 for p in good}
    if s is None:
        return _average(list(terms.values()))
    num = density.dirichlet_sum(terms, s, X)
    den = density.dirichlet_sum({p: 1.0 for p in good}, s, X)
    return num / den


@dataclass
class MomentReport:
    f: str
    g: str
    s: float
    X: int
    sums: dict[str, float]
    ratios: dict[str, float]
    natural: dict[str, float]
    targets: dict[str, float] = field(default_factory=lambda: dict(MOMENT_TARGETS))
    expansion_residual: float = 0.0
    square_identity_checked: int = 0
    square_identity_failures: tuple[tuple[str, int], ...] = ()


def _square_identity(t: EigenvalueTable, primes: Iterable[int]) -> tuple[int, list[int]]:
    """Check a(p)^2 == p^(k-1) + a(p^2) wherever p^2 <= n_max."""
    checked, bad = 0, []
    for p in primes:
        if p * p > t.n_max:
            break
        checked += 1
        if t[p] * t[p] != p ** (t.weight - 1) + t[p * p]:
            bad.append(p)
    return checked, bad


def moment_report(f: EigenvalueTable, g: EigenvalueTable, s: float, X: int) -> MomentReport:
    _check_bound(f, g, X)
    density._check_s(s)
    good, _ = good_primes(f, g, X)
    lf = lambdas(f, good)
    lg = lambdas(g, good)
    w: dict[str, dict[int, float]] = {
        "lambda_f^2": {p: lf[p] ** 2 for p in good},
        "lambda_g^2": {p: lg[p] ** 2 for p in good},
        "lambda_f^4": {p: lf[p] ** 4 for p in good},
        "lambda_g^4": {p: lg[p] ** 4 for p in good},
        "sym2_f": {p: sym_power_lambda(f[p], p, f.weight, f.level, 2) for p in good},
        "sym2_g": {p: sym_power_lambda(g[p], p, g.weight, g.level, 2) for p in good},
        "sym4_f": {p: sym_power_lambda(f[p], p, f.weight, f.level, 4) for p in good},
        "sym4_g": {p: sym_power_lambda(g[p], p, g.weight, g.level, 4) for p in good},
        "lambda_f*lambda_g": {p: lf[p] * lg[p] for p in good},
        "lambda_f^2*lambda_g^2": {p: (lf[p] * lg[p]) ** 2 for p in good},
        "(lambda_f-lambda_g)^2": {p: _delta(f, g, p, False) ** 2 for p in good},
        "(lambda_f^2-lambda_g^2)^2": {p: _delta(f, g, p, True) ** 2 for p in good},
    }
    base = density.dirichlet_sum({p: 1.0 for p in good}, s, X)
    sums = {name: density.dirichlet_sum(v, s, X) for name, v in w.items()}
    ratios = {name: v / base for name, v in sums.items()}
    natural = {name: _average(list(v.values())) for name, v in w.items()}
    sums["1"] = base

    residual = sums["(lambda_f-lambda_g)^2"] - (
        sums["lambda_f^2"] + sums["lambda_g^2"] - 2 * sums["lambda_f*lambda_g"]
    )
    checked = 0
    failures: list[tuple[str, int]] = []
    for t in (f, g):
        n, bad = _square_identity(t, good)
        checked += n
        failures.extend((t.label, p) for p in bad)
    return MomentReport(
        f.label,
        g.label,
        s,
        X,
        sums,
        ratios,
        natural,
        expansion_residual=residual,
        square_identity_checked=checked,
        square_identity_failures=tuple(failures),
    )


# -- inequality chain ------------------------------------------------------------


@dataclass
class TheoremAudit:
    f: str
    g: str
    s: float
    X: int
    squared: bool
    lhs: float  # sum delta^2 p^-s over good primes
    in_F_lhs: float
    in_F_bound: float  # 16 sum_{F} p^-s
    out_F_lhs: float
    out_F_bound: float  # 4 sum_{not F} delta p^-s
    linear_term: float  # 4 sum delta p^-s, the bounded remainder
    chain_bound: float  # 32 sum_F p^-s + linear_term
    primes_checked: int
    term_bound_pass: int  # delta^2 <= 16
    complement_checked: int
    complement_pass: int  # delta^2 <= 4 delta off F
    density_F: float
    density_E: float
    natural_F: float
    degenerate: bool

    @property
    def per_term_ok(self) -> bool:
        return (
            self.term_bound_pass == self.primes_checked
            and self.complement_pass == self.complement_checked
        )

    @property
    def chain_ok(self) -> bool:
        tol = 1e-9 * max(1.0, abs(self.chain_bound))
        return (
            self.in_F_lhs <= self.in_F_bound + tol
            and self.out_F_lhs <= self.out_F_bound + tol
            and self.lhs <= self.chain_bound + tol
        )

    @property
    def density_ok(self) -> bool:
        return self.density_F >= DENSITY_FLOOR

    @property
    def equality_ok(self) -> bool:
        return self.density_E <= EQUALITY_CEILING


def theorem_audit(
    f: EigenvalueTable,
    g: EigenvalueTable,
    s: float,
    X: int,
    squared: bool = False,
) -> TheoremAudit:
    """Evaluate every step of the 1/16 density argument at finite (s, X).

    With delta = lambda_f - lambda_g (or the squared analogue) and F the
    primes where delta < 0: delta^2 <= 16 everywhere and delta^2 <= 4 delta
    off F are checked exactly per prime, then the summed chain
    sum delta^2 p^-s <= 32 sum_F p^-s + 4 sum delta p^-s is checked in floats.
    """
    _check_bound(f, g, X)
    density._check_s(s)
    if squared:
        check_square_hypotheses(f, g, X)
    part = partition(f, g, X, squared)
    good, _ = good_primes(f, g, X)
    in_F = set(part.F)

    term_pass = comp_checked = comp_pass = 0
    delta: dict[int, float] = {}
    for p in good:
        D, Q = _diff(f, g, p, squared)
        ok = D * D <= 16 * Q
        term_pass += ok
        if p not in in_F:
            comp_checked += 1
            # D >= 0 here, so delta <= 4 iff D^2 <= 16 Q.
            comp_pass += D >= 0 and ok
        delta[p] = div_sqrt(D, Q)

    def dsum(weights):
        return density.dirichlet_sum(weights, s, X)

    lhs = dsum({p: d * d for p, d in delta.items()})
    sum_F = dsum({p: 1.0 for p in part.F})
    in_F_lhs = dsum({p: delta[p] ** 2 for p in part.F})
    comp = [p for p in good if p not in in_F]
    out_F_lhs = dsum({p: delta[p] ** 2 for p in comp})
    out_F_bound = 4 * dsum({p: delta[p] for p in comp})
    linear = 4 * dsum(delta)
    return TheoremAudit(
        f.label,
        g.label,
        s,
        X,
        squared,
        lhs=lhs,
        in_F_lhs=in_F_lhs,
        in_F_bound=16 * sum_F,
        out_F_lhs=out_F_lhs,
        out_F_bound=out_F_bound,
        linear_term=linear,
        chain_bound=32 * sum_F + linear,
        primes_checked=len(good),
        term_bound_pass=term_pass,
        complement_checked=comp_checked,
        complement_pass=comp_pass,
        density_F=density.analytic_density_proxy(in_F, s, X).value,
        density_E=density.analytic_density_proxy(set(part.E), s, X).value,
        natural_F=density.natural_density(in_F, X),
        degenerate=not part.F and not part.Fprime,
    )
