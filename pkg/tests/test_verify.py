import dataclasses
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hecke_dominance.catalog import EigenvalueTable, FormSpec, builtin_catalog
from hecke_dominance.density import primes_up_to
from hecke_dominance.errors import CMInconclusive, HypothesisError
from hecke_dominance.hecke import normalized_value
from hecke_dominance.verify import (
    MOMENT_TARGETS,
    cm_detect,
    moment_report,
    partition,
    proposition_ratio,
    theorem_audit,
    twist_detect,
)

LABELS = [s.label for s in builtin_catalog()]


def test_partition_self_is_all_equal(delta):
    part = partition(delta, delta, 10**4)
    assert part.F == part.Fprime == ()
    assert len(part.E) == 1229 and part.excluded == ()


def test_partition_counts_delta_wt16(delta, wt16):
    c = partition(delta, wt16, 10**4).counts()
    assert c["F"] + c["Fprime"] + c["E"] == 1229
    assert c["excluded"] == 0


def test_delta_beats_level11_at_two(delta, ell11):
    part = partition(delta, ell11, 100)
    assert 2 in part.Fprime
    assert part.excluded == (11,)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(LABELS), st.sampled_from(LABELS), st.integers(2, 3000), st.booleans())
def test_partition_is_disjoint_cover_and_antisymmetric(tables, lf, lg, X, squared):
    f, g = tables[lf], tables[lg]
    part = partition(f, g, X, squared)
    cells = [set(part.F), set(part.Fprime), set(part.E), set(part.excluded)]
    assert sum(map(len, cells)) == len(set().union(*cells))
    assert set().union(*cells) == set(primes_up_to(X))
    rev = partition(g, f, X, squared)
    assert (rev.F, rev.Fprime, rev.E) == (part.Fprime, part.F, part.E)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(LABELS), st.sampled_from(LABELS))
def test_partition_agrees_with_float_signs(tables, lf, lg):
    f, g = tables[lf], tables[lg]
    part = partition(f, g, 2000)
    for p in part.F:
        assert normalized_value(f[p], p, f.weight) <= normalized_value(g[p], p, g.weight)
    for p in part.Fprime:
        assert normalized_value(f[p], p, f.weight) >= normalized_value(g[p], p, g.weight)


def test_partition_rejects_large_X(delta):
    with pytest.raises(ValueError):
        partition(delta, delta, 10**4 + 1)


def test_proposition_ratio(delta, wt16):
    assert proposition_ratio(delta, delta, 1.05, 10**4) == 0.0
    assert 1.5 <= proposition_ratio(delta, wt16, 1.05, 10**4) <= 2.5
    assert 1.85 <= proposition_ratio(delta, wt16, None, 10**4) <= 2.15


def test_moment_report(tables):
    rep = moment_report(tables["1.12.delta"], tables["11.2.eta"], 1.05, 10**4)
    assert abs(rep.expansion_residual) <= 1e-9 * max(1.0, rep.sums["1"])
    assert rep.square_identity_checked == 2 * 24  # common good primes <= 100
    assert rep.square_identity_failures == ()
    assert set(rep.ratios) == set(MOMENT_TARGETS)
    assert 0.9 <= rep.natural["lambda_f^2"] <= 1.1
    # sym^2 lambda is lambda^2 - 1, so its average tracks the second moment.
    assert rep.natural["sym2_f"] == pytest.approx(rep.natural["lambda_f^2"] - 1, abs=1e-12)


@pytest.mark.parametrize("lf,lg", [("1.12.delta", "1.16.delta_e4"), ("11.2.eta", "27.2.eta"), ("1.18.delta_e6", "32.2.eta")])
def test_theorem_audit(tables, lf, lg):
    a = theorem_audit(tables[lf], tables[lg], 1.05, 10**4)
    assert a.per_term_ok and a.chain_ok
    assert a.density_ok and a.equality_ok
    assert not a.degenerate
    assert a.lhs == pytest.approx(a.in_F_lhs + a.out_F_lhs, rel=1e-12)


def test_theorem_audit_degenerate(delta):
    a = theorem_audit(delta, delta, 1.05, 1000)
    assert a.degenerate and a.lhs == 0.0 and a.density_F == 0.0


def test_cm_detect(tables):
    for label in ("27.2.eta", "32.2.eta", "36.2.eta"):
        assert cm_detect(tables[label], 10**4).is_cm
    for label in ("1.12.delta", "1.16.delta_e4"):
        res = cm_detect(tables[label], 10**4)
        assert res.status == "not_cm" and res.fraction == 0.0
    # Weight-2 non-CM forms still vanish at scattered supersingular primes.
    assert 0 < cm_detect(tables["14.2.eta"], 10**4).fraction < 0.1


def test_cm_detect_inconclusive(delta):
    coeffs = list(delta.coeffs)
    for i, p in enumerate(primes_up_to(10**4)):
        if i % 4 == 0:
            coeffs[p] = 0
    fake = EigenvalueTable(FormSpec("fake", 12, 1), delta.n_max, tuple(coeffs))
    with pytest.raises(CMInconclusive):
        cm_detect(fake, 10**4)


def test_twist_detect(tables):
    f = tables["11.2.eta"]
    assert twist_detect(f, f, 1000).is_twist
    assert twist_detect(tables["1.12.delta"], f, 1000).status == "not_twist"
    res = twist_detect(f, tables["14.2.eta"], 1000)
    assert not res.is_twist and res.witness is not None and res.witness <= 100


def test_quadratic_twist_is_detected(ell11):
    # Twisting by the character mod 4 flips signs at p = 3 (mod 4).
    coeffs = [0] + [c if n % 4 == 1 else (-c if n % 4 == 3 else 0) for n, c in enumerate(ell11.coeffs) if n]
    twisted = EigenvalueTable(FormSpec("tw", 2, 176), ell11.n_max, tuple(coeffs))
    assert twist_detect(ell11, twisted, 1000).is_twist


def test_squared_mode_refuses(tables):
    with pytest.raises(HypothesisError, match="complex multiplication"):
        proposition_ratio(tables["27.2.eta"], tables["11.2.eta"], 1.05, 10**4, squared=True)
    with pytest.raises(HypothesisError, match="quadratic twist"):
        theorem_audit(tables["11.2.eta"], tables["11.2.eta"], 1.05, 10**4, squared=True)


def test_squared_mode_allowed(tables):
    r = proposition_ratio(tables["11.2.eta"], tables["14.2.eta"], None, 10**4, squared=True)
    assert 1.8 <= r <= 2.2
    a = theorem_audit(tables["11.2.eta"], tables["14.2.eta"], 1.05, 10**4, squared=True)
    assert a.per_term_ok and a.chain_ok


def test_reports_are_plain_data(delta, wt16):
    a = theorem_audit(delta, wt16, 1.1, 1000)
    d = dataclasses.asdict(a)
    assert all(not isinstance(v, float) or math.isfinite(v) for v in d.values())
