import dataclasses

import pytest

from hecke_dominance.catalog import (
    DeltaTimes,
    EigenvalueTable,
    EtaQuotient,
    FormSpec,
    audit_hecke,
    builtin_catalog,
    elliptic_ap,
    expand,
    get_form,
)
from hecke_dominance.density import primes_up_to
from hecke_dominance.errors import AuditError, UnsupportedRecipe
from hecke_dominance.qseries import eisenstein, pow

import oracles


def test_catalog_contents():
    specs = {s.label: s for s in builtin_catalog()}
    assert specs["1.12.delta"].weight == 12 and specs["1.12.delta"].level == 1
    assert specs["27.2.eta"].cm_expected
    assert all(s.weight % 2 == 0 for s in specs.values())
    assert sorted(s.weight for s in specs.values() if s.level == 1) == [12, 16, 18, 20, 22, 26]
    assert sorted(s.level for s in specs.values() if s.weight == 2) == [11, 14, 15, 20, 24, 27, 32, 36]
    assert sum(s.cm_expected for s in specs.values()) == 3


def test_formspec_validation():
    with pytest.raises(ValueError):
        FormSpec("bad", 3, 1)
    with pytest.raises(ValueError):
        FormSpec("bad", 16, 1, DeltaTimes(0, 0))
    with pytest.raises(ValueError):  # scale 3 does not divide 11
        FormSpec("bad", 2, 11, EtaQuotient(((1, 2), (3, 2))))
    with pytest.raises(UnsupportedRecipe):  # 2 + 2 is not divisible by 24
        FormSpec("bad", 2, 1, EtaQuotient(((1, 2), (1, 2))))


def test_expand_delta_small():
    t = expand(get_form("1.12.delta"), 5)
    assert t.coeffs[1:] == (1, -24, 252, -1472, 4830)


def test_expand_level_11_small():
    t = expand(get_form("11.2.eta"), 7)
    assert [t[p] for p in (2, 3, 5, 7)] == [-2, -1, 1, -2]


@pytest.mark.parametrize("spec", [s for s in builtin_catalog() if isinstance(s.recipe, EtaQuotient)], ids=str)
def test_eta_quotients_match_brute_force(spec):
    t = expand(spec, 80)
    assert list(t.coeffs) == oracles.eta_quotient(spec.recipe.factors, 80)


def test_normalized(tables):
    assert all(t[1] == 1 for t in tables.values())


def test_weight16_against_independent_path():
    n = 50
    t = expand(get_form("1.16.delta_e4"), n)
    assert t[2] == 216
    e4, e6 = eisenstein(4, n), eisenstein(6, n)
    via_eisenstein = ((pow(e4, 3) - pow(e6, 2)).exact_div(1728)) * e4
    assert t.coeffs == via_eisenstein.coeffs


def test_level_one_weights_against_eisenstein_products():
    n = 40
    e4, e6 = eisenstein(4, n), eisenstein(6, n)
    delta = (pow(e4, 3) - pow(e6, 2)).exact_div(1728)
    for spec in builtin_catalog():
        if isinstance(spec.recipe, DeltaTimes):
            r = spec.recipe
            expected = delta * pow(e4, r.e4) * pow(e6, r.e6)
            assert expand(spec, n).coeffs == expected.coeffs, spec.label


def test_elliptic_ap_examples():
    assert elliptic_ap(2) == -2
    assert elliptic_ap(3) == -1
    assert elliptic_ap(5) == 1
    with pytest.raises(ValueError):
        elliptic_ap(11)
    with pytest.raises(ValueError):
        elliptic_ap(9)


def test_elliptic_ap_against_full_enumeration():
    for p in primes_up_to(150):
        if p != 11:
            assert elliptic_ap(p) == p + 1 - oracles.point_count_11a(p)


def test_level11_matches_point_counts(ell11):
    for p in primes_up_to(1000):
        if p != 11:
            assert ell11[p] == elliptic_ap(p), p


def test_audit_passes_delta(delta):
    report = audit_hecke(delta, 10**4)
    assert report.ok, str(report)


def test_audit_detects_corruption(delta):
    coeffs = list(delta.coeffs[:101])
    coeffs[6] = 0
    bad = EigenvalueTable(delta.spec, 100, tuple(coeffs))
    report = audit_hecke(bad, 100)
    assert not report.ok
    assert report.check == "multiplicativity"
    assert report.indices == (2, 3)


def test_audit_detects_recurrence_and_normalization(delta):
    coeffs = list(delta.coeffs[:101])
    coeffs[4] += 1
    # Below 8 the only multiplicative relation is a(6) = a(2)a(3).
    report = audit_hecke(EigenvalueTable(delta.spec, 100, tuple(coeffs)), 7)
    assert report.check == "prime-power recurrence" and report.indices == (2, 2)
    coeffs = list(delta.coeffs[:101])
    coeffs[1] = 2
    report = audit_hecke(EigenvalueTable(delta.spec, 100, tuple(coeffs)), 100)
    assert report.check == "normalization"


def test_audit_skips_bad_prime(ell11):
    # At p = 11 | N the good-prime recurrence would predict a(121) = 1 - 11.
    assert ell11[121] == ell11[11] ** 2 == 1
    assert audit_hecke(ell11, 1000).ok


def test_expand_raises_on_failed_audit(monkeypatch):
    import hecke_dominance.catalog as cat

    spec = get_form("1.12.delta")
    real = cat._expand_delta

    def corrupt(recipe, n_max):
        c = real(recipe, n_max)
        c[6] = 0
        return c

    monkeypatch.setattr(cat, "_expand_delta", corrupt)
    with pytest.raises(AuditError) as info:
        expand(spec, 50)
    assert info.value.report.indices == (2, 3)


def test_expand_rejects_unsupported():
    spec = FormSpec("ext", 2, 11)
    with pytest.raises(UnsupportedRecipe):
        expand(spec, 10)
    with pytest.raises(ValueError):
        expand(get_form("11.2.eta"), 0)


def test_negative_eta_exponent_supported():
    # eta(z)^-1 eta(z)^25 == eta(z)^24, i.e. Delta again.
    spec = FormSpec("delta-odd", 12, 1, EtaQuotient(((1, 25), (1, -1))))
    t = expand(spec, 30)
    assert t.coeffs == expand(get_form("1.12.delta"), 30).coeffs


def test_cm_forms_vanish_at_inert_primes(tables):
    inert = {
        "27.2.eta": lambda p: p % 3 == 2,
        "36.2.eta": lambda p: p % 3 == 2,
        "32.2.eta": lambda p: p % 4 == 3,
    }
    for label, is_inert in inert.items():
        t = tables[label]
        good = [p for p in primes_up_to(10**4) if t.is_good(p)]
        assert all(t[p] == 0 for p in good if is_inert(p)), label
        frac = sum(t[p] == 0 for p in good) / len(good)
        assert 0.45 <= frac <= 0.55


def test_tables_are_frozen(delta):
    with pytest.raises(dataclasses.FrozenInstanceError):
        delta.n_max = 3


@pytest.mark.slow
def test_default_eta_bound_expands():
    t = expand(get_form("11.2.eta"))
    assert t.n_max == 10**5
    for p in (99989, 99991):
        assert t[p] == elliptic_ap(p)
