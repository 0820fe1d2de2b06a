import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hecke_dominance.catalog import DeltaTimes, EigenvalueTable, EtaQuotient, builtin_catalog, expand, get_form
from hecke_dominance.errors import AuditError, TableFormatError
from hecke_dominance.io import (
    cached_expand,
    dumps_table,
    load_table,
    loads_table,
    recipe_from_str,
    recipe_to_str,
    save_table,
)


def test_csv_layout():
    text = dumps_table(expand(get_form("1.12.delta"), 3))
    rows = [line for line in text.splitlines() if not line.startswith("#")]
    assert rows == ["1,1", "2,-24", "3,252"]
    assert "# weight=12" in text
    head = dumps_table(expand(get_form("11.2.eta"), 5)).splitlines()
    assert "# weight=2" in head and "# level=11" in head


@pytest.mark.parametrize("fmt", ["csv", "json"])
@pytest.mark.parametrize("spec", builtin_catalog(), ids=str)
def test_round_trip(tmp_path, spec, fmt):
    t = expand(spec, 1000)
    path = tmp_path / f"t.{fmt}"
    save_table(t, path)
    back = load_table(path)
    assert back == t
    assert back.coeffs == t.coeffs and back.spec == t.spec


def test_big_coefficients_survive_json():
    t = expand(get_form("1.26.delta_e4e4e6"), 200)
    assert max(abs(c) for c in t.coeffs) >= 1 << 53
    data = json.loads(dumps_table(t, "json"))
    assert any(isinstance(c, str) for c in data["coefficients"])
    assert loads_table(dumps_table(t, "json")).coeffs == t.coeffs


def _corrupt_csv(n_max=50, n=6, value=0):
    lines = dumps_table(expand(get_form("1.12.delta"), n_max)).splitlines()
    out = []
    for line in lines:
        if line.startswith(f"{n},"):
            line = f"{n},{value}"
        out.append(line)
    return "\n".join(out) + "\n"


def test_corrupted_table_rejected_with_counterexample(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(_corrupt_csv())
    with pytest.raises(AuditError) as info:
        load_table(path)
    assert info.value.report.check == "multiplicativity"
    assert info.value.report.indices == (2, 3)


def test_audit_can_be_skipped():
    t = loads_table(_corrupt_csv(), audit_bound=None)
    assert t[6] == 0


@pytest.mark.parametrize(
    "text,line",
    [
        ("# label=x\n# weight=12\n# level=1\n1,1\n2,abc\n", 5),
        ("# label=x\n# weight=12\n# level=1\n1,1\n3,252\n", 5),
        ("# label=x\n# weight=12\n# level=1\n1,1,1\n", 4),
        ("# label=x\n# weight=13\n# level=1\n1,1\n", 2),
        ("# label=x\n# weight=12\n# level=1\n# n_max=5\n1,1\n", 4),
        ("# label=x\n# weight=12\n# level=1\n1,0.5\n", 4),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(TableFormatError) as info:
        loads_table(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_missing_fields_and_empty_table():
    with pytest.raises(TableFormatError):
        loads_table("# weight=12\n# level=1\n1,1\n")
    with pytest.raises(TableFormatError):
        loads_table("# label=x\n# weight=12\n# level=1\n")


def test_plain_json_accepted():
    t = expand(get_form("11.2.eta"), 100)
    text = json.dumps({"label": "ext", "weight": 2, "level": 11, "coefficients": list(t.coeffs[1:])})
    back = loads_table(text)
    assert back.coeffs == t.coeffs and back.spec.recipe is None


def test_json_rejects_non_integers():
    with pytest.raises(TableFormatError):
        loads_table(json.dumps({"label": "x", "weight": 12, "level": 1, "coefficients": [1, -24.0]}))
    with pytest.raises(TableFormatError):
        loads_table('{"label": "x", ')


def test_recipe_codec():
    assert recipe_to_str(EtaQuotient(((1, 2), (11, 2)))) == "eta:1^2,11^2"
    assert recipe_from_str("delta:1,0") == DeltaTimes(1, 0)
    with pytest.raises(ValueError):
        recipe_from_str("theta:3")


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-(2**80), 2**80), min_size=1, max_size=30), st.sampled_from(["csv", "json"]))
def test_codecs_round_trip_arbitrary_integers(values, fmt):
    spec = get_form("1.12.delta")
    t = EigenvalueTable(spec, len(values), (0, *values))
    assert loads_table(dumps_table(t, fmt), audit_bound=None) == t


def test_cache_reuses_and_truncates(tmp_path):
    spec = get_form("11.2.eta")
    big = cached_expand(spec, 500, tmp_path)
    assert (tmp_path / "11.2.eta.500.csv").exists()
    small = cached_expand(spec, 100, tmp_path)
    assert small.coeffs == big.coeffs[:101]
    assert not (tmp_path / "11.2.eta.100.csv").exists()
    assert not list(tmp_path.glob("*.tmp"))


def test_cache_rebuilds_corrupt_entry(tmp_path):
    spec = get_form("1.12.delta")
    (tmp_path / "1.12.delta.50.csv").write_text(_corrupt_csv(50))
    t = cached_expand(spec, 50, tmp_path)
    assert t.coeffs == expand(spec, 50).coeffs
    assert load_table(tmp_path / "1.12.delta.50.csv").coeffs == t.coeffs
