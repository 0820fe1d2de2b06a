"""Reading and writing eigenvalue tables, plus an on-disk expansion cache.

CSV layout::

    # label=1.12.delta
    # weight=12
    # level=1
    # n_max=3
    # version=1
    1,1
    2,-24
    3,252

Optional ``# recipe=``, ``# cm_expected=`` and ``# twist_class=`` headers
carry catalog metadata so that catalog tables round-trip exactly. The JSON
codec uses the same keys, with the coefficients in a ``coefficients`` list
holding a(1), ..., a(n_max).
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from pathlib import Path

from .catalog import (
    AUDIT_BOUND,
    DeltaTimes,
    EigenvalueTable,
    EtaQuotient,
    FormSpec,
    audit_hecke,
    expand,
)
from .errors import AuditError, TableFormatError

FORMAT_VERSION = 1
CACHE_ENV = "HECKE_DOMINANCE_CACHE"

_INT_RE = re.compile(r"[+-]?\d+")


def recipe_to_str(recipe) -> str | None:
    if isinstance(recipe, EtaQuotient):
        return "eta:" + ",".join(f"{d}^{r}" for d, r in recipe.factors)
    if isinstance(recipe, DeltaTimes):
        return f"delta:{recipe.e4},{recipe.e6}"
    return None


def recipe_from_str(text: str):
    kind, _, body = text.partition(":")
    try:
        if kind == "eta":
            factors = []
            for item in body.split(","):
                d, r = item.split("^")
                factors.append((int(d), int(r)))
            return EtaQuotient(tuple(factors))
        if kind == "delta":
            e4, e6 = body.split(",")
            return DeltaTimes(int(e4), int(e6))
    except ValueError:
        pass
    raise ValueError(f"unrecognized recipe {text!r}")


def _header(table: EigenvalueTable) -> dict:
    spec = table.spec
    h = {
        "label": spec.label,
        "weight": spec.weight,
        "level": spec.level,
        "n_max": table.n_max,
        "version": FORMAT_VERSION,
    }
    recipe = recipe_to_str(spec.recipe)
    if recipe:
        h["recipe"] = recipe
    h["cm_expected"] = spec.cm_expected
    h["twist_class"] = spec.twist_class
    return h


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _format_for(path: Path, fmt: str | None) -> str:
    if fmt:
        return fmt
    return "json" if Path(path).suffix.lower() == ".json" else "csv"


def dumps_table(table: EigenvalueTable, fmt: str = "csv") -> str:
    h = _header(table)
    if fmt == "json":
        h["coefficients"] = [str(c) if abs(c) >= 1 << 53 else c for c in table.coeffs[1:]]
        return json.dumps(h) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown table format {fmt!r}")
    lines = [f"# {k}={str(v).lower() if isinstance(v, bool) else v}" for k, v in h.items()]
    lines.extend(f"{n},{table.coeffs[n]}" for n in range(1, table.n_max + 1))
    return "\n".join(lines) + "\n"


def save_table(table: EigenvalueTable, path, fmt: str | None = None) -> None:
    """Write ``table`` as CSV (default) or JSON (``.json`` suffix or fmt="json")."""
    path = Path(path)
    _atomic_write(path, dumps_table(table, _format_for(path, fmt)))


def _parse_int(text: str, what: str, line: int | None) -> int:
    text = text.strip()
    if not _INT_RE.fullmatch(text):
        raise TableFormatError(f"{what} must be an integer, got {text!r}", line)
    return int(text)


def _parse_bool(text: str, line: int | None) -> bool:
    t = str(text).strip().lower()
    if t in ("true", "1", "yes"):
        return True
    if t in ("false", "0", "no"):
        return False
    raise TableFormatError(f"cm_expected must be a boolean, got {text!r}", line)


def _build(header: dict, coeffs: list[int], lines: dict, audit_bound: int | None) -> EigenvalueTable:
    for key in ("label", "weight", "level"):
        if key not in header:
            raise TableFormatError(f"missing header field {key!r}")
    weight = _parse_int(str(header["weight"]), "weight", lines.get("weight"))
    level = _parse_int(str(header["level"]), "level", lines.get("level"))
    if weight % 2:
        raise TableFormatError(f"odd weight {weight} is not supported", lines.get("weight"))
    recipe = None
    if header.get("recipe"):
        try:
            recipe = recipe_from_str(str(header["recipe"]))
        except ValueError as exc:
            raise TableFormatError(str(exc), lines.get("recipe")) from None
    cm = header.get("cm_expected", False)
    if not isinstance(cm, bool):
        cm = _parse_bool(cm, lines.get("cm_expected"))
    try:
        spec = FormSpec(
            str(header["label"]),
            weight,
            level,
            recipe,
            cm_expected=cm,
            twist_class=str(header.get("twist_class") or ""),
        )
    except ValueError as exc:
        raise TableFormatError(str(exc)) from None
    n_max = len(coeffs)
    if "n_max" in header:
        declared = _parse_int(str(header["n_max"]), "n_max", lines.get("n_max"))
        if declared != n_max:
            raise TableFormatError(f"header n_max={declared} but {n_max} rows", lines.get("n_max"))
    if n_max < 1:
        raise TableFormatError("table has no coefficients")
    table = EigenvalueTable(spec, n_max, (0, *coeffs))
    if audit_bound:
        report = audit_hecke(table, min(n_max, audit_bound))
        if not report.ok:
            raise AuditError(report)
    return table


def _loads_csv(text: str, audit_bound: int | None) -> EigenvalueTable:
    header: dict = {}
    lines: dict = {}
    coeffs: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if not sep:
                continue
            header[key.strip()] = value.strip()
            lines[key.strip()] = lineno
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise TableFormatError(f"expected 'n,a', got {line!r}", lineno)
        n = _parse_int(parts[0], "n", lineno)
        a = _parse_int(parts[1], "coefficient", lineno)
        if n != len(coeffs) + 1:
            raise TableFormatError(f"expected row n={len(coeffs) + 1}, got n={n}", lineno)
        coeffs.append(a)
    return _build(header, coeffs, lines, audit_bound)


def _loads_json(text: str, audit_bound: int | None) -> EigenvalueTable:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableFormatError(exc.msg, exc.lineno) from None
    if not isinstance(data, dict) or "coefficients" not in data:
        raise TableFormatError("JSON table needs a 'coefficients' list")
    coeffs = []
    for i, c in enumerate(data["coefficients"], start=1):
        if isinstance(c, bool) or not isinstance(c, (int, str)):
            raise TableFormatError(f"coefficient a({i}) must be an integer, got {c!r}")
        coeffs.append(c if isinstance(c, int) else _parse_int(c, f"a({i})", None))
    return _build(data, coeffs, {}, audit_bound)


def loads_table(text: str, audit_bound: int | None = AUDIT_BOUND) -> EigenvalueTable:
    if text.lstrip().startswith("{"):
        return _loads_json(text, audit_bound)
    return _loads_csv(text, audit_bound)


def load_table(path, audit_bound: int | None = AUDIT_BOUND) -> EigenvalueTable:
    """Parse a CSV or JSON table file and audit it up to min(n_max, audit_bound).

    Raises TableFormatError for malformed input and AuditError when a Hecke
    identity fails.
    """
    return loads_table(Path(path).read_text(encoding="utf-8"), audit_bound)


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "hecke_dominance"


def cached_expand(spec: FormSpec, n_max: int, cache_dir=None) -> EigenvalueTable:
    """``expand`` backed by a directory of CSV tables keyed on label and n_max.

    A cached table with at least ``n_max`` rows is truncated rather than
    recomputed; entries that fail to parse or audit are rebuilt.
    """
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    cache.mkdir(parents=True, exist_ok=True)
    best = None
    for path in cache.glob(f"{spec.label}.*.csv"):
        try:
            size = int(path.suffixes[-2].lstrip("."))
        except (ValueError, IndexError):
            continue
        if size >= n_max and (best is None or size < best[0]):
            best = (size, path)
    if best is not None:
        try:
            table = load_table(best[1])
        except (TableFormatError, AuditError, OSError):
            table = None  # unreadable entry: recompute and overwrite
        if table is not None and table.spec == spec:
            return EigenvalueTable(spec, n_max, table.coeffs[: n_max + 1])
    table = expand(spec, n_max)
    save_table(table, cache / f"{spec.label}.{n_max}.csv")
    return table
