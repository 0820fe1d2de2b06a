"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data or audit failure (including a
failed density verdict), 3 the pair does not satisfy the hypotheses needed
for the requested check.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import density, verify
from .catalog import EigenvalueTable, builtin_catalog, expand, get_form
from .errors import AuditError, HypothesisError, TableFormatError
from .io import CACHE_ENV, cached_expand, default_cache_dir, dumps_table, load_table, save_table

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_HYPOTHESIS = 0, 1, 2, 3
DEFAULT_X = 10**4
SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    x_bound: int | None = None
    s_grid: tuple[float, ...] = density.DEFAULT_S_GRID
    fmt: str = "text"
    jobs: int = 1
    cache_dir: Path | None = None
    use_cache: bool = True
    forms: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.x_bound is not None and self.x_bound < 2:
            raise UsageError(f"--x-bound must be >= 2, got {self.x_bound}")
        if not self.s_grid or any(not s > 1 for s in self.s_grid):
            raise UsageError(f"every s in the grid must be > 1, got {self.s_grid}")
        if self.fmt not in ("text", "json", "csv"):
            raise UsageError(f"unknown format {self.fmt!r}")
        if self.jobs < 1:
            raise UsageError("--jobs must be >= 1")


def parse_s_grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad s-grid {text!r}; expected comma-separated reals") from None


def read_config_file(path) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


_CONFIG_KEYS = {"x_bound", "s_grid", "format", "jobs", "cache_dir"}


def build_config(args: argparse.Namespace) -> RunConfig:
    conf: dict[str, str] = {}
    if args.config:
        try:
            conf = read_config_file(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        unknown = set(conf) - _CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")

    def pick(name, convert):
        value = getattr(args, name, None)
        if value is not None:
            return value
        key = "format" if name == "fmt" else name
        if key in conf:
            try:
                return convert(conf[key])
            except ValueError:
                raise UsageError(f"bad config value {key}={conf[key]!r}") from None
        return None

    cache_dir = args.cache_dir or os.environ.get(CACHE_ENV) or conf.get("cache_dir")
    s_grid = pick("s_grid", parse_s_grid)
    return RunConfig(
        x_bound=pick("x_bound", int),
        s_grid=s_grid if s_grid is not None else density.DEFAULT_S_GRID,
        fmt=pick("fmt", str) or "text",
        jobs=pick("jobs", int) or 1,
        cache_dir=Path(cache_dir) if cache_dir else None,
        use_cache=not args.no_cache,
    )


# -- form resolution -------------------------------------------------------------


def _expand_job(label: str, n_max: int, cache_dir, use_cache: bool) -> EigenvalueTable:
    spec = get_form(label)
    if use_cache:
        return cached_expand(spec, n_max, cache_dir or default_cache_dir())
    return expand(spec, n_max)


def resolve_forms(selectors: list[str], cfg: RunConfig) -> tuple[list[EigenvalueTable], int]:
    """Turn labels or table paths into tables covering a common prime bound X."""
    loaded: dict[int, EigenvalueTable] = {}
    labels: dict[int, str] = {}
    known = {s.label for s in builtin_catalog()}
    for i, sel in enumerate(selectors):
        if sel in known:
            labels[i] = sel
        elif Path(sel).is_file():
            loaded[i] = load_table(sel)
        else:
            raise UsageError(f"unknown form {sel!r}: not a catalog label or a table file")
    X = cfg.x_bound
    if X is None:
        X = min((t.n_max for t in loaded.values()), default=DEFAULT_X)
    for i, t in loaded.items():
        if t.n_max < X:
            raise ValueError(f"table {t.label} has n_max={t.n_max} < X={X}")
    todo = sorted(set(labels.values()))
    if cfg.jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.jobs, len(todo))) as pool:
            futures = {
                lab: pool.submit(_expand_job, lab, X, cfg.cache_dir, cfg.use_cache) for lab in todo
            }
            built = {lab: fut.result() for lab, fut in futures.items()}
    else:
        built = {lab: _expand_job(lab, X, cfg.cache_dir, cfg.use_cache) for lab in todo}
    tables = [loaded[i] if i in loaded else built[labels[i]] for i in range(len(selectors))]
    return tables, X


# -- report builders --------------------------------------------------------------


def compare_record(f: EigenvalueTable, g: EigenvalueTable, X: int, s_grid, squared: bool) -> dict:
    if squared:
        verify.check_square_hypotheses(f, g, X)
    part = verify.partition(f, g, X, squared)
    sets = {"F": set(part.F), "Fprime": set(part.Fprime), "E": set(part.E)}
    grid = []
    for s in s_grid:
        row = {"s": s}
        for name, members in sets.items():
            row[name] = density.analytic_density_proxy(members, s, X).value
        grid.append(row)
    natural = {name: density.natural_density(members, X) for name, members in sets.items()}
    degenerate = not part.F and not part.Fprime
    passed = all(row["F"] >= verify.DENSITY_FLOOR for row in grid)
    eq_ok = all(row["E"] <= verify.EQUALITY_CEILING for row in grid)
    verdict = "DEGENERATE" if degenerate else ("PASS" if passed and eq_ok else "FAIL")
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "compare",
        "f": f.label,
        "g": g.label,
        "X": X,
        "squared": squared,
        "counts": part.counts(),
        "analytic": grid,
        "natural": natural,
        "floor": verify.DENSITY_FLOOR,
        "equality_ceiling": verify.EQUALITY_CEILING,
        "verdict": verdict,
    }


# (report key, moment name, target) for the headline ratio table.
_HEADLINE = (
    ("diff_second_moment", "(lambda_f-lambda_g)^2", 2.0),
    ("square_diff_second_moment", "(lambda_f^2-lambda_g^2)^2", 2.0),
    ("cross_term", "lambda_f*lambda_g", 0.0),
    ("square_cross_term", "lambda_f^2*lambda_g^2", 1.0),
)


def verify_record(f: EigenvalueTable, g: EigenvalueTable, X: int, s_grid) -> dict:
    try:
        verify.check_square_hypotheses(f, g, X)
        square_refusal = None
    except HypothesisError as exc:
        square_refusal = str(exc)

    moments = [verify.moment_report(f, g, s, X) for s in s_grid]
    rows = []
    for key, name, target in _HEADLINE:
        row = {
            "quantity": key,
            "moment": name,
            "target": target,
            "analytic": {repr(m.s): m.ratios[name] for m in moments},
            "natural": moments[0].natural[name],
            "applicable": not (key.startswith("square") and square_refusal),
        }
        rows.append(row)
    moment_rows = [
        {
            "moment": name,
            "target": target,
            "analytic": {repr(m.s): m.ratios[name] for m in moments},
            "natural": moments[0].natural[name],
        }
        for name, target in verify.MOMENT_TARGETS.items()
    ]
    audits = []
    for squared in (False, True):
        if squared and square_refusal:
            continue
        for s in s_grid:
            a = verify.theorem_audit(f, g, s, X, squared)
            audits.append(
                {
                    **asdict(a),
                    "per_term_rate": a.term_bound_pass / a.primes_checked if a.primes_checked else 1.0,
                    "complement_rate": (
                        a.complement_pass / a.complement_checked if a.complement_checked else 1.0
                    ),
                    "chain_ok": a.chain_ok,
                    "density_ok": a.density_ok,
                    "equality_ok": a.equality_ok,
                }
            )
    identity_failures = [list(x) for m in moments[:1] for x in m.square_identity_failures]
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "f": f.label,
        "g": g.label,
        "X": X,
        "s_grid": list(s_grid),
        "ratios": rows,
        "moments": moment_rows,
        "audits": audits,
        "square_mode_refusal": square_refusal,
        "square_identity_checked": moments[0].square_identity_checked,
        "square_identity_failures": identity_failures,
        "expansion_residual": max(abs(m.expansion_residual) for m in moments),
        "degenerate": all(a["degenerate"] for a in audits),
    }


# -- rendering ----------------------------------------------------------------------


def _pct(x: float) -> str:
    return f"{100 * x:.0f}%" if x in (0.0, 1.0) else f"{100 * x:.2f}%"


def render_compare_text(rec: dict) -> str:
    mode = "lambda^2" if rec["squared"] else "lambda"
    rel = "<"
    c = rec["counts"]
    out = [
        f"pair: f={rec['f']}  g={rec['g']}  X={rec['X']}  comparing {mode}",
        f"|F|  (f {rel} g) = {c['F']}",
        f"|F'| (f > g) = {c['Fprime']}",
        f"|E|  (f = g) = {c['E']}",
        f"excluded bad primes = {c['excluded']}",
        "",
        f"{'s':>8}  {'proxy F':>10}  {'proxy F`':>10}  {'proxy E':>10}",
    ]
    for row in rec["analytic"]:
        out.append(f"{row['s']:>8g}  {row['F']:>10.6f}  {row['Fprime']:>10.6f}  {row['E']:>10.6f}")
    n = rec["natural"]
    out.append(f"{'natural':>8}  {n['F']:>10.6f}  {n['Fprime']:>10.6f}  {n['E']:>10.6f}")
    out.append("")
    if rec["verdict"] == "DEGENERATE":
        out.append("verdict: degenerate pair (lambda_f == lambda_g at every good prime); the bound needs distinct forms")
    else:
        out.append(f"verdict: density proxy >= 1/16: {rec['verdict']}")
    return "\n".join(out) + "\n"


def render_compare_csv(rec: dict) -> str:
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "F", "Fprime", "E"])
    for row in rec["analytic"]:
        w.writerow([repr(row["s"]), repr(row["F"]), repr(row["Fprime"]), repr(row["E"])])
    n = rec["natural"]
    w.writerow(["natural", repr(n["F"]), repr(n["Fprime"]), repr(n["E"])])
    return buf.getvalue()


def render_verify_text(rec: dict) -> str:
    grid = [repr(s) for s in rec["s_grid"]]
    out = [f"pair: f={rec['f']}  g={rec['g']}  X={rec['X']}", ""]
    head = f"{'quantity':<28}{'target':>8}" + "".join(f"{'s=' + s:>12}" for s in grid) + f"{'natural':>12}"
    out.append(head)
    for row in rec["ratios"]:
        if not row["applicable"]:
            out.append(f"{row['quantity']:<28}{row['target']:>8g}   (hypotheses not met)")
            continue
        vals = "".join(f"{row['analytic'][s]:>12.5f}" for s in grid)
        out.append(f"{row['quantity']:<28}{row['target']:>8g}{vals}{row['natural']:>12.5f}")
    if rec["square_mode_refusal"]:
        out.append(f"squared mode skipped: {rec['square_mode_refusal']}")
    out.append("")
    out.append(f"{'moment ratio':<28}{'target':>8}" + "".join(f"{'s=' + s:>12}" for s in grid) + f"{'natural':>12}")
    for row in rec["moments"]:
        vals = "".join(f"{row['analytic'][s]:>12.5f}" for s in grid)
        out.append(f"{row['moment']:<28}{row['target']:>8g}{vals}{row['natural']:>12.5f}")
    out.append("")
    out.append(
        f"a(p)^2 == p^(k-1) + a(p^2): {rec['square_identity_checked']} primes checked, "
        f"{len(rec['square_identity_failures'])} failures"
    )
    out.append("")
    out.append("inequality chain audit:")
    for a in rec["audits"]:
        mode = "squared" if a["squared"] else "plain"
        out.append(
            f"  {mode:<8} s={a['s']:<6g} |delta|<=4: {_pct(a['per_term_rate'])}  "
            f"delta^2<=4*delta off F: {_pct(a['complement_rate'])}  "
            f"chain: {'ok' if a['chain_ok'] else 'VIOLATED'}  "
            f"proxy F={a['density_F']:.5f} ({'>= 1/16' if a['density_ok'] else '< 1/16'})"
        )
    return "\n".join(out) + "\n"


def render_verify_csv(rec: dict) -> str:
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["quantity", "target", "s", "value"])
    for row in rec["ratios"] + rec["moments"]:
        if not row.get("applicable", True):
            continue
        name = row.get("quantity", row["moment"])
        for s, v in row["analytic"].items():
            w.writerow([name, repr(row["target"]), s, repr(v)])
        w.writerow([name, repr(row["target"]), "natural", repr(row["natural"])])
    return buf.getvalue()


def _emit(rec: dict, cfg: RunConfig, text_fn, csv_fn) -> None:
    if cfg.fmt == "json":
        sys.stdout.write(json.dumps(rec, indent=2) + "\n")
    elif cfg.fmt == "csv":
        sys.stdout.write(csv_fn(rec))
    else:
        sys.stdout.write(text_fn(rec))


# -- commands -------------------------------------------------------------------------


def cmd_list_forms(args, cfg: RunConfig) -> int:
    specs = builtin_catalog()
    if cfg.fmt == "json":
        rows = [
            {
                "label": s.label,
                "weight": s.weight,
                "level": s.level,
                "cm_expected": s.cm_expected,
                "twist_class": s.twist_class,
            }
            for s in specs
        ]
        sys.stdout.write(json.dumps(rows, indent=2) + "\n")
        return EXIT_OK
    for s in specs:
        cm = "cm" if s.cm_expected else "-"
        sys.stdout.write(f"{s.label} {s.weight} {s.level} {cm} {s.twist_class}\n")
    return EXIT_OK


def cmd_expand(args, cfg: RunConfig) -> int:
    try:
        spec = get_form(args.label)
    except KeyError:
        raise UsageError(f"unknown form label {args.label!r}; see list-forms") from None
    if args.n_max < 1:
        raise UsageError("n_max must be >= 1")
    table = _expand_job(spec.label, args.n_max, cfg.cache_dir, cfg.use_cache)
    fmt = "json" if cfg.fmt == "json" else "csv"
    if args.output:
        save_table(table, args.output, fmt if cfg.fmt != "text" else None)
    else:
        sys.stdout.write(dumps_table(table, fmt))
    return EXIT_OK


def cmd_compare(args, cfg: RunConfig) -> int:
    (f, g), X = resolve_forms([args.f, args.g], cfg)
    rec = compare_record(f, g, X, cfg.s_grid, args.squared)
    _emit(rec, cfg, render_compare_text, render_compare_csv)
    return {"PASS": EXIT_OK, "FAIL": EXIT_DATA, "DEGENERATE": EXIT_HYPOTHESIS}[rec["verdict"]]


def cmd_verify(args, cfg: RunConfig) -> int:
    (f, g), X = resolve_forms([args.f, args.g], cfg)
    rec = verify_record(f, g, X, cfg.s_grid)
    _emit(rec, cfg, render_verify_text, render_verify_csv)
    if rec["degenerate"]:
        return EXIT_HYPOTHESIS
    for a in rec["audits"]:
        if a["per_term_rate"] < 1 or a["complement_rate"] < 1 or not a["chain_ok"]:
            return EXIT_DATA
    if rec["square_identity_failures"]:
        return EXIT_DATA
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--x-bound", type=int, default=None, help="prime bound X")
    common.add_argument("--s-grid", type=parse_s_grid, default=None, help="comma-separated s > 1")
    common.add_argument("--format", dest="fmt", choices=["text", "json", "csv"], default=None)
    common.add_argument("--jobs", type=int, default=None, help="worker processes for expansions")
    common.add_argument("--cache-dir", default=None, help=f"table cache (env {CACHE_ENV})")
    common.add_argument("--no-cache", action="store_true", help="always expand from scratch")
    common.add_argument("--config", default=None, help="key=value configuration file")

    parser = _Parser(prog="hecke-dominance", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("list-forms", parents=[common], help="show the built-in catalog")
    p.set_defaults(func=cmd_list_forms)

    p = sub.add_parser("expand", parents=[common], help="write a coefficient table")
    p.add_argument("label")
    p.add_argument("n_max", type=int)
    p.add_argument("-o", "--output", default=None, help="output path (default: stdout)")
    p.set_defaults(func=cmd_expand)

    for name, func, helptext in (
        ("compare", cmd_compare, "dominance partition and density proxies"),
        ("verify", cmd_verify, "moment ratios and the inequality-chain audit"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("f", help="catalog label or table file")
        p.add_argument("g", help="catalog label or table file")
        if name == "compare":
            p.add_argument("--squared", action="store_true", help="compare lambda^2 instead of lambda")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HypothesisError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except AuditError as exc:
        print(f"audit failure: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (TableFormatError, ValueError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
