"""``efp`` command line: constants, table, fit, verify, figure.

Exit codes: 0 success, 1 validation error, 2 numeric failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import harness
from .fisher_hartwig import ness_constants
from .symbol import ParameterError
from .verify import run_suite

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def read_config_file(path: str) -> dict[str, str]:
    """``key = value`` lines using the flag names (``beta-l = 0.5``)."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise harness.UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("_", "-").lower()] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--beta-l", type=float)
    common.add_argument("--beta-r", type=float)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--n-max", type=int)
    common.add_argument("--schedule", choices=sorted(harness.SCHEDULES))
    common.add_argument("--out")
    common.add_argument("--format", dest="fmt", choices=["csv", "json"])
    common.add_argument("--log-radius", type=int, help="number of log-symbol coefficients per side")
    common.add_argument("--config", help="key = value file; flags take precedence")

    parser = argparse.ArgumentParser(prog="efp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("constants", parents=[common], help="asymptotic constants G, Q, F")
    sub.add_parser("table", parents=[common], help="exact log P(n) against the asymptote")
    p_fit = sub.add_parser("fit", parents=[common], help="fit Q and log F from the table")
    p_fit.add_argument("--table", help="CSV written by 'efp table' to fit instead of recomputing")
    p_ver = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p_ver.add_argument("--suite", default=None, help="all | symbol | toeplitz | fh")
    p_fig = sub.add_parser("figure", parents=[common], help="symbol curves as (k, value) CSV")
    p_fig.add_argument("--which", default=None)
    p_fig.add_argument("--samples", type=int, default=None)
    return parser


_FILE_KEYS = {
    "beta-l": ("beta_l", float),
    "beta-r": ("beta_r", float),
    "lambda": ("lam", float),
    "n-max": ("n_max", int),
    "schedule": ("schedule", str),
    "out": ("out", str),
    "format": ("fmt", str),
    "log-radius": ("log_radius", int),
    "suite": ("suite", str),
    "which": ("which", str),
    "samples": ("samples", int),
    "table": ("table", str),
}


def merge_config(args: argparse.Namespace) -> argparse.Namespace:
    if not args.config:
        return args
    for key, raw in read_config_file(args.config).items():
        if key not in _FILE_KEYS:
            raise harness.UsageError(f"unknown configuration key {key!r}")
        attr, conv = _FILE_KEYS[key]
        if getattr(args, attr, None) is None:
            try:
                setattr(args, attr, conv(raw))
            except ValueError as exc:
                raise harness.UsageError(f"bad value for {key!r}: {raw!r}") from exc
    return args


def run_config(args: argparse.Namespace) -> harness.RunConfig:
    n_max = args.n_max if args.n_max is not None else 256
    schedule = harness.SCHEDULES[args.schedule or "geometric"](n_max)
    cfg = harness.RunConfig(
        beta_L=args.beta_l if args.beta_l is not None else harness.RunConfig.beta_L,
        beta_R=args.beta_r if args.beta_r is not None else harness.RunConfig.beta_R,
        lam=args.lam if args.lam is not None else harness.RunConfig.lam,
        n_schedule=schedule,
        log_radius=args.log_radius or 512,
        out=args.out,
        fmt=args.fmt or "csv",
    )
    cfg.validate()
    return cfg


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_constants(cfg: harness.RunConfig) -> int:
    report = harness.constants_report(cfg.params(), cfg.log_radius)
    if cfg.fmt == "json":
        _write(_json(report), cfg.out)
    else:
        flat = []
        for key, val in report.items():
            if isinstance(val, dict) and "re" in val:
                flat.append((key, fmt_float(val["re"]), fmt_float(val["im"])))
            elif isinstance(val, dict):
                for sub, v in val.items():
                    flat.append((f"{key}[{sub}]", fmt_float(v["re"]), fmt_float(v["im"])))
            else:
                flat.append((key, fmt_float(val), fmt_float(0.0)))
        _write(_csv(("quantity", "re", "im"), flat), cfg.out)
    return EXIT_OK


def _table_rows(cfg: harness.RunConfig):
    params = cfg.params()
    constants = ness_constants(params, cfg.log_radius)
    return harness.build_table(params, cfg.n_schedule, constants), constants


def cmd_table(cfg: harness.RunConfig) -> int:
    rows, _ = _table_rows(cfg)
    if cfg.fmt == "json":
        _write(_json({"rows": [r.__dict__ for r in rows]}), cfg.out)
    else:
        _write(
            _csv(harness.TABLE_COLUMNS, [[r.n] + [fmt_float(getattr(r, c)) for c in harness.TABLE_COLUMNS[1:]] for r in rows]),
            cfg.out,
        )
    return EXIT_OK


def read_table_csv(path: str) -> list[harness.EfpTableRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [
            harness.EfpTableRow(int(r["n"]), *(float(r[c]) for c in harness.TABLE_COLUMNS[1:]))
            for r in reader
        ]


def cmd_fit(cfg: harness.RunConfig, table: str | None = None) -> int:
    if table:
        rows = read_table_csv(table)
        constants = ness_constants(cfg.params(), cfg.log_radius)
    else:
        rows, constants = _table_rows(cfg)
    report = harness.fit_rows(rows, constants)
    if cfg.fmt == "json":
        _write(_json(report.to_dict()), cfg.out)
    else:
        d = report.to_dict()
        d["window"] = " ".join(map(str, d["window"]))
        _write(_csv(list(d), [[fmt_float(v) if isinstance(v, float) else v for v in d.values()]]), cfg.out)
    return EXIT_OK


def cmd_verify(cfg: harness.RunConfig, suite: str) -> int:
    try:
        checks = run_suite(suite, cfg.params())
    except KeyError:
        raise harness.UsageError(f"unknown suite {suite!r}; expected all, symbol, toeplitz or fh")
    summary = {
        "suite": suite,
        "passed": all(ok for _, ok, _ in checks),
        "checks": [{"name": n, "passed": bool(ok), "detail": d} for n, ok, d in checks],
    }
    if cfg.fmt == "json":
        _write(_json(summary), cfg.out)
    else:
        _write(_csv(("check", "passed", "detail"), [(n, "PASS" if ok else "FAIL", d) for n, ok, d in checks]), cfg.out)
    return EXIT_OK if summary["passed"] else EXIT_VERIFY


def cmd_figure(cfg: harness.RunConfig, which: str, samples: int) -> int:
    k, v = harness.figure_data(cfg.params(), which, samples)
    if cfg.fmt == "json":
        _write(_json({"which": which, "k": k.tolist(), "value": v.tolist()}), cfg.out)
    else:
        _write(_csv(("k", "value"), [(fmt_float(a), fmt_float(b)) for a, b in zip(k, v)]), cfg.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = merge_config(args)
        cfg = run_config(args)
        if args.command == "constants":
            return cmd_constants(cfg)
        if args.command == "table":
            return cmd_table(cfg)
        if args.command == "fit":
            return cmd_fit(cfg, getattr(args, "table", None))
        if args.command == "verify":
            return cmd_verify(cfg, args.suite or "all")
        if args.command == "figure":
            return cmd_figure(cfg, args.which or "symbol", args.samples or 1024)
    except (ParameterError, harness.UsageError, OSError) as exc:
        print(f"efp: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"efp: numeric failure during {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
