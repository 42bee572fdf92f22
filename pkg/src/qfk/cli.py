"""``qfk`` command-line driver.

Exit codes: 0 every check passed, 1 some check failed, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

from . import __version__
from .config import ConfigError, ExperimentConfig, load_config
from .presets import PRESET_DESCRIPTIONS, build_experiment, ladder_rows, run_checks

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
ORDER_WINDOW = (0.7, 1.3)


def _json_number(x):
    """NaN and infinities are not JSON; spell them as strings."""
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return _json_number(obj)


def dump_json(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _cell(x) -> str:
    return x if isinstance(x, str) else repr(float(x))


def dump_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["check", "anchor", "observed", "target", "pass"])
    for r in rows:
        writer.writerow([r["check"], r["anchor"], _cell(r["observed"]), _cell(r["target"]),
                         "true" if r["pass"] else "false"])
    return buf.getvalue()


def resolve_out_dir(cli_out: str | None, cfg: ExperimentConfig) -> str:
    return cli_out or cfg.out_dir or os.environ.get("QFK_OUT_DIR") or "."


def _write(out_dir: str, stem: str, csv_text: str, json_text: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    for ext, text in (("csv", csv_text), ("json", json_text)):
        with open(os.path.join(out_dir, f"{stem}.{ext}"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def run_report(cfg: ExperimentConfig) -> dict:
    records = [r.as_dict() for r in run_checks(build_experiment(cfg))]
    return {"version": __version__, "config": cfg.echo(), "checks": records,
            "all_pass": all(r["pass"] for r in records)}


def convergence_report(cfg: ExperimentConfig, ladder: list[float]) -> dict:
    rows = ladder_rows(build_experiment(cfg), ladder)
    records = []
    for kind in ("semigroup", "generator"):
        exact = rows[f"{kind}_exact"]
        for h, order in zip(rows["h"][1:], rows[f"{kind}_order"]):
            ok = exact or ORDER_WINDOW[0] <= order <= ORDER_WINDOW[1]
            records.append({"check": f"{kind}_order@h={h!r}", "anchor": "perturbed semigroup generator",
                            "observed": "exact" if exact else order,
                            "target": f"[{ORDER_WINDOW[0]}, {ORDER_WINDOW[1]}]", "pass": ok})
    return {"version": __version__, "config": cfg.echo(), "ladder": rows, "checks": records,
            "all_pass": all(r["pass"] for r in records)}


def parse_ladder(text: str, T: float) -> list[float]:
    try:
        hs = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"ladder must be comma-separated numbers: {text!r}") from exc
    if len(hs) < 3:
        raise ConfigError("ladder needs at least three step sizes")
    for h0, h1 in zip(hs, hs[1:]):
        if abs(h1 - h0 / 2) > 1e-12 * h0:
            raise ConfigError(f"ladder must halve at each step: {h0} -> {h1}")
    for h in hs:
        N = round(T / h)
        if N < 1 or abs(N * h - T) > 1e-9 * max(1.0, T):
            raise ConfigError(f"T={T} is not a multiple of ladder step {h}")
    return hs


def _print_checks(records: list[dict], stream) -> None:
    for r in records:
        status = "PASS" if r["pass"] else "FAIL"
        print(f"{status} {r['check']} [{r['anchor']}] observed={r['observed']} target={r['target']}",
              file=stream)


def cmd_run(args) -> int:
    cfg = load_config(args.config, args.seed)
    report = run_report(cfg)
    stem = f"{cfg.preset}_report"
    _write(resolve_out_dir(args.out, cfg), stem, dump_csv(report["checks"]), dump_json(report))
    _print_checks(report["checks"], sys.stdout)
    return EXIT_OK if report["all_pass"] else EXIT_FAIL


def cmd_convergence(args) -> int:
    cfg = load_config(args.config, args.seed)
    ladder = parse_ladder(args.ladder, cfg.T)
    report = convergence_report(cfg, ladder)
    rows = report["ladder"]
    lines = ["h,semigroup_error,generator_error"]
    lines += [f"{h!r},{e!r},{g!r}" for h, e, g in
              zip(rows["h"], rows["semigroup_error"], rows["generator_error"])]
    print("\n".join(lines))
    _print_checks(report["checks"], sys.stdout)
    out = resolve_out_dir(args.out, cfg)
    stem = f"{cfg.preset}_convergence"
    _write(out, stem, dump_csv(report["checks"]), dump_json(report))
    return EXIT_OK if report["all_pass"] else EXIT_FAIL


def cmd_list(_args) -> int:
    for name, text in PRESET_DESCRIPTIONS.items():
        print(f"{name}: {text}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfk", description="Lattice checks for perturbed quantum flows")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a preset's check suite")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=lambda s: int(s, 0))
    run.add_argument("--out")
    run.set_defaults(func=cmd_run)

    conv = sub.add_parser("convergence", help="error and fitted order over a step ladder")
    conv.add_argument("--config", required=True)
    conv.add_argument("--ladder", required=True)
    conv.add_argument("--seed", type=lambda s: int(s, 0))
    conv.add_argument("--out")
    conv.set_defaults(func=cmd_convergence)

    lst = sub.add_parser("list-presets", help="list preset names")
    lst.set_defaults(func=cmd_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"qfk: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MemoryError as exc:
        print(f"qfk: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
