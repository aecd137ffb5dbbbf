"""``relbc`` command line: validate, run, attack, tables.

Exit codes: 0 success, 1 domain failure (validation or statistical
check), 2 usage or I/O error.  Output is a pure function of the config
bytes, flags and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import __version__
from .attacks import (Delay, EarlyMeasure, ParityFlip, run_delay_attack,
                      run_early_measurement, run_parity_flip)
from .channel import ChannelValidationError, validate_channel
from .coding import (block_error, brute_force_parity_count, cheat_probability,
                     count_parity_strings, parity_error, shannon_info)
from .config import ConfigError, LoadedConfig, load_config
from .protocol import ProtocolConfig, run_honest

OUTPUT_DIR_ENV = "RELBC_OUTPUT_DIR"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(rows: list[dict], columns: list[str], meta: dict,
              summary: Optional[dict] = None) -> str:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}={_fmt(value)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    for key, value in (summary or {}).items():
        buf.write(f"# summary {key}={_fmt(value)}\n")
    return buf.getvalue()


def _output_path(out: Optional[str]) -> Optional[Path]:
    if out is None:
        return None
    p = Path(out)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _emit(text: str, record: dict, out: Optional[str]) -> None:
    path = _output_path(out)
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    path.with_suffix(".json").write_text(json.dumps(record, indent=2, sort_keys=True,
                                                    default=_fmt) + "\n")


def _protocol_config(cfg: LoadedConfig) -> ProtocolConfig:
    return ProtocolConfig(cfg.code, cfg.spec, cfg.channel(), seeds=cfg.seeds,
                          permutation_enabled=cfg.permutation,
                          disclosure_tau=cfg.disclosure_tau,
                          gamma_variant=cfg.gamma_variant)


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    try:
        model = cfg.channel()
    except ChannelValidationError as exc:
        print(f"channel invalid: {exc}")
        return 1
    report = validate_channel(model, cfg.spec)
    print(f"channel: {model.name}")
    print(report.format())
    if not report.passed:
        print("failed checks: " + ", ".join(report.failed()))
    return 0 if report.passed else 1


def _record(cfg: LoadedConfig, seed: int, results: dict) -> dict:
    return {"config": cfg.raw, "seed": seed, "results": results, "version": __version__}


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    trials = cfg.trials if args.trials is None else args.trials
    seed = cfg.seed if args.seed is None else args.seed
    pc = _protocol_config(cfg)
    _, stats = run_honest(pc, trials, seed)
    sigma = stats.parity_error_sigma
    summary = {
        "recovery_rate": stats.recovery_rate,
        "empirical_parity_error": stats.empirical_parity_error,
        "analytic_parity_error": stats.analytic_parity_error,
        "parity_error_sigma": sigma,
        "acceptance_rate": stats.acceptance_rate,
        "analytic_acceptance": stats.analytic_acceptance,
        "per_bit_error": stats.per_bit_error,
    }
    meta = {"tool": f"relbc {__version__}", "command": "run", "seed": seed, "trials": trials,
            "channel": pc.channel.name}
    cols = ["trial", "committed_bit", "recovered_bit", "accepted", "n_perp", "n_noclick"]
    text = write_csv(stats.rows, cols, meta, summary)
    results = {"parity_error": {"analytic": stats.analytic_parity_error,
                                "empirical": stats.empirical_parity_error,
                                "trials": trials, "stderr": sigma},
               "acceptance": {"analytic": stats.analytic_acceptance,
                              "empirical": stats.acceptance_rate, "trials": trials,
                              "stderr": math.sqrt(stats.analytic_acceptance
                                                  * (1 - stats.analytic_acceptance) / trials)}}
    _emit(text, _record(cfg, seed, results), args.out)
    return 0


_TAU0 = re.compile(r"^\s*([0-9.eE+-]*)\s*\*?\s*tau0\s*$")


def parse_shift(value: str, tau0: float) -> float:
    """A number, or a multiple of ``tau0`` such as ``tau0`` or ``2*tau0``."""
    m = _TAU0.match(value)
    if m:
        factor = float(m.group(1)) if m.group(1) else 1.0
        return factor * tau0
    return float(value)


def cmd_attack(args) -> int:
    cfg = load_config(args.config)
    trials = cfg.trials if args.trials is None else args.trials
    seed = cfg.seed if args.seed is None else args.seed
    pc = _protocol_config(cfg)
    if args.kind == "early":
        stats = run_early_measurement(pc, trials, seed, EarlyMeasure(decoder=args.decoder))
        ok = stats.extra["within_bound"]
    elif args.kind == "delay":
        shift = parse_shift(args.s or "tau0", cfg.spec.tau0)
        stats = run_delay_attack(pc, Delay(shift, (args.block,)), trials, seed)
        ok = stats.within(3.0)
    else:
        stats = run_parity_flip(pc, ParityFlip(args.block), trials, seed)
        ok = stats.rate >= stats.analytic - 3 * stats.sigma
    meta = {"tool": f"relbc {__version__}", "command": f"attack {args.kind}", "seed": seed,
            "trials": trials, "channel": pc.channel.name}
    summary = {"rate": stats.rate, "analytic": stats.analytic, "sigma": stats.sigma,
               **{k: v for k, v in stats.extra.items()}, "pass": ok}
    cols = ["trial", "committed_bit", "detected", "n_perp", "guessed_parity", "bit_errors"]
    text = write_csv(stats.rows, cols, meta, summary)
    results = {args.kind: {"analytic": stats.analytic, "empirical": stats.rate,
                           "trials": trials, "stderr": stats.sigma}}
    _emit(text, _record(cfg, seed, results), args.out)
    return 0 if ok else 1


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def table_rows(family: str, args) -> tuple[list[str], Iterable[dict]]:
    if family == "eq22":
        cols = ["N", "k", "exact", "trigonometric", "approximate", "brute_force", "info", "eta"]
        rows = []
        for L in range(1, args.max_length + 1):
            for k in range(1, L + 1):
                if L % k:
                    continue
                n = L // k
                c = count_parity_strings(n, k)
                bf = brute_force_parity_count(n, k) if L <= args.brute_limit else ""
                info, eta = shannon_info(n, k)
                rows.append({"N": n, "k": k, "exact": c.exact, "trigonometric": c.trigonometric,
                             "approximate": c.approximate, "brute_force": bf,
                             "info": info, "eta": eta})
        return cols, rows
    if family == "eq25":
        cols = ["p", "k", "exact", "asymptotic", "ratio"]
        rows = []
        for p in _floats(args.p):
            for k in range(args.k_min, args.k_max + 1):
                e = block_error(p, k)
                ratio = e.exact / e.asymptotic if e.asymptotic > 0 else float("nan")
                rows.append({"p": p, "k": k, "exact": e.exact, "asymptotic": e.asymptotic,
                             "ratio": ratio})
        return cols, rows
    if family == "eq28":
        cols = ["p_block", "N", "closed", "direct"]
        rows = []
        for p in _floats(args.p):
            for n in range(2, args.n_max + 1, 2):
                e = parity_error(p, n)
                rows.append({"p_block": p, "N": n, "closed": e.closed, "direct": e.direct})
        return cols, rows
    if family == "eq34":
        cols = ["p_perp", "k", "cheat"]
        rows = [{"p_perp": p, "k": k, "cheat": cheat_probability(p, k)}
                for p in _floats(args.p) for k in range(args.k_min, args.k_max + 1)]
        return cols, rows
    raise ValueError(family)


def cmd_tables(args) -> int:
    cols, rows = table_rows(args.family, args)
    meta = {"tool": f"relbc {__version__}", "command": f"tables {args.family}"}
    text = write_csv(list(rows), cols, meta)
    path = _output_path(args.out)
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relbc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"relbc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a channel configuration")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="honest protocol runs")
    p.add_argument("config")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("attack", help="cheating strategies")
    p.add_argument("config")
    p.add_argument("--kind", choices=("early", "delay", "flip"), required=True)
    p.add_argument("--s", help="delay shift: a number or a multiple of tau0")
    p.add_argument("--block", type=int, default=0)
    p.add_argument("--decoder", choices=("majority", "clicks"), default="majority")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("tables", help="tabulate the coding formulas")
    p.add_argument("--family", choices=("eq22", "eq25", "eq28", "eq34"), required=True)
    p.add_argument("--max-length", type=int, default=20)
    p.add_argument("--brute-limit", type=int, default=20)
    p.add_argument("--p", default="0.05,0.1,0.2,0.3")
    p.add_argument("--k-min", type=int, default=1)
    p.add_argument("--k-max", type=int, default=20)
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
