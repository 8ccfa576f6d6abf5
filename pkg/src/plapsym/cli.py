"""Command-line front end.

One YAML (or JSON) document per run describes the nonlinearity and the
command parameters, for example::

    command: profile
    p: 2
    nonlinearity:
      breakpoints: [0, 2]
      pieces: [[0, 1, 0, -1]]
      cap: 2
    t_max: 8
    n: 4097

Run with ``plapsym --config run.yaml --out results/``.  Exit status: 0 on
success, 1 on configuration errors, 2 when the input violates a hypothesis
the command needs, 3 when a numerical solve fails to converge.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import warnings
from typing import Optional, Sequence

import numpy as np
import yaml

from . import ball, classification, profile, strip
from ._descent import NonConvergenceError
from ._svg import line_plot
from .nonlinearity import (
    DomainError,
    NonlinearitySpec,
    ZeroContinuumError,
    check_no_zero_left_of,
    check_smp,
    check_thm13,
    isolate_zeros,
)

log = logging.getLogger("plapsym")

COMMANDS = ("audit", "classify", "profile", "ball", "strip")
EXIT_OK, EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_NONCONVERGENCE = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


def _num(cfg: dict, key: str, default=None, positive: bool = False) -> Optional[float]:
    if key not in cfg or cfg[key] is None:
        if default is None:
            raise ConfigError(f"config lacks required field {key!r}")
        return default
    try:
        v = float(cfg[key])
    except (TypeError, ValueError):
        raise ConfigError(f"field {key!r} = {cfg[key]!r} is not a number") from None
    if not math.isfinite(v):
        raise ConfigError(f"field {key!r} = {v!r} is not finite")
    if positive and not v > 0:
        raise ConfigError(f"field {key!r} must be positive, got {v!r}")
    return v


def _int(cfg: dict, key: str, default=None, minimum: int = 1) -> int:
    v = _num(cfg, key, default)
    if v != int(v) or v < minimum:
        raise ConfigError(f"field {key!r} must be an integer >= {minimum}, got {cfg.get(key)!r}")
    return int(v)


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path!r} is not valid YAML: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path!r} must be a mapping")
    return doc


def parse_nonlinearity(cfg: dict) -> NonlinearitySpec:
    doc = cfg.get("nonlinearity")
    if not isinstance(doc, dict):
        raise ConfigError("config lacks the 'nonlinearity' mapping")
    try:
        return NonlinearitySpec.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid nonlinearity: {exc}") from None


def _write_json(path: str, doc) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _require_cap(f: NonlinearitySpec, rho: float) -> None:
    if rho > f.cap:
        raise ConfigError(f"analysis cap M = {f.cap!r} is below rho = {rho!r}")


# commands ------------------------------------------------------------------


def run_audit(cfg, f, p, out):
    N = _int(cfg, "N", minimum=2)
    report = check_thm13(f, p, N).to_dict()
    zeros = []
    for zi in isolate_zeros(f):
        item = {"z": zi.z, "isolated": zi.isolated, "order_right": zi.order_right,
                "lead_right": zi.lead_right, "order_left": zi.order_left,
                "lead_left": zi.lead_left}
        if zi.isolated:
            item.update(check_smp(f, p, zi))
            if zi.z > 0:
                item["no_zero_left"] = check_no_zero_left_of(f, zi.z)
        zeros.append(item)
    doc = {"command": "audit", "p": p, "N": N, "nonlinearity": f.to_dict(),
           "hypotheses": report, "zeros": zeros}
    _write_json(os.path.join(out, "audit.json"), doc)
    return doc


def run_classify(cfg, f, p, out):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cls = classification.classify(f, p)
    doc = {"command": "classify", "nonlinearity": f.to_dict(), **cls.to_dict()}
    _write_json(os.path.join(out, "classification.json"), doc)
    return doc


def run_profile(cfg, f, p, out):
    t_max = _num(cfg, "t_max", 10.0, positive=True)
    n = _int(cfg, "n", 4097, minimum=257)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cls = classification.classify(f, p)
    written = []
    for k, entry in enumerate(cls.entries):
        if entry.kind == classification.TRIVIAL:
            continue
        _require_cap(f, entry.rho)
        prof = profile.build_profile(f, p, entry, t_max, n)
        stem = f"profile_{k}_{entry.kind.lower()}"
        profile.write_profile_csv(prof, os.path.join(out, stem + ".csv"))
        meta = {**prof.metadata(), "flags": list(cls.flags), "p": p}
        _write_json(os.path.join(out, stem + ".json"), meta)
        svg = line_plot([("u", prof.t, prof.u), ("du", prof.t, prof.du)],
                        title=f"{entry.kind} profile, rho = {entry.rho:.6g}, p = {p:g}",
                        xlabel="t", ylabel="u")
        _write_text(os.path.join(out, stem + ".svg"), svg)
        written.append({"file": stem + ".csv", **meta})
    doc = {"command": "profile", "profiles": written, "flags": list(cls.flags)}
    _write_json(os.path.join(out, "profile_summary.json"), doc)
    return doc


def run_ball(cfg, f, p, out):
    N = _int(cfg, "N", minimum=1)
    rho = _num(cfg, "rho", positive=True)
    _require_cap(f, rho)
    eps = _num(cfg, "eps", 0.05, positive=True)
    J = _int(cfg, "J", 1024, minimum=128)
    r_list = cfg.get("r_list")
    if not isinstance(r_list, (list, tuple)) or not r_list:
        raise ConfigError("config lacks a nonempty 'r_list'")
    try:
        r_list = [float(r) for r in r_list]
    except (TypeError, ValueError):
        raise ConfigError(f"r_list entries must be numbers, got {cfg['r_list']!r}") from None
    if any(r <= 0 for r in r_list) or any(b <= a for a, b in zip(r_list, r_list[1:])):
        raise ConfigError(f"r_list must be positive and strictly ascending, got {r_list!r}")
    ball.truncate(f, rho)
    zs = [zi for zi in isolate_zeros(f) if abs(zi.z - rho) <= 1e-12 * max(1.0, rho)]
    smp = check_smp(f, p, zs[0]) if zs else {}
    table = []
    for r in r_list:
        sol = ball.minimize_radial(f, p, N, rho, r, J)
        table.append({"r": r, "J": J, "sup_norm": sol.sup_norm, "energy": sol.energy,
                      "gap": sol.gap})
    with open(os.path.join(out, "scan.csv"), "w", newline="\n") as fh:
        fh.write("r,J,sup_norm,energy\n")
        for row in table:
            fh.write(f"{row['r']:.17g},{row['J']},{row['sup_norm']:.17g},{row['energy']:.17g}\n")
    hits = [row["r"] for row in table if row["sup_norm"] >= rho - eps]
    sups = [row["sup_norm"] for row in table]
    doc = {"command": "ball", "p": p, "N": N, "rho": rho, "eps": eps, "J": J,
           "R0": hits[0] if hits else None,
           "sup_norm_nondecreasing": bool(all(b >= a for a, b in zip(sups, sups[1:]))),
           "strict_below_rho": bool(all(row["gap"] > 0 for row in table)),
           "hypotheses": {"truncation": "holds", "smp_at_rho": smp},
           "table": table}
    _write_json(os.path.join(out, "ball_summary.json"), doc)
    if not hits:
        raise NonConvergenceError(
            f"no radius in r_list reaches rho - eps = {rho - eps!r}; largest sup norm {max(sups)!r}",
            np.array(sups), [])
    return doc


def run_strip(cfg, f, p, out):
    rho = cfg.get("rho")
    rho = None if rho is None else _num(cfg, "rho", positive=True)
    W = _num(cfg, "W", 8.0, positive=True)
    H = _num(cfg, "H", 12.0, positive=True)
    nx = _int(cfg, "nx", 65, minimum=33)
    ny = _int(cfg, "ny", 129, minimum=33)
    init = str(cfg.get("init", "perturbed-profile"))
    if init not in strip.INITS:
        raise ConfigError(f"init must be one of {strip.INITS}, got {init!r}")
    seed = cfg.get("seed")
    seed = None if seed is None else _int(cfg, "seed", minimum=0)
    if rho is not None:
        _require_cap(f, rho)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = strip.solve_strip(f, p, rho, W, H, nx, ny, init, seed=seed)
    strip.write_field_csv(sol, os.path.join(out, "field.csv"))
    mono = float(np.min(np.diff(sol.u, axis=1)))
    doc = {"command": "strip", **sol.summary(), "seed": seed,
           "min_vertical_increment": mono, "energy_trace": sol.trace}
    _write_json(os.path.join(out, "strip_summary.json"), doc)
    y = sol.y
    svg = line_plot([("row mean", y, sol.u.mean(axis=0)),
                     ("row oscillation", y, sol.u.max(axis=0) - sol.u.min(axis=0))],
                    title=f"strip solve, p = {p:g}, {nx} x {ny}", xlabel="y", ylabel="u")
    _write_text(os.path.join(out, "strip.svg"), svg)
    return doc


RUNNERS = {"audit": run_audit, "classify": run_classify, "profile": run_profile,
           "ball": run_ball, "strip": run_strip}


def run(cfg: dict, out: str) -> int:
    """Execute one configured command, writing artifacts into ``out``."""
    command = cfg.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {command!r}")
    p = _num(cfg, "p")
    if not p > 1:
        raise ConfigError(f"p must exceed 1, got {p!r}")
    f = parse_nonlinearity(cfg)
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out!r}: {exc.strerror}") from None
    if not os.access(out, os.W_OK):
        raise ConfigError(f"output directory {out!r} is not writable")
    log.info("running %s with p = %g", command, p)
    RUNNERS[command](cfg, f, p, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plapsym", description=__doc__.splitlines()[0])
    ap.add_argument("command", nargs="?", choices=COMMANDS,
                    help="overrides the config's 'command' field")
    ap.add_argument("--config", required=True, help="YAML or JSON run document")
    ap.add_argument("--out", default="out", help="output directory (default: ./out)")
    ap.add_argument("--seed", type=int, default=None, help="seed for random starts")
    ap.add_argument("--verbose", action="store_true", help="log progress to stderr")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.command:
            cfg["command"] = args.command
        if args.seed is not None:
            if args.seed < 0 or args.seed >= 2**64:
                raise ConfigError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
            cfg["seed"] = args.seed
        return run(cfg, args.out)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ball.HypothesisError, strip.NoProfileError, ZeroContinuumError,
            profile.DivergenceError, profile.ConsistencyError) as exc:
        print(f"hypothesis refused: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except NonConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
