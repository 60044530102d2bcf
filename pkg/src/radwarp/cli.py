"""Command-line front end: configured verification runs and CSV curve dumps.

Commands::

    radwarp run <config> [--tol T] [--grid N] [--out PATH]
    radwarp run --default-suite [--out PATH]
    radwarp dump <quantity> <config> [--out PATH] [--grid N]

Exit codes: 0 all checks pass, 1 at least one check failed, 2 configuration
error.  The JSON report schema is
{run_meta, checks: [{kind, params, verdict, measured, worst_case, grid,
runtime_ms}]}; `run_meta.timestamp` and the per-check `runtime_ms` are the
only fields that vary between identical runs.  Worker count is taken from
the RADWARP_WORKERS environment variable (default 1).
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import math
import sys

import numpy as np

from . import __version__, geometry
from .config import (
    DEFAULT_SUITE,
    RunConfig,
    build_check_specs,
    make_family,
    parse_config,
    _resolve_manifold,
)
from .errors import ConfigError, RadwarpError
from .funcspace import default_families
from .manifold import warp_value
from .verify import (
    GridSpec,
    decay_ratio_profile,
    radial_lemma_ratio_profile,
    run_suite,
)

DUMP_QUANTITIES = ("norm_profile", "decay_ratio", "lemma_ratio", "integrand")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radwarp",
        description="Verification runs for radial-function analysis on "
        "spherically symmetric manifolds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute the checks of a config file")
    run_p.add_argument("config", nargs="?", help="path to a config file")
    run_p.add_argument("--default-suite", action="store_true",
                       help="run the built-in suite over the four built-in warps")
    run_p.add_argument("--tol", type=float, help="override the quadrature tolerance")
    run_p.add_argument("--grid", type=int, help="override every check's grid size")
    run_p.add_argument("--out", help="report path (default from the config)")

    dump_p = sub.add_parser("dump", help="write a two-column CSV curve")
    dump_p.add_argument("quantity", choices=DUMP_QUANTITIES)
    dump_p.add_argument("config", help="path to a config file")
    dump_p.add_argument("--out", help="CSV path (default <quantity>.csv)")
    dump_p.add_argument("--grid", type=int, help="number of radial samples")
    dump_p.add_argument("--tol", type=float, help="override the quadrature tolerance")
    return parser


def _apply_quadrature_section(cfg: RunConfig):
    if "panel_budget" in cfg.quadrature:
        from . import quadrature

        quadrature.DEFAULT_PANEL_BUDGET = int(cfg.quadrature["panel_budget"])


def _read_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config(text)


def _cmd_run(args) -> int:
    if args.default_suite:
        cfg = parse_config(DEFAULT_SUITE)
    elif args.config:
        cfg = _read_config(args.config)
    else:
        raise ConfigError("run needs a config path or --default-suite")
    _apply_quadrature_section(cfg)
    specs = build_check_specs(cfg, grid_override=args.grid, tol_override=args.tol)
    report = run_suite(specs)

    meta = dict(report.run_meta)
    meta["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    meta["config_sha256"] = hashlib.sha256(cfg.source_text.encode()).hexdigest()
    meta["package_version"] = __version__
    payload = {"run_meta": meta, "checks": [c.to_dict() for c in report.checks]}

    out_path = args.out or cfg.output.get("report", "report.json")
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2, allow_nan=False)
        fh.write("\n")

    for c in report.checks:
        label = ", ".join(f"{k}={v}" for k, v in c.params.items() if k in
                          ("warp", "N", "k", "p", "q", "j", "theta", "variant"))
        print(f"[{c.verdict}] {c.kind} ({label})")
    passed = meta["passed"]
    total = meta["check_count"]
    print(f"{passed}/{total} checks passed; report written to {out_path}")
    return 0 if report.all_passed else 1


def _dump_values(quantity: str, cfg: RunConfig, grid_n: int | None,
                 tol: float | None = None):
    entry = dict(cfg.dump)
    m = _resolve_manifold(cfg, entry)
    if cfg.families:
        pool = [make_family(cfg.families[i]) for i in sorted(cfg.families)]
    else:
        pool = list(default_families(m.warp.radius))
    wanted = entry.get("family")
    family = next(
        (f for f in pool if wanted in (None, f.family, f.label)), pool[0]
    )
    n_points = grid_n or int(entry.get("grid", 256))
    grid_spec = GridSpec(n=n_points, tail_cap=float(entry.get("tail_cap", 10.0)))
    grid = grid_spec.resolve(m.warp.radius)
    k = int(entry.get("k", 2))
    p = float(entry.get("p", 2.0))
    j = int(entry.get("j", 1))
    quad_tol = tol if tol is not None else float(cfg.quadrature.get("tol", 1e-10))

    params = {"warp": m.warp.kind, "N": m.dim}
    if quantity == "norm_profile":
        values = geometry.norm_profiles(family, m, grid, j)[j]
        params.update(j=j, family=family.label)
    elif quantity == "decay_ratio":
        values = decay_ratio_profile(m, family, p, grid, quad_tol)
        if values is None:
            raise ConfigError(
                f"family {family.label} has no finite first-order norms on this domain"
            )
        params.update(p=p, family=family.label)
    elif quantity == "lemma_ratio":
        if m.dim > k * p:
            variant = "power"
        elif m.dim == k * p and math.isfinite(m.warp.radius):
            variant = "log"
        else:
            raise ConfigError(
                "lemma_ratio needs N > kp, or N = kp on a bounded domain "
                f"(got N={m.dim}, k={k}, p={p}, R={m.warp.radius})"
            )
        values = radial_lemma_ratio_profile(m, family, k, p, grid, variant, quad_tol)
        if values is None:
            raise ConfigError(
                f"family {family.label} has no finite norms for the lemma ratio"
            )
        params.update(k=k, p=p, variant=variant, family=family.label)
    else:  # integrand: the divergence-probe weight curve
        expo = m.dim - 1.0 - (k - 1) * p
        values = warp_value(m.warp, grid) ** expo
        params.update(k=k, p=p, exponent=expo)
    return grid, np.asarray(values, dtype=np.float64), params


def _cmd_dump(args) -> int:
    cfg = _read_config(args.config)
    _apply_quadrature_section(cfg)
    try:
        grid, values, params = _dump_values(args.quantity, cfg, args.grid, args.tol)
    except RadwarpError as exc:
        raise ConfigError(str(exc)) from exc
    inner = ";".join(f"{k}={v}" for k, v in params.items())
    out_path = args.out or cfg.output.get("csv", f"{args.quantity}.csv")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(f"r,{args.quantity}{{{inner}}}\n")
        for r, v in zip(grid, values):
            fh.write(f"{float(r)!r},{float(v)!r}\n")
    print(f"{len(grid)} samples written to {out_path}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_dump(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RadwarpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
