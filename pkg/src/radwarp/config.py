"""Flat dotted-key configuration files for the command-line runner.

Format: one `section.key = value` per line, `#` comments.  Values are JSON
literals where possible (numbers, booleans, quoted strings, [lists]); bare
words are taken as strings, and the token `inf` stands for an unbounded
radius.  Example::

    manifold.warp = "hyperbolic"
    manifold.R = "inf"
    manifold.N = 3
    family.1.kind = "gaussian"
    family.1.a = 1.0
    family.1.envelope = [1e6, 6.0, 0.0, 0.5]   # optional decay-envelope override
    quadrature.tol = 1e-10
    quadrature.panel_budget = 4000
    check.1.kind = "identity"
    check.1.k = 3
    check.2.kind = "decay_lemma"
    check.2.p = 2
    check.2.N = 4              # per-check override of the manifold section
    output.report = "report.json"

Every check entry may override the manifold (warp, R, N) and restrict the
family set; anything omitted falls back to the manifold/family sections or
the built-in defaults.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import ConfigError, InadmissibleParameterError, RadwarpError
from .funcspace import RadialFunction, default_families
from .manifold import ManifoldSpec, WarpSpec
from .verify import CHECK_KINDS, CheckSpec, GridSpec

_DEFAULT_RADII = {
    "euclidean": math.inf,
    "hyperbolic": math.inf,
    "spherical": math.pi,
    "tanh_cap": math.inf,
    "custom_odd_series": math.inf,
}


def _parse_value(raw: str):
    raw = raw.strip()
    try:
        return json.loads(raw)
    except (json.JSONDecodeError, ValueError):
        return raw


def _strip_comment(line: str) -> str:
    out = []
    quoted = False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        if ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out)


@dataclass
class RunConfig:
    """Parsed configuration: raw sections plus resolved check specs."""

    manifold: dict = field(default_factory=dict)
    families: dict = field(default_factory=dict)  # index -> {key: value}
    checks: dict = field(default_factory=dict)  # index -> {key: value}
    quadrature: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    dump: dict = field(default_factory=dict)
    source_text: str = ""


def parse_config(text: str) -> RunConfig:
    cfg = RunConfig(source_text=text)
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = _strip_comment(line).strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, raw = stripped.partition("=")
        parts = key.strip().split(".")
        value = _parse_value(raw)
        section = parts[0]
        if section in ("manifold", "quadrature", "output", "dump"):
            if len(parts) != 2:
                raise ConfigError(f"line {lineno}: {section} keys have one subfield")
            getattr(cfg, section)[parts[1]] = value
        elif section in ("family", "check"):
            if len(parts) != 3:
                raise ConfigError(
                    f"line {lineno}: {section} keys look like {section}.<index>.<field>"
                )
            try:
                idx = int(parts[1])
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad {section} index {parts[1]!r}") from exc
            store = cfg.families if section == "family" else cfg.checks
            store.setdefault(idx, {})[parts[2]] = value
        else:
            raise ConfigError(f"line {lineno}: unknown section {section!r}")
    return cfg


# ---------------------------------------------------------------------------
# resolution into domain objects


def _as_radius(value) -> float:
    if value in ("inf", "Infinity", None):
        return math.inf
    if isinstance(value, (int, float)):
        return float(value)
    raise ConfigError(f"radius must be a number or 'inf', got {value!r}")


def make_warp(tag, radius) -> WarpSpec:
    if isinstance(tag, list):
        coeffs = tuple(float(c) for c in tag)
        r = _as_radius(radius) if radius is not None else _DEFAULT_RADII["custom_odd_series"]
        return WarpSpec.custom(coeffs, r)
    if not isinstance(tag, str):
        raise ConfigError(f"warp must be a tag string or a coefficient list, got {tag!r}")
    if tag not in _DEFAULT_RADII:
        raise ConfigError(f"unknown warp tag {tag!r}")
    r = _as_radius(radius) if radius is not None else _DEFAULT_RADII[tag]
    return WarpSpec(tag, r)


def make_family(entry: dict) -> RadialFunction:
    kind = entry.get("kind")
    try:
        if kind == "gaussian":
            base = RadialFunction.gaussian(float(entry.get("a", 1.0)))
        elif kind == "power_decay":
            base = RadialFunction.power_decay(float(entry.get("a", 1.0)))
        elif kind == "polynomial_bump":
            coeffs = entry.get("coeffs", [1.0])
            base = RadialFunction.polynomial_bump(
                tuple(float(c) for c in coeffs), float(entry.get("support", 1.0))
            )
        elif kind == "log_profile":
            base = RadialFunction.log_profile(
                float(entry["r_ref"]), float(entry.get("delta", 1e-2))
            )
        elif kind == "linear":
            base = RadialFunction.linear()
        else:
            raise ConfigError(f"unknown family kind {kind!r}")
        if "envelope" in entry:
            base = RadialFunction(
                base.family, base.params,
                envelope_override=tuple(float(x) for x in entry["envelope"]),
            )
        return base
    except RadwarpError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad parameters for family {kind!r}: {exc}") from exc


def _resolve_manifold(cfg: RunConfig, entry: dict) -> ManifoldSpec:
    warp_tag = entry.get("warp", cfg.manifold.get("warp"))
    if warp_tag is None:
        raise ConfigError("no warp given (manifold.warp or a per-check override)")
    radius = entry.get("R", cfg.manifold.get("R"))
    n = entry.get("N", cfg.manifold.get("N"))
    if n is None:
        raise ConfigError("no dimension given (manifold.N or a per-check override)")
    try:
        return ManifoldSpec(make_warp(warp_tag, radius), int(n))
    except RadwarpError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_families(cfg: RunConfig, entry: dict, m: ManifoldSpec):
    if cfg.families:
        pool = [make_family(cfg.families[i]) for i in sorted(cfg.families)]
    else:
        pool = list(default_families(m.warp.radius))
    subset = entry.get("families")
    if subset is None:
        return tuple(pool)
    if isinstance(subset, str):
        subset = [subset]
    chosen = [f for f in pool if f.family in subset or f.label in subset]
    if not chosen:
        raise ConfigError(f"family subset {subset!r} matches nothing")
    return tuple(chosen)


def build_check_specs(cfg: RunConfig, grid_override: int | None = None,
                      tol_override: float | None = None) -> list[CheckSpec]:
    """Validated CheckSpec list; any invalid combination raises ConfigError."""
    if not cfg.checks:
        raise ConfigError("configuration defines no checks")
    quad_tol = float(cfg.quadrature.get("tol", 1e-10))
    if tol_override is not None:
        quad_tol = tol_override
    specs = []
    for idx in sorted(cfg.checks):
        entry = dict(cfg.checks[idx])
        kind = entry.get("kind")
        if kind not in CHECK_KINDS:
            raise ConfigError(f"check {idx}: unknown kind {kind!r}")
        m = _resolve_manifold(cfg, entry)
        families = _resolve_families(cfg, entry, m)
        grid_n = int(entry.get("grid", 256))
        if grid_override is not None:
            grid_n = grid_override
        grid = GridSpec(
            n=grid_n,
            lo=entry.get("grid_lo"),
            hi=entry.get("grid_hi"),
            tail_cap=float(entry.get("tail_cap", 10.0)),
        )
        try:
            specs.append(
                CheckSpec(
                    kind=kind,
                    manifold=m,
                    families=families,
                    k=int(entry.get("k", 1)),
                    p=float(entry.get("p", 2.0)),
                    q=float(entry["q"]) if "q" in entry else None,
                    theta=float(entry.get("theta", 0.0)),
                    j=int(entry["j"]) if "j" in entry else None,
                    grid=grid,
                    tol=float(entry["tol"]) if "tol" in entry else None,
                    quad_tol=quad_tol,
                    variant=entry.get("variant", "manifold"),
                    diagnostic=bool(entry.get("diagnostic", False)),
                )
            )
        except (InadmissibleParameterError, RadwarpError) as exc:
            raise ConfigError(f"check {idx} ({kind}): {exc}") from exc
    return specs


DEFAULT_SUITE = """\
# Default verification suite over the four built-in warping profiles.
manifold.warp = "hyperbolic"
manifold.R = "inf"
manifold.N = 3

quadrature.tol = 1e-10

check.1.kind = "identity"
check.1.warp = "hyperbolic"
check.1.N = 3
check.1.k = 3
check.1.grid = 64

check.2.kind = "identity"
check.2.warp = "tanh_cap"
check.2.N = 4
check.2.k = 4
check.2.grid = 48

check.3.kind = "gradient_inequality"
check.3.warp = "spherical"
check.3.R = 3.14159265358979
check.3.N = 3
check.3.k = 3
check.3.grid = 64

check.4.kind = "gradient_inequality"
check.4.warp = "euclidean"
check.4.N = 5
check.4.k = 4
check.4.grid = 48

check.5.kind = "k1_norm_equality"
check.5.warp = "hyperbolic"
check.5.N = 3
check.5.p = 2

check.6.kind = "k1_norm_equality"
check.6.warp = "euclidean"
check.6.N = 4
check.6.p = 1

check.7.kind = "radial_lemma_power"
check.7.warp = "euclidean"
check.7.R = 1.0
check.7.N = 3
check.7.k = 1
check.7.p = 2

check.8.kind = "radial_lemma_log"
check.8.warp = "tanh_cap"
check.8.R = 2.0
check.8.N = 4
check.8.k = 2
check.8.p = 2

check.9.kind = "decay_lemma"
check.9.warp = "hyperbolic"
check.9.N = 3
check.9.p = 2

check.10.kind = "decay_lemma"
check.10.warp = "euclidean"
check.10.N = 2
check.10.p = 1

check.11.kind = "hardy"
check.11.warp = "euclidean"
check.11.R = 1.0
check.11.N = 3
check.11.k = 1
check.11.j = 1
check.11.p = 2

check.12.kind = "embedding_ratio"
check.12.warp = "euclidean"
check.12.R = 1.0
check.12.N = 3
check.12.k = 1
check.12.p = 2
check.12.q = 6

check.13.kind = "embedding_ratio"
check.13.warp = "hyperbolic"
check.13.N = 4
check.13.k = 1
check.13.p = 2
check.13.theta = 1
check.13.q = 5
check.13.families = ["gaussian", "polynomial_bump"]

check.14.kind = "counterexample"
check.14.warp = "tanh_cap"
check.14.R = 2.0
check.14.N = 2
check.14.k = 3
check.14.p = 2

check.15.kind = "asymptotic_leading"
check.15.warp = "hyperbolic"
check.15.N = 3
check.15.k = 3

check.16.kind = "asymptotic_leading"
check.16.warp = "euclidean"
check.16.N = 4
check.16.k = 4

output.report = "report.json"
"""
