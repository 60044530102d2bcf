"""Certification harness: quantified numerical checks with verdicts.

Each check pairs two independently computed sides of one mathematical claim
(an identity, an inequality, a divergence law, an embedding constant) and
reports the measured gap or empirical constant together with the exact grid
and tolerances that produced it, so every number in a report is
reproducible.

Empirical constants come with a stability requirement: "finite" is
operationalized as the supremum changing by at most 1% when the underlying
grid is doubled (or the quadrature tolerance tightened, for purely
integral-based constants).  Grid points where both sides of a ratio vanish
are skipped and counted.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import InadmissibleParameterError
from .funcspace import (
    RadialFunction,
    default_families,
    lq_theta_norm_1d,
    sobolev_norm_1d,
    sobolev_norm_manifold,
    sobolev_seminorms_1d,
)
from .manifold import ManifoldSpec, WarpSpec, c_phi, sphere_volume, warp_value
from .quadrature import Integrand, divergence_probe, integrate_weighted

CHECK_KINDS = (
    "identity",
    "gradient_inequality",
    "k1_norm_equality",
    "radial_lemma_power",
    "radial_lemma_log",
    "decay_lemma",
    "hardy",
    "embedding_ratio",
    "counterexample",
    "asymptotic_leading",
)

DEFAULT_TOLERANCES = {
    "identity": 1e-8,
    "gradient_inequality": 1e-10,
    "k1_norm_equality": 1e-8,
    "radial_lemma_power": 0.01,
    "radial_lemma_log": 0.01,
    "decay_lemma": 1e-6,
    "hardy": 0.01,
    "embedding_ratio": 0.01,
    "counterexample": 0.02,
    "asymptotic_leading": 0.01,
}

_TINY = 1e-300


@dataclass(frozen=True)
class GridSpec:
    """Logarithmic radial grid; bounds default to the standard rule
    [max(1e-3, R/1e4), min(0.999 R, tail_cap)]."""

    n: int = 256
    lo: float | None = None
    hi: float | None = None
    tail_cap: float = 10.0

    def resolve(self, radius: float) -> np.ndarray:
        lo = self.lo if self.lo is not None else max(1e-3, radius / 1e4 if math.isfinite(radius) else 1e-3)
        hi = self.hi if self.hi is not None else min(0.999 * radius, self.tail_cap)
        if not 0 < lo < hi:
            raise InadmissibleParameterError(f"empty radial grid [{lo}, {hi}]")
        return np.geomspace(lo, hi, self.n)

    def doubled(self) -> "GridSpec":
        # 2n-1 points keep every original point in the refined grid, so a
        # supremum can only grow (up to rounding) under doubling
        return GridSpec(2 * self.n - 1, self.lo, self.hi, self.tail_cap)

    def meta(self, radius: float) -> dict:
        g = self.resolve(radius)
        return {"n": self.n, "lo": float(g[0]), "hi": float(g[-1]), "spacing": "log"}


def _bounded_near_edge(w: WarpSpec) -> bool:
    """Warp stays away from 0 at the outer edge of a bounded domain."""
    return math.isfinite(w.radius) and float(warp_value(w, w.radius * (1 - 1e-9))) >= 1e-6


@dataclass(frozen=True)
class CheckSpec:
    """One configured check; construction validates parameter admissibility."""

    kind: str
    manifold: ManifoldSpec
    families: tuple[RadialFunction, ...] = ()
    k: int = 1
    p: float = 2.0
    q: float | None = None
    theta: float = 0.0
    j: int | None = None
    grid: GridSpec = field(default_factory=GridSpec)
    tol: float | None = None
    quad_tol: float = 1e-10
    variant: str = "manifold"
    diagnostic: bool = False

    def __post_init__(self):
        if self.kind not in CHECK_KINDS:
            raise InadmissibleParameterError(f"unknown check kind {self.kind!r}")
        if not self.families:
            object.__setattr__(
                self, "families", default_families(self.manifold.warp.radius)
            )
        if self.tol is None:
            object.__setattr__(self, "tol", DEFAULT_TOLERANCES[self.kind])
        self._validate()

    # -- admissibility -------------------------------------------------------

    def _validate(self):
        n, k, p = self.manifold.dim, self.k, self.p
        w = self.manifold.warp
        if not 0 <= k <= 4:
            raise InadmissibleParameterError("derivative count k must be within 0..4")
        if p < 1:
            raise InadmissibleParameterError("p must be at least 1")
        if self.theta < 0:
            raise InadmissibleParameterError("theta must be nonnegative")
        kind = self.kind
        if kind in ("radial_lemma_power", "radial_lemma_log", "hardy"):
            if math.isinf(w.radius):
                raise InadmissibleParameterError(f"{kind} requires a bounded domain")
            if not _bounded_near_edge(w):
                raise InadmissibleParameterError(
                    f"{kind} requires the warp to stay positive near the outer edge"
                )
        if kind == "radial_lemma_power" and n <= k * p:
            raise InadmissibleParameterError(
                f"power radial lemma needs N > kp (N={n}, k={k}, p={p})"
            )
        if kind == "radial_lemma_log" and not (n == k * p and p > 1):
            raise InadmissibleParameterError(
                f"log radial lemma needs N = kp and p > 1 (N={n}, k={k}, p={p})"
            )
        if kind == "decay_lemma":
            if not math.isinf(w.radius):
                raise InadmissibleParameterError("decay lemma requires an unbounded domain")
            if c_phi(w) <= 0.0:
                raise InadmissibleParameterError(
                    "decay lemma requires a positive warp monotonicity constant"
                )
            if self.k != 1:
                raise InadmissibleParameterError("decay lemma is a first-order statement")
        if kind == "hardy":
            if self.j is None or not 0 <= self.j <= k:
                raise InadmissibleParameterError("hardy check needs a slot j within 0..k")
            if n <= self.j * p:
                raise InadmissibleParameterError(
                    f"hardy inequality needs N > jp (N={n}, j={self.j}, p={p})"
                )
        if kind == "counterexample":
            if math.isinf(w.radius):
                raise InadmissibleParameterError("counterexample probe requires a bounded domain")
            if w.radius < 0.1:
                raise InadmissibleParameterError(
                    "counterexample probe needs radius >= 0.1 to fit its cut points"
                )
            if k < 2:
                raise InadmissibleParameterError("counterexample needs k >= 2")
            if n > (k - 1) * p:
                raise InadmissibleParameterError(
                    f"counterexample regime needs N <= (k-1)p (N={n}, k={k}, p={p}): "
                    "this is the norm-equivalence regime"
                )
        if kind == "asymptotic_leading" and k not in (2, 3, 4):
            raise InadmissibleParameterError("asymptotic ratio is defined for k in {2, 3, 4}")
        if kind == "embedding_ratio":
            self._validate_embedding()

    def _validate_embedding(self):
        n, k, p, q = self.manifold.dim, self.k, self.p, self.q
        w = self.manifold.warp
        if q is None:
            raise InadmissibleParameterError("embedding check needs a target exponent q")
        if self.variant not in ("manifold", "interval"):
            raise InadmissibleParameterError("embedding variant must be manifold or interval")
        if math.isinf(w.radius):
            if c_phi(w) <= 0.0:
                raise InadmissibleParameterError(
                    "unbounded embedding requires a positive warp monotonicity constant"
                )
        elif not _bounded_near_edge(w):
            raise InadmissibleParameterError(
                "bounded-domain embedding requires the warp to stay positive near the outer edge"
            )
        if self.variant == "interval" and self.theta < n - k * p - 1:
            raise InadmissibleParameterError(
                f"interval embedding needs theta >= N-kp-1 = {n - k * p - 1}"
            )
        if self.diagnostic:
            return  # out-of-range probing mode: deliberately unchecked
        q_lo = 1.0 if math.isfinite(w.radius) else p
        if n > k * p:
            q_hi = (
                (self.theta + n) * p / (n - k * p)
                if self.variant == "manifold"
                else (self.theta + 1) * p / (n - k * p)
            )
        elif n == k * p:
            q_hi = math.inf
            if math.isfinite(w.radius) and p == 1.0:
                raise InadmissibleParameterError(
                    "borderline N = kp with p = 1 has no power-scale embedding range"
                )
        else:
            raise InadmissibleParameterError(
                f"embedding needs N >= kp (N={n}, k={k}, p={p})"
            )
        if not q_lo <= q <= q_hi:
            raise InadmissibleParameterError(
                f"q={q} outside the admissible range [{q_lo}, {q_hi}]"
            )

    def params_dict(self) -> dict:
        w = self.manifold.warp
        out = {
            "warp": w.kind,
            "R": "inf" if math.isinf(w.radius) else w.radius,
            "N": self.manifold.dim,
            "k": self.k,
            "p": self.p,
            "theta": self.theta,
            "quad_tol": self.quad_tol,
            "tol": self.tol,
            "families": [f.label for f in self.families],
        }
        if self.q is not None:
            out["q"] = self.q
        if self.j is not None:
            out["j"] = self.j
        if self.kind == "embedding_ratio":
            out["variant"] = self.variant
            out["diagnostic"] = self.diagnostic
        return out


def _json_safe(value):
    """Non-finite floats become strings so reports stay strict JSON."""
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


@dataclass(frozen=True)
class CheckResult:
    kind: str
    params: dict
    verdict: str
    measured: dict
    worst_case: dict
    grid: dict
    runtime_ms: float

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": _json_safe(self.params),
            "verdict": self.verdict,
            "measured": _json_safe(self.measured),
            "worst_case": _json_safe(self.worst_case),
            "grid": self.grid,
            "runtime_ms": self.runtime_ms,
        }


@dataclass(frozen=True)
class VerificationReport:
    run_meta: dict
    checks: tuple[CheckResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.verdict == "pass" for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "run_meta": self.run_meta,
            "checks": [c.to_dict() for c in self.checks],
        }


# ---------------------------------------------------------------------------
# individual checks


def _finite_norm_families(spec: CheckSpec, norm_fn) -> list[tuple[RadialFunction, float]]:
    """Families with a finite, nonzero norm under norm_fn; others are skipped."""
    out = []
    for f in spec.families:
        val = norm_fn(f)
        if math.isfinite(val) and val > 0:
            out.append((f, val))
    return out


def check_identity(spec: CheckSpec) -> tuple[dict, dict, bool]:
    m = spec.manifold
    grid = spec.grid.resolve(m.warp.radius)
    worst = {"rel_gap": -1.0}
    for f in spec.families:
        _, tensors = geometry.covariant_bundle(f, m, grid, spec.k)
        vjet = f.eval_jet(grid, spec.k)
        for order in range(1, spec.k + 1):
            lhs = tensors[order].component((1,) * order).value
            rhs = vjet.derivative(order)
            rel = np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs))
            i = int(np.argmax(rel))
            if rel[i] > worst["rel_gap"]:
                worst = {
                    "rel_gap": float(rel[i]),
                    "r": float(grid[i]),
                    "family": f.label,
                    "order": order,
                }
    measured = {"max_rel_gap": worst.pop("rel_gap")}
    return measured, worst, measured["max_rel_gap"] <= spec.tol


def check_gradient_inequality(spec: CheckSpec) -> tuple[dict, dict, bool]:
    m = spec.manifold
    grid = spec.grid.resolve(m.warp.radius)
    worst = {"margin": math.inf}
    for f in spec.families:
        profiles = geometry.norm_profiles(f, m, grid, spec.k)
        for order in range(spec.k + 1):
            target = np.abs(f.eval_jet(grid, order).derivative(order))
            margin = profiles[order] - target
            i = int(np.argmin(margin))
            if margin[i] < worst["margin"]:
                worst = {
                    "margin": float(margin[i]),
                    "r": float(grid[i]),
                    "family": f.label,
                    "order": order,
                }
    measured = {"min_margin": worst.pop("margin")}
    return measured, worst, measured["min_margin"] >= -spec.tol


def check_k1_norm_equality(spec: CheckSpec) -> tuple[dict, dict, bool]:
    m = spec.manifold
    n, p = m.dim, spec.p
    omega = sphere_volume(n)
    worst = {"rel_diff": -1.0}
    skipped = []
    for f in spec.families:
        seminorm = sobolev_seminorms_1d(f, 1, p, n, m.warp, spec.quad_tol)[1]
        rhs = (omega * seminorm) ** (1 / p) if math.isfinite(seminorm) else math.inf
        if not math.isfinite(rhs) or rhs == 0.0:
            skipped.append(f.label)
            continue
        lhs = _gradient_norm(f, m, p, spec.quad_tol)
        rel = abs(lhs - rhs) / rhs
        if rel > worst["rel_diff"]:
            worst = {"rel_diff": rel, "family": f.label, "lhs": lhs, "rhs": rhs}
    measured = {
        "max_rel_diff": worst.pop("rel_diff"),
        "skipped_families": skipped,
    }
    ok = 0.0 <= measured["max_rel_diff"] <= spec.tol
    return measured, worst, ok


def _gradient_norm(f, m, p, quad_tol):
    from .funcspace import gradient_norm_manifold

    return gradient_norm_manifold(f, p, m, quad_tol)


def _sup_over_grid(spec: CheckSpec, families, profile, grid_spec: GridSpec):
    """Supremum of a per-family (already normalized) ratio profile."""
    grid = grid_spec.resolve(spec.manifold.warp.radius)
    best = {"value": -1.0}
    for f in families:
        ratio = profile(f, grid)
        i = int(np.argmax(ratio))
        if ratio[i] > best["value"]:
            best = {"value": float(ratio[i]), "r": float(grid[i]), "family": f.label}
    return best


def radial_lemma_ratio_profile(m: ManifoldSpec, f: RadialFunction, k: int, p: float,
                               grid: np.ndarray, variant: str,
                               quad_tol: float = 1e-10) -> np.ndarray | None:
    """Pointwise lemma ratio |v(t)| * scale(t) / ||v||; None if the norm is
    infinite or zero (family skipped)."""
    n, w = m.dim, m.warp
    norm = sobolev_norm_1d(f, k, p, n, w, quad_tol)
    if not math.isfinite(norm) or norm == 0.0:
        return None
    if variant == "power":
        scale = warp_value(w, grid) ** ((n - k * p) / p)
        return np.abs(f.values(grid)) * scale / norm
    growth = (np.log(w.radius / grid)) ** ((p - 1) / p) + 1.0
    return np.abs(f.values(grid)) / (growth * norm)


def check_radial_lemma(spec: CheckSpec) -> tuple[dict, dict, bool]:
    m = spec.manifold
    n, k, p = m.dim, spec.k, spec.p
    w = m.warp
    families = [
        f for f, _ in _finite_norm_families(
            spec, lambda f: sobolev_norm_1d(f, k, p, n, w, spec.quad_tol)
        )
    ]
    variant = "power" if spec.kind == "radial_lemma_power" else "log"

    def profile(f, grid):
        return radial_lemma_ratio_profile(m, f, k, p, grid, variant, spec.quad_tol)

    coarse = _sup_over_grid(spec, families, profile, spec.grid)
    fine = _sup_over_grid(spec, families, profile, spec.grid.doubled())
    change = abs(fine["value"] - coarse["value"]) / max(coarse["value"], _TINY)
    kept = {f.label for f in families}
    measured = {
        "constant": fine["value"],
        "constant_coarse_grid": coarse["value"],
        "grid_doubling_change": change,
        "skipped_families": [f.label for f in spec.families if f.label not in kept],
    }
    ok = bool(families) and math.isfinite(fine["value"]) and change <= spec.tol
    fine.pop("value", None)
    return measured, fine, ok


def decay_ratio_profile(m: ManifoldSpec, f: RadialFunction, p: float,
                        grid: np.ndarray, quad_tol: float = 1e-10) -> np.ndarray | None:
    """Pointwise decay ratio |v(r)| / (explicit decay bound at r).

    None when the family has no finite nonzero first-order norms on the
    unbounded domain (the family is skipped).  Points where both sides
    vanish would be skipped; with positive warp and norms the bound is
    strictly positive, so the ratio is everywhere well defined.
    """
    n, w = m.dim, m.warp
    cphi = c_phi(w)
    omega = sphere_volume(n)
    prefactor = (p / (cphi ** (n - 1) * omega)) ** (1 / p)
    parts = sobolev_seminorms_1d(f, 1, p, n, w, quad_tol)
    if not all(math.isfinite(x) for x in parts) or math.fsum(parts) == 0.0:
        return None
    lp_norm = (omega * parts[0]) ** (1 / p)
    grad_norm = (omega * parts[1]) ** (1 / p)
    rhs = (
        prefactor
        * lp_norm ** ((p - 1) / p)
        * grad_norm ** (1 / p)
        * warp_value(w, grid) ** ((1 - n) / p)
    )
    num = np.abs(f.values(grid))
    both_zero = (num <= _TINY) & (np.abs(rhs) <= _TINY)
    return np.where(both_zero, 0.0, num / np.maximum(rhs, _TINY))


def check_decay_lemma(spec: CheckSpec) -> tuple[dict, dict, bool]:
    m = spec.manifold
    n, p = m.dim, spec.p
    w = m.warp
    cphi = c_phi(w)
    omega = sphere_volume(n)
    prefactor = (p / (cphi ** (n - 1) * omega)) ** (1 / p)
    worst = {"ratio": -1.0}
    skipped_families = []
    grid = spec.grid.resolve(w.radius)
    for f in spec.families:
        ratio = decay_ratio_profile(m, f, p, grid, spec.quad_tol)
        if ratio is None:
            skipped_families.append(f.label)
            continue
        i = int(np.argmax(ratio))
        if ratio[i] > worst["ratio"]:
            worst = {"ratio": float(ratio[i]), "r": float(grid[i]), "family": f.label}
    measured = {
        "max_ratio": worst.pop("ratio"),
        "prefactor": prefactor,
        "c_phi": cphi,
        "skipped_points": 0,
        "skipped_families": skipped_families,
    }
    ok = len(skipped_families) < len(spec.families) and measured["max_ratio"] <= 1.0 + spec.tol
    return measured, worst, ok


def check_hardy(spec: CheckSpec) -> tuple[dict, dict, bool]:
    m = spec.manifold
    n, k, p, j = m.dim, spec.k, spec.p, spec.j
    w = m.warp

    def constant(quad_tol):
        best = {"value": -1.0}
        skipped = []
        for f in spec.families:
            parts = sobolev_seminorms_1d(f, k, p, n, w, quad_tol)
            rhs = math.fsum(parts[k - j:])
            lhs_integrand = Integrand(
                (lambda ff: lambda t: np.abs(ff.derivative_values(t, k - j)) ** p)(f),
                n - 1.0 - j * p,
            )
            res = integrate_weighted(lhs_integrand, w, quad_tol)
            lhs = res.value if res.converged else math.inf
            if not (math.isfinite(lhs) and math.isfinite(rhs)) or rhs == 0.0:
                skipped.append(f.label)
                continue
            ratio = lhs / rhs
            if ratio > best["value"]:
                best = {"value": ratio, "family": f.label, "lhs": lhs, "rhs": rhs}
        return best, skipped

    coarse, _ = constant(spec.quad_tol)
    fine, skipped = constant(spec.quad_tol / 16.0)
    change = abs(fine["value"] - coarse["value"]) / max(coarse["value"], _TINY)
    measured = {
        "constant": fine["value"],
        "refinement_change": change,
        "skipped_families": skipped,
    }
    ok = (
        math.isfinite(fine["value"])
        and fine["value"] > 0
        and change <= spec.tol
        and (j > 0 or fine["value"] <= 1.0 + 1e-10)
    )
    worst = {key: fine[key] for key in ("family", "lhs", "rhs") if key in fine}
    return measured, worst, ok


def _embedding_sides(spec: CheckSpec, f: RadialFunction, q: float, quad_tol: float):
    m = spec.manifold
    n = m.dim
    w = m.warp
    if spec.variant == "manifold":
        num = sphere_volume(n) ** (1 / q) * lq_theta_norm_1d(
            f, q, spec.theta + n - 1.0, w, quad_tol
        )
        den = sobolev_norm_manifold(f, spec.k, spec.p, m, quad_tol)
    else:
        num = lq_theta_norm_1d(f, q, spec.theta, w, quad_tol)
        den = sobolev_norm_1d(f, spec.k, spec.p, n, w, quad_tol)
    return num, den


def check_embedding_ratio(spec: CheckSpec) -> tuple[dict, dict, bool]:
    m = spec.manifold
    n = m.dim

    def constant(q, quad_tol):
        best = {"value": -1.0}
        skipped = []
        for f in spec.families:
            num, den = _embedding_sides(spec, f, q, quad_tol)
            if not (math.isfinite(num) and math.isfinite(den)) or den == 0.0:
                skipped.append(f.label)
                continue
            ratio = num / den
            if ratio > best["value"]:
                best = {"value": ratio, "family": f.label, "lq_norm": num, "sobolev_norm": den}
        return best, skipped

    coarse, _ = constant(spec.q, spec.quad_tol)
    fine, skipped = constant(spec.q, spec.quad_tol / 16.0)
    change = abs(fine["value"] - coarse["value"]) / max(coarse["value"], _TINY)
    measured = {
        "constant": fine["value"],
        "refinement_change": change,
        "skipped_families": skipped,
    }
    if math.isinf(m.warp.radius) and not spec.diagnostic and n > spec.k * spec.p:
        q_star = (
            (spec.theta + n) * spec.p / (n - spec.k * spec.p)
            if spec.variant == "manifold"
            else (spec.theta + 1) * spec.p / (n - spec.k * spec.p)
        )
        measured["constant_at_q_lower"] = constant(spec.p, spec.quad_tol)[0]["value"]
        measured["constant_at_q_critical"] = constant(q_star, spec.quad_tol)[0]["value"]
    ok = (
        len(skipped) < len(spec.families)
        and math.isfinite(fine["value"])
        and fine["value"] > 0
        and change <= spec.tol
    )
    worst = {key: fine[key] for key in ("family", "lq_norm", "sobolev_norm") if key in fine}
    return measured, worst, ok


def check_counterexample(spec: CheckSpec) -> tuple[dict, dict, bool]:
    m = spec.manifold
    n, k, p = m.dim, spec.k, spec.p
    w = m.warp
    alpha = n - 1.0 - (k - 1) * p

    weight_res = integrate_weighted(
        Integrand(lambda t: np.ones_like(t), n - 1.0), w, spec.quad_tol
    )
    linear = RadialFunction.linear()
    interval_norm = sobolev_norm_1d(linear, k, p, n, w, spec.quad_tol)

    r0 = min(1.0, w.radius / 2.0)
    probe = divergence_probe(
        Integrand(lambda t: np.ones_like(t), alpha),
        w,
        r0,
        [1e-2, 3e-3, 1e-3, 3e-4, 1e-4],
    )
    expect_log = alpha == -1.0
    expected_exponent = 0.0 if expect_log else -(alpha + 1.0)
    if expect_log:
        law_ok = probe.kind == "log"
    else:
        law_ok = probe.kind == "power" and abs(
            probe.exponent - expected_exponent
        ) <= spec.tol * abs(expected_exponent)
    measured = {
        "fitted_law": probe.kind,
        "fitted_exponent": probe.exponent,
        "expected_law": "log" if expect_log else "power",
        "expected_exponent": expected_exponent,
        "fit_residual": probe.residual,
        "interval_norm": interval_norm,
        "weight_integrable": bool(weight_res.converged),
    }
    ok = law_ok and math.isfinite(interval_norm) and weight_res.converged
    worst = {"r0": r0, "family": linear.label}
    return measured, worst, ok


def check_asymptotic_leading(spec: CheckSpec) -> tuple[dict, dict, bool]:
    m = spec.manifold
    k = spec.k
    target = (-1.0) ** k * math.factorial(k - 2)
    r_coarse, r_fine = 1e-2, 1e-3
    ratio_coarse = geometry.asymptotic_leading_ratio(m, k, r_coarse)
    ratio_fine = geometry.asymptotic_leading_ratio(m, k, r_fine)
    err_coarse = abs(ratio_coarse - target)
    err_fine = abs(ratio_fine - target)
    if k == 2:
        ok = err_fine <= 1e-12 and err_coarse <= 1e-12
    else:
        ok = err_fine <= spec.tol * abs(target) and err_fine <= err_coarse + 1e-9
    measured = {
        "target": target,
        "ratio_at_1e-2": ratio_coarse,
        "ratio_at_1e-3": ratio_fine,
    }
    worst = {"r": r_fine, "abs_error": err_fine}
    return measured, worst, ok


_DISPATCH = {
    "identity": check_identity,
    "gradient_inequality": check_gradient_inequality,
    "k1_norm_equality": check_k1_norm_equality,
    "radial_lemma_power": check_radial_lemma,
    "radial_lemma_log": check_radial_lemma,
    "decay_lemma": check_decay_lemma,
    "hardy": check_hardy,
    "embedding_ratio": check_embedding_ratio,
    "counterexample": check_counterexample,
    "asymptotic_leading": check_asymptotic_leading,
}

_GRIDLESS = {"counterexample", "asymptotic_leading", "hardy", "k1_norm_equality", "embedding_ratio"}


def run_check(spec: CheckSpec) -> CheckResult:
    start = time.perf_counter()
    measured, worst, ok = _DISPATCH[spec.kind](spec)
    elapsed_ms = (time.perf_counter() - start) * 1e3
    grid_meta = {} if spec.kind in _GRIDLESS else spec.grid.meta(spec.manifold.warp.radius)
    return CheckResult(
        kind=spec.kind,
        params=spec.params_dict(),
        verdict="pass" if ok else "fail",
        measured=measured,
        worst_case=worst,
        grid=grid_meta,
        runtime_ms=elapsed_ms,
    )


def run_suite(specs, workers: int | None = None) -> VerificationReport:
    """Run all checks (optionally across worker threads) into one report."""
    specs = list(specs)
    if workers is None:
        workers = int(os.environ.get("RADWARP_WORKERS", "1"))
    if workers > 1 and len(specs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_check, specs))
    else:
        results = [run_check(s) for s in specs]
    meta = {
        "check_count": len(results),
        "passed": sum(r.verdict == "pass" for r in results),
        "workers": workers,
    }
    return VerificationReport(meta, tuple(results))
