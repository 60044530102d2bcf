"""Adaptive weighted integration on (0, R) with endpoint-aware panelling.

Integrals of the form  int_0^R f(t) * phi(t)^theta_w dt  are computed with
Gauss-Kronrod 15(7) panels arranged dyadically toward the origin, where the
weight behaves like t^theta_w; the geometric grading equidistributes the
error without Jacobi-weighted rules.  Unbounded domains are truncated at a
point T whose tail contribution is bounded through a declared decay envelope
(coef * t^power * exp(-rate t)); the bound is folded into the reported error
estimate, so truncation stays certified.

Integrands are evaluated strictly inside (0, R); the endpoints are never
touched.  All panel schedules and summation orders are fixed, so results are
deterministic for identical inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gammaincc

from .errors import DomainError, EvaluationError
from .manifold import WarpSpec, warp_growth_bounds, warp_value

# Gauss-Kronrod 15(7) nodes on [-1, 1] and the matching weights.  Gauss
# weights are zero on the Kronrod-only nodes.
_GK_NODES = np.array([
    0.000000000000000,
    -0.207784955007898, 0.207784955007898,
    -0.405845151377397, 0.405845151377397,
    -0.586087235467691, 0.586087235467691,
    -0.741531185599394, 0.741531185599394,
    -0.864864423359769, 0.864864423359769,
    -0.949107912342759, 0.949107912342759,
    -0.991455371120813, 0.991455371120813,
])
_GK_WEIGHTS_K = np.array([
    0.209482141084728,
    0.204432940075298, 0.204432940075298,
    0.190350578064785, 0.190350578064785,
    0.169004726639267, 0.169004726639267,
    0.140653259715525, 0.140653259715525,
    0.104790010322250, 0.104790010322250,
    0.063092092629979, 0.063092092629979,
    0.022935322010529, 0.022935322010529,
])
_GK_WEIGHTS_G = np.array([
    0.417959183673469,
    0.000000000000000, 0.000000000000000,
    0.381830050505119, 0.381830050505119,
    0.000000000000000, 0.000000000000000,
    0.279705391489277, 0.279705391489277,
    0.000000000000000, 0.000000000000000,
    0.129484966168870, 0.129484966168870,
    0.000000000000000, 0.000000000000000,
])

_MACHINE_FLOOR = 32 * np.finfo(np.float64).eps
_MAX_BISECT_DEPTH = 26
_MAX_PANEL_LEVELS = 200

# process-wide default for the panel budget; the CLI sets it from the
# quadrature.panel_budget config key
DEFAULT_PANEL_BUDGET = 4000


@dataclass(frozen=True)
class DecayEnvelope:
    """Certified bound |f(t)| <= coef * t^power * exp(-rate*t - quad_rate*t^2).

    Valid for t >= valid_from.  The quadratic term carries Gaussian-type
    profiles, whose tails would otherwise be uncertifiable against
    exponentially growing warp weights.  coef == 0 encodes compact support:
    the function vanishes beyond valid_from exactly.
    """

    coef: float
    power: float = 0.0
    rate: float = 0.0
    valid_from: float = 1.0
    quad_rate: float = 0.0

    def scaled(self, c: float) -> "DecayEnvelope":
        return DecayEnvelope(self.coef * c, self.power, self.rate, self.valid_from, self.quad_rate)

    def power_scaled(self, q: float) -> "DecayEnvelope":
        if q < 0:
            raise DomainError("cannot raise a decay envelope to a negative power")
        return DecayEnvelope(
            self.coef**q, self.power * q, self.rate * q, self.valid_from, self.quad_rate * q
        )

    def times(self, other: "DecayEnvelope") -> "DecayEnvelope":
        return DecayEnvelope(
            self.coef * other.coef,
            self.power + other.power,
            self.rate + other.rate,
            max(self.valid_from, other.valid_from),
            self.quad_rate + other.quad_rate,
        )

    def tail_integral(self, t: float) -> float:
        """Upper bound for the integral of the envelope over [t, inf)."""
        if self.coef == 0.0:
            return 0.0
        t = max(t, self.valid_from)
        # exp(-c t^2) <= exp(-c T t) for t >= T folds the quadratic term
        # into an effective linear rate at the truncation point
        rate = self.rate + self.quad_rate * t
        if rate > 0:
            if self.power <= 0:
                return self.coef * t**self.power * math.exp(-rate * t) / rate
            s = self.power + 1.0
            return float(self.coef * rate**-s * math.gamma(s) * gammaincc(s, rate * t))
        if rate == 0.0 and self.power < -1.0:
            return self.coef * t ** (self.power + 1.0) / (-self.power - 1.0)
        return math.inf


@dataclass(frozen=True)
class Integrand:
    """Evaluator on (0, R), to be integrated against phi^weight_exponent.

    `envelope` bounds the raw evaluator (without the warp weight) on the tail
    of an unbounded domain; it is required there and ignored otherwise.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    weight_exponent: float = 0.0
    envelope: DecayEnvelope | None = None
    name: str = ""


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    subdivisions: int
    converged: bool


def _warp_power_envelope(w: WarpSpec, theta_w: float) -> DecayEnvelope:
    """Envelope of phi(t)^theta_w on the tail of an unbounded domain."""
    if theta_w == 0.0:
        return DecayEnvelope(1.0, 0.0, 0.0, 1.0)
    upper, lower = warp_growth_bounds(w)
    b = upper if theta_w > 0 else lower
    return DecayEnvelope(
        b.coef**theta_w, b.power * theta_w, -b.rate * theta_w, b.valid_from
    )


def _gk_segment(fn, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _GK_NODES
    y = np.asarray(fn(x), dtype=np.float64)
    if y.shape != x.shape:
        raise EvaluationError("integrand evaluator must be vectorized over its input")
    if not np.all(np.isfinite(y)):
        raise EvaluationError(f"integrand produced a non-finite value near t={x[~np.isfinite(y)][0]!r}")
    k = half * float(_GK_WEIGHTS_K @ y)
    g = half * float(_GK_WEIGHTS_G @ y)
    return k, abs(k - g)


def _adaptive_interval(fn, a: float, b: float, tol_abs: float) -> tuple[float, float, int]:
    """Depth-first bisection on [a, b]; error target proportional to length."""
    length = b - a
    segments = []  # (left endpoint, value, error), appended in position order
    stack = [(a, b, 0)]
    while stack:
        lo, hi, depth = stack.pop()
        val, err = _gk_segment(fn, lo, hi)
        target = tol_abs * (hi - lo) / length + _MACHINE_FLOOR * abs(val)
        if err <= target or depth >= _MAX_BISECT_DEPTH:
            segments.append((lo, val, err))
        else:
            mid = 0.5 * (lo + hi)
            stack.append((mid, hi, depth + 1))
            stack.append((lo, mid, depth + 1))
    segments.sort(key=lambda s: s[0])
    value = math.fsum(s[1] for s in segments)
    error = math.fsum(s[2] for s in segments)
    return value, error, len(segments)


def _truncation_point(env: DecayEnvelope, budget: float) -> float | None:
    t = max(env.valid_from, 1.0)
    while t < 2.0**40:
        if env.tail_integral(t) <= budget:
            return t
        t *= 2.0
    return None


def _remaining_mass_estimate(weighted, a: float, min_t: float) -> float:
    """Crude log-grid estimate of the integral over (0, a).

    Guards the small-panel early stop against integrands whose support sits
    far below the current panel scale (a narrow bump on a large domain would
    otherwise be missed entirely).  Midpoint rule in log coordinates over 24
    octaves; resolution floor a * 2^-24.
    """
    t = a * 2.0 ** -np.arange(1, 25, dtype=np.float64)
    if min_t > 0.0:
        t = t[t >= min_t]
    if t.size == 0:
        return 0.0
    y = np.abs(np.asarray(weighted(t), dtype=np.float64))
    return float(np.sum(y * t) * math.log(2.0))


def integrate_weighted(f: Integrand, w: WarpSpec, tol: float = 1e-10,
                       panel_budget: int | None = None, min_t: float = 0.0) -> QuadResult:
    """Integrate f.evaluator(t) * phi(t)^f.weight_exponent over (0, R).

    Panels are [U 2^-(m+1), U 2^-m] for m = 0, 1, ...; refinement toward the
    origin stops once two consecutive panel contributions fall below the
    running tolerance, and the leftover sliver is bounded by geometric
    extrapolation.  Divergent behaviour toward 0 (contributions that keep
    growing) yields converged=False with an infinite error estimate.

    `min_t` keeps panels away from evaluators with a positive proximity
    floor; the uncovered sliver is still accounted for in the error.
    """
    if tol < 1e-13:
        raise DomainError("quadrature tolerance below 1e-13 is not supported")
    if panel_budget is None:
        panel_budget = DEFAULT_PANEL_BUDGET

    if f.weight_exponent == 0.0:
        weighted = lambda t: np.asarray(f.evaluator(t), dtype=np.float64)
    else:
        weighted = lambda t: np.asarray(f.evaluator(t), dtype=np.float64) * warp_value(
            w, t
        ) ** f.weight_exponent

    tail_bound = 0.0
    certified_tail = True
    if math.isinf(w.radius):
        if f.envelope is None:
            raise DomainError("integration over an unbounded domain requires a decay envelope")
        total_env = f.envelope.times(_warp_power_envelope(w, f.weight_exponent))
        upper = _truncation_point(total_env, tol / 4.0)
        if upper is None:
            upper = 64.0
            tail_bound = math.inf
            certified_tail = False
        else:
            tail_bound = total_env.tail_integral(upper)
    else:
        upper = w.radius

    contributions: list[float] = []
    errors: list[float] = []
    subdivisions = 0
    total = 0.0
    small_run = 0
    growth_run = 0
    diverging = False
    m = 0
    while m <= _MAX_PANEL_LEVELS and subdivisions < panel_budget:
        a_panel = upper * 2.0 ** -(m + 1)
        b_panel = upper * 2.0**-m
        if a_panel < min_t:
            break  # evaluator floor reached; the sliver bound covers the rest
        scale = max(1.0, abs(total))
        panel_tol = tol * scale / (8.0 * (m + 1) * (m + 2))
        val, err, nsub = _adaptive_interval(weighted, a_panel, b_panel, panel_tol)
        contributions.append(val)
        errors.append(err)
        subdivisions += nsub
        total = math.fsum(contributions)
        stop_tol = tol * max(1.0, abs(total)) / 32.0
        if abs(val) + err <= stop_tol:
            small_run += 1
            growth_run = 0
            if small_run >= 2:
                if _remaining_mass_estimate(weighted, a_panel, min_t) <= stop_tol:
                    break
                small_run = 0  # mass detected further down: keep descending
        else:
            small_run = 0
            if m >= 1 and abs(val) >= 0.999 * abs(contributions[-2]):
                growth_run += 1
                if growth_run >= 8:
                    diverging = True
                    break
            else:
                growth_run = 0
        m += 1

    value = math.fsum(reversed(contributions))  # ascending t order

    if diverging:
        sliver = math.inf
    else:
        # contributions of an integrable singularity decay geometrically;
        # bound the uncovered sliver (0, U 2^-(m+1)) by extrapolating the
        # worst recent decay ratio
        tail_c = [abs(c) for c in contributions[-4:]]
        ratios = [tail_c[i + 1] / tail_c[i] for i in range(len(tail_c) - 1) if tail_c[i] > 0]
        q = max(ratios) if ratios else 0.0
        if q == 0.0:
            sliver = 0.0
        elif q < 0.97:
            sliver = abs(contributions[-1]) * q / (1.0 - q)
        else:
            sliver = math.inf

    error_estimate = math.fsum(errors) + sliver + tail_bound
    converged = certified_tail and error_estimate <= tol * max(1.0, abs(value))
    return QuadResult(value, error_estimate, subdivisions, converged)


# ---------------------------------------------------------------------------
# divergence probing near the origin


@dataclass(frozen=True)
class ProbeResult:
    """Fitted behaviour of I(eps) = int_eps^R0 of a weighted integrand.

    kind is "power" (I ~ eps^-exponent), "log" (I ~ exponent * log(1/eps)),
    or "convergent" (I settles; exponent 0).
    """

    kind: str
    exponent: float
    residual: float
    eps: tuple[float, ...] = field(repr=False, default=())
    values: tuple[float, ...] = field(repr=False, default=())


def _integrate_log_window(weighted, lo: float, hi: float, tol: float) -> float:
    """Integral over [lo, hi] via s = log t substitution, GK panels in s."""
    transformed = lambda s: weighted(np.exp(s)) * np.exp(s)
    a, b = math.log(lo), math.log(hi)
    coarse = math.fsum(
        _gk_segment(transformed, a + (b - a) * i / 8, a + (b - a) * (i + 1) / 8)[0]
        for i in range(8)
    )
    value, _, _ = _adaptive_interval(transformed, a, b, tol * max(1.0, abs(coarse)))
    return value


def divergence_probe(f: Integrand, w: WarpSpec, r0: float, eps_list) -> ProbeResult:
    """Fit how int_eps^r0 f * phi^theta_w behaves as eps decreases.

    A power law I ~ eps^-e is fitted on log I vs log(1/eps); a logarithmic
    law I ~ s log(1/eps) on I vs log(1/eps).  Near-constant values signal a
    convergent integral and return exponent 0.
    """
    eps = [float(e) for e in eps_list]
    if len(eps) < 4:
        raise DomainError("divergence probe needs at least 4 cut points")
    if any(e2 >= e1 for e1, e2 in zip(eps, eps[1:])):
        raise DomainError("cut points must be strictly decreasing")
    if eps[-1] < 1e-6:
        raise DomainError("smallest cut point must be at least 1e-6")
    if not (0 < eps[0] < r0 <= w.radius):
        raise DomainError("cut points must lie inside (0, r0] with r0 <= R")

    if f.weight_exponent == 0.0:
        weighted = lambda t: np.asarray(f.evaluator(t), dtype=np.float64)
    else:
        weighted = lambda t: np.asarray(f.evaluator(t), dtype=np.float64) * warp_value(
            w, t
        ) ** f.weight_exponent

    values = [_integrate_log_window(weighted, e, r0, 1e-10) for e in eps]
    v = np.array(values)
    x = np.log(1.0 / np.array(eps))

    spread = np.max(v) - np.min(v)
    if spread <= 1e-3 * max(np.max(np.abs(v)), 1e-300):
        return ProbeResult("convergent", 0.0, 0.0, tuple(eps), tuple(values))

    def _fit(xs, ys):
        a = np.vstack([xs, np.ones_like(xs)]).T
        sol, *_ = np.linalg.lstsq(a, ys, rcond=None)
        resid = ys - a @ sol
        denom = np.std(ys) + 1e-300
        return float(sol[0]), float(np.sqrt(np.mean(resid**2)) / denom)

    fits = {}
    if np.all(v > 0):
        slope, resid = _fit(x, np.log(v))
        fits["power"] = (slope, resid)
    slope_log, resid_log = _fit(x, v)
    fits["log"] = (slope_log, resid_log)

    kind = min(fits, key=lambda k: fits[k][1])
    slope, resid = fits[kind]
    if kind == "power" and abs(slope) < 0.05:
        return ProbeResult("convergent", 0.0, resid, tuple(eps), tuple(values))
    return ProbeResult(kind, slope, resid, tuple(eps), tuple(values))
