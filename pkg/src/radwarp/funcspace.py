"""Radial test-function families and weighted Lebesgue/Sobolev norms.

Each family carries closed-form derivative jets to order 4 at any point of
its domain, so norm integrands and covariant-derivative inputs are exact.
Families destined for unbounded domains also declare a decay envelope
(see quadrature.DecayEnvelope) used to certify tail truncation.

Norm conventions
----------------
The interval Sobolev norm sums over all derivative orders inside one p-th
root:  ( sum_{j<=k} int |v^(j)|^p phi^(N-1) )^(1/p).  The manifold norm is
the sum of p-th roots:  sum_{j<=k} ( omega_{N-1} int |grad^j u|_g^p
phi^(N-1) )^(1/p).  Both forms are in common use; every comparison in the
verification layer states which side uses which.  Divergent integrals make a
norm infinite (math.inf), the "infinite norm" signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import DomainError, InadmissibleParameterError
from .jets import Jet, jet_compose_univariate, jet_from_derivatives
from .manifold import ManifoldSpec, WarpSpec, sphere_volume
from .quadrature import DecayEnvelope, Integrand, integrate_weighted

FAMILY_KINDS = ("gaussian", "power_decay", "polynomial_bump", "log_profile", "linear")

MAX_JET_ORDER = 4


@dataclass(frozen=True)
class RadialFunction:
    """A named radial profile v on (0, R) with exact derivative jets.

    `envelope_override` replaces the built-in decay envelope with user-given
    parameters (coef, power, rate[, quad_rate[, valid_from]]); it is checked
    against all derivative orders on a validation grid at construction.
    """

    family: str
    params: tuple[tuple[str, float], ...] = ()
    envelope_override: tuple[float, ...] = ()

    def __post_init__(self):
        if self.family not in FAMILY_KINDS:
            raise DomainError(f"unknown family {self.family!r}; expected one of {FAMILY_KINDS}")
        object.__setattr__(
            self, "params", tuple((k, float(v)) for k, v in self.params)
        )
        if self.envelope_override:
            if not 3 <= len(self.envelope_override) <= 5:
                raise DomainError(
                    "envelope override takes (coef, power, rate[, quad_rate[, valid_from]])"
                )
            object.__setattr__(
                self, "envelope_override", tuple(float(x) for x in self.envelope_override)
            )
            self._validate_envelope(self._override_envelope())

    # -- constructors --------------------------------------------------------

    @staticmethod
    def gaussian(a: float = 1.0) -> "RadialFunction":
        if a <= 0:
            raise DomainError("gaussian rate must be positive")
        return RadialFunction("gaussian", (("a", a),))

    @staticmethod
    def power_decay(a: float = 1.0) -> "RadialFunction":
        if a <= 0:
            raise DomainError("power-decay exponent must be positive")
        return RadialFunction("power_decay", (("a", a),))

    @staticmethod
    def polynomial_bump(coeffs=(1.0,), support: float = 1.0) -> "RadialFunction":
        if support <= 0:
            raise DomainError("bump support radius must be positive")
        params = (("support", support),) + tuple(
            (f"c{m}", c) for m, c in enumerate(coeffs)
        )
        return RadialFunction("polynomial_bump", params)

    @staticmethod
    def log_profile(r_ref: float, delta: float = 1e-2) -> "RadialFunction":
        if r_ref <= 0 or delta <= 0:
            raise DomainError("log profile needs positive reference radius and cutoff")
        return RadialFunction("log_profile", (("r_ref", r_ref), ("delta", delta)))

    @staticmethod
    def linear() -> "RadialFunction":
        return RadialFunction("linear")

    # -- parameter access ----------------------------------------------------

    def param(self, name: str) -> float:
        for key, val in self.params:
            if key == name:
                return val
        raise KeyError(name)

    def bump_coeffs(self) -> list[float]:
        return [val for key, val in self.params if key.startswith("c")]

    @property
    def label(self) -> str:
        inner = ",".join(f"{k}={v:g}" for k, v in self.params)
        return f"{self.family}({inner})" if inner else self.family

    # -- evaluation ----------------------------------------------------------

    def eval_jet(self, t, order: int) -> Jet:
        """Univariate jet of v at t (t > 0, scalar or array), order <= 4."""
        if order > MAX_JET_ORDER:
            raise DomainError(f"family jets are available up to order {MAX_JET_ORDER}")
        ta = np.asarray(t, dtype=np.float64)
        if np.any(ta <= 0.0):
            raise DomainError("radial profiles are evaluated at t > 0")
        if self.family == "gaussian":
            a = self.param("a")
            inner = jet_from_derivatives(
                np.stack([-a * ta**2, -2 * a * ta, np.full_like(ta, -2 * a)][: order + 1]
                         + [np.zeros_like(ta)] * max(0, order - 2))
            )
            return jet_compose_univariate("exp", inner)
        if self.family == "power_decay":
            a = self.param("a")
            inner = jet_from_derivatives(
                np.stack([1.0 + ta**2, 2 * ta, np.full_like(ta, 2.0)][: order + 1]
                         + [np.zeros_like(ta)] * max(0, order - 2))
            )
            return jet_compose_univariate("pow", inner, alpha=-a)
        if self.family == "log_profile":
            r_ref = self.param("r_ref")
            delta = self.param("delta")
            inner = jet_from_derivatives(
                np.stack([ta**2 + delta**2, 2 * ta, np.full_like(ta, 2.0)][: order + 1]
                         + [np.zeros_like(ta)] * max(0, order - 2))
            )
            return math.log(r_ref) - 0.5 * jet_compose_univariate("log", inner)
        if self.family == "linear":
            rows = [ta, np.ones_like(ta)] + [np.zeros_like(ta)] * max(0, order - 1)
            return jet_from_derivatives(np.stack(rows[: order + 1]))
        return self._bump_jet(ta, order)

    def _bump_jet(self, ta: np.ndarray, order: int) -> Jet:
        # smooth cutoff exp(1 - 1/(1 - (t/S)^2)) carried against the
        # polynomial factor; identically zero at and beyond the support
        s = self.param("support")
        coeffs = self.bump_coeffs()
        scalar = ta.ndim == 0
        tb = np.atleast_1d(ta)
        out = np.zeros(tb.shape + (order + 1,))
        inside = tb < s * (1.0 - 1e-8)
        if np.any(inside):
            ti = tb[inside]
            w_rows = [1.0 - (ti / s) ** 2, -2 * ti / s**2, np.full_like(ti, -2 / s**2)]
            w_rows += [np.zeros_like(ti)] * max(0, order - 2)
            w = jet_from_derivatives(np.stack(w_rows[: order + 1]))
            cut = jet_compose_univariate("exp", 1.0 - jet_compose_univariate("recip", w))
            poly_rows = []
            for m in range(order + 1):
                acc = np.zeros_like(ti)
                for deg, c in enumerate(coeffs):
                    if deg >= m:
                        fall = math.factorial(deg) // math.factorial(deg - m)
                        acc = acc + c * fall * ti ** (deg - m)
                poly_rows.append(acc)
            val = cut * jet_from_derivatives(np.stack(poly_rows))
            out[inside] = val.coeffs
        coeffs_arr = out[0] if scalar else out
        return Jet(1, order, coeffs_arr)

    def values(self, t) -> np.ndarray:
        return np.asarray(self.eval_jet(t, 0).value, dtype=np.float64)

    def derivative_values(self, t, j: int) -> np.ndarray:
        return np.asarray(self.eval_jet(t, j).derivative(j), dtype=np.float64)

    # -- decay ----------------------------------------------------------------

    def _override_envelope(self) -> DecayEnvelope:
        coef, power, rate, *rest = self.envelope_override
        quad = rest[0] if rest else 0.0
        valid_from = rest[1] if len(rest) > 1 else 1.0
        return DecayEnvelope(coef, power, rate, valid_from, quad)

    def _validate_envelope(self, env: DecayEnvelope):
        grid = np.geomspace(max(env.valid_from, 1e-3), max(40.0, 4 * env.valid_from), 96)
        bound = env.coef * grid**env.power * np.exp(-env.rate * grid - env.quad_rate * grid**2)
        for j in range(MAX_JET_ORDER + 1):
            vals = np.abs(self.derivative_values(grid, j))
            if np.any(vals > bound + 1e-300):
                raise DomainError(
                    f"envelope override violated by derivative order {j} of {self.label}"
                )

    def decay_envelope(self) -> DecayEnvelope | None:
        """Bound valid for every derivative order up to 4 on the tail."""
        if self.envelope_override:
            return self._override_envelope()
        if self.family == "gaussian":
            a = self.param("a")
            return DecayEnvelope(2.0 * (1.0 + 2.0 * a) ** 4, 4.0, 0.0, 1.0, quad_rate=a)
        if self.family == "power_decay":
            a = self.param("a")
            return DecayEnvelope((2.0 * a + 4.0) ** 4, -2.0 * a, 0.0, 1.0)
        if self.family == "polynomial_bump":
            return DecayEnvelope(0.0, 0.0, 0.0, self.param("support"))
        if self.family == "linear":
            return DecayEnvelope(1.0, 1.0, 0.0, 1.0)
        return None  # log_profile: bounded-interval use only

    def admissible_unbounded(self) -> bool:
        """Whether tail truncation over R = inf can ever be certified.

        True when the envelope decays in some sense (compactly supported,
        exponential/Gaussian rate, or a negative power); whether a specific
        norm is finite still depends on the warp weight it meets.
        """
        env = self.decay_envelope()
        return env is not None and (
            env.coef == 0.0 or env.rate > 0 or env.quad_rate > 0 or env.power < 0
        )


def default_families(radius: float) -> tuple[RadialFunction, ...]:
    """The standard five-family test set, sized to the domain radius."""
    bump_support = min(0.8 * radius, 4.0)
    log_ref = radius if math.isfinite(radius) else 10.0
    return (
        RadialFunction.gaussian(1.0),
        RadialFunction.power_decay(1.5),
        RadialFunction.polynomial_bump((1.0, -0.3, 0.2), support=bump_support),
        RadialFunction.log_profile(log_ref),
        RadialFunction.linear(),
    )


# ---------------------------------------------------------------------------
# norm requests and critical exponents


@dataclass(frozen=True)
class NormRequest:
    """Exponent bundle (k, p, theta, q) with the critical-exponent algebra."""

    k: int = 1
    p: float = 2.0
    theta: float = 0.0
    q: float = 2.0

    def __post_init__(self):
        if self.k < 0:
            raise InadmissibleParameterError("derivative count k must be >= 0")
        if self.p < 1 or self.q < 1:
            raise InadmissibleParameterError("Lebesgue exponents must be >= 1")
        if self.theta < 0:
            raise InadmissibleParameterError("weight exponent theta must be >= 0")

    def critical_q_manifold(self, n: int) -> float:
        """(theta + N) p / (N - kp); requires N > kp."""
        if n <= self.k * self.p:
            raise InadmissibleParameterError(
                f"critical exponent needs N > kp (N={n}, k={self.k}, p={self.p})"
            )
        return (self.theta + n) * self.p / (n - self.k * self.p)

    def critical_q_interval(self, n: int) -> float:
        """(theta + 1) p / (N - kp); requires N > kp."""
        if n <= self.k * self.p:
            raise InadmissibleParameterError(
                f"critical exponent needs N > kp (N={n}, k={self.k}, p={self.p})"
            )
        return (self.theta + 1) * self.p / (n - self.k * self.p)


# ---------------------------------------------------------------------------
# norms


def _weighted_integral(evaluator, theta: float, w: WarpSpec,
                       envelope: DecayEnvelope | None, tol: float,
                       min_t: float = 0.0) -> float:
    if math.isinf(w.radius) and envelope is None:
        return math.inf  # no certified tail: infinite-norm signal
    res = integrate_weighted(Integrand(evaluator, theta, envelope), w, tol, min_t=min_t)
    if not res.converged:
        return math.inf
    return res.value


def lq_theta_norm_1d(v: RadialFunction, q: float, theta: float, w: WarpSpec,
                     tol: float = 1e-10) -> float:
    """( int_0^R |v|^q phi^theta dt )^(1/q); inf when the integral diverges."""
    if q < 1:
        raise InadmissibleParameterError("Lebesgue exponent must be >= 1")
    env = None
    if math.isinf(w.radius):
        base = v.decay_envelope()
        env = base.power_scaled(q) if base is not None else None
    value = _weighted_integral(lambda t: np.abs(v.values(t)) ** q, theta, w, env, tol)
    return value ** (1.0 / q) if math.isfinite(value) else math.inf


def sobolev_seminorms_1d(v: RadialFunction, k: int, p: float, n: int, w: WarpSpec,
                         tol: float = 1e-10) -> list[float]:
    """The k+1 weighted integrals int |v^(j)|^p phi^(N-1) dt, j = 0..k."""
    if n < 2:
        raise InadmissibleParameterError("weight dimension must be >= 2")
    if k > MAX_JET_ORDER:
        raise InadmissibleParameterError(f"derivative count limited to {MAX_JET_ORDER}")
    base_env = v.decay_envelope() if math.isinf(w.radius) else None
    out = []
    for j in range(k + 1):
        env = base_env.power_scaled(p) if base_env is not None else None
        evaluator = (lambda jj: lambda t: np.abs(v.derivative_values(t, jj)) ** p)(j)
        out.append(_weighted_integral(evaluator, n - 1.0, w, env, tol))
    return out


def sobolev_norm_1d(v: RadialFunction, k: int, p: float, n: int, w: WarpSpec,
                    tol: float = 1e-10) -> float:
    """( sum_{j<=k} int |v^(j)|^p phi^(N-1) )^(1/p); inf on divergence."""
    parts = sobolev_seminorms_1d(v, k, p, n, w, tol)
    total = math.fsum(parts)
    return total ** (1.0 / p) if math.isfinite(total) else math.inf


def _profile_envelope(v: RadialFunction, m: ManifoldSpec, j: int,
                      p: float) -> DecayEnvelope | None:
    """Envelope for |grad^j u|_g^p via a tail-validated geometry margin.

    The covariant components mix v^(i), i <= j, with bounded warp ratio
    factors on the tail; the margin is measured on a sample grid and
    inflated, then checked against the family envelope shape.
    """
    base = v.decay_envelope()
    if base is None or not v.admissible_unbounded():
        return None
    if base.coef == 0.0:
        return base  # compact support survives differentiation
    t0 = max(base.valid_from, 1.0)
    grid = np.geomspace(t0, 4.0 * t0, 33)
    profile = geometry.norm_profiles(v, m, grid, j)[j]
    env_vals = base.coef * grid**base.power * np.exp(
        -base.rate * grid - base.quad_rate * grid**2
    )
    margin = float(np.max(profile / env_vals)) if np.all(env_vals > 0) else math.inf
    if not math.isfinite(margin):
        return None
    return base.scaled(4.0 * max(margin, 1.0)).power_scaled(p)


def sobolev_norm_manifold(v: RadialFunction, k: int, p: float, m: ManifoldSpec,
                          tol: float = 1e-10) -> float:
    """sum_{j<=k} ( omega_{N-1} int |grad^j u|_g^p phi^(N-1) dr )^(1/p).

    The pointwise tensor norms come from the covariant recursion at the
    default evaluation angles; angle independence is a separately tested
    property, so the sphere integral collapses to the radial line.
    """
    if k > MAX_JET_ORDER:
        raise InadmissibleParameterError(f"derivative count limited to {MAX_JET_ORDER}")
    omega = sphere_volume(m.dim)
    unbounded = math.isinf(m.warp.radius)
    terms = []
    for j in range(k + 1):
        env = _profile_envelope(v, m, j, p) if unbounded else None
        if unbounded and env is None:
            return math.inf
        evaluator = (lambda jj: lambda t: geometry.norm_profiles(v, m, t, jj)[jj] ** p)(j)
        integral = _weighted_integral(
            evaluator, m.dim - 1.0, m.warp, env, tol, min_t=geometry.MIN_RADIUS
        )
        if not math.isfinite(integral):
            return math.inf
        terms.append((omega * integral) ** (1.0 / p))
    return math.fsum(terms)


def gradient_norm_manifold(v: RadialFunction, p: float, m: ManifoldSpec,
                           tol: float = 1e-10) -> float:
    """( omega_{N-1} int |grad u|_g^p phi^(N-1) dr )^(1/p), recursion route."""
    omega = sphere_volume(m.dim)
    env = _profile_envelope(v, m, 1, p) if math.isinf(m.warp.radius) else None
    if math.isinf(m.warp.radius) and env is None:
        return math.inf
    evaluator = lambda t: geometry.norm_profiles(v, m, t, 1)[1] ** p
    integral = _weighted_integral(
        evaluator, m.dim - 1.0, m.warp, env, tol, min_t=geometry.MIN_RADIUS
    )
    return (omega * integral) ** (1.0 / p) if math.isfinite(integral) else math.inf
