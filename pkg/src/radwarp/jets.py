"""Truncated multivariate Taylor-jet arithmetic.

A jet stores the Taylor coefficients (derivative divided by factorial) of a
smooth function at a base point, up to a fixed total degree.  All downstream
differential geometry runs on jets, so every derivative in the package is
exact up to floating-point rounding; nothing is finite-differenced.

Coefficients live in a dense vector ordered by the canonical multi-index
enumeration (graded by total degree, lexicographic within a degree).  That
makes truncation to a lower order a prefix slice, and it lets us precompute
flat gather tables for products and partial derivatives once per
(num_vars, order) signature.

The coefficient array may carry leading batch dimensions.  Every operation
broadcasts over them, which is how grid sweeps over evaluation points are
vectorized: a jet "at r" where r is an array of shape (B,) simply has
coefficients of shape (B, n_terms).

Coefficients are raw Taylor coefficients.  Extraction helpers
(:meth:`Jet.derivative`) multiply the factorials back.

Variable indices in the public API are 1-based, matching the coordinate
convention used by the geometry layer (coordinate 1 is the radial one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import (
    BasePointError,
    DimensionError,
    DomainError,
    OrderExhaustedError,
    SingularCompositionError,
)

MAX_VARS = 8
MAX_ORDER = 6

COMPOSABLE_FUNCTIONS = (
    "sin",
    "cos",
    "sinh",
    "cosh",
    "tanh",
    "exp",
    "log",
    "pow",
    "recip",
)


# ---------------------------------------------------------------------------
# multi-index tables


def _compositions(total: int, slots: int) -> Iterable[tuple[int, ...]]:
    """All tuples of `slots` nonnegative ints summing to `total`, lex order."""
    if slots == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, slots - 1):
            yield (head,) + rest


@dataclass(frozen=True)
class _IndexTable:
    num_vars: int
    order: int
    indices: tuple[tuple[int, ...], ...]
    position: dict
    degrees: np.ndarray

    @property
    def n_terms(self) -> int:
        return len(self.indices)


@lru_cache(maxsize=None)
def _table(num_vars: int, order: int) -> _IndexTable:
    indices = []
    for deg in range(order + 1):
        indices.extend(_compositions(deg, num_vars))
    indices = tuple(indices)
    position = {alpha: i for i, alpha in enumerate(indices)}
    degrees = np.array([sum(a) for a in indices], dtype=np.int64)
    degrees.flags.writeable = False
    return _IndexTable(num_vars, order, indices, position, degrees)


def n_terms(num_vars: int, order: int) -> int:
    """Number of stored coefficients: C(num_vars + order, order)."""
    return _table(num_vars, order).n_terms


@dataclass(frozen=True)
class _MulTable:
    ia: np.ndarray
    ib: np.ndarray
    starts: np.ndarray  # reduceat segment starts, one per output position
    n_out: int


@lru_cache(maxsize=None)
def _mul_table(num_vars: int, order_a: int, order_b: int) -> _MulTable:
    d_out = min(order_a, order_b)
    ta = _table(num_vars, order_a)
    tb = _table(num_vars, order_b)
    tout = _table(num_vars, d_out)
    triples = []
    for ia, alpha in enumerate(ta.indices):
        da = sum(alpha)
        if da > d_out:
            break  # graded ordering: all later terms have degree >= da
        for ib, beta in enumerate(tb.indices):
            if da + sum(beta) > d_out:
                break
            gamma = tuple(alpha[v] + beta[v] for v in range(num_vars))
            triples.append((tout.position[gamma], ia, ib))
    triples.sort()
    out_pos = np.array([t[0] for t in triples], dtype=np.intp)
    ia_arr = np.array([t[1] for t in triples], dtype=np.intp)
    ib_arr = np.array([t[2] for t in triples], dtype=np.intp)
    # every output slot is hit at least once (pair with the zero multi-index)
    starts = np.searchsorted(out_pos, np.arange(tout.n_terms))
    for arr in (ia_arr, ib_arr, starts):
        arr.flags.writeable = False
    return _MulTable(ia_arr, ib_arr, starts, tout.n_terms)


@lru_cache(maxsize=None)
def _partial_table(num_vars: int, order: int, var0: int):
    tsrc = _table(num_vars, order)
    tdst = _table(num_vars, order - 1)
    src = np.empty(tdst.n_terms, dtype=np.intp)
    scale = np.empty(tdst.n_terms, dtype=np.float64)
    for i, alpha in enumerate(tdst.indices):
        bumped = tuple(a + (1 if v == var0 else 0) for v, a in enumerate(alpha))
        src[i] = tsrc.position[bumped]
        scale[i] = alpha[var0] + 1
    src.flags.writeable = False
    scale.flags.writeable = False
    return src, scale


# ---------------------------------------------------------------------------
# base points


class BasePoint:
    """Shared expansion point for a family of jets.

    Stored once and threaded through a computation; combining jets anchored
    at different base points is rejected.  Coordinates may be scalars or
    batch arrays (all jets of the computation then carry the batch shape).
    """

    __slots__ = ("coords",)

    def __init__(self, coords):
        self.coords = tuple(np.asarray(c, dtype=np.float64) for c in coords)

    def matches(self, other: "BasePoint") -> bool:
        if self is other:
            return True
        if len(self.coords) != len(other.coords):
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.coords, other.coords))


def _combine_base(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if a is b or a.matches(b):
        return a
    raise BasePointError("jets expanded at different base points cannot be combined")


# ---------------------------------------------------------------------------
# the jet itself


@dataclass(frozen=True)
class Jet:
    """Dense truncated Taylor expansion in `num_vars` variables."""

    num_vars: int
    order: int
    coeffs: np.ndarray
    base: BasePoint | None = None

    def __post_init__(self):
        if not 1 <= self.num_vars <= MAX_VARS:
            raise DimensionError(f"num_vars must be in 1..{MAX_VARS}, got {self.num_vars}")
        if not 0 <= self.order <= MAX_ORDER:
            raise DomainError(f"order must be in 0..{MAX_ORDER}, got {self.order}")
        c = np.asarray(self.coeffs, dtype=np.float64)
        want = n_terms(self.num_vars, self.order)
        if c.shape[-1:] != (want,):
            raise DimensionError(
                f"coefficient vector has {c.shape[-1] if c.ndim else 0} entries, "
                f"expected {want} for num_vars={self.num_vars}, order={self.order}"
            )
        if not c.flags.c_contiguous:
            c = np.ascontiguousarray(c)
        c = c.view()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    # -- inspection --------------------------------------------------------

    @property
    def value(self):
        """Value at the base point (degree-0 coefficient)."""
        return self.coeffs[..., 0]

    def coefficient(self, alpha: tuple[int, ...]):
        """Raw Taylor coefficient of the multi-index `alpha`."""
        pos = _table(self.num_vars, self.order).position.get(tuple(alpha))
        if pos is None:
            raise DomainError(f"multi-index {alpha} exceeds jet order {self.order}")
        return self.coeffs[..., pos]

    def derivative(self, alpha):
        """Partial derivative value: coefficient times the factorial product.

        For univariate jets an integer derivative order is accepted.
        """
        if isinstance(alpha, (int, np.integer)):
            if self.num_vars != 1:
                raise DimensionError("integer derivative order is only valid for univariate jets")
            alpha = (int(alpha),)
        alpha = tuple(int(a) for a in alpha)
        fac = 1.0
        for a in alpha:
            fac *= math.factorial(a)
        return self.coefficient(alpha) * fac

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def truncated(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        keep = n_terms(self.num_vars, order)
        return Jet(self.num_vars, order, self.coeffs[..., :keep], self.base)

    # -- operator sugar ------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            return jet_add(self, other)
        return self._shift(other, +1.0)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            return jet_add(self, -other)
        return self._shift(other, -1.0)

    def __rsub__(self, other):
        return (-self)._shift(other, +1.0)

    def __neg__(self):
        return Jet(self.num_vars, self.order, -self.coeffs, self.base)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return jet_mul(self, other)
        s = np.asarray(other, dtype=np.float64)[..., None]
        return Jet(self.num_vars, self.order, self.coeffs * s, self.base)

    __rmul__ = __mul__

    def _shift(self, scalar, sign: float) -> "Jet":
        """Add sign*scalar to the constant term, broadcasting batch shapes."""
        s = np.asarray(scalar, dtype=np.float64)
        shape = np.broadcast_shapes(self.coeffs.shape[:-1], s.shape) + self.coeffs.shape[-1:]
        out = np.zeros(shape)
        out += self.coeffs
        out[..., 0] += sign * s
        return Jet(self.num_vars, self.order, out, self.base)


# ---------------------------------------------------------------------------
# constructors


def jet_constant(num_vars: int, order: int, value, base: BasePoint | None = None) -> Jet:
    v = np.asarray(value, dtype=np.float64)
    shape = v.shape + (n_terms(num_vars, order),)
    c = np.zeros(shape)
    c[..., 0] = v
    return Jet(num_vars, order, c, base)


def jet_coordinate(num_vars: int, order: int, var_index: int, value, base: BasePoint | None = None) -> Jet:
    """Jet of the coordinate function x_{var_index} (1-based) at the given value."""
    if not 1 <= var_index <= num_vars:
        raise DimensionError(f"var_index {var_index} outside 1..{num_vars}")
    c = jet_constant(num_vars, order, value, base)
    coeffs = np.array(c.coeffs)
    if order >= 1:
        unit = tuple(1 if v == var_index - 1 else 0 for v in range(num_vars))
        coeffs[..., _table(num_vars, order).position[unit]] = 1.0
    return Jet(num_vars, order, coeffs, base)


def jet_from_derivatives(derivs, base: BasePoint | None = None) -> Jet:
    """Univariate jet from an array of derivative values [f, f', f'', ...].

    `derivs` has shape (order+1,) or (order+1, B) for batched evaluation.
    """
    d = np.asarray(derivs, dtype=np.float64)
    order = d.shape[0] - 1
    fac = np.array([math.factorial(m) for m in range(order + 1)])
    coeffs = np.moveaxis(d, 0, -1) / fac
    return Jet(1, order, coeffs, base)


def embed_univariate(j: Jet, num_vars: int, var_index: int, base: BasePoint | None = None) -> Jet:
    """Lift a univariate jet to `num_vars` variables along coordinate `var_index`.

    The result represents the same function viewed as depending on all
    coordinates; mixed and foreign partials are zero.
    """
    if j.num_vars != 1:
        raise DimensionError("embed_univariate expects a univariate jet")
    if not 1 <= var_index <= num_vars:
        raise DimensionError(f"var_index {var_index} outside 1..{num_vars}")
    table = _table(num_vars, j.order)
    coeffs = np.zeros(j.coeffs.shape[:-1] + (table.n_terms,))
    for m in range(j.order + 1):
        axis = tuple(m if v == var_index - 1 else 0 for v in range(num_vars))
        coeffs[..., table.position[axis]] = j.coeffs[..., m]
    return Jet(num_vars, j.order, coeffs, base)


# ---------------------------------------------------------------------------
# arithmetic


def jet_add(a: Jet, b: Jet) -> Jet:
    if a.num_vars != b.num_vars:
        raise DimensionError(f"cannot add jets in {a.num_vars} and {b.num_vars} variables")
    base = _combine_base(a.base, b.base)
    order = min(a.order, b.order)
    keep = n_terms(a.num_vars, order)
    return Jet(a.num_vars, order, a.coeffs[..., :keep] + b.coeffs[..., :keep], base)


def jet_mul(a: Jet, b: Jet) -> Jet:
    if a.num_vars != b.num_vars:
        raise DimensionError(f"cannot multiply jets in {a.num_vars} and {b.num_vars} variables")
    base = _combine_base(a.base, b.base)
    table = _mul_table(a.num_vars, a.order, b.order)
    prod = a.coeffs[..., table.ia] * b.coeffs[..., table.ib]
    coeffs = np.add.reduceat(prod, table.starts, axis=-1)
    return Jet(a.num_vars, min(a.order, b.order), coeffs, base)


def jet_partial(a: Jet, var_index: int) -> Jet:
    """Formal partial derivative with respect to coordinate `var_index` (1-based)."""
    if a.order == 0:
        raise OrderExhaustedError("cannot differentiate a jet of order 0")
    if not 1 <= var_index <= a.num_vars:
        raise DimensionError(f"var_index {var_index} outside 1..{a.num_vars}")
    src, scale = _partial_table(a.num_vars, a.order, var_index - 1)
    return Jet(a.num_vars, a.order - 1, a.coeffs[..., src] * scale, a.base)


# ---------------------------------------------------------------------------
# analytic composition


def _tanh_series(a: np.ndarray, order: int) -> list[np.ndarray]:
    # Taylor coefficients of tanh about a, from y' = 1 - y^2.
    y = [np.tanh(a)]
    for k in range(order):
        conv = sum(y[i] * y[k - i] for i in range(k + 1))
        src = (1.0 if k == 0 else 0.0) - conv
        y.append(src / (k + 1))
    return y


def _series_coeffs(f: str, a: np.ndarray, order: int, alpha: float | None):
    a = np.asarray(a, dtype=np.float64)
    ks = range(order + 1)
    if f == "sin":
        return [np.sin(a + k * math.pi / 2) / math.factorial(k) for k in ks]
    if f == "cos":
        return [np.cos(a + k * math.pi / 2) / math.factorial(k) for k in ks]
    if f == "sinh":
        return [(np.sinh(a) if k % 2 == 0 else np.cosh(a)) / math.factorial(k) for k in ks]
    if f == "cosh":
        return [(np.cosh(a) if k % 2 == 0 else np.sinh(a)) / math.factorial(k) for k in ks]
    if f == "exp":
        e = np.exp(a)
        return [e / math.factorial(k) for k in ks]
    if f == "tanh":
        return _tanh_series(a, order)
    if f == "log":
        if np.any(a <= 0.0):
            raise SingularCompositionError("log composed with non-positive constant term")
        out = [np.log(a)]
        out.extend((-1.0) ** (k - 1) / (k * a**k) for k in range(1, order + 1))
        return out
    if f == "recip":
        if np.any(a == 0.0):
            raise SingularCompositionError("reciprocal of a jet with zero constant term")
        return [(-1.0) ** k / a ** (k + 1) for k in ks]
    if f == "pow":
        if alpha is None:
            raise DomainError("pow composition requires the exponent argument")
        if not float(alpha).is_integer() and np.any(a <= 0.0):
            raise SingularCompositionError("non-integer power of a non-positive constant term")
        if np.any(a == 0.0):
            raise SingularCompositionError("power series about zero constant term")
        out = []
        coef = 1.0
        for k in ks:
            out.append(coef * a ** (alpha - k) / math.factorial(k))
            coef *= alpha - k
        return out
    raise DomainError(f"unknown composable function tag {f!r}")


def jet_compose_univariate(f: str, inner: Jet, alpha: float | None = None) -> Jet:
    """Jet of f(inner) via Horner evaluation of f's Taylor series about inner's value.

    `f` is one of COMPOSABLE_FUNCTIONS; "pow" takes the exponent via `alpha`.
    """
    order = inner.order
    c = _series_coeffs(f, inner.value, order, alpha)
    # nilpotent part of the inner jet
    w_coeffs = np.array(inner.coeffs)
    w_coeffs[..., 0] = 0.0
    w = Jet(inner.num_vars, order, w_coeffs, inner.base)
    result = jet_constant(inner.num_vars, order, c[order], inner.base)
    for m in range(order - 1, -1, -1):
        result = jet_mul(result, w) + jet_constant(inner.num_vars, order, c[m], inner.base)
    return result
