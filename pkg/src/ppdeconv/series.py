"""Scalar calculus on truncated power series.

A :class:`PowerSeries` stores Taylor coefficients ``f^(k)(0)/k!``.  A
*derivative vector* is a plain sequence ``d`` with ``d[k] = f^(k)(y)`` at a
fixed point.  The ``*_nth`` rules evaluate the set-partition and subset sums
for the n-th differential with all increments equal, i.e. ordinary n-th
derivatives, and :func:`series_div` is the long-division oracle they are
checked against.

Two numeric modes exist: ``"rational"`` (:class:`fractions.Fraction`) and
``"float"``.  A computation never mixes them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from .combinatorics import block_signature_counts, enumerate_subsets
from .errors import DivisionByZeroConstantTerm, ModeMismatch, OrderError

Scalar = Union[Fraction, float]

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

DEFAULT_ORDER = 8

# only used by the internal float cross-checks, never by exact arithmetic
_FLOAT_RTOL = 1e-9


def to_scalar(x, mode: str) -> Scalar:
    """Coerce ``x`` into ``mode``.

    Rational mode accepts ints, Fractions and strings like ``"3/4"``; floats
    are taken at their exact binary value.
    """
    if mode == RATIONAL:
        return Fraction(x)
    if mode == FLOAT:
        if isinstance(x, str):
            return float(Fraction(x))
        return float(x)
    raise ValueError(f"unknown numeric mode {mode!r}")


def mode_of(x: Scalar) -> str:
    if isinstance(x, float):
        return FLOAT
    if isinstance(x, (Fraction, int)):
        return RATIONAL
    raise TypeError(f"not a scalar: {x!r}")


def _vector_mode(*vecs: Sequence[Scalar]) -> str:
    modes = {mode_of(x) for v in vecs for x in v}
    if len(modes) > 1:
        raise ModeMismatch("derivative vectors mix rational and float entries")
    return modes.pop() if modes else RATIONAL


def _zero(mode: str) -> Scalar:
    return Fraction(0) if mode == RATIONAL else 0.0


@dataclass(frozen=True)
class PowerSeries:
    coeffs: tuple
    mode: str = RATIONAL

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown numeric mode {self.mode!r}")
        if not self.coeffs:
            raise ValueError("a power series needs at least one coefficient")
        object.__setattr__(
            self, "coeffs", tuple(to_scalar(c, self.mode) for c in self.coeffs)
        )

    @classmethod
    def from_coeffs(
        cls, coeffs: Iterable, order: int | None = None, mode: str = RATIONAL
    ) -> PowerSeries:
        """Build a series, zero-padding or truncating to ``order``."""
        cs = list(coeffs)
        if order is None:
            order = len(cs) - 1
        cs = (cs + [0] * (order + 1))[: order + 1]
        return cls(tuple(cs), mode)

    @classmethod
    def from_derivatives(cls, d: Sequence, mode: str | None = None) -> PowerSeries:
        mode = mode or _vector_mode(d)
        return cls(tuple(to_scalar(x, mode) / math.factorial(k) for k, x in enumerate(d)), mode)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def derivatives(self) -> list[Scalar]:
        """``[f(0), f'(0), f''(0), ...]``"""
        return [c * math.factorial(k) for k, c in enumerate(self.coeffs)]

    def _check(self, other: PowerSeries) -> None:
        if self.mode != other.mode:
            raise ModeMismatch(f"mode {self.mode} vs {other.mode}")
        if self.order != other.order:
            raise ModeMismatch(f"order {self.order} vs {other.order}")

    def __add__(self, other: PowerSeries) -> PowerSeries:
        self._check(other)
        return PowerSeries(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.mode)

    def scale(self, c) -> PowerSeries:
        c = to_scalar(c, self.mode)
        return PowerSeries(tuple(c * a for a in self.coeffs), self.mode)

    def __mul__(self, other: PowerSeries) -> PowerSeries:
        return series_mul(self, other)

    def __truediv__(self, other: PowerSeries) -> PowerSeries:
        return series_div(self, other)

    def __call__(self, x) -> Scalar:
        """Evaluate the truncated polynomial at ``x`` (Horner)."""
        x = to_scalar(x, self.mode)
        acc = _zero(self.mode)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def series_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    a._check(b)
    n = a.order
    out = []
    for k in range(n + 1):
        acc = _zero(a.mode)
        for j in range(k + 1):
            acc += a.coeffs[j] * b.coeffs[k - j]
        out.append(acc)
    return PowerSeries(tuple(out), a.mode)


def series_div(f: PowerSeries, g: PowerSeries) -> PowerSeries:
    """Truncated quotient ``f/g`` by the long-division recurrence.

    ``h[k] = (f[k] - sum_{j<k} h[j] g[k-j]) / g[0]``
    """
    f._check(g)
    g0 = g.coeffs[0]
    if g0 == 0:
        raise DivisionByZeroConstantTerm("series divisor has zero constant term")
    h: list[Scalar] = []
    for k in range(f.order + 1):
        acc = f.coeffs[k]
        for j in range(k):
            acc -= h[j] * g.coeffs[k - j]
        h.append(acc / g0)
    return PowerSeries(tuple(h), f.mode)


def _need(vec: Sequence, n: int, name: str) -> None:
    if n < 0:
        raise ValueError("order must be non-negative")
    if len(vec) < n + 1:
        raise OrderError(f"{name} has {len(vec)} entries, order {n} needs {n + 1}")


def _close(a: Scalar, b: Scalar, mode: str) -> bool:
    if mode == RATIONAL:
        return a == b
    return math.isclose(a, b, rel_tol=_FLOAT_RTOL, abs_tol=_FLOAT_RTOL)


def leibniz_binomial(f: Sequence[Scalar], g: Sequence[Scalar], n: int) -> Scalar:
    """Collapsed Leibniz rule ``sum_k C(n,k) f^(k) g^(n-k)``."""
    _need(f, n, "f")
    _need(g, n, "g")
    mode = _vector_mode(f[: n + 1], g[: n + 1])
    acc = _zero(mode)
    for k in range(n + 1):
        acc += math.comb(n, k) * f[k] * g[n - k]
    return acc


def leibniz_subset_sum(f: Sequence[Scalar], g: Sequence[Scalar], n: int) -> Scalar:
    """Labelled Leibniz rule: one term per subset of the n increments."""
    _need(f, n, "f")
    _need(g, n, "g")
    mode = _vector_mode(f[: n + 1], g[: n + 1])
    acc = _zero(mode)
    for phi in enumerate_subsets(n):
        acc += f[len(phi)] * g[n - len(phi)]
    return acc


def leibniz_nth(f: Sequence[Scalar], g: Sequence[Scalar], n: int) -> Scalar:
    """n-th derivative of ``f*g`` from the derivative vectors of f and g.

    Evaluated as the subset sum over labelled increments and cross-checked
    against the binomial form; a disagreement raises ``ArithmeticError``.
    """
    value = leibniz_subset_sum(f, g, n)
    collapsed = leibniz_binomial(f, g, n)
    if not _close(value, collapsed, mode_of(value)):
        raise ArithmeticError(f"subset sum {value} != binomial form {collapsed}")
    return value


def _partition_sum(
    n: int, outer: Callable[[int], Scalar], g: Sequence[Scalar], mode: str
) -> Scalar:
    # sum over partitions pi of {1..n} of outer(|pi|) * prod_{w in pi} g[|w|]
    acc = _zero(mode)
    for sizes, count in block_signature_counts(n):
        term = outer(len(sizes))
        for s in sizes:
            term *= g[s]
        acc += count * term
    return acc


def faadibruno_nth(f: Sequence[Scalar], g: Sequence[Scalar], n: int) -> Scalar:
    """n-th derivative of ``f(g(y))``.

    ``f`` holds the derivatives of the outer function *at g(y)*; ``g`` the
    derivatives of the inner one at y.  Sums ``f^(|pi|) prod g^(|w|)`` over
    every set partition pi of n increments.
    """
    _need(f, n, "f")
    _need(g, n, "g")
    mode = _vector_mode(f[: n + 1], g[: n + 1])
    return _partition_sum(n, lambda k: f[k], g, mode)


def reciprocal_coefficient(k: int, g0: Scalar) -> Scalar:
    """k-th derivative of ``1/x`` at ``x = g0``: ``(-1)^k k! / g0^(k+1)``."""
    if g0 == 0:
        raise DivisionByZeroConstantTerm("reciprocal of zero constant term")
    return (-1) ** k * math.factorial(k) / g0 ** (k + 1)


def reciprocal_nth(g: Sequence[Scalar], n: int) -> Scalar:
    """n-th derivative of ``1/g``."""
    _need(g, n, "g")
    mode = _vector_mode(g[: n + 1])
    g0 = g[0]
    if g0 == 0:
        raise DivisionByZeroConstantTerm("g[0] == 0")
    return _partition_sum(n, lambda k: reciprocal_coefficient(k, g0), g, mode)


def quotient_nth(f: Sequence[Scalar], g: Sequence[Scalar], n: int) -> Scalar:
    """n-th derivative of ``f/g``: the higher-order quotient rule.

    Outer sum over subsets P of the n labelled increments; the inner
    partition sum over P is the reciprocal rule at order |P| and multiplies
    the (n - |P|)-th derivative of f taken over the complement.
    """
    _need(f, n, "f")
    _need(g, n, "g")
    mode = _vector_mode(f[: n + 1], g[: n + 1])
    if g[0] == 0:
        raise DivisionByZeroConstantTerm("g[0] == 0")
    # the inner sum depends only on |P| for equal increments
    inner: dict[int, Scalar] = {}
    acc = _zero(mode)
    for subset in enumerate_subsets(n):
        k = len(subset)
        if k not in inner:
            inner[k] = reciprocal_nth(g, k)
        acc += inner[k] * f[n - k]
    return acc


def finite_difference_differential(
    functional: Callable[[PowerSeries], float],
    psi: PowerSeries,
    xi: PowerSeries,
    eps: float,
) -> float:
    """Forward difference ``(F(psi + eps*xi) - F(psi)) / eps``."""
    if psi.mode != FLOAT or xi.mode != FLOAT:
        raise ModeMismatch("finite differences are float-only")
    if not eps > 0:
        raise ValueError("eps must be positive")
    return (functional(psi + xi.scale(eps)) - functional(psi)) / eps
