"""Finite point processes on a discrete state space, stored as Janossy densities.

A process carries ``p0`` and one density value per multiset of points of size
1..max_order.  Densities are symmetric, so a value stored under the multiset
``{a, a, b}`` stands for every ordering ``(a, a, b), (a, b, a), (b, a, a)``.
Sums over ordered tuples are taken over multisets times their permutation
count.

The probability generating functional of ``P`` at a test function ``psi`` is

    G(psi) = p0 + sum_n 1/n! sum_{x_1..x_n} p_n(x_1..x_n) prod_i psi(x_i) w(x_i)

where ``w`` are the quadrature weights of the state space.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .combinatorics import Multiset, multisets_of_size
from .errors import ModeMismatch, OrderError, SpaceMismatch
from .series import FLOAT, MODES, RATIONAL, Scalar, to_scalar

# absolute tolerance for "== 1" / ">= 0" judgements on float-mode processes
FLOAT_TOLERANCE = 1e-9


def mode_tolerance(mode: str) -> Scalar:
    return Fraction(0) if mode == RATIONAL else FLOAT_TOLERANCE


@dataclass(frozen=True)
class StateSpace:
    labels: tuple[str, ...]
    weights: tuple = ()

    def __post_init__(self) -> None:
        labels = tuple(str(x) for x in self.labels)
        if not labels:
            raise ValueError("state space needs at least one point")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in {labels}")
        weights = tuple(self.weights) if self.weights else (1,) * len(labels)
        if len(weights) != len(labels):
            raise ValueError("one weight per label required")
        weights = tuple(Fraction(w) if isinstance(w, str) else w for w in weights)
        if any(not w > 0 for w in weights):
            raise ValueError(f"weights must be positive, got {weights}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown point {label!r}") from None

    def weights_in(self, mode: str) -> tuple:
        return tuple(to_scalar(w, mode) for w in self.weights)


@dataclass(frozen=True)
class JanossyProcess:
    """Janossy representation truncated at ``max_order`` points.

    ``densities`` maps :class:`Multiset` keys of size 1..max_order to values;
    absent keys and exact zeros mean density 0 (zeros are dropped on
    construction).  ``tail_mass_allowed`` marks processes whose mass may
    extend beyond ``max_order`` (Poisson fixtures, raw quotients), so their
    normalization is not expected to be 1.
    """

    space: StateSpace
    max_order: int
    p0: Scalar
    densities: Mapping[Multiset, Scalar] = field(default_factory=dict)
    mode: str = RATIONAL
    tail_mass_allowed: bool = False

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown numeric mode {self.mode!r}")
        if self.max_order < 0:
            raise ValueError("max_order must be non-negative")
        object.__setattr__(self, "p0", to_scalar(self.p0, self.mode))
        clean: dict[Multiset, Scalar] = {}
        m = len(self.space)
        for key, value in self.densities.items():
            if not isinstance(key, Multiset):
                key = Multiset.from_points(self.space.index(p) if isinstance(p, str) else p for p in key)
            ms = key
            if not 1 <= ms.size <= self.max_order:
                raise OrderError(f"density key of size {ms.size} outside 1..{self.max_order}")
            if ms.entries[-1][0] >= m:
                raise ValueError(f"state index out of range in {ms}")
            v = to_scalar(value, self.mode)
            if v != 0:
                clean[ms] = clean.get(ms, 0) + v
        object.__setattr__(self, "densities", dict(sorted(clean.items())))

    def density(self, points: Iterable) -> Scalar:
        """Density at an (unordered) tuple of state indices or labels.

        Above ``max_order`` an exact-support process has density 0; a
        truncated one raises :class:`OrderError`.
        """
        pts = [self.space.index(p) if isinstance(p, str) else p for p in points]
        if not pts:
            return self.p0
        if len(pts) > self.max_order and self.tail_mass_allowed:
            raise OrderError(f"order {len(pts)} exceeds max_order {self.max_order}")
        return self.densities.get(Multiset.from_points(pts), to_scalar(0, self.mode))

    def at(self, ms: Multiset) -> Scalar:
        if ms.size == 0:
            return self.p0
        return self.densities.get(ms, to_scalar(0, self.mode))

    def with_mode(self, mode: str) -> JanossyProcess:
        if mode == self.mode:
            return self
        return JanossyProcess(
            self.space, self.max_order, self.p0, self.densities, mode, self.tail_mass_allowed
        )

    def truncated(self, max_order: int) -> JanossyProcess:
        """Drop densities above ``max_order``; flags the tail if mass is lost."""
        if max_order >= self.max_order:
            return self
        kept = {k: v for k, v in self.densities.items() if k.size <= max_order}
        lost = len(kept) != len(self.densities)
        return JanossyProcess(
            self.space, max_order, self.p0, kept, self.mode, self.tail_mass_allowed or lost
        )

    def degree(self) -> int:
        """Largest point count with a nonzero density (0 if only p0)."""
        return max((k.size for k in self.densities), default=0)

    def iter_multisets(self, size: int) -> Iterable[Multiset]:
        return multisets_of_size(len(self.space), size)


def empty_process(space: StateSpace, mode: str = RATIONAL, max_order: int = 0) -> JanossyProcess:
    """The process with no points: G == 1."""
    return JanossyProcess(space, max_order, 1, {}, mode)


def check_compatible(*processes: JanossyProcess) -> None:
    first = processes[0]
    for other in processes[1:]:
        if other.space != first.space:
            raise SpaceMismatch(f"state spaces differ: {first.space.labels} vs {other.space.labels}")
        if other.mode != first.mode:
            raise ModeMismatch(f"numeric modes differ: {first.mode} vs {other.mode}")


def _as_values(space: StateSpace, psi, mode: str) -> tuple:
    if isinstance(psi, TestFunction):
        psi = psi.values
    if isinstance(psi, Mapping):
        missing = set(space.labels) - set(psi)
        if missing:
            raise KeyError(f"test function misses points {sorted(missing)}")
        psi = [psi[label] for label in space.labels]
    if len(psi) != len(space):
        raise ValueError(f"test function has {len(psi)} values for {len(space)} points")
    return tuple(to_scalar(v, mode) for v in psi)


@dataclass(frozen=True)
class TestFunction:
    values: tuple

    __test__ = False  # keep pytest from collecting this class

    @classmethod
    def constant(cls, space: StateSpace, value) -> TestFunction:
        return cls((value,) * len(space))


def pgfl_eval(P: JanossyProcess, psi) -> Scalar:
    """Evaluate the p.g.fl. of ``P`` at ``psi``.

    ``psi`` may be a :class:`TestFunction`, a sequence of per-point values or a
    ``{label: value}`` mapping.
    """
    values = _as_values(P.space, psi, P.mode)
    weights = P.space.weights_in(P.mode)
    scaled = [v * w for v, w in zip(values, weights)]
    total = P.p0
    for ms, p in P.densities.items():
        # perm_count / n! == 1 / prod(m_i!)
        term = p
        for state, mult in ms.entries:
            term = term * scaled[state] ** mult / math.factorial(mult)
        total += term
    return total


def normalization_mass(P: JanossyProcess) -> Scalar:
    return pgfl_eval(P, (1,) * len(P.space))


def poisson_process(
    space: StateSpace, intensity, max_order: int, mode: str = FLOAT
) -> JanossyProcess:
    """Poisson process truncated at ``max_order`` points.

    In float mode ``p0 = exp(-L)`` with ``L = sum intensity * weight`` and
    ``p_n = p0 * prod intensity(x_i)``.  ``exp(-L)`` is irrational, so in
    rational mode the common factor is dropped (``p0 = 1``); ratios of
    densities are unaffected and the process is marked as not normalized.
    """
    lam = _as_values(space, intensity, mode)
    if any(v < 0 for v in lam):
        raise ValueError(f"negative intensity {lam}")
    weights = space.weights_in(mode)
    if mode == FLOAT:
        p0 = math.exp(-sum(v * w for v, w in zip(lam, weights)))
    else:
        p0 = Fraction(1)
    densities = {}
    for n in range(1, max_order + 1):
        for ms in multisets_of_size(len(space), n):
            value = p0
            for s in ms.points():
                value *= lam[s]
            densities[ms] = value
    # a zero intensity everywhere is the empty process, which has exact support
    tail = mode == RATIONAL or any(v != 0 for v in lam)
    return JanossyProcess(space, max_order, p0, densities, mode, tail_mass_allowed=tail)


def random_process(
    space: StateSpace,
    max_order: int,
    seed: int,
    mode: str = RATIONAL,
    *,
    zero_fraction: float = 0.15,
) -> JanossyProcess:
    """Random exact-support process with total mass exactly 1.

    Densities are small rationals (some exactly zero), ``p0 > 0``; the whole
    process is rescaled by its mass.  Same seed, same process.
    """
    rng = random.Random(seed)
    p0 = Fraction(rng.randint(1, 9), rng.randint(1, 9))
    raw: dict[Multiset, Fraction] = {}
    for n in range(1, max_order + 1):
        for ms in multisets_of_size(len(space), n):
            if rng.random() < zero_fraction:
                continue
            raw[ms] = Fraction(rng.randint(1, 9), rng.randint(1, 9))
    unscaled = JanossyProcess(space, max_order, p0, raw, RATIONAL)
    mass = normalization_mass(unscaled)
    scaled = JanossyProcess(
        space, max_order, p0 / mass, {k: v / mass for k, v in raw.items()}, RATIONAL
    )
    return scaled.with_mode(mode)


def janossy_consistency_check(P: JanossyProcess, points: Sequence) -> Scalar:
    """Recover ``p_k(points)`` as the k-th differential of G at psi = 0.

    The increments are discrete Diracs ``xi_i = 1{x_i} / w(x_i)``.  Only the
    degree-k part of G contributes at psi = 0, and its k-th differential is

        1/k! sum_{ordered y} p_k(y) sum_{sigma in S_k} prod_j xi_sigma(j)(y_j) w(y_j),

    which is expanded literally over all M^k ordered tuples and k!
    permutations rather than read from storage.
    """
    pts = [P.space.index(p) if isinstance(p, str) else p for p in points]
    k = len(pts)
    if k > P.max_order:
        raise OrderError(f"order {k} exceeds max_order {P.max_order}")
    if k == 0:
        return pgfl_eval(P, (0,) * len(P.space))
    m = len(P.space)
    weights = P.space.weights_in(P.mode)
    one = to_scalar(1, P.mode)
    zero = to_scalar(0, P.mode)

    def xi(i: int, state: int) -> Scalar:
        return one / weights[state] if state == pts[i] else zero

    total = zero
    for y in itertools.product(range(m), repeat=k):
        p = P.density(y)
        if p == 0:
            continue
        for sigma in itertools.permutations(range(k)):
            term = p
            for j in range(k):
                term = term * xi(sigma[j], y[j]) * weights[y[j]]
            total += term
    return total / math.factorial(k)
