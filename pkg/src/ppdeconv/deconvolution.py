"""Superposition and deconvolution of Janossy processes.

Superposition multiplies p.g.fl.s, ``G = G1 * G2``; its densities come from
the Leibniz rule with Dirac increments at psi = 0:

    p(X) = sum_{S subset X} q(S) r(X - S).

Deconvolution recovers ``G2 = G / G1`` with the quotient rule:

    r(X) = sum_{S subset X} [ sum_{pi partition of S}
                (-1)^|pi| |pi|! / q0^(|pi|+1) prod_{B in pi} q(B) ] p(X - S)

and ``r0 = p0 / q0``.  Both sums run over the *labelled* points of X; a
multiset with repeated points is expanded before enumerating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .combinatorics import Multiset, bell_number, enumerate_partitions, enumerate_subsets
from .errors import ZeroConstantTerm
from .process import (
    JanossyProcess,
    check_compatible,
    mode_tolerance,
    normalization_mass,
    pgfl_eval,
)
from .series import Scalar, to_scalar


@dataclass
class DeconvolutionReport:
    min_density: Scalar
    negative_count: int
    term_count: int
    mass: Scalar
    valid_process: bool
    # number of (subset, partition) terms per output order; not serialized
    terms_by_order: dict[int, int] = field(default_factory=dict, repr=False)

    def to_dict(self, mode: str) -> dict:
        from .fileformat import format_scalar

        return {
            "min_density": format_scalar(self.min_density, mode),
            "negative_count": self.negative_count,
            "term_count": self.term_count,
            "mass": format_scalar(self.mass, mode),
            "valid_process": self.valid_process,
        }


@lru_cache(maxsize=None)
def _split_table(n: int) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    # (subset, complement) index pairs for every subset of range(n), mask order
    full = set(range(n))
    return tuple((s, tuple(sorted(full.difference(s)))) for s in enumerate_subsets(n))


def _sub(points: tuple[int, ...], idx: tuple[int, ...]) -> Multiset:
    return Multiset.from_points(points[i] for i in idx)


def superpose_order(Q: JanossyProcess, R: JanossyProcess) -> tuple[int, bool]:
    """Output order and tail flag for ``superpose(Q, R)``.

    Exact-support inputs give an exact-support result of order N_Q + N_R.
    A truncated input limits the result to its own order, and the result is
    truncated too.
    """
    truncated = [P.max_order for P in (Q, R) if P.tail_mass_allowed]
    if not truncated:
        return Q.max_order + R.max_order, False
    return min(truncated), True


def _folded_splits(ms: Multiset):
    # group labelled subsets of ms by (sub-multiset, complement); the number of
    # labelled subsets taking k_i copies of state s_i is prod C(m_i, k_i)
    splits = [((), (), 1)]
    for state, mult in ms.entries:
        splits = [
            (sub + ((state, k),) if k else sub,
             rest + ((state, mult - k),) if k < mult else rest,
             c * math.comb(mult, k))
            for sub, rest, c in splits
            for k in range(mult + 1)
        ]
    return [(Multiset(sub), Multiset(rest), c) for sub, rest, c in splits]


def superpose(Q: JanossyProcess, R: JanossyProcess, max_order: int | None = None) -> JanossyProcess:
    """Janossy densities of the superposition of independent ``Q`` and ``R``.

    ``max_order`` caps the output order; capping below the natural order
    marks the result as truncated.
    """
    check_compatible(Q, R)
    order, tail = superpose_order(Q, R)
    if max_order is not None and max_order < order:
        order, tail = max_order, True
    densities = {}
    for n in range(1, order + 1):
        for ms in Q.iter_multisets(n):
            acc = to_scalar(0, Q.mode)
            for sub, rest, count in _folded_splits(ms):
                acc += count * (Q.at(sub) * R.at(rest))
            densities[ms] = acc
    return JanossyProcess(Q.space, order, Q.p0 * R.p0, densities, Q.mode, tail)


def superpose_labeled(Q: JanossyProcess, R: JanossyProcess) -> JanossyProcess:
    """Reference superposition summing over every labelled subset literally."""
    check_compatible(Q, R)
    order, tail = superpose_order(Q, R)
    densities = {}
    for n in range(1, order + 1):
        table = _split_table(n)
        for ms in Q.iter_multisets(n):
            pts = ms.points()
            acc = to_scalar(0, Q.mode)
            for phi, rest in table:
                acc += Q.at(_sub(pts, phi)) * R.at(_sub(pts, rest))
            densities[ms] = acc
    return JanossyProcess(Q.space, order, Q.p0 * R.p0, densities, Q.mode, tail)


def _reciprocal_coefficients(q0: Scalar):
    cache: list[Scalar] = []

    def coef(j: int) -> Scalar:
        while j >= len(cache):
            k = len(cache)
            cache.append((-1) ** k * math.factorial(k) / q0 ** (k + 1))
        return cache[j]

    return coef


class _InnerSums:
    """Reciprocal-rule sums over the partitions of a multiset of points.

    For a set S of labelled points the inner sum is

        sum_{pi partition of S} c(|pi|) prod_{B in pi} q(B),   c(j) = (-1)^j j! / q0^(j+1)

    and depends only on the multiset of points in S.  It is computed by
    splitting off the block that holds the first point of S: the remaining
    points are partitioned recursively, tracking the block count.  Results are
    memoised per multiset, which keeps high orders polynomial in cost.
    """

    def __init__(self, Q: JanossyProcess) -> None:
        self.Q = Q
        self.coef = _reciprocal_coefficients(Q.p0)
        self._by_blocks: dict[Multiset, dict[int, Scalar]] = {Multiset(): {0: to_scalar(1, Q.mode)}}
        self._memo: dict[Multiset, Scalar] = {}

    def _blocks(self, ms: Multiset) -> dict[int, Scalar]:
        # {j: sum over partitions of ms into j blocks of prod q(B)}
        hit = self._by_blocks.get(ms)
        if hit is not None:
            return hit
        first, m0 = ms.entries[0]
        out: dict[int, Scalar] = {}
        for block, rest, count in _folded_splits(ms):
            k0 = block.entries[0][1] if block.entries and block.entries[0][0] == first else 0
            if k0 == 0:
                continue
            # the block must hold the first labelled copy: C(m0-1, k0-1) instead of C(m0, k0)
            count = count * k0 // m0
            qb = self.Q.at(block)
            if qb == 0:
                continue
            for j, v in self._blocks(rest).items():
                out[j + 1] = out.get(j + 1, 0) + count * qb * v
        self._by_blocks[ms] = out
        return out

    def __call__(self, ms: Multiset) -> Scalar:
        hit = self._memo.get(ms)
        if hit is not None:
            return hit
        acc = to_scalar(0, self.Q.mode)
        for j, v in sorted(self._blocks(ms).items()):
            acc += self.coef(j) * v
        self._memo[ms] = acc
        return acc


def deconvolve_order(P: JanossyProcess, Q: JanossyProcess) -> int:
    """Highest order at which the quotient is fully determined.

    An exact-support divisor has known zero densities above its order, so the
    quotient is determined up to ``P.max_order``; a truncated divisor limits
    it to ``min(P.max_order, Q.max_order)``.
    """
    if Q.tail_mass_allowed:
        return min(P.max_order, Q.max_order)
    return P.max_order


def _finish(P, Q, order, r0, densities, terms_by_order):
    densities = {k: v for k, v in densities.items() if v != 0}
    values = [r0, *densities.values()]
    tol = mode_tolerance(P.mode)
    negatives = [v for v in values if v < -tol]
    raw = JanossyProcess(P.space, order, r0, densities, P.mode, tail_mass_allowed=True)
    mass = normalization_mass(raw)
    mass_ok = abs(mass - 1) <= tol
    exact = mass_ok and not (P.tail_mass_allowed or Q.tail_mass_allowed)
    if exact:
        # G_P = G_Q G_R with polynomial G's: deg R <= N_P - N_Q unless the
        # divisor overstates its order, in which case keep what was computed
        order = max(P.max_order - Q.max_order, raw.degree())
    R = JanossyProcess(P.space, order, r0, densities, P.mode, tail_mass_allowed=not exact)
    report = DeconvolutionReport(
        min_density=min(negatives) if negatives else to_scalar(0, P.mode),
        negative_count=len(negatives),
        term_count=sum(terms_by_order.values()),
        mass=mass,
        valid_process=not negatives and mass_ok,
        terms_by_order=terms_by_order,
    )
    return R, report


def deconvolve(P: JanossyProcess, Q: JanossyProcess) -> tuple[JanossyProcess, DeconvolutionReport]:
    """Recover the process R with ``G_P = G_Q * G_R``.

    The result is returned even when it is not a probability process; the
    report records negative densities and the mass.  ``term_count`` is the
    number of (subset, partition) pairs in the labelled double sum, i.e.
    Bell(n+1) per target multiset of size n.
    """
    check_compatible(P, Q)
    if Q.p0 == 0:
        raise ZeroConstantTerm("cannot deconvolve by a process with p0 == 0")
    order = deconvolve_order(P, Q)
    inner = _InnerSums(Q)
    densities = {}
    terms_by_order = {0: 1}
    for n in range(1, order + 1):
        count = 0
        for ms in P.iter_multisets(n):
            acc = to_scalar(0, P.mode)
            for sub, rest, c in _folded_splits(ms):
                acc += c * (inner(sub) * P.at(rest))
                count += c * bell_number(sub.size)
            densities[ms] = acc
        terms_by_order[n] = count
    return _finish(P, Q, order, P.p0 / Q.p0, densities, terms_by_order)


def deconvolve_labeled(P: JanossyProcess, Q: JanossyProcess) -> tuple[JanossyProcess, DeconvolutionReport]:
    """Reference deconvolution that enumerates the double sum term by term.

    Every labelled subset of the expanded target and every set partition of
    that subset is visited; nothing is memoised.  Cost grows like Bell(n+1)
    per target, so keep orders small.
    """
    check_compatible(P, Q)
    if Q.p0 == 0:
        raise ZeroConstantTerm("cannot deconvolve by a process with p0 == 0")
    order = deconvolve_order(P, Q)
    coef = _reciprocal_coefficients(Q.p0)
    densities = {}
    terms_by_order = {0: 1}
    for n in range(1, order + 1):
        count = 0
        for ms in P.iter_multisets(n):
            pts = ms.points()
            acc = to_scalar(0, P.mode)
            for subset, rest in _split_table(n):
                inner = to_scalar(0, P.mode)
                for partition in enumerate_partitions(subset):
                    term = coef(len(partition))
                    for block in partition:
                        term = term * Q.at(_sub(pts, block))
                    inner += term
                    count += 1
                acc += inner * P.at(_sub(pts, rest))
            densities[ms] = acc
        terms_by_order[n] = count
    return _finish(P, Q, order, P.p0 / Q.p0, densities, terms_by_order)


def pointwise_quotient_check(P: JanossyProcess, Q: JanossyProcess, R: JanossyProcess, samples) -> Scalar:
    """Largest ``|G_P(psi) - G_Q(psi) G_R(psi)|`` over the sample test functions."""
    check_compatible(P, Q, R)
    worst = to_scalar(0, P.mode)
    for psi in samples:
        worst = max(worst, abs(pgfl_eval(P, psi) - pgfl_eval(Q, psi) * pgfl_eval(R, psi)))
    return worst
