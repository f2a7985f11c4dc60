import math
import random
from fractions import Fraction

import pytest

from ppdeconv.combinatorics import Multiset, bell_number, multisets_of_size
from ppdeconv.deconvolution import (
    deconvolve,
    deconvolve_labeled,
    pointwise_quotient_check,
    superpose,
    superpose_labeled,
)
from ppdeconv.errors import ModeMismatch, SpaceMismatch, ZeroConstantTerm
from ppdeconv.process import (
    JanossyProcess,
    StateSpace,
    empty_process,
    normalization_mass,
    poisson_process,
    random_process,
)
from ppdeconv.series import FLOAT, PowerSeries, series_div

from .oracles import from_polynomial, poly_div, poly_mul, to_polynomial

A = Multiset(((0, 1),))
AA = Multiset(((0, 2),))


def power(k):
    return Multiset(((0, k),)) if k else Multiset()


# --- superposition ------------------------------------------------------------


def test_superpose_with_empty_is_identity(abc):
    P = random_process(abc, 3, 2)
    assert superpose(P, empty_process(abc)) == P
    assert superpose(empty_process(abc), P) == P


def test_superpose_bernoulli_squared(bernoulli):
    P = superpose(bernoulli, bernoulli)
    assert P.p0 == Fraction(1, 4)
    assert P.at(A) == Fraction(1, 2)
    assert P.at(AA) == Fraction(1, 2)
    assert P.max_order == 2
    assert not P.tail_mass_allowed


@pytest.mark.parametrize("seed", range(6))
def test_superpose_matches_polynomial_product(seed):
    space = StateSpace(("a", "b", "c"), (Fraction(1), Fraction(1, 2), Fraction(3)))
    rng = random.Random(seed)
    Q = random_process(space, rng.randint(1, 3), seed)
    R = random_process(space, rng.randint(1, 3), seed + 100)
    P = superpose(Q, R)
    degree = Q.max_order + R.max_order
    expected = from_polynomial(poly_mul(to_polynomial(Q), to_polynomial(R), degree), space, degree, Q.mode)
    assert P.p0 == expected.p0 and P.densities == expected.densities
    assert normalization_mass(P) == 1
    assert superpose_labeled(Q, R) == P


def test_superpose_poisson_closure():
    space = StateSpace(("a", "b"))
    l1, l2 = (0.5, 1.5), (2.0, 0.25)
    P = superpose(poisson_process(space, l1, 4), poisson_process(space, l2, 4))
    S = poisson_process(space, tuple(x + y for x, y in zip(l1, l2)), 4)
    assert P.max_order == 4 and P.tail_mass_allowed
    for ms, value in S.densities.items():
        assert P.at(ms) == pytest.approx(value, rel=1e-12)


def test_superpose_poisson_ratios_rational():
    space = StateSpace(("a", "b"))
    l1, l2 = (Fraction(1, 2), Fraction(3, 2)), (Fraction(2), Fraction(1, 4))
    P = superpose(poisson_process(space, l1, 4, "rational"), poisson_process(space, l2, 4, "rational"))
    total = tuple(x + y for x, y in zip(l1, l2))
    for n in range(4):
        for ms in multisets_of_size(2, n):
            for x in range(2):
                assert P.at(Multiset.from_points(ms.points() + (x,))) / P.at(ms) == total[x]


def test_superpose_max_order_cap(abc):
    Q, R = random_process(abc, 2, 1), random_process(abc, 2, 2)
    P = superpose(Q, R, max_order=3)
    assert P.max_order == 3 and P.tail_mass_allowed
    assert P.densities == {k: v for k, v in superpose(Q, R).densities.items() if k.size <= 3}


def test_superpose_rejects_mismatch(abc):
    P = random_process(abc, 2, 1)
    with pytest.raises(SpaceMismatch):
        superpose(P, random_process(StateSpace(("a", "b")), 2, 1))
    with pytest.raises(ModeMismatch):
        superpose(P, P.with_mode(FLOAT))


# --- deconvolution ------------------------------------------------------------


def test_self_deconvolution_is_empty(abc):
    P = random_process(abc, 3, 8)
    R, report = deconvolve(P, P)
    assert R.p0 == 1 and R.densities == {}
    assert R.max_order == 0 and not R.tail_mass_allowed
    assert report.valid_process and report.negative_count == 0 and report.min_density == 0


def test_bernoulli_hand_expansion(bernoulli):
    P = superpose(bernoulli, bernoulli)
    R, report = deconvolve(P, bernoulli)
    # r1 = p1/q0 - q1 p0 / q0^2 = 1 - 1/2
    assert R.p0 == Fraction(1, 2)
    assert R.at(A) == Fraction(1, 2)
    assert R.at(AA) == 0
    assert R == bernoulli
    # cross-check by dividing the one-point generating functions
    pgf = lambda X: PowerSeries.from_coeffs([X.at(power(k)) / math.factorial(k) for k in range(3)])
    assert series_div(pgf(P), pgf(bernoulli)).coeffs == (Fraction(1, 2), Fraction(1, 2), 0)
    assert report.term_count == 1 + 2 + 5


def test_zero_constant_term(abc):
    Q = JanossyProcess(abc, 1, 0, {(0,): 1})
    with pytest.raises(ZeroConstantTerm):
        deconvolve(random_process(abc, 2, 1), Q)


@pytest.mark.parametrize("seed", range(1, 31))
def test_round_trip(seed):
    rng = random.Random(seed)
    space = StateSpace(tuple("abc"[: rng.randint(1, 3)]))
    Q = random_process(space, rng.randint(1, 4), seed)
    R = random_process(space, rng.randint(1, 4), seed + 500)
    P = superpose(Q, R)
    out, report = deconvolve(P, Q)
    assert out == R
    assert report.valid_process
    assert superpose(Q, out) == P


@pytest.mark.parametrize("seed", range(6))
def test_matches_polynomial_division(seed):
    # P and Q unrelated: the quotient is an infinite series, compare truncations
    space = StateSpace(("a", "b"), (Fraction(2), Fraction(1, 3)))
    P = random_process(space, 4, seed)
    Q = random_process(space, 3, seed + 40)
    R, report = deconvolve(P, Q)
    r = poly_div(to_polynomial(P), to_polynomial(Q), 2, 4)
    expected = from_polynomial(r, space, 4, "rational")
    assert R.p0 == expected.p0 and R.densities == expected.densities


@pytest.mark.parametrize("seed", range(4))
def test_memoised_path_equals_literal_enumeration(seed):
    space = StateSpace(("a", "b"))
    P = random_process(space, 4, seed)
    Q = random_process(space, 2, seed + 9)
    fast, fast_report = deconvolve(P, Q)
    slow, slow_report = deconvolve_labeled(P, Q)
    assert fast == slow
    assert fast_report == slow_report


def test_term_count_per_order(abc):
    P = random_process(abc, 5, 3)
    _, report = deconvolve(P, P)
    for n in range(6):
        targets = sum(1 for _ in multisets_of_size(3, n))
        assert report.terms_by_order[n] == bell_number(n + 1) * targets
    assert report.term_count == sum(report.terms_by_order.values())


@pytest.mark.parametrize("seed", range(5))
def test_triangularity(seed, abc):
    P = random_process(abc, 4, seed)
    Q = random_process(abc, 4, seed + 17)
    n = 2
    bump = lambda X: JanossyProcess(
        abc, X.max_order, X.p0,
        {k: (v * 3 + 1 if k.size > n else v) for k, v in X.densities.items()}, X.mode,
    )
    R1, _ = deconvolve(P, Q)
    R2, _ = deconvolve(bump(P), bump(Q))
    for k in range(n + 1):
        for ms in multisets_of_size(3, k):
            assert R1.at(ms) == R2.at(ms)


@pytest.mark.parametrize("seed", range(5))
def test_single_point_equivalence(seed, one_point):
    N = 8
    P = random_process(one_point, N, seed)
    Q = random_process(one_point, N, seed + 1000)
    R, _ = deconvolve(P, Q)
    pgf = lambda X: PowerSeries.from_coeffs([X.at(power(k)) / math.factorial(k) for k in range(N + 1)])
    assert pgf(R) == series_div(pgf(P), pgf(Q))


def test_non_closure_is_reported(one_point, bernoulli):
    Q = JanossyProcess(one_point, 1, Fraction(1, 4), {(0,): Fraction(3, 4)})
    R, report = deconvolve(bernoulli, Q)
    # (1+s)/2 / ((1+3s)/4) = 2 - 4s + ...
    assert R.p0 == 2
    assert R.at(A) == -4
    assert report.negative_count == 1
    assert report.min_density == -4
    assert not report.valid_process
    assert R.tail_mass_allowed


def test_truncated_divisor_limits_order(abc):
    P = random_process(abc, 4, 1)
    Q = random_process(abc, 4, 2).truncated(2)
    assert Q.tail_mass_allowed
    R, report = deconvolve(P, Q)
    assert R.max_order == 2 and R.tail_mass_allowed
    assert not report.valid_process or report.mass == 1


# --- pointwise quotient check ---------------------------------------------------


def test_pointwise_check_exact(abc):
    Q, R = random_process(abc, 2, 11), random_process(abc, 3, 12)
    P = superpose(Q, R)
    out, _ = deconvolve(P, Q)
    rng = random.Random(0)
    samples = [[Fraction(rng.randint(0, 8), 8) for _ in range(3)] for _ in range(10)]
    assert pointwise_quotient_check(P, Q, out, samples) == 0
    assert pointwise_quotient_check(P, Q, out, [[0, 0, 0]]) == abs(P.p0 - Q.p0 * out.p0) == 0


def test_pointwise_check_detects_mismatch(abc):
    Q, R = random_process(abc, 2, 11), random_process(abc, 2, 12)
    P = superpose(Q, R)
    assert pointwise_quotient_check(P, Q, random_process(abc, 2, 13), [[1, 1, 1], [0, 0, 0]]) > 0


def test_float_round_trip_against_rational():
    space = StateSpace(("a", "b", "c"))
    Q, R = random_process(space, 3, 21), random_process(space, 3, 22)
    P = superpose(Q, R)
    exact, _ = deconvolve(P, Q)
    approx, report = deconvolve(P.with_mode(FLOAT), Q.with_mode(FLOAT))
    keys = set(exact.densities) | set(approx.densities)
    assert max(abs(approx.at(k) - float(exact.at(k))) for k in keys) <= 1e-10
    assert abs(approx.p0 - float(exact.p0)) <= 1e-12
    assert report.negative_count == 0
