"""Independent reference computations used by the tests.

Nothing here imports the package's enumeration or calculus code paths; each
routine is a deliberately naive brute force.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def brute_subsets(n):
    return [c for k in range(n + 1) for c in itertools.combinations(range(n), k)]


def brute_partitions(elements):
    """Set partitions by inserting each element into an existing block or a new one."""
    elements = list(elements)
    if not elements:
        return [[]]
    first, rest = elements[0], elements[1:]
    out = []
    for p in brute_partitions(rest):
        out.append([[first]] + p)
        for i in range(len(p)):
            out.append(p[:i] + [[first] + p[i]] + p[i + 1 :])
    return out


def canonical(partition):
    return tuple(sorted(tuple(sorted(b)) for b in partition))


def ordered_tuple_count(points):
    return len(set(itertools.permutations(points)))


# --- multivariate generating polynomials -------------------------------------
#
# A process on M points with weights w is encoded by its p.g.fl. as a
# polynomial in psi_1..psi_M: the coefficient of prod psi_i^{m_i} equals
# p(multiset m) * prod w_i^{m_i} / prod m_i!.


def to_polynomial(P):
    """{exponent tuple: coefficient} from a JanossyProcess, via ordered tuples."""
    m = len(P.space)
    w = P.space.weights_in(P.mode)
    poly = {(0,) * m: P.p0}
    for n in range(1, P.max_order + 1):
        for tup in itertools.product(range(m), repeat=n):
            e = [0] * m
            for s in tup:
                e[s] += 1
            e = tuple(e)
            value = P.density(tup)
            for s in tup:
                value = value * w[s]
            poly[e] = poly.get(e, 0) + value / math.factorial(n)
    return poly


def from_polynomial(poly, space, max_order, mode):
    from ppdeconv.combinatorics import Multiset
    from ppdeconv.process import JanossyProcess

    w = space.weights_in(mode)
    p0 = poly.get((0,) * len(space), 0)
    dens = {}
    for e, c in poly.items():
        n = sum(e)
        if n == 0 or n > max_order:
            continue
        value = c
        for s, k in enumerate(e):
            value = value * math.factorial(k) / w[s] ** k
        dens[Multiset(tuple((s, k) for s, k in enumerate(e) if k))] = value
    return JanossyProcess(space, max_order, p0, dens, mode, tail_mass_allowed=True)


def poly_mul(a, b, max_degree):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if sum(e) <= max_degree:
                out[e] = out.get(e, 0) + ca * cb
    return out


def poly_div(p, q, m, max_degree):
    """Truncated multivariate division by solving p = q * r degree by degree."""
    zero = (0,) * m
    q0 = q[zero]
    r = {}
    for n in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(m), n):
            e = [0] * m
            for s in combo:
                e[s] += 1
            e = tuple(e)
            acc = p.get(e, 0)
            for eq, cq in q.items():
                if eq == zero:
                    continue
                rest = tuple(x - y for x, y in zip(e, eq))
                if min(rest) < 0:
                    continue
                acc -= cq * r.get(rest, 0)
            r[e] = acc / q0
    return r


def scalar_taylor_quotient(f, g, n):
    """n! [x^n] f/g by solving g*h = f for Taylor coefficients (exact)."""
    h = []
    for k in range(n + 1):
        acc = Fraction(f[k]) if k < len(f) else Fraction(0)
        for j in range(k):
            acc -= h[j] * (g[k - j] if k - j < len(g) else 0)
        h.append(acc / g[0])
    return h[n] * math.factorial(n)
