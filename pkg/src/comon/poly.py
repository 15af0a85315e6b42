"""Small exact polynomial toolkit: univariate arithmetic over Q, Sylvester
resultants of bivariate polynomials, and rational root extraction.

Univariate polynomials are coefficient lists, lowest degree first, with no
trailing zeros (the zero polynomial is ``[]``).  Multivariate polynomials are
dicts from exponent tuples to Fractions.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, isqrt

from .errors import SolverIncomplete

# -- univariate ------------------------------------------------------------


def trim(p):
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p):
    return len(p) - 1


def padd(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def pneg(p):
    return [-c for c in p]


def psub(p, q):
    return padd(p, pneg(q))


def pmul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def pscale(p, c):
    return trim([c * x for x in p])


def pdivmod(p, q):
    q = trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = trim(p)
    quo = [Fraction(0)] * max(len(r) - len(q) + 1, 0)
    lead = q[-1]
    while len(r) >= len(q):
        shift = len(r) - len(q)
        c = r[-1] / lead
        quo[shift] = c
        r = psub(r, [Fraction(0)] * shift + pscale(q, c))
    return trim(quo), r


def monic(p):
    p = trim(p)
    return [c / p[-1] for c in p] if p else p


def pgcd(p, q):
    p, q = trim(p), trim(q)
    while q:
        p, q = q, pdivmod(p, q)[1]
    return monic(p)


def peval(p, x):
    s = Fraction(0)
    for c in reversed(p):
        s = s * x + c
    return s


def _divisors(n):
    n = abs(n)
    out = set()
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            out.add(d)
            out.add(n // d)
    return sorted(out)


def integer_primitive(p):
    """Integer coefficient list proportional to p with content 1."""
    p = trim(p)
    if not p:
        return []
    den = reduce(lambda a, b: a * b // gcd(a, b), (c.denominator for c in p), 1)
    ints = [int(c * den) for c in p]
    g = reduce(gcd, ints)
    return [c // g for c in ints]


def rational_roots(p):
    """(distinct rational roots, leftover factor without rational roots)."""
    p = trim(p)
    if not p:
        raise SolverIncomplete("zero polynomial has every value as a root", [])
    roots = []
    if p[0] == 0:
        roots.append(Fraction(0))
        while p and p[0] == 0:
            p = p[1:]
    changed = True
    while changed and degree(p) > 0:
        changed = False
        ip = integer_primitive(p)
        for q in _divisors(ip[-1]):
            for d in _divisors(ip[0]):
                for s in (1, -1):
                    x = Fraction(s * d, q)
                    if peval(p, x) == 0:
                        if x not in roots:
                            roots.append(x)
                        while degree(p) > 0 and peval(p, x) == 0:
                            p = pdivmod(p, [-x, Fraction(1)])[0]
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
    return sorted(roots), monic(p)


# -- multivariate ----------------------------------------------------------


def mpoly(terms):
    return {e: Fraction(c) for e, c in terms.items() if c != 0}


def madd(f, g):
    out = dict(f)
    for e, c in g.items():
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c != 0}


def mmul(f, g):
    out = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def mscale(f, c):
    return {e: c * v for e, v in f.items() if c * v != 0}


def specialize(f, values):
    """Substitute ``values`` (dict var -> Fraction) into f; keeps remaining variables."""
    out = {}
    for e, c in f.items():
        v = Fraction(c)
        rest = []
        for k, x in enumerate(e):
            if k in values:
                v *= Fraction(values[k]) ** x
                rest.append(0)
            else:
                rest.append(x)
        if v:
            t = tuple(rest)
            out[t] = out.get(t, 0) + v
    return {e: c for e, c in out.items() if c != 0}


def as_univariate(f, var):
    """Coefficient list in ``var`` for a polynomial that only involves ``var``."""
    out = {}
    for e, c in f.items():
        if any(x for k, x in enumerate(e) if k != var):
            raise ValueError("polynomial involves other variables")
        out[e[var]] = out.get(e[var], 0) + c
    n = max(out) + 1 if out else 0
    return trim([out.get(i, 0) for i in range(n)])


def coeffs_in(f, var, keep):
    """f as a list (lowest first) of univariate polys in ``keep``, indexed by powers of ``var``."""
    by = {}
    for e, c in f.items():
        by.setdefault(e[var], {})
        by[e[var]][e[keep]] = by[e[var]].get(e[keep], 0) + c
    n = max(by) + 1 if by else 0
    out = []
    for i in range(n):
        d = by.get(i, {})
        m = max(d) + 1 if d else 0
        out.append(trim([d.get(j, 0) for j in range(m)]))
    while out and not out[-1]:
        out.pop()
    return out


def _det(M):
    """Determinant of a small square matrix of univariate polynomials."""
    n = len(M)
    if n == 0:
        return [Fraction(1)]
    if n == 1:
        return M[0][0]
    total = []
    for j in range(n):
        if not M[0][j]:
            continue
        minor = [row[:j] + row[j + 1 :] for row in M[1:]]
        term = pmul(M[0][j], _det(minor))
        total = padd(total, term if j % 2 == 0 else pneg(term))
    return total


def resultant(f, g, var, keep):
    """Sylvester resultant of f, g with respect to ``var``; a polynomial in ``keep``.

    Both inputs must have positive degree in ``var``.
    """
    F, G = coeffs_in(f, var, keep), coeffs_in(g, var, keep)
    m, n = len(F) - 1, len(G) - 1
    if m < 1 or n < 1:
        raise ValueError("resultant needs positive degree in the eliminated variable")
    size = m + n
    rows = []
    for i in range(n):
        row = [[] for _ in range(size)]
        for k, c in enumerate(reversed(F)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [[] for _ in range(size)]
        for k, c in enumerate(reversed(G)):
            row[i + k] = c
        rows.append(row)
    return _det(rows)


def _var_degree(f, var):
    return max((e[var] for e in f), default=-1)


def eliminant(polys, var, keep):
    """Gcd of the nonzero ideal members in ``keep`` alone obtained from ``polys``.

    Members are the polynomials free of ``var`` and the pairwise resultants.
    A common zero of ``polys`` makes every member vanish, so the gcd's roots
    contain the ``keep``-coordinates of all solutions.  Returns None when
    every member is zero (no finite information).
    """
    polys = [f for f in polys if f]
    members = []
    with_var = []
    for f in polys:
        if _var_degree(f, var) <= 0:
            members.append(as_univariate(specialize(f, {var: 0}), keep))
        else:
            with_var.append(f)
    for i in range(len(with_var)):
        for j in range(i + 1, len(with_var)):
            members.append(resultant(with_var[i], with_var[j], var, keep))
    members = [m for m in members if m]
    if not members:
        return None
    return reduce(pgcd, members)


def common_roots_univariate(polys):
    """Rational common roots of univariate polynomials; SolverIncomplete otherwise."""
    polys = [trim(p) for p in polys]
    polys = [p for p in polys if p]
    if not polys:
        raise SolverIncomplete("all polynomials vanish identically", [])
    g = reduce(pgcd, polys)
    if degree(g) <= 0:
        return []
    roots, rest = rational_roots(g)
    if degree(rest) > 0:
        raise SolverIncomplete("common factor without rational roots", rest)
    return roots


def solve_bivariate(polys, var_x=0, var_y=1):
    """All common zeros (x, y) in Q^2 of bivariate polynomials.

    Raises SolverIncomplete on a positive-dimensional component or when a
    candidate factor has no rational roots, so no solution is ever dropped.
    """
    polys = [f for f in polys if f]
    if not polys:
        raise SolverIncomplete("all polynomials vanish identically", [])
    g = eliminant(polys, var_y, var_x)
    if g is None:
        raise SolverIncomplete("pairwise resultants all vanish", [])
    if degree(g) <= 0:
        return []
    xs, rest = rational_roots(g)
    if degree(rest) > 0:
        raise SolverIncomplete("eliminant has a factor without rational roots", rest)
    sols = []
    for x in xs:
        uni = [as_univariate(specialize(f, {var_x: x}), var_y) for f in polys]
        for y in common_roots_univariate(uni):
            sols.append((x, y))
    return sols
