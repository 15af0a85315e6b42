"""The 5x5x5 kernel, the 800^3 tensor, its 903-term decomposition and the
finite certificates around it."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from . import gadgets as G
from . import poly
from .decomposition import Decomposition, SimpleTensor, sum_terms
from .errors import PreconditionError, PropertyViolation, VerificationFailure
from .indices import STARS, core_index_set, gadget_ids
from .lazy import ClonedTensor, clone_vector, symmetric_adjoin
from .linalg import matrix_rank, rank_of_rows, span_dim
from .scalar import I, SQRT2, SQRT3
from .sparse import SparseMatrix, SparseTensor, SparseVector
from .substitution import (
    CorrectionAssignment,
    build_adjoined_decomposition,
    chained_lower_bound,
    membership_in_E,
)
from .verify import verify_exact, verify_freivalds

SIGMA = G.SIGMA

# slice k of the kernel, rows i, columns j: A(i|j|k) = A_SLICES[k-1][i-1][j-1]
A_SLICES = (
    ((0, 0, 0, 0, 1), (0, 0, 0, 0, 1), (0, 0, 0, 0, 1), (0, 0, 0, 1, 0), (1, 1, 1, 0, 0)),
    ((0, 0, 0, 0, 1), (0, 0, 0, 0, 1), (0, 0, 0, 0, 1), (0, 0, 0, 2, 0), (1, 1, 1, 0, 0)),
    ((0, 0, 0, 0, 1), (0, 0, 0, 0, 1), (0, 0, 0, 0, 1), (0, 0, 0, 0, 0), (1, 1, 1, 0, 0)),
    ((0, 0, 0, 1, 0), (0, 0, 0, 2, 0), (0, 0, 0, 0, 0), (1, 2, 0, 0, 0), (0, 0, 0, 0, 0)),
    ((1, 1, 1, 0, 0), (1, 1, 1, 0, 0), (1, 1, 1, 0, 0), (0, 0, 0, 0, 0), (0, 0, 0, 0, 0)),
)


def tensor_A():
    return SparseTensor.from_slices(A_SLICES)


@lru_cache(maxsize=None)
def tensor_cloned_A():
    return ClonedTensor(tensor_A(), SIGMA)


@lru_cache(maxsize=None)
def tensor_S():
    """A cloned 100 times with all 300 gadget matrices adjoined on every axis."""
    return symmetric_adjoin(tensor_cloned_A(), G.basis_B())


# -- witness ---------------------------------------------------------------


@dataclass
class WitnessDecomposition:
    terms: Decomposition

    def sum(self):
        return sum_terms(self.terms)

    def __len__(self):
        return len(self.terms)


def _vec(values):
    return SparseVector.from_dense(values)


def witness_vectors():
    h = -SQRT2 / 2
    t = I * SQRT3 / 3
    a = [1, 1, 1, h, 0]
    c = [-1, 1, -3, 0, 1]
    d = [0, 1, -1, 0, 1]
    e = [1, 1, 1, -1, 0]
    f = [1, 1, 1, t, 0]
    g = [1, -2, 4, 0, 1]
    return [(a, a, c), (d, e, e), (f, g, f)]


def witness():
    terms = [SimpleTensor(_vec(x), _vec(y), _vec(z)) for x, y, z in witness_vectors()]
    return WitnessDecomposition(Decomposition((5, 5, 5), terms))


@lru_cache(maxsize=None)
def witness_sum():
    return witness().sum()


def _w_names():
    return G.W_STARS


@lru_cache(maxsize=None)
def _membership():
    return membership_in_E(witness_sum(), tensor_A(), G.w_space())


def verify_witness_membership(target=None):
    """Corrections over W taking A to the witness sum; VerificationFailure if none."""
    corr = _membership() if target is None else membership_in_E(target, tensor_A(), G.w_space())
    if corr is None:
        raise VerificationFailure("no W-corrections take A to the witness sum")
    return corr


def lift_corrections(corr):
    """Gadget-basis corrections on the 500 core slices, copy-uniform."""
    ids = list(gadget_ids())
    col = {g: m for m, g in enumerate(ids)}
    by_star = {s: [col[g] for g in G.star_ids(s)] for s in STARS}
    sign = [1 if g.kind == "L" else -1 for g in ids]
    coeffs = {}
    for axis in (1, 2, 3):
        per = {}
        for k in corr.positions(axis):
            cw = corr.dense(axis, k)
            vec = {}
            for j, star in enumerate(_w_names()):
                if cw[j] != 0:
                    for m in by_star[star]:
                        vec[m] = cw[j] * sign[m]
            if vec:
                for c in range(SIGMA):
                    per[k * SIGMA + c] = vec
        coeffs[axis] = per
    return CorrectionAssignment(len(ids), coeffs)


def cloned_witness_terms():
    idx = core_index_set()
    terms = [SimpleTensor(*(clone_vector(v, SIGMA, idx) for v in t.vectors)) for t in witness().terms.terms]
    return Decomposition((idx, idx, idx), terms)


@lru_cache(maxsize=None)
def _adjoined_with_factors():
    out = []
    for g, M in G.basis_B():
        w = G.gadget_factor(g)
        out.append((g, M, (w, w)))
    return out


def build_903():
    corr = verify_witness_membership()
    lifted = lift_corrections(corr)
    adj = _adjoined_with_factors()
    return build_adjoined_decomposition(cloned_witness_terms(), lifted, [adj, adj, adj])


def verify_903(D, mode="exact", seed=1, trials=20):
    if mode == "exact":
        return verify_exact(D, tensor_S())
    if mode == "freivalds":
        return verify_freivalds(D, tensor_S(), seed=seed, trials=trials)
    raise ValueError(f"unknown verification mode {mode!r}")


# -- lower-bound pieces ----------------------------------------------------


def residual_rank3_certificate(E):
    """Largest certified bound min(3, max over axes of the slice-span dimension)."""
    if isinstance(E, ClonedTensor):
        E = E.kernel
    E = E.materialize()
    best = 0
    for axis in (1, 2, 3):
        d = span_dim(E.slice(axis, p) for p in range(E.shape[axis - 1]))
        best = max(best, d)
    return min(best, 3)


def lower_bound_chain():
    """Substitution bound over the 900 adjoined slices plus the residual certificate."""
    S = tensor_S()
    n = len(core_index_set())
    labels = range(n, S.shape[0])
    cert = residual_rank3_certificate(witness_sum())
    return chained_lower_bound(S, {1: labels, 2: labels, 3: labels}, cert)


@dataclass
class FReport:
    items: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(ok for ok, _ in self.items.values())


F_INDEX = (1, 2, 3, 5)


def check_F_structure(E0=None, raise_on_failure=True):
    """Vanishing, unit and sign patterns of the residual on layers {1,2,3,5}."""
    E0 = (witness_sum() if E0 is None else E0).materialize()

    def F(i, j, k):
        return E0.at(i - 1, j - 1, k - 1)

    rep = FReport()
    bad = [key for j in (1, 2, 3) for key in [(j, j, j), (j, 5, 5), (5, j, 5), (5, 5, j)] if F(*key) != 0]
    if F(5, 5, 5) != 0:
        bad.append((5, 5, 5))
    rep.items["3.1"] = (not bad, bad)
    bad = [key for j in (1, 2, 3) for key in [(j, j, 5), (j, 5, j), (5, j, j)] if F(*key) != 1]
    rep.items["3.2"] = (not bad, bad)
    bad = [
        key
        for i in (1, 2, 3)
        for j in (1, 2, 3)
        if i != j
        for key in [(i, j, 5), (i, 5, j), (5, i, j)]
        if F(*key) not in (1, -1)
    ]
    rep.items["3.3"] = (not bad, bad)
    bad = []
    for axis in (1, 2, 3):
        data = {}
        for p, i in enumerate(F_INDEX):
            for q, j in enumerate(F_INDEX):
                key = [i, j]
                key.insert(axis - 1, 5)
                v = F(*key)
                if v != 0:
                    data[(p, q)] = v
        r = matrix_rank(SparseMatrix(4, 4, data))
        if r != 1:
            bad.append((axis, r))
    rep.items["3.4"] = (not bad, bad)
    if raise_on_failure and not rep.ok:
        item = next(k for k, (ok, _) in rep.items.items() if not ok)
        raise PropertyViolation(f"F-structure item {item} fails", rep.items[item][1])
    return rep


def kernel_entries_pairwise_different():
    """A(i|4|4) for i = 1, 2, 3 are pairwise different."""
    A = tensor_A()
    vals = [A.at(i, 3, 3) for i in range(3)]
    return len(set(vals)) == 3, vals


# -- rank-four pencil ------------------------------------------------------


def pencil_slices(a, b, x, y):
    """The three 4x4 slices; None marks an unspecified entry."""
    s = None
    T1 = [[0, a, 1, s], [a, b, 1, s], [1, 1, 0, s], [s, s, s, x]]
    T2 = [[a, b, 1, s], [b, 0, 1, s], [1, 1, 0, s], [s, s, s, y]]
    T3 = [[1, 1, 0, s], [1, 1, 0, s], [0, 0, 0, s], [s, s, s, s]]
    return T1, T2, T3


@dataclass
class PencilCertificate:
    a: int
    b: int
    x: Fraction
    y: Fraction
    independent: bool
    locus: list
    span_dim: int

    @property
    def ok(self):
        return self.independent and self.span_dim <= 2 and len(set(self.locus)) == len(self.locus)


def _linear_entry(T, r, c):
    return {e: Fraction(M[r][c]) for e, M in zip(((1, 0, 0), (0, 1, 0), (0, 0, 1)), T) if M[r][c]}


def pencil_minors(a, b):
    """All 2x2 minors of alpha T1 + beta T2 + gamma T3 on the known 3x3 part."""
    T = pencil_slices(a, b, 0, 1)
    E = [[_linear_entry(T, r, c) for c in range(3)] for r in range(3)]
    minors = []
    for r1, r2 in combinations(range(3), 2):
        for c1, c2 in combinations(range(3), 2):
            m = poly.madd(poly.mmul(E[r1][c1], E[r2][c2]), poly.mscale(poly.mmul(E[r1][c2], E[r2][c1]), -1))
            if m:
                minors.append(m)
    return minors


def _drop(f, var):
    return {tuple(x for k, x in enumerate(e) if k != var): c for e, c in f.items()}


def pencil_locus(a, b):
    """Projective (alpha:beta:gamma) where the known 3x3 part has rank <= 1."""
    minors = pencil_minors(a, b)
    pts = []
    # gamma = 1
    chart = [_drop(poly.specialize(f, {2: 1}), 2) for f in minors]
    for al, be in poly.solve_bivariate(chart, 0, 1):
        pts.append((al, be, Fraction(1)))
    # gamma = 0, beta = 1
    uni = [poly.as_univariate(_drop(_drop(poly.specialize(f, {1: 1, 2: 0}), 2), 1), 0) for f in minors]
    for al in poly.common_roots_univariate(uni):
        pts.append((al, Fraction(1), Fraction(0)))
    # (1 : 0 : 0)
    if all(not poly.specialize(f, {0: 1, 1: 0, 2: 0}) for f in minors):
        pts.append((Fraction(1), Fraction(0), Fraction(0)))
    return pts


def pencil_rank4_certificate(a, b, x, y):
    if a not in (1, -1) or b not in (1, -1):
        raise PreconditionError("signs a, b must be +1 or -1")
    x, y = Fraction(x), Fraction(y)
    if x == y:
        raise PreconditionError("the two corner entries must differ")
    T = pencil_slices(a, b, x, y)
    coords = [(r, c) for r in range(4) for c in range(4) if all(M[r][c] is not None for M in T)]
    rows = [{n: Fraction(M[r][c]) for n, (r, c) in enumerate(coords) if M[r][c]} for M in T]
    independent = rank_of_rows(rows) == 3
    locus = pencil_locus(a, b)
    dim = rank_of_rows([{k: v for k, v in enumerate(p) if v} for p in locus])
    return PencilCertificate(a, b, x, y, independent, locus, dim)


def sample_pairs(n, seed, lo=-50, hi=50):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        x = Fraction(rng.randint(lo, hi), rng.randint(1, 9))
        y = Fraction(rng.randint(lo, hi), rng.randint(1, 9))
        if x != y:
            out.append((x, y))
    return out


# -- span identity ---------------------------------------------------------


def rank_one_with_first_row(r):
    """Symmetric rank-one matrix with first row r (r[0] != 0)."""
    n = len(r)
    return [[r[i] * r[j] / r[0] for j in range(n)] for i in range(n)]


def _M(a, b, x, y):
    return rank_one_with_first_row([x * p + y * q for p, q in zip(a, b)])


@dataclass
class IdentityReport:
    trials: int
    ok: bool
    failure: tuple | None = None


def symmetric_span_identity_check(trials=100, seed=0, dim=6, raise_on_failure=True):
    rng = random.Random(seed)

    def rnd():
        return Fraction(rng.randint(-20, 20), rng.randint(1, 7))

    for t in range(trials):
        a = [Fraction(1)] + [rnd() for _ in range(dim - 1)]
        b = [Fraction(1)] + [rnd() for _ in range(dim - 1)]
        while True:
            x, y = rnd(), rnd()
            if x + y != 0:
                break
        Mxy, M10, M01, M11 = _M(a, b, x, y), _M(a, b, 1, 0), _M(a, b, 0, 1), _M(a, b, 1, 1)
        lhs = [[(x + y) * v for v in row] for row in Mxy]
        rhs = [
            [(x * x - x * y) * M10[i][j] + (y * y - x * y) * M01[i][j] + 2 * x * y * M11[i][j] for j in range(dim)]
            for i in range(dim)
        ]
        if lhs != rhs:
            if raise_on_failure:
                raise PropertyViolation("span identity fails", (a, b, x, y))
            return IdentityReport(t + 1, False, (a, b, x, y))
    return IdentityReport(trials, True)
