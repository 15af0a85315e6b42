"""Simple tensors, rank decompositions and elementary transformations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CertificateError, NotRankOne, PivotError, ShapeError
from .linalg import Echelon, all_int, flatten, matrix_rank
from .sparse import SparseMatrix, SparseTensor, SparseVector, _as_index, _check_axis


def _div(a, b):
    if type(a) is int and type(b) is int:
        return Fraction(a, b)
    return a / b


@dataclass(frozen=True)
class SimpleTensor:
    """a (x) b (x) c.  Zero vectors are allowed: elementary transformations
    keep the term count fixed, and a transformed term may vanish."""

    a: SparseVector
    b: SparseVector
    c: SparseVector

    @property
    def vectors(self):
        return (self.a, self.b, self.c)

    @property
    def dims(self):
        return (self.a.index, self.b.index, self.c.index)

    def is_zero(self):
        return self.a.is_zero() or self.b.is_zero() or self.c.is_zero()

    def at(self, p, q, r):
        x = self.a[p]
        if x == 0:
            return 0
        y = self.b[q]
        if y == 0:
            return 0
        return x * y * self.c[r]

    def slice(self, axis, pos):
        """The ``pos``-th axis-slice: a scalar times the outer product of the other two."""
        _check_axis(axis)
        vs = self.vectors
        s = vs[axis - 1][pos]
        u, w = [vs[t] for t in range(3) if t != axis - 1]
        return SparseMatrix.outer(u, w).scale(s)

    def slice_shape(self, axis):
        """(coefficient vector, rank-one matrix) with slice k = coef[k] * matrix."""
        vs = self.vectors
        u, w = [vs[t] for t in range(3) if t != axis - 1]
        return vs[axis - 1], SparseMatrix.outer(u, w)

    def to_tensor(self):
        data = {}
        for p, x in self.a.data.items():
            for q, y in self.b.data.items():
                xy = x * y
                for r, z in self.c.data.items():
                    data[(p, q, r)] = xy * z
        return SparseTensor(self.dims, data)

    def embed(self, dims):
        return SimpleTensor(*(v.embed(d) for v, d in zip(self.vectors, dims)))

    def is_symmetric(self):
        """Symmetric simple tensor: all three vectors collinear."""
        if self.is_zero():
            return True
        a, b, c = self.vectors
        return matrix_rank(_stack([a, b, c])) == 1

    def with_vector(self, axis, v):
        vs = list(self.vectors)
        vs[axis - 1] = v
        return SimpleTensor(*vs)


def _stack(vectors):
    data = {}
    for i, v in enumerate(vectors):
        for p, x in v.data.items():
            data[(i, p)] = x
    return SparseMatrix(len(vectors), vectors[0].index, data)


@dataclass
class Decomposition:
    dims: tuple
    terms: list = field(default_factory=list)

    def __post_init__(self):
        self.dims = tuple(_as_index(d) for d in self.dims)
        for t in self.terms:
            if t.dims != self.dims:
                raise ShapeError("term does not conform to decomposition dims")

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def shape(self):
        return tuple(len(d) for d in self.dims)


def sum_terms(D):
    data = {}
    for t in D.terms:
        for p, x in t.a.data.items():
            for q, y in t.b.data.items():
                xy = x * y
                for r, z in t.c.data.items():
                    k = (p, q, r)
                    data[k] = data.get(k, 0) + xy * z
    return SparseTensor(D.dims, data)


def sum_slice(D, axis, pos):
    """One axis-slice of the sum, without forming the whole tensor."""
    _check_axis(axis)
    a, b = [t for t in range(3) if t != axis - 1]
    data = {}
    for t in D.terms:
        vs = t.vectors
        s = vs[axis - 1].data.get(pos)
        if s is None:
            continue
        for p, x in vs[a].data.items():
            sx = s * x
            for q, y in vs[b].data.items():
                k = (p, q)
                data[k] = data.get(k, 0) + sx * y
    return SparseMatrix(D.dims[a], D.dims[b], data)


def factor_rank_one(M):
    """(u, v) with M = u v^T; raises NotRankOne otherwise (zero included)."""
    if not M.data:
        raise NotRankOne("zero matrix has no rank-one factorization")
    (i, j), piv = min(M.data.items())
    u = M.col(j)
    v = M.row(i).scale(_div(1, piv))
    if SparseMatrix.outer(u, v) != M:
        raise NotRankOne(f"matrix has rank {matrix_rank(M)}")
    return u, v


def elementary_transformation(D, axis, lam, pivot):
    """Rewrite D so that the lambda-combination of term slice-shapes becomes a term.

    ``lam`` has one coefficient per term.  The pivot term is replaced by
    ``x (x) y (x) c_pivot / lam_pivot`` (arranged on the right axes) where
    ``x y^T`` is the combined rank-one matrix M0; every other term u gets its
    axis vector replaced by ``c_u - (lam_u / lam_pivot) c_pivot``.
    """
    _check_axis(axis)
    lam = list(lam)
    if len(lam) != len(D.terms):
        raise ShapeError("need one coefficient per term")
    lp = lam[pivot]
    if lp == 0:
        raise PivotError("pivot coefficient is zero")
    a, b = [t for t in range(3) if t != axis - 1]
    M0 = SparseMatrix(D.dims[a], D.dims[b])
    for lu, t in zip(lam, D.terms):
        if lu != 0:
            M0 = M0 + t.slice_shape(axis)[1].scale(lu)
    x, y = factor_rank_one(M0)
    cp = D.terms[pivot].vectors[axis - 1]
    new_terms = []
    for u, (lu, t) in enumerate(zip(lam, D.terms)):
        if u == pivot:
            vs = [None, None, None]
            vs[a], vs[b] = x, y
            vs[axis - 1] = cp.scale(_div(1, lp))
            new_terms.append(SimpleTensor(*vs))
        elif lu == 0:
            new_terms.append(t)
        else:
            cu = t.vectors[axis - 1]
            new_terms.append(t.with_vector(axis, cu - cp.scale(_div(lu, lp))))
    return Decomposition(D.dims, new_terms)


def normalize_against_rank_one_slices(D, axis, slice_positions):
    """Elementary transformations after which each named slice has one owner.

    On return, for every named position q exactly one term has a nonzero
    q-th axis-slice, and that slice is collinear to the q-th slice of the sum.
    Returns (decomposition, {position: owning term}).
    """
    _check_axis(axis)
    slice_positions = list(slice_positions)
    flat = []
    for q in slice_positions:
        S = sum_slice(D, axis, q)
        if S.is_zero() or matrix_rank(S) != 1:
            raise CertificateError(f"slice {q} of the sum is not rank-one")
        flat.append(flatten(S))
    ech = Echelon(integer=all_int(flat))
    for q, row in zip(slice_positions, flat):
        if not ech.insert(row):
            raise CertificateError(f"slice {q} depends on the earlier named slices")
    owners = {}
    for q in slice_positions:
        lam = [t.vectors[axis - 1][q] for t in D.terms]
        taken = set(owners.values())
        pivot = next((u for u, l in enumerate(lam) if l != 0 and u not in taken and not D.terms[u].is_zero()), None)
        if pivot is None:
            raise CertificateError(f"no free term carries slice {q}")
        D = elementary_transformation(D, axis, lam, pivot)
        owners[q] = pivot
    return D, owners
