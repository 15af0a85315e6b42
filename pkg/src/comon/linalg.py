"""Exact elimination on sparse rows.

Rows are dicts ``column -> value`` with no stored zeros.  Two engines share
one reduced-echelon layout:

* integer rows are eliminated fraction-free (cross-multiplication followed
  by removal of the row content), so no rational ever appears;
* anything else (Fractions, Scalars) uses field division with unit pivots.

Every stored row has a pivot column at which all other stored rows are zero,
so reducing a vector is one pass over the pivots it touches.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import ShapeError
from .sparse import SparseMatrix


def all_int(rows):
    return all(type(v) is int for r in rows for v in r.values())


def _primitive(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {k: v // g for k, v in row.items()}
    return row


def _axpy(target, a, b, src):
    """target := a*target - b*src, dropping zeros."""
    if a != 1:
        for k in target:
            target[k] = a * target[k]
    for k, v in src.items():
        w = target.get(k, 0) - b * v
        if w == 0:
            target.pop(k, None)
        else:
            target[k] = w


class Echelon:
    """Incrementally maintained reduced echelon form of a set of rows.

    With ``track=True`` every stored row remembers its expression as a
    combination of the inserted vectors (field mode only), which is what
    membership queries return.
    """

    def __init__(self, integer=False, track=False):
        if integer and track:
            raise ValueError("tracking needs field mode")
        self.integer = integer
        self.track = track
        self.rows = {}  # pivot column -> row
        self.combos = {}  # pivot column -> {input number: coefficient}
        self.n_inserted = 0

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, vec):
        """Residual of ``vec`` and (field mode) the subtracted combination."""
        v = dict(vec)
        combo = {}
        hits = [c for c in v if c in self.rows]
        for c in hits:
            x = v.get(c)
            if x is None:
                continue
            row = self.rows[c]
            if self.integer:
                _axpy(v, row[c], x, row)
            else:
                _axpy(v, 1, x, row)
                if self.track:
                    for j, t in self.combos[c].items():
                        combo[j] = combo.get(j, 0) + x * t
        if self.integer and v:
            v = _primitive(v)
        return v, combo

    def insert(self, vec):
        """Add a row; True when it was independent of the previous ones."""
        idx = self.n_inserted
        self.n_inserted += 1
        v, combo = self.reduce(vec)
        if not v:
            return False
        pivot = min(v)
        if self.integer:
            if v[pivot] < 0:
                v = {k: -x for k, x in v.items()}
        else:
            inv = 1 / v[pivot] if not isinstance(v[pivot], int) else Fraction(1, v[pivot])
            v = {k: x * inv for k, x in v.items()}
            if self.track:
                combo = {j: -t * inv for j, t in combo.items() if t != 0}
                combo[idx] = combo.get(idx, 0) + inv
        for c, row in self.rows.items():
            x = row.get(pivot)
            if x is None:
                continue
            if self.integer:
                _axpy(row, v[pivot], x, v)
                self.rows[c] = _primitive(row)
            else:
                _axpy(row, 1, x, v)
                if self.track:
                    cc = self.combos[c]
                    for j, t in combo.items():
                        w = cc.get(j, 0) - x * t
                        if w == 0:
                            cc.pop(j, None)
                        else:
                            cc[j] = w
        self.rows[pivot] = v
        if self.track:
            self.combos[pivot] = combo
        return True

    def express(self, vec):
        """Coefficients over inserted vectors if ``vec`` is in their span."""
        if not self.track:
            raise ValueError("express needs track=True")
        v, combo = self.reduce(vec)
        if v:
            return None
        return {j: t for j, t in combo.items() if t != 0}


def rank_of_rows(rows):
    rows = [r for r in rows if r]
    e = Echelon(integer=all_int(rows))
    for r in rows:
        e.insert(r)
    return e.rank


def _dedupe_columns(rows):
    """Drop repeated coordinate columns; the row rank is unchanged."""
    sig = {}
    for i, r in enumerate(rows):
        for c, v in r.items():
            sig.setdefault(c, []).append((i, v))
    first = {}
    for c in sorted(sig):
        first.setdefault(tuple(sig[c]), c)
    keep = {c: n for n, c in enumerate(sorted(first.values()))}
    return [{keep[c]: v for c, v in r.items() if c in keep} for r in rows]


def flatten(M):
    nc = len(M.cols)
    return {p * nc + q: v for (p, q), v in M.data.items()}


def matrix_rank(M):
    """Exact rank of a SparseMatrix."""
    rows = {}
    for (p, q), v in M.data.items():
        rows.setdefault(p, {})[q] = v
    return rank_of_rows(_dedupe_columns(list(rows.values())))


def span_dim(matrices):
    """Dimension of the linear span of conforming matrices."""
    matrices = list(matrices)
    if not matrices:
        return 0
    shape = matrices[0].shape
    for M in matrices:
        if M.shape != shape:
            raise ShapeError(f"span of {shape} and {M.shape} matrices")
    return rank_of_rows(_dedupe_columns([flatten(M) for M in matrices]))


def vectors_rank(vectors):
    return rank_of_rows(_dedupe_columns([dict(v.data) for v in vectors]))


def rref(rows):
    """Reduced row echelon form (field mode), as sorted (pivot, row) pairs."""
    e = Echelon()
    for r in rows:
        if r:
            e.insert(r)
    return sorted(e.rows.items())


def solve(rows, rhs, n_unknowns):
    """One exact solution of ``rows @ x = rhs`` (free variables zero), or None.

    ``rows`` are dicts over unknowns 0..n-1; ``rhs`` a list of field elements.
    """
    aug = []
    for r, b in zip(rows, rhs):
        row = dict(r)
        if b != 0:
            row[n_unknowns] = b
        aug.append(row)
    x = {}
    for pivot, row in rref(aug):
        if pivot == n_unknowns:
            return None
        b = row.get(n_unknowns, 0)
        if b != 0:
            x[pivot] = b
    return x


def nullspace(rows, n_unknowns):
    """Basis of {x : rows @ x = 0} as dicts over 0..n-1."""
    red = rref(rows)
    pivots = {p for p, _ in red}
    basis = []
    for f in range(n_unknowns):
        if f in pivots:
            continue
        vec = {f: 1}
        for p, row in red:
            c = row.get(f)
            if c is not None:
                vec[p] = -c
        basis.append(vec)
    return basis


class MatrixSubspace:
    """Span of linearly independent matrices, with membership queries."""

    def __init__(self, basis, shape=None):
        """``shape`` = (rows, cols) index sets; needed only for an empty basis."""
        basis = list(basis)
        if basis:
            shape = (basis[0].rows, basis[0].cols)
            for M in basis:
                if (M.rows, M.cols) != shape:
                    raise ShapeError("basis matrices must conform")
        self.basis = basis
        self._shape = shape
        self._ech = Echelon(track=True)
        for M in basis:
            if not self._ech.insert(flatten(M)):
                raise ValueError("basis matrices are linearly dependent")

    @classmethod
    def spanned_by(cls, matrices):
        """Keep a maximal independent prefix-greedy subset."""
        kept, e, shape = [], Echelon(), None
        for M in matrices:
            shape = shape or (M.rows, M.cols)
            if e.insert(flatten(M)):
                kept.append(M)
        return cls(kept, shape)

    @property
    def dim(self):
        return len(self.basis)

    @property
    def ambient(self):
        return (len(self._shape[0]), len(self._shape[1])) if self._shape else None

    def coefficients(self, M):
        """Coordinates of M in the basis, or None when M is outside the span."""
        if self._shape and (M.rows, M.cols) != self._shape:
            raise ShapeError("matrix does not conform to the subspace")
        combo = self._ech.express(flatten(M))
        if combo is None:
            return None
        return [combo.get(j, 0) for j in range(self.dim)]

    def __contains__(self, M):
        return self.coefficients(M) is not None

    def combine(self, coeffs):
        if len(coeffs) != self.dim:
            raise ShapeError("coefficient vector length differs from dim")
        if self._shape is None:
            raise ShapeError("empty subspace without a known matrix shape")
        out = SparseMatrix(*self._shape)
        for c, M in zip(coeffs, self.basis):
            if c != 0:
                out = out + M.scale(c)
        return out


def member(M, S):
    return S.coefficients(M)
