"""Exact sparse vectors, matrices and 3-tensors.

Entries live in dicts keyed by integer positions and never store zeros.
Values are field elements (int, Fraction or Scalar).  Containers are treated
as immutable once built; the constructors take ownership of the dict they
are given.
"""

from __future__ import annotations

from itertools import permutations

from .errors import ShapeError
from .indices import IndexSet

AXES = (1, 2, 3)


def _as_index(x):
    if isinstance(x, IndexSet):
        return x
    if isinstance(x, int):
        return IndexSet.range(x)
    return IndexSet(x)


def _clean(data):
    return {k: v for k, v in data.items() if v != 0}


def _check_axis(axis):
    if axis not in AXES:
        raise ValueError(f"axis must be 1, 2 or 3, got {axis!r}")


class SparseVector:
    __slots__ = ("index", "data")

    def __init__(self, index, data=None):
        self.index = _as_index(index)
        self.data = _clean(data or {})
        n = len(self.index)
        for p in self.data:
            if not 0 <= p < n:
                raise IndexError(f"position {p} outside vector of length {n}")

    @classmethod
    def from_dense(cls, values, index=None):
        values = list(values)
        return cls(index if index is not None else len(values), dict(enumerate(values)))

    @classmethod
    def from_labels(cls, index, mapping):
        index = _as_index(index)
        return cls(index, {index.pos(k): v for k, v in mapping.items()})

    def __len__(self):
        return len(self.index)

    def __getitem__(self, p):
        return self.data.get(p, 0)

    def get_label(self, label):
        return self.data.get(self.index.pos(label), 0)

    def items(self):
        return sorted(self.data.items())

    @property
    def nnz(self):
        return len(self.data)

    def is_zero(self):
        return not self.data

    def support(self):
        return frozenset(self.data)

    def scale(self, c):
        if c == 0:
            return SparseVector(self.index)
        return SparseVector(self.index, {p: c * v for p, v in self.data.items()})

    def __add__(self, other):
        if self.index != other.index:
            raise ShapeError("vector index sets differ")
        out = dict(self.data)
        for p, v in other.data.items():
            out[p] = out.get(p, 0) + v
        return SparseVector(self.index, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def dot(self, other):
        """Bilinear pairing with a SparseVector or a dict of positions."""
        od = other.data if isinstance(other, SparseVector) else other
        a, b = (self.data, od) if len(self.data) <= len(od) else (od, self.data)
        s = 0
        for p, v in a.items():
            w = b.get(p)
            if w is not None:
                s = s + v * w
        return s

    def embed(self, index):
        """Same labels, placed in a larger index set (zeros elsewhere)."""
        index = _as_index(index)
        return SparseVector(index, {index.pos(self.index[p]): v for p, v in self.data.items()})

    def to_dense(self):
        return [self.data.get(p, 0) for p in range(len(self.index))]

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return self.index == other.index and self.data == other.data

    def __repr__(self):
        return f"SparseVector(n={len(self)}, nnz={self.nnz})"


class SparseMatrix:
    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows, cols, data=None):
        self.rows = _as_index(rows)
        self.cols = _as_index(cols)
        self.data = _clean(data or {})
        nr, nc = len(self.rows), len(self.cols)
        for p, q in self.data:
            if not (0 <= p < nr and 0 <= q < nc):
                raise IndexError(f"entry ({p}, {q}) outside {nr}x{nc} matrix")

    @classmethod
    def from_dense(cls, rows_list, rows=None, cols=None):
        rows_list = [list(r) for r in rows_list]
        nr = len(rows_list)
        nc = len(rows_list[0]) if nr else 0
        data = {(i, j): v for i, r in enumerate(rows_list) for j, v in enumerate(r)}
        return cls(rows if rows is not None else nr, cols if cols is not None else nc, data)

    @classmethod
    def outer(cls, u, v):
        if not u.data or not v.data:
            return cls(u.index, v.index)
        return cls(u.index, v.index, {(p, q): a * b for p, a in u.data.items() for q, b in v.data.items()})

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    @property
    def shape(self):
        return (len(self.rows), len(self.cols))

    @property
    def nnz(self):
        return len(self.data)

    def __getitem__(self, key):
        return self.data.get(key, 0)

    def get_label(self, r, c):
        return self.data.get((self.rows.pos(r), self.cols.pos(c)), 0)

    def items(self):
        return sorted(self.data.items())

    def entries(self):
        """Canonical (row-label, col-label, value) list."""
        return [(self.rows[p], self.cols[q], v) for (p, q), v in self.items()]

    def is_zero(self):
        return not self.data

    def row_support(self):
        return frozenset(p for p, _ in self.data)

    def col_support(self):
        return frozenset(q for _, q in self.data)

    def row(self, p):
        return SparseVector(self.cols, {q: v for (i, q), v in self.data.items() if i == p})

    def col(self, q):
        return SparseVector(self.rows, {p: v for (p, j), v in self.data.items() if j == q})

    def transpose(self):
        return SparseMatrix(self.cols, self.rows, {(q, p): v for (p, q), v in self.data.items()})

    @property
    def T(self):
        return self.transpose()

    def scale(self, c):
        if c == 0:
            return SparseMatrix(self.rows, self.cols)
        return SparseMatrix(self.rows, self.cols, {k: c * v for k, v in self.data.items()})

    def _check_same(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ShapeError(f"matrix shapes differ: {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same(other)
        out = dict(self.data)
        for k, v in other.data.items():
            out[k] = out.get(k, 0) + v
        return SparseMatrix(self.rows, self.cols, out)

    def __sub__(self, other):
        self._check_same(other)
        out = dict(self.data)
        for k, v in other.data.items():
            out[k] = out.get(k, 0) - v
        return SparseMatrix(self.rows, self.cols, out)

    def __neg__(self):
        return self.scale(-1)

    def is_symmetric(self):
        if self.rows != self.cols:
            return False
        d = self.data
        return all(d.get((q, p), 0) == v for (p, q), v in d.items())

    def bilinear(self, x, y):
        """x^T M y for dicts (or SparseVectors) of positions."""
        xd = x.data if isinstance(x, SparseVector) else x
        yd = y.data if isinstance(y, SparseVector) else y
        s = 0
        for (p, q), v in self.data.items():
            a = xd.get(p)
            if a is None:
                continue
            b = yd.get(q)
            if b is not None:
                s = s + a * v * b
        return s

    def embed(self, rows, cols):
        """Same labels, zero rows and columns added."""
        rows, cols = _as_index(rows), _as_index(cols)
        rp = [rows.pos(lab) for lab in self.rows]
        cp = [cols.pos(lab) for lab in self.cols]
        return SparseMatrix(rows, cols, {(rp[p], cp[q]): v for (p, q), v in self.data.items()})

    def restrict(self, row_pos, col_pos):
        row_pos, col_pos = sorted(set(row_pos)), sorted(set(col_pos))
        rmap = {p: i for i, p in enumerate(row_pos)}
        cmap = {q: j for j, q in enumerate(col_pos)}
        data = {(rmap[p], cmap[q]): v for (p, q), v in self.data.items() if p in rmap and q in cmap}
        return SparseMatrix(IndexSet(self.rows[p] for p in row_pos), IndexSet(self.cols[q] for q in col_pos), data)

    def to_dense(self):
        out = [[0] * len(self.cols) for _ in range(len(self.rows))]
        for (p, q), v in self.data.items():
            out[p][q] = v
        return out

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self.data == other.data

    def __repr__(self):
        return f"SparseMatrix({len(self.rows)}x{len(self.cols)}, nnz={self.nnz})"


class SparseTensor:
    """Materialized 3-tensor."""

    __slots__ = ("dims", "data")

    def __init__(self, dims, data=None):
        self.dims = tuple(_as_index(d) for d in dims)
        if len(self.dims) != 3:
            raise ShapeError("3-way tensors only")
        self.data = _clean(data or {})
        n = self.shape
        for key in self.data:
            if not all(0 <= key[a] < n[a] for a in range(3)):
                raise IndexError(f"entry {key} outside tensor of shape {n}")

    @classmethod
    def from_dense(cls, arr, dims=None):
        """``arr[i][j][k]`` nested lists."""
        n1 = len(arr)
        n2 = len(arr[0]) if n1 else 0
        n3 = len(arr[0][0]) if n2 else 0
        data = {(i, j, k): arr[i][j][k] for i in range(n1) for j in range(n2) for k in range(n3)}
        return cls(dims if dims is not None else (n1, n2, n3), data)

    @classmethod
    def from_slices(cls, slices, dims=None):
        """Build from a list of 3-slices, each a dense row-major matrix."""
        n3 = len(slices)
        n1 = len(slices[0]) if n3 else 0
        n2 = len(slices[0][0]) if n1 else 0
        data = {(i, j, k): slices[k][i][j] for k in range(n3) for i in range(n1) for j in range(n2)}
        return cls(dims if dims is not None else (n1, n2, n3), data)

    @classmethod
    def zeros(cls, dims):
        return cls(dims)

    @property
    def shape(self):
        return tuple(len(d) for d in self.dims)

    @property
    def nnz(self):
        return len(self.data)

    def at(self, p, q, r):
        return self.data.get((p, q, r), 0)

    def get_label(self, i, j, k):
        return self.data.get((self.dims[0].pos(i), self.dims[1].pos(j), self.dims[2].pos(k)), 0)

    def items(self):
        return iter(sorted(self.data.items()))

    def entries(self):
        return [((self.dims[0][p], self.dims[1][q], self.dims[2][r]), v) for (p, q, r), v in self.items()]

    def materialize(self):
        return self

    def slice(self, axis, pos):
        _check_axis(axis)
        n = self.shape[axis - 1]
        if not 0 <= pos < n:
            raise IndexError(f"slice position {pos} outside axis {axis} of length {n}")
        a, b = [x for x in range(3) if x != axis - 1]
        data = {(key[a], key[b]): v for key, v in self.data.items() if key[axis - 1] == pos}
        return SparseMatrix(self.dims[a], self.dims[b], data)

    def is_cubical(self):
        return self.dims[0] == self.dims[1] == self.dims[2]

    def is_symmetric(self):
        if not self.is_cubical():
            raise ShapeError("symmetry needs cubical dims")
        d = self.data
        for key, v in d.items():
            for perm in set(permutations(key)):
                if d.get(perm, 0) != v:
                    return False
        return True

    def contract(self, x, y, z):
        """Trilinear form sum T(p,q,r) x_p y_q z_r for dicts of positions."""
        s = 0
        for (p, q, r), v in self.data.items():
            a = x.get(p)
            if a is None:
                continue
            b = y.get(q)
            if b is None:
                continue
            c = z.get(r)
            if c is not None:
                s = s + v * a * b * c
        return s

    def index_classes(self, axis):
        """Class id per position; positions with identical slices share a class."""
        _check_axis(axis)
        slices = [[] for _ in range(self.shape[axis - 1])]
        a, b = [x for x in range(3) if x != axis - 1]
        for key, v in sorted(self.data.items()):
            slices[key[axis - 1]].append((key[a], key[b], v))
        seen = {}
        return [seen.setdefault(tuple(s), len(seen)) for s in slices]

    def __add__(self, other):
        other = other.materialize()
        if self.dims != other.dims:
            raise ShapeError("tensor dims differ")
        out = dict(self.data)
        for k, v in other.data.items():
            out[k] = out.get(k, 0) + v
        return SparseTensor(self.dims, out)

    def __sub__(self, other):
        other = other.materialize()
        if self.dims != other.dims:
            raise ShapeError("tensor dims differ")
        out = dict(self.data)
        for k, v in other.data.items():
            out[k] = out.get(k, 0) - v
        return SparseTensor(self.dims, out)

    def scale(self, c):
        if c == 0:
            return SparseTensor(self.dims)
        return SparseTensor(self.dims, {k: c * v for k, v in self.data.items()})

    def to_dense(self):
        n1, n2, n3 = self.shape
        out = [[[0] * n3 for _ in range(n2)] for _ in range(n1)]
        for (p, q, r), v in self.data.items():
            out[p][q][r] = v
        return out

    def __eq__(self, other):
        if not isinstance(other, SparseTensor):
            return NotImplemented
        return self.dims == other.dims and self.data == other.data

    def __repr__(self):
        return f"SparseTensor(shape={self.shape}, nnz={self.nnz})"


def slice_tensor(T, axis, idx):
    """The ``idx``-th ``axis``-slice; ``idx`` is a position."""
    return T.slice(axis, idx)


def restrict(T, I0, J0, K0):
    """Restriction of a materialized tensor to position subsets."""
    T = T.materialize()
    subsets = []
    for a, S in enumerate((I0, J0, K0)):
        S = sorted(set(S))
        for p in S:
            if not 0 <= p < T.shape[a]:
                raise IndexError(f"position {p} outside axis {a + 1}")
        subsets.append(S)
    maps = [{p: i for i, p in enumerate(S)} for S in subsets]
    data = {}
    for (p, q, r), v in T.data.items():
        if p in maps[0] and q in maps[1] and r in maps[2]:
            data[(maps[0][p], maps[1][q], maps[2][r])] = v
    dims = [IndexSet(T.dims[a][p] for p in subsets[a]) for a in range(3)]
    return SparseTensor(dims, data)


def support(T):
    """1-, 2-, 3-supports as sorted position tuples."""
    T = T.materialize()
    sup = [set(), set(), set()]
    for key in T.data:
        for a in range(3):
            sup[a].add(key[a])
    return tuple(tuple(sorted(s)) for s in sup)


def _restricted_to_support(T):
    T = T.materialize()
    s = support(T)
    R = restrict(T, *s)
    return R.shape, R.data


def is_equivalent(T1, T2):
    """Equal after restriction to their supports (labels ignored)."""
    if isinstance(T1, SparseMatrix) or isinstance(T2, SparseMatrix):
        return _matrix_core(T1) == _matrix_core(T2)
    return _restricted_to_support(T1) == _restricted_to_support(T2)


def _matrix_core(M):
    rs = sorted(M.row_support())
    cs = sorted(M.col_support())
    R = M.restrict(rs, cs)
    return R.shape, R.data


def is_symmetric(T):
    return T.is_symmetric()


def matmul(A, B):
    """Exact sparse product A @ B."""
    if A.cols != B.rows:
        raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
    brows = {}
    for (p, q), v in B.data.items():
        brows.setdefault(p, []).append((q, v))
    out = {}
    for (i, k), a in A.data.items():
        for j, b in brows.get(k, ()):
            key = (i, j)
            out[key] = out.get(key, 0) + a * b
    return SparseMatrix(A.rows, B.cols, out)
