"""Lazy tensors: clones and adjoined tensors.

Both expose the same read interface as :class:`~comon.sparse.SparseTensor`
(``dims``, ``shape``, ``at``, ``slice``, ``items``, ``nnz``, ``contract``,
``is_symmetric``, ``index_classes``, ``materialize``) without storing their
expanded entries.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError, StructureError, SymmetryError
from .indices import CoreIndex, IndexSet
from .sparse import SparseMatrix, SparseTensor, SparseVector, _check_axis


def _clone_index(index, sigma):
    for lab in index:
        if not isinstance(lab, int):
            raise StructureError("only int-labelled index sets can be cloned")
    return IndexSet(CoreIndex(lab, c) for lab in index for c in range(1, sigma + 1))


def clone_vector(v, sigma, index=None):
    index = index or _clone_index(v.index, sigma)
    data = {}
    for p, x in v.data.items():
        base = p * sigma
        for c in range(sigma):
            data[base + c] = x
    return SparseVector(index, data)


def clone_matrix(M, sigma):
    rows, cols = _clone_index(M.rows, sigma), _clone_index(M.cols, sigma)
    data = {}
    for (p, q), x in M.data.items():
        for a in range(p * sigma, (p + 1) * sigma):
            for b in range(q * sigma, (q + 1) * sigma):
                data[(a, b)] = x
    return SparseMatrix(rows, cols, data)


class ClonedTensor:
    """Every kernel index duplicated ``sigma`` times."""

    def __init__(self, kernel, sigma):
        if sigma < 1:
            raise ValueError("sigma must be positive")
        self.kernel = kernel.materialize()
        self.sigma = sigma
        self.dims = tuple(_clone_index(d, sigma) for d in self.kernel.dims)

    @property
    def shape(self):
        return tuple(len(d) for d in self.dims)

    @property
    def nnz(self):
        return self.kernel.nnz * self.sigma ** 3

    def at(self, p, q, r):
        s = self.sigma
        return self.kernel.at(p // s, q // s, r // s)

    def get_label(self, i, j, k):
        return self.at(self.dims[0].pos(i), self.dims[1].pos(j), self.dims[2].pos(k))

    def slice(self, axis, pos):
        _check_axis(axis)
        s = self.sigma
        ks = self.kernel.slice(axis, pos // s)
        a, b = [x for x in range(3) if x != axis - 1]
        data = {}
        for (i, j), v in ks.data.items():
            for p in range(i * s, (i + 1) * s):
                for q in range(j * s, (j + 1) * s):
                    data[(p, q)] = v
        return SparseMatrix(self.dims[a], self.dims[b], data)

    def items(self):
        s = self.sigma
        by_i = {}
        for (i, j, k), v in sorted(self.kernel.data.items()):
            by_i.setdefault(i, {}).setdefault(j, []).append((k, v))
        for i in sorted(by_i):
            for p in range(i * s, (i + 1) * s):
                for j in sorted(by_i[i]):
                    ks = by_i[i][j]
                    for q in range(j * s, (j + 1) * s):
                        for k, v in ks:
                            for r in range(k * s, (k + 1) * s):
                                yield (p, q, r), v

    def materialize(self):
        return SparseTensor(self.dims, dict(self.items()))

    def is_cubical(self):
        return self.dims[0] == self.dims[1] == self.dims[2]

    def is_symmetric(self):
        return self.kernel.is_symmetric()

    def _fold(self, x, axis):
        out = {}
        s = self.sigma
        for p, v in x.items():
            out[p // s] = out.get(p // s, 0) + v
        return {k: v for k, v in out.items() if v != 0}

    def contract(self, x, y, z):
        return self.kernel.contract(self._fold(x, 0), self._fold(y, 1), self._fold(z, 2))

    def index_classes(self, axis):
        _check_axis(axis)
        kc = self.kernel.index_classes(axis)
        return [kc[p // self.sigma] for p in range(self.shape[axis - 1])]


def clone(T, sigma):
    return ClonedTensor(T, sigma)


def is_clone(T, sigma):
    """True when every entry depends only on (position // sigma) per axis."""
    if isinstance(T, ClonedTensor):
        return T.sigma % sigma == 0
    try:
        declone(T, sigma)
    except StructureError:
        return False
    return True


def declone(T, sigma):
    if isinstance(T, ClonedTensor):
        if T.sigma == sigma:
            return T.kernel
        if T.sigma % sigma:
            raise StructureError(f"clone with sigma={T.sigma} is not a {sigma}-clone")
        T = T.materialize()
    T = T.materialize()
    if any(n % sigma for n in T.shape):
        raise StructureError("dims not divisible by sigma")
    kdims = []
    for d in T.dims:
        layers = []
        for start in range(0, len(d), sigma):
            lab = d[start]
            layers.append(lab.layer if isinstance(lab, CoreIndex) else start // sigma + 1)
        kdims.append(IndexSet(layers))
    kern = {}
    for (p, q, r), v in T.data.items():
        key = (p // sigma, q // sigma, r // sigma)
        old = kern.setdefault(key, v)
        if old != v:
            raise StructureError(f"entries of block {key} differ")
    if len(kern) * sigma ** 3 != T.nnz:
        raise StructureError("some block is only partially filled")
    return SparseTensor(kdims, kern)


class AdjoinedTensor:
    """Tensor with labelled slices adjoined on each axis.

    ``adjoined[a]`` is a list of (label, matrix) for axis a+1; the matrices
    are indexed by the other two base axes in increasing order.  Entries with
    two or more adjoined coordinates are zero.
    """

    def __init__(self, base, adjoined):
        self.base = base
        self.adjoined = [list(m) for m in adjoined]
        if len(self.adjoined) != 3:
            raise ShapeError("need three adjoined lists")
        bd = base.dims
        for a, mats in enumerate(self.adjoined):
            x, y = [t for t in range(3) if t != a]
            for lab, M in mats:
                if M.rows != bd[x] or M.cols != bd[y]:
                    raise ShapeError(f"adjoined matrix {lab} does not match the base faces")
        self.base_shape = tuple(len(d) for d in bd)
        self.dims = tuple(bd[a].extend(lab for lab, _ in self.adjoined[a]) for a in range(3))
        self._lines = {}

    @property
    def shape(self):
        return tuple(len(d) for d in self.dims)

    @property
    def nnz(self):
        return self.base.nnz + sum(M.nnz for mats in self.adjoined for _, M in mats)

    def matrix(self, axis, label_pos):
        """The adjoined matrix behind position ``label_pos`` on ``axis``."""
        return self.adjoined[axis - 1][label_pos - self.base_shape[axis - 1]][1]

    def at(self, p, q, r):
        key = (p, q, r)
        adj = [a for a in range(3) if key[a] >= self.base_shape[a]]
        if not adj:
            return self.base.at(p, q, r)
        if len(adj) > 1:
            return 0
        a = adj[0]
        x, y = [t for t in range(3) if t != a]
        M = self.adjoined[a][key[a] - self.base_shape[a]][1]
        return M.data.get((key[x], key[y]), 0)

    def get_label(self, i, j, k):
        return self.at(self.dims[0].pos(i), self.dims[1].pos(j), self.dims[2].pos(k))

    def _line_index(self, psi, chi):
        """Entries of the axis-psi matrices keyed by their axis-chi coordinate."""
        key = (psi, chi)
        if key not in self._lines:
            x, y = [t for t in range(3) if t != psi]
            idx = {}
            for m, (_, M) in enumerate(self.adjoined[psi]):
                for (i, j), v in M.data.items():
                    t, other = (i, j) if chi == x else (j, i)
                    idx.setdefault(t, []).append((m, other, v))
            self._lines[key] = idx
        return self._lines[key]

    def slice(self, axis, pos):
        _check_axis(axis)
        chi = axis - 1
        a, b = [t for t in range(3) if t != chi]
        if pos >= self.base_shape[chi]:
            M = self.adjoined[chi][pos - self.base_shape[chi]][1]
            return SparseMatrix(self.dims[a], self.dims[b], dict(M.data))
        data = dict(self.base.slice(axis, pos).data)
        for psi in (a, b):
            off = self.base_shape[psi]
            for m, other, v in self._line_index(psi, chi).get(pos, ()):
                if psi == a:
                    data[(off + m, other)] = v
                else:
                    data[(other, off + m)] = v
        return SparseMatrix(self.dims[a], self.dims[b], data)

    def items(self):
        for p in range(self.shape[0]):
            S = self.slice(1, p)
            for (q, r), v in sorted(S.data.items()):
                yield (p, q, r), v

    def materialize(self):
        return SparseTensor(self.dims, dict(self.items()))

    def is_cubical(self):
        return self.dims[0] == self.dims[1] == self.dims[2]

    def is_symmetric(self):
        if not self.is_cubical():
            raise ShapeError("symmetry needs cubical dims")
        m1, m2, m3 = self.adjoined
        labels = [lab for lab, _ in m1]
        if labels == [lab for lab, _ in m2] == [lab for lab, _ in m3]:
            same = all(A == B == C for (_, A), (_, B), (_, C) in zip(m1, m2, m3))
            if same:
                return self.base.is_symmetric() and all(M.is_symmetric() for _, M in m1)
        return self.materialize().is_symmetric()

    def _flat(self, a):
        """Integer COO arrays (matrix number, row, col, value) of axis a's matrices, or None."""
        key = ("flat", a)
        if key not in self._lines:
            ms, rs, cs, vs = [], [], [], []
            ok = True
            for m, (_, M) in enumerate(self.adjoined[a]):
                for (i, j), v in M.data.items():
                    if type(v) is not int or abs(v) > 2 ** 20:
                        ok = False
                        break
                    ms.append(m)
                    rs.append(i)
                    cs.append(j)
                    vs.append(v)
                if not ok:
                    break
            self._lines[key] = (np.array(ms, dtype=np.int64), np.array(rs, dtype=np.int64),
                                np.array(cs, dtype=np.int64), np.array(vs, dtype=np.int64)) if ok else None
        return self._lines[key]

    def _bilinears(self, a, u, w):
        """x^T M w for every adjoined matrix on axis a."""
        mats = self.adjoined[a]
        flat = self._flat(a)
        small = all(type(v) is int and abs(v) <= 2 ** 20 for d in (u, w) for v in d.values())
        if flat is None or not small:
            return [M.bilinear(u, w) for _, M in mats]
        x, y = [t for t in range(3) if t != a]
        uu = np.zeros(self.base_shape[x], dtype=np.int64)
        ww = np.zeros(self.base_shape[y], dtype=np.int64)
        for p, v in u.items():
            uu[p] = v
        for p, v in w.items():
            ww[p] = v
        ms, rs, cs, vs = flat
        # vector entries are below 2**20, so int64 is exact while
        # max|entry| * 2**40 * (entries per matrix) stays below 2**62
        if len(vs) and max(int(np.abs(vs).max()), 1) * (2 ** 40) * max(
            np.bincount(ms, minlength=len(mats)).max(), 1
        ) >= 2 ** 62:
            return [M.bilinear(u, w) for _, M in mats]
        out = np.zeros(len(mats), dtype=np.int64)
        np.add.at(out, ms, vs * uu[rs] * ww[cs])
        return [int(v) for v in out]

    def contract(self, x, y, z):
        vecs = (x, y, z)
        core = []
        for a in range(3):
            n = self.base_shape[a]
            core.append({p: v for p, v in vecs[a].items() if p < n})
        s = self.base.contract(*core)
        for a in range(3):
            n = self.base_shape[a]
            cs = [(m, vecs[a].get(n + m)) for m in range(len(self.adjoined[a]))]
            if not any(c for _, c in cs):
                continue
            u, w = [core[t] for t in range(3) if t != a]
            vals = self._bilinears(a, u, w)
            for m, c in cs:
                if c is not None and c != 0:
                    s = s + c * vals[m]
        return s

    def index_classes(self, axis):
        _check_axis(axis)
        chi = axis - 1
        n = self.base_shape[chi]
        base = self.base.index_classes(axis)
        a, b = [t for t in range(3) if t != chi]
        sig = [[] for _ in range(n)]
        for psi in (a, b):
            for t, lst in self._line_index(psi, chi).items():
                sig[t].extend((psi, m, other, v) for m, other, v in lst)
        seen = {}
        out = [seen.setdefault((base[p], tuple(sorted(sig[p], key=lambda e: e[:3]))), len(seen)) for p in range(n)]
        k = len(seen)
        return out + list(range(k, k + self.shape[chi] - n))


def adjoin(T, m1=(), m2=(), m3=()):
    return AdjoinedTensor(T, [m1, m2, m3])


def symmetric_adjoin(T, mats):
    """Adjoin the same labelled symmetric matrices along all three axes."""
    mats = list(mats)
    if not T.is_symmetric():
        raise SymmetryError("base tensor is not symmetric")
    for lab, M in mats:
        if not M.is_symmetric():
            raise SymmetryError(f"adjoined matrix {lab} is not symmetric")
    return AdjoinedTensor(T, [mats, mats, mats])
