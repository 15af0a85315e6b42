"""Modding slices by a matrix subspace, adjoining slices, substitution bounds.

A correction assignment names, for each axis, the subspace combination that
is subtracted from each slice.  Composing the three axes gives an explicit
element of the set E_V(T); the builder turns such an element plus rank-one
adjoined matrices into a decomposition of the adjoined tensor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .decomposition import Decomposition, SimpleTensor, factor_rank_one, sum_slice
from .errors import CertificateError, ShapeError
from .lazy import adjoin as _adjoin
from .lazy import symmetric_adjoin as _symmetric_adjoin
from .linalg import Echelon, all_int, flatten, matrix_rank, solve
from .sparse import AXES, SparseMatrix, SparseTensor, SparseVector, _check_axis


def _other_axes(axis):
    return [t for t in range(3) if t != axis - 1]


def _as_coeff_dict(c):
    if isinstance(c, dict):
        return {j: v for j, v in c.items() if v != 0}
    return {j: v for j, v in enumerate(c) if v != 0}


@dataclass
class CorrectionAssignment:
    """Per-axis corrections: axis -> {slice position: coefficients over the basis}.

    Coefficients may be given as full lists or as sparse {basis position: value}
    dicts; ``vector`` always returns the sparse form.
    """

    dim: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        for axis, per in self.coeffs.items():
            _check_axis(axis)
            for pos, c in per.items():
                if isinstance(c, (list, tuple)) and len(c) != self.dim:
                    raise ShapeError(f"axis {axis} slice {pos}: {len(c)} coefficients for dim {self.dim}")
                for j in _as_coeff_dict(c):
                    if not 0 <= j < self.dim:
                        raise ShapeError(f"coefficient index {j} outside dim {self.dim}")

    @classmethod
    def zero(cls, dim):
        return cls(dim, {})

    def vector(self, axis, pos):
        return _as_coeff_dict(self.coeffs.get(axis, {}).get(pos, {}))

    def dense(self, axis, pos):
        v = self.vector(axis, pos)
        return [v.get(j, 0) for j in range(self.dim)]

    def positions(self, axis):
        return sorted(self.coeffs.get(axis, {}))

    def is_zero(self):
        return all(not self.vector(a, p) for a in AXES for p in self.positions(a))


@dataclass
class AdjoinSpec:
    """Labelled matrices to adjoin on each axis."""

    m1: list = field(default_factory=list)
    m2: list = field(default_factory=list)
    m3: list = field(default_factory=list)

    def lists(self):
        return [self.m1, self.m2, self.m3]


def _subspace_basis(V):
    return V.basis if hasattr(V, "basis") else list(V)


def _correction_matrix(basis, coeffs, rows, cols):
    data = {}
    for j, c in coeffs.items():
        for k, v in basis[j].data.items():
            data[k] = data.get(k, 0) + c * v
    return SparseMatrix(rows, cols, data)


def apply_mod(T, axis, V, corr):
    """Subtract the assigned V-combination from every axis-slice of T."""
    _check_axis(axis)
    T = T.materialize()
    basis = _subspace_basis(V)
    if corr.dim != len(basis):
        raise ShapeError(f"assignment has dim {corr.dim}, subspace has {len(basis)}")
    a, b = _other_axes(axis)
    for M in basis:
        if M.rows != T.dims[a] or M.cols != T.dims[b]:
            raise ShapeError("subspace matrices do not match the slice shape")
    data = dict(T.data)
    chi = axis - 1
    for pos in corr.positions(axis):
        c = corr.vector(axis, pos)
        if not c:
            continue
        M = _correction_matrix(basis, c, T.dims[a], T.dims[b])
        for (p, q), v in M.data.items():
            key = [0, 0, 0]
            key[chi], key[a], key[b] = pos, p, q
            key = tuple(key)
            data[key] = data.get(key, 0) - v
    return SparseTensor(T.dims, data)


def apply_all(T, V, corr):
    """((T mod_3 V) mod_2 V) mod_1 V with the given coefficients."""
    for axis in (3, 2, 1):
        T = apply_mod(T, axis, V, corr)
    return T


def membership_in_E(target, base, V):
    """Coefficients taking ``base`` to ``target`` by modding all three axes, or None.

    The unknowns are c[axis][slice][j]; for each entry (p, q, r)
    base - target = sum_j c3[r][j] V_j(p,q) + c2[q][j] V_j(p,r) + c1[p][j] V_j(q,r).
    """
    target, base = target.materialize(), base.materialize()
    if target.dims != base.dims:
        raise ShapeError("target and base dims differ")
    basis = _subspace_basis(V)
    d = len(basis)
    n = target.shape

    def col(axis, pos, j):
        off = sum(n[a - 1] for a in AXES if a < axis) * d
        return off + pos * d + j

    n_unknowns = sum(n) * d
    rows, rhs = [], []
    keys = set(target.data) | set(base.data)
    # every entry where some basis matrix can reach also gets an equation
    for axis in AXES:
        a, b = _other_axes(axis)
        for M in basis:
            for (p, q) in M.data:
                for r in range(n[axis - 1]):
                    key = [0, 0, 0]
                    key[axis - 1], key[a], key[b] = r, p, q
                    keys.add(tuple(key))
    for key in sorted(keys):
        row = {}
        for axis in AXES:
            a, b = _other_axes(axis)
            for j, M in enumerate(basis):
                v = M.data.get((key[a], key[b]))
                if v:
                    c = col(axis, key[axis - 1], j)
                    row[c] = row.get(c, 0) + v
        diff = base.data.get(key, 0) - target.data.get(key, 0)
        if not row:
            if diff != 0:
                return None
            continue
        rows.append(row)
        rhs.append(diff)
    x = solve(rows, rhs, n_unknowns)
    if x is None:
        return None
    coeffs = {}
    for axis in AXES:
        per = {}
        for pos in range(n[axis - 1]):
            v = [x.get(col(axis, pos, j), 0) for j in range(d)]
            if any(c != 0 for c in v):
                per[pos] = v
        coeffs[axis] = per
    corr = CorrectionAssignment(d, coeffs)
    if apply_all(base, basis, corr) != target:
        raise CertificateError("solved corrections do not reproduce the target")
    return corr


def adjoin(T, spec):
    """Tensor with the AdjoinSpec's labelled matrices adjoined on each axis."""
    if spec is None:
        spec = AdjoinSpec()
    if not any(spec.lists()):
        return T
    return _adjoin(T, *spec.lists())


def symmetric_adjoin(T, mats):
    return _symmetric_adjoin(T, mats)


@dataclass
class LowerBound:
    value: int
    independent: int
    residual: int
    equality: bool
    per_axis: dict = field(default_factory=dict)


def _independent_slices(T, axis, positions):
    slices = [(pos, T.slice(axis, pos)) for pos in positions]
    flat = [flatten(S) for _, S in slices]
    ech = Echelon(integer=all_int(flat))
    rank_one = True
    for (pos, S), row in zip(slices, flat):
        if not ech.insert(row):
            raise CertificateError(f"axis-{axis} slice {pos} depends on the earlier named slices")
        if rank_one and matrix_rank(S) != 1:
            rank_one = False
    return len(positions), rank_one


def substitution_lower_bound(T, axis, positions, residual_certificate):
    """k' + certified residual bound; equality flag when every named slice is rank-one."""
    _check_axis(axis)
    positions = list(positions)
    k, rank_one = _independent_slices(T, axis, positions)
    return LowerBound(k + residual_certificate, k, residual_certificate, rank_one, {axis: k})


def chained_lower_bound(T, positions_by_axis, residual_certificate):
    """dim V1 + dim V2 + dim V3 + residual, for independent named slices on each axis."""
    total, eq, per = 0, True, {}
    for axis in AXES:
        positions = list(positions_by_axis.get(axis, ()))
        k, rank_one = _independent_slices(T, axis, positions)
        per[axis] = k
        total += k
        eq = eq and rank_one
    return LowerBound(total + residual_certificate, total, residual_certificate, eq, per)


def _factor(entry):
    if len(entry) >= 3 and entry[2] is not None:
        return entry[0], entry[1], entry[2]
    label, M = entry[0], entry[1]
    return label, M, factor_rank_one(M)


def build_adjoined_decomposition(base_terms, corr, adjoined, check=True):
    """Decomposition of the adjoined tensor from a decomposition of the residual.

    ``adjoined`` holds, per axis, entries (label, matrix) or
    (label, matrix, (u, v)) with matrix = u v^T.  ``corr[axis]`` maps core
    slice positions to coefficients over that axis's adjoined list.  For the
    m-th matrix on axis chi the emitted term has u, v on the other two axes
    and, on axis chi, the corrections of matrix m on core slices and 1 at its
    own label.  The base terms follow, padded with zeros.
    """
    adjoined = [list(m) for m in adjoined]
    if len(adjoined) != 3:
        raise ShapeError("need three adjoined lists")
    core = base_terms.dims
    for a, mats in enumerate(adjoined):
        x, y = [t for t in range(3) if t != a]
        for e in mats:
            if e[1].rows != core[x] or e[1].cols != core[y]:
                raise ShapeError(f"adjoined matrix {e[0]} does not match the core faces")
    dims = tuple(core[a].extend(e[0] for e in adjoined[a]) for a in range(3))
    # transpose corr into per-matrix columns
    columns = [dict() for _ in range(3)]
    for a in range(3):
        for pos in corr.positions(a + 1):
            for m, c in corr.vector(a + 1, pos).items():
                if m >= len(adjoined[a]):
                    raise ShapeError(f"correction refers to matrix {m} beyond axis {a + 1}'s list")
                columns[a].setdefault(m, {})[pos] = c
    terms = []
    for a in range(3):
        x, y = [t for t in range(3) if t != a]
        n = len(core[a])
        for m, e in enumerate(adjoined[a]):
            label, M, (u, v) = _factor(e)
            if SparseMatrix.outer(u, v) != M:
                raise CertificateError(f"factorization of {label} does not reproduce the matrix")
            alpha = dict(columns[a].get(m, {}))
            alpha[n + m] = 1
            vs = [None, None, None]
            vs[a] = SparseVector(dims[a], alpha)
            vs[x] = u.embed(dims[x])
            vs[y] = v.embed(dims[y])
            terms.append(SimpleTensor(*vs))
    for t in base_terms.terms:
        terms.append(t.embed(dims))
    D = Decomposition(dims, terms)
    if check:
        check_adjoined_slices(D, adjoined)
    return D


def check_adjoined_slices(D, adjoined):
    """Every adjoined slice of the sum equals its (padded) matrix."""
    for a, mats in enumerate(adjoined):
        x, y = [t for t in range(3) if t != a]
        n = len(D.dims[a]) - len(mats)
        for m, e in enumerate(mats):
            S = sum_slice(D, a + 1, n + m)
            M = e[1]
            if S.data != M.data:
                raise CertificateError(f"axis-{a + 1} slice {e[0]} of the sum differs from its matrix")
    return True
