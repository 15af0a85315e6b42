"""The 20-part partition, the cyclic-shift gadget matrices and their spans.

Copies are numbered 1..100 for users and stored at positions 0..99.  The
partition lives at block resolution (a 10x10 grid of labels) and is expanded
by a factor of ten when vectors are built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConstructionError, MembershipError, PropertyViolation
from .indices import (
    KINDS,
    N_BLOCKS,
    STAR_LAYERS,
    STAR_SHIFT,
    STARS,
    CoreIndex,
    GadgetId,
    IndexSet,
    core_index_set,
    gadget_ids,
)
from .lazy import clone_matrix
from .linalg import MatrixSubspace, matrix_rank, nullspace, span_dim
from .sparse import SparseMatrix, SparseVector, matmul

SIGMA = 100
BLOCK = 10
N_LAYERS = 5

PARTITION_GRID = (
    (1, 1, 1, 11, 9, 9, 9, 10, 10, 10),
    (1, 1, 1, 2, 2, 2, 12, 10, 10, 10),
    (1, 1, 1, 2, 2, 2, 3, 3, 3, 13),
    (4, 4, 14, 2, 2, 2, 3, 3, 3, 4),
    (4, 4, 5, 5, 5, 15, 3, 3, 3, 4),
    (4, 4, 5, 5, 5, 6, 6, 6, 16, 4),
    (7, 17, 5, 5, 5, 6, 6, 6, 7, 7),
    (7, 8, 8, 8, 18, 6, 6, 6, 7, 7),
    (7, 8, 8, 8, 9, 9, 9, 19, 7, 7),
    (20, 8, 8, 8, 9, 9, 9, 10, 10, 10),
)


# -- partition -------------------------------------------------------------


@dataclass(frozen=True)
class PartitionSpec:
    grid: tuple = PARTITION_GRID

    def cell(self, r, c):
        """Label at block row r, block column c (both 1-based)."""
        return self.grid[r - 1][c - 1]

    def cells(self, label):
        return frozenset((r + 1, c + 1) for r, row in enumerate(self.grid) for c, x in enumerate(row) if x == label)

    def rows(self, label):
        return frozenset(r for r, _ in self.cells(label))

    def cols(self, label):
        return frozenset(c for _, c in self.cells(label))

    def validate(self):
        if len(self.grid) != 10 or any(len(r) != 10 for r in self.grid):
            raise ConstructionError("partition grid must be 10x10")
        for i in range(1, N_BLOCKS + 1):
            cells = self.cells(i)
            rows, cols = self.rows(i), self.cols(i)
            if cells != {(r, c) for r in rows for c in cols}:
                raise ConstructionError(f"part {i} is not a submatrix")
            want = 3 if i <= 10 else 1
            if len(rows) != want or len(cols) != want:
                raise ConstructionError(f"part {i} has shape {len(rows)}x{len(cols)}")
        labels = {x for row in self.grid for x in row}
        if labels != set(range(1, N_BLOCKS + 1)):
            raise ConstructionError("grid labels must be exactly 1..20")
        return True


def partition_spec():
    return PartitionSpec()


@dataclass
class PartitionReport:
    subsets: int
    qualifying: list
    ok: bool


def _bits(s):
    return sum(1 << (x - 1) for x in s)


def _is_submatrix_cells(spec, labels):
    cells = set().union(*(spec.cells(i) for i in labels))
    rows = {r for r, _ in cells}
    cols = {c for _, c in cells}
    return cells == {(r, c) for r in rows for c in cols}


def qualifying_subsets(spec=None):
    """All nonempty label subsets whose union of parts is a submatrix.

    Subset masks are enumerated by doubling: entries [2^k, 2^(k+1)) are the
    entries [0, 2^k) with part k+1 added.  Parts are disjoint and the union
    always lies inside rows x cols, so it equals rows x cols exactly when the
    cell counts agree.
    """
    spec = spec or partition_spec()
    n = N_BLOCKS
    rmask = [_bits(spec.rows(i)) for i in range(1, n + 1)]
    cmask = [_bits(spec.cols(i)) for i in range(1, n + 1)]
    size = [len(spec.cells(i)) for i in range(1, n + 1)]
    R = np.zeros(1 << n, dtype=np.uint16)
    C = np.zeros(1 << n, dtype=np.uint16)
    S = np.zeros(1 << n, dtype=np.int16)
    for k in range(n):
        lo = 1 << k
        np.bitwise_or(R[:lo], rmask[k], out=R[lo : 2 * lo])
        np.bitwise_or(C[:lo], cmask[k], out=C[lo : 2 * lo])
        np.add(S[:lo], size[k], out=S[lo : 2 * lo])
    pop = np.array([bin(x).count("1") for x in range(1 << 10)], dtype=np.int16)
    hit = S == pop[R] * pop[C]
    hit[0] = False
    masks = np.nonzero(hit)[0]
    return [tuple(i + 1 for i in range(n) if m >> i & 1) for m in masks.tolist()]


def verify_partition_property(spec=None):
    """Exhaustive check that only singletons and the full set give submatrices."""
    spec = spec or partition_spec()
    spec.validate()
    found = qualifying_subsets(spec)
    for s in found:
        if not _is_submatrix_cells(spec, s):
            raise PropertyViolation(f"count test and cell test disagree on {s}", s)
    expected = [s for s in found if len(s) in (1, N_BLOCKS)]
    extra = [s for s in found if len(s) not in (1, N_BLOCKS)]
    if extra:
        raise PropertyViolation(f"subset {extra[0]} forms a submatrix", extra[0])
    if len(expected) != N_BLOCKS + 1:
        raise PropertyViolation(f"expected 21 qualifying subsets, found {len(expected)}", found)
    return PartitionReport((1 << N_BLOCKS) - 1, found, True)


# -- vectors and shifts ----------------------------------------------------


def _expand(blocks):
    return [k for b in sorted(blocks) for k in range((b - 1) * BLOCK, b * BLOCK)]


@lru_cache(maxsize=None)
def base_support(i):
    """0-based positions of supp(u_i), supp(v_i)."""
    spec = partition_spec()
    return tuple(_expand(spec.rows(i))), tuple(_expand(spec.cols(i)))


def base_vectors(i):
    """(u_i, v_i) as 0/1 SparseVectors over copies 1..100."""
    us, vs = base_support(i)
    idx = IndexSet.range(SIGMA)
    return SparseVector(idx, dict.fromkeys(us, 1)), SparseVector(idx, dict.fromkeys(vs, 1))


def shift_positions(positions, a):
    """Support of C^(-a) x given the support of x: (C^(-a) x)_k = x_(k-a)."""
    return tuple(sorted((p + a) % SIGMA for p in positions))


@lru_cache(maxsize=None)
def cyclic_permutation(power=1):
    """C^power with C = E_12 + E_23 + ... + E_100,1, so (C x)_k = x_(k+1)."""
    idx = IndexSet.range(SIGMA)
    return SparseMatrix(idx, idx, {(k, (k + power) % SIGMA): 1 for k in range(SIGMA)})


def shifted_blocks(i, a):
    """(U^i(a), V^i(a), L^i(a)) computed as literal conjugations by C^a."""
    u, v = base_vectors(i)
    Cm, Cp = cyclic_permutation(-a), cyclic_permutation(a)
    out = []
    for x, y in ((u, u), (v, v), (u, v)):
        out.append(matmul(matmul(Cm, SparseMatrix.outer(x, y)), Cp))
    return tuple(out)


# -- gadget matrices -------------------------------------------------------


def _layer_positions(layer, copies):
    base = (layer - 1) * SIGMA
    return [base + c for c in copies]


@lru_cache(maxsize=None)
def gadget_support(gid):
    """0-based core positions of the 0/1 factor w with gadget = w w^T."""
    a = STAR_SHIFT[gid.star]
    us, vs = base_support(gid.block)
    us, vs = shift_positions(us, a), shift_positions(vs, a)
    layers = STAR_LAYERS[gid.star]
    u_layers, v_layer = layers[:-1], layers[-1]
    pos = []
    if gid.kind in ("L", "U"):
        for l in u_layers:
            pos += _layer_positions(l, us)
    if gid.kind in ("L", "V"):
        pos += _layer_positions(v_layer, vs)
    return tuple(sorted(pos))


def gadget_factor(gid):
    return SparseVector(core_index_set(), dict.fromkeys(gadget_support(gid), 1))


def _place(data, M, lr, lc):
    ro, co = (lr - 1) * SIGMA, (lc - 1) * SIGMA
    for (p, q), x in M.data.items():
        data[(ro + p, co + q)] = x


def gadget_matrix(gid):
    """The 500x500 gadget, assembled block by block from the shifted blocks."""
    U, V, L = shifted_blocks(gid.block, STAR_SHIFT[gid.star])
    layers = STAR_LAYERS[gid.star]
    u_layers, v_layer = layers[:-1], layers[-1]
    data = {}
    if gid.kind in ("L", "U"):
        for p in u_layers:
            for q in u_layers:
                _place(data, U, p, q)
    if gid.kind in ("L", "V"):
        _place(data, V, v_layer, v_layer)
    if gid.kind == "L":
        LT = L.transpose()
        for p in u_layers:
            _place(data, L, p, v_layer)
            _place(data, LT, v_layer, p)
    idx = core_index_set()
    return SparseMatrix(idx, idx, data)


@lru_cache(maxsize=None)
def _basis():
    return tuple((g, gadget_matrix(g)) for g in gadget_ids())


def basis_B():
    """The 300 gadget matrices as (GadgetId, matrix) in canonical id order."""
    return list(_basis())


def star_ids(star):
    return [g for g in gadget_ids() if g.star == star]


def star_basis(star):
    return [(g, M) for g, M in _basis() if g.star == star]


def verify_dim_L():
    d = span_dim(M for _, M in _basis())
    if d != len(gadget_ids()):
        raise ConstructionError(f"gadget span has dimension {d}, expected 300")
    return d


def star_span_dims():
    return {s: span_dim(M for _, M in star_basis(s)) for s in STARS}


def rank_one_report():
    """(id, symmetric, rank) for every gadget."""
    return [(g, M.is_symmetric(), matrix_rank(M)) for g, M in _basis()]


# -- clone locus -----------------------------------------------------------


@dataclass
class CloneLocus:
    star: str
    ids: list
    basis: list  # nullspace vectors as {coefficient position: value}
    line: list = field(default_factory=list)  # normalized generator, one value per id

    @property
    def dim(self):
        return len(self.basis)

    def combine(self, coeffs=None):
        coeffs = self.line if coeffs is None else coeffs
        mats = dict(star_basis(self.star))
        idx = core_index_set()
        out = SparseMatrix(idx, idx)
        for g, c in zip(self.ids, coeffs):
            if c != 0:
                out = out + mats[g].scale(c)
        return out


def expected_line(star):
    return [1 if g.kind == "L" else -1 for g in star_ids(star)]


def is_block_clone(M, sigma=SIGMA):
    """True when M is constant on every sigma x sigma block."""
    nr, nc = M.shape
    seen = {}
    for (p, q), v in M.data.items():
        key = (p // sigma, q // sigma)
        if seen.setdefault(key, v) != v:
            return False
    counts = {}
    for (p, q) in M.data:
        key = (p // sigma, q // sigma)
        counts[key] = counts.get(key, 0) + 1
    return all(c == sigma * sigma for c in counts.values())


def clone_conditions(star):
    """Linear constraints on the 60 coefficients that make the combination a clone."""
    ids = star_ids(star)
    mats = dict(star_basis(star))
    coord = {}
    for j, g in enumerate(ids):
        for key, v in mats[g].data.items():
            coord.setdefault(key, {})[j] = v
    per_block = {}
    for (p, q), sig in coord.items():
        blk = (p // SIGMA, q // SIGMA)
        d = per_block.setdefault(blk, [0, set()])
        d[0] += 1
        d[1].add(tuple(sorted(sig.items())))
    rows = []
    for blk in sorted(per_block):
        count, sigs = per_block[blk]
        sigs = sorted(sigs)
        if count < SIGMA * SIGMA:
            sigs = [()] + sigs
        ref = dict(sigs[0])
        for s in sigs[1:]:
            r = dict(s)
            for j, v in ref.items():
                r[j] = r.get(j, 0) - v
            r = {j: v for j, v in r.items() if v != 0}
            if r:
                rows.append(r)
    return ids, rows


def clone_locus(star):
    ids, rows = clone_conditions(star)
    basis = nullspace(rows, len(ids))
    exp = expected_line(star)
    locus = CloneLocus(star, ids, basis)
    if len(basis) != 1:
        raise PropertyViolation(f"clone locus of star {star} has dimension {len(basis)}", basis)
    vec = basis[0]
    j0 = ids.index(next(g for g in ids if g.kind == "L"))
    scale = vec.get(j0, 0)
    if scale == 0:
        raise PropertyViolation(f"clone locus of star {star} misses the Lambda coefficient", vec)
    line = [vec.get(j, 0) / scale for j in range(len(ids))]
    if line != exp:
        raise PropertyViolation(f"clone locus of star {star} is not the signed line", line)
    locus.line = [int(x) for x in line]
    return locus


# -- W span and lifting ----------------------------------------------------


def _sym_unit(pairs, n=N_LAYERS):
    data = {}
    for i, j in pairs:
        data[(i - 1, j - 1)] = 1
        data[(j - 1, i - 1)] = 1
    return SparseMatrix(n, n, data)


W_STARS = ("12", "13", "23", "1234", "45")


def w_basis():
    """Spanning matrices of W, in the order used for correction coefficients."""
    return [
        _sym_unit([(1, 2)]),
        _sym_unit([(1, 3)]),
        _sym_unit([(2, 3)]),
        _sym_unit([(1, 4), (2, 4), (3, 4)]),
        _sym_unit([(4, 5)]),
    ]


@lru_cache(maxsize=None)
def w_space():
    return MatrixSubspace(w_basis())


def clone_lift(w):
    """Coefficients over the gadget basis whose combination is clone(w)."""
    coeffs = w_space().coefficients(w)
    if coeffs is None:
        raise MembershipError("matrix is not in the span of W")
    out = {}
    for star, c in zip(W_STARS, coeffs):
        if c == 0:
            continue
        for g in star_ids(star):
            out[g] = c if g.kind == "L" else -c
    return out


def combine_gadgets(coeffs):
    idx = core_index_set()
    mats = dict(_basis())
    data = {}
    for g, c in coeffs.items():
        for k, v in mats[g].data.items():
            data[k] = data.get(k, 0) + c * v
    return SparseMatrix(idx, idx, data)


def cloned(w):
    return clone_matrix(w, SIGMA)


# -- rank-one members ------------------------------------------------------


@lru_cache(maxsize=None)
def triple_space(star, block):
    mats = dict(star_basis(star))
    return MatrixSubspace([mats[GadgetId(star, k, block)] for k in KINDS])


def is_in_D(M, star):
    """M is rank-one and lies in span{Lambda^i, U^i, V^i} for some block i."""
    if matrix_rank(M) != 1:
        return False
    rows = {p // SIGMA for p in M.row_support()} | {q // SIGMA for q in M.col_support()}
    if not rows <= {l - 1 for l in STAR_LAYERS[star]}:
        return False
    return any(M in triple_space(star, i) for i in range(1, N_BLOCKS + 1))


@lru_cache(maxsize=None)
def star_space(star):
    return MatrixSubspace([M for _, M in star_basis(star)])


def representative_positions(star):
    """One core position per distinct nonzero row of the two-layer star's span."""
    layers = STAR_LAYERS[star]
    if len(layers) != 2:
        raise ValueError("reduction is defined for two-layer stars")
    a = STAR_SHIFT[star]
    reps = []
    for l in layers:
        for t in range(BLOCK):
            reps.append((l - 1) * SIGMA + (BLOCK * t + a) % SIGMA)
    return reps


def _row_class(star):
    """Map every core position of the star to its representative (or None)."""
    layers = STAR_LAYERS[star]
    a = STAR_SHIFT[star]
    cls = {}
    for n, l in enumerate(layers):
        for k in range(SIGMA):
            t = ((k - a) % SIGMA) // BLOCK
            cls[(l - 1) * SIGMA + k] = n * BLOCK + t
    return cls


def reduce_B_prime(M, star="12"):
    """The 20x20 matrix left after removing zero and repeated rows and columns."""
    if M not in star_space(star):
        raise MembershipError(f"matrix is not in the span of the {star} gadgets")
    reps = representative_positions(star)
    cls = _row_class(star)
    R = {}
    for (p, q), v in M.data.items():
        if p not in cls or q not in cls:
            raise MembershipError("entry outside the star's layers")
        key = (cls[p], cls[q])
        if (p, q) == (reps[key[0]], reps[key[1]]):
            R[key] = v
    # every entry must agree with its representative
    for (p, q), v in M.data.items():
        if R.get((cls[p], cls[q]), 0) != v:
            raise MembershipError("rows of the matrix are not constant on their classes")
    return SparseMatrix(2 * BLOCK, 2 * BLOCK, R)


def alpha_beta(i):
    """0/1 vectors of length 10 marking the block rows and columns of part i."""
    spec = partition_spec()
    alpha = [1 if r in spec.rows(i) else 0 for r in range(1, BLOCK + 1)]
    beta = [1 if c in spec.cols(i) else 0 for c in range(1, BLOCK + 1)]
    return alpha, beta


def on_conic(x, y, z):
    """x Lambda + y U + z V (one block) has rank <= 1 iff this holds."""
    return (x + y) * (x + z) == x * x


# -- structural zeros ------------------------------------------------------


def far_apart(c1, c2, sigma=SIGMA):
    return 30 <= (c1 - c2) % sigma <= 70


@dataclass
class ZeroCheck:
    name: str
    ok: bool
    checked: int
    witness: tuple | None = None


@dataclass
class StructuralZeroReport:
    checks: list
    matrices: int

    @property
    def ok(self):
        return all(c.ok for c in self.checks)


def _lc(p):
    return p // SIGMA + 1, p % SIGMA + 1


def structural_zero_report(raise_on_failure=True):
    """Scan all gadget entries for the vanishing and equality patterns."""
    mats = _basis()
    near_same = ZeroCheck("same-layer-far-apart", True, 0)
    five_low = ZeroCheck("layer5-vs-layers123", True, 0)
    five_five = ZeroCheck("layer5-far-apart", True, 0)
    spot = ZeroCheck("L(4,33|4,66)", True, 0)
    rows_eq = ZeroCheck("rows-(j,1)-agree-on-layer4", True, 0)
    low_five = ZeroCheck("layers12-vs-layer5-far-apart", True, 0)
    symm = ZeroCheck("symmetric", True, 0)
    p33, p66 = 3 * SIGMA + 32, 3 * SIGMA + 65
    for g, M in mats:
        d = M.data
        for (p, q), v in d.items():
            (lp, cp), (lq, cq) = _lc(p), _lc(q)
            if lp == lq and far_apart(cp, cq):
                if lp == 5:
                    five_five.ok, five_five.witness = False, five_five.witness or (str(g), p, q, v)
                near_same.ok, near_same.witness = False, near_same.witness or (str(g), p, q, v)
            if (lp == 5 and lq in (1, 2, 3)) or (lq == 5 and lp in (1, 2, 3)):
                five_low.ok, five_low.witness = False, five_low.witness or (str(g), p, q, v)
                if far_apart(cp, cq) and {lp, lq} & {1, 2}:
                    low_five.ok, low_five.witness = False, low_five.witness or (str(g), p, q, v)
        for c in (near_same, five_low, five_five, low_five):
            c.checked += 1
        if d.get((p33, p66), 0) != 0:
            spot.ok, spot.witness = False, spot.witness or (str(g), p33, p66, d[(p33, p66)])
        spot.checked += 1
        for t in range(SIGMA):
            q = 3 * SIGMA + t
            vals = [d.get((j * SIGMA, q), 0) for j in range(3)]
            if len(set(vals)) != 1:
                rows_eq.ok, rows_eq.witness = False, rows_eq.witness or (str(g), t + 1, tuple(vals))
        rows_eq.checked += 1
        if not M.is_symmetric():
            symm.ok, symm.witness = False, symm.witness or (str(g),)
        symm.checked += 1
    report = StructuralZeroReport([near_same, five_low, five_five, spot, rows_eq, low_five, symm], len(mats))
    if raise_on_failure and not report.ok:
        bad = next(c for c in report.checks if not c.ok)
        raise PropertyViolation(f"structural identity {bad.name} fails", bad.witness)
    return report
