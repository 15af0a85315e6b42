from fractions import Fraction
from itertools import product

import pytest

from comon import counterexample as X
from comon import gadgets as G
from comon.decomposition import Decomposition, SimpleTensor, normalize_against_rank_one_slices, sum_slice, sum_terms
from comon.errors import PreconditionError, VerificationFailure
from comon.indices import CoreIndex, GadgetId, extended_index_set
from comon.lazy import clone
from comon.linalg import matrix_rank
from comon.scalar import I, SQRT2, SQRT3, coords_of
from comon.sparse import SparseMatrix, SparseTensor, SparseVector
from comon.substitution import apply_all
from oracles import dense_rank


@pytest.fixture(scope="module")
def D903():
    return X.build_903()


# -- kernel and the big tensor ---------------------------------------------------


def test_kernel_entries():
    A = X.tensor_A()
    assert A.get_label(5, 1, 1) == 1
    assert A.get_label(4, 4, 2) == 2
    assert A.get_label(1, 1, 1) == 0
    assert A.nnz == 33


def test_big_tensor_entries():
    S = X.tensor_S()
    assert S.shape == (800, 800, 800)
    assert S.dims[0] == extended_index_set()
    assert S.get_label(CoreIndex(5, 7), CoreIndex(1, 3), CoreIndex(1, 9)) == 1
    g = GadgetId("12", "L", 1)
    M = G.gadget_matrix(g)
    for (p, q), v in list(M.data.items())[:50]:
        assert S.at(500, p, q) == v
        assert S.at(p, 500, q) == v
    assert S.get_label(g, g, CoreIndex(1, 1)) == 0
    assert S.get_label(g, GadgetId("45", "V", 3), CoreIndex(4, 4)) == 0
    assert S.is_symmetric()


# -- witness -------------------------------------------------------------------------


def test_witness_values():
    (a, _, c), _, (f, g, _) = X.witness_vectors()
    assert a[3] == -SQRT2 / 2
    assert f[3] == I * SQRT3 / 3
    assert c == [-1, 1, -3, 0, 1] and g == [1, -2, 4, 0, 1]


def test_witness_membership():
    corr = X.verify_witness_membership()
    assert corr.dim == 5
    assert apply_all(X.tensor_A(), G.w_basis(), corr) == X.witness_sum()


def test_witness_sum_has_rank_three_slices():
    E = X.witness_sum()
    rows = []
    for r in range(5):
        S = E.slice(3, r)
        rows.append([S[(p, q)] for p in range(5) for q in range(5)])
    # three independent 3-slices, checked coordinate-wise over Q
    real = [[x for v in row for x in coords_of(v)] for row in rows]
    assert dense_rank(real) == 3
    assert X.residual_rank3_certificate(E) == 3


def test_altered_last_entry_breaks_membership():
    terms = list(X.witness().terms.terms)
    t = terms[-1]
    c = dict(t.c.data)
    c[4] = c.get(4, 0) + 1
    terms[-1] = t.with_vector(3, SparseVector(5, c))
    bad = sum_terms(Decomposition((5, 5, 5), terms))
    with pytest.raises(VerificationFailure):
        X.verify_witness_membership(bad)


def test_residual_certificate_examples():
    assert X.residual_rank3_certificate(SparseTensor.zeros((3, 3, 3))) == 0
    v = SparseVector.from_dense([1, 2, 0])
    assert X.residual_rank3_certificate(SimpleTensor(v, v, v).to_tensor()) == 1
    assert X.residual_rank3_certificate(clone(X.witness_sum(), 100)) == 3


# -- the 903-term decomposition --------------------------------------------------------


def test_term_count(D903):
    assert len(D903) == 903 == 3 * 300 + 3


def test_gadget_term_coefficients(D903):
    corr = X.verify_witness_membership()
    lifted = X.lift_corrections(corr)
    # terms 600..899 are the axis-3 gadget terms in canonical id order
    g = GadgetId("12", "L", 1)
    t = D903.terms[600]
    alpha = t.c
    assert alpha.get_label(g) == 1
    for layer in range(1, 6):
        vals = {alpha.get_label(CoreIndex(layer, c)) for c in range(1, 101)}
        assert len(vals) == 1
    # core coefficients equal the lifted corrections for matrix 0
    col = {p: v.get(0, 0) for p, v in ((p, lifted.vector(3, p)) for p in range(500))}
    assert {p: alpha[p] for p in range(500)} == col
    w = G.gadget_factor(g)
    assert t.a.data == w.data and t.b.data == w.data


def test_lifted_corrections_are_clone_lifts(D903):
    corr = X.verify_witness_membership()
    lifted = X.lift_corrections(corr)
    ids = [g for g, _ in G.basis_B()]
    for axis in (1, 2, 3):
        for k in range(5):
            w = sum((M.scale(c) for c, M in zip(corr.dense(axis, k), G.w_basis()) if c != 0), SparseMatrix.zeros(5, 5))
            expect = {ids.index(g): c for g, c in G.clone_lift(w).items()}
            for copy in (0, 42, 99):
                assert lifted.vector(axis, k * 100 + copy) == expect


def test_adjoined_slices_of_sum(D903):
    for pos, (g, M) in [(500, G.basis_B()[0]), (799, G.basis_B()[299])]:
        S = sum_slice(D903, 3, pos)
        assert S.data == M.data


def test_each_adjoined_slice_has_one_owner(D903):
    for axis in (1, 2, 3):
        for pos in range(500, 800):
            owners = [u for u, t in enumerate(D903.terms) if t.vectors[axis - 1][pos] != 0]
            assert len(owners) == 1


def test_normalization_keeps_owners_and_sum(D903):
    E, owners = normalize_against_rank_one_slices(D903, 3, range(500, 800))
    assert sorted(owners.values()) == list(range(600, 900))
    assert X.verify_903(E, mode="freivalds", seed=5, trials=2).ok


def test_removing_a_term_fails(D903):
    for drop in (0, 450, 902):
        terms = D903.terms[:drop] + D903.terms[drop + 1 :]
        r = X.verify_903(Decomposition(D903.dims, terms), mode="freivalds", seed=2, trials=2)
        assert not r.ok


def test_perturbing_a_term_fails(D903):
    terms = list(D903.terms)
    t = terms[901]
    terms[901] = t.with_vector(1, t.a.scale(2))
    r = X.verify_903(Decomposition(D903.dims, terms), mode="freivalds", seed=2, trials=2)
    assert not r.ok


def test_unknown_mode(D903):
    with pytest.raises(ValueError):
        X.verify_903(D903, mode="fast")


# -- lower-bound pieces -------------------------------------------------------------------


def test_F_structure_examples():
    E = X.witness_sum()
    assert E.at(0, 0, 4) == 1
    assert E.at(4, 4, 4) == 0
    F = SparseMatrix(4, 4, {(p, q): E.at(i - 1, j - 1, 4) for p, i in enumerate(X.F_INDEX) for q, j in enumerate(X.F_INDEX)})
    assert matrix_rank(F) == 1
    rep = X.check_F_structure()
    assert rep.ok and set(rep.items) == {"3.1", "3.2", "3.3", "3.4"}


def test_F_structure_holds_on_kernel_too():
    assert X.check_F_structure(X.tensor_A()).ok


@pytest.mark.parametrize("key,item", [((4, 4, 4), "3.1"), ((0, 0, 4), "3.2"), ((0, 1, 4), "3.3")])
def test_F_structure_detects_perturbation(key, item):
    E = X.witness_sum()
    bad = SparseTensor(E.dims, {**E.data, key: E.at(*key) + 3})
    rep = X.check_F_structure(bad, raise_on_failure=False)
    assert not rep.items[item][0]


def test_kernel_entries_differ():
    ok, vals = X.kernel_entries_pairwise_different()
    assert ok and vals == [1, 2, 0]


# -- pencil certificate --------------------------------------------------------------------


def _known_rank(a, b, point):
    al, be, ga = point
    T1, T2, T3 = X.pencil_slices(a, b, 0, 1)
    M = [[al * T1[r][c] + be * T2[r][c] + ga * T3[r][c] for c in range(3)] for r in range(3)]
    return dense_rank(M)


def _proportional(p, q):
    return all(p[i] * q[j] == p[j] * q[i] for i in range(3) for j in range(3))


def test_pencil_example_opposite_signs():
    c = X.pencil_rank4_certificate(1, -1, 0, 1)
    assert sorted(c.locus) == sorted([(Fraction(0), Fraction(0), Fraction(1)), (Fraction(-2), Fraction(2), Fraction(1))])
    assert c.span_dim == 2 and c.independent and c.ok


def test_pencil_example_equal_signs():
    c = X.pencil_rank4_certificate(1, 1, 0, 1)
    assert c.locus == [(0, 0, 1)]
    assert c.span_dim == 1 and c.ok


def test_pencil_precondition():
    with pytest.raises(PreconditionError):
        X.pencil_rank4_certificate(1, 1, Fraction(3, 2), Fraction(3, 2))
    with pytest.raises(PreconditionError):
        X.pencil_rank4_certificate(2, 1, 0, 1)


@pytest.mark.parametrize("a,b", [(1, 1), (1, -1), (-1, 1), (-1, -1)])
def test_pencil_locus_against_grid(a, b):
    locus = X.pencil_locus(a, b)
    for p in locus:
        assert _known_rank(a, b, p) <= 1
    # every rank <= 1 grid point is a multiple of a reported point
    for p in product(range(-4, 5), repeat=3):
        if p == (0, 0, 0) or _known_rank(a, b, p) > 1:
            continue
        assert any(_proportional(p, q) for q in locus), p


def test_sampled_pairs_are_distinct_and_deterministic():
    pairs = X.sample_pairs(20, 7)
    assert pairs == X.sample_pairs(20, 7)
    assert all(x != y for x, y in pairs)


# -- span identity ---------------------------------------------------------------------------


def _identity_sides(a, b, x, y):
    Mxy, M10, M01, M11 = (X._M(a, b, *p) for p in ((x, y), (1, 0), (0, 1), (1, 1)))
    n = len(a)
    lhs = [[(x + y) * Mxy[i][j] for j in range(n)] for i in range(n)]
    rhs = [
        [(x * x - x * y) * M10[i][j] + (y * y - x * y) * M01[i][j] + 2 * x * y * M11[i][j] for j in range(n)]
        for i in range(n)
    ]
    return lhs, rhs, M10, M11


def test_span_identity_fixed_points():
    a = [Fraction(1), Fraction(2), Fraction(-1)]
    b = [Fraction(1), Fraction(0), Fraction(3)]
    lhs, rhs, M10, M11 = _identity_sides(a, b, 1, 0)
    assert lhs == rhs == M10 == X.rank_one_with_first_row(a)
    lhs, rhs, M10, M11 = _identity_sides(a, b, 1, 1)
    assert lhs == rhs == [[2 * v for v in row] for row in M11]


def test_span_identity_random():
    r = X.symmetric_span_identity_check(trials=100, seed=0)
    assert r.ok and r.trials == 100
