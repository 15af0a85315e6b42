from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from comon.counterexample import tensor_A, witness_vectors
from comon.decomposition import Decomposition, SimpleTensor, sum_terms
from comon.errors import CertificateError, ShapeError
from comon.gadgets import w_basis, w_space
from comon.linalg import MatrixSubspace
from comon.sparse import SparseMatrix, SparseTensor, SparseVector
from comon.substitution import (
    AdjoinSpec,
    CorrectionAssignment,
    adjoin,
    apply_all,
    apply_mod,
    build_adjoined_decomposition,
    chained_lower_bound,
    membership_in_E,
    substitution_lower_bound,
    symmetric_adjoin,
)


def E12():
    return SparseMatrix(5, 5, {(0, 1): 1, (1, 0): 1})


def test_zero_correction_is_identity():
    A = tensor_A()
    for axis in (1, 2, 3):
        assert apply_mod(A, axis, [E12()], CorrectionAssignment.zero(1)) == A


def test_mod_slice_four_by_e12():
    A = tensor_A()
    corr = CorrectionAssignment(1, {3: {3: [1]}})
    B = apply_mod(A, 3, [E12()], corr)
    changed = {k: (A.at(*k), B.at(*k)) for k in set(A.data) | set(B.data) if A.at(*k) != B.at(*k)}
    assert changed == {(0, 1, 3): (0, -1), (1, 0, 3): (0, -1)}


def test_apply_all_composes_axes():
    A = tensor_A()
    corr = CorrectionAssignment(5, {1: {0: {4: 1}}, 2: {2: {0: 2}}, 3: {4: {1: -1}}})
    V = w_basis()
    step = A
    for axis in (3, 2, 1):
        step = apply_mod(step, axis, V, corr)
    assert apply_all(A, V, corr) == step


def test_assignment_shape_errors():
    with pytest.raises(ShapeError):
        CorrectionAssignment(2, {1: {0: [1, 2, 3]}})
    with pytest.raises(ShapeError):
        apply_mod(tensor_A(), 1, w_basis(), CorrectionAssignment.zero(3))


def test_membership_of_base_itself():
    A = tensor_A()
    corr = membership_in_E(A, A, w_space())
    assert corr is not None and corr.is_zero()


@given(st.lists(st.integers(-3, 3), min_size=15, max_size=15))
def test_membership_recovers_random_corrections(cs):
    # corrections on slice 1 of every axis with random W-coefficients
    A = tensor_A()
    corr = CorrectionAssignment(5, {a: {0: cs[5 * (a - 1) : 5 * a]} for a in (1, 2, 3)})
    target = apply_all(A, w_basis(), corr)
    found = membership_in_E(target, A, w_space())
    assert found is not None
    assert apply_all(A, w_basis(), found) == target


def _flipped_witness_sum(flip_term=0):
    terms = []
    for n, (x, y, z) in enumerate(witness_vectors()):
        vs = [SparseVector.from_dense(v) for v in (x, y, z)]
        if n == flip_term:
            vs[0] = vs[0].scale(-1)
        terms.append(SimpleTensor(*vs))
    return sum_terms(Decomposition((5, 5, 5), terms))


def _reachable(V):
    """Entries that some axis correction by a W matrix can change."""
    out = set()
    for M in V:
        for (p, q) in M.data:
            for r in range(5):
                out |= {(r, p, q), (p, r, q), (p, q, r)}
    return out


def test_flipped_witness_is_not_a_member():
    flipped = _flipped_witness_sum()
    assert membership_in_E(flipped, tensor_A(), w_space()) is None
    # independent reason: it differs from A somewhere no correction reaches
    A = tensor_A()
    reach = _reachable(w_basis())
    unreachable = [k for k in product(range(5), repeat=3) if k not in reach and flipped.at(*k) != A.at(*k)]
    assert unreachable


def test_adjoin_nothing():
    A = tensor_A()
    assert adjoin(A, AdjoinSpec()) is A
    assert adjoin(A, None) is A


def test_symmetric_adjoin_small():
    T = SparseTensor.zeros((2, 2, 2))
    M = SparseMatrix(2, 2, {(0, 1): 1, (1, 0): 1})
    S = symmetric_adjoin(T, [(3, M)])
    assert S.shape == (3, 3, 3)
    assert S.is_symmetric()
    assert S.at(2, 0, 1) == S.at(0, 2, 1) == S.at(1, 0, 2) == 1
    assert S.at(2, 2, 0) == 0


def test_lower_bound_with_no_named_slices():
    assert substitution_lower_bound(tensor_A(), 3, [], 4).value == 4


def test_lower_bound_two_by_two():
    # e1 x e1 x e1 + e2 x e2 x e2: its two 3-slices are independent and rank one
    T = SparseTensor((2, 2, 2), {(0, 0, 0): 1, (1, 1, 1): 1})
    lb = substitution_lower_bound(T, 3, [0, 1], 0)
    assert lb.value == 2 and lb.equality
    # brute force: no single simple tensor with small integer entries equals T
    rng = range(-1, 2)
    for a in product(rng, repeat=2):
        for b in product(rng, repeat=2):
            for c in product(rng, repeat=2):
                simple = {(i, j, k): a[i] * b[j] * c[k] for i, j, k in product(range(2), repeat=3)}
                assert any(simple[k] != T.at(*k) for k in simple)


def test_lower_bound_rejects_dependent_slices():
    T = SparseTensor((2, 2, 2), {(0, 0, 0): 1, (0, 0, 1): 2})
    with pytest.raises(CertificateError):
        substitution_lower_bound(T, 3, [0, 1], 0)


def test_chained_bound_counts_every_axis():
    T = SparseTensor((2, 2, 2), {(0, 0, 0): 1, (1, 1, 1): 1})
    lb = chained_lower_bound(T, {1: [0], 2: [1], 3: []}, 0)
    assert lb.value == 2 and lb.per_axis == {1: 1, 2: 1, 3: 0}


def test_builder_without_adjoined_matrices():
    base = Decomposition((1, 1, 1), [SimpleTensor(*(SparseVector.from_dense([2]),) * 3)])
    D = build_adjoined_decomposition(base, CorrectionAssignment.zero(0), [[], [], []])
    assert len(D) == 1 and sum_terms(D).at(0, 0, 0) == 8


def test_builder_toy_three_terms():
    base = Decomposition((1, 1, 1), [])
    one = SparseMatrix(1, 1, {(0, 0): 1})
    adj = [[(2, one)], [(2, one)], [(2, one)]]
    D = build_adjoined_decomposition(base, CorrectionAssignment.zero(1), adj)
    assert len(D) == 3
    expect = adjoin(SparseTensor.zeros((1, 1, 1)), AdjoinSpec(*adj)).materialize()
    got = sum_terms(D)
    for k in product(range(2), repeat=3):
        assert got.at(*k) == expect.at(*k)
    assert {k for k in product(range(2), repeat=3) if got.at(*k)} == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}


def test_builder_with_corrections_matches_modded_core():
    # one adjoined matrix per axis, corrections c on the core slice: the
    # core of the sum must be base + sum of corrections (the residual plus V-part)
    base_vecs = [SparseVector.from_dense([1, 1])] * 3
    base = Decomposition((2, 2, 2), [SimpleTensor(*base_vecs)])
    M = SparseMatrix(2, 2, {(0, 0): 1})
    adj = [[(3, M)], [(3, M)], [(3, M)]]
    corr = CorrectionAssignment(1, {1: {1: [2]}, 2: {0: [-1]}, 3: {}})
    D = build_adjoined_decomposition(base, corr, adj)
    S = sum_terms(D)
    residual = sum_terms(base)
    expect = apply_all(residual, MatrixSubspace([M]), CorrectionAssignment(1, {a: {p: [-c[0]] for p, c in corr.coeffs.get(a, {}).items()} for a in (1, 2, 3)}))
    for k in product(range(2), repeat=3):
        assert S.at(*k) == expect.at(*k)
