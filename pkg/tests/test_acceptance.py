"""Acceptance criteria, one test each, at their stated tolerances.

Every test records a line ``ACCEPTANCE <n> <PASS|FAIL> <name> ...``; the
lines are printed in the pytest terminal summary (see conftest.py).
"""

import functools
import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import pytest

from comon import counterexample as X
from comon import gadgets as G
from comon.indices import STARS
from comon.substitution import membership_in_E

RESULTS = []


def criterion(number, name, limit=None):
    """Record PASS/FAIL for one criterion; ``limit`` is a runtime bound in seconds."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                detail = fn(*args, **kwargs) or ""
                elapsed = time.perf_counter() - t0
                if limit is not None:
                    assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"
            except BaseException as e:
                elapsed = time.perf_counter() - t0
                RESULTS.append(f"ACCEPTANCE {number} FAIL {name} {elapsed:.1f}s: {e}")
                raise
            RESULTS.append(f"ACCEPTANCE {number} PASS {name} {elapsed:.1f}s {detail}".rstrip())

        return run

    return wrap


@pytest.fixture(scope="module")
def D903():
    return X.build_903()


@criterion(1, "partition-property", limit=60)
def test_partition_property():
    rep = G.verify_partition_property()
    assert rep.subsets == 2**20 - 1
    assert len(rep.qualifying) == 21
    assert all(len(s) in (1, 20) for s in rep.qualifying)
    return "qualifying=21"


@criterion(2, "basis-dimension", limit=300)
def test_basis_dimension():
    assert G.verify_dim_L() == 300
    dims = G.star_span_dims()
    assert dims == {s: 60 for s in STARS}
    return "dim=300 stars=60"


@criterion(3, "rank-one")
def test_rank_one():
    rep = G.rank_one_report()
    assert len(rep) == 300
    assert all(sym for _, sym, _ in rep)
    assert all(r == 1 for _, _, r in rep)
    return "matrices=300"


@criterion(4, "clone-locus")
def test_clone_locus():
    for s in STARS:
        loc = G.clone_locus(s)
        assert loc.dim == 1
        assert loc.line == [1 if g.kind == "L" else -1 for g in loc.ids]
    return "stars=5"


@criterion(5, "witness-membership", limit=10)
def test_witness_membership():
    corr = membership_in_E(X.witness_sum(), X.tensor_A(), G.w_space())
    assert corr is not None
    assert corr.dim == 5
    return "unknowns=75"


@criterion(6, "upper-bound-exact", limit=600)
def test_upper_bound_exact(D903):
    assert len(D903) == 903
    r = X.verify_903(D903, mode="exact")
    assert r.ok, r.detail
    return f"terms=903 representatives={r.representatives}"


@criterion(6, "upper-bound-freivalds", limit=60)
def test_upper_bound_freivalds(D903):
    r = X.verify_903(D903, mode="freivalds", seed=1, trials=20)
    assert r.ok, r.detail
    return "seed=1 trials=20"


@criterion(7, "lower-bound-chain")
def test_lower_bound_chain(D903):
    lb = X.lower_bound_chain()
    assert lb.equality
    assert lb.per_axis == {1: 300, 2: 300, 3: 300}
    assert lb.residual == X.residual_rank3_certificate(X.witness_sum()) == 3
    assert lb.value == 3 * 300 + 3 == len(D903) == 903
    return "value=903"


@criterion(8, "f-structure")
def test_f_structure():
    rep = X.check_F_structure()
    assert rep.ok
    assert set(rep.items) == {"3.1", "3.2", "3.3", "3.4"}
    return "items=4"


@criterion(9, "rank4-pencil")
def test_rank4_pencil():
    n = 0
    for a, b in [(1, 1), (1, -1), (-1, 1), (-1, -1)]:
        for x, y in X.sample_pairs(5, 1):
            assert x != y
            c = X.pencil_rank4_certificate(a, b, x, y)  # SolverIncomplete would propagate
            assert c.independent and c.span_dim <= 2 and c.ok
            n += 1
    return f"instances={n}"


@criterion(10, "span-identity")
def test_span_identity():
    r = X.symmetric_span_identity_check(trials=100, seed=0)
    assert r.ok and r.trials == 100
    return "trials=100"


@criterion(11, "structural-zeros")
def test_structural_zeros():
    rep = G.structural_zero_report()
    assert rep.ok and rep.matrices == 300
    return f"identities={len(rep.checks)}"


def _verify_all():
    r = subprocess.run([sys.executable, "-m", "comon", "verify", "all"], capture_output=True, text=True)
    return r.returncode, r.stdout


@criterion(12, "determinism")
def test_determinism():
    with ThreadPoolExecutor(2) as pool:
        (c1, out1), (c2, out2) = pool.map(lambda _: _verify_all(), range(2))
    assert c1 == c2 == 0, out1
    assert out1 == out2
    assert out1.count("\n") > 10
    return f"lines={out1.count(chr(10))}"
