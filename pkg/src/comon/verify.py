"""Checking that a decomposition sums to a (possibly lazy) target tensor.

Exact mode partitions every axis into classes of positions on which all
term vectors agree and the target's slices agree (the target reports its own
slice classes through ``index_classes``).  Both sides are then constant on
class products, so comparing the representative sub-tensor decides equality
of the full tensors.  The comparison runs on integer arrays after splitting
every value into its 8 rational coordinates and clearing denominators.  An
a-priori bound on every partial sum picks the array type: float64 (BLAS
products are exact on integers below 2**53), then int64, then Python
integers in object arrays.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import ShapeError
from .scalar import STRUCTURE, Scalar, coords_of

_FLOAT_EXACT = 2 ** 53
_INT64_SAFE = 2 ** 62


def _dtype_for(bound):
    if bound < _FLOAT_EXACT:
        return np.float64
    if bound < _INT64_SAFE:
        return np.int64
    return object


def thread_count():
    try:
        return max(1, int(os.environ.get("COMON_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class VerificationReport:
    ok: bool
    mode: str
    terms: int
    detail: str = ""
    representatives: tuple = ()
    slices_checked: dict = field(default_factory=dict)
    mismatch: tuple | None = None


def _partition(D, target, axis):
    n = D.shape[axis - 1]
    tclass = target.index_classes(axis)
    sig = [[] for _ in range(n)]
    for t, term in enumerate(D.terms):
        for p, v in term.vectors[axis - 1].data.items():
            sig[p].append((t, v))
    classes = {}
    reps = []
    for p in range(n):
        key = (tclass[p], tuple(sig[p]))
        if key not in classes:
            classes[key] = len(reps)
            reps.append(p)
    return reps


def _components(v):
    """{basis index: (int dict, denominator)} for a sparse vector."""
    comps = {}
    for p, x in v.data.items():
        if isinstance(x, Scalar):
            cs = coords_of(x)
            for e, c in enumerate(cs):
                if c:
                    comps.setdefault(e, {})[p] = c
        else:
            comps.setdefault(0, {})[p] = Fraction(x)
    out = {}
    for e, d in comps.items():
        den = 1
        for c in d.values():
            den = lcm(den, c.denominator)
        out[e] = ({p: int(c * den) for p, c in d.items()}, den)
    return out


def _expand_terms(D):
    """Rational integer terms grouped by basis tag: tag -> [(scale, a, b, c)]."""
    groups = {}
    for term in D.terms:
        if term.is_zero():
            continue
        ca, cb, cc = (_components(v) for v in term.vectors)
        for e1, (a, da) in ca.items():
            for e2, (b, db) in cb.items():
                k12, s12 = STRUCTURE[e1][e2]
                for e3, (c, dc) in cc.items():
                    f, s3 = STRUCTURE[k12][e3]
                    groups.setdefault(f, []).append((Fraction(s12 * s3, da * db * dc), a, b, c))
    return groups


def _target_block(target, axis, pos, reps_a, reps_b):
    """Target slice at ``pos`` restricted to representatives, per basis tag."""
    S = target.slice(axis, pos)
    ia = {p: i for i, p in enumerate(reps_a)}
    ib = {q: j for j, q in enumerate(reps_b)}
    out = {}
    for (p, q), v in S.data.items():
        i = ia.get(p)
        if i is None:
            continue
        j = ib.get(q)
        if j is None:
            continue
        if type(v) is int:
            out.setdefault(0, {})[(i, j)] = v
            continue
        for f, c in enumerate(coords_of(v)):
            if c:
                out.setdefault(f, {})[(i, j)] = c
    return out


def _full_value(D, key):
    s = 0
    for t in D.terms:
        s = s + t.at(*key)
    return s


def verify_exact(D, target, axes=(1, 2, 3)):
    """Deterministic exact comparison of sum(D) with ``target``."""
    if D.shape != target.shape:
        raise ShapeError(f"decomposition shape {D.shape} vs target {target.shape}")
    reps = tuple(_partition(D, target, a) for a in (1, 2, 3))
    groups = _expand_terms(D)
    tags = sorted(set(groups) | {0})
    prepared = {}
    for f in tags:
        g = groups.get(f, [])
        L = 1
        for s, *_ in g:
            L = lcm(L, s.denominator)
        weights = [int(s * L) for s, *_ in g]
        mats = []
        for axis in range(3):
            rp = reps[axis]
            mats.append([[vec[axis + 1].get(p, 0) for vec in g] for p in rp])
        prepared[f] = (L, weights, mats)

    report = VerificationReport(True, "exact", len(D.terms), representatives=tuple(len(r) for r in reps))

    for axis in axes:
        chi = axis - 1
        a, b = [t for t in range(3) if t != chi]
        arrays = {}
        for f, (L, weights, mats) in prepared.items():
            T = len(weights)
            big = max([abs(x) for row in mats[a] for x in row] + [0]) * max(
                [abs(x) for row in mats[b] for x in row] + [0]
            ) * max([abs(w * x) for row in mats[chi] for w, x in zip(weights, row)] + [0]) * max(T, 1)
            dtype = _dtype_for(big)
            A = np.array(mats[a], dtype=dtype).reshape(len(reps[a]), T)
            B = np.array(mats[b], dtype=dtype).reshape(len(reps[b]), T)
            C = np.array(mats[chi], dtype=dtype).reshape(len(reps[chi]), T) * np.array(weights, dtype=dtype)
            arrays[f] = (L, A, B, C, dtype, big)

        def check(idx):
            pos = reps[chi][idx]
            blocks = _target_block(target, axis, pos, reps[a], reps[b])
            for f, (L, A, B, C, dtype, big) in arrays.items():
                cr = C[idx]
                cols = np.nonzero(cr)[0]
                if len(cols):
                    P = (A[:, cols] * cr[cols]) @ B[:, cols].T
                else:
                    P = np.zeros((len(reps[a]), len(reps[b])), dtype=dtype)
                want = np.zeros_like(P)
                exact_int = True
                for (i, j), c in blocks.get(f, {}).items():
                    x = c * L
                    if (type(x) is not int and x.denominator != 1) or abs(x) > big:
                        # not an integer, or beyond what the products can reach
                        exact_int = False
                        want[i, j] = 0
                        bad = (i, j)
                        break
                    want[i, j] = int(x)
                if not exact_int:
                    return pos, bad
                diff = np.argwhere(P != want)
                if len(diff):
                    return pos, tuple(int(x) for x in diff[0])
            for f, blk in blocks.items():
                if f not in arrays and blk:
                    return pos, min(blk)
            return None

        workers = thread_count()
        if workers > 1:
            with ThreadPoolExecutor(workers) as ex:
                results = list(ex.map(check, range(len(reps[chi]))))
        else:
            results = []
            for i in range(len(reps[chi])):
                results.append(check(i))
                if results[-1] is not None:
                    break
        report.slices_checked[axis] = len(reps[chi])
        failure = next((r for r in results if r is not None), None)
        if failure is not None:
            pos, (i, j) = failure
            key = [0, 0, 0]
            key[chi], key[a], key[b] = pos, reps[a][i], reps[b][j]
            key = tuple(key)
            labels = tuple(str(target.dims[t][key[t]]) for t in range(3))
            got, want = _full_value(D, key), target.at(*key)
            report.ok = False
            report.mismatch = (labels, got, want)
            report.detail = f"axis {axis}: entry {labels} sum={got!r} target={want!r}"
            return report
    report.detail = "all representative slices agree"
    return report


def _random_vector(rng, n, values):
    out = {}
    for p in range(n):
        v = rng.choice(values)
        if v != 0:
            out[p] = v
    return out


def _dot(v, x):
    s = 0
    for p, a in v.data.items():
        b = x.get(p)
        if b is not None:
            s = s + a * b
    return s


def verify_freivalds(D, target, seed=1, trials=20, values=tuple(range(-100, 101))):
    """Randomized trilinear identity test, exact arithmetic throughout.

    A wrong decomposition passes one trial with probability at most
    3 / len(values) (degree-3 polynomial identity).
    """
    if D.shape != target.shape:
        raise ShapeError(f"decomposition shape {D.shape} vs target {target.shape}")
    rng = random.Random(seed)
    n1, n2, n3 = D.shape
    report = VerificationReport(True, "freivalds", len(D.terms))
    for trial in range(trials):
        x = _random_vector(rng, n1, values)
        y = _random_vector(rng, n2, values)
        z = _random_vector(rng, n3, values)
        lhs = 0
        for t in D.terms:
            u = _dot(t.a, x)
            if u == 0:
                continue
            w = _dot(t.b, y)
            if w == 0:
                continue
            lhs = lhs + u * w * _dot(t.c, z)
        rhs = target.contract(x, y, z)
        if lhs != rhs:
            report.ok = False
            report.mismatch = (trial, lhs, rhs)
            report.detail = f"trial {trial}: decomposition={lhs!r} target={rhs!r}"
            return report
    report.slices_checked = {"trials": trials}
    report.detail = f"{trials} trials agree"
    return report
