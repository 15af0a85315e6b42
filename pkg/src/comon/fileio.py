"""Line-oriented text formats for tensors, decompositions and corrections.

Tensor:          ``tensor n1 n2 n3`` then ``idx idx idx scalar`` per entry
Decomposition:   ``decomposition N`` then, per term, ``vec a`` / ``vec b`` /
                 ``vec c`` each followed by ``idx scalar`` lines
Corrections:     ``corrections <axes>`` then ``axis slice-idx coeff ...``

Entries are written in canonical key order, so equal objects give
byte-identical files.
"""

from __future__ import annotations

from .decomposition import Decomposition, SimpleTensor
from .errors import ParseError
from .indices import CoreIndex, GadgetId, IndexSet, core_index_set, extended_index_set, format_index, parse_index
from .scalar import format_scalar, parse_scalar
from .sparse import SparseTensor, SparseVector, _as_index
from .substitution import CorrectionAssignment


class _Formatter:
    """Caches label and value strings; the big tensor repeats both a lot."""

    def __init__(self):
        self._vals = {}

    def value(self, v):
        key = (type(v), v)
        s = self._vals.get(key)
        if s is None:
            s = format_scalar(v)
            if len(self._vals) < 100000:
                self._vals[key] = s
        return s


def _labels(index):
    return [format_index(lab) for lab in index]


def write_tensor(T, out):
    """Stream T to a path or text file object."""
    if isinstance(out, str):
        with open(out, "w") as fh:
            return write_tensor(T, fh)
    fmt = _Formatter()
    labs = [_labels(d) for d in T.dims]
    l1, l2, l3 = labs
    out.write("tensor {} {} {}\n".format(*T.shape))
    buf = []
    n = 0
    for (p, q, r), v in T.items():
        buf.append(f"{l1[p]} {l2[q]} {l3[r]} {fmt.value(v)}\n")
        if len(buf) >= 65536:
            out.write("".join(buf))
            buf.clear()
        n += 1
    out.write("".join(buf))
    return n


def default_index(n, sample_label=None):
    """Index set for a file of length n: fixed universes for structured labels."""
    if isinstance(sample_label, (CoreIndex, GadgetId)):
        if n == len(extended_index_set()):
            return extended_index_set()
        if n == len(core_index_set()):
            return core_index_set()
        raise ParseError(f"no structured index universe of size {n}")
    return IndexSet.range(n)


def _header(line, word, count, lineno):
    parts = line.split()
    if not parts or parts[0] != word or len(parts) != count + 1:
        raise ParseError(f"line {lineno}: expected header '{word}' with {count} numbers", lineno)
    try:
        return [int(x) for x in parts[1:]]
    except ValueError:
        raise ParseError(f"line {lineno}: malformed header", lineno) from None


def _lines(src):
    if isinstance(src, str):
        with open(src) as fh:
            yield from enumerate(fh, 1)
    else:
        yield from enumerate(src, 1)


def _scalar(text, lineno):
    try:
        return parse_scalar(text)
    except ParseError as e:
        raise ParseError(f"line {lineno}: {e}", lineno) from None


def _simplify(v):
    return v.simplify() if hasattr(v, "simplify") else v


def read_tensor(src, dims=None):
    if dims is not None:
        dims = tuple(_as_index(d) for d in dims)
    it = _lines(src)
    try:
        lineno, line = next(it)
    except StopIteration:
        raise ParseError("empty tensor file", 0) from None
    shape = _header(line, "tensor", 3, lineno)
    data = {}
    for lineno, line in it:
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 4:
            raise ParseError(f"line {lineno}: expected 'idx idx idx scalar'", lineno)
        labels = [parse_index(x, lineno) for x in parts[:3]]
        if dims is None:
            dims = tuple(default_index(n, lab) for n, lab in zip(shape, labels))
        try:
            key = tuple(dims[a].pos(labels[a]) for a in range(3))
        except IndexError:
            raise ParseError(f"line {lineno}: index outside the tensor", lineno) from None
        data[key] = _simplify(_scalar(parts[3], lineno))
    if dims is None:
        dims = tuple(IndexSet.range(n) for n in shape)
    if tuple(len(d) for d in dims) != tuple(shape):
        raise ParseError("header shape disagrees with the index sets", 1)
    return SparseTensor(dims, data)


def write_decomposition(D, out):
    if isinstance(out, str):
        with open(out, "w") as fh:
            return write_decomposition(D, fh)
    fmt = _Formatter()
    labs = [_labels(d) for d in D.dims]
    out.write(f"decomposition {len(D.terms)}\n")
    for t in D.terms:
        for name, v, lab in zip("abc", t.vectors, labs):
            out.write(f"vec {name}\n")
            out.write("".join(f"{lab[p]} {fmt.value(x)}\n" for p, x in v.items()))
    return len(D.terms)


def read_decomposition(src, dims=None):
    """Parse a decomposition; ``dims`` defaults to the 800-label universe."""
    if dims is None:
        dims = (extended_index_set(),) * 3
    dims = tuple(_as_index(d) for d in dims)
    it = _lines(src)
    try:
        lineno, line = next(it)
    except StopIteration:
        raise ParseError("empty decomposition file", 0) from None
    (n,) = _header(line, "decomposition", 1, lineno)
    terms = []
    current = None
    expect = 0
    vecs = []

    def close():
        if current is not None:
            vecs.append(SparseVector(dims[len(vecs) % 3], current))

    for lineno, line in it:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "vec":
            if len(parts) != 2 or parts[1] != "abc"[expect % 3]:
                raise ParseError(f"line {lineno}: expected 'vec {'abc'[expect % 3]}'", lineno)
            close()
            current = {}
            expect += 1
            continue
        if current is None or len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'idx scalar'", lineno)
        lab = parse_index(parts[0], lineno)
        d = dims[(expect - 1) % 3]
        if lab not in d:
            raise ParseError(f"line {lineno}: index {parts[0]} outside the target", lineno)
        current[d.pos(lab)] = _simplify(_scalar(parts[1], lineno))
    close()
    if len(vecs) != 3 * n:
        raise ParseError(f"expected {n} terms, found {len(vecs) / 3:g}", lineno)
    for k in range(n):
        terms.append(SimpleTensor(*vecs[3 * k : 3 * k + 3]))
    return Decomposition(dims, terms)


def write_corrections(corr, out, index=None, sizes=(5, 5, 5)):
    """Every slice of every axis gets a row of ``corr.dim`` coefficients."""
    if isinstance(out, str):
        with open(out, "w") as fh:
            return write_corrections(corr, fh, index, sizes)
    fmt = _Formatter()
    out.write(f"corrections {len(sizes)}\n")
    rows = 0
    for axis, n in enumerate(sizes, 1):
        lab = _labels(index[axis - 1]) if index else [str(p + 1) for p in range(n)]
        for p in range(n):
            coeffs = " ".join(fmt.value(c) for c in corr.dense(axis, p))
            out.write(f"{axis} {lab[p]} {coeffs}\n")
            rows += 1
    return rows


def read_corrections(src, index=None):
    it = _lines(src)
    try:
        lineno, line = next(it)
    except StopIteration:
        raise ParseError("empty corrections file", 0) from None
    (n_axes,) = _header(line, "corrections", 1, lineno)
    coeffs = {}
    dim = None
    for lineno, line in it:
        parts = line.split()
        if not parts:
            continue
        if len(parts) < 2:
            raise ParseError(f"line {lineno}: expected 'axis slice coeff ...'", lineno)
        try:
            axis = int(parts[0])
        except ValueError:
            raise ParseError(f"line {lineno}: bad axis {parts[0]!r}", lineno) from None
        if not 1 <= axis <= n_axes:
            raise ParseError(f"line {lineno}: axis {axis} outside 1..{n_axes}", lineno)
        lab = parse_index(parts[1], lineno)
        if index is not None:
            p = index[axis - 1].pos(lab)
        elif isinstance(lab, int) and lab >= 1:
            p = lab - 1
        else:
            raise ParseError(f"line {lineno}: slice label needs an index set", lineno)
        vals = [_simplify(_scalar(x, lineno)) for x in parts[2:]]
        if dim is None:
            dim = len(vals)
        elif len(vals) != dim:
            raise ParseError(f"line {lineno}: expected {dim} coefficients", lineno)
        if any(v != 0 for v in vals):
            coeffs.setdefault(axis, {})[p] = vals
    return CorrectionAssignment(dim or 0, coeffs)
