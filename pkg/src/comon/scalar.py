"""Exact arithmetic in the degree-8 number field Q(i, sqrt2, sqrt3).

An element is stored as eight integer numerators over one positive common
denominator, in the fixed basis

    (1, sqrt2, sqrt3, sqrt6, i, i*sqrt2, i*sqrt3, i*sqrt6).

Basis element ``n`` is the product of the generators whose bits are set in
``n`` (bit 0 = sqrt2, bit 1 = sqrt3, bit 2 = i), so the product of two basis
elements is ``±c * e[m ^ n]`` with ``c`` in {1, 2, 3, 6}.

Python ``int`` and ``Fraction`` values are treated as elements of the prime
field and mix freely with :class:`Scalar`; containers elsewhere in the
package store rational entries unboxed for speed.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd
from numbers import Rational

from .errors import ParseError

BASIS_NAMES = ("1", "sqrt2", "sqrt3", "sqrt6", "i", "i*sqrt2", "i*sqrt3", "i*sqrt6")


def _structure_constant(m, n):
    c = 1
    common = m & n
    if common & 1:
        c *= 2
    if common & 2:
        c *= 3
    if common & 4:
        c = -c
    return c


# STRUCTURE[m][n] = (index, coefficient) with e_m * e_n = coefficient * e_index;
# the dense 8x8x8 table has exactly one nonzero per (m, n).
STRUCTURE = tuple(tuple((m ^ n, _structure_constant(m, n)) for n in range(8)) for m in range(8))


def structure_tensor():
    """Dense 8x8x8 structure constants ``t[m][n][k]``."""
    t = [[[0] * 8 for _ in range(8)] for _ in range(8)]
    for m in range(8):
        for n in range(8):
            k, c = STRUCTURE[m][n]
            t[m][n][k] = c
    return t


def _normalized(nums, den):
    if den < 0:
        nums = [-x for x in nums]
        den = -den
    g = gcd(den, *nums)
    if g != 1:
        nums = [x // g for x in nums]
        den //= g
    return tuple(nums), den


def _parts(x):
    """(numerators, denominator) of any field element."""
    if isinstance(x, Scalar):
        return x._num, x._den
    if isinstance(x, int):
        return (x, 0, 0, 0, 0, 0, 0, 0), 1
    if isinstance(x, Rational):
        return (int(x.numerator), 0, 0, 0, 0, 0, 0, 0), int(x.denominator)
    raise TypeError(f"not a field element: {x!r}")


class Scalar:
    __slots__ = ("_num", "_den")

    def __init__(self, coords=None):
        if coords is None:
            self._num, self._den = (0,) * 8, 1
            return
        coords = tuple(coords)
        if len(coords) != 8:
            raise ValueError("a Scalar needs exactly 8 rational coordinates")
        fracs = [Fraction(c) for c in coords]
        den = 1
        for f in fracs:
            den = den * f.denominator // gcd(den, f.denominator)
        self._num, self._den = _normalized([f.numerator * (den // f.denominator) for f in fracs], den)

    @classmethod
    def _raw(cls, nums, den):
        s = cls.__new__(cls)
        s._num, s._den = _normalized(nums, den)
        return s

    @classmethod
    def basis(cls, n, coefficient=1):
        coords = [0] * 8
        coords[n] = coefficient
        return cls(coords)

    @property
    def coords(self):
        return tuple(Fraction(x, self._den) for x in self._num)

    def is_zero(self):
        return not any(self._num)

    def is_rational(self):
        return not any(self._num[1:])

    def to_fraction(self):
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return Fraction(self._num[0], self._den)

    def simplify(self):
        """The plain int/Fraction when rational, else self."""
        if not self.is_rational():
            return self
        return self._num[0] if self._den == 1 else Fraction(self._num[0], self._den)

    def conjugate_by(self, mask):
        """Galois automorphism flipping the generators selected by ``mask``."""
        return Scalar._raw(
            [-x if bin(n & mask).count("1") % 2 else x for n, x in enumerate(self._num)], self._den
        )

    def __bool__(self):
        return any(self._num)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self._num == other._num and self._den == other._den
        try:
            nums, den = _parts(other)
        except TypeError:
            return NotImplemented
        return self._num == nums and self._den == den

    def __hash__(self):
        if self.is_rational():
            return hash(Fraction(self._num[0], self._den))
        return hash((self._num, self._den))

    def __add__(self, other):
        try:
            n2, d2 = _parts(other)
        except TypeError:
            return NotImplemented
        n1, d1 = self._num, self._den
        return Scalar._raw([a * d2 + b * d1 for a, b in zip(n1, n2)], d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw([-x for x in self._num], self._den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            n2, d2 = _parts(other)
        except TypeError:
            return NotImplemented
        n1, d1 = self._num, self._den
        return Scalar._raw([a * d2 - b * d1 for a, b in zip(n1, n2)], d1 * d2)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            n2, d2 = _parts(other)
        except TypeError:
            return NotImplemented
        n1 = self._num
        out = [0] * 8
        for m, a in enumerate(n1):
            if not a:
                continue
            row = STRUCTURE[m]
            for n, b in enumerate(n2):
                if b:
                    k, c = row[n]
                    out[k] += c * a * b
        return Scalar._raw(out, self._den * d2)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero Scalar")
        # Tower Q < Q(sqrt2) < Q(sqrt2, sqrt3) < K: multiply by conjugates
        # until the norm is rational.
        c_i = self.conjugate_by(4)
        b1 = self * c_i
        c_3 = b1.conjugate_by(2)
        b2 = b1 * c_3
        c_2 = b2.conjugate_by(1)
        norm = (b2 * c_2).to_fraction()
        return c_i * c_3 * c_2 * (1 / norm)

    def __truediv__(self, other):
        if isinstance(other, Scalar):
            return self * other.inverse()
        try:
            nums, den = _parts(other)
        except TypeError:
            return NotImplemented
        if nums[0] == 0:
            raise ZeroDivisionError("division by zero")
        return self * Fraction(den, nums[0])

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __repr__(self):
        terms = []
        for x, name in zip(self.coords, BASIS_NAMES):
            if x:
                terms.append(f"{x}" if name == "1" else f"({x})*{name}")
        return "Scalar(" + (" + ".join(terms) or "0") + ")"


ZERO = Scalar()
ONE = Scalar.basis(0)
SQRT2 = Scalar.basis(1)
SQRT3 = Scalar.basis(2)
SQRT6 = Scalar.basis(3)
I = Scalar.basis(4)


def as_scalar(x):
    return x if isinstance(x, Scalar) else Scalar._raw(*_parts(x))


def is_zero(x):
    return x == 0


def add(a, b):
    return as_scalar(a) + b


def sub(a, b):
    return as_scalar(a) - b


def mul(a, b):
    return as_scalar(a) * b


def arith(a, b, op):
    try:
        return {"add": add, "sub": sub, "mul": mul}[op](a, b)
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None


def inv(a):
    """Multiplicative inverse; raises ZeroDivisionError on zero."""
    return as_scalar(a).inverse()


def coords_of(x):
    """The 8 rational coordinates of any field element."""
    nums, den = _parts(x)
    return tuple(Fraction(n, den) for n in nums)


def from_coords(coords):
    """Field element from 8 coordinates, unboxed when rational."""
    return Scalar(coords).simplify()


def format_scalar(x):
    nums, den = _parts(x)
    out = []
    for n in nums:
        g = gcd(n, den)
        out.append(f"{n // g}/{den // g}")
    return ",".join(out)


_RATIONAL = re.compile(r"(-?)(\d+)/(\d+)")


def parse_scalar(text):
    """Inverse of :func:`format_scalar`; strict about the canonical form."""
    if not isinstance(text, str):
        raise ParseError("scalar text must be a string")
    fields = text.split(",")
    if len(fields) != 8:
        raise ParseError(f"expected 8 comma-separated rationals, found {len(fields)}", 0)
    coords = []
    pos = 0
    for field in fields:
        m = _RATIONAL.fullmatch(field)
        if m is None:
            raise ParseError(f"malformed rational {field!r}", pos)
        sign, p, q = m.groups()
        p, q = int(p), int(q)
        if q == 0:
            raise ParseError("zero denominator", pos)
        if gcd(p, q) != 1 or (p == 0 and q != 1) or (p == 0 and sign):
            raise ParseError(f"rational {field!r} is not reduced", pos)
        coords.append(Fraction(-p if sign else p, q))
        pos += len(field) + 1
    return Scalar(coords)
