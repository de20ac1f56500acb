"""Exact GF(2) and GF(2^m) arithmetic, bitstrings, and Hamming geometry.

Bit order convention: index 0 is the most significant / leftmost bit,
everywhere -- for bitstrings, field elements, Toeplitz seeds and matrix
reads.  Bitstrings serialize as ASCII "0"/"1" strings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .errors import InputError


class Bitstring:
    """Immutable ordered sequence of bits; equality is positional."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int]):
        bits = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in bits):
            raise InputError("bits must be 0 or 1")
        self._bits = bits

    @classmethod
    def from_str(cls, s: str) -> "Bitstring":
        if any(c not in "01" for c in s):
            raise InputError(f"not a bitstring: {s!r}")
        return cls(int(c) for c in s)

    @classmethod
    def from_int(cls, value: int, length: int) -> "Bitstring":
        """Most significant bit first."""
        if value < 0 or value >= (1 << length):
            raise InputError(f"{value} does not fit in {length} bits")
        return cls((value >> (length - 1 - i)) & 1 for i in range(length))

    @classmethod
    def zeros(cls, length: int) -> "Bitstring":
        return cls((0,) * length)

    def to_int(self) -> int:
        v = 0
        for b in self._bits:
            v = (v << 1) | b
        return v

    @property
    def bits(self) -> tuple:
        return self._bits

    def weight(self) -> int:
        return sum(self._bits)

    def concat(self, other: "Bitstring") -> "Bitstring":
        return Bitstring(self._bits + other._bits)

    def __len__(self) -> int:
        return len(self._bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self._bits)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Bitstring(self._bits[i])
        return self._bits[i]

    def __xor__(self, other: "Bitstring") -> "Bitstring":
        if len(self) != len(other):
            raise InputError("xor of bitstrings of different lengths")
        return Bitstring(a ^ b for a, b in zip(self._bits, other._bits))

    def __eq__(self, other) -> bool:
        return isinstance(other, Bitstring) and self._bits == other._bits

    def __hash__(self) -> int:
        return hash(self._bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self._bits)

    def __repr__(self) -> str:
        return f"Bitstring('{self}')"


def all_bitstrings(length: int) -> Iterator[Bitstring]:
    for v in range(1 << length):
        yield Bitstring.from_int(v, length)


class Gf2Matrix:
    """Dense matrix over GF(2); the matrix-vector product is mod-2 linear."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries):
        arr = np.array(entries, dtype=np.uint8)
        if arr.ndim != 2:
            raise InputError("matrix entries must be two-dimensional")
        if not np.isin(arr, (0, 1)).all():
            raise InputError("matrix entries must be 0 or 1")
        self.entries = arr
        self.rows, self.cols = arr.shape

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls(np.eye(n, dtype=np.uint8))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Gf2Matrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Gf2Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and (self.entries == other.entries).all()
        )

    def __repr__(self) -> str:
        return f"Gf2Matrix({self.entries.tolist()})"


def gf2_matvec(m: Gf2Matrix, x: Bitstring) -> Bitstring:
    """Mod-2 matrix-vector product."""
    if len(x) != m.cols:
        raise InputError(f"vector length {len(x)} != {m.cols} columns")
    out = (m.entries @ np.array(x.bits, dtype=np.uint8)) & 1
    return Bitstring(out.tolist())


def toeplitz_from_seed(seed: Bitstring, rows: int, cols: int) -> Gf2Matrix:
    """Diagonal-constant matrix with entry (i, j) = seed[i - j + cols - 1]."""
    if len(seed) != rows + cols - 1:
        raise InputError(
            f"seed length {len(seed)} != rows + cols - 1 = {rows + cols - 1}"
        )
    s = np.array(seed.bits, dtype=np.uint8)
    i = np.arange(rows)[:, None]
    j = np.arange(cols)[None, :]
    return Gf2Matrix(s[i - j + cols - 1])


# -- GF(2^m) ------------------------------------------------------------
#
# Internally polynomials are ints with bit i holding the coefficient of
# x^i.  The public Bitstring value is MSB-first, i.e. index 0 holds the
# coefficient of x^(m-1).

MAX_FIELD_DEGREE = 16


def _poly_degree(p: int) -> int:
    return p.bit_length() - 1


def _poly_mulmod(a: int, b: int, modulus: int) -> int:
    deg = _poly_degree(modulus)
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> deg & 1:
            a ^= modulus
    return out


def _poly_mod(a: int, m: int) -> int:
    dm = _poly_degree(m)
    while _poly_degree(a) >= dm and a:
        a ^= m << (_poly_degree(a) - dm)
    return a


def _is_irreducible(p: int) -> bool:
    deg = _poly_degree(p)
    if deg == 1:
        return True
    if deg < 1 or not p & 1:
        return False  # constants, and multiples of x at degree >= 2
    for d in range(1 << 1, 1 << (deg // 2 + 1)):
        if _poly_degree(d) >= 1 and _poly_mod(p, d) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def irreducible_polynomial(m: int) -> int:
    """Lexicographically smallest irreducible polynomial of degree m."""
    if not 1 <= m <= MAX_FIELD_DEGREE:
        raise InputError(f"field degree must be in 1..{MAX_FIELD_DEGREE}")
    for p in range(1 << m, 1 << (m + 1)):
        if _is_irreducible(p):
            return p
    raise AssertionError("unreachable: irreducible polynomials exist in every degree")


@dataclass(frozen=True)
class GfElement:
    """Element of GF(2^m), represented by an m-bit value (MSB first)."""

    value: Bitstring
    modulus: int

    def __post_init__(self):
        m = _poly_degree(self.modulus)
        if len(self.value) != m:
            raise InputError(f"value length {len(self.value)} != field degree {m}")

    @classmethod
    def from_int(cls, v: int, m: int, modulus: int | None = None) -> "GfElement":
        mod = modulus if modulus is not None else irreducible_polynomial(m)
        return cls(Bitstring.from_int(v, m), mod)

    @property
    def degree(self) -> int:
        return _poly_degree(self.modulus)

    def to_int(self) -> int:
        return self.value.to_int()

    def __add__(self, other: "GfElement") -> "GfElement":
        if self.modulus != other.modulus:
            raise InputError("field modulus mismatch")
        return GfElement(self.value ^ other.value, self.modulus)

    def is_zero(self) -> bool:
        return self.to_int() == 0


def gf_mul(a: GfElement, b: GfElement) -> GfElement:
    """Polynomial product reduced mod the field modulus."""
    if a.modulus != b.modulus:
        raise InputError("field modulus mismatch")
    prod = _poly_mulmod(a.to_int(), b.to_int(), a.modulus)
    return GfElement(Bitstring.from_int(prod, a.degree), a.modulus)


def gf_mul_int(a: int, b: int, modulus: int) -> int:
    """Integer fast path for audits; same semantics as gf_mul."""
    return _poly_mulmod(a, b, modulus)


# -- Hamming geometry and codes ----------------------------------------


def hamming(x: Bitstring, y: Bitstring) -> int:
    if len(x) != len(y):
        raise InputError("hamming distance needs equal lengths")
    return sum(a != b for a, b in zip(x, y))


def hamming_ball(center: Bitstring, radius: int) -> Iterator[Bitstring]:
    """All strings within the given Hamming radius, by increasing distance."""
    n = len(center)
    c = center.to_int()
    from itertools import combinations

    for w in range(radius + 1):
        for positions in combinations(range(n), w):
            e = 0
            for p in positions:
                e |= 1 << (n - 1 - p)
            yield Bitstring.from_int(c ^ e, n)


def binary_entropy(phi: float) -> float:
    """h(phi) with the convention 0 log 0 = 0."""
    if not 0.0 <= phi <= 1.0:
        raise InputError(f"entropy argument {phi} outside [0, 1]")
    if phi in (0.0, 1.0):
        return 0.0
    return -phi * math.log2(phi) - (1.0 - phi) * math.log2(1.0 - phi)


class LinearCode:
    """An explicit set of equal-length codewords with a computed minimum distance."""

    def __init__(self, codewords: Iterable[Bitstring]):
        words = tuple(codewords)
        if not words:
            raise InputError("a code needs at least one codeword")
        n = len(words[0])
        if any(len(w) != n for w in words):
            raise InputError("codewords must share a common length")
        if len(set(words)) != len(words):
            raise InputError("duplicate codewords")
        self.codewords = words
        self.length = n

    def __len__(self) -> int:
        return len(self.codewords)

    def __iter__(self) -> Iterator[Bitstring]:
        return iter(self.codewords)

    def __contains__(self, w) -> bool:
        return w in self.codewords

    @property
    def min_distance(self) -> int:
        return code_min_distance(self)


def code_min_distance(c: LinearCode) -> int:
    """Exact minimum pairwise Hamming distance by exhaustive scan."""
    if len(c) < 2:
        raise InputError("minimum distance needs at least 2 codewords")
    words = c.codewords
    return min(
        hamming(words[i], words[j])
        for i in range(len(words))
        for j in range(i + 1, len(words))
    )
