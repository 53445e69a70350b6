"""Bit-packed linear algebra over GF(2).

Rows are stored as Python ints with bit ``j`` holding column ``j``, so row
operations are single XORs regardless of width.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

MAX_ENUM_ROWS = 24


class CapacityError(ValueError):
    """Raised when an exhaustive enumeration would be too large."""


class MatrixFormatError(ValueError):
    """Raised for malformed plain-text matrices."""


@dataclass(frozen=True)
class BinMatrix:
    """Immutable binary matrix; ``bits[i]`` is row ``i`` packed LSB-first."""

    rows: int
    cols: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != self.rows:
            raise ValueError("row count does not match stored rows")
        limit = 1 << self.cols
        for r in self.bits:
            if r < 0 or r >= limit:
                raise ValueError("row has bits beyond the column count")

    # construction ---------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> "BinMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cols must be given for an empty matrix")
            cols = len(rows[0])
        packed = []
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
            v = 0
            for j, b in enumerate(r):
                if b & 1:
                    v |= 1 << j
            packed.append(v)
        return cls(len(packed), cols, tuple(packed))

    @classmethod
    def from_array(cls, a) -> "BinMatrix":
        a = np.asarray(a, dtype=np.int64) % 2
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        return cls.from_rows(a.tolist(), cols=a.shape[1])

    @classmethod
    def from_ints(cls, ints: Iterable[int], cols: int) -> "BinMatrix":
        ints = tuple(int(v) for v in ints)
        return cls(len(ints), cols, ints)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BinMatrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, n: int) -> "BinMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def parse(cls, text: str) -> "BinMatrix":
        """Parse the plain-text format: rows of space separated 0/1, ``#`` comments."""
        rows = []
        for lineno, line in enumerate(text.splitlines(), 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            toks = body.split()
            if any(t not in ("0", "1") for t in toks):
                raise MatrixFormatError(f"line {lineno}: tokens must be 0 or 1")
            rows.append([int(t) for t in toks])
        if not rows:
            raise MatrixFormatError("no matrix rows found")
        if len({len(r) for r in rows}) != 1:
            raise MatrixFormatError("rows have different lengths")
        return cls.from_rows(rows)

    # views ----------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return (self.bits[i] >> j) & 1

    def row(self, i: int) -> list[int]:
        r = self.bits[i]
        return [(r >> j) & 1 for j in range(self.cols)]

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i, r in enumerate(self.bits):
            for j in range(self.cols):
                if (r >> j) & 1:
                    out[i, j] = 1
        return out

    def to_text(self) -> str:
        return "\n".join(" ".join(str(b) for b in self.row(i)) for i in range(self.rows)) + "\n"

    def column_ints(self) -> list[int]:
        """Columns packed as ints (bit ``i`` = row ``i``)."""
        cols = [0] * self.cols
        for i, r in enumerate(self.bits):
            j = 0
            while r:
                if r & 1:
                    cols[j] |= 1 << i
                r >>= 1
                j += 1
        return cols

    # algebra --------------------------------------------------------------

    @property
    def T(self) -> "BinMatrix":
        return BinMatrix(self.cols, self.rows, tuple(self.column_ints()))

    def __matmul__(self, other: "BinMatrix") -> "BinMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for r in self.bits:
            acc = 0
            k = 0
            while r:
                if r & 1:
                    acc ^= other.bits[k]
                r >>= 1
                k += 1
            out.append(acc)
        return BinMatrix(self.rows, other.cols, tuple(out))

    def __add__(self, other: "BinMatrix") -> "BinMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return BinMatrix(self.rows, self.cols, tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def apply(self, v: int) -> int:
        """Matrix times column vector ``v`` (packed), returned packed."""
        out = 0
        for i, r in enumerate(self.bits):
            if (r & v).bit_count() & 1:
                out |= 1 << i
        return out

    def is_zero(self) -> bool:
        return not any(self.bits)

    def vstack(self, other: "BinMatrix") -> "BinMatrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch")
        return BinMatrix(self.rows + other.rows, self.cols, self.bits + other.bits)

    def hstack(self, other: "BinMatrix") -> "BinMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        sh = self.cols
        return BinMatrix(
            self.rows, self.cols + other.cols, tuple(a | (b << sh) for a, b in zip(self.bits, other.bits))
        )

    def select_columns(self, idx: Sequence[int]) -> "BinMatrix":
        out = []
        for r in self.bits:
            v = 0
            for new, old in enumerate(idx):
                if (r >> old) & 1:
                    v |= 1 << new
            out.append(v)
        return BinMatrix(self.rows, len(idx), tuple(out))


def block(blocks: Sequence[Sequence[BinMatrix]]) -> BinMatrix:
    """Assemble a block matrix from a grid of BinMatrix pieces."""
    rows = None
    for line in blocks:
        acc = line[0]
        for piece in line[1:]:
            acc = acc.hstack(piece)
        rows = acc if rows is None else rows.vstack(acc)
    return rows


def rref(a: BinMatrix) -> tuple[BinMatrix, int, list[int]]:
    """Reduced row echelon form; returns (R, rank, pivot columns)."""
    work = list(a.bits)
    pivots: list[int] = []
    r = 0
    for col in range(a.cols):
        mask = 1 << col
        piv = next((i for i in range(r, len(work)) if work[i] & mask), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        for i in range(len(work)):
            if i != r and work[i] & mask:
                work[i] ^= work[r]
        pivots.append(col)
        r += 1
        if r == len(work):
            break
    return BinMatrix(a.rows, a.cols, tuple(work)), r, pivots


def rank(a: BinMatrix) -> int:
    return rref(a)[1]


def row_basis(a: BinMatrix) -> BinMatrix:
    """Independent rows spanning the row space of ``a``."""
    r, k, _ = rref(a)
    return BinMatrix(k, a.cols, r.bits[:k])


def nullspace(a: BinMatrix) -> BinMatrix:
    """Basis (as rows) of {v : a v^T = 0}."""
    r, k, pivots = rref(a)
    free = [c for c in range(a.cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = 1 << f
        for i, p in enumerate(pivots):
            if (r.bits[i] >> f) & 1:
                v |= 1 << p
        basis.append(v)
    return BinMatrix(len(basis), a.cols, tuple(basis))


def reduce_vector(v: int, basis_rref: BinMatrix, pivots: Sequence[int]) -> int:
    """Reduce ``v`` against an RREF basis; zero iff ``v`` lies in its span."""
    for i, p in enumerate(pivots):
        if (v >> p) & 1:
            v ^= basis_rref.bits[i]
    return v


def in_rowspace(v: int, a: BinMatrix) -> bool:
    r, k, piv = rref(a)
    return reduce_vector(v, r, piv) == 0


def inverse(a: BinMatrix) -> BinMatrix:
    """Inverse of a square matrix; raises ValueError if singular."""
    n = a.rows
    if a.cols != n:
        raise ValueError("matrix is not square")
    aug = a.hstack(BinMatrix.identity(n))
    r, k, piv = rref(aug)
    if piv[:n] != list(range(n)) or k < n:
        raise ValueError("matrix is singular over GF(2)")
    return BinMatrix(n, n, tuple(row >> n for row in r.bits[:n]))


def min_weight(g: BinMatrix) -> int:
    """Minimum nonzero weight of the code spanned by the rows of ``g``.

    Exhaustive Gray-code walk over all 2^k - 1 nonzero combinations of a
    row basis; dependent or duplicate rows are reduced away first.
    """
    basis = row_basis(g)
    k = basis.rows
    if k == 0:
        raise ValueError("code has no nonzero codewords")
    if k > MAX_ENUM_ROWS:
        raise CapacityError(f"2^{k} codewords exceed the enumeration limit 2^{MAX_ENUM_ROWS}")
    rows = basis.bits
    best = g.cols + 1
    cw = 0
    for i in range(1, 1 << k):
        cw ^= rows[(i & -i).bit_length() - 1]
        w = cw.bit_count()
        if w < best:
            best = w
            if best == 1:
                break
    return best


def cols_independent_up_to(a: BinMatrix, w: int) -> bool:
    """True iff no nonempty set of at most ``w`` columns of ``a`` sums to zero.

    Meet-in-the-middle: a dependent set T splits into halves of size at most
    ceil(w/2) with equal sums, so it suffices to look for colliding subset
    sums among the small subsets.
    """
    if w > a.cols:
        raise ValueError("w exceeds the number of columns")
    if w <= 0:
        return True
    cols = a.column_ints()
    half = (w + 1) // 2
    seen: dict[int, list[int]] = defaultdict(list)
    for size in range(half + 1):
        for combo in combinations(range(a.cols), size):
            s = 0
            mask = 0
            for c in combo:
                s ^= cols[c]
                mask |= 1 << c
            for other in seen[s]:
                if (other ^ mask).bit_count() <= w:
                    return False
            seen[s].append(mask)
    return True


def column_distance(a: BinMatrix, limit: int | None = None) -> int:
    """Smallest number of columns of ``a`` that are linearly dependent.

    Returns ``limit + 1`` (default ``cols + 1``) when no dependency of size at
    most ``limit`` exists.
    """
    limit = a.cols if limit is None else min(limit, a.cols)
    for w in range(1, limit + 1):
        if not cols_independent_up_to(a, w):
            return w
    return limit + 1


def weight(v: int) -> int:
    return v.bit_count()
