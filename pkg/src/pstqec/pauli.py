"""Phase-tracked Pauli strings and Jordan-Wigner Majorana operators.

A Pauli on ``n`` qubits is ``i**phase * Z^z X^x`` with ``z`` and ``x`` packed
ints (bit ``q`` = qubit ``q``, 0-based).  Majoranas use 1-based mode labels:
``c_m = X_m Z_1..Z_{m-1}`` and ``c_{n+m} = Y_m Z_1..Z_{m-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class Pauli:
    n: int
    z: int
    x: int
    phase: int = 0

    def __mul__(self, other: "Pauli") -> "Pauli":
        if self.n != other.n:
            raise ValueError("qubit count mismatch")
        # Z^z1 X^x1 Z^z2 X^x2 = (-1)^{x1.z2} Z^{z1+z2} X^{x1+x2}
        sign = 2 * ((self.x & other.z).bit_count() & 1)
        return Pauli(self.n, self.z ^ other.z, self.x ^ other.x, (self.phase + other.phase + sign) % 4)

    def commutes(self, other: "Pauli") -> bool:
        return not (((self.z & other.x).bit_count() + (self.x & other.z).bit_count()) & 1)

    def is_hermitian(self) -> bool:
        return (self.phase - (self.z & self.x).bit_count()) % 2 == 0

    @property
    def support(self) -> int:
        return self.z | self.x

    def symplectic(self) -> int:
        """Packed (z|x) vector, z in the low ``n`` bits."""
        return self.z | (self.x << self.n)

    @classmethod
    def from_symplectic(cls, n: int, v: int, hermitian: bool = True) -> "Pauli":
        z = v & ((1 << n) - 1)
        x = v >> n
        phase = (3 * (z & x).bit_count()) % 4 if hermitian else 0
        return cls(n, z, x, phase)

    def embed(self, n: int, offset: int) -> "Pauli":
        """Place this Pauli on qubits ``offset .. offset + self.n - 1`` of ``n``."""
        return Pauli(n, self.z << offset, self.x << offset, self.phase)

    def restrict(self, offset: int, width: int) -> "Pauli":
        mask = (1 << width) - 1
        return Pauli(width, (self.z >> offset) & mask, (self.x >> offset) & mask, self.phase)

    def label(self) -> str:
        out = []
        for q in range(self.n):
            zb, xb = (self.z >> q) & 1, (self.x >> q) & 1
            out.append("IXZY"[xb + 2 * zb])
        return _phase_str(self.phase, self.z & self.x) + "".join(out)

    def apply(self, vec: np.ndarray, offset: int = 0) -> np.ndarray:
        """Apply to a dense state vector indexed by packed bitstrings.

        The Pauli acts on bits ``offset ..`` of the basis index.
        """
        idx = np.arange(vec.shape[0])
        z = self.z << offset
        x = self.x << offset
        src = idx ^ x
        # (Z^z X^x v)[i] = (-1)^{|i & z|} v[i ^ x]
        signs = 1 - 2 * (_popcount(idx & z) & 1)
        return (1j ** self.phase) * signs * vec[src]

    def matrix(self) -> np.ndarray:
        dim = 1 << self.n
        out = np.zeros((dim, dim), dtype=complex)
        eye = np.eye(dim, dtype=complex)
        for j in range(dim):
            out[:, j] = self.apply(eye[:, j])
        return out


def _phase_str(phase: int, y_mask: int) -> str:
    # phase relative to the plain product of single-qubit letters (Y = -iZX)
    rel = (phase - 3 * y_mask.bit_count()) % 4
    return ["+", "+i", "-", "-i"][rel]


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.int64)
    c = np.zeros_like(a)
    while np.any(a):
        c += a & 1
        a >>= 1
    return c


def identity(n: int) -> Pauli:
    return Pauli(n, 0, 0, 0)


def single(n: int, kind: str, q: int) -> Pauli:
    """Single-qubit Pauli ``kind`` on 0-based qubit ``q``."""
    b = 1 << q
    if kind == "X":
        return Pauli(n, 0, b, 0)
    if kind == "Z":
        return Pauli(n, b, 0, 0)
    if kind == "Y":
        # Y = -i Z X
        return Pauli(n, b, b, 3)
    raise ValueError(f"unknown Pauli {kind!r}")


def majorana(n: int, m: int) -> Pauli:
    """Majorana ``c_m`` on ``n`` qubits, ``m`` in 1..2n."""
    if not 1 <= m <= 2 * n:
        raise ValueError("Majorana index out of range")
    site = (m - 1) % n
    string = (1 << site) - 1
    if m <= n:
        return Pauli(n, string, 1 << site, 0)
    return Pauli(n, string | (1 << site), 1 << site, 3)


def majorana_product(n: int, modes: Iterable[int]) -> Pauli:
    out = identity(n)
    for m in modes:
        out = out * majorana(n, m)
    return out


def majorana_decompose(p: Pauli) -> tuple[list[int], int]:
    """Write ``p`` as ``i**k`` times an ordered product of Majoranas.

    Returns (ascending mode list, k).
    """
    n = p.n
    modes_x, modes_y = [], []
    tail = 0
    for q in reversed(range(n)):
        xb = (p.x >> q) & 1
        zb = (p.z >> q) & 1
        v = zb ^ tail
        u = xb ^ v
        if u:
            modes_x.append(q + 1)
        if v:
            modes_y.append(n + q + 1)
        tail ^= xb
    modes = sorted(modes_x + modes_y)
    prod = majorana_product(n, modes)
    if prod.z != p.z or prod.x != p.x:
        raise AssertionError("Majorana decomposition failed")
    return modes, (p.phase - prod.phase) % 4


def pauli_from_bits(n: int, zbits: Iterable[int], xbits: Iterable[int]) -> Pauli:
    z = sum(1 << q for q, b in enumerate(zbits) if b)
    x = sum(1 << q for q, b in enumerate(xbits) if b)
    return Pauli(n, z, x, (3 * (z & x).bit_count()) % 4)
