"""Excitation-number sector representation of states on a spin chain.

Basis states are packed ints (bit ``q`` = site ``q + 1`` excited).  The XX
chain Hamiltonian and every ``Z_n`` conserve the number of excitations, so a
vector splits into independent per-sector pieces and a density matrix into
independent ``(a, b)`` blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .chain import ChainSpec
from .pauli import Pauli, _popcount

DENSE_LIMIT = 3500


@lru_cache(maxsize=None)
def sector_basis(N: int, w: int) -> np.ndarray:
    """Sorted packed bitstrings of weight ``w`` (combinadic order)."""
    if not 0 <= w <= N:
        return np.zeros(0, dtype=np.int64)
    states = [sum(1 << q for q in c) for c in combinations(range(N), w)]
    return np.array(sorted(states), dtype=np.int64)


def sector_index(N: int, w: int, states: np.ndarray) -> np.ndarray:
    return np.searchsorted(sector_basis(N, w), states)


@lru_cache(maxsize=None)
def _hamming(N: int, a: int, b: int) -> np.ndarray:
    ra, rb = sector_basis(N, a), sector_basis(N, b)
    return _popcount(ra[:, None] ^ rb[None, :]).astype(np.int8)


@lru_cache(maxsize=128)
def sector_hamiltonian(spec: ChainSpec, w: int) -> sp.csr_matrix:
    """H restricted to weight ``w``: hopping J_n between neighbours, fields -(B/2) Z."""
    N = spec.N
    basis = sector_basis(N, w)
    dim = len(basis)
    B = np.asarray(spec.B)
    occ = (basis[:, None] >> np.arange(N)) & 1
    diag = -0.5 * ((1 - 2 * occ) * B).sum(axis=1)
    rows, cols, vals = [np.arange(dim)], [np.arange(dim)], [diag]
    for n in range(N - 1):
        pair = (1 << n) | (1 << (n + 1))
        hop = ((basis >> n) & 1) != ((basis >> (n + 1)) & 1)
        src = np.nonzero(hop)[0]
        dst = np.searchsorted(basis, basis[src] ^ pair)
        rows.append(dst)
        cols.append(src)
        vals.append(np.full(len(src), spec.J[n]))
    h = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )
    return h


class Evolver:
    """Noiseless evolution exp(-iHt) applied sector by sector."""

    def __init__(self, spec: ChainSpec):
        self.spec = spec
        self._eig: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def dense(self, w: int) -> bool:
        return comb(self.spec.N, w) <= DENSE_LIMIT

    def eig(self, w: int) -> tuple[np.ndarray, np.ndarray]:
        if w not in self._eig:
            h = sector_hamiltonian(self.spec, w).toarray()
            self._eig[w] = np.linalg.eigh(h)
        return self._eig[w]

    def unitary(self, w: int, t: float) -> np.ndarray:
        e, v = self.eig(w)
        return (v * np.exp(-1j * e * t)) @ v.conj().T

    def apply(self, w: int, vec: np.ndarray, t: float) -> np.ndarray:
        if t == 0:
            return vec.copy()
        if self.dense(w):
            e, v = self.eig(w)
            return v @ (np.exp(-1j * e * t) * (v.conj().T @ vec))
        h = sector_hamiltonian(self.spec, w)
        return expm_multiply(-1j * t * h, vec.astype(complex))


def _pauli_image(N: int, p: Pauli, states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Images and amplitudes of basis states under ``p``."""
    img = states ^ p.x
    signs = 1 - 2 * (_popcount(img & p.z) & 1)
    return img, (1j ** p.phase) * signs


def _regroup(N: int, img: np.ndarray):
    """Yield (sector, positions, indices-in-sector) for a list of images."""
    w = _popcount(img)
    for s in np.unique(w):
        pos = np.nonzero(w == s)[0]
        yield int(s), pos, sector_index(N, int(s), img[pos])


@dataclass
class SectorVector:
    """Pure state stored as one vector per excitation sector."""

    N: int
    parts: dict[int, np.ndarray] = field(default_factory=dict)

    @classmethod
    def basis_state(cls, N: int, bits: int) -> "SectorVector":
        w = bits.bit_count()
        v = np.zeros(comb(N, w), dtype=complex)
        v[sector_index(N, w, np.array([bits]))[0]] = 1.0
        return cls(N, {w: v})

    @classmethod
    def from_dense(cls, vec: np.ndarray, tol: float = 0.0) -> "SectorVector":
        N = int(round(np.log2(len(vec))))
        parts = {}
        for w in range(N + 1):
            piece = np.asarray(vec[sector_basis(N, w)], dtype=complex)
            if np.any(np.abs(piece) > tol):
                parts[w] = piece
        return cls(N, parts)

    @classmethod
    def product(cls, N: int, region: np.ndarray, offset: int, rest_bits: int = 0) -> "SectorVector":
        """Dense region state on sites ``offset..`` times a basis state elsewhere."""
        width = int(round(np.log2(len(region))))
        nz = np.nonzero(region)[0]
        full = (nz.astype(np.int64) << offset) | rest_bits
        out: dict[int, np.ndarray] = {}
        for s, pos, idx in _regroup(N, full):
            v = out.setdefault(s, np.zeros(comb(N, s), dtype=complex))
            v[idx] += region[nz[pos]]
        return cls(N, out)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(1 << self.N, dtype=complex)
        for w, v in self.parts.items():
            out[sector_basis(self.N, w)] = v
        return out

    def copy(self) -> "SectorVector":
        return SectorVector(self.N, {w: v.copy() for w, v in self.parts.items()})

    def norm(self) -> float:
        return float(np.sqrt(sum(np.vdot(v, v).real for v in self.parts.values())))

    def scale(self, c: complex) -> "SectorVector":
        return SectorVector(self.N, {w: c * v for w, v in self.parts.items()})

    def __add__(self, other: "SectorVector") -> "SectorVector":
        out = {w: v.copy() for w, v in self.parts.items()}
        for w, v in other.parts.items():
            out[w] = out[w] + v if w in out else v.copy()
        return SectorVector(self.N, out)

    def vdot(self, other: "SectorVector") -> complex:
        return complex(sum(np.vdot(v, other.parts[w]) for w, v in self.parts.items() if w in other.parts))

    def evolve(self, evolver: Evolver, t: float) -> "SectorVector":
        return SectorVector(self.N, {w: evolver.apply(w, v, t) for w, v in self.parts.items()})

    def apply_pauli(self, p: Pauli) -> "SectorVector":
        out: dict[int, np.ndarray] = {}
        for w, v in self.parts.items():
            img, amp = _pauli_image(self.N, p, sector_basis(self.N, w))
            for s, pos, idx in _regroup(self.N, img):
                tgt = out.setdefault(s, np.zeros(comb(self.N, s), dtype=complex))
                tgt[idx] += amp[pos] * v[pos]
        return SectorVector(self.N, out)

    def region_matrix(self, offset: int, width: int) -> np.ndarray:
        """Amplitudes reshaped as (rest configuration, region configuration)."""
        N = self.N
        mask = (1 << width) - 1
        out = np.zeros((1 << (N - width), 1 << width), dtype=complex)
        for w, v in self.parts.items():
            b = sector_basis(N, w)
            g = (b >> offset) & mask
            rest = (b & ((1 << offset) - 1)) | ((b >> (offset + width)) << offset)
            out[rest, g] = v
        return out

    def reduced(self, offset: int, width: int) -> np.ndarray:
        phi = self.region_matrix(offset, width)
        return phi.T @ phi.conj()

    def excitation_distribution(self, offset: int, width: int) -> np.ndarray:
        """Probability of k excitations on the region, k = 0..width."""
        probs = np.zeros(width + 1)
        mask = (1 << width) - 1
        for w, v in self.parts.items():
            b = sector_basis(self.N, w)
            k = _popcount((b >> offset) & mask)
            np.add.at(probs, k, np.abs(v) ** 2)
        return probs


def cross_reduced(a: SectorVector, b: SectorVector, offset: int, width: int) -> np.ndarray:
    """Tr_rest |a><b| on the region."""
    return a.region_matrix(offset, width).T @ b.region_matrix(offset, width).conj()


@dataclass
class SectorState:
    """Operator on N qubits stored as blocks between excitation sectors.

    ``blocks[(a, b)]`` has shape C(N, a) x C(N, b); absent blocks are zero.
    Density matrices keep ``blocks[(b, a)] == blocks[(a, b)]^dagger``; the
    class also carries non-Hermitian operators such as |0_L><1_L| so that
    logical channels can be built by linearity.
    """

    N: int
    blocks: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)

    @classmethod
    def from_vector(cls, v: SectorVector) -> "SectorState":
        return cls.outer(v, v)

    @classmethod
    def outer(cls, a: SectorVector, b: SectorVector) -> "SectorState":
        blocks = {}
        for wa, va in a.parts.items():
            for wb, vb in b.parts.items():
                blocks[(wa, wb)] = np.outer(va, vb.conj())
        return cls(a.N, blocks)

    @classmethod
    def from_dense(cls, rho: np.ndarray, tol: float = 0.0) -> "SectorState":
        N = int(round(np.log2(rho.shape[0])))
        blocks = {}
        for a in range(N + 1):
            for b in range(N + 1):
                blk = rho[np.ix_(sector_basis(N, a), sector_basis(N, b))]
                if np.any(np.abs(blk) > tol):
                    blocks[(a, b)] = blk.astype(complex)
        return cls(N, blocks)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((1 << self.N, 1 << self.N), dtype=complex)
        for (a, b), blk in self.blocks.items():
            out[np.ix_(sector_basis(self.N, a), sector_basis(self.N, b))] = blk
        return out

    def copy(self) -> "SectorState":
        return SectorState(self.N, {k: v.copy() for k, v in self.blocks.items()})

    def trace(self) -> complex:
        return complex(sum(np.trace(blk) for (a, b), blk in self.blocks.items() if a == b))

    def sectors(self) -> set[int]:
        return {a for a, _ in self.blocks} | {b for _, b in self.blocks}

    def hermiticity_error(self) -> float:
        err = 0.0
        for (a, b), blk in self.blocks.items():
            other = self.blocks.get((b, a))
            if other is None:
                err = max(err, float(np.abs(blk).max(initial=0.0)))
            else:
                err = max(err, float(np.abs(blk - other.conj().T).max(initial=0.0)))
        return err

    def purity(self) -> float:
        tot = 0.0
        for (a, b), blk in self.blocks.items():
            other = self.blocks.get((b, a))
            if other is not None:
                tot += np.sum(blk * other.T).real
        return float(tot)

    def add(self, other: "SectorState", c: complex = 1.0) -> "SectorState":
        out = {k: v.copy() for k, v in self.blocks.items()}
        for k, v in other.blocks.items():
            out[k] = out[k] + c * v if k in out else c * v
        return SectorState(self.N, out)

    def scale(self, c: complex) -> "SectorState":
        return SectorState(self.N, {k: c * v for k, v in self.blocks.items()})

    def adjoint(self) -> "SectorState":
        return SectorState(self.N, {(b, a): v.conj().T for (a, b), v in self.blocks.items()})

    def conjugate_unitary(self, evolver: Evolver, t: float) -> "SectorState":
        if t == 0:
            return self.copy()
        us = {w: evolver.unitary(w, t) for w in self.sectors()}
        return SectorState(
            self.N, {(a, b): us[a] @ blk @ us[b].conj().T for (a, b), blk in self.blocks.items()}
        )

    def apply_pauli(self, p: Pauli) -> "SectorState":
        """P rho P^dagger; X components move amplitude between sectors."""
        N = self.N
        out: dict[tuple[int, int], np.ndarray] = {}
        for (a, b), blk in self.blocks.items():
            ra, amp_a = _pauli_image(N, p, sector_basis(N, a))
            rb, amp_b = _pauli_image(N, p, sector_basis(N, b))
            scaled = (amp_a[:, None] * blk) * amp_b.conj()[None, :]
            for sa, pa, ia in _regroup(N, ra):
                for sb, pb, ib in _regroup(N, rb):
                    tgt = out.setdefault((sa, sb), np.zeros((comb(N, sa), comb(N, sb)), dtype=complex))
                    tgt[np.ix_(ia, ib)] += scaled[np.ix_(pa, pb)]
        return SectorState(N, out)

    def reduced(self, offset: int, width: int) -> np.ndarray:
        """Dense partial trace onto sites ``offset .. offset + width - 1``."""
        N = self.N
        mask = (1 << width) - 1
        out = np.zeros((1 << width, 1 << width), dtype=complex)
        restmask = ((1 << N) - 1) ^ (mask << offset)
        for (a, b), blk in self.blocks.items():
            ba, bb = sector_basis(N, a), sector_basis(N, b)
            rest_a, rest_b = ba & restmask, bb & restmask
            ga, gb = (ba >> offset) & mask, (bb >> offset) & mask
            common = np.intersect1d(rest_a, rest_b)
            for r in common:
                ia = np.nonzero(rest_a == r)[0]
                ib = np.nonzero(rest_b == r)[0]
                out[np.ix_(ga[ia], gb[ib])] += blk[np.ix_(ia, ib)]
        return out
