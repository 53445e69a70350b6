from __future__ import annotations

from math import comb

import numpy as np
import pytest
from scipy.linalg import expm

from pstqec.chain import standard_chain, with_fields
from pstqec.dynamics import dense_hamiltonian
from pstqec.pauli import single
from pstqec.sectors import (
    Evolver,
    SectorState,
    SectorVector,
    cross_reduced,
    sector_basis,
    sector_hamiltonian,
)


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def dense_partial_trace(rho, n, offset, width):
    t = rho.reshape([2] * (2 * n))
    # axis k of the reshaped index is bit n-1-k
    keep = [n - 1 - q for q in range(offset, offset + width)]
    drop = [a for a in range(n) if a not in keep]
    perm = sorted(keep, reverse=False)
    t = np.transpose(t, drop + perm + [a + n for a in drop] + [a + n for a in perm])
    d = 1 << (n - width)
    t = t.reshape(d, 1 << width, d, 1 << width)
    return np.einsum("iaib->ab", t)


def test_sector_basis_sizes():
    assert [len(sector_basis(6, w)) for w in range(7)] == [comb(6, w) for w in range(7)]


@pytest.mark.parametrize("N", [3, 5])
def test_sector_hamiltonian_blocks(N):
    s = with_fields(standard_chain(N), np.linspace(-0.3, 0.5, N))
    H = dense_hamiltonian(s)
    for w in range(N + 1):
        b = sector_basis(N, w)
        np.testing.assert_allclose(sector_hamiltonian(s, w).toarray(), H[np.ix_(b, b)].real, atol=1e-12)


def test_vector_evolution_matches_dense():
    N = 5
    s = standard_chain(N)
    psi = random_state(N, 1)
    out = SectorVector.from_dense(psi).evolve(Evolver(s), 0.7).to_dense()
    np.testing.assert_allclose(out, expm(-1j * dense_hamiltonian(s) * 0.7) @ psi, atol=1e-10)


def test_pauli_action_matches_dense():
    N = 5
    psi = random_state(N, 2)
    for kind in "XYZ":
        p = single(N, kind, 2) * single(N, "X", 4)
        out = SectorVector.from_dense(psi).apply_pauli(p).to_dense()
        np.testing.assert_allclose(out, p.matrix() @ psi, atol=1e-12)


def test_state_ops_match_dense():
    N = 4
    rho = np.outer(random_state(N, 3), random_state(N, 4).conj())
    st = SectorState.from_dense(rho)
    np.testing.assert_allclose(st.to_dense(), rho)
    p = single(N, "Y", 1)
    np.testing.assert_allclose(st.apply_pauli(p).to_dense(), p.matrix() @ rho @ p.matrix().conj().T, atol=1e-12)
    U = expm(-1j * dense_hamiltonian(standard_chain(N)) * 0.4)
    out = st.conjugate_unitary(Evolver(standard_chain(N)), 0.4).to_dense()
    np.testing.assert_allclose(out, U @ rho @ U.conj().T, atol=1e-10)
    assert st.trace() == pytest.approx(np.trace(rho))


@pytest.mark.parametrize("offset,width", [(0, 2), (1, 3), (3, 2)])
def test_reduced_matches_dense(offset, width):
    N = 5
    psi = random_state(N, 5)
    rho = np.outer(psi, psi.conj())
    ref = dense_partial_trace(rho, N, offset, width)
    np.testing.assert_allclose(SectorState.from_dense(rho).reduced(offset, width), ref, atol=1e-12)
    v = SectorVector.from_dense(psi)
    np.testing.assert_allclose(v.reduced(offset, width), ref, atol=1e-12)
    np.testing.assert_allclose(cross_reduced(v, v, offset, width), ref, atol=1e-12)


def test_excitation_distribution():
    v = SectorVector.basis_state(4, 0b0110)
    assert v.excitation_distribution(1, 2).tolist() == [0, 0, 1]
    assert v.excitation_distribution(0, 2).tolist() == [0, 1, 0]


def test_hermiticity_and_purity():
    psi = random_state(4, 6)
    st = SectorState.from_vector(SectorVector.from_dense(psi))
    assert st.hermiticity_error() < 1e-15
    assert st.purity() == pytest.approx(1.0)
