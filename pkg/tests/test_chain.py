from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.linalg import expm

from pstqec.chain import (
    ChainSpec,
    check_spectral_symmetry,
    h1_matrix,
    majorana_propagator,
    odd_parity_mask,
    parity_block_check,
    parse_chain,
    propagator,
    standard_chain,
    transfer_amplitudes,
    transfer_phase,
    with_fields,
)
from pstqec.dynamics import dense_hamiltonian
from pstqec.pauli import majorana


def test_standard_couplings():
    s = standard_chain(4, lam=2.0)
    assert s.J == pytest.approx((2 * math.sqrt(3), 2 * 2.0, 2 * math.sqrt(3)))
    assert s.t0 == pytest.approx(math.pi / 4)


@pytest.mark.parametrize("N", [2, 3, 7, 12, 33])
def test_mirror_transfer(N):
    assert np.max(np.abs(transfer_amplitudes(standard_chain(N)) - 1)) < 1e-10


def test_transfer_phase_unit():
    assert abs(abs(transfer_phase(standard_chain(6))) - 1) < 1e-12


def test_propagator_unitary_and_exact():
    s = standard_chain(5)
    U = propagator(s, 0.37)
    np.testing.assert_allclose(U, expm(-1j * h1_matrix(s) * 0.37), atol=1e-12)


@pytest.mark.parametrize("N", [3, 4])
def test_majorana_propagator_matches_bruteforce(N):
    s = with_fields(standard_chain(N), np.linspace(0.1, 0.4, N))
    t = 0.61
    U = expm(-1j * dense_hamiltonian(s) * t)
    O = majorana_propagator(s, t).O
    cs = [majorana(N, m).matrix() for m in range(1, 2 * N + 1)]
    for n in range(2 * N):
        heis = U.conj().T @ cs[n] @ U
        pred = sum(O[m, n] * cs[m] for m in range(2 * N))
        np.testing.assert_allclose(heis, pred, atol=1e-10)


def test_majorana_propagator_orthogonal():
    O = majorana_propagator(standard_chain(9), 1.1).O
    np.testing.assert_allclose(O @ O.T, np.eye(18), atol=1e-12)


def test_spectral_symmetry():
    assert check_spectral_symmetry(standard_chain(10))
    assert not check_spectral_symmetry(with_fields(standard_chain(10), [0.3] + [0] * 9))


def test_odd_parity_mask():
    # c_1, c_3 and c_{N+2}, c_{N+4} for N = 4
    assert odd_parity_mask(4).tolist() == [True, False, True, False, False, True, False, True]


def test_parity_leakage():
    s = standard_chain(8)
    assert parity_block_check(majorana_propagator(s, 0.9)) < 1e-12
    bad = with_fields(s, [1.0] + [0.0] * 7)
    assert parity_block_check(majorana_propagator(bad, 0.9)) > 0.1


def test_spec_validation():
    with pytest.raises(ValueError):
        ChainSpec(3, (1.0,), (0.0, 0.0, 0.0), 1.0, 1.0)
    with pytest.raises(ValueError):
        ChainSpec(2, (-1.0,), (0.0, 0.0), 1.0, 1.0)
    with pytest.raises(ValueError):
        standard_chain(1)


def test_parse_chain():
    s = parse_chain("# chain\nN 4\nlambda 1.0\nB 0 0 0.5 0\n")
    assert s.N == 4 and s.B[2] == 0.5
    assert s.J == standard_chain(4).J
    with pytest.raises(ValueError):
        parse_chain("lambda 1\n")
