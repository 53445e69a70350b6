from __future__ import annotations

import numpy as np
import pytest
from scipy.linalg import expm

from pstqec.chain import h1_matrix, standard_chain
from pstqec.impossibility import (
    compute_R,
    compute_W,
    disc_bound_report,
    recurrence_residual,
    repetition_experiment,
    symmetric_eigenvectors,
    trivial_distinguishability_check,
    verify_antidiag_formula,
)


@pytest.mark.parametrize("N", [4, 10, 20])
def test_reflection_is_hermitian_involution(N):
    ref = compute_R(standard_chain(N))
    assert ref.involution_error() < 1e-12
    assert ref.hermiticity_error() < 1e-12


def test_reflection_matches_expm():
    spec = standard_chain(6)
    U = expm(-1j * h1_matrix(spec) * spec.t0 / 2)
    D = np.diag([-1, -1, -1, 1, 1, 1])
    np.testing.assert_allclose(compute_R(spec).R, U.conj().T @ D @ U, atol=1e-12)


def test_odd_chain_rejected():
    with pytest.raises(ValueError):
        compute_R(standard_chain(5))


@pytest.mark.parametrize("N", [4, 8, 14])
def test_diagonal_vanishes_and_antidiagonal_survives(N):
    R = compute_R(standard_chain(N)).R
    assert np.max(np.abs(np.diag(R))) < 1e-10
    assert np.min(np.abs(R[np.arange(N), N - 1 - np.arange(N)])) > 1e-8


def test_symmetric_eigenvectors_convention():
    spec = standard_chain(8)
    e, v = symmetric_eigenvectors(spec)
    N = 8
    signs = (-1.0) ** np.arange(N)
    for n in range(N):
        np.testing.assert_allclose(v[N - 1 - n], signs * v[n], atol=1e-12)
    np.testing.assert_allclose(e, -e[::-1], atol=1e-12)
    assert recurrence_residual(spec) < 1e-12


@pytest.mark.parametrize("N", [4, 12, 20])
def test_antidiag_closed_form(N):
    rep = verify_antidiag_formula(standard_chain(N))
    assert rep.exact_deviation < 1e-9
    assert rep.magnitude_deviation < 1e-9


@pytest.mark.parametrize("N", [6, 12])
def test_return_modes(N):
    ref = compute_R(standard_chain(N))
    for M in range(1, N // 2 + 1):
        assert compute_W(ref, M).singular_values.max() < 1
    at = compute_W(ref, N // 2 + 1)
    assert at.unit_count() >= 2
    ev = np.sort(at.eigenvalues)
    assert ev[0] == pytest.approx(-1, abs=1e-8) and ev[-1] == pytest.approx(1, abs=1e-8)


def test_disc_bound_rows():
    ref = compute_R(standard_chain(10))
    rows = disc_bound_report(ref, 5)
    assert len(rows) == 5
    assert all(r["bounded"] for r in rows)
    for r in rows:
        assert r["row_sum"] + r["excluded"] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        disc_bound_report(ref, 6)


def test_distinguishability_leaks():
    # one W eigenvalue of -1 leaks an excitation for small chains; the leak dies off with N
    assert trivial_distinguishability_check(standard_chain(4), 3).leak_one == pytest.approx(0.25, abs=1e-12)
    r8 = trivial_distinguishability_check(standard_chain(8), 5)
    assert r8.leak_zero < 1e-12
    assert r8.leak_one == pytest.approx(6 / 2**20, rel=1e-9)
    assert not r8.passed
    assert trivial_distinguishability_check(standard_chain(12), 7).passed


def test_distinguishability_needs_m_half_plus_one():
    with pytest.raises(ValueError):
        trivial_distinguishability_check(standard_chain(8), 4)


def test_repetition_noiseless_is_perfect():
    r = repetition_experiment(9, 3, pauli=None)
    assert r.error_probability < 1e-12
    assert r.avg_infidelity < 1e-12


def test_repetition_z_error_keeps_bits():
    r = repetition_experiment(9, 3, pauli="Z")
    assert r.error_probability < 1e-12


def test_repetition_rejects_even_rep():
    with pytest.raises(ValueError):
        repetition_experiment(9, 2)


def test_repetition_small_chain_ordering():
    probs = [repetition_experiment(11, rep).error_probability for rep in (1, 3, 5)]
    assert probs[0] > probs[1] > probs[2]
