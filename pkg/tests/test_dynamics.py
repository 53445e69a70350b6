from __future__ import annotations

import csv

import numpy as np
import pytest

from pstqec import codes
from pstqec.chain import standard_chain, with_fields
from pstqec.dynamics import (
    EncodingError,
    FrameError,
    LogicalChannel,
    LogicalCode,
    Protocol,
    SweepRow,
    arrival_frame,
    average_fidelity,
    build_table,
    case_ii_preparation,
    codewords,
    dense_lindblad_evolve,
    encode,
    encode_operator,
    evolve_dephasing,
    identity_channel,
    insert_discrete_error,
    measure_correct,
    run_sweep,
    single_error_grid,
    unencoded_protocol,
    write_sweep_csv,
)
from pstqec.pauli import Pauli, single
from pstqec.sectors import Evolver, SectorState, SectorVector


def steane_code() -> LogicalCode:
    return LogicalCode.from_stabilizer_code(codes.get("steane-7").code.stabilizer())


def test_codewords_are_stabilized():
    code = steane_code()
    W = code.basis()
    np.testing.assert_allclose(W.conj().T @ W, np.eye(2), atol=1e-12)
    for s in code.stabilizers:
        np.testing.assert_allclose(s.matrix() @ W, W, atol=1e-12)
    Z = code.logical_z.matrix()
    np.testing.assert_allclose(Z @ W[:, 0], W[:, 0], atol=1e-12)
    np.testing.assert_allclose(Z @ W[:, 1], -W[:, 1], atol=1e-12)
    np.testing.assert_allclose(code.logical_x.matrix() @ W[:, 0], W[:, 1], atol=1e-12)


def test_inconsistent_stabilizers_rejected():
    # -Z and Z_L = Z share no +1 eigenvector
    z = single(1, "Z", 0)
    minus_z = Pauli(1, z.z, z.x, 2)
    with pytest.raises(EncodingError):
        codewords((minus_z,), z, single(1, "X", 0))


def test_encode_places_code_on_first_sites():
    code = steane_code()
    rho = encode(code, 1.0, 0.0, 9)
    assert rho.trace() == pytest.approx(1.0)
    red = rho.reduced(0, 7)
    W = code.basis()
    np.testing.assert_allclose(red, np.outer(W[:, 0], W[:, 0].conj()), atol=1e-12)
    np.testing.assert_allclose(rho.reduced(7, 2), np.diag([1, 0, 0, 0]), atol=1e-12)


def test_single_coherence_decay():
    # |00> + |11> is stationary under the XX hopping; the coherence crosses two sites
    spec = standard_chain(2)
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / np.sqrt(2)
    st = SectorState.from_dense(np.outer(psi, psi.conj()))
    gamma, T = 0.2, 0.7
    out = evolve_dephasing(st, spec, gamma, T, steps=8).to_dense()
    assert abs(out[0, 3]) == pytest.approx(0.5 * np.exp(-2 * gamma * 2 * T), rel=1e-12)


@pytest.mark.parametrize("gamma", [0.01, 0.1])
def test_strang_matches_dense_liouvillian(gamma):
    spec = with_fields(standard_chain(3), [0.2, -0.1, 0.3])
    rng = np.random.default_rng(7)
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    rho = np.outer(v, v.conj()) / np.vdot(v, v).real
    T = spec.t0
    ref = dense_lindblad_evolve(rho, spec, gamma, T)
    out = evolve_dephasing(SectorState.from_dense(rho), spec, gamma, T, steps=200).to_dense()
    assert np.max(np.abs(out - ref)) < 1e-6


def test_strang_second_order():
    spec = standard_chain(3)
    rho = np.full((8, 8), 1 / 8, dtype=complex)
    ref = dense_lindblad_evolve(rho, spec, 0.3, 1.0)
    errs = [
        np.max(np.abs(evolve_dephasing(SectorState.from_dense(rho), spec, 0.3, 1.0, steps=s).to_dense() - ref))
        for s in (10, 20)
    ]
    assert 3.0 < errs[0] / errs[1] < 5.0


def test_trace_and_hermiticity_preserved():
    code = steane_code()
    spec = standard_chain(8)
    out = evolve_dephasing(encode(code, 0.6, 0.8j, 8), spec, 0.3, spec.t0, steps=10)
    assert out.trace() == pytest.approx(1.0, abs=1e-12)
    assert out.hermiticity_error() < 1e-12
    assert out.purity() < 1.0


def test_gamma_zero_is_unitary():
    spec = standard_chain(4)
    st = encode(LogicalCode.trivial(), 0.6, 0.8, 4)
    a = evolve_dephasing(st, spec, 0.0, 0.4).to_dense()
    b = st.conjugate_unitary(Evolver(spec), 0.4).to_dense()
    np.testing.assert_allclose(a, b, atol=1e-12)
    with pytest.raises(ValueError):
        evolve_dephasing(st, spec, -1.0, 0.4)


def test_trivial_frame_lands_on_last_site():
    spec = standard_chain(6)
    frame = arrival_frame(LogicalCode.trivial(), spec)
    assert frame.offset == 5
    lz, lx = frame.code.logical_z, frame.code.logical_x
    assert (lz.z, lz.x) == (1, 0)
    assert lx.x == 1
    assert not lz.commutes(lx)


def test_steane_frame_region_and_commutation():
    spec = standard_chain(12)
    frame = arrival_frame(steane_code(), spec)
    assert frame.offset == 5 and frame.M == 7
    ops = list(frame.code.stabilizers)
    for a in ops:
        for b in ops:
            assert a.commutes(b)
        assert a.commutes(frame.code.logical_z) and a.commutes(frame.code.logical_x)
    assert not frame.code.logical_z.commutes(frame.code.logical_x)
    W = frame.code.basis()
    np.testing.assert_allclose(W.conj().T @ W, np.eye(2), atol=1e-12)


def test_frame_matches_noiseless_transfer():
    # the noiseless arrival always has the trivial syndrome
    spec = standard_chain(9)
    p = Protocol(spec, steane_code())
    assert average_fidelity(p.noiseless_channel()) == pytest.approx(1.0, abs=1e-12)
    assert average_fidelity(unencoded_protocol(spec).noiseless_channel()) == pytest.approx(1.0, abs=1e-12)


def test_frame_requires_pst():
    spec = standard_chain(8)
    with pytest.raises(FrameError):
        arrival_frame(steane_code(), spec, t=spec.t0 / 2)


def test_syndrome_projectors_resolve_identity():
    spec = standard_chain(12)
    p = Protocol(spec, steane_code())
    assert len(p.table.corrections) == 1 << 6
    assert p.table.conflicts == 0
    mixed = np.eye(1 << 7) / (1 << 7)
    rec = measure_correct(mixed, p.frame, p.table)
    np.testing.assert_allclose(rec.logical, np.eye(2) / 2, atol=1e-12)
    assert rec.failed_weight == 0.0


def test_missing_syndromes_reported():
    spec = standard_chain(12)
    frame = arrival_frame(steane_code(), spec)
    table = build_table(frame)
    table.corrections = {0: table.corrections[0]}
    table.frames = None
    rec = measure_correct(np.eye(1 << 7) / (1 << 7), frame, table)
    assert rec.failed_weight == pytest.approx(1 - 2 / (1 << 7))
    assert rec.failed


def test_channel_fidelity_anchors():
    assert average_fidelity(identity_channel()) == pytest.approx(1.0)
    dep = LogicalChannel({(i, j): np.eye(2) / 2 * (i == j) for i in range(2) for j in range(2)})
    assert average_fidelity(dep) == pytest.approx(0.5)


def test_six_state_equals_haar_average():
    # a non-unital, non-symmetric channel: amplitude damping followed by a rotation
    g = 0.3
    K0 = np.array([[1, 0], [0, np.sqrt(1 - g)]])
    K1 = np.array([[0, np.sqrt(g)], [0, 0]])
    U = np.array([[np.cos(0.4), -np.sin(0.4)], [np.sin(0.4), np.cos(0.4)]])
    imgs = {}
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, j] = 1
            imgs[(i, j)] = U @ (K0 @ e @ K0.conj().T + K1 @ e @ K1.conj().T) @ U.conj().T
    ch = LogicalChannel(imgs)
    rng = np.random.default_rng(11)
    v = rng.normal(size=(20000, 2)) + 1j * rng.normal(size=(20000, 2))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    haar = np.mean([ch.fidelity(a, b) for a, b in v])
    assert average_fidelity(ch) == pytest.approx(haar, abs=5e-3)


def test_z_error_at_arrival_site():
    spec = standard_chain(8)
    bare = unencoded_protocol(spec)
    # an uncorrected phase flip leaves only the Z eigenstates intact
    assert average_fidelity(bare.single_error_channel("Z", 8, spec.t0)) == pytest.approx(1 / 3, abs=1e-12)
    assert average_fidelity(bare.single_error_channel("Z", 3, spec.t0)) == pytest.approx(1.0, abs=1e-12)


def test_z_error_at_start_mirrors_to_end():
    # Z on site 1 at t=0 becomes Z on site N at t0
    spec = standard_chain(6)
    bare = unencoded_protocol(spec)
    assert average_fidelity(bare.single_error_channel("Z", 1, 0.0)) == pytest.approx(1 / 3, abs=1e-12)


def test_steane_corrects_single_dephasing_sample():
    spec = standard_chain(9)
    p = Protocol(spec, steane_code())
    grid = single_error_grid(p, "Z", sites=[1, 5, 9], n_times=4)
    assert np.max(np.abs(grid - 1)) < 1e-8


def test_discrete_error_matches_pure_path():
    spec = standard_chain(8)
    p = Protocol(spec, steane_code())
    t = 0.37 * spec.t0

    def final(i, j):
        return insert_discrete_error(encode_operator(p.code, i, j, 8), "X", 4, spec, t, p.evolver)

    a = p.channel_from_states(final)
    b = p.single_error_channel("X", 4, t)
    for key in a.images:
        np.testing.assert_allclose(a.images[key], b.images[key], atol=1e-10)


def test_x_error_changes_excitation_sector():
    spec = standard_chain(6)
    v = SectorVector.basis_state(6, 0)
    w = v.apply_pauli(single(6, "X", 2))
    assert w.excitation_distribution(0, 6).tolist() == [0, 1, 0, 0, 0, 0, 0]
    w = w.evolve(Evolver(spec), 0.5)
    assert w.excitation_distribution(0, 6)[1] == pytest.approx(1.0)


@pytest.mark.parametrize("rest", ["zeros", "ones", 3])
def test_case_ii_preparation(rest):
    spec = standard_chain(8)
    res = case_ii_preparation(spec, steane_code(), rest)
    assert res.fidelity == pytest.approx(1.0, abs=1e-10)
    assert sum(res.outcome_probabilities) == pytest.approx(1.0, abs=1e-10)
    assert set(res.rest_parities) <= {1, -1}


def test_case_ii_requires_all_z_logical():
    bad = LogicalCode(2, (single(2, "Z", 0) * single(2, "Z", 1),), single(2, "Z", 0), single(2, "X", 0) * single(2, "X", 1))
    with pytest.raises(ValueError):
        case_ii_preparation(standard_chain(4), bad)


def test_sweep_rows_and_csv(tmp_path):
    spec = standard_chain(8)
    rows = run_sweep(spec, steane_code(), [0.0, 0.05], steps=8)
    assert rows[0].f_encoded == pytest.approx(1.0, abs=1e-12)
    assert rows[0].f_unencoded == pytest.approx(1.0, abs=1e-12)
    assert rows[1].f_encoded < 1.0
    path = tmp_path / "s.csv"
    write_sweep_csv(rows, path)
    got = list(csv.reader(open(path)))
    assert got[0] == ["gamma", "f_encoded", "f_unencoded", "decode_failure_rate"]
    assert len(got) == 3
    assert isinstance(rows[0], SweepRow)
