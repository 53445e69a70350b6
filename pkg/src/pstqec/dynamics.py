"""Encoded state transfer under dephasing, decoded in the arrival frame.

The code is placed on sites 1..M with the rest of the chain in |0...0>.
After the transfer time the information sits on sites N-M+1..N.  Instead of
undoing the mirror and the controlled-phase pattern explicitly, the code's
stabilizers and logicals are pushed through the noiseless evolution in the
Majorana picture; syndrome extraction and recovery then act on the reduced
state of the decoding region.

Logical channels are built by linearity from the images of |i_L><j_L|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .chain import ChainSpec, majorana_propagator
from .codes.stabilizer import StabilizerCode
from .pauli import Pauli, identity, majorana, majorana_decompose, single
from .sectors import Evolver, SectorState, SectorVector, _hamming, cross_reduced, sector_basis

FRAME_TOL = 1e-10


class FrameError(RuntimeError):
    """The code does not map onto the decoding region (no perfect transfer)."""


class EncodingError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# codewords


def _project(vec: np.ndarray, ops: Sequence[Pauli]) -> np.ndarray:
    for p in ops:
        vec = 0.5 * (vec + p.apply(vec))
    return vec


def codewords(stabilizers: Sequence[Pauli], logical_z: Pauli, logical_x: Pauli) -> np.ndarray:
    """Columns |0_L>, |1_L> on the code qubits (dense, 2^M x 2)."""
    M = logical_z.n
    dim = 1 << M
    ops = list(stabilizers) + [logical_z]
    for seed in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[seed] = 1.0
        v = _project(e, ops)
        nrm = np.linalg.norm(v)
        if nrm > 1e-6:
            v0 = v / nrm
            return np.stack([v0, logical_x.apply(v0)], axis=1)
    raise EncodingError("stabilizers and logical Z have no common +1 eigenvector")


@dataclass(frozen=True)
class LogicalCode:
    """A code with explicit Pauli operators (phases included) and k = 1."""

    M: int
    stabilizers: tuple[Pauli, ...]
    logical_z: Pauli
    logical_x: Pauli
    name: str = ""

    @classmethod
    def from_stabilizer_code(cls, code: StabilizerCode) -> "LogicalCode":
        if not code.logicals:
            raise EncodingError("code has no logical operators")
        if len(code.logicals) != 1:
            raise EncodingError("simulation supports one logical qubit")
        z, x = code.logicals[0]
        M = code.M
        return cls(
            M,
            tuple(code.stabilizer_paulis()),
            Pauli.from_symplectic(M, z),
            Pauli.from_symplectic(M, x),
            code.name,
        )

    @classmethod
    def trivial(cls) -> "LogicalCode":
        """One bare qubit: no stabilizers, Z_L = Z, X_L = X."""
        return cls(1, (), single(1, "Z", 0), single(1, "X", 0), "bare")

    def basis(self) -> np.ndarray:
        return codewords(self.stabilizers, self.logical_z, self.logical_x)

    def symplectic_code(self) -> StabilizerCode:
        from .gf2 import BinMatrix

        gens = BinMatrix(len(self.stabilizers), 2 * self.M, tuple(p.symplectic() for p in self.stabilizers))
        logicals = ((self.logical_z.symplectic(), self.logical_x.symplectic()),)
        return StabilizerCode(self.M, gens, logicals, self.name)


def encode_vector(code: LogicalCode, alpha: complex, beta: complex, N: int) -> SectorVector:
    if code.M > N:
        raise ValueError("code does not fit on the chain")
    W = code.basis()
    return SectorVector.product(N, alpha * W[:, 0] + beta * W[:, 1], 0)


def logical_vectors(code: LogicalCode, N: int) -> tuple[SectorVector, SectorVector]:
    W = code.basis()
    return SectorVector.product(N, W[:, 0], 0), SectorVector.product(N, W[:, 1], 0)


def encode(code: LogicalCode, alpha: complex, beta: complex, N: int) -> SectorState:
    """|psi_L><psi_L| on sites 1..M times |0><0| on the rest."""
    return SectorState.from_vector(encode_vector(code, alpha, beta, N))


def encode_operator(code: LogicalCode, i: int, j: int, N: int) -> SectorState:
    """|i_L><j_L| (x) |0><0|."""
    a, b = logical_vectors(code, N)
    return SectorState.outer((a, b)[i], (a, b)[j])


# ---------------------------------------------------------------------------
# arrival frame


@dataclass(frozen=True)
class ArrivalFrame:
    """Code operators after the noiseless transfer, on the decoding region.

    ``offset`` is the 0-based first site of the region; the rest of the
    chain is assumed to be the vacuum, on which any leftover Z string acts
    as +1.
    """

    N: int
    offset: int
    code: LogicalCode

    @property
    def M(self) -> int:
        return self.code.M

    def stabilizer_code(self) -> StabilizerCode:
        return self.code.symplectic_code()


def mode_map(spec: ChainSpec, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Signed permutation U c_m U^dagger = sign[m] c_{target[m]} (0-based).

    Raises FrameError unless every mode maps to a single mode.
    """
    O = majorana_propagator(spec, -t).O
    target = np.argmax(np.abs(O), axis=0)
    vals = O[target, np.arange(O.shape[1])]
    resid = np.abs(O).sum(axis=0) - np.abs(vals)
    if np.max(np.abs(np.abs(vals) - 1.0)) > FRAME_TOL or np.max(resid) > FRAME_TOL * O.shape[0]:
        raise FrameError("Majorana modes do not transfer to single modes; chain is not PST at this time")
    return target, np.sign(vals)


def push_pauli(p: Pauli, target: np.ndarray, signs: np.ndarray) -> Pauli:
    """U p U^dagger for a Pauli on the full chain, given the mode map."""
    modes, k = majorana_decompose(p)
    out = Pauli(p.n, 0, 0, k)
    sign = 1
    for m in modes:
        out = out * majorana(p.n, int(target[m - 1]) + 1)
        sign *= int(signs[m - 1])
    if sign < 0:
        out = Pauli(out.n, out.z, out.x, (out.phase + 2) % 4)
    return out


def _to_region(p: Pauli, offset: int, width: int, rest_parity: int | None = None) -> Pauli:
    """Restrict a pushed operator to the region.

    With ``rest_parity=None`` the rest is the vacuum and any Z's there act as
    +1.  Otherwise the rest is only known to be an eigenstate of the full Z
    string with the given sign, so the leftover must be all or nothing.
    """
    N = p.n
    rmask = ((1 << width) - 1) << offset
    rest = ((1 << N) - 1) ^ rmask
    if p.x & rest:
        raise FrameError("operator has bit flips outside the decoding region")
    phase = p.phase
    if rest_parity is not None:
        zr = p.z & rest
        if zr not in (0, rest):
            raise FrameError("partial Z string outside the region")
        if zr and rest_parity < 0:
            phase = (phase + 2) % 4
    return Pauli(width, (p.z & rmask) >> offset, (p.x & rmask) >> offset, phase)


def arrival_frame(
    code: LogicalCode,
    spec: ChainSpec,
    t: float | None = None,
    rest_parity: int | None = None,
    source_offset: int = 0,
    target_offset: int | None = None,
) -> ArrivalFrame:
    """Push the code from sites ``source_offset..`` through evolution for ``t``.

    Defaults: from sites 1..M over the transfer time onto sites N-M+1..N.
    A negative ``t`` gives the pre-image frame.
    """
    N, M = spec.N, code.M
    if M > N:
        raise ValueError("code does not fit on the chain")
    t = spec.t0 if t is None else t
    target, signs = mode_map(spec, t)
    offset = N - M if target_offset is None else target_offset

    def push(p: Pauli) -> Pauli:
        return _to_region(push_pauli(p.embed(N, source_offset), target, signs), offset, M, rest_parity)

    mapped = LogicalCode(
        M, tuple(push(s) for s in code.stabilizers), push(code.logical_z), push(code.logical_x), code.name
    )
    return ArrivalFrame(N, offset, mapped)


# ---------------------------------------------------------------------------
# syndromes and recovery


def syndrome_of(stabilizers: Sequence[Pauli], e: Pauli) -> int:
    s = 0
    for i, g in enumerate(stabilizers):
        if not g.commutes(e):
            s |= 1 << i
    return s


def region_majorana_parity(frame: ArrivalFrame, m: int) -> int:
    """1 for the odd class of the chain, 0 for the even class (m is 1-based local)."""
    M = frame.M
    site = frame.offset + (m - 1) % M + 1
    if m <= M:
        return site % 2
    return 1 - site % 2


def correctable_errors(frame: ArrivalFrame, kind: str = "restricted") -> list[Pauli]:
    """Candidate errors on the decoding region, most likely first.

    ``restricted``: identity, one Majorana, or one of each parity class.
    ``pairs``: every product of at most two Majoranas.
    """
    M = frame.M
    modes = range(1, 2 * M + 1)
    ms = {m: majorana(M, m) for m in modes}
    out = [identity(M)] + [ms[m] for m in modes]
    for a, b in combinations(modes, 2):
        if kind == "restricted" and region_majorana_parity(frame, a) == region_majorana_parity(frame, b):
            continue
        if kind not in ("restricted", "pairs"):
            raise ValueError(f"unknown correctable set {kind!r}")
        out.append(ms[a] * ms[b])
    return out


@dataclass
class SyndromeTable:
    """Syndrome -> correction Pauli on the decoding region."""

    n_stabilizers: int
    corrections: dict[int, Pauli]
    conflicts: int = 0
    frames: np.ndarray | None = field(default=None, repr=False, compare=False)

    def lookup(self, s: int) -> Pauli | None:
        return self.corrections.get(s)


def build_table(frame: ArrivalFrame, kind: str = "restricted") -> SyndromeTable:
    """First-listed error wins each syndrome; non-degenerate clashes are counted."""
    from .gf2 import BinMatrix, in_rowspace

    stabs = frame.code.stabilizers
    M = frame.M
    gens = BinMatrix(len(stabs), 2 * M, tuple(p.symplectic() for p in stabs))
    table: dict[int, Pauli] = {}
    conflicts = 0
    for e in correctable_errors(frame, kind):
        s = syndrome_of(stabs, e)
        if s not in table:
            table[s] = e
        elif len(stabs) and not in_rowspace(table[s].symplectic() ^ e.symplectic(), gens):
            conflicts += 1
        elif not len(stabs) and (table[s].symplectic() ^ e.symplectic()):
            conflicts += 1
    return SyndromeTable(len(stabs), table, conflicts)


@dataclass
class Recovery:
    """Logical 2x2 output of syndrome measurement plus correction."""

    logical: np.ndarray
    failed_weight: float

    @property
    def failed(self) -> bool:
        return self.failed_weight > 1e-12


def _correction_frames(frame: ArrivalFrame, table: SyndromeTable) -> np.ndarray:
    """Columns C_s |0_L>, C_s |1_L> for every table entry (2^M x 2n).

    C_s^dagger equals C_s up to a global phase, which drops out of
    B^dagger rho B.
    """
    if table.frames is None:
        W = frame.code.basis()
        cols = []
        for c in table.corrections.values():
            cols.append(c.apply(W[:, 0]))
            cols.append(c.apply(W[:, 1]))
        table.frames = np.stack(cols, axis=1)
    return table.frames


def measure_correct(rho_region: np.ndarray, frame: ArrivalFrame, table: SyndromeTable) -> Recovery:
    """Apply rho -> sum_s C_s P_s rho P_s C_s^dagger and read out the code space.

    With W the arrival codewords, W^dagger C_s P_s = W^dagger C_s whenever
    C_s carries syndrome s, so each term is (C_s^dagger W)^dagger rho (C_s^dagger W).
    Syndromes missing from the table fall back to the identity; that weight
    leaves the code space and is reported as ``failed_weight``.
    """
    B = _correction_frames(frame, table)
    X = rho_region @ B
    n = B.shape[1] // 2
    # sum over syndromes of the 2x2 diagonal blocks of B^dagger rho B
    out = np.einsum("ksi,ksj->ij", B.conj().reshape(-1, n, 2), X.reshape(-1, n, 2))
    n_syn = 1 << table.n_stabilizers
    failed = 0.0
    if len(table.corrections) < n_syn:
        failed = max(0.0, float(np.trace(rho_region).real - np.trace(out).real))
    return Recovery(out, failed)


def logical_fidelity(logical: np.ndarray, alpha: complex, beta: complex) -> float:
    psi = np.array([alpha, beta], dtype=complex)
    return float(np.real(psi.conj() @ logical @ psi))


# ---------------------------------------------------------------------------
# logical channels


SIX_STATES = [
    (1.0, 0.0),
    (0.0, 1.0),
    (1 / math.sqrt(2), 1 / math.sqrt(2)),
    (1 / math.sqrt(2), -1 / math.sqrt(2)),
    (1 / math.sqrt(2), 1j / math.sqrt(2)),
    (1 / math.sqrt(2), -1j / math.sqrt(2)),
]


@dataclass
class LogicalChannel:
    """Images of |i><j| under the full encode-transfer-decode pipeline."""

    images: dict[tuple[int, int], np.ndarray]
    failed_weight: float = 0.0

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(rho[i, j] * self.images[(i, j)] for i in range(2) for j in range(2))

    def fidelity(self, alpha: complex, beta: complex) -> float:
        psi = np.array([alpha, beta], dtype=complex)
        return logical_fidelity(self.apply(np.outer(psi, psi.conj())), alpha, beta)


def average_fidelity(channel: LogicalChannel | Callable[[complex, complex], float]) -> float:
    """Uniform average over the six Pauli eigenstates (exact Haar average)."""
    f = channel.fidelity if isinstance(channel, LogicalChannel) else channel
    return float(np.mean([f(a, b) for a, b in SIX_STATES]))


def identity_channel() -> LogicalChannel:
    imgs = {}
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, j] = 1
            imgs[(i, j)] = e
    return LogicalChannel(imgs)


# ---------------------------------------------------------------------------
# open-system evolution


def dephasing_factors(N: int, a: int, b: int, gamma: float, dt: float) -> np.ndarray:
    return np.exp(-2.0 * gamma * dt * _hamming(N, a, b))


def evolve_dephasing(
    state: SectorState,
    spec: ChainSpec,
    gamma: float,
    T: float,
    steps: int = 64,
    evolver: Evolver | None = None,
) -> SectorState:
    """Integrate d rho/dt = -i[H, rho] + gamma sum_n (Z_n rho Z_n - rho).

    Strang splitting: half dephasing, exact unitary step, half dephasing,
    with adjacent half-steps merged.  Both pieces act blockwise.
    """
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    if T < 0:
        raise ValueError("T must be non-negative")
    ev = evolver or Evolver(spec)
    if gamma == 0 or T == 0:
        return state.conjugate_unitary(ev, T)
    if steps < 1:
        raise ValueError("steps must be positive")
    N = spec.N
    dt = T / steps
    us = {w: ev.unitary(w, dt) for w in state.sectors()}
    out = {}
    for (a, b), blk in state.blocks.items():
        half = dephasing_factors(N, a, b, gamma, dt / 2)
        full = half * half
        ua, ubh = us[a], us[b].conj().T
        x = half * blk
        for i in range(steps):
            x = ua @ x @ ubh
            x = (full if i < steps - 1 else half) * x
        out[(a, b)] = x
    return SectorState(N, out)


def insert_discrete_error(
    state: SectorState,
    kind: str,
    site: int,
    spec: ChainSpec,
    t_err: float,
    evolver: Evolver | None = None,
) -> SectorState:
    """Noiseless evolution to ``t_err``, a Pauli on 1-based ``site``, evolution to t0."""
    if not 1 <= site <= spec.N:
        raise ValueError(f"site {site} out of range 1..{spec.N}")
    if not 0 <= t_err <= spec.t0 + 1e-12:
        raise ValueError("error time must lie in [0, t0]")
    ev = evolver or Evolver(spec)
    s = state.conjugate_unitary(ev, t_err)
    s = s.apply_pauli(single(spec.N, kind, site - 1))
    return s.conjugate_unitary(ev, spec.t0 - t_err)


@dataclass
class Protocol:
    """Encode on sites 1..M, transfer, decode on sites N-M+1..N."""

    spec: ChainSpec
    code: LogicalCode
    correctable: str = "restricted"
    evolver: Evolver = field(init=False)
    frame: ArrivalFrame = field(init=False)
    table: SyndromeTable = field(init=False)

    def __post_init__(self):
        self.evolver = Evolver(self.spec)
        self.frame = arrival_frame(self.code, self.spec)
        self.table = build_table(self.frame, self.correctable)

    @property
    def region(self) -> tuple[int, int]:
        return self.frame.offset, self.code.M

    def decode(self, rho_region: np.ndarray) -> Recovery:
        return measure_correct(rho_region, self.frame, self.table)

    def channel_from_states(self, final: Callable[[int, int], SectorState]) -> LogicalChannel:
        """Build the logical channel given final states of |i_L><j_L|."""
        imgs = {}
        failed = 0.0
        for i, j in [(0, 0), (1, 1), (0, 1)]:
            rec = self.decode(final(i, j).reduced(*self.region))
            imgs[(i, j)] = rec.logical
            if i == j:
                failed = max(failed, rec.failed_weight)
        imgs[(1, 0)] = imgs[(0, 1)].conj().T
        return LogicalChannel(imgs, failed)

    def dephasing_channel(self, gamma: float, steps: int = 64) -> LogicalChannel:
        N = self.spec.N

        def final(i, j):
            op = encode_operator(self.code, i, j, N)
            return evolve_dephasing(op, self.spec, gamma, self.spec.t0, steps, self.evolver)

        return self.channel_from_states(final)

    def single_error_channel(self, kind: str, site: int, t_err: float) -> LogicalChannel:
        """Pure-state fast path: one Pauli error at a given site and time."""
        if not 1 <= site <= self.spec.N:
            raise ValueError(f"site {site} out of range 1..{self.spec.N}")
        N = self.spec.N
        p = single(N, kind, site - 1)
        vs = []
        for v in logical_vectors(self.code, N):
            v = v.evolve(self.evolver, t_err).apply_pauli(p).evolve(self.evolver, self.spec.t0 - t_err)
            vs.append(v)
        imgs = {}
        failed = 0.0
        for i, j in [(0, 0), (1, 1), (0, 1)]:
            rec = self.decode(cross_reduced(vs[i], vs[j], *self.region))
            imgs[(i, j)] = rec.logical
            if i == j:
                failed = max(failed, rec.failed_weight)
        imgs[(1, 0)] = imgs[(0, 1)].conj().T
        return LogicalChannel(imgs, failed)

    def noiseless_channel(self) -> LogicalChannel:
        N = self.spec.N
        vs = [v.evolve(self.evolver, self.spec.t0) for v in logical_vectors(self.code, N)]
        imgs = {}
        for i in range(2):
            for j in range(2):
                imgs[(i, j)] = self.decode(cross_reduced(vs[i], vs[j], *self.region)).logical
        return LogicalChannel(imgs)


def _frame_channel(frame: ArrivalFrame, table: SyndromeTable, vs: Sequence[SectorVector]) -> LogicalChannel:
    imgs = {}
    for i in range(2):
        for j in range(2):
            rec = measure_correct(cross_reduced(vs[i], vs[j], frame.offset, frame.M), frame, table)
            imgs[(i, j)] = rec.logical
    return LogicalChannel(imgs)


@dataclass(frozen=True)
class CaseIIResult:
    fidelity: float
    outcome_probabilities: tuple[float, ...]
    rest_parities: tuple[int, ...]


def _rest_state(n: int, rest_state) -> np.ndarray:
    dim = 1 << n
    v = np.zeros(dim, dtype=complex)
    if rest_state is None or rest_state == "zeros":
        v[0] = 1
    elif rest_state == "ones":
        v[dim - 1] = 1
    else:
        rng = np.random.default_rng(int(rest_state))
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        v /= np.linalg.norm(v)
    return v


def case_ii_preparation(spec: ChainSpec, code: LogicalCode, rest_state="zeros", correctable: str = "restricted") -> CaseIIResult:
    """Prepare an arbitrary chain for transfer by acting on the two end regions.

    1. The decoding region holds the +1 eigenstate of the pre-images of the
       stabilizers and of X_L; sites 1..N-M hold ``rest_state`` ("zeros",
       "ones" or an integer seed for a Haar-random state).
    2. After t0 the stabilizers and X_L are measured on sites 1..M.  The
       outcome fixes the Z-string parity of the rest of the chain.
    3. A fresh logical state replaces sites 1..M and is transferred; the
       decoder uses the arrival frame for the measured parity.

    Returns the six-state average fidelity averaged over outcomes.
    """
    N, M = spec.N, code.M
    if code.logical_z.z != (1 << M) - 1 or code.logical_z.x:
        raise ValueError("case (ii) needs Z_L = Z^M")
    if N > 14:
        raise ValueError("full-space simulation limited to N <= 14")
    ev = Evolver(spec)
    nrest = N - M
    # step 1: the pre-image frame on the decoding region
    pre = arrival_frame(code, spec, -spec.t0, rest_parity=1)
    phi = codewords(pre.code.stabilizers, pre.code.logical_x, pre.code.logical_z)[:, 0]
    psi0 = np.kron(phi, _rest_state(nrest, rest_state))  # region bits above the rest bits
    state = SectorVector.from_dense(psi0).evolve(ev, spec.t0)
    # step 2: joint eigenbasis of stabilizers and X_L on sites 1..M
    psi = state.to_dense().reshape(1 << nrest, 1 << M)
    ops = list(code.stabilizers) + [code.logical_x]
    probs, parities, fids = [], [], []
    zrest = 1 - 2 * (np.array([bin(i).count("1") for i in range(1 << nrest)]) & 1)
    for pattern in range(1 << len(ops)):
        signed = [Pauli(M, o.z, o.x, (o.phase + 2 * ((pattern >> i) & 1)) % 4) for i, o in enumerate(ops)]
        e = None
        for seed in range(1 << M):
            v = np.zeros(1 << M, dtype=complex)
            v[seed] = 1
            v = _project(v, signed)
            if np.linalg.norm(v) > 1e-6:
                e = v / np.linalg.norm(v)
                break
        if e is None:
            continue
        r = psi @ e.conj()
        pr = float(np.vdot(r, r).real)
        if pr < 1e-14:
            continue
        r = r / np.sqrt(pr)
        par = float(np.real(np.vdot(r, zrest * r)))
        if abs(abs(par) - 1) > 1e-8:
            raise FrameError("measurement did not fix the parity of the rest of the chain")
        p = 1 if par > 0 else -1
        # step 3: fresh logical transfer with the known parity
        frame = arrival_frame(code, spec, rest_parity=p)
        table = build_table(frame, correctable)
        W = code.basis()
        vs = [SectorVector.from_dense(np.kron(r, W[:, i])).evolve(ev, spec.t0) for i in range(2)]
        fids.append(average_fidelity(_frame_channel(frame, table, vs)))
        probs.append(pr)
        parities.append(p)
    total = sum(probs)
    fid = float(sum(pr * f for pr, f in zip(probs, fids)) / total)
    return CaseIIResult(fid, tuple(probs), tuple(parities))


def unencoded_protocol(spec: ChainSpec) -> Protocol:
    """A bare qubit sent from site 1 and read at site N in its arrival frame."""
    return Protocol(spec, LogicalCode.trivial(), "restricted")


@dataclass
class SweepRow:
    gamma: float
    f_encoded: float
    f_unencoded: float
    decode_failure_rate: float


def run_sweep(
    spec: ChainSpec,
    code: LogicalCode,
    gammas: Iterable[float],
    steps: int = 64,
    correctable: str = "restricted",
    progress: Callable[[SweepRow], None] | None = None,
) -> list[SweepRow]:
    enc = Protocol(spec, code, correctable)
    bare = unencoded_protocol(spec)
    rows = []
    for g in gammas:
        ch = enc.dephasing_channel(g, steps)
        row = SweepRow(
            float(g),
            average_fidelity(ch),
            average_fidelity(bare.dephasing_channel(g, steps)),
            ch.failed_weight,
        )
        rows.append(row)
        if progress:
            progress(row)
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["gamma", "f_encoded", "f_unencoded", "decode_failure_rate"])
        for r in rows:
            w.writerow([f"{r.gamma:.12g}", f"{r.f_encoded:.15f}", f"{r.f_unencoded:.15f}", f"{r.decode_failure_rate:.15f}"])


def single_error_grid(
    protocol: Protocol, kind: str = "Z", sites: Iterable[int] | None = None, n_times: int = 21
) -> np.ndarray:
    """Average fidelity after one Pauli error, indexed [site, time]."""
    sites = list(range(1, protocol.spec.N + 1)) if sites is None else list(sites)
    times = np.linspace(0.0, protocol.spec.t0, n_times)
    out = np.zeros((len(sites), n_times))
    for a, s in enumerate(sites):
        for b, t in enumerate(times):
            out[a, b] = average_fidelity(protocol.single_error_channel(kind, s, float(t)))
    return out


# ---------------------------------------------------------------------------
# dense reference


def dense_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """Full 2^N matrix of sum_n J_n/2 (XX + YY) - sum_n B_n/2 Z_n."""
    N = spec.N
    dim = 1 << N
    H = np.zeros((dim, dim), dtype=complex)
    for n in range(N - 1):
        for kind in "XY":
            p = single(N, kind, n) * single(N, kind, n + 1)
            H += 0.5 * spec.J[n] * p.matrix()
    for n in range(N):
        H -= 0.5 * spec.B[n] * single(N, "Z", n).matrix()
    return H


def dense_lindblad_evolve(rho: np.ndarray, spec: ChainSpec, gamma: float, T: float) -> np.ndarray:
    """Exact exponential of the full Liouvillian (small N only)."""
    from scipy.linalg import expm

    N = spec.N
    dim = 1 << N
    H = dense_hamiltonian(spec)
    eye = np.eye(dim)
    # row-major vec: vec(A rho B) = (A kron B^T) vec(rho)
    L = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for n in range(N):
        Z = single(N, "Z", n).matrix()
        L += gamma * (np.kron(Z, Z.T) - np.kron(eye, eye))
    v = expm(L * T) @ rho.reshape(-1)
    return v.reshape(dim, dim)


def sector_basis_order(N: int) -> np.ndarray:
    return np.concatenate([sector_basis(N, w) for w in range(N + 1)])
