"""Why bit flips cannot be corrected with a small encoding region.

Everything here lives in the single-excitation picture.  The reflection
``R = exp(i h1 t0/2) D exp(-i h1 t0/2)`` with ``D = diag(-1 x N/2, +1 x N/2)``
describes a bit flip on the middle of the chain half way through the
transfer; its leading M x M block ``W`` has a singular value 1 exactly when
some mode returns to the encoding region untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ChainSpec, _eig, standard_chain
from .pauli import single
from .sectors import Evolver, SectorVector

UNIT_TOL = 1e-8


@dataclass(frozen=True)
class ReflectionOperator:
    N: int
    R: np.ndarray

    def involution_error(self) -> float:
        return float(np.abs(self.R @ self.R - np.eye(self.N)).max())

    def hermiticity_error(self) -> float:
        return float(np.abs(self.R - self.R.conj().T).max())


@dataclass(frozen=True)
class ReturnModes:
    M: int
    W: np.ndarray
    singular_values: np.ndarray
    eigenvalues: np.ndarray
    modes: np.ndarray  # columns are the mode vectors in the encoding region

    def unit_count(self, tol: float = UNIT_TOL) -> int:
        return int(np.sum(np.abs(self.singular_values - 1.0) <= tol))

    @property
    def gap(self) -> float:
        return float(1.0 - self.singular_values.max())


def compute_R(spec: ChainSpec) -> ReflectionOperator:
    N = spec.N
    if N % 2:
        raise ValueError("the reflection operator needs an even chain length")
    e, v = _eig(spec)
    half = (v * np.exp(-1j * e * spec.t0 / 2)) @ v.T
    D = np.diag(np.r_[-np.ones(N // 2), np.ones(N // 2)])
    R = half.conj().T @ D @ half
    return ReflectionOperator(N, R)


def compute_W(ref: ReflectionOperator, M: int) -> ReturnModes:
    if not 1 <= M <= ref.N:
        raise ValueError("M must lie in 1..N")
    W = ref.R[:M, :M]
    sv = np.linalg.svd(W, compute_uv=False)
    ev, modes = np.linalg.eigh(0.5 * (W + W.conj().T))
    return ReturnModes(M, W, sv, ev, modes)


def disc_bound_report(ref: ReflectionOperator, M: int) -> list[dict]:
    """Per-row Gershgorin data for the leading block.

    For each row: the diagonal entry, the in-block mass sum_{j<=M} |w_ij|^2,
    the mass outside the block, and the antidiagonal mass |R_{i,N+1-i}|^2,
    which lies outside the block whenever M <= N/2.
    """
    N = ref.N
    if M > N // 2:
        raise ValueError("the disc bound applies for M <= N/2")
    R = ref.R
    rows = []
    for i in range(M):
        inside = float(np.sum(np.abs(R[i, :M]) ** 2))
        outside = float(np.sum(np.abs(R[i, M:]) ** 2))
        anti = float(abs(R[i, N - 1 - i]) ** 2)
        rows.append(
            {
                "row": i + 1,
                "diagonal": float(abs(R[i, i])),
                "row_sum": inside,
                "excluded": outside,
                "antidiagonal": anti,
                "bounded": inside <= 1.0 - anti + 1e-12,
            }
        )
    return rows


def symmetric_eigenvectors(spec: ChainSpec) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs ordered by decreasing eigenvalue with the sign convention
    lambda_{N+1-n,k} = (-1)^{k+1} lambda_{n,k} enforced exactly.

    Returns (values[n], vectors[n, k]).
    """
    e, v = _eig(spec)
    order = np.argsort(-e)
    e, v = e[order], v[:, order].T.copy()
    N = spec.N
    if np.min(np.diff(-e)) < 1e-9:
        raise ArithmeticError("degenerate single-excitation spectrum")
    signs = (-1.0) ** np.arange(N)  # (-1)^{k+1} with k 1-based
    for n in range(N // 2):
        partner = signs * v[n]
        dot = float(partner @ v[N - 1 - n])
        if abs(abs(dot) - 1) > 1e-9:
            raise ArithmeticError("spectrum is not symmetric about zero")
        v[N - 1 - n] = partner
    return e, v


def recurrence_residual(spec: ChainSpec) -> float:
    """max |lambda_n lambda_{n,k} - J_{k-1} lambda_{n,k-1} - J_k lambda_{n,k+1}|."""
    e, v = symmetric_eigenvectors(spec)
    J = np.r_[0.0, spec.J, 0.0]
    pad = np.pad(v, ((0, 0), (1, 1)))
    rhs = J[None, :-1] * pad[:, :-2] + J[None, 1:] * pad[:, 2:]
    lhs = e[:, None] * v - np.asarray(spec.B)[None, :] * v
    return float(np.abs(lhs - rhs).max())


@dataclass(frozen=True)
class AntidiagReport:
    direct: np.ndarray
    telescoped: np.ndarray
    printed: np.ndarray
    exact_deviation: float
    magnitude_deviation: float
    sign_agreement: bool


def verify_antidiag_formula(spec: ChainSpec) -> AntidiagReport:
    """Compare <lambda_n|D|lambda_{N+1-n}> with closed forms.

    The direct value comes from the eigenvectors.  The telescoped form
    -2 (-1)^{N/2+1} J_{N/2} lambda_{n,N/2} lambda_{n,N/2+1} / lambda_n follows
    from summing the recurrence; mirror symmetry turns it into the squared
    form 2 lambda_{n,N/2+1}^2 J_{N/2} (-1)^{N/2+1} / lambda_n up to a sign,
    so the squared form is compared in magnitude.
    """
    N = spec.N
    if N % 2:
        raise ValueError("needs an even chain length")
    e, v = symmetric_eigenvectors(spec)
    h = N // 2
    D = np.r_[-np.ones(h), np.ones(h)]
    direct = np.array([np.sum(v[n] * D * v[N - 1 - n]) for n in range(N)])
    Jm = spec.J[h - 1]
    sgn = (-1.0) ** (h + 1)
    telescoped = -2 * sgn * Jm * v[:, h - 1] * v[:, h] / e
    printed = 2 * v[:, h] ** 2 * Jm * sgn / e
    scale = np.maximum(np.abs(direct), 1e-300)
    exact = float(np.max(np.abs(direct - telescoped) / scale))
    mag = float(np.max(np.abs(np.abs(direct) - np.abs(printed)) / scale))
    return AntidiagReport(direct, telescoped, printed, exact, mag, bool(np.allclose(direct, printed)))


# ---------------------------------------------------------------------------
# repetition-code experiment


@dataclass(frozen=True)
class RepetitionResult:
    N: int
    rep: int
    err_site: int
    t_err: float
    bit_error_0: float
    bit_error_1: float
    avg_infidelity: float

    @property
    def error_probability(self) -> float:
        """Worst case over the two logical basis inputs of a wrong majority vote."""
        return max(self.bit_error_0, self.bit_error_1)


def repetition_experiment(
    N: int,
    rep: int,
    err_site: int | None = None,
    t_err: float | None = None,
    pauli: str | None = "X",
    spec: ChainSpec | None = None,
) -> RepetitionResult:
    """Send a repetition-encoded bit through the chain with one Pauli error.

    The block |0..0> / |1..1> starts on sites 1..rep; at t0 the last rep
    sites are read in Z and majority voted.  Bit errors are reported per
    basis input, plus one minus the six-state average fidelity of the
    coherent majority decoder (which carries the known transfer phase).
    ``pauli=None`` runs without an error.
    """
    if rep < 1 or rep % 2 == 0:
        raise ValueError("rep must be odd and positive")
    spec = spec or standard_chain(N)
    t0 = spec.t0
    err_site = (N + 1) // 2 if err_site is None else err_site
    t_err = t0 / 2 if t_err is None else t_err
    if not 1 <= err_site <= N:
        raise ValueError("error site out of range")
    ev = Evolver(spec)
    ones = (1 << rep) - 1
    off = N - rep
    vecs = []
    for bits in (0, ones):
        v = SectorVector.basis_state(N, bits).evolve(ev, t_err)
        if pauli:
            v = v.apply_pauli(single(N, pauli, err_site - 1))
        vecs.append(v.evolve(ev, t0 - t_err))
    # transfer phase of |1..1>, relative to |0..0>
    arrive = SectorVector.basis_state(N, ones).evolve(ev, t0).vdot(SectorVector.basis_state(N, ones << off))
    vac = SectorVector.basis_state(N, 0).evolve(ev, t0).vdot(SectorVector.basis_state(N, 0))
    rel = (arrive / abs(arrive)) / (vac / abs(vac))
    phis = [v.region_matrix(off, rep) for v in vecs]
    maj = np.array([int(bin(b).count("1") > rep // 2) for b in range(1 << rep)])
    p0 = np.abs(phis[0]) ** 2
    p1 = np.abs(phis[1]) ** 2
    e0 = float(p0[:, maj == 1].sum())
    e1 = float(p1[:, maj == 0].sum())

    # coherent decoder: region string b -> logical maj(b), junk b ^ maj(b)*ones
    idx = np.arange(1 << rep)
    junk = idx[maj == 0]
    chan = {}
    for i in range(2):
        for j in range(2):
            Rr = phis[i].T @ phis[j].conj()
            out = np.zeros((2, 2), dtype=complex)
            for m in range(2):
                for mp in range(2):
                    out[m, mp] = np.sum(Rr[junk ^ (m * ones), junk ^ (mp * ones)])
            chan[(i, j)] = out
    fix = np.diag([1.0, np.conj(rel)])
    fids = []
    from .dynamics import SIX_STATES

    for a, b in SIX_STATES:
        c = np.array([a, b], dtype=complex)
        rho = sum(c[i] * np.conj(c[j]) * chan[(i, j)] for i in range(2) for j in range(2))
        rho = fix @ rho @ fix.conj().T
        fids.append(float(np.real(c.conj() @ rho @ c)))
    return RepetitionResult(N, rep, err_site, float(t_err), e0, e1, float(1 - np.mean(fids)))


# ---------------------------------------------------------------------------
# M = N/2 + 1: two logical states told apart by excitation number


@dataclass(frozen=True)
class DistinguishabilityReport:
    N: int
    M: int
    dist_zero: np.ndarray
    dist_one: np.ndarray
    leak_zero: float
    leak_one: float

    @property
    def passed(self) -> bool:
        return self.leak_zero < 1e-10 and self.leak_one < 1e-10


def trivial_distinguishability_check(spec: ChainSpec, M: int) -> DistinguishabilityReport:
    """|0>^N versus |1>^M |0>^{N-M}, an X on site N/2+1 at t0/2.

    The first leaves at most one excitation on the decoding region, the
    second at least two.
    """
    N = spec.N
    if N % 2 or M != N // 2 + 1:
        raise ValueError("needs an even chain and M = N/2 + 1")
    ev = Evolver(spec)
    t0 = spec.t0
    off = N - M
    dists = []
    for bits in (0, (1 << M) - 1):
        v = SectorVector.basis_state(N, bits).evolve(ev, t0 / 2)
        v = v.apply_pauli(single(N, "X", N // 2)).evolve(ev, t0 / 2)
        dists.append(v.excitation_distribution(off, M))
    d0, d1 = dists
    return DistinguishabilityReport(N, M, d0, d1, float(d0[2:].sum()), float(d1[:2].sum()))
