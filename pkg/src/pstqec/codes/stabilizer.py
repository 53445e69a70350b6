"""Stabilizer and CSS codes judged against Majorana-fermion errors.

Symplectic vectors are packed ints ``z | (x << M)``.  A stabilizer matrix
has one such row per generator; commutation is the symplectic form
``S . Lambda . S^T`` with ``Lambda = [[0, 1], [1, 0]]``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .. import gf2
from ..gf2 import BinMatrix
from ..pauli import Pauli


class MalformedCodeError(ValueError):
    pass


def symp(u: int, v: int, M: int) -> int:
    """Symplectic inner product of two packed (z|x) vectors."""
    mask = (1 << M) - 1
    return ((u & mask) & (v >> M)).bit_count() + ((u >> M) & (v & mask)).bit_count() & 1


def lambda_matrix(M: int) -> BinMatrix:
    z = BinMatrix.zeros(M, M)
    one = BinMatrix.identity(M)
    return gf2.block([[z, one], [one, z]])


def all_ones_z(M: int) -> int:
    return (1 << M) - 1


@dataclass(frozen=True)
class StabilizerCode:
    M: int
    generators: BinMatrix
    logicals: tuple[tuple[int, int], ...] = ()
    name: str = ""

    def __post_init__(self):
        if self.generators.cols != 2 * self.M:
            raise MalformedCodeError("generators need 2M columns")

    @property
    def k(self) -> int:
        return self.M - gf2.rank(self.generators)

    def stabilizer_paulis(self) -> list[Pauli]:
        return [Pauli.from_symplectic(self.M, v) for v in self.generators.bits]

    def logical_paulis(self) -> list[tuple[Pauli, Pauli]]:
        return [(Pauli.from_symplectic(self.M, z), Pauli.from_symplectic(self.M, x)) for z, x in self.logicals]

    def in_stabilizer_group(self, v: int) -> bool:
        return gf2.in_rowspace(v, self.generators)

    def syndrome(self, e: int) -> int:
        out = 0
        for i, g in enumerate(self.generators.bits):
            if symp(g, e, self.M):
                out |= 1 << i
        return out


@dataclass(frozen=True)
class CssCode:
    H1: BinMatrix
    G2: BinMatrix
    name: str = ""
    d1: int | None = None
    d2: int | None = None

    @property
    def M(self) -> int:
        return self.H1.cols

    def is_nested(self) -> bool:
        """C2 subset of C1, i.e. H1 G2^T = 0."""
        return (self.H1 @ self.G2.T).is_zero()

    def stabilizer(self) -> StabilizerCode:
        M = self.M
        h1 = gf2.row_basis(self.H1)
        g2 = gf2.row_basis(self.G2)
        gens = h1.hstack(BinMatrix.zeros(h1.rows, M)).vstack(BinMatrix.zeros(g2.rows, M).hstack(g2))
        return StabilizerCode(M, gens, css_logicals(h1, g2), self.name)


def css_logicals(H1: BinMatrix, G2: BinMatrix) -> tuple[tuple[int, int], ...]:
    """Pure-Z / pure-X logical pairs, preferring the all-ones operators."""
    M = H1.cols
    ones = all_ones_z(M)
    zcands = _quotient_basis(gf2.nullspace(G2), H1, prefer=ones)
    xcands = _quotient_basis(gf2.nullspace(H1), G2, prefer=ones)
    if len(zcands) != len(xcands):
        raise MalformedCodeError("logical Z/X counts differ")
    pairs = []
    xs = list(xcands)
    for z in zcands:
        j = next(i for i, x in enumerate(xs) if (z & x).bit_count() & 1)
        x = xs.pop(j)
        # keep remaining X's commuting with this Z and earlier Z's commuting with x
        xs = [y ^ x if (z & y).bit_count() & 1 else y for y in xs]
        pairs.append([z, x])
    for i in range(len(pairs)):
        for j in range(len(pairs)):
            if i != j and (pairs[j][0] & pairs[i][1]).bit_count() & 1:
                pairs[j][0] ^= pairs[i][0]
    return tuple((z, x << M) for z, x in pairs)


def _quotient_basis(space: BinMatrix, sub: BinMatrix, prefer: int | None = None) -> list[int]:
    """Vectors completing a basis of ``sub`` to a basis of ``space``."""
    basis = gf2.row_basis(sub)
    chosen: list[int] = []
    cands = list(space.bits)
    if prefer is not None and gf2.in_rowspace(prefer, space):
        cands = [prefer] + cands
    for v in cands:
        trial = BinMatrix(basis.rows + 1, space.cols, basis.bits + (v,))
        if gf2.rank(trial) > basis.rows:
            basis = trial
            chosen.append(v)
    return chosen


def is_valid_stabilizer(S: BinMatrix) -> bool:
    """Generators mutually commute and are independent."""
    if S.cols % 2:
        raise MalformedCodeError("stabilizer matrix needs an even number of columns")
    M = S.cols // 2
    for a, b in combinations(S.bits, 2):
        if symp(a, b, M):
            return False
    return gf2.rank(S) == S.rows


# ---------------------------------------------------------------------------
# error maps


def upper_ones(M: int) -> BinMatrix:
    """Strictly upper-triangular all-ones matrix."""
    return BinMatrix(M, M, tuple(((1 << M) - 1) ^ ((1 << (i + 1)) - 1) for i in range(M)))


@dataclass(frozen=True)
class ErrorMap:
    """Columns are physical errors written as (z|x) vectors.

    ``labels[j]`` names column ``j``: ``("c", m)`` for the Majorana ``c_m``
    (1-based, ``m > M`` is the Y-type mode) or ``("Z", n)`` for a dephasing
    error on qubit ``n``.
    """

    M: int
    kind: str
    perm: tuple[int, ...]
    matrix: BinMatrix
    labels: tuple[tuple[str, int], ...] = field(default=())

    def column(self, j: int) -> int:
        return self.matrix.column_ints()[j]

    def columns(self) -> list[int]:
        return self.matrix.column_ints()

    def by_label(self) -> dict[tuple[str, int], int]:
        cols = self.columns()
        return {lab: cols[j] for j, lab in enumerate(self.labels)}


def build_error_map(M: int, kind: str = "Eprime", perm: Sequence[int] | None = None) -> ErrorMap:
    """E = [[J, J+1], [1, 1]] P  or  E' = [[1, J], [0, 1]] P.

    ``perm[j]`` is the base column placed at position ``j``.
    """
    perm = tuple(range(2 * M)) if perm is None else tuple(perm)
    if sorted(perm) != list(range(2 * M)):
        raise ValueError("perm must be a permutation of 0..2M-1")
    J = upper_ones(M)
    one = BinMatrix.identity(M)
    zero = BinMatrix.zeros(M, M)
    if kind == "E":
        base = gf2.block([[J, J + one], [one, one]])
        base_labels = [("c", j + 1) for j in range(2 * M)]
    elif kind == "Eprime":
        base = gf2.block([[one, J], [zero, one]])
        base_labels = [("Z", j + 1) for j in range(M)] + [("c", j + 1) for j in range(M)]
    else:
        raise ValueError(f"unknown error map kind {kind!r}")
    mat = base.select_columns(perm)
    gf2.inverse(mat)  # raises if singular
    return ErrorMap(M, kind, perm, mat, tuple(base_labels[p] for p in perm))


def parity_permutation(M: int) -> tuple[int, ...]:
    """Order E's Majorana columns as (even-parity modes | odd-parity modes).

    Odd parity: c_{2n-1} and c_{M+2n}; these take the Z-error half.
    """
    odd, even = [], []
    for j in range(2 * M):
        site = j % M + 1
        is_odd = site % 2 == 1 if j < M else site % 2 == 0
        (odd if is_odd else even).append(j)
    return tuple(even + odd)


def syndrome_matrix(code: StabilizerCode, em: ErrorMap) -> BinMatrix:
    """S . Lambda . E; column j is the syndrome of error j."""
    if code.M != em.M:
        raise ValueError("code and error map sizes differ")
    return code.generators @ lambda_matrix(code.M) @ em.matrix


def majorana_distance(code: StabilizerCode, em: ErrorMap, columns: Sequence[int] | None = None) -> int:
    """Smallest number of error columns with a trivial combined syndrome."""
    S = syndrome_matrix(code, em)
    if columns is not None:
        S = S.select_columns(columns)
    if S.rows == 0:
        return 1
    return gf2.column_distance(S)


# ---------------------------------------------------------------------------
# correctable-set checks


def distinguishable(code: StabilizerCode, errors: Iterable[int]) -> bool:
    """Every syndrome collision differs by a stabilizer (degenerate-correctable)."""
    r, _, piv = gf2.rref(code.generators)
    groups: dict[int, int] = {}
    for e in errors:
        s = code.syndrome(e)
        if s not in groups:
            groups[s] = e
        elif gf2.reduce_vector(groups[s] ^ e, r, piv):
            return False
    return True


def colliding_pair(code: StabilizerCode, errors: Iterable[int]) -> tuple[int, int] | None:
    r, _, piv = gf2.rref(code.generators)
    groups: dict[int, int] = {}
    for e in errors:
        s = code.syndrome(e)
        if s not in groups:
            groups[s] = e
        elif gf2.reduce_vector(groups[s] ^ e, r, piv):
            return groups[s], e
    return None


def lemma1_errors(em: ErrorMap) -> list[int]:
    """Identity, single Z, single c_p (with or without Z_p), and every pair
    c_p c_q together with any Z's on {p, q}."""
    if em.kind != "Eprime":
        raise ValueError("the pair criterion is stated for the E' map")
    cols = em.by_label()
    M = em.M
    Z = {n: cols[("Z", n)] for n in range(1, M + 1)}
    C = {n: cols[("c", n)] for n in range(1, M + 1)}
    errs = [0]
    errs += list(Z.values())
    for p in range(1, M + 1):
        errs += [C[p], C[p] ^ Z[p]]
    for p, q in combinations(range(1, M + 1), 2):
        base = C[p] ^ C[q]
        errs += [base, base ^ Z[p], base ^ Z[q], base ^ Z[p] ^ Z[q]]
    return errs


def lemma1_pair_check(css: CssCode | StabilizerCode, em: ErrorMap | None = None) -> bool:
    code = css.stabilizer() if isinstance(css, CssCode) else css
    em = em or build_error_map(code.M, "Eprime")
    return distinguishable(code, lemma1_errors(em))


def restricted_errors(em: ErrorMap) -> list[int]:
    """Identity, one even-parity mode, one odd-parity mode, one of each.

    The first M columns of ``em`` are the even class, the last M the odd.
    """
    M = em.M
    cols = em.columns()
    even, odd = cols[:M], cols[M:]
    errs = [0] + even + odd
    errs += [a ^ b for a in even for b in odd]
    return errs


def restricted_parity_check(code: CssCode | StabilizerCode, em: ErrorMap | None = None) -> bool:
    code = code.stabilizer() if isinstance(code, CssCode) else code
    em = em or build_error_map(code.M, "E", parity_permutation(code.M))
    return distinguishable(code, restricted_errors(em))


def classify_case(code: CssCode | StabilizerCode) -> str:
    """'iii' if Z^M is a stabilizer, 'ii' if it is a logical, else 'i'."""
    code = code.stabilizer() if isinstance(code, CssCode) else code
    ones = all_ones_z(code.M)
    if code.in_stabilizer_group(ones):
        return "iii"
    if code.syndrome(ones) == 0:
        return "ii"
    return "i"


def perfect_check(M: int, k: int, t: int) -> bool:
    """2^M == 2^k (sum_{i<=t} C(M, i))^2 for k logical qubits."""
    if k < 0 or t < 0:
        return False
    ball = sum(comb(M, i) for i in range(t + 1))
    return (1 << M) == (1 << k) * ball * ball


def distinct_restricted_syndromes(code: CssCode | StabilizerCode, em: ErrorMap | None = None) -> int:
    code = code.stabilizer() if isinstance(code, CssCode) else code
    em = em or build_error_map(code.M, "E", parity_permutation(code.M))
    return len({code.syndrome(e) for e in restricted_errors(em)})


def code_distance(generator: BinMatrix | None = None, check: BinMatrix | None = None) -> int:
    """Distance of a classical code from either description.

    Enumerates codewords when the dimension allows, otherwise searches for
    the smallest dependent column set of the check matrix.
    """
    if generator is None and check is None:
        raise ValueError("need a generator or a check matrix")
    if generator is None:
        generator = gf2.nullspace(check)
    if gf2.rank(generator) <= gf2.MAX_ENUM_ROWS:
        return gf2.min_weight(generator)
    if check is None:
        check = gf2.nullspace(generator)
    return gf2.column_distance(check)


def syndrome_groups(code: StabilizerCode, errors: Iterable[int]) -> dict[int, list[int]]:
    out: dict[int, list[int]] = defaultdict(list)
    for e in errors:
        out[code.syndrome(e)].append(e)
    return dict(out)
