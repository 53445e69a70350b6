"""Randomized search for small CSS codes with one logical qubit.

C2 is drawn as ``r`` random rows; C1 is C2 plus one extra row ``v``.
Case (iii) needs every word of C1 to have even weight, so both the rows of
G2 and ``v`` are even.  Case (ii) needs even G2 rows (so Z^M commutes with
the X stabilizers) and an odd ``v`` (so Z^M is not itself a stabilizer).
"""

from __future__ import annotations

import numpy as np

from .. import gf2
from ..gf2 import BinMatrix
from .stabilizer import CssCode, classify_case

MAX_SEARCH_M = 16


def feasible_ranks(M: int, d1: int, d2: int) -> list[int]:
    """Row counts of G2 allowed by the Singleton bound on C1 and C2-dual."""
    return [r for r in range(1, M) if d2 <= r + 1 and d1 <= M - r]


def _random_row(rng: np.random.Generator, M: int, parity: int | None) -> int:
    while True:
        v = int(rng.integers(1, 1 << M))
        if parity is None or v.bit_count() % 2 == parity:
            return v


def bounded_search(
    M: int, d1: int, d2: int, case: str = "i", budget: int = 20000, seed: int = 0
) -> CssCode | None:
    """First verified code found within ``budget`` candidates, else None.

    A None result only means the budget ran out; it proves nothing about
    existence.
    """
    if M > MAX_SEARCH_M:
        raise ValueError(f"search is limited to M <= {MAX_SEARCH_M}")
    if case not in ("i", "ii", "iii"):
        raise ValueError(f"unknown case {case!r}")
    ranks = feasible_ranks(M, d1, d2)
    if not ranks:
        return None
    row_parity = None if case == "i" else 0
    v_parity = {"i": None, "ii": 1, "iii": 0}[case]
    rng = np.random.default_rng(seed)
    tried = 0
    while tried < budget:
        for r in ranks:
            if tried >= budget:
                break
            tried += 1
            G2 = BinMatrix(r, M, tuple(_random_row(rng, M, row_parity) for _ in range(r)))
            if gf2.rank(G2) < r:
                continue
            if not gf2.cols_independent_up_to(G2, d2 - 1):
                continue
            if gf2.min_weight(G2) < d1:
                continue
            for _ in range(8):
                v = _random_row(rng, M, v_parity)
                G1 = G2.vstack(BinMatrix(1, M, (v,)))
                if gf2.rank(G1) <= r or gf2.min_weight(G1) < d1:
                    continue
                code = CssCode(gf2.nullspace(G1), G2, f"search-{M}-{case}", d1, d2)
                if case == "i" or classify_case(code) == case:
                    return code
    return None
