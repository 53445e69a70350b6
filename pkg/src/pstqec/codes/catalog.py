"""Bundled CSS code tables and their mechanical verification.

Data files use the plain-text matrix format with ``# key: value`` headers.
``layout: check`` files hold one matrix used as both H1 and G2.
``layout: table`` files hold generator rows of C1 split by a ``-`` line:
rows above the line generate C2, all rows together generate C1.
"""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

from .. import gf2
from ..gf2 import BinMatrix, MatrixFormatError
from .stabilizer import (
    CssCode,
    build_error_map,
    classify_case,
    code_distance,
    is_valid_stabilizer,
    lemma1_pair_check,
    majorana_distance,
    perfect_check,
    restricted_parity_check,
)

DATA = resources.files(__package__) / "data"
NAMES = ("steane-7", "hamming-15", "hamming-31", "golay-23", "css-13", "css-15", "case3-10")


class IntegrityError(RuntimeError):
    """A bundled data file does not match its recorded checksum."""


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    code: CssCode
    claims: dict
    description: str = ""


@dataclass(frozen=True)
class VerificationReport:
    name: str
    M: int
    k: int
    symplectic_valid: bool
    nested: bool
    d1: int
    d2: int
    majorana_distance: int
    case: str
    perfect: bool
    lemma1_pair_check: bool
    restricted_parity_check: bool

    def to_dict(self) -> dict:
        return asdict(self)

    def mismatches(self, claims: dict) -> dict:
        """Claims that disagree with the computed values: {key: (claimed, computed)}."""
        computed = {
            "d1": self.d1,
            "d2": self.d2,
            "case": self.case,
            "perfect": self.perfect,
            "lemma1": self.lemma1_pair_check,
            "restricted": self.restricted_parity_check,
        }
        return {k: (v, computed[k]) for k, v in claims.items() if computed.get(k) != v}


def catalog_checksums() -> dict[str, str]:
    out = {}
    for line in (DATA / "SHA256SUMS").read_text().splitlines():
        if line.strip():
            digest, fname = line.split()
            out[fname] = digest
    return out


def _parse_claim(value: str):
    if value in ("true", "false"):
        return value == "true"
    if value.isdigit():
        return int(value)
    return value


def parse_code_file(text: str, name: str = "") -> CatalogEntry:
    headers: dict[str, str] = {}
    above: list[str] = []
    below: list[str] = []
    seen_line = False
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("#"):
            if ":" in s:
                key, val = s[1:].split(":", 1)
                headers[key.strip()] = val.strip()
            continue
        if not s:
            continue
        if s == "-":
            seen_line = True
            continue
        (below if seen_line else above).append(s)
    if not above:
        raise MatrixFormatError("code file has no matrix rows")
    layout = headers.get("layout", "check")
    top = BinMatrix.parse("\n".join(above))
    if "M" in headers and int(headers["M"]) != top.cols:
        raise MatrixFormatError("header M does not match the matrix width")
    if layout == "check":
        H1 = G2 = top
    elif layout == "table":
        G1 = top.vstack(BinMatrix.parse("\n".join(below))) if below else top
        G2 = top
        H1 = gf2.nullspace(G1)
    else:
        raise MatrixFormatError(f"unknown layout {layout!r}")
    claims = {k[len("claim-"):]: _parse_claim(v) for k, v in headers.items() if k.startswith("claim-")}
    name = headers.get("name", name)
    return CatalogEntry(name, CssCode(H1, G2, name), claims, headers.get("description", ""))


def load_entry(name: str, check: bool = True) -> CatalogEntry:
    fname = f"{name}.txt"
    raw = (DATA / fname).read_bytes()
    if check:
        expected = catalog_checksums().get(fname)
        if expected is None or hashlib.sha256(raw).hexdigest() != expected:
            raise IntegrityError(f"checksum mismatch for {fname}")
    return parse_code_file(raw.decode(), name)


def catalog() -> list[CatalogEntry]:
    return [load_entry(n) for n in NAMES]


def get(name_or_path: str) -> CatalogEntry:
    """A catalog entry by name, or a code file on disk."""
    if name_or_path in NAMES:
        return load_entry(name_or_path)
    p = Path(name_or_path)
    if not p.exists():
        raise FileNotFoundError(f"no catalog entry or file named {name_or_path!r}")
    return parse_code_file(p.read_text(), p.stem)


def verify_code(code: CssCode, name: str = "") -> VerificationReport:
    stab = code.stabilizer()
    M = code.M
    d1 = code_distance(check=code.H1)
    d2 = code_distance(check=code.G2)
    k = stab.k
    t = (min(d1, d2) - 1) // 2
    return VerificationReport(
        name=name or code.name,
        M=M,
        k=k,
        symplectic_valid=is_valid_stabilizer(stab.generators),
        nested=code.is_nested(),
        d1=d1,
        d2=d2,
        majorana_distance=majorana_distance(stab, build_error_map(M, "Eprime")),
        case=classify_case(stab),
        perfect=perfect_check(M, k, t),
        lemma1_pair_check=lemma1_pair_check(stab),
        restricted_parity_check=restricted_parity_check(stab),
    )


def verify_catalog_entry(entry: CatalogEntry) -> VerificationReport:
    return verify_code(entry.code, entry.name)
