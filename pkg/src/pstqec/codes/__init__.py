"""Stabilizer/CSS codes, Majorana error maps and the bundled code catalog."""

from .catalog import (
    CatalogEntry,
    IntegrityError,
    VerificationReport,
    catalog,
    catalog_checksums,
    get,
    load_entry,
    parse_code_file,
    verify_catalog_entry,
    verify_code,
)
from .search import bounded_search
from .stabilizer import (
    CssCode,
    ErrorMap,
    MalformedCodeError,
    StabilizerCode,
    build_error_map,
    classify_case,
    is_valid_stabilizer,
    lemma1_pair_check,
    majorana_distance,
    parity_permutation,
    perfect_check,
    restricted_parity_check,
    syndrome_matrix,
)
