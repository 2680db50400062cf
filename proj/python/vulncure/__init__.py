"""Python bindings for the vulncure NVD curation library."""

from ._vulncure import (
    FormatError,
    IoError,
    LookupError,
    MissingPrerequisite,
    PreconditionError,
    RangeError,
    UndecidedPairsError,
    VulncureError,
    Workspace,
    __version__,
    abbreviation,
    estimate_disclosure,
    extract_cwe_ids,
    extract_domain,
    levenshtein,
    longest_common_substring,
    normalize_tokens,
    page_date,
    preprocess_description,
    score_to_label,
    sha256_hex,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
