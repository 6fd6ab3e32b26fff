"""Bibliographic coupling over hashed reference subsets."""

from ._core import (
    DEFAULT_HASH_FN_ID,
    AttackEstimate,
    ConfigMismatchError,
    CorruptFileError,
    EmptyKeyError,
    EmptySetError,
    HashSet,
    InvalidParameterError,
    InvertedIndex,
    IoError,
    MalformedRecordError,
    NotBinomialError,
    PbcError,
    TooFewRefsError,
    bc_strength,
    binomial,
    dblp_preset,
    digest_reference,
    estimate,
    generate_corpus,
    hash_keys,
    hash_titles,
    inverse_binomial,
    load_corpus,
    min_universe_for_budget,
    normalize_title,
    pbc_strength,
    recovered_bc,
)

__all__ = [name for name in dir() if not name.startswith("_")]
