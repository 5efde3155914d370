"""On-line signature verification toolkit."""

from ._sigverify import (
    DegenerateInputError,
    Error,
    FormatError,
    IoError,
    Signature,
    ValidationError,
    dtw,
    eer,
    evaluate,
    normalize_config,
    parse_signature,
    path_signature,
    rank_teams,
    score_comparisons,
    sigstat_global_score,
    sigstat_local_score,
    soft_dtw,
    soft_dtw_value_and_grad,
    tanh_normalize,
    triplet_loss,
    write_synthetic,
)

__all__ = [
    "DegenerateInputError",
    "Error",
    "FormatError",
    "IoError",
    "Signature",
    "ValidationError",
    "dtw",
    "eer",
    "evaluate",
    "normalize_config",
    "parse_signature",
    "path_signature",
    "rank_teams",
    "score_comparisons",
    "sigstat_global_score",
    "sigstat_local_score",
    "soft_dtw",
    "soft_dtw_value_and_grad",
    "tanh_normalize",
    "triplet_loss",
    "write_synthetic",
]
