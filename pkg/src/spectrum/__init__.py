"""
Transfer-matrix spectrum of the conservative chain
"""
from .transfer import (
    GapReport,
    asymptotic_char_fn,
    asymptotic_gap_check,
    asymptotic_remainder,
    beam_matrix,
    char_fn,
    coupling_T,
    coupling_T_inv,
    eval_M,
    propagate_node_vectors,
    string_matrix,
    transfer_product,
)
from .roots import (
    AsymptoticFamily,
    FamilyClassifier,
    SpectralRoot,
    asymptotic_families,
    classification_summary,
    classify_roots,
    family_predictions,
    find_spectrum,
    generalized_gap,
    simple_gap,
)

__all__ = [
    "GapReport",
    "asymptotic_char_fn",
    "asymptotic_gap_check",
    "asymptotic_remainder",
    "beam_matrix",
    "char_fn",
    "coupling_T",
    "coupling_T_inv",
    "eval_M",
    "propagate_node_vectors",
    "string_matrix",
    "transfer_product",
    "AsymptoticFamily",
    "FamilyClassifier",
    "SpectralRoot",
    "asymptotic_families",
    "classification_summary",
    "classify_roots",
    "family_predictions",
    "find_spectrum",
    "generalized_gap",
    "simple_gap",
]
