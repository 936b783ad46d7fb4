"""
Chain geometry and length-condition witnesses
"""
from .geometry import ChainGeometry, EdgeKind, validate_chain
from .rationality import RationalityReport, rationality_witness, stability_witness

__all__ = [
    "ChainGeometry",
    "EdgeKind",
    "validate_chain",
    "RationalityReport",
    "rationality_witness",
    "stability_witness",
]
