"""
Chain geometry: 2N serially connected edges, strings on odd indices, beams on even
"""
import logging
import math
from enum import Enum
from typing import Iterable, List, Tuple

from pydantic import BaseModel, ConfigDict

from ..exceptions import EmptyInput, NonPositiveLength, OddEdgeCount

logger = logging.getLogger(__name__)


class EdgeKind(str, Enum):
    """Edge type, fixed by index parity"""

    STRING = "string"
    BEAM = "beam"


class ChainGeometry(BaseModel):
    """Validated chain of alternating string and beam edges"""

    model_config = ConfigDict(frozen=True)

    n_pairs: int
    lengths: Tuple[float, ...]

    @property
    def edge_count(self) -> int:
        return 2 * self.n_pairs

    def kind(self, j: int) -> EdgeKind:
        """Edge kind for 1-based index j"""
        if not 1 <= j <= self.edge_count:
            raise IndexError(f"edge index {j} outside 1..{self.edge_count}")
        return EdgeKind.STRING if j % 2 == 1 else EdgeKind.BEAM

    def length(self, j: int) -> float:
        """Length of 1-based edge j"""
        return self.lengths[j - 1]

    def string_lengths(self) -> List[float]:
        return list(self.lengths[0::2])

    def beam_lengths(self) -> List[float]:
        return list(self.lengths[1::2])

    def total_length(self) -> float:
        return float(sum(self.lengths))


def validate_chain(raw_lengths: Iterable[float]) -> ChainGeometry:
    """
    Validate raw edge lengths and build a chain geometry

    Args:
        raw_lengths: Lengths l_1..l_2N in edge order

    Returns:
        ChainGeometry with n_pairs = len(lengths) / 2

    Raises:
        EmptyInput, OddEdgeCount, NonPositiveLength
    """
    lengths = [float(value) for value in raw_lengths]

    if not lengths:
        raise EmptyInput()

    if len(lengths) % 2 != 0:
        raise OddEdgeCount(len(lengths))

    for index, value in enumerate(lengths, start=1):
        if not math.isfinite(value) or value <= 0.0:
            raise NonPositiveLength(index, value)

    geom = ChainGeometry(n_pairs=len(lengths) // 2, lengths=tuple(lengths))
    logger.debug(f"Validated chain with N={geom.n_pairs}, lengths={lengths}")
    return geom
