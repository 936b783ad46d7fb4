"""
Exception hierarchy shared by every chainwave module
"""
from typing import Optional


class ChainwaveError(Exception):
    """Base class for all chainwave errors"""

    exit_code = 3


class GeometryError(ChainwaveError, ValueError):
    """Invalid chain geometry"""


class EmptyInput(GeometryError):
    """No edge lengths were given"""

    def __init__(self):
        super().__init__("edge length list is empty")


class OddEdgeCount(GeometryError):
    """A chain needs an even number 2N of edges"""

    def __init__(self, count: int):
        self.count = count
        super().__init__(f"chain must have an even number of edges, got {count}")


class NonPositiveLength(GeometryError):
    """An edge length is zero, negative or not finite"""

    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"edge {index} has non-positive length {value!r}")


class DomainError(ChainwaveError, ValueError):
    """Argument outside the domain of a pure function"""


class PoleEncountered(ChainwaveError):
    """Beam transfer matrix denominator too close to zero"""

    def __init__(self, z: float, edge: Optional[int], denominator: float):
        self.z = z
        self.edge = edge
        self.denominator = denominator
        where = f" on edge {edge}" if edge is not None else ""
        super().__init__(f"beam matrix pole at z={z!r}{where} (denominator {denominator:.3e})")


class InvalidRange(ChainwaveError, ValueError):
    """Scan range or grid is malformed"""


class InsufficientRoots(ChainwaveError):
    """Not enough roots for the requested statistic"""


class NotARoot(ChainwaveError):
    """z does not satisfy the characteristic equation to tolerance"""

    def __init__(self, z: float, residual: float):
        self.z = z
        self.residual = residual
        super().__init__(f"z={z!r} is not a root (|f(z)|={residual:.3e})")


class IllConditionedEdgeSolve(ChainwaveError):
    """Per-edge coefficient solve is numerically singular"""

    def __init__(self, edge: int, condition: float):
        self.edge = edge
        self.condition = condition
        super().__init__(f"edge {edge} coefficient system ill-conditioned (cond {condition:.3e})")


class MeshTooCoarse(ChainwaveError, ValueError):
    """Mesh size leaves fewer than the minimum number of elements on an edge"""

    def __init__(self, edge: int, elements: int, minimum: int):
        self.edge = edge
        self.elements = elements
        self.minimum = minimum
        super().__init__(f"edge {edge} gets {elements} elements, at least {minimum} required")


class SolverFailure(ChainwaveError):
    """Sparse linear solve failed or produced non-finite values"""


class EigSolverFailure(ChainwaveError):
    """Generalized eigenvalue solve failed"""


class WindowOutOfRange(ChainwaveError, ValueError):
    """Decay-fit window not covered by the trace"""


class NonpositiveEnergy(ChainwaveError, ValueError):
    """Energy vanished inside the decay-fit window"""


class ConfigError(ChainwaveError):
    """Run configuration could not be loaded"""

    exit_code = 2


class ParseError(ConfigError):
    """Config file is not valid TOML"""

    def __init__(self, line: Optional[int], message: str):
        self.line = line
        self.message = message
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class ValidationError(ConfigError):
    """Config value rejected"""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")
