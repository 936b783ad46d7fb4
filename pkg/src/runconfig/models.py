"""
Run configuration schema
"""
import math
from pathlib import Path
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import (
    DEFAULT_K_MAX,
    DEFAULT_MESH_SIZE,
    DEFAULT_ROOT_TOL,
    DEFAULT_SAMPLE_EVERY,
    DEFAULT_SCAN_POINTS,
    DEFAULT_T_END,
    DEFAULT_Z_MAX,
    DEFAULT_Z_MIN,
    INITIAL_DATA,
    MIN_ELEMENTS_PER_EDGE,
    OUTPUT_DIR,
)
from ..chain.geometry import ChainGeometry, validate_chain
from ..simulation.assembly import Variant


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GeometrySection(Section):
    """Edge lengths in chain order; n_pairs is optional and must agree"""

    lengths: List[float]
    n_pairs: Optional[int] = Field(default=None, ge=1)

    @field_validator("lengths")
    @classmethod
    def lengths_form_chain(cls, value: List[float]) -> List[float]:
        validate_chain(value)
        return value

    @model_validator(mode="after")
    def pairs_match(self) -> "GeometrySection":
        if self.n_pairs is not None and 2 * self.n_pairs != len(self.lengths):
            raise ValueError(f"n_pairs: {self.n_pairs} pairs need {2 * self.n_pairs} lengths, "
                             f"got {len(self.lengths)}")
        return self

    def chain(self) -> ChainGeometry:
        return validate_chain(self.lengths)


class SpectrumSection(Section):
    z_min: float = Field(default=DEFAULT_Z_MIN, gt=0)
    z_max: float = Field(default=DEFAULT_Z_MAX, gt=0)
    scan_points: int = Field(default=DEFAULT_SCAN_POINTS, ge=16)
    tol: float = Field(default=DEFAULT_ROOT_TOL, gt=0)
    k_max: int = Field(default=DEFAULT_K_MAX, ge=1)

    @model_validator(mode="after")
    def ordered_range(self) -> "SpectrumSection":
        if self.z_max <= self.z_min:
            raise ValueError(f"z_range: z_max={self.z_max} must exceed z_min={self.z_min}")
        return self


class ModesSection(Section):
    count: int = Field(default=5, ge=1)
    points_per_edge: int = Field(default=101, ge=2)


class SimulateSection(Section):
    variant: Variant = Variant.P2
    h: float = Field(default=DEFAULT_MESH_SIZE, gt=0)
    dt: Optional[float] = Field(default=None, gt=0)
    t_end: float = Field(default=DEFAULT_T_END, gt=0)
    sample_every: int = Field(default=DEFAULT_SAMPLE_EVERY, ge=1)
    samples_per_decade: Optional[int] = Field(default=None, ge=1)
    initial: str = "bump"
    project: bool = True

    @field_validator("initial")
    @classmethod
    def known_initial_data(cls, value: str) -> str:
        if value not in INITIAL_DATA:
            raise ValueError(f"unknown initial data {value!r}, expected one of {sorted(INITIAL_DATA)}")
        return value

    @property
    def time_step(self) -> float:
        return self.dt if self.dt is not None else self.h / 2.0


class ResolventSection(Section):
    """Either an explicit beta list or a log-spaced range; beta_max defaults to the trust horizon"""

    variant: Variant = Variant.P2
    h: float = Field(default=DEFAULT_MESH_SIZE, gt=0)
    betas: Optional[List[float]] = None
    beta_min: float = Field(default=10.0, gt=0)
    beta_max: Optional[float] = Field(default=None, gt=0)
    count: int = Field(default=24, ge=2)

    @field_validator("betas")
    @classmethod
    def positive_betas(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and (not value or any(b <= 0 for b in value)):
            raise ValueError("betas must be a non-empty list of positive values")
        return value

    @field_validator("variant")
    @classmethod
    def damped_variant(cls, value: Variant) -> Variant:
        if value == Variant.PC:
            raise ValueError("the conservative variant has no bounded resolvent on the imaginary axis")
        return value

    @model_validator(mode="after")
    def ordered_range(self) -> "ResolventSection":
        if self.beta_max is not None and self.beta_max <= self.beta_min:
            raise ValueError(f"beta_range: beta_max={self.beta_max} must exceed beta_min={self.beta_min}")
        return self


class DecaySection(Section):
    window: Tuple[float, float] = (10.0, 1000.0)

    @field_validator("window")
    @classmethod
    def window_after_one(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        if not (1.0 < value[0] < value[1]):
            raise ValueError(f"window {value} must satisfy 1 < t_lo < t_hi")
        return value


class OutputSection(Section):
    directory: Path = OUTPUT_DIR
    emit_svg: bool = True


class RunConfig(Section):
    """Validated contents of one TOML run file"""

    geometry: GeometrySection
    spectrum: SpectrumSection = SpectrumSection()
    modes: ModesSection = ModesSection()
    simulate: SimulateSection = SimulateSection()
    resolvent: ResolventSection = ResolventSection()
    decay: DecaySection = DecaySection()
    output: OutputSection = OutputSection()

    @model_validator(mode="after")
    def meshes_resolve_chain(self) -> "RunConfig":
        shortest = min(self.geometry.lengths)
        for name, h in (("simulate", self.simulate.h), ("resolvent", self.resolvent.h)):
            if math.ceil(shortest / h - 1e-9) < MIN_ELEMENTS_PER_EDGE:
                raise ValueError(f"{name}.h: h={h} leaves fewer than {MIN_ELEMENTS_PER_EDGE} "
                                 f"elements on an edge of length {shortest}")
        return self
