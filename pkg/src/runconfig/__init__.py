"""
Run configuration: TOML files validated into typed sections
"""
from .loader import dump_config, load_config, loads_config, parse_config
from .models import (
    DecaySection,
    GeometrySection,
    ModesSection,
    OutputSection,
    ResolventSection,
    RunConfig,
    SimulateSection,
    SpectrumSection,
)

__all__ = [
    "dump_config",
    "load_config",
    "loads_config",
    "parse_config",
    "DecaySection",
    "GeometrySection",
    "ModesSection",
    "OutputSection",
    "ResolventSection",
    "RunConfig",
    "SimulateSection",
    "SpectrumSection",
]
