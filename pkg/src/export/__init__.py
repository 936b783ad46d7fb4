"""
CSV and SVG artifacts
"""
from .csv_writer import (
    read_trace_csv,
    write_json_report,
    write_mode_csv,
    write_resolvent_csv,
    write_spectrum_csv,
    write_trace_csv,
)
from .svg_plot import LinePlot, energy_plot, spectrum_plot

__all__ = [
    "read_trace_csv",
    "write_json_report",
    "write_mode_csv",
    "write_resolvent_csv",
    "write_spectrum_csv",
    "write_trace_csv",
    "LinePlot",
    "energy_plot",
    "spectrum_plot",
]
