"""
CSV emission with fixed column order and round-trip float formatting
"""
import io
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from ..exceptions import DomainError
from ..modes.eigenmode import Eigenmode, sample_mode
from ..simulation.integrator import EnergyTrace
from ..spectrum.roots import SpectralRoot
from ..utils.file_utils import write_text_file

logger = logging.getLogger(__name__)

SPECTRUM_COLUMNS = ['index', 'z', 'lambda_im', 'residual', 'family', 'family_k']
MODE_COLUMNS = ['edge', 'kind', 'x', 'phi']
RESOLVENT_COLUMNS = ['beta', 'norm', 'norm_over_beta']


def frame_to_csv(frame: pd.DataFrame, header_lines: Optional[List[str]] = None) -> str:
    """CSV text with LF endings; optional '#' comment lines first"""
    buffer = io.StringIO()
    for line in header_lines or []:
        buffer.write(f"# {line}\n")
    frame.to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def spectrum_frame(roots: List[SpectralRoot]) -> pd.DataFrame:
    rows = [{
        'index': root.index,
        'z': root.z,
        'lambda_im': root.lambda_im,
        'residual': root.residual,
        'family': root.family or '',
        'family_k': root.family_k if root.family_k is not None else ''
    } for root in roots]
    return pd.DataFrame(rows, columns=SPECTRUM_COLUMNS)


def write_spectrum_csv(roots: List[SpectralRoot], path: Path) -> Path:
    """index,z,lambda_im,residual,family,family_k"""
    logger.info(f"Writing {len(roots)} roots to {path}")
    return write_text_file(path, frame_to_csv(spectrum_frame(roots)))


def write_mode_csv(mode: Eigenmode, path: Path, points_per_edge: int = 101) -> Path:
    """Sampled phi per edge under a header with the coefficients and residuals"""
    header = [f"z={mode.z!r}", f"seminorm_scale={mode.seminorm_scale!r}"]
    for coeffs in mode.per_edge:
        header.append(f"edge {coeffs.edge} {coeffs.kind.value} {coeffs.basis} coeffs="
                      + json.dumps([float(c) for c in coeffs.coeffs]))
    header.append("residuals=" + json.dumps(mode.residuals, sort_keys=True))

    frame = pd.DataFrame(sample_mode(mode, points_per_edge), columns=MODE_COLUMNS)
    return write_text_file(path, frame_to_csv(frame, header))


def write_trace_csv(trace: EnergyTrace, path: Path) -> Path:
    """t,E,diss_total,diss_term_1..K,balance_residual"""
    logger.info(f"Writing {len(trace.t)} trace samples to {path}")
    return write_text_file(path, frame_to_csv(trace.to_frame()))


def read_trace_csv(path: Path) -> EnergyTrace:
    frame = pd.read_csv(path, comment='#', float_precision='round_trip')
    missing = {'t', 'E'} - set(frame.columns)
    if missing:
        raise DomainError(f"{path} lacks trace columns {sorted(missing)}")
    return EnergyTrace.from_frame(frame)


def write_resolvent_csv(rows: List[Dict], path: Path) -> Path:
    """beta,norm,norm_over_beta"""
    return write_text_file(path, frame_to_csv(pd.DataFrame(rows, columns=RESOLVENT_COLUMNS)))


def write_json_report(report: Dict, path: Path) -> Path:
    return write_text_file(path, json.dumps(report, indent=2, sort_keys=True, default=str) + "\n")
