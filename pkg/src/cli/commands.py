"""
Subcommand handlers: each takes a validated RunConfig and an output directory
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional

from ..chain.rationality import stability_witness
from ..export.csv_writer import (
    read_trace_csv,
    write_json_report,
    write_mode_csv,
    write_resolvent_csv,
    write_spectrum_csv,
    write_trace_csv,
)
from ..export.svg_plot import energy_plot, spectrum_plot
from ..exceptions import InsufficientRoots
from ..modes.eigenmode import build_eigenmodes, multiplicity_check, node_trace_sum, node_trace_sum_p2
from ..runconfig.models import RunConfig
from ..simulation.assembly import discretize
from ..simulation.decay import fit_polynomial_decay
from ..simulation.integrator import initial_state, simulate
from ..simulation.resolvent import beta_grid, resolvent_norm_sweep, sweep_summary, trust_horizon
from ..spectrum.roots import (
    SpectralRoot,
    classification_summary,
    classify_roots,
    family_predictions,
    find_spectrum,
    generalized_gap,
    simple_gap,
)
from ..utils.file_utils import create_directory

logger = logging.getLogger(__name__)


def compute_spectrum(config: RunConfig, z_max: Optional[float] = None,
                     scan_points: Optional[int] = None) -> List[SpectralRoot]:
    """Scan, refine and classify the roots of the configured chain"""
    geom = config.geometry.chain()
    settings = config.spectrum
    roots = find_spectrum(geom, settings.z_min, z_max or settings.z_max, scan_points or settings.scan_points, settings.tol)
    return classify_roots(geom, roots, settings.k_max)


def spectrum_report(config: RunConfig, roots: List[SpectralRoot]) -> Dict:
    geom = config.geometry.chain()
    report = {
        'n_roots': len(roots),
        'classification': classification_summary(roots),
        'stability_witness': {
            'consistent_with_strong_stability':
                stability_witness(geom)['consistent_with_strong_stability']
        }
    }
    try:
        report['generalized_gap'] = generalized_gap(roots, geom.n_pairs)
        report['simple_gap'] = simple_gap(roots)
    except InsufficientRoots as e:
        logger.warning(f"Gap statistics skipped: {e}")
    return report


def run_spectrum(config: RunConfig, out_dir: Path) -> int:
    roots = compute_spectrum(config)
    write_spectrum_csv(roots, out_dir / "spectrum.csv")
    write_json_report(spectrum_report(config, roots), out_dir / "spectrum_report.json")

    if config.output.emit_svg:
        geom = config.geometry.chain()
        predictions = family_predictions(geom, config.spectrum.z_max)
        spectrum_plot(geom, config.spectrum.z_min, config.spectrum.z_max,
                      roots, predictions).save(out_dir / "spectrum.svg")

    print(f"{len(roots)} roots in ({config.spectrum.z_min}, {config.spectrum.z_max}) -> {out_dir / 'spectrum.csv'}")
    return 0


def run_modes(config: RunConfig, out_dir: Path) -> int:
    geom = config.geometry.chain()
    roots = compute_spectrum(config)[:config.modes.count]
    if not roots:
        raise InsufficientRoots(f"no roots in ({config.spectrum.z_min}, {config.spectrum.z_max})")

    modes = build_eigenmodes(geom, [root.z for root in roots])
    mode_dir = create_directory(out_dir / "modes")
    summary = []
    for root, mode in zip(roots, modes):
        write_mode_csv(mode, mode_dir / f"mode_{root.index:03d}.csv", config.modes.points_per_edge)
        summary.append({
            'index': root.index,
            'z': mode.z,
            'multiplicity': multiplicity_check(geom, mode.z),
            'max_residual': mode.max_residual(),
            'node_trace_sum': node_trace_sum(mode),
            'node_trace_sum_p2': node_trace_sum_p2(mode)
        })
    write_json_report({'modes': summary}, out_dir / "modes_report.json")

    print(f"{len(modes)} eigenmodes -> {mode_dir}")
    return 0


def run_simulate(config: RunConfig, out_dir: Path) -> int:
    sim = config.simulate
    sys = discretize(config.geometry.chain(), sim.h, sim.variant)
    trace = simulate(sys, initial_state(sys, sim.initial), sim.t_end, sim.time_step,
                     sample_every=sim.sample_every, project=sim.project,
                     samples_per_decade=sim.samples_per_decade, progress=True)
    write_trace_csv(trace, out_dir / "trace.csv")

    if config.output.emit_svg:
        energy_plot(trace, title=f"Energy, {sim.variant.value}").save(out_dir / "energy.svg")

    print(f"E({trace.t[-1]:.6g}) / E(0) = {trace.energy[-1] / trace.energy[0] if trace.energy[0] else 0.0:.6e}"
          f" -> {out_dir / 'trace.csv'}")
    return 0


def run_resolvent(config: RunConfig, out_dir: Path) -> int:
    res = config.resolvent
    sys = discretize(config.geometry.chain(), res.h, res.variant)
    horizon = trust_horizon(sys)
    betas = res.betas or beta_grid(res.beta_min, res.beta_max or horizon, res.count)

    rows = resolvent_norm_sweep(sys, betas, horizon=horizon)
    write_resolvent_csv(rows, out_dir / "resolvent.csv")
    summary = sweep_summary(rows, beta_lo=res.beta_min)
    summary['trust_horizon'] = horizon
    write_json_report(summary, out_dir / "resolvent_report.json")

    print(f"{len(rows)} resolvent norms, max/median of norm/beta {summary['max_over_median']:.4g}"
          f" -> {out_dir / 'resolvent.csv'}")
    return 0


def run_decay_fit(config: RunConfig, out_dir: Path, trace_path: Optional[Path] = None) -> int:
    """Reports the fit; an unbounded verdict is not a failure"""
    trace_path = trace_path or out_dir / "trace.csv"
    fit = fit_polynomial_decay(read_trace_csv(trace_path), config.decay.window)
    write_json_report(fit.model_dump(exclude={'running_max'}), out_dir / "decay_fit.json")

    print(f"slope {fit.slope:.4f}, C_hat {fit.c_hat:.6e}, verdict {fit.verdict}")
    return 0
