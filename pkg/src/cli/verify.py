"""
Property suite run by the verify subcommand
"""
import logging
import math
import time
from pathlib import Path
from typing import Callable, Dict, List

import numpy as np

from config import (
    ASYMPTOTIC_WINDOWS,
    ROOT_RESIDUAL_LIMIT,
    VERIFY_BALANCE_STEPS,
    VERIFY_BALANCE_TOL,
    VERIFY_DECAY_PER_DECADE,
    VERIFY_DECAY_SLOPE,
    VERIFY_FAMILY_FRACTION,
    VERIFY_FAMILY_RANGE,
    VERIFY_FAMILY_SCAN_POINTS,
    VERIFY_GAP_ROOTS,
    VERIFY_KERNEL_TOL,
    VERIFY_MODE_COUNT,
    VERIFY_ORACLE_COUNT,
    VERIFY_ORACLE_H,
    VERIFY_ORACLE_TOL,
    VERIFY_RESOLVENT_SPREAD,
    VERIFY_STRONG_RATIO,
    VERIFY_STRONG_T,
    VERIFY_ZERO_MODE_TOL,
)
from ..chain.rationality import stability_witness
from ..exceptions import ChainwaveError
from ..export.csv_writer import write_json_report
from ..modes.eigenmode import build_eigenmodes, multiplicity_check, node_trace_sum, node_trace_sum_p2
from ..modes.zero_modes import satisfies_zero_problem, zero_eigenspace
from ..runconfig.models import RunConfig
from ..simulation.assembly import Variant, discretize, stiffness_kernel
from ..simulation.decay import fit_polynomial_decay
from ..simulation.integrator import initial_state, simulate
from ..simulation.oracle import richardson_spectrum
from ..simulation.resolvent import beta_grid, resolvent_norm_sweep, sweep_summary, trust_horizon
from ..spectrum.roots import classification_summary, generalized_gap, simple_gap
from ..spectrum.transfer import asymptotic_gap_check
from .commands import compute_spectrum

logger = logging.getLogger(__name__)


class VerifySuite:
    """Runs every check against one configuration and collects a report entry per check"""

    def __init__(self, config: RunConfig):
        self.config = config
        self.geom = config.geometry.chain()
        self._roots = None
        self._wide_roots = None

    @property
    def roots(self):
        if self._roots is None:
            self._roots = compute_spectrum(self.config)
        return self._roots

    @property
    def wide_roots(self):
        """Roots up to the top of the family window, for gap and family statistics"""
        if self._wide_roots is None:
            self._wide_roots = compute_spectrum(self.config, z_max=VERIFY_FAMILY_RANGE[1],
                                                scan_points=VERIFY_FAMILY_SCAN_POINTS)
        return self._wide_roots

    def checks(self) -> List[Callable[[], Dict]]:
        return [
            self.check_root_residuals,
            self.check_oracle,
            self.check_families,
            self.check_generalized_gap,
            self.check_asymptotic_remainder,
            self.check_zero_eigenspace,
            self.check_multiplicity,
            self.check_energy_balance,
            self.check_strong_stability,
            self.check_polynomial_decay,
            self.check_resolvent,
            self.check_zero_mode_non_decay,
        ]

    def run(self) -> List[Dict]:
        entries = []
        for check in self.checks():
            name = check.__name__.replace('check_', '')
            start = time.perf_counter()
            try:
                entry = check()
            except ChainwaveError as e:
                logger.error(f"Check {name} raised {type(e).__name__}: {e}")
                entry = {'passed': False, 'error': f"{type(e).__name__}: {e}"}
            entry = {'name': name, **entry, 'seconds': round(time.perf_counter() - start, 3)}
            logger.info(f"Check {name}: {'PASS' if entry['passed'] else 'FAIL'}")
            entries.append(entry)
        return entries

    def check_root_residuals(self) -> Dict:
        worst = max((root.residual for root in self.roots), default=0.0)
        return {'passed': bool(self.roots) and worst < ROOT_RESIDUAL_LIMIT,
                'roots': len(self.roots), 'max_residual': worst}

    def check_oracle(self) -> Dict:
        count = min(VERIFY_ORACLE_COUNT, len(self.roots))
        if count == 0:
            return {'passed': False, 'error': 'no roots to compare'}
        oracle = np.array(richardson_spectrum(self.geom, VERIFY_ORACLE_H, count))
        exact = np.array([root.lambda_im for root in self.roots[:count]])
        relative = np.abs(oracle - exact) / exact
        return {'passed': bool(np.all(relative < VERIFY_ORACLE_TOL)), 'compared': count,
                'max_relative_error': float(np.max(relative))}

    def check_families(self) -> Dict:
        summary = classification_summary(self.wide_roots, z_min=VERIFY_FAMILY_RANGE[0])
        fraction = summary['classified_fraction']
        return {'passed': not math.isnan(fraction) and fraction >= VERIFY_FAMILY_FRACTION, **summary}

    def check_generalized_gap(self) -> Dict:
        first = self.wide_roots[:VERIFY_GAP_ROOTS]
        gap = generalized_gap(first, self.geom.n_pairs)
        simple = simple_gap(first)
        return {'passed': len(first) == VERIFY_GAP_ROOTS and gap > 0.0, 'roots': len(first),
                'generalized_gap': gap, 'simple_gap': simple,
                'simple_below_gap_share': simple < gap / (2 * self.geom.n_pairs)}

    def check_asymptotic_remainder(self) -> Dict:
        lo, hi = ASYMPTOTIC_WINDOWS[0][0], ASYMPTOTIC_WINDOWS[-1][1]
        grid = np.linspace(lo, hi, 40000)
        report = asymptotic_gap_check(self.geom, grid, ASYMPTOTIC_WINDOWS)
        return {'passed': report.decreasing, 'windows': report.windows}

    def check_zero_eigenspace(self) -> Dict:
        basis = zero_eigenspace(self.geom)
        exact = all(satisfies_zero_problem(self.geom, mode) for mode in basis.modes)
        kernel = stiffness_kernel(discretize(self.geom, self.config.simulate.h, Variant.PC))
        expected = self.geom.n_pairs - 1
        return {'passed': basis.dimension == expected and exact and kernel['nullity'] == expected
                and kernel['match_error'] < VERIFY_KERNEL_TOL,
                'dimension': basis.dimension, 'exact': exact,
                'nullity': kernel['nullity'], 'match_error': kernel['match_error']}

    def check_multiplicity(self) -> Dict:
        counts = [multiplicity_check(self.geom, root.z) for root in self.roots]
        return {'passed': bool(counts) and all(c == 1 for c in counts),
                'non_simple': [root.z for root, c in zip(self.roots, counts) if c != 1]}

    def check_energy_balance(self) -> Dict:
        h = self.config.simulate.h
        dt = h / 2.0
        results = {}
        passed = True
        for variant in Variant:
            sys = discretize(self.geom, h, variant)
            trace = simulate(sys, initial_state(sys, "bump"), VERIFY_BALANCE_STEPS * dt, dt)
            energy = np.array(trace.energy)
            balance = float(np.max(np.abs(trace.balance_residual)))
            increase = float(np.max(np.diff(energy)) / energy[0]) if energy.size > 1 else 0.0
            drift = float(np.max(np.abs(energy - energy[0])) / energy[0])
            if variant == Variant.PC:
                ok = drift < VERIFY_BALANCE_TOL
            else:
                ok = balance < VERIFY_BALANCE_TOL and increase <= 1e-12
            results[variant.value] = {'balance_residual': balance, 'max_increase': increase,
                                      'drift': drift, 'passed': ok}
            passed = passed and ok
        return {'passed': passed, 'variants': results}

    def check_strong_stability(self) -> Dict:
        count = min(VERIFY_MODE_COUNT, len(self.wide_roots))
        modes = build_eigenmodes(self.geom, [root.z for root in self.wide_roots[:count]])
        p1_sums = [node_trace_sum(mode) for mode in modes]
        p2_sums = [node_trace_sum_p2(mode) for mode in modes]

        h = self.config.simulate.h
        ratios = {}
        for variant in (Variant.P1, Variant.P2):
            sys = discretize(self.geom, h, variant)
            trace = simulate(sys, initial_state(sys, "bump"), VERIFY_STRONG_T, h / 2.0, sample_every=100)
            ratios[variant.value] = trace.energy[-1] / trace.energy[0]

        witness = stability_witness(self.geom)['consistent_with_strong_stability']
        return {'passed': count > 0 and min(p1_sums) > 0.0 and min(p2_sums) > 0.0
                and all(r < VERIFY_STRONG_RATIO for r in ratios.values()),
                'modes': count, 'min_node_trace_sum': min(p1_sums, default=math.nan),
                'min_node_trace_sum_p2': min(p2_sums, default=math.nan),
                'energy_ratio': ratios, 'lengths_consistent_with_strong_stability': witness}

    def check_polynomial_decay(self) -> Dict:
        sys = discretize(self.geom, self.config.simulate.h, Variant.P2)
        window = self.config.decay.window
        trace = simulate(sys, initial_state(sys, "bump"), window[1], self.config.simulate.h / 2.0,
                         samples_per_decade=VERIFY_DECAY_PER_DECADE, progress=True)
        fit = fit_polynomial_decay(trace, window)
        return {'passed': fit.slope <= VERIFY_DECAY_SLOPE and fit.bounded,
                'slope': fit.slope, 'c_hat': fit.c_hat, 'last_window_increase': fit.last_window_increase}

    def check_resolvent(self) -> Dict:
        res = self.config.resolvent
        sys = discretize(self.geom, res.h, Variant.P2)
        horizon = trust_horizon(sys)
        betas = res.betas or beta_grid(res.beta_min, res.beta_max or horizon, res.count)
        summary = sweep_summary(resolvent_norm_sweep(sys, betas, horizon=horizon), beta_lo=res.beta_min)
        spread = summary['max_over_median']
        return {'passed': not math.isnan(spread) and spread < VERIFY_RESOLVENT_SPREAD
                and not summary['last_window_monotone_growth'], 'trust_horizon': horizon, **summary}

    def check_zero_mode_non_decay(self) -> Dict:
        if self.geom.n_pairs < 2:
            return {'passed': True, 'skipped': 'no zero modes for a single pair'}

        h = self.config.simulate.h
        drifts = {}
        for variant in (Variant.P1, Variant.P2):
            sys = discretize(self.geom, h, variant)
            start = initial_state(sys, "zero_mode")
            scale = 0.5 * float(start.u @ (sys.M @ start.u))
            trace = simulate(sys, start, VERIFY_STRONG_T, h / 2.0, sample_every=100, project=False)
            end = trace.final_state
            moved = float(np.sqrt((end.u - start.u) @ (sys.M @ (end.u - start.u))))
            drifts[variant.value] = {
                'energy': float(np.max(np.abs(np.array(trace.energy) - trace.energy[0]))) / scale,
                'displacement': moved / math.sqrt(2.0 * scale)
            }
        worst = max(max(d.values()) for d in drifts.values())
        return {'passed': worst < VERIFY_ZERO_MODE_TOL, 'drift': drifts}


def run_verify(config: RunConfig, out_dir: Path) -> int:
    """Exit code 1 when any check fails"""
    entries = VerifySuite(config).run()
    failed = [entry['name'] for entry in entries if not entry['passed']]
    write_json_report({'passed': not failed, 'failed': failed, 'checks': entries},
                      out_dir / "verify_report.json")

    for entry in entries:
        print(f"{'PASS' if entry['passed'] else 'FAIL'}  {entry['name']}")
    return 1 if failed else 0
