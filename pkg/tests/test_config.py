"""
Tests for run configuration loading and validation
"""
import json
from pathlib import Path

import pytest

from config import CONFIGS_DIR
from src.exceptions import ConfigError, ParseError, ValidationError
from src.runconfig.loader import dump_config, load_config, loads_config, parse_config
from src.simulation.assembly import Variant

MINIMAL = """
[geometry]
lengths = [1.0, 1.0]
"""


class TestDefaults:
    """Sections left out take their defaults"""

    def test_minimal(self):
        config = loads_config(MINIMAL)
        assert config.geometry.chain().n_pairs == 1
        assert config.simulate.variant == Variant.P2
        assert config.simulate.time_step == pytest.approx(config.simulate.h / 2.0)
        assert config.resolvent.beta_max is None
        assert config.decay.window == (10.0, 1000.0)
        assert config.output.emit_svg

    def test_explicit_dt(self):
        config = loads_config(MINIMAL + "\n[simulate]\nh = 0.05\ndt = 0.01\n")
        assert config.simulate.time_step == 0.01

    @pytest.mark.parametrize("name", ["default.toml", "two_pairs.toml"])
    def test_shipped_configs_load(self, name):
        config = load_config(CONFIGS_DIR / name)
        assert len(config.geometry.lengths) == 2 * config.geometry.chain().n_pairs

    def test_dump_is_json(self):
        data = json.loads(dump_config(loads_config(MINIMAL)))
        assert data['geometry']['lengths'] == [1.0, 1.0]
        assert data['simulate']['variant'] == "P2"


class TestValidationErrors:
    """Field paths reported for rejected values"""

    def field_of(self, text):
        with pytest.raises(ValidationError) as info:
            loads_config(text)
        return info.value.field

    def test_odd_lengths(self):
        assert self.field_of("[geometry]\nlengths = [1.0, 1.0, 1.0]\n").endswith("lengths")

    def test_negative_length(self):
        assert self.field_of("[geometry]\nlengths = [1.0, -1.0]\n") == "geometry.lengths"

    def test_pair_count_mismatch(self):
        assert self.field_of("[geometry]\nn_pairs = 2\nlengths = [1.0, 1.0]\n") == "geometry.n_pairs"

    def test_z_range(self):
        assert self.field_of(MINIMAL + "\n[spectrum]\nz_min = 5.0\nz_max = 5.0\n") == "spectrum.z_range"

    def test_beta_range(self):
        text = MINIMAL + "\n[resolvent]\nbeta_min = 50.0\nbeta_max = 20.0\n"
        assert self.field_of(text) == "resolvent.beta_range"

    def test_unknown_key(self):
        assert self.field_of("[geometry]\nlengths = [1.0, 1.0]\ncolour = 3\n") == "geometry.colour"

    def test_unknown_section(self):
        assert self.field_of(MINIMAL + "\n[plotting]\ndpi = 300\n") == "plotting"

    def test_conservative_resolvent(self):
        assert self.field_of(MINIMAL + '\n[resolvent]\nvariant = "Pc"\n') == "resolvent.variant"

    def test_unknown_initial_data(self):
        assert self.field_of(MINIMAL + '\n[simulate]\ninitial = "sawtooth"\n') == "simulate.initial"

    def test_coarse_mesh(self):
        assert self.field_of(MINIMAL + "\n[simulate]\nh = 0.5\n") == "simulate.h"

    def test_decay_window(self):
        assert self.field_of(MINIMAL + "\n[decay]\nwindow = [0.5, 10.0]\n") == "decay.window"

    def test_missing_geometry(self):
        assert self.field_of("[modes]\ncount = 3\n") == "geometry"

    def test_exit_code(self):
        with pytest.raises(ConfigError) as info:
            parse_config({'geometry': {'lengths': []}})
        assert info.value.exit_code == 2


class TestParseErrors:
    """Malformed TOML"""

    def test_line_reported(self):
        with pytest.raises(ParseError) as info:
            loads_config("[geometry]\nlengths = [1.0, 1.0\n")
        assert info.value.exit_code == 2

    def test_missing_file(self, tmp_path: Path):
        with pytest.raises(OSError):
            load_config(tmp_path / "absent.toml")
