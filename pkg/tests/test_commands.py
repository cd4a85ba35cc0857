"""
Dimple Trap - Command Unit Tests

pytest ile RunConfig, preset birleştirme ve komut dağıtımı testleri
"""

import pytest
from pydantic import ValidationError

from actions.commands import (
    COMMANDS,
    WIDE_WINDOW,
    NumericsConfig,
    RunConfig,
    build_run_config,
    cmd_figures,
    cmd_scatter,
    parse_fixed,
    run_command,
)
from core.exceptions import PresetError
from core.schemas import GridSpec, SweepVariable, UnitPreset
from utils.config_loader import ConfigLoader


@pytest.fixture(scope="module")
def loader():
    return ConfigLoader()


@pytest.fixture(scope="module")
def numerics(loader):
    return NumericsConfig.from_settings(loader.load("settings"))


# ==================== Numerics Tests ====================

class TestNumericsConfig:
    """settings.yaml numerics bölümü"""

    def test_from_settings(self, numerics):
        assert numerics.roots.root_tolerance == 1.0e-12
        assert numerics.roots.scan_lo == -WIDE_WINDOW
        assert numerics.quad.max_depth == 50
        assert numerics.policy.max_terms == 2000
        assert numerics.scan_step == 0.05

    def test_tolerance_override(self, loader):
        numerics = NumericsConfig.from_settings(loader.load("settings"), tolerance=1e-9)
        assert numerics.roots.root_tolerance == 1e-9
        assert numerics.quad.abs_tolerance == 1e-9

    def test_empty_settings_use_defaults(self):
        numerics = NumericsConfig.from_settings({})
        assert numerics.roots.scan_hi == WIDE_WINDOW


# ==================== RunConfig Tests ====================

class TestRunConfig:
    """Preset + CLI birleştirme ve doğrulama"""

    def test_table_one_preset(self, loader):
        config = build_run_config("spectrum", "table1", loader=loader)
        assert config.method == "both"
        assert config.a == 3.0
        assert len(config.reference) == 12
        params = config.trap_params()
        assert params.U0 == 10.0
        assert params.unit_preset is UnitPreset.NATURAL

    def test_cli_overrides_preset(self, loader):
        config = build_run_config("spectrum", "table1", {"a": 2.0, "U0": None, "method": "analytic"}, loader)
        assert config.a == 2.0
        assert config.U0 == 10.0
        assert config.method == "analytic"

    def test_table_two_is_si(self, loader):
        config = build_run_config("spectrum", "table2", loader=loader)
        assert config.unit_preset is UnitPreset.SI
        assert config.extra_levels == [499, 500]
        assert config.trap_params().hbar_omega > 0

    def test_si_requires_values(self):
        config = RunConfig(command="spectrum", unit_preset="si", a=1e-5, U0=1e-30)
        with pytest.raises(PresetError, match="mass_amu"):
            config.trap_params()

    def test_natural_missing_depth(self):
        with pytest.raises(PresetError):
            RunConfig(command="spectrum", a=3.0).trap_params()

    def test_grid_strings_parsed(self, loader):
        config = build_run_config("figures", "fig1", loader=loader)
        assert config.kind == "transitions"
        assert config.u0_grid == GridSpec(lo=0.0, hi=20.0, steps=41)
        assert config.trap_params().U0 == 0.0

    def test_unknown_field_rejected(self):
        with pytest.raises(ValidationError):
            RunConfig(command="spectrum", colour="blue")

    def test_invalid_values_rejected(self):
        with pytest.raises(ValidationError):
            RunConfig(command="spectrum", a=-1.0)
        with pytest.raises(ValidationError):
            RunConfig(command="spectrum", method="exact")
        with pytest.raises(ValidationError):
            RunConfig(command="delta-limit", halvings=1)

    def test_unknown_preset(self, loader):
        with pytest.raises(PresetError):
            build_run_config("spectrum", "table9", loader=loader)

    def test_scatter_params_take_grid_start(self, loader):
        config = build_run_config("figures", "fig4", loader=loader)
        assert config.vary is SweepVariable.A
        params = config.scatter_params()
        assert params.a == pytest.approx(0.05)
        assert params.U0 == 10.0


class TestParseFixed:
    """--fixed ayrıştırma"""

    def test_pairs(self):
        assert parse_fixed("E=1, a=3,U0=10") == {"E": 1.0, "a": 3.0, "U0": 10.0}

    def test_empty(self):
        assert parse_fixed(None) == {}
        assert parse_fixed("") == {}

    def test_json_object(self):
        assert parse_fixed('{"E": 1, "a": 3, "U0": 10}') == {"E": 1.0, "a": 3.0, "U0": 10.0}

    def test_json_with_spaces(self):
        assert parse_fixed('  {"U0": 2.5}') == {"U0": 2.5}

    @pytest.mark.parametrize("text", [
        "E1", "k=2", "E=1,,a=3", "E=abc",
        '{"E": 1', '[1, 2]', '{"k": 1}', '{"E": "fast"}', '{"E": true}',
    ])
    def test_bad_pairs(self, text):
        with pytest.raises(PresetError):
            parse_fixed(text)


# ==================== Dispatch Tests ====================

class TestDispatch:
    """Komut tablosu ve hata yolları"""

    def test_all_commands_registered(self):
        assert set(COMMANDS) == {"spectrum", "jwkb", "transitions", "figures", "delta-limit", "scatter"}

    def test_unknown_command(self, numerics):
        with pytest.raises(PresetError):
            run_command(RunConfig(command="plot"), numerics)

    def test_figures_needs_kind(self, numerics):
        with pytest.raises(PresetError):
            cmd_figures(RunConfig(command="figures", a=3.0, U0=10.0), numerics)

    def test_scatter_needs_grid(self, numerics):
        with pytest.raises(PresetError):
            cmd_scatter(RunConfig(command="scatter", E=1.0, a=3.0, U0=10.0), numerics)

    def test_spectrum_analytic(self, numerics):
        config = RunConfig(command="spectrum", a=3.0, U0=10.0, e_max=-5.0)
        table = run_command(config, numerics)
        assert table.column("index") == [0, 1]

    def test_spectrum_both_with_reference(self, numerics, loader):
        config = build_run_config("spectrum", "table1", {"e_max": -1.0}, loader)
        table = run_command(config, numerics)
        assert len(table) == 4
        assert "printed_difference_ok" in table.columns

    def test_small_scatter_sweep(self, numerics):
        config = RunConfig(command="scatter", vary="E", grid="0.5:2:3", a=3.0, U0=10.0)
        table = run_command(config, numerics)
        assert table.column("x") == pytest.approx([0.5, 1.25, 2.0])
