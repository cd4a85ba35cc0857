"""
Dimple Trap - Main Entry Point Unit Tests

pytest ile main.py modülü testleri
"""

import pytest
import sys
import json
import argparse
import logging
from pathlib import Path
from unittest.mock import patch

# Project root'u ekle
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

# Test edilecek modül
from main import (
    __version__,
    create_parser,
    collect_overrides,
    output_path,
    setup_logging,
    main,
    EXIT_DEGRADED,
    EXIT_OK,
    EXIT_USAGE,
    LOG_DIR,
    LOG_FILE
)
from actions.commands import RunConfig


@pytest.fixture(autouse=True)
def restore_logging():
    """setup_logging root handler'ları değiştirir"""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    for handler in root.handlers:
        handler.close()
    root.handlers[:] = handlers
    root.setLevel(level)


# ==================== Version Tests ====================

class TestVersion:
    """Version flag testleri"""

    def test_version_defined(self):
        """__version__ tanımlı olmalı"""
        assert __version__ is not None
        assert isinstance(__version__, str)

    def test_version_format(self):
        """Version formatı x.y.z olmalı"""
        parts = __version__.split('.')
        assert len(parts) == 3
        for part in parts:
            assert part.isdigit()

    def test_version_flag(self):
        """--version flag argparse ile çalışmalı"""
        parser = create_parser()
        with pytest.raises(SystemExit) as exc_info:
            parser.parse_args(['--version'])
        assert exc_info.value.code == 0


# ==================== Parser Tests ====================

class TestCreateParser:
    """Argparse testleri"""

    def test_parser_creation(self):
        """Parser oluşturulabilmeli"""
        parser = create_parser()
        assert isinstance(parser, argparse.ArgumentParser)

    def test_default_values(self):
        """Default değerler doğru olmalı"""
        parser = create_parser()
        args = parser.parse_args(['spectrum'])

        assert args.command == "spectrum"
        assert args.debug is False
        assert args.preset is None
        assert args.json is False
        assert args.allow_degraded is False

    def test_debug_flag(self):
        """--debug flag komuttan önce çalışmalı"""
        parser = create_parser()
        args = parser.parse_args(['--debug', 'jwkb'])
        assert args.debug is True

    @pytest.mark.parametrize("command", ["spectrum", "jwkb", "transitions", "figures", "delta-limit", "scatter"])
    def test_subcommands(self, command):
        """Tüm alt komutlar ortak bayrakları kabul etmeli"""
        parser = create_parser()
        args = parser.parse_args([command, '-p', 'table1', '--tol', '1e-9', '--allow-degraded'])
        assert args.command == command
        assert args.preset == "table1"
        assert args.tol == 1e-9
        assert args.allow_degraded is True

    def test_spectrum_options(self):
        parser = create_parser()
        args = parser.parse_args(['spectrum', '--a', '3', '--u0', '10', '--e-max', '12',
                                  '--method', 'both', '--levels', '499', '500'])
        assert args.a == 3.0
        assert args.U0 == 10.0
        assert args.e_max == 12.0
        assert args.extra_levels == [499, 500]

    def test_scatter_options(self):
        parser = create_parser()
        args = parser.parse_args(['scatter', '--vary', 'E', '--grid', '0.5:10:20',
                                  '--fixed', 'a=3,U0=10', '--method', 'linear_solve'])
        assert args.scatter_method == "linear_solve"
        assert args.fixed == "a=3,U0=10"

    def test_invalid_choice(self):
        """Geçersiz seçim SystemExit vermeli"""
        parser = create_parser()
        with pytest.raises(SystemExit):
            parser.parse_args(['spectrum', '--method', 'exact'])

    def test_help_documents_output_shape(self):
        """JSON çıktısının metadata/rows yapısı yardımda yazılı"""
        text = create_parser().format_help()
        assert '"metadata"' in text
        assert '"rows"' in text
        assert "# provenance:" in text

    def test_help_flag(self):
        """--help SystemExit(0) vermeli"""
        parser = create_parser()
        with pytest.raises(SystemExit) as exc_info:
            parser.parse_args(['--help'])
        assert exc_info.value.code == 0


# ==================== Override Tests ====================

class TestCollectOverrides:
    """CLI → RunConfig alanları"""

    def test_flow_args_dropped(self):
        args = create_parser().parse_args(['spectrum', '--a', '2', '--json', '-o', 'x.csv'])
        overrides = collect_overrides(args)
        assert overrides == {"a": 2.0}

    def test_fixed_merged(self):
        args = create_parser().parse_args(['scatter', '--vary', 'E', '--fixed', 'a=3,U0=10'])
        assert collect_overrides(args) == {"vary": "E", "a": 3.0, "U0": 10.0}

    def test_output_path_default(self):
        args = create_parser().parse_args(['figures', '--json'])
        config = RunConfig(command="figures", preset="fig3")
        path = output_path(config, args)
        assert path.name == "figures-fig3.json"

    def test_output_path_explicit(self, tmp_path):
        args = create_parser().parse_args(['spectrum', '--out', str(tmp_path / "s.csv")])
        assert output_path(RunConfig(command="spectrum"), args) == tmp_path / "s.csv"


# ==================== Logging Tests ====================

class TestSetupLogging:
    """setup_logging testleri"""

    def test_log_dir_constant(self):
        """LOG_DIR doğru tanımlı olmalı"""
        assert LOG_DIR == PROJECT_ROOT / "logs"

    def test_log_file_constant(self):
        assert LOG_FILE == "dimple.log"

    def test_setup_logging_debug(self, tmp_path):
        with patch('main.LOG_DIR', tmp_path):
            setup_logging(debug=True)
        assert logging.getLogger().level == logging.DEBUG
        assert (tmp_path / LOG_FILE).exists()

    def test_setup_logging_info(self, tmp_path):
        with patch('main.LOG_DIR', tmp_path):
            setup_logging(debug=False)
        assert logging.getLogger().level == logging.INFO


# ==================== Main Integration Tests ====================

class TestMainIntegration:
    """main() exit code testleri"""

    def test_no_command(self):
        assert main([]) == EXIT_USAGE

    def test_unknown_preset(self, tmp_path):
        with patch('main.LOG_DIR', tmp_path):
            assert main(['spectrum', '--preset', 'table9']) == EXIT_USAGE

    def test_invalid_value(self, tmp_path):
        with patch('main.LOG_DIR', tmp_path):
            assert main(['transitions', '--a', '3', '--u0', '10', '--n', '-1']) == EXIT_USAGE

    def test_bad_fixed_pair(self, tmp_path):
        with patch('main.LOG_DIR', tmp_path):
            assert main(['scatter', '--vary', 'E', '--grid', '1:2:2', '--fixed', 'k=1']) == EXIT_USAGE

    def test_empty_spectrum_window(self, tmp_path):
        with patch('main.LOG_DIR', tmp_path):
            code = main(['spectrum', '--a', '3', '--u0', '10', '--e-max', '-20',
                         '--out', str(tmp_path / "empty.csv")])
        assert code == EXIT_DEGRADED

    def test_spectrum_writes_csv(self, tmp_path):
        target = tmp_path / "spectrum.csv"
        with patch('main.LOG_DIR', tmp_path):
            code = main(['spectrum', '--a', '3', '--u0', '10', '--e-max', '-5', '--out', str(target)])
        assert code == EXIT_OK
        lines = target.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("# provenance: ")
        assert lines[1].startswith("index,parity,lambda")
        assert len(lines) == 4

    def test_scatter_writes_json(self, tmp_path):
        target = tmp_path / "scatter.json"
        with patch('main.LOG_DIR', tmp_path):
            code = main(['scatter', '--vary', 'E', '--grid', '0.5:2:3', '--fixed', 'a=3,U0=10',
                         '--json', '--out', str(target)])
        assert code == EXIT_OK
        data = json.loads(target.read_text(encoding="utf-8"))
        assert len(data["rows"]) == 3
        assert data["metadata"]["config"]["command"] == "scatter"

    def test_scatter_fixed_as_json(self, tmp_path):
        target = tmp_path / "scatter.csv"
        with patch('main.LOG_DIR', tmp_path):
            code = main(['scatter', '--vary', 'U0', '--grid', '1:5:3',
                         '--fixed', '{"E": 1, "a": 3}', '--out', str(target)])
        assert code == EXIT_OK
        assert len(target.read_text(encoding="utf-8").splitlines()) == 5

    def test_project_root_exists(self):
        """PROJECT_ROOT var olmalı"""
        assert PROJECT_ROOT.exists()
        assert (PROJECT_ROOT / "config" / "settings.yaml").exists()
        assert (PROJECT_ROOT / "config" / "presets.yaml").exists()
