#!/usr/bin/env python3
"""Dimple Trap - Ana Giriş Noktası"""

__version__ = "0.1.0"

# === IMPORTS ===
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional
from logging.handlers import RotatingFileHandler

# Rich (console output)
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table
from rich.panel import Panel
from pydantic import ValidationError

# Project imports
PROJECT_ROOT = Path(__file__).parent
sys.path.insert(0, str(PROJECT_ROOT))

from actions.commands import NumericsConfig, RunConfig, build_run_config, parse_fixed, run_command
from core.exceptions import NormalizationError, PresetError, RootFindingError
from utils.config_loader import get_config, get_setting
from utils.sweep_table import SweepTable

# === CONSTANTS ===
LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)-20s | %(message)s"
LOG_DIR = PROJECT_ROOT / "logs"
LOG_FILE = "dimple.log"
MAX_BYTES = 5 * 1024 * 1024  # 5MB
BACKUP_COUNT = 5
MAX_DISPLAY_ROWS = 40

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DEGRADED = 3

console = Console()
logger = logging.getLogger("dimple")


# === LOGGING SETUP ===
def setup_logging(debug: bool) -> None:
    """
    Setup logging with console and file handlers

    Args:
        debug: Enable DEBUG level logging
    """
    level = logging.DEBUG if debug else logging.INFO

    LOG_DIR.mkdir(parents=True, exist_ok=True)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    root_logger.handlers.clear()

    # 1. Rich console handler
    rich_handler = RichHandler(
        console=console,
        show_time=True,
        show_path=debug,
        rich_tracebacks=True,
        tracebacks_show_locals=debug
    )
    rich_handler.setLevel(level)
    root_logger.addHandler(rich_handler)

    # 2. Rotating file handler
    file_handler = RotatingFileHandler(
        LOG_DIR / LOG_FILE,
        maxBytes=MAX_BYTES,
        backupCount=BACKUP_COUNT,
        encoding='utf-8'
    )
    file_handler.setLevel(level)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root_logger.addHandler(file_handler)

    # 3. Quiet noisy library loggers
    for lib_logger in ['matplotlib', 'numexpr']:
        logging.getLogger(lib_logger).setLevel(logging.WARNING)

    logger.info(f"Logging initialized (level: {'DEBUG' if debug else 'INFO'})")


# === CLI PARSER ===
def _common_parser() -> argparse.ArgumentParser:
    """Tüm alt komutlarda ortak bayraklar"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--preset', '-p', type=str, default=None,
                        help="presets.yaml'dan adlandırılmış ayar (table1, table2, fig1-fig5, delta-limit)")
    common.add_argument('--out', '-o', type=str, default=None,
                        help="Çıktı dosyası (default: <output>/<komut>-<preset>.csv)")
    common.add_argument('--json', action='store_true', default=False,
                        help="CSV yerine JSON yaz: {\"metadata\": {...}, \"rows\": [{sütun: değer}, ...]}")
    common.add_argument('--tol', type=float, default=None,
                        help="Kök ve integral mutlak toleransı")
    common.add_argument('--allow-degraded', action='store_true', default=False,
                        help="Hassasiyeti düşmüş satırlarda 0 ile çık")
    return common


def _add_trap_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--a', type=float, default=None, help="Dimple yarı genişliği")
    parser.add_argument('--u0', dest='U0', type=float, default=None, help="Dimple derinliği U0")
    parser.add_argument('--omega', type=float, default=None, help="Tuzak frekansı (doğal birimler)")
    parser.add_argument('--e-max', dest='e_max', type=float, default=None, help="Enerji üst sınırı (E/ħω)")


def create_parser() -> argparse.ArgumentParser:
    """Create argument parser"""
    parser = argparse.ArgumentParser(
        prog="dimple-trap",
        description="Dimple Trap - Kesik parabolik dimple'lı harmonik tuzak hesapları",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Örnekler:
  python main.py spectrum --preset table1        a=3, U0=10: analitik ve JWKB enerjileri
  python main.py spectrum --preset table2        Sodyum tuzağı, SI birimler (n=499, 500 dahil)
  python main.py spectrum --a 3 --u0 0           Harmonik osilatör merdiveni
  python main.py figures --preset fig3           |T|², |R|² - E taraması
  python main.py delta-limit --c 1 --halvings 8  a → 0 yakınsama tablosu

Çıktı:
  CSV   ilk satır "# provenance: <json>", sonra başlık ve satır başına bir kayıt
  JSON  {"metadata": <provenance>, "rows": [<satır başına bir nesne>, ...]}
        """
    )

    parser.add_argument(
        '--debug', '-d',
        action='store_true',
        default=False,
        help="DEBUG logging aktif et"
    )

    parser.add_argument(
        '--version', '-v',
        action='version',
        version=f"Dimple Trap v{__version__}"
    )

    common = _common_parser()
    subparsers = parser.add_subparsers(dest='command', help='Komutlar')

    spectrum = subparsers.add_parser('spectrum', parents=[common], help='Bağlı durum spektrumu')
    _add_trap_arguments(spectrum)
    spectrum.add_argument('--method', choices=['analytic', 'jwkb', 'both'], default=None,
                          help="Çözüm yöntemi (default: analytic)")
    spectrum.add_argument('--levels', dest='extra_levels', type=int, nargs='+', default=None,
                          help="Tarama dışında çözülecek ek seviye indeksleri (method=both)")

    jwkb = subparsers.add_parser('jwkb', parents=[common], help='JWKB seviyeleri ve faz kontrolü')
    _add_trap_arguments(jwkb)

    transitions = subparsers.add_parser('transitions', parents=[common], help='Ani geçiş olasılıkları')
    _add_trap_arguments(transitions)
    transitions.add_argument('--n', type=int, default=None, help="Başlangıç osilatör durumu")
    transitions.add_argument('--target', type=int, default=None, help="Hedef seviye indeksi")
    transitions.add_argument('--u0-grid', dest='u0_grid', type=str, default=None, help="lo:hi:steps")
    transitions.add_argument('--strategy', choices=['kronrod', 'quadpack'], default=None,
                             help="Örtüşme integrali yöntemi")

    subparsers.add_parser('figures', parents=[common], help='Şekil verisi (fig1-fig5)')

    delta = subparsers.add_parser('delta-limit', parents=[common], help='a → 0, U0·a = c limiti')
    delta.add_argument('--c', type=float, default=None, help="Sabit U0·a")
    delta.add_argument('--a-start', dest='a_start', type=float, default=None, help="İlk a değeri")
    delta.add_argument('--halvings', type=int, default=None, help="a'nın yarılanma sayısı")
    delta.add_argument('--levels', type=int, default=None, help="Paritede izlenen seviye sayısı")

    scatter = subparsers.add_parser('scatter', parents=[common], help='Saçılma |T|², |R|²')
    scatter.add_argument('--vary', choices=['E', 'a', 'U0'], default=None, help="Taranan parametre")
    scatter.add_argument('--grid', type=str, default=None, help="lo:hi:steps")
    scatter.add_argument('--fixed', type=str, default=None, help='Sabitler, JSON ({"E": 1, "U0": 10}) veya E=1,U0=10')
    scatter.add_argument('--method', dest='scatter_method', choices=['closed_form', 'linear_solve'],
                         default=None, help="Kapalı form veya lineer sistem")

    return parser


# Komut dışı (çıktı/akış) bayrakları
_FLOW_ARGS = {'command', 'debug', 'preset', 'out', 'json', 'tol', 'allow_degraded', 'fixed'}


def collect_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Parse edilmiş argümanlardan RunConfig alanlarını ayıkla"""
    overrides = {k: v for k, v in vars(args).items() if k not in _FLOW_ARGS and v is not None}
    overrides.update(parse_fixed(getattr(args, 'fixed', None)))
    return overrides


# === OUTPUT ===
def output_path(config: RunConfig, args: argparse.Namespace) -> Path:
    """--out veya settings.yaml output dizini altında <komut>-<preset>"""
    if args.out:
        return Path(args.out)
    directory = get_setting("output.directory")
    if not directory or directory.startswith('${'):
        directory = get_setting("output.fallback_directory", "output")
    suffix = "json" if args.json else "csv"
    return Path(directory) / f"{config.command}-{config.preset or 'custom'}.{suffix}"


def _cell_text(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if hasattr(value, 'value'):
        return str(value.value)
    return "" if value is None else str(value)


def show_table(table: SweepTable, title: str) -> None:
    """SweepTable'ı rich Table olarak yazdır (ilk MAX_DISPLAY_ROWS satır)"""
    view = Table(title=title, show_lines=False)
    for column in table.columns:
        view.add_column(column, justify="right")

    for row in table.rows[:MAX_DISPLAY_ROWS]:
        style = "yellow" if row.get('flag') is not None and _cell_text(row['flag']) != "ok" else None
        view.add_row(*[_cell_text(row[c]) for c in table.columns], style=style)

    console.print(view)
    if len(table) > MAX_DISPLAY_ROWS:
        console.print(f"[dim]... {len(table) - MAX_DISPLAY_ROWS} satır daha (dosyada)[/dim]")


def show_summary(table: SweepTable, path: Path, degraded: int) -> None:
    lines = [f"Satır:        {len(table)}", f"Dosya:        {path}"]
    for key in ('n_prime', 'completeness_defect', 'order', 'gap_order', 'well_order', 'scatter_order'):
        if key in table.metadata:
            lines.append(f"{key + ':':14s}{_cell_text(table.metadata[key])}")
    status = "[green]●[/green] ok" if degraded == 0 else f"[yellow]○[/yellow] {degraded} degraded"
    lines.append(f"Durum:        {status}")
    console.print(Panel("\n".join(lines), border_style="blue", padding=(1, 2)))


# === RUN ===
def run(args: argparse.Namespace) -> int:
    """
    Alt komutu çalıştır, tabloyu yaz

    Returns:
        Exit code (0 ok, 2 kullanım hatası, 3 sayısal bozulma)
    """
    try:
        config = build_run_config(args.command, args.preset, collect_overrides(args))
        numerics = NumericsConfig.from_settings(get_config("settings"), args.tol)
    except (ValidationError, ValueError, FileNotFoundError) as e:
        logger.error(f"Invalid run configuration: {e}")
        return EXIT_USAGE

    try:
        table = run_command(config, numerics)
    except PresetError as e:
        logger.error(f"Invalid run configuration: {e}")
        return EXIT_USAGE
    except (RootFindingError, NormalizationError) as e:
        logger.error(f"Numerical failure: {e}")
        return EXIT_DEGRADED

    table.stamp(config.model_dump(mode="json"), __version__)
    path = output_path(config, args)
    if args.json:
        table.to_json(path)
    else:
        table.to_csv(path)

    show_table(table, config.description or config.command)
    degraded = len(table.degraded_rows())
    show_summary(table, path, degraded)

    if degraded and not args.allow_degraded:
        logger.warning(f"{degraded} row(s) carry a degraded precision flag; rerun with --allow-degraded to accept")
        return EXIT_DEGRADED
    return EXIT_OK


# === MAIN ===
def main(argv: Optional[list] = None) -> int:
    """
    Main entry point

    Returns:
        Exit code
    """
    parser = create_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    setup_logging(args.debug)
    logger.info(f"Dimple Trap v{__version__}: {args.command}")

    try:
        return run(args)
    except KeyboardInterrupt:
        console.print("\n[yellow]Kullanıcı tarafından durduruldu[/yellow]")
        return 130


if __name__ == "__main__":
    sys.exit(main())
