"""
Dimple Trap - Actions
CLI komut işlemleri
"""

from .commands import COMMANDS, NumericsConfig, RunConfig, build_run_config, run_command

__all__ = [
    "COMMANDS",
    "NumericsConfig",
    "RunConfig",
    "build_run_config",
    "run_command",
]
