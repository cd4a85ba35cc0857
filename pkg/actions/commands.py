"""
Dimple Trap - Commands

CLI alt komutlarının işlemleri: RunConfig → SweepTable.
Burada hesap yapılmaz; her sayı bir processor işleminden gelir.
"""

import json
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Literal, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from core.exceptions import PresetError
from core.schemas import (
    GridSpec,
    OverlapStrategy,
    PrecisionPolicy,
    QuadSpec,
    RootSpec,
    ScatterMethod,
    ScatterParams,
    SweepVariable,
    TrapParams,
    UnitPreset,
)
from processors.bound_spectrum import SCAN_STEP, solve_spectrum
from processors.delta_limit import halving_sequence, limit_study
from processors.jwkb import annotate_with_reference, compare_spectra, jwkb_table
from processors.scattering import sweep
from processors.sudden_transitions import probability_sweep, transition_table
from utils.config_loader import ConfigLoader, get_preset
from utils.sweep_table import SweepTable

logger = logging.getLogger(__name__)

# Processor'lar pencereyi fiziksel sınırlarla kesiştirir
WIDE_WINDOW = 1e12


# === Numerics ===

@dataclass(frozen=True)
class NumericsConfig:
    """settings.yaml numerics bölümünden kurulan ayarlar"""
    policy: PrecisionPolicy
    roots: RootSpec
    quad: QuadSpec
    scan_step: float = SCAN_STEP

    @classmethod
    def from_settings(cls, settings: Mapping[str, Any], tolerance: Optional[float] = None) -> "NumericsConfig":
        """
        Args:
            settings: settings.yaml içeriği
            tolerance: --tol; kök ve mutlak integral toleransının üzerine yazar
        """
        numerics = settings.get("numerics", {}) or {}
        roots = dict(numerics.get("roots", {}) or {})
        scan_step = float(roots.pop("scan_step", SCAN_STEP))
        quad = dict(numerics.get("quadrature", {}) or {})
        if tolerance is not None:
            roots["root_tolerance"] = tolerance
            quad["abs_tolerance"] = tolerance

        return cls(
            policy=PrecisionPolicy(**(numerics.get("precision", {}) or {})),
            roots=RootSpec(scan_lo=-WIDE_WINDOW, scan_hi=WIDE_WINDOW, **roots),
            quad=QuadSpec(**quad),
            scan_step=scan_step,
        )


# === Run config ===

class RunConfig(BaseModel):
    """Preset + CLI bayraklarından doğrulanmış çalışma ayarı"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: str
    preset: Optional[str] = None
    description: Optional[str] = None
    kind: Optional[Literal["transitions", "scatter"]] = None

    # Tuzak
    unit_preset: UnitPreset = UnitPreset.NATURAL
    omega: Optional[float] = Field(None, gt=0)
    mass_amu: Optional[float] = Field(None, gt=0)
    frequency_hz: Optional[float] = Field(None, gt=0)
    a: Optional[float] = Field(None, gt=0)
    U0: Optional[float] = Field(None, ge=0)

    # spectrum / jwkb
    e_max: float = 10.0
    method: Literal["analytic", "jwkb", "both"] = "analytic"
    extra_levels: List[int] = Field(default_factory=list)
    reference: List[List[float]] = Field(default_factory=list)

    # transitions
    n: int = Field(0, ge=0)
    target: int = Field(0, ge=0)
    u0_grid: Optional[GridSpec] = None
    strategy: OverlapStrategy = OverlapStrategy.KRONROD

    # scatter
    E: Optional[float] = Field(None, gt=0)
    vary: Optional[SweepVariable] = None
    grid: Optional[GridSpec] = None
    scatter_method: ScatterMethod = ScatterMethod.CLOSED_FORM

    # delta-limit
    c: float = Field(1.0, ge=0)
    a_start: float = Field(0.125, gt=0)
    halvings: int = Field(8, ge=2)
    levels: int = Field(4, ge=1)

    @field_validator("u0_grid", "grid", mode="before")
    @classmethod
    def _parse_grid(cls, value: Any) -> Any:
        if isinstance(value, str):
            return GridSpec.parse(value)
        return value

    def trap_params(self, a: Optional[float] = None, U0: Optional[float] = None) -> TrapParams:
        """
        TrapParams kur; natural preset ħ=1, m=1/2 varsayar, SI açık değer ister

        Raises:
            PresetError: Gerekli alan eksikse
        """
        a = a if a is not None else self.a
        if U0 is None:
            U0 = self.U0 if self.U0 is not None else (self.u0_grid.lo if self.u0_grid else None)

        if self.unit_preset is UnitPreset.SI:
            fields = {"mass_amu": self.mass_amu, "frequency_hz": self.frequency_hz, "a": a, "U0": U0}
            missing = [k for k, v in fields.items() if v is None]
            if missing:
                raise PresetError(f"SI preset requires explicit values for: {', '.join(missing)}")
            return TrapParams.si(self.mass_amu, self.frequency_hz, a, U0)

        missing = [k for k, v in {"a": a, "U0": U0}.items() if v is None]
        if missing:
            raise PresetError(f"Trap parameters missing: {', '.join(missing)}")
        return TrapParams.natural(a, U0, self.omega or 1.0)

    def scatter_params(self) -> ScatterParams:
        """Sabit saçılma parametreleri; taranan değişken ızgaranın alt ucundan"""
        fixed = {"E": self.E, "a": self.a, "U0": self.U0}
        if self.vary is not None and self.grid is not None:
            fixed[self.vary.value] = self.grid.lo
        missing = [k for k, v in fixed.items() if v is None]
        if missing:
            raise PresetError(f"Scatter parameters missing: {', '.join(missing)}")
        return ScatterParams(**fixed)


FIXED_KEYS = ("E", "a", "U0")


def parse_fixed(text: Optional[str]) -> Dict[str, float]:
    """
    --fixed değerlerini ayrıştır

    JSON nesnesi ('{"E": 1, "U0": 10}') veya 'E=1,U0=10' çiftleri kabul edilir.

    Raises:
        PresetError: Anahtar E/a/U0 dışındaysa veya değer sayı değilse
    """
    if not text or not text.strip():
        return {}

    if text.lstrip().startswith("{"):
        try:
            raw_items = json.loads(text)
        except json.JSONDecodeError as e:
            raise PresetError(f"--fixed is not valid JSON: {e}") from e
        if not isinstance(raw_items, dict):
            raise PresetError(f"--fixed JSON must be an object, got {type(raw_items).__name__}")
        items = list(raw_items.items())
    else:
        items = []
        for item in text.split(","):
            key, sep, raw = item.partition("=")
            if not sep:
                raise PresetError(f"--fixed expects E=..,a=..,U0=.. pairs or a JSON object, got {item!r}")
            items.append((key.strip(), raw))

    values: Dict[str, float] = {}
    for key, raw in items:
        if key not in FIXED_KEYS:
            raise PresetError(f"--fixed key must be one of {', '.join(FIXED_KEYS)}, got {key!r}")
        if isinstance(raw, bool):
            raise PresetError(f"--fixed value for {key} must be a number, got {raw!r}")
        try:
            values[key] = float(raw)
        except (TypeError, ValueError) as e:
            raise PresetError(f"--fixed value for {key} must be a number, got {raw!r}") from e
    return values


def build_run_config(command: str, preset: Optional[str] = None,
                     overrides: Optional[Mapping[str, Any]] = None,
                     loader: Optional[ConfigLoader] = None) -> RunConfig:
    """
    Preset değerlerini yükle, None olmayan CLI değerleriyle üzerine yaz

    Raises:
        PresetError: Preset tanımlı değilse
        pydantic.ValidationError: Alanlar geçersizse
    """
    data: Dict[str, Any] = {}
    if preset:
        data = loader.get_preset(preset) if loader else get_preset(preset)
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    data["command"] = command
    data["preset"] = preset
    return RunConfig.model_validate(data)


# === Commands ===

def cmd_spectrum(config: RunConfig, numerics: NumericsConfig) -> SweepTable:
    """Analitik spektrum, JWKB seviyeleri veya ikisinin karşılaştırması"""
    params = config.trap_params()
    if config.method == "analytic":
        spectrum = solve_spectrum(params, config.e_max, numerics.roots, numerics.policy, numerics.scan_step)
        return spectrum.to_table()
    if config.method == "jwkb":
        return jwkb_table(params, config.e_max, numerics.roots, numerics.quad)

    table = compare_spectra(params, config.e_max, numerics.roots, config.extra_levels)
    if config.reference:
        table = annotate_with_reference(table, config.reference)
    return table


def cmd_jwkb(config: RunConfig, numerics: NumericsConfig) -> SweepTable:
    """JWKB seviyeleri ve faz kontrolü"""
    return jwkb_table(config.trap_params(), config.e_max, numerics.roots, numerics.quad)


def cmd_transitions(config: RunConfig, numerics: NumericsConfig) -> SweepTable:
    """--u0-grid varsa P(n → hedef) taraması, yoksa n'den tüm seviyelere geçişler"""
    params = config.trap_params()
    if config.u0_grid is not None:
        return probability_sweep(config.n, config.target, config.u0_grid.values(), params,
                                 numerics.quad, config.strategy)
    return transition_table(config.n, params, config.e_max, numerics.quad, config.strategy)


def cmd_scatter(config: RunConfig, numerics: NumericsConfig) -> SweepTable:
    """E, a veya U₀ üzerinde |T|², |R|²"""
    if config.vary is None or config.grid is None:
        raise PresetError("scatter needs --vary and --grid (or a scatter preset)")
    return sweep(config.vary, config.grid.values(), config.scatter_params(), config.scatter_method)


def cmd_figures(config: RunConfig, numerics: NumericsConfig) -> SweepTable:
    """Şekil verisi: fig1-fig2 geçiş olasılığı, fig3-fig5 saçılma"""
    if config.kind == "transitions":
        if config.u0_grid is None:
            raise PresetError("transition figure needs a U0 grid")
        return cmd_transitions(config, numerics)
    if config.kind == "scatter":
        return cmd_scatter(config, numerics)
    raise PresetError("figures needs a figure preset (fig1 ... fig5)")


def cmd_delta_limit(config: RunConfig, numerics: NumericsConfig) -> SweepTable:
    """Sabit c = U₀a'da seviye, kuyu enerjisi ve saçılma farkları"""
    a_sequence = halving_sequence(config.a_start, config.halvings)
    params_base = config.trap_params(a=config.a_start, U0=0.0)
    return limit_study(config.c, a_sequence, params_base, config.E or 1.0, config.levels)


COMMANDS: Dict[str, Callable[[RunConfig, NumericsConfig], SweepTable]] = {
    "spectrum": cmd_spectrum,
    "jwkb": cmd_jwkb,
    "transitions": cmd_transitions,
    "figures": cmd_figures,
    "delta-limit": cmd_delta_limit,
    "scatter": cmd_scatter,
}


def run_command(config: RunConfig, numerics: NumericsConfig) -> SweepTable:
    """config.command'a karşılık gelen işlemi çalıştır"""
    try:
        handler = COMMANDS[config.command]
    except KeyError:
        raise PresetError(f"Unknown command: {config.command}") from None
    logger.info(f"Running {config.command}" + (f" (preset {config.preset})" if config.preset else ""))
    return handler(config, numerics)
