"""
Dimple Trap - Schemas

Pydantic parametre modelleri, ortak enum'lar ve özel fonksiyon
değerlendirme kaydı (SpecialValue).
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import constants


# === Enums ===

class PrecisionFlag(str, Enum):
    OK = "ok"
    DEGRADED = "degraded"
    POLE = "pole"

    @classmethod
    def worst(cls, *flags: "PrecisionFlag") -> "PrecisionFlag":
        """En kötü bayrağı döndür (pole > degraded > ok)"""
        if cls.POLE in flags:
            return cls.POLE
        if cls.DEGRADED in flags:
            return cls.DEGRADED
        return cls.OK


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"

    @property
    def sign(self) -> int:
        return 1 if self is Parity.EVEN else -1

    @classmethod
    def of_index(cls, n: int) -> "Parity":
        return cls.EVEN if n % 2 == 0 else cls.ODD


class SolveMethod(str, Enum):
    ANALYTIC = "analytic"
    JWKB = "jwkb"


class Region(str, Enum):
    INNER = "inner"
    OUTER = "outer"


class UnitPreset(str, Enum):
    NATURAL = "natural"
    SI = "si"


class ScatterMethod(str, Enum):
    CLOSED_FORM = "closed_form"
    LINEAR_SOLVE = "linear_solve"


class SweepVariable(str, Enum):
    E = "E"
    A = "a"
    U0 = "U0"


class OverlapStrategy(str, Enum):
    KRONROD = "kronrod"
    QUADPACK = "quadpack"


# === Evaluation record ===

Number = Union[float, complex]


@dataclass(frozen=True)
class SpecialValue:
    """Özel fonksiyon sonucu + hassasiyet bayrağı"""
    value: Number
    flag: PrecisionFlag = PrecisionFlag.OK

    @property
    def ok(self) -> bool:
        return self.flag is PrecisionFlag.OK and math.isfinite(abs(self.value))

    def __float__(self) -> float:
        return float(self.value)


# === Numerical settings ===

class PrecisionPolicy(BaseModel):
    """Seri kesme ve iptal (cancellation) eşikleri"""
    model_config = ConfigDict(frozen=True)

    term_tolerance: float = Field(1e-15, gt=0)
    max_terms: int = Field(2000, ge=50)
    cancellation_guard: float = Field(1e-4, gt=0, lt=1)
    asymptotic_switch: float = Field(5.0, gt=0)


class RootSpec(BaseModel):
    """Sign-scan + bisection ayarları"""
    model_config = ConfigDict(frozen=True)

    scan_lo: float
    scan_hi: float
    scan_steps: int = Field(200, ge=10)
    root_tolerance: float = Field(1e-12, gt=0)
    residual_tolerance: float = Field(1e-8, gt=0)

    @model_validator(mode="after")
    def _check_window(self) -> "RootSpec":
        if not self.scan_lo < self.scan_hi:
            raise ValueError(f"scan_lo ({self.scan_lo}) must be below scan_hi ({self.scan_hi})")
        return self

    def with_window(self, lo: float, hi: float, steps: Optional[int] = None) -> "RootSpec":
        """Aynı toleranslarla yeni tarama penceresi"""
        return RootSpec(
            scan_lo=lo,
            scan_hi=hi,
            scan_steps=max(10, steps if steps is not None else self.scan_steps),
            root_tolerance=self.root_tolerance,
            residual_tolerance=self.residual_tolerance,
        )


class QuadSpec(BaseModel):
    """Adaptive Gauss-Kronrod ayarları"""
    model_config = ConfigDict(frozen=True)

    abs_tolerance: float = Field(1e-12, gt=0)
    rel_tolerance: float = Field(1e-10, gt=0)
    max_depth: int = Field(50, gt=0, le=60)
    tail_cut: Optional[float] = Field(None, gt=0)


# === Physical parameters ===

ATOMIC_MASS = constants.physical_constants["atomic mass constant"][0]


class TrapParams(BaseModel):
    """Harmonik tuzak + kesik parabolik dimple parametreleri"""
    model_config = ConfigDict(frozen=True)

    hbar: float = Field(..., gt=0)
    m: float = Field(..., gt=0)
    omega: float = Field(..., gt=0)
    a: float = Field(..., gt=0)
    U0: float = Field(..., ge=0)
    unit_preset: UnitPreset = UnitPreset.NATURAL

    @model_validator(mode="before")
    @classmethod
    def _apply_unit_preset(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        preset = UnitPreset(data.get("unit_preset", UnitPreset.NATURAL))
        if preset is UnitPreset.NATURAL:
            data.setdefault("hbar", 1.0)
            data.setdefault("m", 0.5)
            data.setdefault("omega", 1.0)
        else:
            data.setdefault("hbar", constants.hbar)
            missing = [k for k in ("m", "omega", "a", "U0") if data.get(k) is None]
            if missing:
                raise ValueError(f"SI preset requires explicit values for: {', '.join(missing)}")
        return data

    @model_validator(mode="after")
    def _check_natural_units(self) -> "TrapParams":
        if self.unit_preset is UnitPreset.NATURAL and (self.hbar != 1.0 or self.m != 0.5):
            raise ValueError("natural preset fixes hbar=1 and m=1/2")
        return self

    @classmethod
    def natural(cls, a: float, U0: float, omega: float = 1.0) -> "TrapParams":
        return cls(a=a, U0=U0, omega=omega, unit_preset=UnitPreset.NATURAL)

    @classmethod
    def si(cls, mass_amu: float, frequency_hz: float, a: float, U0: float) -> "TrapParams":
        """SI parametreler: kütle amu, frekans Hz (ω = 2π f)"""
        return cls(
            m=mass_amu * ATOMIC_MASS,
            omega=2.0 * math.pi * frequency_hz,
            a=a,
            U0=U0,
            unit_preset=UnitPreset.SI,
        )

    @property
    def hbar_omega(self) -> float:
        return self.hbar * self.omega

    @property
    def matching_energy(self) -> float:
        """V(a) = ½ m ω² a²"""
        return 0.5 * self.m * self.omega ** 2 * self.a ** 2

    @property
    def length(self) -> float:
        """Osilatör uzunluğu √(ħ/(mω))"""
        return math.sqrt(self.hbar / (self.m * self.omega))


class FreeWellParams(BaseModel):
    """Serbest uzayda kesik parabolik kuyu (harmonik tuzak yok)"""
    model_config = ConfigDict(frozen=True)

    hbar: float = Field(1.0, gt=0)
    m: float = Field(0.5, gt=0)
    a: float = Field(..., gt=0)
    U0: float = Field(..., gt=0)

    @property
    def nu(self) -> float:
        """ν = √(2U₀/(m a²))"""
        return math.sqrt(2.0 * self.U0 / (self.m * self.a ** 2))

    @property
    def s(self) -> float:
        """İç bölge ölçeği √(mν/ħ)"""
        return math.sqrt(self.m * self.nu / self.hbar)

    @property
    def kappa_max(self) -> float:
        """κ at E = −U₀"""
        return math.sqrt(2.0 * self.m * self.U0) / self.hbar

    def gamma(self, energy: float) -> float:
        return energy / (self.hbar * self.nu) - 0.5

    def gamma_d(self, energy: float) -> float:
        return (energy + self.U0) / (self.hbar * self.nu) - 0.5

    def kappa(self, energy: float) -> float:
        if energy >= 0:
            raise ValueError(f"kappa is real only for E < 0 (got {energy})")
        return math.sqrt(-2.0 * self.m * energy) / self.hbar


class DeltaParams(BaseModel):
    """Dirac-δ bağlaşımı; c = U₀·a limit çalışmalarında sabit tutulur"""
    model_config = ConfigDict(frozen=True)

    sigma: float = Field(..., ge=0)
    hbar: float = Field(1.0, gt=0)
    m: float = Field(0.5, gt=0)
    omega: float = Field(1.0, gt=0)
    c: Optional[float] = Field(None, ge=0)

    @classmethod
    def from_product(cls, c: float, hbar: float = 1.0, m: float = 0.5, omega: float = 1.0) -> "DeltaParams":
        """σ = 8 m c / (3ħ²) ile c = U₀a'dan kur"""
        return cls(sigma=8.0 * m * c / (3.0 * hbar ** 2), hbar=hbar, m=m, omega=omega, c=c)

    @property
    def Lambda(self) -> float:
        """Λ = σ √(ħ/(mω))"""
        return self.sigma * math.sqrt(self.hbar / (self.m * self.omega))


class ScatterParams(BaseModel):
    """Saçılma problemi: E > 0, kuyu genişliği a, derinlik U₀"""
    model_config = ConfigDict(frozen=True)

    E: float = Field(..., gt=0)
    a: float = Field(..., gt=0)
    U0: float = Field(..., ge=0)
    hbar: float = Field(1.0, gt=0)
    m: float = Field(0.5, gt=0)

    @property
    def k(self) -> float:
        return math.sqrt(2.0 * self.m * self.E) / self.hbar

    @property
    def nu(self) -> float:
        return math.sqrt(2.0 * self.U0 / (self.m * self.a ** 2))

    @property
    def s(self) -> float:
        return math.sqrt(self.m * self.nu / self.hbar)

    @property
    def gamma_d(self) -> float:
        return (self.E + self.U0) / (self.hbar * self.nu) - 0.5

    @property
    def y(self) -> float:
        """Tüm Φ argümanları: a²s²"""
        return (self.a * self.s) ** 2


class GridSpec(BaseModel):
    """lo:hi:steps biçiminde eşit aralıklı ızgara"""
    model_config = ConfigDict(frozen=True)

    lo: float
    hi: float
    steps: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _check_bounds(self) -> "GridSpec":
        if self.steps > 1 and not self.lo < self.hi:
            raise ValueError(f"grid lo ({self.lo}) must be below hi ({self.hi})")
        return self

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must look like lo:hi:steps, got {text!r}")
        return cls(lo=float(parts[0]), hi=float(parts[1]), steps=int(parts[2]))

    def values(self) -> List[float]:
        if self.steps == 1:
            return [self.lo]
        return [float(v) for v in np.linspace(self.lo, self.hi, self.steps)]
