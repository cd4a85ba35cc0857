"""
Dimple Trap - Core Modules

Parametre şemaları, hata sınıfları, özel fonksiyonlar ve sayısal araçlar
"""

__version__ = "0.1.0"

from .exceptions import (
    DimpleError,
    DomainError,
    NormalizationError,
    PresetError,
    RootFindingError,
    SpecialFunctionError,
)
from .schemas import (
    DeltaParams,
    FreeWellParams,
    GridSpec,
    Parity,
    PrecisionFlag,
    PrecisionPolicy,
    QuadSpec,
    RootSpec,
    ScatterParams,
    SpecialValue,
    TrapParams,
)
from .specfun import kummer_phi, pcf_D, pcf_G, pcf_pair
from .numerics import find_roots, integrate, integrate_to_infinity

__all__ = [
    # Exceptions
    "DimpleError",
    "DomainError",
    "NormalizationError",
    "PresetError",
    "RootFindingError",
    "SpecialFunctionError",

    # Schemas
    "DeltaParams",
    "FreeWellParams",
    "GridSpec",
    "Parity",
    "PrecisionFlag",
    "PrecisionPolicy",
    "QuadSpec",
    "RootSpec",
    "ScatterParams",
    "SpecialValue",
    "TrapParams",

    # Special functions
    "kummer_phi",
    "pcf_D",
    "pcf_G",
    "pcf_pair",

    # Numerics
    "find_roots",
    "integrate",
    "integrate_to_infinity",
]
