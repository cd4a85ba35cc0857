"""
Dimple Trap - Sudden Transitions

Ani yaklaşım: çıplak tuzağın osilatör durumlarından dimple'lı tuzak
özdurumlarına geçiş genlikleri t = ⟨ψ_n|Ψ_λ⟩ ve olasılıklar P = |t|².

İki bağımsız integrasyon stratejisi:
- kronrod: core.numerics Gauss-Kronrod, ±a'da bölünmüş, Gauss kuyruk kesmesi
- quadpack: scipy.integrate.quad aynı parçalarda
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate

from core.numerics import QuadResult, integrate, integrate_to_infinity
from core.schemas import OverlapStrategy, Parity, PrecisionFlag, QuadSpec, TrapParams
from processors.bound_spectrum import (
    EigenState,
    PiecewiseWaveFunction,
    Spectrum,
    derived_scales,
    eigenfunction,
    solve_spectrum,
)
from utils.sweep_table import SweepTable

logger = logging.getLogger(__name__)

_PI_QUARTER = math.pi ** -0.25
_RESCALE = 1e150
SWEEP_COLUMNS = ["U0", "P", "amplitude", "flag"]
ROW_COLUMNS = ["n", "target_index", "energy_over_hbar_omega", "amplitude", "probability", "error", "flag", "strategy"]


# === Harmonic oscillator states ===

def hermite_function(n: int, z: float) -> float:
    """
    Normlu Hermite fonksiyonu φ_n(z) = H_n(z) e^{-z²/2} / √(2ⁿ n! √π)

    Normlu üç terimli rekürans, taşmaya karşı log ölçekleme ile.
    """
    prev = 0.0
    current = _PI_QUARTER
    log_scale = 0.0
    for k in range(n):
        nxt = math.sqrt(2.0 / (k + 1)) * z * current - math.sqrt(k / (k + 1)) * prev
        prev, current = current, nxt
        if abs(current) > _RESCALE:
            prev /= _RESCALE
            current /= _RESCALE
            log_scale += math.log(_RESCALE)
    if current == 0.0:
        return 0.0
    return current * math.exp(log_scale - 0.5 * z * z)


@dataclass(frozen=True)
class HoState:
    """Çıplak harmonik tuzak özdurumu ψ_n(x) = (mω/ħ)^{1/4} φ_n(z)"""
    n: int
    length: float

    @property
    def parity(self) -> Parity:
        return Parity.of_index(self.n)

    def reduced(self, z: float) -> float:
        return hermite_function(self.n, z)

    def __call__(self, x):
        scale = 1.0 / math.sqrt(self.length)
        if np.ndim(x) == 0:
            return scale * self.reduced(float(x) / self.length)
        return np.array([scale * self.reduced(float(v) / self.length) for v in np.ravel(x)]).reshape(np.shape(x))


def ho_eigenfunction(n: int, params: TrapParams) -> HoState:
    """n. osilatör durumu (n ≥ 0)"""
    if n < 0:
        raise ValueError(f"Oscillator index must be non-negative, got {n}")
    return HoState(n=n, length=params.length)


# === Amplitudes ===

@dataclass
class TransitionRecord:
    """Geçiş genliği ve olasılığı"""
    n: int
    target_index: int
    amplitude: float
    probability: float
    error: float = 0.0
    flag: PrecisionFlag = PrecisionFlag.OK
    strategy: OverlapStrategy = OverlapStrategy.KRONROD


def _tail_start(state: EigenState, n: int, A: float) -> float:
    """İki fonksiyonun da dönüm noktasının ötesi"""
    turning = math.sqrt(max(2.0 * max(state.lam, float(n)) + 1.0, 0.0))
    return max(A, turning + 1.0)


def _kronrod_pieces(f: Callable[[float], float], A: float, z_tail: float, power: float,
                    quad: QuadSpec) -> QuadResult:
    mirrored = lambda z: f(-z)
    pieces = [
        integrate(f, -A, A, quad),
        integrate(f, A, z_tail, quad),
        integrate_to_infinity(f, z_tail, 1.0, power, quad),
        integrate(mirrored, A, z_tail, quad),
        integrate_to_infinity(mirrored, z_tail, 1.0, power, quad),
    ]
    return QuadResult(
        math.fsum(p.value for p in pieces),
        math.fsum(p.error for p in pieces),
        any(p.degraded for p in pieces),
    )


def _quadpack_pieces(f: Callable[[float], float], A: float, quad: QuadSpec) -> QuadResult:
    options = dict(epsabs=quad.abs_tolerance, epsrel=quad.rel_tolerance, limit=200)
    left = sp_integrate.quad(f, -np.inf, -A, **options)
    middle = sp_integrate.quad(f, -A, A, **options)
    right = sp_integrate.quad(f, A, np.inf, **options)
    value = left[0] + middle[0] + right[0]
    error = left[1] + middle[1] + right[1]
    degraded = error > max(quad.abs_tolerance, quad.rel_tolerance * abs(value)) * 10.0
    return QuadResult(value, error, degraded)


def transition_amplitude(n: int, state: EigenState, params: TrapParams,
                         quad: Optional[QuadSpec] = None,
                         strategy: OverlapStrategy = OverlapStrategy.KRONROD,
                         wave: Optional[PiecewiseWaveFunction] = None) -> TransitionRecord:
    """
    t = ∫ ψ_n(x) Ψ_λ(x) dx, x-uzayında birim normlu iki durum

    Zıt paritede integral alınmadan tam 0 döner.

    Args:
        n: Osilatör indeksi
        state: Dimple'lı tuzak özdurumu
        params: Tuzak parametreleri
        quad: İntegral toleransları
        strategy: kronrod veya quadpack
        wave: Önceden normlanmış özfonksiyon (yoksa hesaplanır)

    Returns:
        TransitionRecord
    """
    if Parity.of_index(n) is not state.parity:
        return TransitionRecord(n, state.index, 0.0, 0.0, strategy=strategy)

    quad = quad or QuadSpec()
    wave = wave or eigenfunction(state, params, quad)
    ho = ho_eigenfunction(n, params)
    A = derived_scales(params).A

    # z = x/ℓ: ∫ψ_n Ψ dx = ∫φ_n(z) Ψ̃(z) dz
    integrand = lambda z: ho.reduced(z) * wave.reduced(z)

    if strategy is OverlapStrategy.QUADPACK:
        result = _quadpack_pieces(integrand, A, quad)
    else:
        result = _kronrod_pieces(integrand, A, _tail_start(state, n, A), n + state.lam, quad)

    amplitude = result.value
    probability = amplitude * amplitude
    flag = PrecisionFlag.DEGRADED if result.degraded else PrecisionFlag.OK
    if probability <= 1.0 + 1e-8:
        probability = min(probability, 1.0)
    else:
        logger.warning(f"Probability {probability:.12g} exceeds 1 for n={n} -> level {state.index}")
        flag = PrecisionFlag.DEGRADED

    return TransitionRecord(n, state.index, amplitude, probability, result.error, flag, strategy)


def transition_row(n: int, spectrum: Spectrum, params: TrapParams,
                   quad: Optional[QuadSpec] = None,
                   strategy: OverlapStrategy = OverlapStrategy.KRONROD) -> List[TransitionRecord]:
    """n. osilatör durumundan çözülmüş spektrumdaki tüm seviyelere genlikler"""
    return [transition_amplitude(n, state, params, quad, strategy) for state in spectrum]


def transition_table(n: int, params: TrapParams, e_max: float,
                     quad: Optional[QuadSpec] = None,
                     strategy: OverlapStrategy = OverlapStrategy.KRONROD) -> SweepTable:
    """
    n. osilatör durumundan e_max'a (ħω) kadar tüm seviyelere geçişler

    Returns:
        SweepTable (n, target_index, energy_over_hbar_omega, amplitude, probability, error, flag, strategy);
        metadata['completeness_defect'] = 1 - Σ P
    """
    spectrum = solve_spectrum(params, e_max)
    records = transition_row(n, spectrum, params, quad, strategy)
    table = SweepTable(list(ROW_COLUMNS))
    for state, record in zip(spectrum, records):
        table.add_row(
            n=record.n,
            target_index=record.target_index,
            energy_over_hbar_omega=state.energy_over_hbar_omega,
            amplitude=record.amplitude,
            probability=record.probability,
            error=record.error,
            flag=PrecisionFlag.worst(record.flag, state.flag),
            strategy=record.strategy,
        )
    total = math.fsum(r.probability for r in records)
    table.metadata["completeness_defect"] = 1.0 - total
    logger.debug(f"Completeness for n={n} up to E={e_max}: sum P={total:.12f}")
    return table


def completeness_defect(n: int, params: TrapParams, e_max: float,
                        quad: Optional[QuadSpec] = None,
                        strategy: OverlapStrategy = OverlapStrategy.KRONROD) -> float:
    """
    1 - Σ P_{n,hedef}, e_max'a (ħω) kadar çözülmüş spektrum üzerinde

    Kesme büyüdükçe sıfıra doğru azalır.
    """
    return transition_table(n, params, e_max, quad, strategy).metadata["completeness_defect"]


def probability_sweep(n: int, target_index: int, U0_grid: Sequence[float], params: TrapParams,
                      quad: Optional[QuadSpec] = None,
                      strategy: OverlapStrategy = OverlapStrategy.KRONROD) -> SweepTable:
    """
    U₀ ızgarası üzerinde P_{n,hedef}

    Args:
        n: Başlangıç osilatör indeksi
        target_index: Dimple'lı spektrumdaki hedef seviye
        U0_grid: U₀ değerleri (≥ 0)
        params: Diğer tuzak parametreleri

    Returns:
        SweepTable (U0, P, amplitude, flag)
    """
    table = SweepTable(list(SWEEP_COLUMNS))
    base = params.model_dump()
    for U0 in U0_grid:
        point = TrapParams.model_validate({**base, "U0": float(U0)})
        # Dimple enerjileri düşürür: hedef seviye E ≤ (k + 1/2)ħω
        spectrum = solve_spectrum(point, target_index + 1.0)
        if target_index >= len(spectrum):
            logger.warning(f"Target level {target_index} not found at U0={U0}")
            table.add_row(U0=float(U0), P=math.nan, amplitude=math.nan, flag=PrecisionFlag.DEGRADED)
            continue
        record = transition_amplitude(n, spectrum[target_index], point, quad, strategy)
        table.add_row(U0=float(U0), P=record.probability, amplitude=record.amplitude, flag=record.flag)
    logger.info(f"Probability sweep n={n} -> {target_index}: {len(table)} points")
    return table
