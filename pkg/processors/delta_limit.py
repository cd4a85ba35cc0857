"""
Dimple Trap - Delta Limit

Kesik parabolik kuyunun a → 0 (U₀a = c sabit) limitinde Dirac-δ'ya
indirgenmesi:
- f_δ temsili ve örnekleme özelliğinin sayısal doğrulaması
- Serbest uzayda kuyu bağlı durumları ve δ bağlı durumu
- Harmonik tuzak + δ spektrumu
- Dimple'lı tuzak → harmonik + δ yakınsama tabloları
"""

import logging
import math
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from core.exceptions import RootFindingError
from core.numerics import find_roots, integrate, loglog_slope
from core.schemas import (
    DeltaParams,
    FreeWellParams,
    Parity,
    PrecisionFlag,
    QuadSpec,
    RootSpec,
    SpecialValue,
    TrapParams,
)
from core.specfun import pcf_pair, rgamma
from processors.bound_spectrum import EigenState, solve_spectrum
from processors.scattering import delta_limit_study
from utils.sweep_table import SweepTable

logger = logging.getLogger(__name__)

WELL_SCAN_STEPS = 2000
HARM_DELTA_STEP = 0.01
SPURIOUS_THRESHOLD = 1e-6


# === δ representation ===

def f_delta(x: float, a: float) -> float:
    """f_δ(x) = (3/4a)(1 - x²/a²), |x| ≤ a; dışarıda 0"""
    if abs(x) > a:
        return 0.0
    return 0.75 / a * (1.0 - (x / a) ** 2)


def delta_rep_sample(h: Callable[[float], float], a: float, quad: Optional[QuadSpec] = None) -> float:
    """
    ∫ f_δ(x) h(x) dx; a → 0 iken h(0)'a yakınsar

    Args:
        h: [-a, a] üzerinde düzgün test fonksiyonu
        a: Temsil genişliği
        quad: İntegral toleransları

    Returns:
        Örnekleme değeri
    """
    quad = quad or QuadSpec()
    result = integrate(lambda x: f_delta(x, a) * h(x), -a, a, quad)
    if result.degraded:
        logger.warning(f"Sampling integral degraded at a={a}")
    return result.value


def sampling_convergence(h: Callable[[float], float], a_sequence: Sequence[float],
                         quad: Optional[QuadSpec] = None) -> SweepTable:
    """
    |∫f_δ h - h(0)| dizisi ve gözlenen mertebe (metadata['order'])

    Returns:
        SweepTable (a, sample, error)
    """
    table = SweepTable(["a", "sample", "error"])
    target = h(0.0)
    for a in a_sequence:
        sample = delta_rep_sample(h, a, quad)
        table.add_row(a=float(a), sample=sample, error=sample - target)
    table.metadata["order"] = loglog_slope(table.column("a"), table.column("error"))
    return table


def halving_sequence(a_start: float, halvings: int) -> List[float]:
    """a_start, a_start/2, ..., a_start/2^(halvings-1)"""
    if a_start <= 0 or halvings < 1:
        raise ValueError(f"Need a_start > 0 and halvings >= 1 (got {a_start}, {halvings})")
    return [a_start * 0.5 ** k for k in range(halvings)]


# === Dirac δ ===

def delta_bound_energy(sigma: float, hbar: float = 1.0, m: float = 0.5) -> float:
    """Çekici δ'nın tek bağlı durumu: E = -ħ²σ²/(8m)"""
    return -(hbar * sigma) ** 2 / (8.0 * m)


def sigma_equivalent(U0: float, a: float, hbar: float = 1.0, m: float = 0.5) -> float:
    """Kuyuya eşdeğer δ şiddeti σ = 8maU₀/(3ħ²)"""
    return 8.0 * m * a * U0 / (3.0 * hbar ** 2)


# === Free-space truncated parabolic well ===

def _well_residual(q: float, params: FreeWellParams, parity: Parity) -> SpecialValue:
    """
    x = a eşleşmesi, q = κ/κ_max değişkeninde

    İçeride D_γd(±sx), dışarıda e^{-κ|x|}: s·SG/SD = -κ ⇒ SG + (κ/s)·SD = 0
    """
    match = _well_matching(q, params, parity)
    if match is None:
        return SpecialValue(math.nan, PrecisionFlag.DEGRADED)
    SD, SG, scale, kappa_z, flag = match
    return SpecialValue((SG + kappa_z * SD) / (scale * (1.0 + kappa_z)), flag)


@lru_cache(maxsize=32768)
def _well_matching(q: float, params: FreeWellParams,
                   parity: Parity) -> Optional[Tuple[float, float, float, float, PrecisionFlag]]:
    energy = -q * q * params.U0
    gamma_d = params.gamma_d(energy)
    B = params.s * params.a
    kappa_z = q * params.kappa_max / params.s

    plus = pcf_pair(gamma_d, B)
    minus = pcf_pair(gamma_d, -B)
    top = max(plus.log_scale, minus.log_scale)
    wp = math.exp(plus.log_scale - top)
    wm = math.exp(minus.log_scale - top)

    sign = parity.sign
    SD = wp * plus.value + sign * wm * minus.value
    SG = wp * plus.derivative - sign * wm * minus.derivative
    scale = wp * (abs(plus.value) + abs(plus.derivative)) + wm * (abs(minus.value) + abs(minus.derivative))
    if not (math.isfinite(scale) and scale > 0.0):
        return None
    return SD, SG, scale, kappa_z, PrecisionFlag.worst(plus.flag, minus.flag)


def _well_states(params: FreeWellParams, parity: Parity, spec: Optional[RootSpec]) -> List[EigenState]:
    base = spec or RootSpec(scan_lo=1e-9, scan_hi=1.0 - 1e-12)
    window = base.with_window(max(base.scan_lo, 1e-9), min(base.scan_hi, 1.0 - 1e-12), max(base.scan_steps, WELL_SCAN_STEPS))
    scan = find_roots(lambda q: _well_residual(q, params, parity), window)

    states = []
    for root in scan:
        match = _well_matching(root.value, params, parity)
        if match is None:
            continue
        SD, SG, scale, _, _ = match
        if math.hypot(SD, SG) < SPURIOUS_THRESHOLD * scale:
            logger.info(f"Rejected spurious {parity.value} well root at q={root.value:.10g}")
            continue
        energy = -root.value ** 2 * params.U0
        states.append(EigenState(
            index=-1,
            parity=parity,
            lam=params.gamma_d(energy),
            energy=energy,
            residual=root.residual,
            flag=root.flag,
            hbar_omega=params.hbar * params.nu,
        ))
    # En derin durum en büyük κ
    states.sort(key=lambda s: s.energy)
    return states


def well_ground_energy(params: FreeWellParams, spec: Optional[RootSpec] = None) -> EigenState:
    """
    Kuyunun çift taban durumu, E ∈ (-U₀, 0)

    Raises:
        RootFindingError: Çift kök bulunamazsa
    """
    states = _well_states(params, Parity.EVEN, spec)
    if not states:
        raise RootFindingError(f"No even bound state for a={params.a}, U0={params.U0}")
    ground = states[0]
    ground.index = 0
    logger.debug(f"Well ground state: E={ground.energy:.12g} (a={params.a}, U0={params.U0})")
    return ground


def well_odd_state(params: FreeWellParams, spec: Optional[RootSpec] = None) -> Optional[EigenState]:
    """En düşük tek bağlı durum; yoksa None"""
    states = _well_states(params, Parity.ODD, spec)
    if not states:
        return None
    state = states[0]
    state.index = 1
    return state


def well_energy_convergence(c: float, a_sequence: Sequence[float], hbar: float = 1.0,
                            m: float = 0.5) -> SweepTable:
    """
    Sabit c = U₀a'da kuyu taban enerjisinin δ değerine yakınsaması

    Returns:
        SweepTable (a, U0, energy, delta_energy, relative_error, odd_bound);
        metadata['order'] gözlenen mertebe
    """
    table = SweepTable(["a", "U0", "energy", "delta_energy", "relative_error", "odd_bound"])
    for a in a_sequence:
        params = FreeWellParams(hbar=hbar, m=m, a=a, U0=c / a)
        ground = well_ground_energy(params)
        reference = delta_bound_energy(sigma_equivalent(params.U0, a, hbar, m), hbar, m)
        table.add_row(
            a=float(a),
            U0=params.U0,
            energy=ground.energy,
            delta_energy=reference,
            relative_error=ground.energy / reference - 1.0,
            odd_bound=well_odd_state(params) is not None,
        )
    table.metadata["order"] = loglog_slope(table.column("a"), table.column("relative_error"))
    return table


# === Harmonic trap + δ ===

def harm_delta_residual(lam: float, Lambda: float) -> float:
    """Γ((1-λ)/2)/Γ(-λ/2) = Λ/4, kutupsuz biçimde ve normlanmış"""
    left = rgamma(-0.5 * lam)
    right = 0.25 * Lambda * rgamma(0.5 * (1.0 - lam))
    scale = abs(left) + abs(right)
    if scale == 0.0:
        return 0.0
    if not math.isfinite(scale):
        return math.nan
    return (left - right) / scale


def harm_delta_even_roots(Lambda: float, count: int, spec: Optional[RootSpec] = None) -> List[float]:
    """
    Harmonik + δ çift spektrumunun ilk count kökü (λ, artan)

    Λ = 0'da λ = 0, 2, 4, ...; Λ → ∞'da taban λ → -Λ²/8.
    """
    lo = -(Lambda * Lambda / 8.0 + 5.0)
    hi = 2.0 * count + 0.5
    base = spec or RootSpec(scan_lo=lo, scan_hi=hi)
    window = base.with_window(lo, hi, int(math.ceil((hi - lo) / HARM_DELTA_STEP)))
    scan = find_roots(lambda lam: harm_delta_residual(lam, Lambda), window)
    roots = scan.values[:count]
    if len(roots) < count:
        raise RootFindingError(f"Found {len(roots)} of {count} harmonic+delta roots for Lambda={Lambda}")
    return roots


def harm_delta_odd_levels(count: int) -> List[float]:
    """Tek durumlar δ'yı görmez: λ = 1, 3, 5, ..."""
    return [2.0 * k + 1.0 for k in range(count)]


def dimple_to_delta_convergence(c: float, a_sequence: Sequence[float], params_base: TrapParams,
                                levels: int = 4) -> SweepTable:
    """
    Dimple'lı tuzak köklerinin harmonik + δ köklerine yakınsaması

    Her a için U₀ = c/a; çift kökler Λ = (8mc/3ħ²)√(ħ/mω) ile harmonik + δ
    denklemine, tek kökler 2k + 1'e karşılaştırılır.

    Args:
        c: Sabit tutulan U₀·a
        a_sequence: Azalan a değerleri
        params_base: ħ, m, ω kaynağı
        levels: Her paritede izlenen seviye sayısı

    Returns:
        SweepTable (a, U0, Lambda, even_gap_k, odd_gap_k, flag); metadata['order']
    """
    delta = DeltaParams.from_product(c, params_base.hbar, params_base.m, params_base.omega)
    even_ref = harm_delta_even_roots(delta.Lambda, levels)
    odd_ref = harm_delta_odd_levels(levels)

    columns = ["a", "U0", "Lambda"]
    columns += [f"even_gap_{k}" for k in range(levels)] + [f"odd_gap_{k}" for k in range(levels)] + ["flag"]
    table = SweepTable(columns)

    for a in a_sequence:
        U0 = c / a
        params = TrapParams.model_validate({**params_base.model_dump(), "a": float(a), "U0": U0})
        window = RootSpec(scan_lo=even_ref[0] - 4.0, scan_hi=2.0 * levels + 0.5)
        spectrum = solve_spectrum(params, 2.0 * levels + 1.0, window)

        even = [s.lam for s in spectrum if s.parity is Parity.EVEN][:levels]
        odd = [s.lam for s in spectrum if s.parity is Parity.ODD][:levels]
        row: Dict[str, object] = {"a": float(a), "U0": U0, "Lambda": delta.Lambda}
        complete = len(even) == levels and len(odd) == levels
        for k in range(levels):
            row[f"even_gap_{k}"] = abs(even[k] - even_ref[k]) if k < len(even) else math.nan
            row[f"odd_gap_{k}"] = abs(odd[k] - odd_ref[k]) if k < len(odd) else math.nan
        flags = [s.flag for s in spectrum]
        row["flag"] = PrecisionFlag.worst(*flags) if complete else PrecisionFlag.DEGRADED
        table.add_row(**row)

    table.metadata["order"] = loglog_slope(table.column("a"), table.column("even_gap_0"))
    logger.info(f"Dimple-to-delta convergence for c={c}: {len(table)} points")
    return table


def limit_study(c: float, a_sequence: Sequence[float], params_base: TrapParams,
                energy: float = 1.0, levels: int = 4) -> SweepTable:
    """
    a → 0 limitinin tek tabloda özeti: seviye farkları, kuyu/δ enerji oranı
    ve saçılma |T - T_δ|

    Returns:
        SweepTable (a, U0, even_gap_k, odd_gap_k, max_even_gap, max_odd_gap,
        well_relative_error, scatter_gap, flag); metadata'da seviye başına
        mertebe (level_orders) ve en yavaş yakınsayan seviye (slowest_level)
    """
    gaps = dimple_to_delta_convergence(c, a_sequence, params_base, levels)
    well = well_energy_convergence(c, a_sequence, params_base.hbar, params_base.m) if c > 0 else None
    scatter = delta_limit_study(c, a_sequence, energy, params_base.hbar, params_base.m) if c > 0 else None

    even_columns = [f"even_gap_{k}" for k in range(levels)]
    odd_columns = [f"odd_gap_{k}" for k in range(levels)]
    level_columns = even_columns + odd_columns
    table = SweepTable(["a", "U0", *level_columns, "max_even_gap", "max_odd_gap",
                        "well_relative_error", "scatter_gap", "flag"])
    for i, row in enumerate(gaps):
        table.add_row(
            a=row["a"],
            U0=row["U0"],
            **{name: row[name] for name in level_columns},
            max_even_gap=max(row[name] for name in even_columns),
            max_odd_gap=max(row[name] for name in odd_columns),
            well_relative_error=well.rows[i]["relative_error"] if well is not None else 0.0,
            scatter_gap=scatter.rows[i]["gap"] if scatter is not None else 0.0,
            flag=row["flag"],
        )

    table.metadata["c"] = c
    table.metadata["gap_order"] = gaps.metadata["order"]
    table.metadata["level_orders"] = {
        name: loglog_slope(table.column("a"), table.column(name)) for name in level_columns
    }
    if table.rows:
        last = table.rows[-1]
        slowest = max(level_columns, key=lambda name: -math.inf if math.isnan(last[name]) else last[name])
        table.metadata["slowest_level"] = slowest
        logger.info(f"Slowest level at a={last['a']:.4g}: {slowest} (gap {last[slowest]:.3g})")
    if well is not None:
        table.metadata["well_order"] = well.metadata["order"]
    if scatter is not None:
        table.metadata["scatter_order"] = scatter.metadata["order"]
    return table
