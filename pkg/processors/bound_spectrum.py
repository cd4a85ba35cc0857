"""
Dimple Trap - Bound Spectrum

Harmonik tuzak + kesik parabolik dimple için bağlı durumlar.
Çift/tek özdeğer denklemleri x = a noktasında dış D_λ(z) ile iç
D_λd(z_d) ± D_λd(-z_d) çözümlerinin eşleşmesinden gelir.

Tüm λ taraması boyutsuz değişkenlerle yapılır (enerjiler ħω biriminde).
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np

from core.exceptions import NormalizationError, RootFindingError
from core.numerics import integrate, integrate_to_infinity, find_roots
from core.schemas import (
    Parity,
    PrecisionFlag,
    PrecisionPolicy,
    QuadSpec,
    RootSpec,
    SolveMethod,
    SpecialValue,
    TrapParams,
)
from core.specfun import DEFAULT_POLICY, pcf_pair
from utils.sweep_table import SweepTable

logger = logging.getLogger(__name__)

SCAN_STEP = 0.05
LEVEL_WINDOW = 0.45
SPURIOUS_THRESHOLD = 1e-6
CONTINUITY_TOLERANCE = 1e-6
SPECTRUM_COLUMNS = ["index", "parity", "lambda", "energy_over_hbar_omega", "residual", "method", "flag"]


# === Derived scales ===

@dataclass(frozen=True)
class DerivedScales:
    """ω_d, A, B ve λ ↔ ε ↔ E dönüşümleri"""
    omega_d: float
    ratio: float          # ω_d / ω
    A: float
    B: float
    length: float         # √(ħ/(mω))
    length_d: float       # √(ħ/(mω_d))
    depth: float          # U₀ / ħω
    hbar_omega: float

    def energy_from_lambda(self, lam: float) -> float:
        return (lam + 0.5) * self.hbar_omega

    def lambda_d(self, lam: float) -> float:
        """λ_d = (E + U₀)/(ħω_d) - 1/2"""
        return (lam + 0.5 + self.depth) / self.ratio - 0.5

    def z(self, x: float) -> float:
        return x / self.length


def derived_scales(params: TrapParams) -> DerivedScales:
    """
    TrapParams'tan tüm türetilmiş ölçekleri hesapla

    Args:
        params: Tuzak parametreleri

    Returns:
        DerivedScales (U₀ = 0 için ω_d = ω, B = A)
    """
    omega_d = math.sqrt(params.omega ** 2 + 2.0 * params.U0 / (params.m * params.a ** 2))
    length = params.length
    length_d = math.sqrt(params.hbar / (params.m * omega_d))
    return DerivedScales(
        omega_d=omega_d,
        ratio=omega_d / params.omega,
        A=params.a / length,
        B=params.a / length_d,
        length=length,
        length_d=length_d,
        depth=params.U0 / params.hbar_omega,
        hbar_omega=params.hbar_omega,
    )


# === Eigenvalue equations ===

@dataclass(frozen=True)
class _Matching:
    """x = a'daki ölçeklenmiş değerler; dış (dA, gA) ve iç (SD, SG) taraf"""
    dA: float
    gA: float
    log_outer: float
    SD: float
    SG: float
    log_inner: float
    inner_scale: float
    inv_sqrt_ratio: float
    flag: PrecisionFlag

    @property
    def residual(self) -> float:
        return (self.inv_sqrt_ratio * self.SD * self.gA - self.SG * self.dA) / self.inner_scale

    @property
    def spurious(self) -> bool:
        """İç kombinasyon özdeş sıfır (yanlış pariteli tamsayı λ_d)"""
        return math.hypot(self.SD, self.SG) < SPURIOUS_THRESHOLD * self.inner_scale


@lru_cache(maxsize=65536)
def _matching(lam: float, params: TrapParams, parity: Parity, policy: PrecisionPolicy) -> _Matching:
    scales = derived_scales(params)
    sign = parity.sign
    lam_d = scales.lambda_d(lam)

    outer = pcf_pair(lam, scales.A, policy)
    plus = pcf_pair(lam_d, scales.B, policy)
    minus = pcf_pair(lam_d, -scales.B, policy)

    top = max(plus.log_scale, minus.log_scale)
    wp = math.exp(plus.log_scale - top)
    wm = math.exp(minus.log_scale - top)

    SD = wp * plus.value + sign * wm * minus.value
    SG = wp * plus.derivative - sign * wm * minus.derivative
    inner_scale = wp * (abs(plus.value) + abs(plus.derivative)) + wm * (abs(minus.value) + abs(minus.derivative))

    return _Matching(
        dA=outer.value,
        gA=outer.derivative,
        log_outer=outer.log_scale,
        SD=SD,
        SG=SG,
        log_inner=top,
        inner_scale=inner_scale,
        inv_sqrt_ratio=1.0 / math.sqrt(scales.ratio),
        flag=PrecisionFlag.worst(outer.flag, plus.flag, minus.flag),
    )


def _residual(lam: float, params: TrapParams, parity: Parity, policy: PrecisionPolicy) -> SpecialValue:
    match = _matching(float(lam), params, parity, policy)
    if not (match.inner_scale > 0.0 and math.isfinite(match.inner_scale)):
        return SpecialValue(math.nan, PrecisionFlag.DEGRADED)
    value = match.residual
    if not math.isfinite(value):
        return SpecialValue(math.nan, PrecisionFlag.DEGRADED)
    return SpecialValue(value, match.flag)


def even_residual(lam: float, params: TrapParams, policy: PrecisionPolicy = DEFAULT_POLICY) -> SpecialValue:
    """
    Çift özdeğer denkleminin çapraz çarpılmış artığı

    G_λ(A)·[D_λd(B) + D_λd(-B)] - √(ω_d/ω)·D_λ(A)·[G_λd(B) - G_λd(-B)],
    iç terimlerin büyüklüğüne bölünmüş (sürekli ve kutupsuz).

    Args:
        lam: λ = E/ħω - 1/2
        params: Tuzak parametreleri
        policy: Özel fonksiyon hassasiyet politikası

    Returns:
        SpecialValue; özdeğerlerde sıfır
    """
    return _residual(lam, params, Parity.EVEN, policy)


def odd_residual(lam: float, params: TrapParams, policy: PrecisionPolicy = DEFAULT_POLICY) -> SpecialValue:
    """Tek özdeğer denklemi; iç kombinasyon D_λd(z_d) - D_λd(-z_d)"""
    return _residual(lam, params, Parity.ODD, policy)


# === Spectrum ===

@dataclass
class EigenState:
    """Tek bağlı seviye"""
    index: int
    parity: Parity
    lam: float
    energy: float
    method: SolveMethod = SolveMethod.ANALYTIC
    residual: float = 0.0
    flag: PrecisionFlag = PrecisionFlag.OK
    hbar_omega: float = 1.0

    @property
    def energy_over_hbar_omega(self) -> float:
        return self.lam + 0.5

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["parity"] = self.parity.value
        data["method"] = self.method.value
        data["flag"] = self.flag.value
        return data


@dataclass
class Spectrum:
    """Birleştirilmiş, sıralı ve indekslenmiş seviyeler"""
    params: TrapParams
    states: List[EigenState] = field(default_factory=list)
    gaps: List[Tuple[float, float]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[EigenState]:
        return iter(self.states)

    def __getitem__(self, i: int) -> EigenState:
        return self.states[i]

    @property
    def energies(self) -> List[float]:
        """E/ħω"""
        return [s.energy_over_hbar_omega for s in self.states]

    def to_table(self) -> SweepTable:
        table = SweepTable(list(SPECTRUM_COLUMNS))
        for s in self.states:
            table.add_row(
                index=s.index,
                parity=s.parity,
                energy_over_hbar_omega=s.energy_over_hbar_omega,
                residual=s.residual,
                method=s.method,
                flag=s.flag,
                **{"lambda": s.lam},
            )
        if self.gaps:
            table.metadata["gaps"] = [list(g) for g in self.gaps]
        return table


def _lower_lambda(params: TrapParams) -> float:
    """E > -U₀ ⇔ λ > -U₀/ħω - 1/2"""
    return -params.U0 / params.hbar_omega - 0.5 + 1e-9


def _scan_parity(params: TrapParams, parity: Parity, spec: RootSpec,
                 policy: PrecisionPolicy) -> Tuple[List[Tuple[float, float, PrecisionFlag]], List[Tuple[float, float]]]:
    """Bir pariteyi tara; sahte kökleri ele"""
    scan = find_roots(lambda lam: _residual(lam, params, parity, policy), spec)
    accepted = []
    for root in scan:
        match = _matching(float(root.value), params, parity, policy)
        sides_finite = all(math.isfinite(v) for v in (match.SD, match.SG, match.dA, match.gA))
        if not sides_finite:
            logger.warning(f"Rejected {parity.value} root at lambda={root.value:.10g}: non-finite matching sides")
            continue
        if match.spurious:
            logger.info(f"Rejected spurious {parity.value} root at lambda={root.value:.10g} (inner combination vanishes)")
            continue
        accepted.append((root.value, root.residual, root.flag))
    return accepted, list(scan.gaps)


def _merge(params: TrapParams, found: Dict[Parity, List[Tuple[float, float, PrecisionFlag]]]) -> List[EigenState]:
    scales = derived_scales(params)
    states = []
    for parity, roots in found.items():
        for lam, residual, flag in roots:
            states.append(EigenState(
                index=-1,
                parity=parity,
                lam=lam,
                energy=scales.energy_from_lambda(lam),
                residual=residual,
                flag=flag,
                hbar_omega=params.hbar_omega,
            ))
    states.sort(key=lambda s: s.lam)
    for i, state in enumerate(states):
        state.index = i
    return states


def _alternates(states: List[EigenState]) -> bool:
    return all(s.parity is Parity.of_index(i) for i, s in enumerate(states))


def solve_spectrum(params: TrapParams, e_max: float, spec: Optional[RootSpec] = None,
                   policy: PrecisionPolicy = DEFAULT_POLICY, scan_step: float = SCAN_STEP) -> Spectrum:
    """
    E ≤ e_max (ħω biriminde) tüm çift ve tek seviyeleri bul

    Args:
        params: Tuzak parametreleri
        e_max: Enerji üst sınırı, E/ħω
        spec: Tarama penceresi (fiziksel pencereyle kesiştirilir) ve toleranslar
        policy: Özel fonksiyon hassasiyet politikası
        scan_step: λ ızgara adımı

    Returns:
        Spectrum (artan enerji, çift taban durumuyla başlayan alternasyon)
    """
    lo = _lower_lambda(params)
    hi = e_max - 0.5
    if spec is not None:
        lo = max(lo, spec.scan_lo)
        hi = min(hi, spec.scan_hi)
    if hi <= lo:
        raise RootFindingError(f"Empty lambda window [{lo:.6g}, {hi:.6g}] for e_max={e_max}")

    base = spec or RootSpec(scan_lo=lo, scan_hi=hi)
    window = base.with_window(lo, hi, int(math.ceil((hi - lo) / scan_step)))
    logger.info(f"Scanning lambda in [{lo:.6g}, {hi:.6g}] with {window.scan_steps} steps per parity")

    found: Dict[Parity, List[Tuple[float, float, PrecisionFlag]]] = {}
    gaps: List[Tuple[float, float]] = []
    for parity in Parity:
        found[parity], parity_gaps = _scan_parity(params, parity, window, policy)
        gaps.extend(parity_gaps)

    states = _merge(params, found)

    if not _alternates(states):
        # Yakın kökler: komşular arası boşlukları 10x ince tara
        logger.warning("Parity alternation broken; rescanning neighbouring intervals with a finer grid")
        edges = [lo] + [s.lam for s in states] + [hi]
        for left, right in zip(edges[:-1], edges[1:]):
            if right - left <= 2.0 * base.root_tolerance:
                continue
            inner_lo = left + base.root_tolerance
            inner_hi = right - base.root_tolerance
            fine = window.with_window(inner_lo, inner_hi, int(math.ceil(10.0 * (inner_hi - inner_lo) / scan_step)))
            for parity in Parity:
                extra, _ = _scan_parity(params, parity, fine, policy)
                known = {round(r[0], 9) for r in found[parity]}
                found[parity].extend(r for r in extra if round(r[0], 9) not in known)
        states = _merge(params, found)
        if not _alternates(states):
            logger.warning("Parity alternation still broken after refinement")

    logger.info(f"Found {len(states)} levels up to E={e_max} hbar*omega")
    return Spectrum(params=params, states=states, gaps=gaps)


def solve_level(params: TrapParams, n: int, guess_lambda: float, spec: Optional[RootSpec] = None,
                policy: PrecisionPolicy = DEFAULT_POLICY, window: float = LEVEL_WINDOW) -> EigenState:
    """
    Tek bir seviyeyi tahmin çevresinde çöz (aradaki seviyeler taranmaz)

    Args:
        params: Tuzak parametreleri
        n: Seviye indeksi (parite n mod 2)
        guess_lambda: Başlangıç tahmini (örn. JWKB)
        spec: Tolerans kaynağı
        window: Tahmin etrafındaki yarı genişlik

    Returns:
        EigenState

    Raises:
        RootFindingError: Pencerede kök yoksa
    """
    parity = Parity.of_index(n)
    lo = max(_lower_lambda(params), guess_lambda - window)
    hi = guess_lambda + window
    base = spec or RootSpec(scan_lo=lo, scan_hi=hi)
    search = base.with_window(lo, hi, int(math.ceil((hi - lo) / SCAN_STEP)))

    roots, _ = _scan_parity(params, parity, search, policy)
    if not roots:
        raise RootFindingError(f"No {parity.value} root within {window} of lambda={guess_lambda:.6g} for level {n}")

    lam, residual, flag = min(roots, key=lambda r: abs(r[0] - guess_lambda))
    logger.debug(f"Level {n}: lambda={lam:.10g} (guess {guess_lambda:.10g})")
    return EigenState(
        index=n,
        parity=parity,
        lam=lam,
        energy=derived_scales(params).energy_from_lambda(lam),
        residual=residual,
        flag=flag,
        hbar_omega=params.hbar_omega,
    )


def shifted_oscillator_energy(params: TrapParams, n: int) -> float:
    """Derin kuyu referansı: -U₀ + (n + 1/2)ħω_d"""
    return -params.U0 + (n + 0.5) * params.hbar * derived_scales(params).omega_d


# === Eigenfunctions ===

@dataclass
class PiecewiseWaveFunction:
    """
    Üç bölgeli özfonksiyon

    |x| > a: c_out·D_λ(|z|) (x < -a için parite işaretiyle),
    |x| ≤ a: c_in·[D_λd(z_d) ± D_λd(-z_d)].
    Katsayılar x'te birim norma göre ölçeklenmiştir.
    """
    params: TrapParams
    state: EigenState
    scales: DerivedScales
    c_out: float
    c_in: float
    log_outer: float
    log_inner: float
    norm_error: float = 0.0
    continuity_defect: float = 0.0

    @property
    def parity(self) -> Parity:
        return self.state.parity

    @property
    def lam_d(self) -> float:
        return self.scales.lambda_d(self.state.lam)

    def reduced(self, z: float) -> float:
        """z = x/ℓ değişkeninde birim normlu dalga fonksiyonu"""
        sign = self.parity.sign
        if z < 0.0:
            return sign * self.reduced(-z)

        if z >= self.scales.A:
            pair = pcf_pair(self.state.lam, z)
            return self.c_out * pair.value * math.exp(pair.log_scale - self.log_outer)

        zd = z * math.sqrt(self.scales.ratio)
        plus = pcf_pair(self.lam_d, zd)
        minus = pcf_pair(self.lam_d, -zd)
        value = (plus.value * math.exp(plus.log_scale - self.log_inner)
                 + sign * minus.value * math.exp(minus.log_scale - self.log_inner))
        return self.c_in * value

    def __call__(self, x: Any) -> Any:
        """Ψ(x), fiziksel birimlerde; numpy dizisi de kabul eder"""
        scale = 1.0 / math.sqrt(self.scales.length)
        if np.ndim(x) == 0:
            return scale * self.reduced(self.scales.z(float(x)))
        return np.array([scale * self.reduced(self.scales.z(float(v))) for v in np.ravel(x)]).reshape(np.shape(x))


def _matching_coefficient(match: _Matching, sqrt_ratio: float) -> Tuple[float, float]:
    """c_out' = 1 için iç katsayı ve süreklilik hatası"""
    by_value = abs(match.SD)
    by_slope = abs(sqrt_ratio * match.SG)
    if by_value >= by_slope:
        c_in = match.dA / match.SD
    else:
        c_in = match.gA / (sqrt_ratio * match.SG)

    inner_value = c_in * match.SD
    inner_slope = c_in * sqrt_ratio * match.SG
    value_defect = abs(match.dA - inner_value) / max(abs(match.dA) + abs(inner_value), 1e-300)
    slope_defect = abs(match.gA - inner_slope) / max(abs(match.gA) + abs(inner_slope), 1e-300)
    return c_in, max(value_defect, slope_defect)


def eigenfunction(state: EigenState, params: TrapParams, quad: Optional[QuadSpec] = None,
                  policy: PrecisionPolicy = DEFAULT_POLICY) -> PiecewiseWaveFunction:
    """
    Özdurumun normlu dalga fonksiyonu

    Args:
        state: solve_spectrum/solve_level sonucu
        params: Tuzak parametreleri
        quad: Norm integrali ayarları

    Returns:
        PiecewiseWaveFunction (Ψ → +∞'da pozitif)

    Raises:
        NormalizationError: Norm integrali degraded veya sıfır ise
    """
    quad = quad or QuadSpec()
    scales = derived_scales(params)
    match = _matching(float(state.lam), params, state.parity, policy)
    sqrt_ratio = math.sqrt(scales.ratio)
    c_in, defect = _matching_coefficient(match, sqrt_ratio)

    if defect > CONTINUITY_TOLERANCE:
        logger.warning(f"Level {state.index}: continuity defect {defect:.3e} at x=a")

    wave = PiecewiseWaveFunction(
        params=params,
        state=state,
        scales=scales,
        c_out=1.0,
        c_in=c_in,
        log_outer=match.log_outer,
        log_inner=match.log_inner,
        continuity_defect=defect,
    )

    square = lambda z: wave.reduced(z) ** 2
    # Gauss zarfı yalnız dönüm noktasının ötesinde geçerli
    z_tail = max(scales.A, math.sqrt(max(2.0 * state.lam + 1.0, 0.0)) + 1.0)
    inner = integrate(square, 0.0, scales.A, quad)
    middle = integrate(square, scales.A, z_tail, quad)
    outer = integrate_to_infinity(square, z_tail, 1.0, 2.0 * state.lam, quad)
    total = 2.0 * (inner.value + middle.value + outer.value)

    if inner.degraded or middle.degraded or outer.degraded or not (math.isfinite(total) and total > 0.0):
        raise NormalizationError(f"Normalization of level {state.index} failed (integral {total})")

    factor = 1.0 / math.sqrt(total)
    wave.c_out *= factor
    wave.c_in *= factor
    wave.norm_error = 2.0 * (inner.error + middle.error + outer.error) / total
    logger.debug(f"Level {state.index}: normalized, continuity defect {defect:.2e}")
    return wave
