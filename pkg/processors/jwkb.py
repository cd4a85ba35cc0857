"""
Dimple Trap - JWKB

Yarı-klasik kuantumlama:
- V(a) altındaki seviyeler: kaydırılmış osilatör, kapalı form
- V(a) üstündeki seviyeler: iki bölgeli faz integrali, sayısal kök
- Analitik çözümle karşılaştırma tablosu ve yayımlanmış değerlerle etiketleme
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from core.exceptions import DomainError, RootFindingError
from core.numerics import find_roots, integrate
from core.schemas import PrecisionFlag, QuadSpec, Region, RootSpec, TrapParams
from processors.bound_spectrum import derived_scales, solve_level, solve_spectrum
from utils.sweep_table import SweepTable

logger = logging.getLogger(__name__)

COMPARE_COLUMNS = ["n", "analytic", "jwkb", "difference", "region", "flag"]
JWKB_COLUMNS = ["n", "region", "energy_over_hbar_omega", "x_left", "x_right", "phase", "phase_quadrature"]
REFERENCE_COLUMNS = ["reference_analytic", "reference_jwkb", "reference_difference", "mismatch", "printed_difference_ok"]
REFERENCE_TOLERANCE = 5e-4
MAX_BRACKET_EXPANSIONS = 60


@dataclass(frozen=True)
class JwkbLevel:
    """JWKB seviyesi; enerji fiziksel birimde, dönüm noktaları uzunluk biriminde"""
    n: int
    region: Region
    energy: float
    turning_points: Tuple[float, float]
    hbar_omega: float = 1.0

    @property
    def energy_over_hbar_omega(self) -> float:
        return self.energy / self.hbar_omega

    @property
    def lam(self) -> float:
        return self.energy_over_hbar_omega - 0.5


def n_prime(params: TrapParams) -> int:
    """
    V(a) altında kalan JWKB seviye sayısı

    n' = ⌊(½mω²a² - E₀)/(ħω_d)⌋ + 1, E₀ = -U₀ + ħω_d/2
    """
    s = derived_scales(params)
    ground = -s.depth + 0.5 * s.ratio
    count = math.floor((0.5 * s.A ** 2 - ground) / s.ratio) + 1
    return max(count, 0)


def jwkb_inner(params: TrapParams, n: int) -> JwkbLevel:
    """
    V(a) altındaki seviye: E = -U₀ + (n + 1/2)ħω_d

    Raises:
        DomainError: n ≥ n' ise (jwkb_outer kullanılmalı)
    """
    limit = n_prime(params)
    if n < 0 or n >= limit:
        raise DomainError(f"Level {n} is not below V(a) (n'={limit}); use jwkb_outer")

    s = derived_scales(params)
    eps = -s.depth + (n + 0.5) * s.ratio
    x_turn = math.sqrt(2.0 * (eps + s.depth)) / s.ratio * s.length
    return JwkbLevel(n, Region.INNER, eps * s.hbar_omega, (-x_turn, x_turn), s.hbar_omega)


def _phase(params: TrapParams, eps: float) -> float:
    """2∫p dx/ħ kapalı formda, ε = E/ħω"""
    s = derived_scales(params)
    A, r = s.A, s.ratio
    kappa = eps + s.depth
    if kappa <= 0.0:
        return 0.0
    if eps <= 0.5 * A * A:
        # Klasik bölge dimple içinde kalır
        return math.pi * kappa / r

    xd = math.sqrt(2.0 * kappa) / r
    x = math.sqrt(2.0 * eps)
    inner = 2.0 * kappa / r * math.asin(min(A / xd, 1.0)) + r * A * math.sqrt(max(xd * xd - A * A, 0.0))
    outer = eps * (math.pi - 2.0 * math.asin(min(A / x, 1.0))) - A * math.sqrt(max(x * x - A * A, 0.0))
    return inner + outer


def phase_integral(params: TrapParams, energy: float) -> float:
    """
    Kuantumlama fazı 2∫p dx / ħ (iki bölgeli kapalı form, terimler toplanır)

    Args:
        params: Tuzak parametreleri
        energy: Fiziksel enerji

    Returns:
        Faz; kuantumlama koşulu faz = (n + 1/2)π
    """
    return _phase(params, energy / params.hbar_omega)


def phase_integral_quadrature(params: TrapParams, energy: float, quad: Optional[QuadSpec] = None) -> float:
    """Aynı faz, dönüm noktası dönüşümlü Gauss-Kronrod integrali ile"""
    quad = quad or QuadSpec()
    s = derived_scales(params)
    eps = energy / s.hbar_omega
    kappa = eps + s.depth
    if kappa <= 0.0:
        return 0.0

    A, r = s.A, s.ratio
    xd = math.sqrt(2.0 * kappa) / r
    inner_p = lambda x: math.sqrt(max(2.0 * kappa - (r * x) ** 2, 0.0))

    if xd <= A:
        return 2.0 * integrate(inner_p, 0.0, xd, quad, singular="hi").value

    x_turn = math.sqrt(2.0 * eps)
    outer_p = lambda x: math.sqrt(max(2.0 * eps - x * x, 0.0))
    inner = integrate(inner_p, 0.0, A, quad).value
    outer = integrate(outer_p, A, x_turn, quad, singular="hi").value
    return 2.0 * (inner + outer)


def jwkb_outer(params: TrapParams, n: int, spec: Optional[RootSpec] = None) -> JwkbLevel:
    """
    V(a) üstündeki seviye: faz(E) = (n + 1/2)π kökü

    Bracket harmonik tahminden (n + 1/2)ħω başlar ve simetrik genişler.

    Raises:
        DomainError: n < n' ise
        RootFindingError: Bracket bulunamazsa
    """
    limit = n_prime(params)
    if n < limit:
        raise DomainError(f"Level {n} lies below V(a) (n'={limit}); use jwkb_inner")

    s = derived_scales(params)
    floor_eps = 0.5 * s.A ** 2
    target = (n + 0.5) * math.pi
    guess = n + 0.5
    width = 1.0

    lo = hi = guess
    for _ in range(MAX_BRACKET_EXPANSIONS):
        lo = max(floor_eps, guess - width)
        hi = max(guess + width, floor_eps + width)
        if _phase(params, lo) <= target <= _phase(params, hi):
            break
        width *= 2.0
    else:
        raise RootFindingError(f"No JWKB bracket for level {n} around {guess} hbar*omega")

    base = spec or RootSpec(scan_lo=lo, scan_hi=hi)
    window = base.with_window(lo, hi, 10)
    roots = find_roots(lambda e: _phase(params, e) - target, window)
    if not roots:
        raise RootFindingError(f"JWKB phase has no root for level {n} in [{lo:.6g}, {hi:.6g}]")

    eps = roots[0].value
    x_turn = math.sqrt(2.0 * eps) * s.length
    logger.debug(f"JWKB level {n}: E={eps:.10g} hbar*omega")
    return JwkbLevel(n, Region.OUTER, eps * s.hbar_omega, (-x_turn, x_turn), s.hbar_omega)


def jwkb_level(params: TrapParams, n: int, spec: Optional[RootSpec] = None) -> JwkbLevel:
    """n' ile iç/dış bölgeye yönlendir"""
    if n < n_prime(params):
        return jwkb_inner(params, n)
    return jwkb_outer(params, n, spec)


def jwkb_spectrum(params: TrapParams, e_max: float, spec: Optional[RootSpec] = None) -> List[JwkbLevel]:
    """E/ħω ≤ e_max olan tüm JWKB seviyeleri"""
    levels = []
    n = 0
    while True:
        level = jwkb_level(params, n, spec)
        if level.energy_over_hbar_omega > e_max:
            break
        levels.append(level)
        n += 1
    return levels


def jwkb_table(params: TrapParams, e_max: float, spec: Optional[RootSpec] = None,
               quad: Optional[QuadSpec] = None) -> SweepTable:
    """
    JWKB seviyeleri, dönüm noktaları ve iki yoldan hesaplanan faz

    phase ve phase_quadrature (n + 1/2)π ile karşılaştırılabilir.
    """
    table = SweepTable(list(JWKB_COLUMNS))
    for level in jwkb_spectrum(params, e_max, spec):
        table.add_row(
            n=level.n,
            region=level.region,
            energy_over_hbar_omega=level.energy_over_hbar_omega,
            x_left=level.turning_points[0],
            x_right=level.turning_points[1],
            phase=phase_integral(params, level.energy),
            phase_quadrature=phase_integral_quadrature(params, level.energy, quad),
        )
    table.metadata["n_prime"] = n_prime(params)
    return table


# === Comparison ===

def compare_spectra(params: TrapParams, e_max: float, spec: Optional[RootSpec] = None,
                    extra_levels: Iterable[int] = ()) -> SweepTable:
    """
    Analitik ve JWKB enerjilerinin karşılaştırma tablosu

    Args:
        params: Tuzak parametreleri
        e_max: E/ħω üst sınırı
        spec: Kök bulma ayarları
        extra_levels: Taranmadan, JWKB tahmini çevresinde çözülecek ek seviyeler

    Returns:
        SweepTable (n, analytic, jwkb, difference, region, flag), enerjiler ħω biriminde
    """
    spectrum = solve_spectrum(params, e_max, spec)
    table = SweepTable(list(COMPARE_COLUMNS))
    limit = n_prime(params)

    def add(n: int, analytic: float, flag: PrecisionFlag) -> None:
        level = jwkb_level(params, n, spec)
        table.add_row(
            n=n,
            analytic=analytic,
            jwkb=level.energy_over_hbar_omega,
            difference=abs(analytic - level.energy_over_hbar_omega),
            region=level.region,
            flag=flag,
        )

    for state in spectrum:
        add(state.index, state.energy_over_hbar_omega, state.flag)

    for n in extra_levels:
        if n < len(spectrum):
            continue
        guess = jwkb_level(params, n, spec).lam
        state = solve_level(params, n, guess, spec)
        add(n, state.energy_over_hbar_omega, state.flag)

    table.metadata["n_prime"] = limit
    table.metadata["matching_energy_over_hbar_omega"] = params.matching_energy / params.hbar_omega
    if spectrum.gaps:
        table.metadata["gaps"] = [list(g) for g in spectrum.gaps]
    logger.info(f"Compared {len(table)} levels (n'={limit})")
    return table


def annotate_with_reference(table: SweepTable, reference: Sequence[Sequence[float]],
                            tolerance: float = REFERENCE_TOLERANCE) -> SweepTable:
    """
    Yayımlanmış değerleri tabloya ekle

    Args:
        table: compare_spectra çıktısı
        reference: [n, analytic, jwkb, printed_difference] satırları
        tolerance: Uyum eşiği (ħω)

    Returns:
        reference_* sütunları, mismatch ve printed_difference_ok bayraklarıyla yeni tablo
    """
    by_n: Dict[int, Sequence[float]] = {int(row[0]): row for row in reference}
    annotations: Dict[str, List[object]] = {name: [] for name in REFERENCE_COLUMNS}

    for row in table:
        ref = by_n.get(int(row["n"]))
        if ref is None:
            for values in annotations.values():
                values.append(None)
            continue

        _, ref_analytic, ref_jwkb, ref_difference = ref
        recomputed = abs(ref_analytic - ref_jwkb)
        printed_ok = abs(recomputed - ref_difference) <= tolerance
        if not printed_ok:
            logger.info(f"Published difference for n={row['n']} is {ref_difference}, recomputed {recomputed:.4f}")
        annotations["reference_analytic"].append(ref_analytic)
        annotations["reference_jwkb"].append(ref_jwkb)
        annotations["reference_difference"].append(ref_difference)
        annotations["mismatch"].append(abs(row["analytic"] - ref_analytic) > tolerance
                                       or abs(row["jwkb"] - ref_jwkb) > tolerance)
        annotations["printed_difference_ok"].append(printed_ok)

    out = table
    for name, values in annotations.items():
        out = out.with_column(name, values)
    return out
