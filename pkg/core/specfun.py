"""
Dimple Trap - Special Functions

Gerçek gamma fonksiyonu, Kummer serisi Φ(α,γ;y) ve parabolik silindir
fonksiyonları D_λ(z), G_λ(z) = dD_λ/dz.

D_λ burada e^{-z²/2} önfaktörü ve z² argümanı ile tanımlıdır:

    D_λ(z) = 2^λ e^{-z²/2} [ Γ(1/2) Φ(-λ/2, 1/2; z²) / Γ((1-λ)/2)
                           + Γ(-1/2) z Φ((1-λ)/2, 3/2; z²) / Γ(-λ/2) ]

Bu tanım D'' + (2λ + 1 - z²) D = 0 denklemini sağlar ve standart
tanımla D_λ(z) = 2^{λ/2} D_std(λ, √2 z) ilişkisi vardır.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import mpmath

from core.exceptions import SpecialFunctionError
from core.schemas import PrecisionFlag, PrecisionPolicy, SpecialValue

logger = logging.getLogger(__name__)

DEFAULT_POLICY = PrecisionPolicy()

SQRT_PI = math.sqrt(math.pi)
LN2 = math.log(2.0)

# Lanczos (g=7, n=9)
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Genişletilmiş hassasiyet yolu
_EXTENDED_MIN_DPS = 30
_EXTENDED_MAX_ROUNDS = 5
_EXTENDED_AGREEMENT = 1e-14


# === Gamma ===

def _is_pole(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _sinpi(x: float) -> float:
    """sin(πx), tamsayılarda tam sıfır"""
    r = x - 2.0 * round(0.5 * x)
    if r == 0.0 or abs(r) == 1.0:
        return 0.0
    if r > 0.5:
        r = 1.0 - r
    elif r < -0.5:
        r = -1.0 - r
    return math.sin(math.pi * r)


def _log_gamma_positive(x: float) -> float:
    """ln Γ(x), x ≥ 0.5"""
    x -= 1.0
    series = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        series += _LANCZOS_COEFFS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * math.log(t) - t + math.log(series)


def log_abs_gamma(x: float) -> Tuple[float, int]:
    """
    ln|Γ(x)| ve Γ(x)'in işareti

    Args:
        x: Kutup olmayan gerçek sayı

    Returns:
        (ln|Γ(x)|, sign)
    """
    if _is_pole(x):
        raise SpecialFunctionError(f"Gamma pole at x={x}")
    if x >= 0.5:
        return _log_gamma_positive(x), 1
    # Yansıma: Γ(x) Γ(1-x) = π / sin(πx)
    s = _sinpi(x)
    return math.log(math.pi / abs(s)) - _log_gamma_positive(1.0 - x), (1 if s > 0 else -1)


def gamma_real(x: float) -> SpecialValue:
    """
    Γ(x) from scratch (Lanczos + reflection)

    Args:
        x: Sonlu gerçek sayı

    Returns:
        SpecialValue; x ∈ {0, -1, -2, ...} için flag=pole
    """
    if not math.isfinite(x):
        raise ValueError(f"gamma_real needs a finite argument, got {x}")
    if _is_pole(x):
        return SpecialValue(math.inf, PrecisionFlag.POLE)

    log_value, sign = log_abs_gamma(x)
    try:
        value = sign * math.exp(log_value)
    except OverflowError:
        return SpecialValue(sign * math.inf, PrecisionFlag.DEGRADED)
    return SpecialValue(value)


def rgamma(x: float) -> float:
    """1/Γ(x); kutuplarda tam olarak 0"""
    if _is_pole(x):
        return 0.0
    log_value, sign = log_abs_gamma(x)
    try:
        return sign * math.exp(-log_value)
    except OverflowError:
        return sign * math.inf


def _log_rgamma(x: float) -> Tuple[float, int]:
    """ln|1/Γ(x)| and sign; sign 0 at poles"""
    if _is_pole(x):
        return -math.inf, 0
    log_value, sign = log_abs_gamma(x)
    return -log_value, sign


# === Kummer Φ ===

def kummer_phi(alpha: float, gamma_par: float, y: float,
               policy: PrecisionPolicy = DEFAULT_POLICY) -> SpecialValue:
    """
    Kummer serisi Φ(α,γ;y) = Σ (α)ₙ/(γ)ₙ · yⁿ/n!

    Args:
        alpha: α
        gamma_par: γ (sıfır veya negatif tamsayı olamaz)
        y: Argüman (y ≥ 0)
        policy: Kesme/iptal eşikleri

    Returns:
        SpecialValue; max_terms aşılırsa veya iptal eşiği altına düşerse degraded
    """
    if _is_pole(gamma_par):
        raise SpecialFunctionError(f"Phi undefined for gamma={gamma_par} (non-positive integer)")
    if y == 0.0:
        return SpecialValue(1.0)

    total = 1.0
    term = 1.0
    peak = 1.0
    small_run = 0
    converged = False

    for n in range(policy.max_terms):
        a_n = alpha + n
        if a_n == 0.0:
            converged = True
            break
        term *= a_n / (gamma_par + n) * y / (n + 1)
        total += term
        peak = max(peak, abs(total), abs(term))

        # Artık terimler monoton azalıyor mu?
        if n + 1 > -alpha and n + 1 > y and abs(term) < policy.term_tolerance * abs(total):
            small_run += 1
            if small_run >= 3:
                converged = True
                break
        else:
            small_run = 0

    if not converged or not math.isfinite(total):
        logger.debug(f"Phi({alpha}, {gamma_par}; {y}) not converged in {policy.max_terms} terms")
        return SpecialValue(total, PrecisionFlag.DEGRADED)

    if abs(total) < policy.cancellation_guard * peak:
        return SpecialValue(total, PrecisionFlag.DEGRADED)
    return SpecialValue(total)


# === Parabolic cylinder functions ===

@dataclass(frozen=True)
class PcfPair:
    """
    D_λ(z) ve G_λ(z) ölçeklenmiş çift

    D = value · e^{log_scale}, G = derivative · e^{log_scale},
    max(|value|, |derivative|) = 1.
    """
    value: float
    derivative: float
    log_scale: float
    flag: PrecisionFlag = PrecisionFlag.OK
    extended: bool = False

    @property
    def D(self) -> float:
        return self.value * math.exp(self.log_scale)

    @property
    def G(self) -> float:
        return self.derivative * math.exp(self.log_scale)


@dataclass(frozen=True)
class _Jet:
    """D, D', D'' = e^{log_scale} · (d0, d1, d2)"""
    d0: float
    d1: float
    d2: float
    log_scale: float
    flag: PrecisionFlag
    extended: bool = False


def _guard(result: float, parts: Tuple[float, ...], policy: PrecisionPolicy) -> bool:
    """Toplamın parçalarına göre iptal kaybı kabul edilebilir mi?"""
    peak = max(abs(p) for p in parts)
    return peak == 0.0 or abs(result) >= policy.cancellation_guard * peak


def _series_jet(lam: float, z: float, policy: PrecisionPolicy, second: bool = False) -> _Jet:
    """Kummer gösterimi üzerinden terim-terim türev (second=True ise D'' de)"""
    y = z * z
    a1 = -0.5 * lam
    a2 = 0.5 * (1.0 - lam)

    # c1 = Γ(1/2)/Γ((1-λ)/2), c2 = Γ(-1/2)/Γ(-λ/2), log ölçekte
    l1, s1 = _log_rgamma(a2)
    l2, s2 = _log_rgamma(a1)
    l2 += math.log(2.0)
    s2 = -s2
    top = max(l1, l2)
    c1 = s1 * math.exp(l1 - top) * SQRT_PI if s1 else 0.0
    c2 = s2 * math.exp(l2 - top) * SQRT_PI if s2 else 0.0

    flags = []
    f1 = f1p = f1pp = 0.0
    if c1 != 0.0:
        p0 = kummer_phi(a1, 0.5, y, policy)
        p1 = kummer_phi(a1 + 1.0, 1.5, y, policy)
        p2 = kummer_phi(a1 + 2.0, 2.5, y, policy) if second else SpecialValue(0.0)
        flags += [p0.flag, p1.flag, p2.flag]
        k1 = a1 / 0.5
        k2 = k1 * (a1 + 1.0) / 1.5
        f1 = p0.value
        f1p = 2.0 * z * k1 * p1.value
        f1pp = 2.0 * k1 * p1.value + 4.0 * y * k2 * p2.value

    f2 = f2p = f2pp = 0.0
    if c2 != 0.0:
        q0 = kummer_phi(a2, 1.5, y, policy)
        q1 = kummer_phi(a2 + 1.0, 2.5, y, policy)
        q2 = kummer_phi(a2 + 2.0, 3.5, y, policy) if second else SpecialValue(0.0)
        flags += [q0.flag, q1.flag, q2.flag]
        k1 = a2 / 1.5
        k2 = k1 * (a2 + 1.0) / 2.5
        f2 = q0.value
        f2p = 2.0 * z * k1 * q1.value
        f2pp = 2.0 * k1 * q1.value + 4.0 * y * k2 * q2.value

    p = c1 * f1 + c2 * z * f2
    pp = c1 * f1p + c2 * (f2 + z * f2p)
    ppp = c1 * f1pp + c2 * (2.0 * f2p + z * f2pp)

    # D = K P, G = K (P' - zP), D'' = K (P'' - 2zP' + (z²-1)P), K = 2^λ e^{-z²/2}
    d0 = p
    d1 = pp - z * p
    d2 = ppp - 2.0 * z * pp + (y - 1.0) * p

    ok = (
        all(math.isfinite(v) for v in (d0, d1, d2))
        and _guard(d0, (c1 * f1, c2 * z * f2), policy)
        and _guard(d1, (c1 * f1p, c2 * f2, c2 * z * f2p, z * c1 * f1, z * c2 * z * f2), policy)
    )
    if not ok:
        flags.append(PrecisionFlag.DEGRADED)

    return _Jet(d0, d1, d2, lam * LN2 - 0.5 * y + top, PrecisionFlag.worst(*flags))


def _asymptotic_jet(lam: float, z: float, policy: PrecisionPolicy) -> _Jet:
    """
    Büyük z için sönümlenen çözümün asimptotik serisi

    D_λ(z) ~ (2z)^λ e^{-z²/2} Σ_s (-1)^s λ(λ-1)...(λ-2s+1) / (s! 4^s z^{2s})
    """
    inv = 1.0 / (4.0 * z * z)
    term = 1.0
    total = 1.0
    total_d = 0.0      # dS/dz
    total_dd = 0.0     # d²S/dz²
    smallest = 1.0
    converged = False

    for s in range(1, policy.max_terms):
        nxt = -term * (lam - 2 * s + 2) * (lam - 2 * s + 1) * inv / s
        if nxt == 0.0:
            converged = True
            break
        if abs(nxt) > abs(term) and s > 1:
            break
        term = nxt
        total += term
        total_d += -2.0 * s / z * term
        total_dd += 2.0 * s * (2.0 * s + 1.0) / (z * z) * term
        smallest = min(smallest, abs(term))
        if abs(term) < policy.term_tolerance * abs(total):
            converged = True
            break

    if not converged and smallest <= max(policy.term_tolerance, 1e-14) * abs(total):
        converged = True

    u1 = lam / z - z
    u2 = -lam / (z * z) - 1.0
    d0 = total
    d1 = u1 * total + total_d
    d2 = (u2 + u1 * u1) * total + 2.0 * u1 * total_d + total_dd
    flag = PrecisionFlag.OK if converged else PrecisionFlag.DEGRADED
    return _Jet(d0, d1, d2, lam * math.log(2.0 * z) - 0.5 * z * z, flag)


def _float_jet(lam: float, z: float, policy: PrecisionPolicy, second: bool = False) -> _Jet:
    """Çift hassasiyet yolu: asimptotik (z büyükse) ya da seri"""
    if z > policy.asymptotic_switch:
        jet = _asymptotic_jet(lam, z, policy)
        if jet.flag is PrecisionFlag.OK:
            return jet

    jet = _series_jet(lam, z, policy, second)
    if jet.flag is not PrecisionFlag.OK and z > 0.0:
        alt = _asymptotic_jet(lam, z, policy)
        if alt.flag is PrecisionFlag.OK:
            return alt
    return jet


def _scaled(value: float, log_scale: float) -> float:
    try:
        return value * math.exp(log_scale)
    except OverflowError:
        return math.copysign(math.inf, value)


# === Extended precision fallback ===

def _mp_pair(lam: float, z: float, dps: int) -> Tuple[mpmath.mpf, mpmath.mpf, mpmath.mpf]:
    """Aynı Kummer ifadesi, mpmath ile dps basamakta (P, P' - zP, log K)"""
    with mpmath.workdps(dps):
        l = mpmath.mpf(lam)
        x = mpmath.mpf(z)
        y = x * x
        a1 = -l / 2
        a2 = (1 - l) / 2
        c1 = mpmath.sqrt(mpmath.pi) * mpmath.rgamma(a2)
        c2 = -2 * mpmath.sqrt(mpmath.pi) * mpmath.rgamma(a1)
        f1 = mpmath.hyp1f1(a1, 0.5, y)
        f1p = 2 * x * (a1 / mpmath.mpf(0.5)) * mpmath.hyp1f1(a1 + 1, 1.5, y)
        f2 = mpmath.hyp1f1(a2, 1.5, y)
        f2p = 2 * x * (a2 / mpmath.mpf(1.5)) * mpmath.hyp1f1(a2 + 1, 2.5, y)
        p = c1 * f1 + c2 * x * f2
        pp = c1 * f1p + c2 * (f2 + x * f2p)
        return +p, +(pp - x * p), l * mpmath.log(2) - y / 2


@lru_cache(maxsize=16384)
def _extended_pair(lam: float, z: float) -> Optional[PcfPair]:
    """
    Çift hassasiyet bayraklandığında Kummer ifadesini yüksek hassasiyette
    yeniden hesapla; iki farklı hassasiyette uyum doğrulanır.
    """
    dps = _EXTENDED_MIN_DPS + int(abs(z) * abs(z) / 2.3) + int(2.0 * math.sqrt(abs(lam) * z * z) / 2.3)
    for _ in range(_EXTENDED_MAX_ROUNDS):
        try:
            d_lo, g_lo, _ = _mp_pair(lam, z, dps)
            d_hi, g_hi, log_k = _mp_pair(lam, z, dps + 20)
        except (mpmath.libmp.NoConvergence, ZeroDivisionError) as e:
            logger.debug(f"Extended pcf failed at lam={lam}, z={z}, dps={dps}: {e}")
            dps *= 2
            continue

        with mpmath.workdps(dps + 20):
            peak = max(abs(d_hi), abs(g_hi))
            if peak == 0:
                return None
            diff = max(abs(d_hi - d_lo), abs(g_hi - g_lo)) / peak
            if diff < _EXTENDED_AGREEMENT:
                log_scale = float(log_k + mpmath.log(peak))
                return PcfPair(
                    value=float(d_hi / peak),
                    derivative=float(g_hi / peak),
                    log_scale=log_scale,
                    extended=True,
                )
        dps *= 2

    logger.warning(f"Extended pcf did not settle for lam={lam}, z={z}")
    return None


def _resolved_jet(lam: float, z: float, policy: PrecisionPolicy, second: bool = False) -> _Jet:
    """
    Çift hassasiyet jeti; bayraklanırsa genişletilmiş hassasiyetle değiştirilir.

    D'' genişletilmiş yolda diferansiyel denklemden gelir: D'' = (z² - 2λ - 1) D.
    """
    jet = _float_jet(lam, z, policy, second)
    peak = max(abs(jet.d0), abs(jet.d1))
    if jet.flag is PrecisionFlag.OK and math.isfinite(peak) and peak > 0.0:
        return jet

    logger.debug(f"pcf double path flagged at lam={lam:.6g}, z={z:.6g}; switching to extended path")
    pair = _extended_pair(float(lam), float(z))
    if pair is None:
        return _Jet(jet.d0, jet.d1, jet.d2, jet.log_scale, PrecisionFlag.DEGRADED)
    return _Jet(
        pair.value,
        pair.derivative,
        (z * z - 2.0 * lam - 1.0) * pair.value,
        pair.log_scale,
        PrecisionFlag.OK,
        extended=True,
    )


def pcf_pair(lam: float, z: float, policy: PrecisionPolicy = DEFAULT_POLICY) -> PcfPair:
    """
    D_λ(z) ve G_λ(z) birlikte, taşma olmadan ölçeklenmiş

    Çift hassasiyet yolu bayraklanırsa (iptal veya yakınsamama)
    genişletilmiş hassasiyet yoluna düşer; o da başarısızsa bayrak
    degraded olarak taşınır.

    Args:
        lam: λ
        z: Argüman
        policy: Hassasiyet politikası

    Returns:
        PcfPair
    """
    jet = _resolved_jet(lam, z, policy)
    peak = max(abs(jet.d0), abs(jet.d1))
    if not (math.isfinite(peak) and peak > 0.0):
        return PcfPair(math.nan, math.nan, 0.0, PrecisionFlag.DEGRADED)
    return PcfPair(
        value=jet.d0 / peak,
        derivative=jet.d1 / peak,
        log_scale=jet.log_scale + math.log(peak),
        flag=jet.flag,
        extended=jet.extended,
    )


def pcf_D(lam: float, z: float, policy: PrecisionPolicy = DEFAULT_POLICY) -> SpecialValue:
    """
    D_λ(z)

    Args:
        lam: λ
        z: Argüman
        policy: Hassasiyet politikası

    Returns:
        SpecialValue; iki seri terimi iptal eşiği altına düşer ve
        genişletilmiş yol da yerleşmezse degraded
    """
    jet = _resolved_jet(lam, z, policy)
    return SpecialValue(_scaled(jet.d0, jet.log_scale), jet.flag)


def pcf_G(lam: float, z: float, policy: PrecisionPolicy = DEFAULT_POLICY) -> SpecialValue:
    """G_λ(z) = dD_λ/dz (analitik, sonlu fark değil)"""
    jet = _resolved_jet(lam, z, policy)
    return SpecialValue(_scaled(jet.d1, jet.log_scale), jet.flag)


def pcf_second_derivative(lam: float, z: float,
                          policy: PrecisionPolicy = DEFAULT_POLICY) -> SpecialValue:
    """D''_λ(z), G'nin analitik türevi"""
    jet = _resolved_jet(lam, z, policy, second=True)
    return SpecialValue(_scaled(jet.d2, jet.log_scale), jet.flag)
