"""
Dimple Trap - Scattering

Serbest uzayda kesik parabolik kuyudan saçılma (E > 0):
- F₁..F₆ kombinasyonları üzerinden kapalı form R, T
- x = ±a süreklilik koşullarının 4x4 kompleks lineer çözümü (referans)
- Dirac-δ genlikleri ve a → 0 limit çalışması
- E, a, U₀ taramaları
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import mpmath
import numpy as np

from core.exceptions import DomainError
from core.numerics import loglog_slope
from core.schemas import (
    DeltaParams,
    PrecisionFlag,
    PrecisionPolicy,
    ScatterMethod,
    ScatterParams,
    SweepVariable,
)
from core.specfun import DEFAULT_POLICY, kummer_phi, pcf_pair
from utils.sweep_table import SweepTable

logger = logging.getLogger(__name__)

COMBINATION_GUARD = 1e-5
MP_PRECISIONS = (30, 60, 120, 240)
MP_AGREEMENT = 1e-13
SWEEP_COLUMNS = ["x", "T2", "R2", "defect", "flag", "method"]


@dataclass(frozen=True)
class ScatterResult:
    """Kompleks yansıma/geçiş genlikleri"""
    R: complex
    T: complex
    method: ScatterMethod
    flag: PrecisionFlag = PrecisionFlag.OK

    @property
    def reflection(self) -> float:
        return abs(self.R) ** 2

    @property
    def transmission(self) -> float:
        return abs(self.T) ** 2

    @property
    def unitarity_defect(self) -> float:
        return self.reflection + self.transmission - 1.0


def delta_amplitudes(k: float, sigma: float) -> ScatterResult:
    """
    Çekici δ: T = 2ik/(2ik + σ), R = -σ/(2ik + σ)

    Args:
        k: Dalga sayısı (> 0)
        sigma: δ şiddeti

    Returns:
        ScatterResult
    """
    if k <= 0:
        raise ValueError(f"Wave number must be positive, got {k}")
    denom = 2j * k + sigma
    return ScatterResult(R=-sigma / denom, T=2j * k / denom, method=ScatterMethod.CLOSED_FORM)


# === Closed form ===

@dataclass(frozen=True)
class FFunctions:
    """F₁..F₆ ve R, T'de geçen Φ değerleri"""
    F1: complex
    F2: complex
    F3: complex
    F4: complex
    F5: complex
    F6: complex
    P3: float
    P5: float
    flag: PrecisionFlag = PrecisionFlag.OK


def _cancels(total, *terms) -> bool:
    peak = max(abs(t) for t in terms)
    return peak > 0 and abs(total) < COMBINATION_GUARD * peak


def _combine(k, a, s, lam, y, phi: Callable, imag) -> Tuple[tuple, bool]:
    """
    F₁..F₆, R ve T; float/complex ve mpmath değerleriyle aynı şekilde çalışır

    Returns:
        ((F1..F6, P3, P5, R, T), cancelled)
    """
    P1 = phi(-lam / 2, 0.5)
    P1b = phi(-lam / 2, 1.5)
    P3 = phi((1 - lam) / 2, 1.5)
    P5 = phi((1 - lam) / 2, 2.5)
    P5b = phi((3 - lam) / 2, 2.5)
    P4 = phi(1 - lam / 2, 1.5)
    s2 = s * s

    t1 = (-P1, 2 * (1 + lam) * P1b)
    t2 = ((k * k + s2 + a * a * s2 * s2) * P1, -2 * s2 * (1 + y) * (1 + lam) * P1b)
    t3 = (3 * (-1 + imag * a * k + y) * P3, 2 * y * (lam - 1) * P5b)
    t4 = (2 * a * s2 * lam * P4, (imag * k + a * s2) * P1)
    t6 = (P1, 2 * y * (1 + lam) * P1b)
    F1, F2, F3, F4, F6 = (sum(t) for t in (t1, t2, t3, t4, t6))
    F5 = -2 * y * (2 + lam) * P5 * P1

    r_terms = (2 * a * a * s2 * s2 * (2 + lam) * P5 * F1, 3 * P3 * F2)
    t_terms = (F5, 3 * P3 * F6)
    cancelled = any(_cancels(sum(t), *t) for t in (t1, t2, t3, t4, t6, r_terms, t_terms))

    return (F1, F2, F3, F4, F5, F6, P3, P5, sum(r_terms), sum(t_terms)), cancelled


def _amplitudes(k, a, parts, imag, expo):
    F3, F4, r_num, t_num = parts[2], parts[3], parts[8], parts[9]
    phase = expo(-2 * imag * a * k)
    denom = F3 * F4
    R = -a * phase * r_num / denom
    T = -imag * phase * k * t_num / denom
    return R, T


def _float_closed_form(params: ScatterParams, policy: PrecisionPolicy) -> Tuple[Optional[tuple], PrecisionFlag]:
    y = params.y
    flags = []

    def phi(alpha, gamma_par):
        value = kummer_phi(alpha, gamma_par, y, policy)
        flags.append(value.flag)
        return value.value

    parts, cancelled = _combine(params.k, params.a, params.s, params.gamma_d, y, phi, 1j)
    flag = PrecisionFlag.worst(*flags)
    if cancelled:
        flag = PrecisionFlag.worst(flag, PrecisionFlag.DEGRADED)
    return parts, flag


def _mp_closed_form(params: ScatterParams, dps: int) -> Tuple[mpmath.mpc, mpmath.mpc]:
    with mpmath.workdps(dps):
        k = mpmath.sqrt(2 * mpmath.mpf(params.m) * mpmath.mpf(params.E)) / mpmath.mpf(params.hbar)
        nu = mpmath.sqrt(2 * mpmath.mpf(params.U0) / (mpmath.mpf(params.m) * mpmath.mpf(params.a) ** 2))
        s = mpmath.sqrt(mpmath.mpf(params.m) * nu / mpmath.mpf(params.hbar))
        a = mpmath.mpf(params.a)
        lam = (mpmath.mpf(params.E) + mpmath.mpf(params.U0)) / (mpmath.mpf(params.hbar) * nu) - mpmath.mpf(0.5)
        y = (a * s) ** 2
        phi = lambda alpha, gamma_par: mpmath.hyp1f1(alpha, gamma_par, y)
        parts, _ = _combine(k, a, s, lam, y, phi, mpmath.mpc(0, 1))
        R, T = _amplitudes(k, a, parts, mpmath.mpc(0, 1), mpmath.exp)
        return +R, +T


def _extended_closed_form(params: ScatterParams) -> Optional[Tuple[complex, complex]]:
    """Artan hassasiyette iki ardışık sonucun uyumuyla doğrulanmış R, T"""
    previous = None
    for dps in MP_PRECISIONS:
        try:
            current = _mp_closed_form(params, dps)
        except (mpmath.libmp.NoConvergence, ZeroDivisionError) as e:
            logger.debug(f"mpmath closed form failed at dps={dps}: {e}")
            previous = None
            continue
        if previous is not None:
            diff = max(abs(complex(current[0]) - complex(previous[0])), abs(complex(current[1]) - complex(previous[1])))
            if diff < MP_AGREEMENT:
                return complex(current[0]), complex(current[1])
        previous = current
    return None


def f_functions(params: ScatterParams, policy: PrecisionPolicy = DEFAULT_POLICY) -> FFunctions:
    """
    F₁..F₆; λ = γ_d, s = √(mν/ħ), tüm Φ argümanları a²s²

    Raises:
        DomainError: U₀ = 0 (iç ölçek tanımsız)
    """
    if params.U0 == 0:
        raise DomainError("F-functions need U0 > 0")
    parts, flag = _float_closed_form(params, policy)
    F1, F2, F3, F4, F5, F6, P3, P5, _, _ = parts
    return FFunctions(complex(F1), complex(F2), complex(F3), complex(F4), complex(F5), complex(F6),
                      float(P3), float(P5), flag)


def _closed_form(params: ScatterParams, policy: PrecisionPolicy) -> Optional[ScatterResult]:
    parts, flag = _float_closed_form(params, policy)
    if flag is PrecisionFlag.OK:
        R, T = _amplitudes(params.k, params.a, parts, 1j, cmath.exp)
        if all(math.isfinite(abs(v)) for v in (R, T)):
            return ScatterResult(complex(R), complex(T), ScatterMethod.CLOSED_FORM)

    logger.debug(f"Closed form flagged at E={params.E}, a={params.a}, U0={params.U0}; using mpmath")
    extended = _extended_closed_form(params)
    if extended is None:
        return None
    return ScatterResult(extended[0], extended[1], ScatterMethod.CLOSED_FORM)


# === Linear solve ===

def _interior(params: ScatterParams, policy: PrecisionPolicy):
    """D, G değerleri ±sa'da, ortak ölçekte"""
    B = params.s * params.a
    plus = pcf_pair(params.gamma_d, B, policy)
    minus = pcf_pair(params.gamma_d, -B, policy)
    top = max(plus.log_scale, minus.log_scale)
    wp = math.exp(plus.log_scale - top)
    wm = math.exp(minus.log_scale - top)
    flag = PrecisionFlag.worst(plus.flag, minus.flag)
    return (wp * plus.value, wp * plus.derivative, wm * minus.value, wm * minus.derivative, flag)


def _linear_solve(params: ScatterParams, policy: PrecisionPolicy, from_right: bool = False) -> ScatterResult:
    k, a, s = params.k, params.a, params.s
    Dp, Gp, Dm, Gm, flag = _interior(params, policy)
    e_in = cmath.exp(1j * k * a)
    e_out = cmath.exp(-1j * k * a)

    if not from_right:
        # x = -a: dış e^{ikx} + R e^{-ikx}, iç c1 D(sx) + c2 D(-sx); x = a: T e^{ikx}
        matrix = np.array([
            [e_in, -Dm, -Dp, 0],
            [-1j * k * e_in, -s * Gm, s * Gp, 0],
            [0, Dp, Dm, -e_in],
            [0, s * Gp, -s * Gm, -1j * k * e_in],
        ], dtype=complex)
        rhs = np.array([-e_out, -1j * k * e_out, 0, 0], dtype=complex)
    else:
        # Aynalanmış problem: x = a'da e^{-ikx} + R e^{ikx}, x = -a'da T e^{-ikx}
        matrix = np.array([
            [e_in, -Dp, -Dm, 0],
            [1j * k * e_in, -s * Gp, s * Gm, 0],
            [0, Dm, Dp, -e_in],
            [0, s * Gm, -s * Gp, 1j * k * e_in],
        ], dtype=complex)
        rhs = np.array([-e_out, 1j * k * e_out, 0, 0], dtype=complex)

    R, _, _, T = np.linalg.solve(matrix, rhs)
    return ScatterResult(complex(R), complex(T), ScatterMethod.LINEAR_SOLVE, flag)


def parabolic_amplitudes(params: ScatterParams, method: ScatterMethod = ScatterMethod.CLOSED_FORM,
                         policy: PrecisionPolicy = DEFAULT_POLICY) -> ScatterResult:
    """
    Kesik parabolik kuyunun R ve T genlikleri

    closed_form: F-fonksiyonları; Φ bayraklanırsa mpmath, o da başarısızsa
    linear_solve'a düşer. linear_solve: süreklilik sisteminin çözümü.

    Args:
        params: Saçılma parametreleri
        method: closed_form veya linear_solve
        policy: Özel fonksiyon hassasiyet politikası

    Returns:
        ScatterResult (method alanı fiilen kullanılan yolu gösterir)
    """
    if params.U0 == 0:
        return ScatterResult(0j, 1 + 0j, method)

    if method is ScatterMethod.CLOSED_FORM:
        result = _closed_form(params, policy)
        if result is not None:
            return result
        logger.warning(f"Closed form unavailable at E={params.E}, a={params.a}, U0={params.U0}; "
                       f"falling back to linear solve")

    return _linear_solve(params, policy)


def reflection_from_right(params: ScatterParams, policy: PrecisionPolicy = DEFAULT_POLICY) -> ScatterResult:
    """Sağdan gelen dalga için aynalanmış lineer çözüm"""
    if params.U0 == 0:
        return ScatterResult(0j, 1 + 0j, ScatterMethod.LINEAR_SOLVE)
    return _linear_solve(params, policy, from_right=True)


# === Sweeps ===

def sweep(vary: SweepVariable, grid: Sequence[float], fixed: ScatterParams,
          method: ScatterMethod = ScatterMethod.CLOSED_FORM) -> SweepTable:
    """
    E, a veya U₀ üzerinde |T|², |R|² taraması

    Args:
        vary: Değişen parametre
        grid: Değerler
        fixed: Diğer parametreler

    Returns:
        SweepTable (x, T2, R2, defect, flag, method)
    """
    table = SweepTable(list(SWEEP_COLUMNS))
    base = fixed.model_dump()
    for value in grid:
        point = ScatterParams.model_validate({**base, vary.value: float(value)})
        result = parabolic_amplitudes(point, method)
        table.add_row(
            x=float(value),
            T2=result.transmission,
            R2=result.reflection,
            defect=result.unitarity_defect,
            flag=result.flag,
            method=result.method,
        )
    table.metadata["vary"] = vary.value
    logger.info(f"Scatter sweep over {vary.value}: {len(table)} points")
    return table


def delta_limit_study(c: float, a_sequence: Sequence[float], E: float = 1.0,
                      hbar: float = 1.0, m: float = 0.5,
                      method: ScatterMethod = ScatterMethod.CLOSED_FORM) -> SweepTable:
    """
    Sabit c = U₀a'da |T(a) - T_δ|, σ = 8mc/(3ħ²)

    Returns:
        SweepTable (a, U0, T_re, T_im, T_delta_re, T_delta_im, gap); metadata['order']
    """
    delta = DeltaParams.from_product(c, hbar, m)
    table = SweepTable(["a", "U0", "T_re", "T_im", "T_delta_re", "T_delta_im", "gap"])
    for a in a_sequence:
        params = ScatterParams(E=E, a=a, U0=c / a, hbar=hbar, m=m)
        T = parabolic_amplitudes(params, method).T
        T_delta = delta_amplitudes(params.k, delta.sigma).T
        table.add_row(
            a=float(a),
            U0=params.U0,
            T_re=T.real,
            T_im=T.imag,
            T_delta_re=T_delta.real,
            T_delta_im=T_delta.imag,
            gap=abs(T - T_delta),
        )
    table.metadata["order"] = loglog_slope(table.column("a"), table.column("gap"))
    return table
