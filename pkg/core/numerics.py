"""
Dimple Trap - Numerics

Ortak sayısal altyapı:
- Sign-scan + bisection kök bulucu (bayraklı fonksiyonlarla çalışır)
- Global adaptive Gauss-Kronrod (G7/K15) integrasyon
- Dönüm noktası dönüşümü x = x_t ∓ t² ile kök-tekil uç noktalar
- Gauss zarfı ile sertifikalı yarı-sonsuz integraller
"""

import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np

from core.schemas import PrecisionFlag, QuadSpec, RootSpec, SpecialValue

logger = logging.getLogger(__name__)

FlaggedFunction = Callable[[float], Union[SpecialValue, float]]

DEFAULT_QUAD = QuadSpec()

# Gauss-Kronrod 15 noktalı düğümler (simetrik, pozitif yarı + merkez)
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
# Gauss 7 noktalı ağırlıklar (_XGK[1], [3], [5], [7] düğümleri)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

MAX_INTERVALS = 20000


# ==================== Root finding ====================

@dataclass(frozen=True)
class Root:
    """Tek kök ve o noktadaki artık"""
    value: float
    residual: float
    flag: PrecisionFlag = PrecisionFlag.OK


@dataclass
class RootScan:
    """find_roots sonucu: sıralı kökler + taranamayan aralıklar"""
    roots: List[Root] = field(default_factory=list)
    gaps: List[Tuple[float, float]] = field(default_factory=list)

    def __iter__(self) -> Iterator[Root]:
        return iter(self.roots)

    def __len__(self) -> int:
        return len(self.roots)

    def __getitem__(self, i: int) -> Root:
        return self.roots[i]

    @property
    def values(self) -> List[float]:
        return [r.value for r in self.roots]


def _evaluate(f: FlaggedFunction, x: float) -> SpecialValue:
    result = f(x)
    if isinstance(result, SpecialValue):
        return result
    return SpecialValue(float(result))


def _usable(v: SpecialValue) -> bool:
    return v.flag is PrecisionFlag.OK and math.isfinite(v.value)


def _bisect(f: FlaggedFunction, lo: float, hi: float, f_lo: SpecialValue,
            spec: RootSpec) -> Optional[Root]:
    """Bracket [lo, hi] içinde bisection; kök veya None (süreksizlik)"""
    flag = PrecisionFlag.OK
    for _ in range(200):
        if hi - lo <= spec.root_tolerance:
            break
        mid = 0.5 * (lo + hi)
        f_mid = _evaluate(f, mid)
        if not math.isfinite(f_mid.value):
            logger.debug(f"Non-finite value inside bracket at {mid}")
            return None
        if f_mid.flag is not PrecisionFlag.OK:
            flag = PrecisionFlag.DEGRADED
        if f_mid.value == 0.0:
            lo = hi = mid
            break
        if (f_mid.value > 0) == (f_lo.value > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid

    x = 0.5 * (lo + hi)
    f_x = _evaluate(f, x)
    residual = abs(f_x.value)
    if f_x.flag is not PrecisionFlag.OK:
        flag = PrecisionFlag.DEGRADED
    if residual > spec.residual_tolerance and flag is PrecisionFlag.OK:
        logger.debug(f"Sign change at {x:.12g} is a discontinuity (|f|={residual:.3e}), skipped")
        return None
    return Root(x, residual, flag)


def find_roots(f: FlaggedFunction, spec: RootSpec, max_subdivision: int = 4) -> RootScan:
    """
    Tarama ızgarasındaki her işaret değişimini bisection ile rafine et

    Bayraklı (pole/degraded) değer içeren aralıklar alt bölünür; bayrak
    en derin seviyede de sürerse aralık gap olarak raporlanır.

    Args:
        f: float ya da SpecialValue döndüren fonksiyon
        spec: Tarama penceresi ve toleranslar
        max_subdivision: Bayraklı aralık için maksimum bölme derinliği

    Returns:
        RootScan (kökler artan sırada)
    """
    scan = RootScan()
    grid = np.linspace(spec.scan_lo, spec.scan_hi, spec.scan_steps + 1)
    values = [_evaluate(f, float(x)) for x in grid]

    def visit(x0: float, f0: SpecialValue, x1: float, f1: SpecialValue, depth: int) -> None:
        if not (_usable(f0) and _usable(f1)):
            if depth >= max_subdivision:
                scan.gaps.append((x0, x1))
                return
            xm = 0.5 * (x0 + x1)
            fm = _evaluate(f, xm)
            visit(x0, f0, xm, fm, depth + 1)
            visit(xm, fm, x1, f1, depth + 1)
            return

        if f0.value == 0.0:
            scan.roots.append(Root(x0, 0.0))
            return
        if (f0.value > 0) != (f1.value > 0) and f1.value != 0.0:
            root = _bisect(f, x0, x1, f0, spec)
            if root is not None:
                scan.roots.append(root)

    for i in range(len(grid) - 1):
        visit(float(grid[i]), values[i], float(grid[i + 1]), values[i + 1], 0)
    if _usable(values[-1]) and values[-1].value == 0.0:
        scan.roots.append(Root(float(grid[-1]), 0.0))

    scan.roots.sort(key=lambda r: r.value)
    deduped: List[Root] = []
    for root in scan.roots:
        if deduped and root.value - deduped[-1].value <= spec.root_tolerance:
            continue
        deduped.append(root)
    scan.roots = deduped
    scan.gaps = _merge_gaps(scan.gaps)

    if scan.gaps:
        logger.warning(f"Root scan on [{spec.scan_lo:.6g}, {spec.scan_hi:.6g}] left {len(scan.gaps)} gap(s)")
    return scan


def _merge_gaps(gaps: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
    merged: List[Tuple[float, float]] = []
    for lo, hi in sorted(gaps):
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
        else:
            merged.append((lo, hi))
    return merged


# ==================== Quadrature ====================

@dataclass(frozen=True)
class QuadResult:
    """İntegral sonucu; (value, error) olarak açılabilir"""
    value: float
    error: float
    degraded: bool = False

    def __iter__(self) -> Iterator[float]:
        return iter((self.value, self.error))


def _kronrod(f: Callable[[float], float], a: float, b: float) -> Tuple[float, float]:
    """Tek aralık G7/K15: (K15 değeri, |K15 - G7|)"""
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    f_center = f(center)
    kronrod = _WGK[7] * f_center
    gauss = _WG[3] * f_center
    for j in range(7):
        dx = half * _XGK[j]
        pair = f(center - dx) + f(center + dx)
        kronrod += _WGK[j] * pair
        if j % 2 == 1:
            gauss += _WG[j // 2] * pair
    return kronrod * half, abs((kronrod - gauss) * half)


def _adaptive(f: Callable[[float], float], lo: float, hi: float, spec: QuadSpec) -> QuadResult:
    value, error = _kronrod(f, lo, hi)
    heap = [(-error, lo, hi, value, error, 0)]
    total, total_error = value, error
    degraded = False

    while total_error > max(spec.abs_tolerance, spec.rel_tolerance * abs(total)):
        if len(heap) >= MAX_INTERVALS:
            degraded = True
            break
        _, a, b, v, e, depth = heapq.heappop(heap)
        if depth >= spec.max_depth:
            heapq.heappush(heap, (-e, a, b, v, e, depth))
            degraded = True
            break
        mid = 0.5 * (a + b)
        v1, e1 = _kronrod(f, a, mid)
        v2, e2 = _kronrod(f, mid, b)
        heapq.heappush(heap, (-e1, a, mid, v1, e1, depth + 1))
        heapq.heappush(heap, (-e2, mid, b, v2, e2, depth + 1))
        total += v1 + v2 - v
        total_error += e1 + e2 - e

    total = math.fsum(item[3] for item in heap)
    total_error = math.fsum(item[4] for item in heap)
    if degraded:
        logger.warning(f"Quadrature on [{lo:.6g}, {hi:.6g}] stopped early (error {total_error:.3e})")
    return QuadResult(total, total_error, degraded)


def integrate(f: Callable[[float], float], lo: float, hi: float,
              spec: QuadSpec = DEFAULT_QUAD,
              singular: Literal["none", "lo", "hi", "both"] = "none") -> QuadResult:
    """
    ∫_lo^hi f(x) dx, global adaptive Gauss-Kronrod

    Args:
        f: İntegrand
        lo, hi: Sınırlar
        spec: Toleranslar ve derinlik sınırı
        singular: Kök-tipi (√ veya 1/√) tekil uç nokta; x = x_t ∓ t² dönüşümü uygulanır

    Returns:
        QuadResult (max_depth'e ulaşılırsa degraded=True)
    """
    if hi == lo:
        return QuadResult(0.0, 0.0)
    if hi < lo:
        r = integrate(f, hi, lo, spec, {"lo": "hi", "hi": "lo"}.get(singular, singular))
        return QuadResult(-r.value, r.error, r.degraded)

    if singular == "both":
        mid = 0.5 * (lo + hi)
        left = integrate(f, lo, mid, spec, "lo")
        right = integrate(f, mid, hi, spec, "hi")
        return QuadResult(left.value + right.value, left.error + right.error,
                          left.degraded or right.degraded)
    if singular == "hi":
        # x = hi - t², dx = -2t dt
        return _adaptive(lambda t: 2.0 * t * f(hi - t * t), 0.0, math.sqrt(hi - lo), spec)
    if singular == "lo":
        return _adaptive(lambda t: 2.0 * t * f(lo + t * t), 0.0, math.sqrt(hi - lo), spec)
    return _adaptive(f, lo, hi, spec)


def gaussian_tail_bound(x: float, power: float) -> float:
    """∫_x^∞ t^p e^{-t²} dt için üst sınır (x > 0)"""
    excess = max(0.0, power - 1.0)
    denom = 2.0 - excess / (x * x)
    if denom <= 0.0:
        return math.inf
    return math.exp((power - 1.0) * math.log(x) - x * x) / denom


def gaussian_tail_cut(power: float, tol: float, amplitude: float = 1.0,
                      start: float = 0.0, step: float = 0.125) -> float:
    """
    amplitude · ∫_X^∞ t^p e^{-t²} dt < tol olacak şekilde en küçük X

    Args:
        power: Zarf polinom derecesi p
        tol: Kuyruk toleransı
        amplitude: Zarf genliği
        start: Aramanın başlangıcı

    Returns:
        Kesme noktası X (Gauss değişkeninde)
    """
    x = max(start, math.sqrt(max(power, 1.0)), step)
    while amplitude * gaussian_tail_bound(x, power) >= tol:
        x += step
        if x > 1e4:
            raise ValueError(f"No Gaussian tail cut found for power={power}, amplitude={amplitude}")
    return x


def integrate_to_infinity(f: Callable[[float], float], lo: float, scale: float, power: float,
                          spec: QuadSpec = DEFAULT_QUAD, amplitude: Optional[float] = None) -> QuadResult:
    """
    ∫_lo^∞ f(x) dx; f ~ amplitude·(x/scale)^p e^{-(x/scale)²} zarfıyla

    Kesme noktası spec.tail_cut ile verilmemişse zarf sınırından hesaplanır.
    Genlik verilmemişse lo noktasındaki değerden kestirilir (×1000 pay).
    """
    t0 = max(lo / scale, 1e-300)
    if amplitude is None:
        envelope = math.exp(power * math.log(t0) - t0 * t0) if t0 > 0 else 1.0
        amplitude = 1e3 * abs(f(lo)) / envelope if envelope > 0 else 1.0
        amplitude = max(amplitude, 1e-300)

    tail_tol = 0.1 * spec.abs_tolerance
    if spec.tail_cut is not None:
        cut = spec.tail_cut
    else:
        cut = scale * gaussian_tail_cut(power, tail_tol / (scale * amplitude), start=t0)
    if cut <= lo:
        return QuadResult(0.0, 0.0)

    body = integrate(f, lo, cut, spec)
    tail = scale * amplitude * gaussian_tail_bound(cut / scale, power)
    return QuadResult(body.value, body.error + tail, body.degraded)


# ==================== Convergence helpers ====================

def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """log|y| - log x en küçük kareler eğimi (gözlenen yakınsama mertebesi)"""
    x = np.log(np.asarray(xs, dtype=float))
    y = np.log(np.abs(np.asarray(ys, dtype=float)))
    mask = np.isfinite(x) & np.isfinite(y)
    if mask.sum() < 2:
        return math.nan
    slope, _ = np.polyfit(x[mask], y[mask], 1)
    return float(slope)
