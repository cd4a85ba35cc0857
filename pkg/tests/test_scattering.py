"""
Dimple Trap - Scattering Unit Tests

pytest ile kesik parabolik kuyu saçılma testleri
"""

import cmath
import itertools
import math

import numpy as np
import pytest

from core.exceptions import DomainError
from core.schemas import GridSpec, PrecisionFlag, ScatterMethod, ScatterParams, SweepVariable
from processors.delta_limit import halving_sequence
from processors.scattering import (
    SWEEP_COLUMNS,
    delta_amplitudes,
    delta_limit_study,
    f_functions,
    parabolic_amplitudes,
    reflection_from_right,
    sweep,
)

SAMPLE_POINTS = [
    (1.0, 3.0, 10.0),
    (5.0, 1.0, 2.0),
    (0.5, 0.5, 20.0),
    (20.0, 3.0, 10.0),
    (1.0, 0.2, 50.0),
]


# ==================== Delta Tests ====================

class TestDeltaAmplitudes:
    """Çekici δ saçılması"""

    @pytest.mark.parametrize("k,sigma", [(0.5, 1.0), (2.0, 4.0), (10.0, 0.3)])
    def test_unitarity(self, k, sigma):
        result = delta_amplitudes(k, sigma)
        assert result.unitarity_defect == pytest.approx(0.0, abs=1e-14)

    def test_continuity(self):
        """ψ(0): 1 + R = T"""
        result = delta_amplitudes(1.3, 2.7)
        assert cmath.isclose(1 + result.R, result.T, abs_tol=1e-14)

    def test_no_coupling(self):
        result = delta_amplitudes(1.0, 0.0)
        assert result.T == 1.0
        assert result.R == 0.0

    def test_rejects_non_positive_k(self):
        with pytest.raises(ValueError):
            delta_amplitudes(0.0, 1.0)


# ==================== Parabolic Well Tests ====================

class TestParabolicAmplitudes:
    """Kapalı form ve lineer çözüm"""

    @pytest.mark.parametrize("E,a,U0", SAMPLE_POINTS)
    def test_unitarity(self, E, a, U0):
        for method in ScatterMethod:
            result = parabolic_amplitudes(ScatterParams(E=E, a=a, U0=U0), method)
            assert abs(result.unitarity_defect) < 1e-8

    @pytest.mark.parametrize("E,a,U0", SAMPLE_POINTS)
    def test_closed_form_matches_linear_solve(self, E, a, U0):
        params = ScatterParams(E=E, a=a, U0=U0)
        closed = parabolic_amplitudes(params, ScatterMethod.CLOSED_FORM)
        linear = parabolic_amplitudes(params, ScatterMethod.LINEAR_SOLVE)
        assert abs(closed.T - linear.T) < 1e-8
        assert abs(closed.R - linear.R) < 1e-8

    def test_closed_form_matches_linear_solve_grid(self):
        """E ∈ [0.1, 50], a ∈ [0.1, 5], U₀ ∈ [0.1, 20], 10×10×10 ızgara"""
        worst = 0.0
        for E, a, U0 in itertools.product(np.linspace(0.1, 50.0, 10),
                                          np.linspace(0.1, 5.0, 10),
                                          np.linspace(0.1, 20.0, 10)):
            params = ScatterParams(E=float(E), a=float(a), U0=float(U0))
            closed = parabolic_amplitudes(params, ScatterMethod.CLOSED_FORM)
            linear = parabolic_amplitudes(params, ScatterMethod.LINEAR_SOLVE)
            assert abs(closed.unitarity_defect) < 1e-8
            assert abs(linear.unitarity_defect) < 1e-8
            worst = max(worst, abs(closed.T - linear.T), abs(closed.R - linear.R))
        assert worst < 1e-8

    def test_no_dimple(self):
        result = parabolic_amplitudes(ScatterParams(E=1.0, a=3.0, U0=0.0))
        assert result.T == 1.0
        assert result.R == 0.0
        assert result.flag is PrecisionFlag.OK

    def test_high_energy_transparent(self):
        result = parabolic_amplitudes(ScatterParams(E=1000.0, a=3.0, U0=10.0))
        assert result.transmission > 0.99

    def test_reflection_from_right(self):
        """Simetrik kuyu: |R| ve |T| yönden bağımsız"""
        params = ScatterParams(E=2.0, a=1.5, U0=8.0)
        left = parabolic_amplitudes(params, ScatterMethod.LINEAR_SOLVE)
        right = reflection_from_right(params)
        assert abs(right.R) == pytest.approx(abs(left.R), rel=1e-8)
        assert abs(right.T) == pytest.approx(abs(left.T), rel=1e-8)

    def test_f_functions_need_depth(self):
        with pytest.raises(DomainError):
            f_functions(ScatterParams(E=1.0, a=3.0, U0=0.0))

    def test_f_functions_finite(self):
        values = f_functions(ScatterParams(E=1.0, a=3.0, U0=10.0))
        for F in (values.F1, values.F2, values.F3, values.F4, values.F5, values.F6):
            assert math.isfinite(abs(F))


# ==================== Sweep Tests ====================

class TestSweep:
    """E, a, U₀ taramaları"""

    @pytest.mark.parametrize("vary,grid,fixed", [
        (SweepVariable.E, "0.5:50:12", dict(E=1.0, a=3.0, U0=10.0)),
        (SweepVariable.A, "0.05:10:12", dict(E=1.0, a=3.0, U0=10.0)),
        (SweepVariable.U0, "0:100:12", dict(E=1.0, a=3.0, U0=10.0)),
    ])
    def test_sweep_bounds(self, vary, grid, fixed):
        values = GridSpec.parse(grid).values()
        table = sweep(vary, values, ScatterParams(**fixed))
        assert table.columns == SWEEP_COLUMNS
        assert table.metadata["vary"] == vary.value
        assert table.column("x") == pytest.approx(values)
        for row in table:
            assert 0.0 <= row["T2"] <= 1.0 + 1e-8
            assert abs(row["defect"]) < 1e-8

    def test_energy_sweep_unitarity(self):
        """a = 3, U₀ = 10, E ∈ (0, 1000]"""
        values = GridSpec.parse("5:1000:200").values()
        table = sweep(SweepVariable.E, values, ScatterParams(E=1.0, a=3.0, U0=10.0))
        assert max(abs(d) for d in table.column("defect")) < 1e-8
        assert max(table.column("T2")) == pytest.approx(1.0, abs=1e-2)

    def test_depth_sweep_starts_transparent(self):
        table = sweep(SweepVariable.U0, [0.0, 1.0], ScatterParams(E=1.0, a=3.0, U0=10.0))
        assert table.rows[0]["T2"] == 1.0


# ==================== Delta Limit Tests ====================

class TestDeltaLimitStudy:
    """Sabit U₀a'da T → T_δ"""

    def test_gap_shrinks(self):
        table = delta_limit_study(1.0, halving_sequence(0.125, 8), E=1.0)
        gaps = table.column("gap")
        assert gaps == sorted(gaps, reverse=True)
        assert gaps[-1] < 0.05
        assert table.metadata["order"] > 0.5
