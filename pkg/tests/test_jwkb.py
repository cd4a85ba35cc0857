"""
Dimple Trap - JWKB Unit Tests

pytest ile yarı-klasik kuantumlama ve karşılaştırma tablosu testleri
"""

import math

import pytest

from core.exceptions import DomainError
from core.schemas import PrecisionFlag, Region, TrapParams
from processors.jwkb import (
    COMPARE_COLUMNS,
    annotate_with_reference,
    compare_spectra,
    jwkb_inner,
    jwkb_level,
    jwkb_outer,
    jwkb_spectrum,
    jwkb_table,
    n_prime,
    phase_integral,
    phase_integral_quadrature,
)
from utils.config_loader import ConfigLoader
from utils.sweep_table import SweepTable

TABLE_ONE_JWKB = [
    -8.8333, -6.5000, -4.1667, -1.8333, 0.5000, 2.6852,
    4.0504, 5.2638, 6.4181, 7.5390, 8.6381, 9.7217,
]
TOLERANCE = 5e-4


@pytest.fixture(scope="module")
def table_one_params():
    return TrapParams.natural(a=3.0, U0=10.0)


@pytest.fixture(scope="module")
def table_two_params():
    return TrapParams.si(mass_amu=23.0, frequency_hz=20.0, a=11e-6, U0=1e-30)


# ==================== n' Tests ====================

class TestNPrime:
    """V(a) altındaki seviye sayısı"""

    def test_table_one(self, table_one_params):
        assert n_prime(table_one_params) == 5

    def test_table_two(self, table_two_params):
        assert n_prime(table_two_params) == 15

    def test_no_dimple(self):
        """U₀ = 0, V(a) = 2.25 ħω: 0.5, 1.5 altta"""
        assert n_prime(TrapParams.natural(a=3.0, U0=0.0)) == 2

    def test_narrow_dimple_has_none(self):
        """V(a) < ħω_d/2 - U₀ ise n' = 0"""
        assert n_prime(TrapParams.natural(a=0.1, U0=0.0)) == 0


# ==================== Level Tests ====================

class TestJwkbLevels:
    """İç ve dış bölge JWKB seviyeleri"""

    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
    def test_inner_levels_table_one(self, table_one_params, n):
        level = jwkb_inner(table_one_params, n)
        assert level.region is Region.INNER
        assert level.energy_over_hbar_omega == pytest.approx(-10.0 + (n + 0.5) * 7.0 / 3.0, rel=1e-12)
        assert level.energy_over_hbar_omega == pytest.approx(TABLE_ONE_JWKB[n], abs=TOLERANCE)

    def test_inner_turning_points_symmetric(self, table_one_params):
        level = jwkb_inner(table_one_params, 2)
        left, right = level.turning_points
        assert left == -right
        assert 0.0 < right < table_one_params.a

    def test_inner_rejects_outer_level(self, table_one_params):
        with pytest.raises(DomainError):
            jwkb_inner(table_one_params, 5)

    def test_outer_rejects_inner_level(self, table_one_params):
        with pytest.raises(DomainError):
            jwkb_outer(table_one_params, 4)

    @pytest.mark.parametrize("n", [5, 6, 7, 8, 9, 10, 11])
    def test_outer_levels_table_one(self, table_one_params, n):
        level = jwkb_outer(table_one_params, n)
        assert level.region is Region.OUTER
        assert level.energy_over_hbar_omega == pytest.approx(TABLE_ONE_JWKB[n], abs=TOLERANCE)
        assert level.turning_points[1] > table_one_params.a

    def test_table_two_deep_and_high_levels(self, table_two_params):
        assert jwkb_level(table_two_params, 0).energy_over_hbar_omega == pytest.approx(-72.7948, abs=TOLERANCE)
        assert jwkb_level(table_two_params, 500).energy_over_hbar_omega == pytest.approx(498.1857, abs=TOLERANCE)

    def test_exact_for_pure_oscillator(self):
        params = TrapParams.natural(a=3.0, U0=0.0)
        for n in range(8):
            assert jwkb_level(params, n).energy_over_hbar_omega == pytest.approx(n + 0.5, abs=1e-9)

    def test_spectrum_cutoff(self, table_one_params):
        levels = jwkb_spectrum(table_one_params, 10.0)
        assert [lvl.n for lvl in levels] == list(range(12))
        assert all(lvl.energy_over_hbar_omega <= 10.0 for lvl in levels)


# ==================== Phase Integral Tests ====================

class TestPhaseIntegral:
    """Kapalı form ve quadrature faz integrali"""

    @pytest.mark.parametrize("energy", [-5.0, 1.0, 2.2, 3.0, 7.5])
    def test_closed_form_matches_quadrature(self, table_one_params, energy):
        closed = phase_integral(table_one_params, energy)
        numeric = phase_integral_quadrature(table_one_params, energy)
        assert closed == pytest.approx(numeric, rel=1e-9)

    def test_continuous_across_matching_energy(self, table_one_params):
        edge = table_one_params.matching_energy
        below = phase_integral(table_one_params, edge - 1e-9)
        above = phase_integral(table_one_params, edge + 1e-9)
        assert below == pytest.approx(above, abs=1e-6)

    def test_quantization_condition(self, table_one_params):
        for n in (5, 9):
            level = jwkb_outer(table_one_params, n)
            assert phase_integral(table_one_params, level.energy) == pytest.approx((n + 0.5) * math.pi, abs=1e-9)

    def test_zero_below_well(self, table_one_params):
        assert phase_integral(table_one_params, -11.0) == 0.0

    def test_jwkb_table(self, table_one_params):
        table = jwkb_table(table_one_params, 10.0)
        assert len(table) == 12
        assert table.metadata["n_prime"] == 5
        for row in table:
            assert row["phase"] == pytest.approx((row["n"] + 0.5) * math.pi, abs=1e-8)
            assert row["phase_quadrature"] == pytest.approx(row["phase"], rel=1e-8)


# ==================== Comparison Tests ====================

class TestCompareSpectra:
    """Analitik - JWKB karşılaştırma tablosu"""

    @pytest.fixture(scope="class")
    def table(self, table_one_params):
        return compare_spectra(table_one_params, 10.0)

    def test_columns_and_rows(self, table):
        assert table.columns == COMPARE_COLUMNS
        assert len(table) == 12
        assert table.metadata["n_prime"] == 5
        assert table.metadata["matching_energy_over_hbar_omega"] == pytest.approx(2.25)

    def test_jwkb_column(self, table):
        assert table.column("jwkb") == pytest.approx(TABLE_ONE_JWKB, abs=TOLERANCE)

    def test_largest_difference_in_transition_region(self, table):
        differences = table.column("difference")
        assert max(range(12), key=lambda i: differences[i]) == 5
        assert differences[5] == pytest.approx(0.1420, abs=1e-3)

    def test_flags_ok(self, table):
        assert all(flag is PrecisionFlag.OK for flag in table.column("flag"))

    def test_zero_difference_without_dimple(self):
        table = compare_spectra(TrapParams.natural(a=3.0, U0=0.0), 5.0)
        assert max(table.column("difference")) < 1e-7

    def test_deep_levels_exact_table_two(self, table_two_params):
        """İç bölgenin derin seviyelerinde JWKB = analitik"""
        table = compare_spectra(table_two_params, -32.0)
        assert len(table) == 8
        assert max(table.column("difference")) <= 1e-4

    def test_extra_levels_table_two(self, table_two_params):
        table = compare_spectra(table_two_params, -60.0, extra_levels=[499, 500])
        rows = {row["n"]: row for row in table}
        assert rows[499]["analytic"] == pytest.approx(497.1836, abs=TOLERANCE)
        assert rows[500]["jwkb"] == pytest.approx(498.1857, abs=TOLERANCE)
        assert rows[500]["difference"] <= 1e-3


class TestAnnotateWithReference:
    """Yayımlanmış değerlerle etiketleme"""

    def test_printed_difference_typo_detected(self):
        table = SweepTable(list(COMPARE_COLUMNS))
        table.add_row(n=3, analytic=-1.8447, jwkb=-1.8333, difference=0.0114, region=Region.INNER,
                      flag=PrecisionFlag.OK)
        table.add_row(n=4, analytic=0.4355, jwkb=0.5, difference=0.0645, region=Region.INNER,
                      flag=PrecisionFlag.OK)
        reference = [[3, -1.8447, -1.8333, 0.114], [4, 0.4355, 0.5000, 0.0645]]

        annotated = annotate_with_reference(table, reference)
        assert annotated.rows[0]["printed_difference_ok"] is False
        assert annotated.rows[0]["mismatch"] is False
        assert annotated.rows[1]["printed_difference_ok"] is True

    def test_mismatch_flag(self):
        table = SweepTable(list(COMPARE_COLUMNS))
        table.add_row(n=0, analytic=-8.80, jwkb=-8.8333, difference=0.0333, region=Region.INNER,
                      flag=PrecisionFlag.OK)
        annotated = annotate_with_reference(table, [[0, -8.8333, -8.8333, 0.0]])
        assert annotated.rows[0]["mismatch"] is True

    def test_rows_without_reference(self):
        table = SweepTable(list(COMPARE_COLUMNS))
        table.add_row(n=7, analytic=1.0, jwkb=1.0, difference=0.0, region=Region.OUTER, flag=PrecisionFlag.OK)
        annotated = annotate_with_reference(table, [])
        assert annotated.rows[0]["reference_analytic"] is None


# ==================== Published Table Tests ====================

class TestTableTwoReference:
    """Sodyum tuzağı: hesaplanan tablo yayımlanmış satırlarla"""

    @pytest.fixture(scope="class")
    def annotated(self, table_two_params):
        reference = ConfigLoader().get_preset("table2")["reference"]
        table = compare_spectra(table_two_params, 14.0)
        return {row["n"]: row for row in annotate_with_reference(table, reference)}

    def test_all_rows_present(self, annotated):
        assert sorted(annotated) == list(range(23))

    @pytest.mark.parametrize("n", [1, 8, 13, 14, 15, 22])
    def test_row_matches_published(self, annotated, n):
        row = annotated[n]
        assert row["analytic"] == pytest.approx(row["reference_analytic"], abs=TOLERANCE)
        assert row["jwkb"] == pytest.approx(row["reference_jwkb"], abs=TOLERANCE)
        assert row["mismatch"] is False
        assert row["printed_difference_ok"] is True

    def test_region_switch_at_n_prime(self, annotated):
        assert annotated[14]["region"] is Region.INNER
        assert annotated[15]["region"] is Region.OUTER

    def test_no_mismatch_anywhere(self, annotated):
        assert not any(row["mismatch"] for row in annotated.values())
