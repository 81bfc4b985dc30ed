"""Unit tests for the compliance engine: relations, catalog, search, table."""

import json

import numpy as np
import pytest

from sparsemetrics import (
    CATALOG_PAIRS,
    DISPUTED_CELLS,
    EXPECTED_TRUE,
    KNOWN_DEAD_MAPPINGS,
    TABLE4_WITNESSES,
    CoefficientVector,
    Criterion,
    Measure,
    MeasureSpec,
    catalog_verdict,
    check_cell,
    compliance_map,
    evaluate,
    full_table,
    relation_holds,
    run_counterexamples,
    theorem_consistency,
)
from sparsemetrics.errors import CatalogMiss


class TestRelationHolds:
    def test_equality_is_a_violation_of_strict_criteria(self):
        assert not relation_holds(Criterion.D1, 0.5, 0.5)
        assert not relation_holds(Criterion.P1, 1.0, 1.0)

    def test_equality_satisfies_equal_criteria(self):
        assert relation_holds(Criterion.D2, 0.657340, 0.657340)
        assert relation_holds(Criterion.D4, -9.0, -9.0)

    def test_strict_decrease(self):
        assert relation_holds(Criterion.D3, -6.25383, -7.9)
        assert not relation_holds(Criterion.D3, -7.9, -6.25383)

    def test_tolerance_scales_with_magnitude(self):
        # difference below 1e-9 * magnitude counts as equal
        assert relation_holds(Criterion.D2, 1e6, 1e6 + 1e-4)
        assert not relation_holds(Criterion.D2, 1e6, 1e6 + 1e-2)

    def test_explicit_tolerance(self):
        assert relation_holds(Criterion.D2, 1.0, 1.5, tolerance=1.0)


class TestCatalog:
    def test_pairs_verbatim(self):
        assert CATALOG_PAIRS["CE1"].before == (0, 1, 3, 5)
        assert CATALOG_PAIRS["CE1"].after == (0, 2, 3, 4)
        assert CATALOG_PAIRS["CE6"].after == (0, 0, 0, 1, 3, 5)
        assert CATALOG_PAIRS["U1"].after == (1.1, 1.9, 4, 9)

    def test_missing_mapping_raises(self):
        with pytest.raises(CatalogMiss):
            catalog_verdict(MeasureSpec(Measure.GINI), Criterion.D1)

    def test_l0_d1_witness(self):
        v = catalog_verdict(MeasureSpec(Measure.L0), Criterion.D1)
        assert v.violated and v.value_before == 1.0 and v.value_after == 1.0

    def test_kappa4_d1_witness_values(self):
        v = catalog_verdict(MeasureSpec(Measure.KAPPA4), Criterion.D1)
        assert v.violated
        assert v.value_before == pytest.approx(0.65648, abs=1e-5)
        assert v.value_after == pytest.approx(0.65857, abs=1e-5)

    def test_hg_d2_witness_discriminates(self):
        v = catalog_verdict(MeasureSpec(Measure.HG), Criterion.D2)
        assert v.violated
        assert v.value_before != v.value_after

    def test_live_mappings_all_witness(self):
        for (measure, criterion), name in TABLE4_WITNESSES.items():
            if (measure, criterion) in KNOWN_DEAD_MAPPINGS:
                continue
            v = catalog_verdict(MeasureSpec(measure), criterion)
            assert v.violated, (measure, criterion, name)

    def test_dead_mappings_pinned(self):
        """The four documented non-discriminating pairs really do not witness."""
        for cell in KNOWN_DEAD_MAPPINGS:
            v = catalog_verdict(MeasureSpec(cell[0]), cell[1])
            assert not v.violated, cell
        # and the mechanisms are what the notes claim
        spec = MeasureSpec(Measure.L0_EPS)  # epsilon=1: counts go 2 -> 1
        v = catalog_verdict(spec, Criterion.D1)
        assert (v.value_before, v.value_after) == (2.0, 1.0)
        for m in (Measure.HG, Measure.HS_PRIME):
            v = catalog_verdict(MeasureSpec(m), Criterion.D4)
            assert v.value_before == v.value_after

    def test_run_counterexamples_covers_mapped_cells(self):
        verdicts = run_counterexamples(MeasureSpec(Measure.NEG_L1))
        cells = {(v.measure, v.criterion) for v in verdicts}
        assert cells == {
            (Measure.NEG_L1, c)
            for c in (Criterion.D1, Criterion.D2, Criterion.D4, Criterion.P1, Criterion.P2)
        }
        assert all(v.violated for v in verdicts)


class TestCheckCell:
    def test_gini_cloning_no_violation(self):
        v = check_cell(MeasureSpec(Measure.GINI), Criterion.D4, trials=300, seed=7)
        assert not v.violated
        assert v.trials == 300

    def test_hoyer_cloning_violated_with_witness(self):
        v = check_cell(MeasureSpec(Measure.HOYER), Criterion.D4, trials=200, seed=0)
        assert v.violated and v.witness is not None

    def test_u_theta_rising_tide_violated(self):
        v = check_cell(MeasureSpec(Measure.U_THETA), Criterion.D3, trials=100, seed=0)
        assert v.violated

    def test_witness_replay(self):
        v = check_cell(MeasureSpec(Measure.HOYER), Criterion.D4, trials=200, seed=3)
        assert v.violated
        spec = MeasureSpec(Measure.HOYER)
        vb = evaluate(spec, v.witness.before)
        va = evaluate(spec, v.witness.after)
        assert vb == v.value_before and va == v.value_after
        assert not relation_holds(v.criterion, vb, va)

    def test_determinism(self):
        a = check_cell(MeasureSpec(Measure.HS), Criterion.D1, trials=50, seed=9)
        b = check_cell(MeasureSpec(Measure.HS), Criterion.D1, trials=50, seed=9)
        assert a.trials == b.trials and a.violated == b.violated
        assert a.witness.before == b.witness.before

    def test_monotone_confidence(self):
        # NoViolationFound at T stays NoViolationFound at smaller T, same seed
        big = check_cell(MeasureSpec(Measure.GINI), Criterion.D1, trials=120, seed=5)
        small = check_cell(MeasureSpec(Measure.GINI), Criterion.D1, trials=40, seed=5)
        assert not big.violated and not small.violated


@pytest.fixture(scope="module")
def small_table():
    return full_table(trials=120, seed=0)


class TestFullTable:
    def test_only_known_mismatch(self, small_table):
        assert small_table.mismatches == [(Measure.HS, Criterion.D2)]

    def test_disputed_reports_no_violation(self, small_table):
        v = small_table.disputed[(Measure.L2_OVER_L1, Criterion.D3)]
        assert not v.violated

    def test_gini_row_clean(self, small_table):
        for c in Criterion:
            assert not small_table.verdict(Measure.GINI, c).violated

    def test_hoyer_row_only_d4(self, small_table):
        for c in Criterion:
            v = small_table.verdict(Measure.HOYER, c)
            assert v.violated == (c is Criterion.D4)

    def test_cell_count(self, small_table):
        assert len(small_table.cells) == 90

    def test_structured_dict_has_90_cells(self, small_table):
        d = small_table.to_dict()
        assert len(d["cells"]) == 90
        json.dumps(d)  # serializable

    def test_determinism_bit_identical(self, small_table):
        again = full_table(trials=120, seed=0)
        assert json.dumps(small_table.to_dict()) == json.dumps(again.to_dict())

    def test_theorem_consistency_on_produced(self, small_table):
        assert theorem_consistency(compliance_map(small_table))


class TestTheoremConsistency:
    def test_expected_matrix_consistent(self):
        assert theorem_consistency(EXPECTED_TRUE)

    def test_mutated_gini_row_fails(self):
        mutated = dict(EXPECTED_TRUE)
        mutated[Measure.GINI] = frozenset(EXPECTED_TRUE[Measure.GINI] - {Criterion.P2})
        assert not theorem_consistency(mutated)

    def test_all_false_is_vacuously_consistent(self):
        assert theorem_consistency({m: frozenset() for m in Measure})


class TestScaleInvarianceSharpening:
    def test_d2_true_measures_invariant_under_random_scaling(self):
        d2_true = (
            Measure.L0,
            Measure.L2_OVER_L1,
            Measure.KAPPA4,
            Measure.U_THETA,
            Measure.HOYER,
            Measure.GINI,
        )
        rng = np.random.default_rng(21)
        for _ in range(500):
            v = rng.random(int(rng.integers(2, 64))) * 10
            v[rng.random(v.size) < 0.2] = 0
            if not v.any() or v.max() == v.min():
                continue
            c = CoefficientVector(v)
            alpha = float(np.exp(rng.uniform(np.log(0.1), np.log(10))))
            scaled = CoefficientVector(alpha * v)
            for m in d2_true:
                s0 = evaluate(MeasureSpec(m), c)
                s1 = evaluate(MeasureSpec(m), scaled)
                assert abs(s1 - s0) <= 1e-9 * max(1.0, abs(s0)), m
