import json
import random
from fractions import Fraction

import pytest

from cantorwave.cantor import (Cell, CellFunction, cascade,
                               cascade_divergence, chi_C, correlation,
                               detail_basis, dilate, dilate_inverse, inner,
                               mra_project, norm_sq, pi_apply, refine,
                               refinement_nullspace, scale_sqrt2,
                               transfer_side_series, translate)
from cantorwave.laurent import LaurentPoly, RatC, haar_integral
from cantorwave.transfer import apply, cantor_filter
from conftest import brute_inner, random_cell_function, random_poly

HALF = Fraction(1, 2)


def cell(level, offset):
    return CellFunction.indicator(level, offset)


class TestCell:
    def test_measure(self):
        assert Cell(0, 0).measure() == 1
        assert Cell(3, 7).measure() == Fraction(1, 8)
        assert Cell(-1, 0).measure() == 2

    def test_children(self):
        assert Cell(1, 4).children() == (Cell(2, 12), Cell(2, 14))


class TestRefine:
    def test_chi_to_level_one(self):
        assert refine(chi_C(), 1) == CellFunction(1, {0: 1, 2: 1})

    def test_noop_at_own_level(self):
        rng = random.Random(21)
        for _ in range(20):
            f = random_cell_function(rng)
            assert refine(f, f.level) == f

    def test_level_one_cell(self):
        assert refine(cell(1, 0), 2) == CellFunction(2, {0: 1, 2: 1})

    def test_rejects_coarsening(self):
        with pytest.raises(ValueError):
            refine(cell(2, 0), 1)

    def test_preserves_inner_products(self):
        rng = random.Random(22)
        for _ in range(20):
            f, g = random_cell_function(rng), random_cell_function(rng)
            lvl = max(f.level, g.level) + 2
            assert inner(refine(f, lvl), refine(g, lvl)) == inner(f, g)


class TestNegativeLevels:
    def test_coarse_cell_normalizes(self):
        coarse = CellFunction(-1, {0: 1})
        assert coarse == CellFunction(0, {0: 1, 2: 1})
        assert norm_sq(coarse) == 2


class TestDilate:
    def test_dilate_half_cell(self):
        u = dilate(cell(1, 0))
        assert u.half_scale == 1
        assert norm_sq(u) == norm_sq(cell(1, 0)) == HALF

    def test_zero(self):
        assert dilate(CellFunction.zero()).is_zero()

    def test_inverse(self):
        rng = random.Random(23)
        for _ in range(20):
            f = random_cell_function(rng)
            assert dilate_inverse(dilate(f)) == f
            assert dilate(dilate_inverse(f)) == f

    def test_unitary(self):
        rng = random.Random(24)
        for _ in range(25):
            f, g = random_cell_function(rng), random_cell_function(rng)
            assert inner(dilate(f), dilate(g)) == inner(f, g)
            assert norm_sq(dilate(f)) == norm_sq(f)

    def test_scaling_equation(self):
        lhs = scale_sqrt2(dilate(chi_C()), 1)
        assert lhs == chi_C() + translate(chi_C(), 2)
        assert (lhs - chi_C() - translate(chi_C(), 2)).is_zero()


class TestTranslate:
    def test_integer_step(self):
        assert translate(chi_C(), 1) == cell(0, 1)
        assert translate(cell(2, 1), 2) == cell(2, 19)

    def test_orthonormal_translates(self):
        for k in range(-5, 6):
            expected = Fraction(1) if k == 0 else Fraction(0)
            assert inner(translate(chi_C(), k), chi_C()) == expected

    def test_inverse(self):
        rng = random.Random(25)
        for _ in range(20):
            f = random_cell_function(rng)
            m = rng.randint(-5, 5)
            assert translate(translate(f, m), -m) == f

    def test_unitary(self):
        rng = random.Random(26)
        for _ in range(20):
            f, g = random_cell_function(rng), random_cell_function(rng)
            m = rng.randint(-4, 4)
            assert inner(translate(f, m), translate(g, m)) == inner(f, g)

    def test_covariance(self):
        rng = random.Random(27)
        for _ in range(20):
            f = random_cell_function(rng)
            assert dilate(translate(dilate_inverse(f), 1)) == translate(f, 3)


class TestPiApply:
    def test_monomial_is_translation(self):
        assert pi_apply(LaurentPoly.monomial(2), chi_C()) == translate(chi_C(), 2)

    def test_zero(self):
        assert pi_apply(LaurentPoly.zero(), cell(1, 0)).is_zero()

    def test_rejects_complex(self):
        p = LaurentPoly({1: RatC(Fraction(0), Fraction(1))})
        with pytest.raises(ValueError):
            pi_apply(p, chi_C())

    def test_scaling_equation_via_pi(self):
        filt_numer = LaurentPoly({0: 1, 2: 1})
        assert pi_apply(filt_numer, chi_C()) == scale_sqrt2(dilate(chi_C()), 1)


class TestCascade:
    def test_fixes_chi(self):
        assert cascade(chi_C()) == chi_C()

    def test_half_cell(self):
        assert cascade(cell(1, 0)) == CellFunction(2, {0: 1, 6: 1})

    def test_zero(self):
        assert cascade(CellFunction.zero()).is_zero()

    def test_equals_dilate_inverse_of_pi(self):
        numer = LaurentPoly({0: 1, 2: 1})
        rng = random.Random(28)
        for _ in range(20):
            f = random_cell_function(rng)
            via_ops = dilate_inverse(scale_sqrt2(pi_apply(numer, f), -1))
            assert cascade(f) == via_ops


class TestInner:
    def test_chi_normalized(self):
        assert inner(chi_C(), chi_C()) == 1

    def test_disjoint_cells(self):
        assert inner(cell(1, 0), cell(1, 2)) == 0

    def test_nested_cell(self):
        assert inner(cell(1, 0), chi_C()) == HALF

    def test_against_expansion_oracle(self):
        rng = random.Random(29)
        for _ in range(40):
            f, g = random_cell_function(rng), random_cell_function(rng)
            assert inner(f, g) == brute_inner(f, g)

    def test_odd_scale_parity_raises(self):
        with pytest.raises(ValueError):
            inner(chi_C(), scale_sqrt2(chi_C(), 1))


class TestCorrelation:
    def test_chi_is_orthonormal(self):
        assert correlation(chi_C(), chi_C()) == LaurentPoly.one()

    def test_half_cell_difference(self):
        eta = cell(2, 6) - cell(2, 2)
        assert correlation(eta, eta) == LaurentPoly.constant(HALF)

    def test_zero(self):
        assert correlation(CellFunction.zero(), cell(1, 1)) == LaurentPoly.zero()

    def test_constant_term_is_norm(self):
        rng = random.Random(30)
        for _ in range(25):
            f = random_cell_function(rng)
            assert correlation(f, f).constant_term() == RatC.of(norm_sq(f))

    def test_definition_via_translates(self):
        rng = random.Random(31)
        for _ in range(15):
            f, g = random_cell_function(rng), random_cell_function(rng)
            p = correlation(f, g)
            for m in range(-12, 13):
                assert p[m] == RatC.of(inner(translate(f, -m), g))

    def test_intertwines_cascade_with_transfer(self):
        rng = random.Random(32)
        filt = cantor_filter()
        for _ in range(40):
            f, g = random_cell_function(rng), random_cell_function(rng)
            assert correlation(cascade(f), cascade(g)) == apply(
                filt, correlation(f, g))

    def test_representation_orthogonality(self):
        rng = random.Random(33)
        for _ in range(25):
            p = random_poly(rng, real=True)
            lhs = inner(pi_apply(p, chi_C()), chi_C())
            assert RatC.of(lhs) == haar_integral(p)


class TestCascadeDivergence:
    def test_half_cell_constant_series(self):
        series = cascade_divergence(cell(1, 0), 10)
        assert [v for _n, v in series] == [HALF] * 11

    def test_chi_fixed_point(self):
        series = cascade_divergence(chi_C(), 5)
        assert all(v == 0 for _n, v in series)

    def test_translate_positive_limit(self):
        series = cascade_divergence(translate(chi_C(), 1), 8)
        values = [v for _n, v in series]
        assert values == [Fraction(1)] * 9
        assert all(v > 0 for v in values)

    def test_cross_check_against_transfer_series(self):
        rng = random.Random(34)
        cases = [cell(1, 1), cell(2, 3) - cell(2, 1), translate(chi_C(), 3)]
        cases += [random_cell_function(rng, max_level=2, span=6)
                  for _ in range(5)]
        for f in cases:
            direct = cascade_divergence(f, 6)
            via_transfer = transfer_side_series(f, 6)
            assert direct == via_transfer


class TestRefinementNullspace:
    def test_unit_window_at_levels(self):
        for level in (1, 2, 3):
            basis = refinement_nullspace(level, 0, 1)
            assert len(basis) == 1
            assert basis[0] == refine(chi_C(), level)

    def test_wide_window(self):
        basis = refinement_nullspace(3, -2, 3)
        assert len(basis) == 1
        assert basis[0] == refine(chi_C(), 3)

    def test_shifted_window_is_empty(self):
        assert refinement_nullspace(2, 5, 6) == []
        shifted = translate(refine(chi_C(), 2), 5)
        assert cascade(shifted) != shifted

    def test_empty_window(self):
        assert refinement_nullspace(1, 2, 1) == []

    def test_basis_is_cascade_fixed(self):
        for level in (1, 2, 3, 4):
            for b in refinement_nullspace(level, -2, 3):
                assert cascade(b) == b

    def test_rank_against_sympy(self):
        sympy = pytest.importorskip("sympy")
        level, lo, hi = 2, -1, 2
        base = 3**level
        columns = list(range(lo * base, hi * base + 1))
        col_index = {c: i for i, c in enumerate(columns)}
        rows: dict[int, dict[int, int]] = {}
        for k in columns:
            for j, delta in ((k, 1), (k + 2 * base, 1),
                             (3 * k, -1), (3 * k + 2, -1)):
                row = rows.setdefault(j, {})
                row[k] = row.get(k, 0) + delta
        mat = sympy.zeros(len(rows), len(columns))
        for i, j in enumerate(sorted(rows)):
            for k, v in rows[j].items():
                mat[i, col_index[k]] = v
        expected_dim = len(columns) - mat.rank()
        assert len(refinement_nullspace(level, lo, hi)) == expected_dim


class TestMraProject:
    def test_chi_is_in_v0(self):
        assert mra_project(chi_C(), 0) == chi_C()

    def test_half_cell_onto_v0(self):
        assert mra_project(cell(1, 0), 0) == HALF * chi_C()

    def test_level_one_cells_are_in_v1(self):
        assert mra_project(cell(1, 0), 1) == cell(1, 0)
        assert mra_project(cell(1, 1), 1) == cell(1, 1)

    def test_idempotent_and_self_adjoint(self):
        rng = random.Random(35)
        for _ in range(25):
            f, g = random_cell_function(rng), random_cell_function(rng)
            n = rng.randint(0, 3)
            pf = mra_project(f, n)
            assert mra_project(pf, n) == pf
            assert inner(pf, g) == inner(f, mra_project(g, n))

    def test_nesting(self):
        rng = random.Random(36)
        for _ in range(25):
            f = random_cell_function(rng)
            assert mra_project(mra_project(f, 1), 0) == mra_project(f, 0)

    def test_middle_cells_have_no_coarse_part(self):
        assert mra_project(cell(1, 1), 0).is_zero()


class TestDetailBasis:
    def test_window_one(self):
        basis = detail_basis(1)
        assert len(basis) == 2
        for g, nsq in basis:
            assert g.level == 1
            assert norm_sq(g) == nsq
            assert mra_project(g, 0).is_zero()
            for k in range(-3, 4):
                assert inner(g, translate(chi_C(), k)) == 0
        (g1, _), (g2, _) = basis
        assert inner(g1, g2) == 0

    def test_window_two_count_and_orthogonality(self):
        basis = detail_basis(2)
        assert len(basis) == 6
        for i, (g1, _n) in enumerate(basis):
            assert mra_project(g1, 0).is_zero()
            for g2, _m in basis[i + 1:]:
                assert inner(g1, g2) == 0

    def test_generators_live_in_v1(self):
        for g, _n in detail_basis(2):
            assert mra_project(g, 1) == g

    def test_rejects_bad_window(self):
        with pytest.raises(ValueError):
            detail_basis(0)


class TestCompletenessAtFiniteResolution:
    def test_level_cells_are_dilated_translates(self):
        # the V_1 generators U^-1 T^k chi_C hit every level-1 cell
        for offset in range(-3, 9):
            generator = dilate_inverse(translate(chi_C(), offset))
            assert generator == scale_sqrt2(cell(1, offset), 1)
            assert mra_project(cell(1, offset), 1) == cell(1, offset)

    def test_deeper_level_via_repeated_dilation(self):
        for offset in (-2, 0, 5):
            generator = dilate_inverse(dilate_inverse(translate(chi_C(), offset)))
            assert generator == scale_sqrt2(cell(2, offset), 2)


class TestSerialization:
    def test_roundtrip(self):
        rng = random.Random(37)
        for _ in range(20):
            f = random_cell_function(rng)
            blob = json.dumps(f.to_json_dict())
            assert CellFunction.from_json_dict(json.loads(blob)) == f

    def test_shape(self):
        f = CellFunction(1, {0: Fraction(1, 3), 2: -1}, half_scale=1)
        assert f.to_json_dict() == {
            "level": 1,
            "coeffs": {"0": [1, 3], "2": [-1, 1]},
            "half_scale": 1,
        }
