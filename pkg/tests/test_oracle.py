import numpy as np
import pytest

from effectcompat.compat import _depolarized_pair, compute_lambda0, random_effect
from effectcompat.core import (
    Effect,
    effect_from_affine,
    effect_from_vertex_values,
    make_state_space,
    unit_effect,
)
from effectcompat.models import gbit_square, regular_polygon, simplex, zoo_model
from effectcompat.oracle import (
    cross_check,
    grid_lambda0,
    simplex_lambda0_closed_form,
)


@pytest.fixture
def square():
    return gbit_square()


@pytest.fixture
def sharp_pair(square):
    return (
        effect_from_affine(square, [0.5, 0.5, 0.0]),
        effect_from_affine(square, [0.5, 0.0, 0.5]),
    )


class TestClosedForm:
    def test_example_pair(self):
        assert simplex_lambda0_closed_form(
            [0.2, 0.9, 0.4], [0.8, 0.1, 0.5]
        ) == pytest.approx(0.9)

    def test_equal_effects(self):
        assert simplex_lambda0_closed_form(
            [0.3, 0.7, 0.1], [0.3, 0.7, 0.1]
        ) == pytest.approx(0.7)

    def test_all_zero(self):
        assert simplex_lambda0_closed_form([0.0, 0.0], [0.0, 0.0]) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            simplex_lambda0_closed_form([0.1, 0.2], [0.1])

    def test_range_violation(self):
        with pytest.raises(ValueError):
            simplex_lambda0_closed_form([0.1, 1.3], [0.1, 0.2])


class TestGrid:
    def test_sharp_pair_exact(self, square, sharp_pair):
        # g = 0 is on the grid and is the only feasible witness, so the
        # enumeration returns e+f at the (1,1) corner exactly.
        grid = grid_lambda0(square, *sharp_pair, resolution=101)
        assert grid.value == 2.0
        assert grid.lower_bound == 1.0
        assert not grid.box_expanded

    def test_triangle_pair_converges_to_closed_form(self):
        space = simplex(3)
        e = effect_from_vertex_values(space, [0.2, 0.9, 0.4])
        f = effect_from_vertex_values(space, [0.8, 0.1, 0.5])
        grid = grid_lambda0(space, e, f, resolution=101)
        assert grid.value == pytest.approx(0.9, abs=0.02)
        assert grid.value >= 0.9 - 1e-12  # upper bound never undercuts

    def test_half_unit_pair(self, square):
        half = Effect(unit_effect(2).coefficients * 0.5)
        grid = grid_lambda0(square, half, half, resolution=101)
        assert grid.value == pytest.approx(0.5, abs=grid.step_bound + 1e-12)

    def test_monotone_under_refinement(self, square, sharp_pair):
        # linspace(-1, 1, 2r-1) contains linspace(-1, 1, r), so refining
        # never loses a feasible candidate.
        e, f = sharp_pair
        coarse = grid_lambda0(square, e, f, resolution=11)
        fine = grid_lambda0(square, e, f, resolution=21)
        assert fine.value <= coarse.value + 1e-9

    def test_box_expansion_flagged(self):
        # On a short segment the sharp effect needs slope 10, outside [-1, 1].
        space = make_state_space([[0.0], [0.1]], name="short")
        e = effect_from_vertex_values(space, [0.0, 1.0])
        f = effect_from_vertex_values(space, [1.0, 0.0])
        grid = grid_lambda0(space, e, f, resolution=41)
        assert grid.box_expanded
        report = compute_lambda0(space, e, f)
        assert grid.lower_bound - 1e-9 <= report.lambda0 <= grid.value + grid.step_bound + 1e-9

    def test_dimension_cap(self):
        space = make_state_space(np.eye(4).tolist(), name="4d")
        u = unit_effect(4)
        with pytest.raises(ValueError):
            grid_lambda0(space, u, u)

    def test_resolution_validation(self, square, sharp_pair):
        with pytest.raises(ValueError):
            grid_lambda0(square, *sharp_pair, resolution=1)

    def test_sandwich_on_random_pairs(self, square):
        rng = np.random.default_rng(59)
        for space in (square, simplex(3), regular_polygon(5)):
            for _ in range(6):
                e = random_effect(space, rng)
                f = random_effect(space, rng)
                report = compute_lambda0(space, e, f)
                grid = grid_lambda0(space, e, f, resolution=21)
                assert report.lambda0 >= grid.lower_bound - 1e-9
                assert report.lambda0 <= grid.value + grid.step_bound + 1e-9

    def test_depolarized_sharp_pair_boundary(self, square, sharp_pair):
        # Grid confirmation for the depolarizing golden value t* = 1/2:
        # at t = 1/2 the pair sits exactly on the compatibility boundary.
        e, f = sharp_pair
        et, ft = _depolarized_pair(e, f, 0.5)
        report = compute_lambda0(square, et, ft)
        assert report.lambda0 == pytest.approx(1.0, abs=1e-9)
        grid = grid_lambda0(square, et, ft, resolution=101)
        assert grid.lower_bound - 1e-9 <= 1.0 <= grid.value + grid.step_bound + 1e-9


class TestCrossCheck:
    def test_triangle_example_agrees(self):
        space = simplex(3)
        e = effect_from_vertex_values(space, [0.2, 0.9, 0.4])
        f = effect_from_vertex_values(space, [0.8, 0.1, 0.5])
        result = cross_check(space, e, f, resolution=101)
        assert result.ok, result.discrepancies
        assert result.closed_form == pytest.approx(0.9)
        assert result.lp_lambda0 == pytest.approx(0.9, abs=1e-9)

    def test_sharp_pair_agrees(self, square, sharp_pair):
        result = cross_check(square, *sharp_pair, resolution=101)
        assert result.ok, result.discrepancies
        assert result.closed_form is None  # square is not a simplex
        assert result.grid.value == 2.0
        assert result.lp_lambda0 == pytest.approx(2.0, abs=1e-9)

    def test_self_pair(self, square):
        e = effect_from_affine(square, [0.4, 0.1, -0.2])
        result = cross_check(square, e, e, resolution=41)
        assert result.ok, result.discrepancies
        assert result.lp_lambda0 == pytest.approx(
            float(e.vertex_values(square).max()), abs=1e-9
        )

    def test_zoo_simplices_match_closed_form(self):
        rng = np.random.default_rng(61)
        for name in ("simplex-2", "simplex-3"):
            space, _ = zoo_model(name)
            for _ in range(5):
                e = random_effect(space, rng)
                f = random_effect(space, rng)
                result = cross_check(space, e, f, resolution=21)
                assert result.ok, result.discrepancies
                assert result.closed_form is not None
