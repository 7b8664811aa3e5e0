import numpy as np
import pytest

import effectcompat.lp as lp
from effectcompat.lp import (
    EQ,
    GE,
    LE,
    LpInputError,
    LpProblem,
    LpStatus,
    SolverFailure,
    check_feasible,
    solve_lp,
)


def test_single_active_bound_row():
    # minimize x subject to x >= 1
    prob = LpProblem([1.0], [[1.0]], (GE,), [1.0])
    res = solve_lp(prob)
    assert res.status is LpStatus.OPTIMAL
    assert res.value == pytest.approx(1.0, abs=1e-9)
    assert res.point[0] == pytest.approx(1.0, abs=1e-9)


def test_single_active_bound_as_variable_bound():
    prob = LpProblem([1.0], np.zeros((0, 1)), (), [], bounds=((1.0, None),))
    res = solve_lp(prob)
    assert res.status is LpStatus.OPTIMAL
    assert res.value == pytest.approx(1.0, abs=1e-9)


def test_unit_simplex_vertex():
    # minimize -x - y subject to x + y <= 1, x >= 0, y >= 0
    prob = LpProblem(
        [-1.0, -1.0],
        [[1.0, 1.0]],
        (LE,),
        [1.0],
        bounds=((0.0, None), (0.0, None)),
    )
    res = solve_lp(prob)
    assert res.status is LpStatus.OPTIMAL
    assert res.value == pytest.approx(-1.0, abs=1e-9)


def test_contradictory_rows_infeasible():
    # minimize x subject to x <= 0 and x >= 1
    prob = LpProblem([1.0], [[1.0], [1.0]], (LE, GE), [0.0, 1.0])
    res = solve_lp(prob)
    assert res.status is LpStatus.INFEASIBLE
    assert res.value is None and res.point is None


def test_unbounded_free_variable():
    prob = LpProblem([1.0], np.zeros((0, 1)), (), [])
    res = solve_lp(prob)
    assert res.status is LpStatus.UNBOUNDED


def test_upper_bound_only():
    prob = LpProblem([-1.0], np.zeros((0, 1)), (), [], bounds=((None, 5.0),))
    res = solve_lp(prob)
    assert res.status is LpStatus.OPTIMAL
    assert res.value == pytest.approx(-5.0, abs=1e-9)
    assert res.point[0] == pytest.approx(5.0, abs=1e-9)


def test_two_sided_bounds_and_equality():
    # minimize x + y subject to x + 2y = 3, 0 <= x <= 10, -1 <= y <= 1
    prob = LpProblem(
        [1.0, 1.0],
        [[1.0, 2.0]],
        (EQ,),
        [3.0],
        bounds=((0.0, 10.0), (-1.0, 1.0)),
    )
    res = solve_lp(prob)
    assert res.status is LpStatus.OPTIMAL
    # optimum at x = 1, y = 1
    assert res.value == pytest.approx(2.0, abs=1e-9)
    assert np.allclose(res.point, [1.0, 1.0], atol=1e-9)


def test_row_length_mismatch_is_input_error():
    with pytest.raises(LpInputError):
        LpProblem([1.0, 2.0], [[1.0]], (LE,), [1.0])


def test_bad_bounds_are_input_error():
    with pytest.raises(LpInputError):
        LpProblem([1.0], np.zeros((0, 1)), (), [], bounds=((2.0, 1.0),))


def test_unknown_relation_is_input_error():
    with pytest.raises(LpInputError):
        LpProblem([1.0], [[1.0]], ("<",), [1.0])


def test_duplicate_rows_are_harmless():
    rows = [[1.0, 1.0]] * 4 + [[1.0, -1.0]]
    rels = (LE, LE, LE, LE, GE)
    prob = LpProblem([-1.0, 0.0], rows, rels, [1.0, 1.0, 1.0, 1.0, 0.0],
                     bounds=((0.0, None), (0.0, None)))
    res = solve_lp(prob)
    assert res.status is LpStatus.OPTIMAL
    assert res.value == pytest.approx(-1.0, abs=1e-9)


def test_row_permutation_preserves_value():
    rng = np.random.default_rng(7)
    rows = [[2.0, 1.0], [1.0, 3.0], [1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]
    rels = (LE, LE, GE, GE, LE)
    rhs = [8.0, 9.0, 0.0, 0.0, -1.0]
    base = solve_lp(LpProblem([-3.0, -5.0], rows, rels, rhs))
    assert base.status is LpStatus.OPTIMAL
    for _ in range(10):
        perm = rng.permutation(len(rows))
        shuffled = LpProblem(
            [-3.0, -5.0],
            [rows[i] for i in perm],
            tuple(rels[i] for i in perm),
            [rhs[i] for i in perm],
        )
        res = solve_lp(shuffled)
        assert res.status is LpStatus.OPTIMAL
        assert res.value == pytest.approx(base.value, abs=1e-9)


def test_value_matches_objective_at_point():
    prob = LpProblem(
        [1.0, -2.0, 0.5],
        [[1.0, 1.0, 1.0], [1.0, -1.0, 0.0]],
        (LE, GE),
        [4.0, -2.0],
        bounds=((0.0, None), (0.0, 3.0), (-1.0, 1.0)),
    )
    res = solve_lp(prob)
    assert res.status is LpStatus.OPTIMAL
    assert res.value == pytest.approx(float(prob.objective @ res.point), abs=1e-9)


def test_deterministic_resolve():
    prob = LpProblem(
        [-1.0, -1.0],
        [[1.0, 2.0], [3.0, 1.0]],
        (LE, LE),
        [4.0, 6.0],
        bounds=((0.0, None), (0.0, None)),
    )
    a = solve_lp(prob)
    b = solve_lp(prob)
    assert a.value == b.value
    assert np.array_equal(a.point, b.point)
    assert a.iterations == b.iterations


def test_iteration_cap_raises_solver_failure(monkeypatch):
    monkeypatch.setattr(lp, "ITERATION_CAP_FACTOR", 0)
    prob = LpProblem(
        [-1.0, -1.0],
        [[1.0, 2.0], [3.0, 1.0]],
        (LE, LE),
        [4.0, 6.0],
        bounds=((0.0, None), (0.0, None)),
    )
    with pytest.raises(SolverFailure):
        solve_lp(prob)


def test_check_feasible_interval():
    prob = LpProblem([0.0], [[1.0], [1.0]], (GE, LE), [1.0, 2.0])
    assert check_feasible(prob) is True


def test_check_feasible_empty_interval():
    prob = LpProblem([0.0], [[1.0], [1.0]], (GE, LE), [1.0, 0.0])
    assert check_feasible(prob) is False
