"""Joint measurability of effect pairs, decided by linear programming.

Two effects e and f are jointly measurable exactly when some effect g
satisfies g <= e, g <= f and e + f <= g + u.  Relaxing the last inequality
to e + f <= g + lambda*u and minimizing lambda gives a single number,
lambda0, that decides the question: the pair is compatible iff lambda0 <= 1.
Since lambda enters the constraints linearly and all inequalities reduce to
vertex checks on a polytope, lambda0 is the optimum of one small LP over
the affine coefficients of g and lambda, and the minimum is attained: the
optimal g comes out of the LP as a witness.

lambda0 is always in [0, 2] (g = 0, lambda = 2 is feasible for any pair),
and for an incompatible pair sigma0 = 2*(1 - 1/lambda0) in (0, 1] measures
the least outcome-mixing noise that restores compatibility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Effect,
    Observable,
    StateSpace,
    dichotomic_observable,
    effect_from_affine,
    unit_effect,
)
from .lp import LE, LpProblem, LpStatus, SolverFailure, check_feasible, solve_lp
from .tolerances import DEFAULT_TOLERANCES, SolverTolerances


class IncompatibilityError(ValueError):
    """Raised when an operation requires a compatible pair but lambda0 > 1."""

    def __init__(self, message: str, lambda0: float):
        super().__init__(message)
        self.lambda0 = lambda0


class CrossCheckError(RuntimeError):
    """An internal consistency check between independent routes failed."""


@dataclass(frozen=True)
class CompatReport:
    """Outcome of a compatibility computation for one effect pair.

    witness is the effect g attaining the minimum: g <= e, g <= f and
    e + f <= g + lambda0*u hold on every vertex up to solver tolerance.
    """

    lambda0: float
    sigma0: float
    compatible: bool
    witness: Effect
    lp_iterations: int
    tolerances: SolverTolerances


@dataclass(frozen=True)
class MarkovKernel2x2:
    """Column-stochastic 2x2 mixing of a two-outcome observable."""

    mu11: float
    mu12: float
    mu21: float
    mu22: float

    def __post_init__(self) -> None:
        for name in ("mu11", "mu12", "mu21", "mu22"):
            v = getattr(self, name)
            if not -1e-12 <= v <= 1.0 + 1e-12:
                raise ValueError(f"kernel entry {name}={v!r} outside [0, 1]")
        if abs(self.mu11 + self.mu21 - 1.0) > 1e-12 or abs(self.mu12 + self.mu22 - 1.0) > 1e-12:
            raise ValueError(
                "kernel columns must sum to 1: "
                f"got {self.mu11 + self.mu21!r} and {self.mu12 + self.mu22!r}"
            )


def _validated_pair(space: StateSpace, e: Effect, f: Effect,
                    tol: SolverTolerances) -> tuple[np.ndarray, np.ndarray]:
    effect_from_affine(space, e.coefficients, tol)
    effect_from_affine(space, f.coefficients, tol)
    return e.vertex_values(space), f.vertex_values(space)


def _lambda_problem(space: StateSpace, ev: np.ndarray, fv: np.ndarray) -> LpProblem:
    """minimize lambda over (g-coefficients, lambda), constraints per vertex:
    g(v) >= 0, g(v) <= e(v), g(v) <= f(v), e(v)+f(v)-g(v) <= lambda.
    g <= 1 is implied by g <= e, so the optimal g is automatically an effect.
    """
    M = space.vertex_matrix()
    k = space.n_vertices
    zeros = np.zeros((k, 1))
    ones = np.ones((k, 1))
    A = np.vstack(
        [
            np.hstack([-M, zeros]),
            np.hstack([M, zeros]),
            np.hstack([M, zeros]),
            np.hstack([-M, -ones]),
        ]
    )
    rhs = np.concatenate([np.zeros(k), ev, fv, -(ev + fv)])
    objective = np.zeros(space.dimension + 2)
    objective[-1] = 1.0
    return LpProblem(objective, A, (LE,) * (4 * k), rhs)


def eq3_problem(space: StateSpace, e: Effect, f: Effect, lam: float = 1.0) -> LpProblem:
    """Feasibility system for a joint-measurability witness at fixed lambda."""
    ev = e.vertex_values(space)
    fv = f.vertex_values(space)
    M = space.vertex_matrix()
    k = space.n_vertices
    A = np.vstack([-M, M, M, -M])
    rhs = np.concatenate([np.zeros(k), ev, fv, lam - (ev + fv)])
    return LpProblem(np.zeros(space.dimension + 1), A, (LE,) * (4 * k), rhs)


def eq3_feasible(space: StateSpace, e: Effect, f: Effect,
                 tol: SolverTolerances | None = None, lam: float = 1.0) -> bool:
    """Does some effect g satisfy g <= e, g <= f, e + f <= g + lam*u?"""
    tol = tol if tol is not None else DEFAULT_TOLERANCES
    return check_feasible(eq3_problem(space, e, f, lam), tol)


def compute_lambda0(space: StateSpace, e: Effect, f: Effect,
                    tol: SolverTolerances | None = None) -> CompatReport:
    """Minimal lambda admitting a witness g, with the witness attached.

    The LP is always feasible (g = 0, lambda = 2) and bounded below by
    max_v max(e, f) >= 0, so any non-optimal status is a solver failure.
    """
    tol = tol if tol is not None else DEFAULT_TOLERANCES
    ev, fv = _validated_pair(space, e, f, tol)
    result = solve_lp(_lambda_problem(space, ev, fv), tol)
    if result.status is not LpStatus.OPTIMAL:
        raise SolverFailure(
            f"compatibility LP reported {result.status.value}, but it is feasible "
            "and bounded by construction"
        )
    lambda0 = max(0.0, float(result.value))
    witness = Effect(result.point[: space.dimension + 1])
    sigma = 0.0 if lambda0 <= 1.0 else 2.0 * (1.0 - 1.0 / lambda0)
    return CompatReport(
        lambda0=lambda0,
        sigma0=sigma,
        compatible=bool(lambda0 <= 1.0 + tol.eps_compat),
        witness=witness,
        lp_iterations=result.iterations,
        tolerances=tol,
    )


def is_compatible(space: StateSpace, e: Effect, f: Effect,
                  tol: SolverTolerances | None = None,
                  cross_check: bool = False) -> bool:
    """lambda0 <= 1 + eps_compat.

    With cross_check=True the verdict is compared against direct
    feasibility of the witness system at lambda = 1; a mismatch raises
    CrossCheckError (debug aid, off by default).
    """
    tol = tol if tol is not None else DEFAULT_TOLERANCES
    report = compute_lambda0(space, e, f, tol)
    if cross_check:
        feasible = eq3_feasible(space, e, f, tol, lam=1.0)
        if feasible != report.compatible:
            raise CrossCheckError(
                f"lambda0 = {report.lambda0!r} says compatible={report.compatible} "
                f"but the lambda=1 system is {'feasible' if feasible else 'infeasible'}"
            )
    return report.compatible


def sigma0(lambda0: float) -> float:
    """Least mixing noise restoring compatibility: max(0, 2*(1 - 1/lambda0)).

    Clamped at 0 for lambda0 < 1, where no noise is needed.
    """
    if lambda0 <= 0.0:
        raise ValueError(f"lambda0 must be positive, got {lambda0!r}")
    return max(0.0, 2.0 * (1.0 - 1.0 / lambda0))


def scale_effect(effect: Effect, factor: float) -> Effect:
    """Pointwise rescaling factor * effect; valid for factor in [0, 1]."""
    return Effect(effect.coefficients * factor)


def joint_observable_from_witness(
    space: StateSpace, e: Effect, f: Effect, g: Effect,
    tol: SolverTolerances | None = None,
) -> Observable:
    """Four-outcome observable {g, e-g, f-g, u-e-f+g} with margins e and f.

    g must satisfy g <= e, g <= f and e + f <= g + u on every vertex
    (within eps_feas); each of those inequalities is exactly the
    nonnegativity of one component.
    """
    tol = tol if tol is not None else DEFAULT_TOLERANCES
    ev, fv = _validated_pair(space, e, f, tol)
    effect_from_affine(space, g.coefficients, tol)
    gv = g.vertex_values(space)
    for label, residual in (
        ("g <= e", ev - gv),
        ("g <= f", fv - gv),
        ("e + f <= g + u", gv + 1.0 - (ev + fv)),
    ):
        worst = int(np.argmin(residual))
        if residual[worst] < -tol.eps_feas:
            raise ValueError(
                f"witness violates {label} at vertex "
                f"{space.vertices[worst].tolist()} (index {worst}) "
                f"by {-residual[worst]:.3g}"
            )
    ce, cf, cg = e.coefficients, f.coefficients, g.coefficients
    cu = unit_effect(space.dimension).coefficients
    components = (
        Effect(cg),
        Effect(ce - cg),
        Effect(cf - cg),
        Effect(cu - ce - cf + cg),
    )
    return Observable(outcomes=((1, 1), (1, 0), (0, 1), (0, 0)), effects=components)


def joint_observable(space: StateSpace, e: Effect, f: Effect,
                     tol: SolverTolerances | None = None
                     ) -> tuple[Observable, CompatReport]:
    """Construct a joint observable for a compatible pair.

    Uses the lambda0-optimal witness when lambda0 <= 1.  For pairs that are
    compatible only within eps_compat, a fresh witness is solved at
    lambda = 1, which absorbs solver noise on boundary pairs.  Raises
    IncompatibilityError when lambda0 > 1 + eps_compat.
    """
    tol = tol if tol is not None else DEFAULT_TOLERANCES
    report = compute_lambda0(space, e, f, tol)
    if not report.compatible:
        raise IncompatibilityError(
            f"effects are incompatible: lambda0 = {report.lambda0:.12g} > 1", report.lambda0
        )
    g = report.witness
    if report.lambda0 > 1.0:
        refreshed = solve_lp(eq3_problem(space, e, f, lam=1.0), tol)
        if refreshed.status is LpStatus.OPTIMAL:
            g = Effect(refreshed.point)
    return joint_observable_from_witness(space, e, f, g, tol), report


def scaling_kernel(k: float) -> MarkovKernel2x2:
    """Kernel shrinking the first outcome's effect to e/k; k = 1 is no noise.

    As k grows the smeared effect drifts to 0 and its complement to u.
    """
    if k < 1.0:
        raise ValueError(f"scaling parameter must be >= 1, got {k!r}")
    return MarkovKernel2x2(mu11=1.0 / k, mu12=0.0, mu21=1.0 - 1.0 / k, mu22=1.0)


def depolarizing_kernel(t: float) -> MarkovKernel2x2:
    """Doubly stochastic kernel mixing toward the trivial effect u/2.

    Smearing {e, u-e} with it yields t*e + (1-t)*u/2; t = 1 is no noise,
    t = 0 the fully mixed observable.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"depolarizing parameter must be in [0, 1], got {t!r}")
    return MarkovKernel2x2(
        mu11=(1.0 + t) / 2.0,
        mu12=(1.0 - t) / 2.0,
        mu21=(1.0 - t) / 2.0,
        mu22=(1.0 + t) / 2.0,
    )


def smear(obs: Observable, kernel: MarkovKernel2x2) -> Observable:
    """Noisy version of a two-outcome observable under a Markov kernel.

    Column stochasticity guarantees the result is again an observable.
    """
    if obs.n_outcomes != 2:
        raise ValueError(f"smearing needs a two-outcome observable, got {obs.n_outcomes}")
    ce = obs.effects[0].coefficients
    cp = obs.effects[1].coefficients
    return Observable(
        outcomes=obs.outcomes,
        effects=(
            Effect(kernel.mu11 * ce + kernel.mu12 * cp),
            Effect(kernel.mu21 * ce + kernel.mu22 * cp),
        ),
    )


def _scaled_pair(e: Effect, f: Effect, k: float) -> tuple[Effect, Effect]:
    kernel = scaling_kernel(k)
    return (
        smear(dichotomic_observable(e), kernel).effects[0],
        smear(dichotomic_observable(f), kernel).effects[0],
    )


def _depolarized_pair(e: Effect, f: Effect, t: float) -> tuple[Effect, Effect]:
    kernel = depolarizing_kernel(t)
    return (
        smear(dichotomic_observable(e), kernel).effects[0],
        smear(dichotomic_observable(f), kernel).effects[0],
    )


def min_scaling_noise(space: StateSpace, e: Effect, f: Effect,
                      tol: SolverTolerances | None = None,
                      verify: bool = True) -> float:
    """Least k >= 1 such that e/k and f/k are compatible; equals max(1, lambda0).

    With verify on (the default), the returned k is checked by solving the
    scaled pairs: compatible at k, incompatible at three sampled k' < k.
    The sub-k check is skipped for pairs within ~16*eps_compat of the
    boundary, where the scaled verdict is tolerance-dominated.
    """
    tol = tol if tol is not None else DEFAULT_TOLERANCES
    report = compute_lambda0(space, e, f, tol)
    k_star = max(1.0, report.lambda0)
    if verify and k_star > 1.0:
        if not compute_lambda0(space, *_scaled_pair(e, f, k_star), tol).compatible:
            raise CrossCheckError(
                f"effects scaled by 1/{k_star!r} should be compatible but are not"
            )
        if report.lambda0 > 1.0 + 16.0 * tol.eps_compat:
            for j in (1, 2, 3):
                kj = 1.0 + j * (k_star - 1.0) / 4.0
                if compute_lambda0(space, *_scaled_pair(e, f, kj), tol).compatible:
                    raise CrossCheckError(
                        f"effects scaled by 1/{kj!r} < 1/{k_star!r} should still be "
                        "incompatible but are not"
                    )
    return k_star


def min_depolarizing_noise(space: StateSpace, e: Effect, f: Effect,
                           tol: SolverTolerances | None = None,
                           bisection_steps: int = 60) -> float:
    """Largest t in [0, 1] with t*e + (1-t)*u/2 and t*f + (1-t)*u/2 compatible.

    Compatibility is monotone in t (any witness for t mixes into one for
    t' < t), so bisection over the LP verdict is sound; the answer is exact
    to 2**-bisection_steps.
    """
    tol = tol if tol is not None else DEFAULT_TOLERANCES
    if bisection_steps < 1:
        raise ValueError(f"bisection_steps must be >= 1, got {bisection_steps!r}")

    def compatible_at(t: float) -> bool:
        et, ft = _depolarized_pair(e, f, t)
        return compute_lambda0(space, et, ft, tol).compatible

    if compatible_at(1.0):
        return 1.0
    lo, hi = 0.0, 1.0  # the fully mixed pair (u/2, u/2) is always compatible
    for _ in range(bisection_steps):
        mid = 0.5 * (lo + hi)
        if compatible_at(mid):
            lo = mid
        else:
            hi = mid
    return lo


def random_effect(space: StateSpace, rng: np.random.Generator,
                  tol: SolverTolerances | None = None,
                  span_range: tuple[float, float] = (0.2, 1.0)) -> Effect:
    """Seeded random effect: uniform affine coefficients rescaled so the
    vertex values fill a random subinterval of [0, 1].

    All-constant draws are rejected (they carry no geometry); on a
    zero-dimensional space a random constant effect is returned instead.
    """
    tol = tol if tol is not None else DEFAULT_TOLERANCES
    d = space.dimension
    if d == 0:
        return Effect(np.array([rng.uniform(0.0, 1.0)]))
    M = space.vertex_matrix()
    for _ in range(100):
        c = rng.uniform(-1.0, 1.0, size=d + 1)
        values = M @ c
        lo, hi = float(values.min()), float(values.max())
        if hi - lo > 1e-6:
            break
    else:
        raise CrossCheckError("could not draw a non-constant affine functional")
    span = rng.uniform(*span_range)
    base = rng.uniform(0.0, 1.0 - span) if span < 1.0 else 0.0
    scale = span / (hi - lo)
    coeffs = c * scale
    coeffs[0] += base - lo * scale
    return effect_from_affine(space, coeffs, tol)
