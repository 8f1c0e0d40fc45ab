"""Shared property-suite drivers.

The module tests exercise these on small sample counts; the acceptance
gate reruns them at full size.  Reference answers come from scipy's
HiGHS solver so the package's own simplex code is never its own oracle.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from vecgame.equilibria import Classification, EquilibriumRecord
from vecgame.game import (
    MixedStrategy,
    Player,
    VectorPayoffGame,
    enumerate_simplex_grid,
    row_generator_matrix,
)
from vecgame.lp import LinearProgram, solve_lp
from vecgame.polyhedra import (
    LOWER,
    build_lower_set,
    build_upper_set,
    contains_point,
    poly_subset,
)
from vecgame.solver import ScalarizationWeight, minimality_lp, scalarized_game_solve


def random_game(rng: np.random.Generator, rows: int, cols: int, dim: int,
                lo: int = -5, hi: int = 5) -> VectorPayoffGame:
    entries = rng.integers(lo, hi + 1, size=(rows, cols, dim)).astype(float)
    return VectorPayoffGame(entries)


def optimal_weight_set(front) -> set[tuple[float, ...]]:
    """Weights of every grid strategy the front certifies optimal."""
    return {c.tested_strategy.weights for c in front.certificates if c.is_minimal}


def weights_close(a, b, tol: float = 1e-9) -> bool:
    return len(a) == len(b) and max(abs(x - y) for x, y in zip(a, b)) <= tol


def random_mixed(rng: np.random.Generator, size: int, owner: Player) -> MixedStrategy:
    return MixedStrategy.cleaned(rng.random(size) + 1e-3, owner=owner)


def scalar_game_value(matrix: np.ndarray) -> float:
    """Minimax value of a scalar matrix game (row player minimizes), by HiGHS."""
    m, n = matrix.shape
    c = np.zeros(m + 1)
    c[m] = 1.0
    a_ub = np.hstack([matrix.T, -np.ones((n, 1))])
    a_eq = np.zeros((1, m + 1))
    a_eq[0, :m] = 1.0
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=np.zeros(n),
        A_eq=a_eq,
        b_eq=[1.0],
        bounds=[(0, None)] * m + [(None, None)],
        method="highs",
    )
    assert res.status == 0, f"reference scalar LP failed: {res.message}"
    return float(res.fun)


def check_k1_reduction(rng: np.random.Generator, games: int) -> None:
    """K=1 games: minimality of a strategy is equivalent to scalar optimality.

    In one dimension the lower payoff set is the ray (-inf, max_j y_j(p)],
    so inclusion-minimality collapses to the classic minimax criterion.
    """
    for _ in range(games):
        m = int(rng.integers(2, 5))
        n = int(rng.integers(2, 5))
        game = random_game(rng, m, n, 1)
        value = scalar_game_value(game.entries[:, :, 0])

        best = scalarized_game_solve(game, ScalarizationWeight((1.0,)), Player.ROW)
        guarantee = float(row_generator_matrix(game, best).max())
        assert abs(guarantee - value) <= 1e-6, (
            f"scalarized solve guarantees {guarantee}, scalar value is {value}"
        )

        for p in list(enumerate_simplex_grid(m, "1/2"))[:6]:
            worst = float(row_generator_matrix(game, p).max())
            minimal = minimality_lp(game, p).is_minimal
            optimal = worst <= value + 1e-7
            assert minimal == optimal, (
                f"K=1 mismatch: p={p.weights} worst={worst} value={value} "
                f"minimal={minimal}"
            )


def _oracle_margin(points: np.ndarray, y: np.ndarray, orientation: str) -> float:
    """Signed depth of y inside the oriented hull, by an independent LP.

    Positive means inside with clearance, negative means outside; the
    magnitude is the largest uniform shift keeping/putting y in the set.
    """
    k = points.shape[1]
    nv = points.shape[0]
    sign = 1.0 if orientation == LOWER else -1.0
    # vars (lambda, s): maximize s  s.t.  sign*(P^T lam - y) >= s*e, sum lam = 1
    c = np.zeros(nv + 1)
    c[nv] = -1.0
    a_ub = np.hstack([-sign * points.T, np.ones((k, 1))])
    b_ub = -sign * y
    a_eq = np.zeros((1, nv + 1))
    a_eq[0, :nv] = 1.0
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=[1.0],
        bounds=[(0, None)] * nv + [(None, None)],
        method="highs",
    )
    assert res.status == 0, f"membership oracle LP failed: {res.message}"
    return float(-res.fun)


def check_dd_membership(rng: np.random.Generator, instances: int, queries: int) -> None:
    """contains_point agrees with a convex-combination LP oracle."""
    for _ in range(instances):
        k = int(rng.integers(1, 4))
        npts = int(rng.integers(2, 7))
        points = rng.integers(-5, 6, size=(npts, k)).astype(float)
        lower = bool(rng.integers(0, 2))
        poly = build_lower_set(points) if lower else build_upper_set(points)
        lo = points.min(axis=0) - 2.0
        hi = points.max(axis=0) + 2.0
        for _ in range(queries):
            y = lo + (hi - lo) * rng.random(k)
            margin = _oracle_margin(points, y, poly.orientation)
            if abs(margin) <= 1e-7:
                continue  # query too close to the boundary to be decisive
            assert contains_point(poly, y) == (margin > 0), (
                f"membership mismatch at {y} (oracle margin {margin})"
            )


def check_lp_duality(rng: np.random.Generator, count: int) -> None:
    """Primal optimum equals the independently assembled dual optimum."""
    for _ in range(count):
        m = int(rng.integers(2, 5))
        n = int(rng.integers(2, 5))
        a = rng.integers(-4, 5, size=(m, n)).astype(float)
        x0 = rng.random(n) * 2.0
        y0 = rng.random(m) * 2.0
        b = a @ x0 - rng.random(m)  # primal strictly feasible at x0
        c = a.T @ y0 + rng.random(n)  # dual strictly feasible at y0

        primal = solve_lp(
            LinearProgram(
                objective=c,
                lhs=a,
                relations=(">=",) * m,
                rhs=b,
                sense="min",
            )
        )
        dual = solve_lp(
            LinearProgram(
                objective=b,
                lhs=a.T,
                relations=("<=",) * n,
                rhs=c,
                sense="max",
            )
        )
        assert primal.status == "optimal" and dual.status == "optimal"
        gap = abs(primal.objective_value - dual.objective_value)
        assert gap <= 1e-7 * (1.0 + abs(primal.objective_value)), (
            f"duality gap {gap} (primal {primal.objective_value}, "
            f"dual {dual.objective_value})"
        )


def check_set_relation_monotonicity(rng: np.random.Generator, games: int) -> None:
    """Componentwise-worse column payoffs imply payoff-set inclusion.

    Append a row dominated by an existing one; moving probability mass
    onto it can only pull every column payoff down, and the lower payoff
    set must then be contained in the original.
    """
    for _ in range(games):
        m = int(rng.integers(2, 4))
        n = int(rng.integers(2, 4))
        k = int(rng.integers(1, 4))
        game = random_game(rng, m, n, k)
        i0 = int(rng.integers(0, m))
        delta = rng.random((n, k)) * 2.0
        extra = game.entries[i0] - delta  # dominated row: worse in every column
        bigger = VectorPayoffGame(np.concatenate([game.entries, extra[None]], axis=0))

        p = random_mixed(rng, m, Player.ROW)
        alpha = float(rng.random())
        w = list(p.weights) + [0.0]
        moved = w.copy()
        moved[m] = alpha * w[i0]
        moved[i0] = (1.0 - alpha) * w[i0]
        p_ext = MixedStrategy.cleaned(w, owner=Player.ROW)
        p_prime = MixedStrategy.cleaned(moved, owner=Player.ROW)

        before = row_generator_matrix(bigger, p_ext)
        after = row_generator_matrix(bigger, p_prime)
        assert np.all(after <= before + 1e-9), "construction must lower every column"

        inner = build_lower_set(after)
        outer = build_lower_set(before)
        assert poly_subset(inner, outer, tol=1e-7), (
            f"monotonicity violated for p={p.weights}, row {i0}, alpha={alpha}"
        )


def assert_hierarchy(record: EquilibriumRecord) -> None:
    """Flag/classification consistency for one classified pair."""
    c = record.classification
    if record.strong:
        assert record.shapley, f"strong pair not Shapley: {record}"
    both = record.p_minimal and record.q_maximal
    expected = {
        (True, True, True): Classification.STRONG_SET_SHAPLEY,
        (True, True, False): Classification.SET_SHAPLEY,
        (True, False, False): Classification.SET_RELATION,
        (False, True, True): Classification.STRONG_SHAPLEY,
        (False, True, False): Classification.SHAPLEY,
        (False, False, False): Classification.NONE,
    }[(both, record.shapley, record.strong)]
    assert c is expected, (
        f"classification {c} does not match flags p_min={record.p_minimal} "
        f"q_max={record.q_maximal} shapley={record.shapley} strong={record.strong}"
    )
