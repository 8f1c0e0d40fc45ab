"""Equilibrium tests and classification for strategy pairs.

A pair is an equilibrium in the payoff sense when its expected payoff
is simultaneously a Pareto-maximal point of the row player's payoff
set and a Pareto-minimal point of the column player's.  The strong
variant additionally requires the whole intersection of the two payoff
sets to consist of such points, which reduces to a zero-valued LP.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError
from .game import (
    MixedStrategy,
    PayoffVector,
    Player,
    VectorPayoffGame,
    col_generator_matrix,
    enumerate_simplex_grid,
    expected_payoff,
    row_generator_matrix,
)
from .lp import LinearProgram, solve_lp
from .polyhedra import (
    OrientedPayoffPolyhedron,
    build_lower_set,
    build_upper_set,
    pareto_max_points,
    pareto_min_points,
    weak_pareto_points,
)
from .solver import (
    DECISION_TOL,
    improve_to_maximal,
    improve_to_minimal,
    maximality_lp,
    minimality_lp,
    scalarized_game_solve,
    ScalarizationWeight,
    StrategyFront,
)

# |a·v - b| below this marks a halfspace as active at the payoff point.
ACTIVE_TOL = 1e-7
# The strong test accepts when the separation LP value stays below this.
STRONG_TOL = 1e-7
# A summed normal counts as strictly positive when every component exceeds this.
POSITIVE_TOL = 1e-9


class Classification(enum.Enum):
    NONE = "none"
    SET_RELATION = "set_relation"
    SHAPLEY = "shapley"
    SET_SHAPLEY = "set_shapley"
    STRONG_SHAPLEY = "strong_shapley"
    STRONG_SET_SHAPLEY = "strong_set_shapley"


@dataclass(frozen=True)
class EquilibriumRecord:
    p: MixedStrategy
    q: MixedStrategy
    payoff: PayoffVector
    p_minimal: bool
    q_maximal: bool
    shapley: bool
    strong: bool
    classification: Classification


def _classification(p_min: bool, q_max: bool, shapley: bool, strong: bool) -> Classification:
    if p_min and q_max:
        if strong:
            return Classification.STRONG_SET_SHAPLEY
        if shapley:
            return Classification.SET_SHAPLEY
        return Classification.SET_RELATION
    if strong:
        return Classification.STRONG_SHAPLEY
    if shapley:
        return Classification.SHAPLEY
    return Classification.NONE


def _active_normal_sum(poly: OrientedPayoffPolyhedron, point: np.ndarray) -> np.ndarray | None:
    """Sum of facet normals active at the point, or None for interior points."""
    A = poly.normal_matrix()
    b = poly.offset_vector()
    residual = A @ point - b
    active = np.abs(residual) <= ACTIVE_TOL
    if not active.any():
        return None
    return A[active].sum(axis=0)


def is_max_point_of_row_set(
    game: VectorPayoffGame,
    p: MixedStrategy,
    q: MixedStrategy,
    *,
    row_set: OrientedPayoffPolyhedron | None = None,
) -> bool:
    """Whether the pair's payoff is Pareto-maximal in the row payoff set."""
    v = expected_payoff(game, p, q).as_array()
    poly = row_set if row_set is not None else build_lower_set(row_generator_matrix(game, p))
    total = _active_normal_sum(poly, v)
    return total is not None and bool(np.all(total > POSITIVE_TOL))


def is_min_point_of_col_set(
    game: VectorPayoffGame,
    p: MixedStrategy,
    q: MixedStrategy,
    *,
    col_set: OrientedPayoffPolyhedron | None = None,
) -> bool:
    """Whether the pair's payoff is Pareto-minimal in the column payoff set."""
    v = expected_payoff(game, p, q).as_array()
    poly = col_set if col_set is not None else build_upper_set(col_generator_matrix(game, q))
    total = _active_normal_sum(poly, v)
    return total is not None and bool(np.all(total > POSITIVE_TOL))


def is_shapley_equilibrium(game: VectorPayoffGame, p: MixedStrategy, q: MixedStrategy) -> bool:
    return is_max_point_of_row_set(game, p, q) and is_min_point_of_col_set(game, p, q)


def _strong_lp_value(
    game: VectorPayoffGame,
    p: MixedStrategy,
    q: MixedStrategy,
    row_set: OrientedPayoffPolyhedron | None = None,
    col_set: OrientedPayoffPolyhedron | None = None,
) -> float:
    """Largest total downward shift from a point of V_I(p) landing in V_II(q).

    Zero means the intersection contains no improvable point.
    """
    vi = row_set if row_set is not None else build_lower_set(row_generator_matrix(game, p))
    vii = col_set if col_set is not None else build_upper_set(col_generator_matrix(game, q))
    k = game.dim
    rows: list[np.ndarray] = []
    relations: list[str] = []
    rhs: list[float] = []
    for h in vi.halfspaces:  # y stays in the row payoff set
        rows.append(np.concatenate([h.normal, np.zeros(k)]))
        relations.append("<=")
        rhs.append(h.offset)
    for h in vii.halfspaces:  # y - t stays in the column payoff set
        a = np.asarray(h.normal)
        rows.append(np.concatenate([a, -a]))
        relations.append(">=")
        rhs.append(h.offset)
    lp = LinearProgram(
        objective=np.concatenate([np.zeros(k), np.ones(k)]),
        lhs=np.array(rows),
        relations=tuple(relations),
        rhs=np.array(rhs),
        sense="max",
        bounds=((None, None),) * k + ((0.0, None),) * k,
    )
    out = solve_lp(lp)
    if out.status != "optimal":
        raise NumericalError(f"strong-equilibrium LP ended with status {out.status}")
    return float(out.objective_value)


def is_strong_shapley(game: VectorPayoffGame, p: MixedStrategy, q: MixedStrategy) -> bool:
    if not is_shapley_equilibrium(game, p, q):
        return False
    return _strong_lp_value(game, p, q) <= STRONG_TOL


def classify_pair(
    game: VectorPayoffGame, p: MixedStrategy, q: MixedStrategy, *, tol: float = DECISION_TOL
) -> EquilibriumRecord:
    """Full classification of one pair, running the optimality LPs."""
    p_min = minimality_lp(game, p, tol=tol).is_minimal
    q_max = maximality_lp(game, q, tol=tol).is_minimal
    vi = build_lower_set(row_generator_matrix(game, p))
    vii = build_upper_set(col_generator_matrix(game, q))
    shapley = is_max_point_of_row_set(game, p, q, row_set=vi) and is_min_point_of_col_set(
        game, p, q, col_set=vii
    )
    strong = shapley and _strong_lp_value(game, p, q, vi, vii) <= STRONG_TOL
    return EquilibriumRecord(
        p=p,
        q=q,
        payoff=expected_payoff(game, p, q),
        p_minimal=p_min,
        q_maximal=q_max,
        shapley=shapley,
        strong=strong,
        classification=_classification(p_min, q_max, shapley, strong),
    )


def classify_pairs(
    game: VectorPayoffGame, front_row: StrategyFront, front_col: StrategyFront
) -> list[EquilibriumRecord]:
    """One record per pair of grid-optimal strategies, in grid order.

    Optimality flags are taken from the fronts' certificates, so every
    record here has p_minimal and q_maximal set.
    """
    if front_row.player is not Player.ROW or front_col.player is not Player.COL:
        raise InputError("expected a row front and a column front, in that order")
    minimal = [c.tested_strategy for c in front_row.certificates if c.is_minimal]
    maximal = [c.tested_strategy for c in front_col.certificates if c.is_minimal]
    row_sets = [build_lower_set(row_generator_matrix(game, p)) for p in minimal]
    col_sets = [build_upper_set(col_generator_matrix(game, q)) for q in maximal]
    records = []
    for p, vi in zip(minimal, row_sets):
        for q, vii in zip(maximal, col_sets):
            shapley = is_max_point_of_row_set(game, p, q, row_set=vi) and (
                is_min_point_of_col_set(game, p, q, col_set=vii)
            )
            strong = shapley and _strong_lp_value(game, p, q, vi, vii) <= STRONG_TOL
            records.append(
                EquilibriumRecord(
                    p=p,
                    q=q,
                    payoff=expected_payoff(game, p, q),
                    p_minimal=True,
                    q_maximal=True,
                    shapley=shapley,
                    strong=strong,
                    classification=_classification(True, True, shapley, strong),
                )
            )
    return records


def vector_minimax_diagnostic(
    game: VectorPayoffGame,
    player: Player,
    step,
    mode: str = "weak",
    opponent_step=None,
) -> list[MixedStrategy]:
    """Grid approximation of the minimax (maximin) strategy set.

    Per own-grid strategy the opponent-grid payoff samples are filtered
    to their weak or strict Pareto frontier; a strategy is reported when
    one of its samples coincides with a strict Pareto point of the union
    of all frontiers.  Accurate only up to both grid resolutions.
    """
    mode_l = mode.lower()
    if mode_l not in ("weak", "strong"):
        raise InputError("mode must be 'weak' or 'strong'")
    own_dim = game.rows if player is Player.ROW else game.cols
    opp_dim = game.cols if player is Player.ROW else game.rows
    own_grid = enumerate_simplex_grid(own_dim, step, owner=player)
    opp_grid = enumerate_simplex_grid(
        opp_dim, opponent_step if opponent_step is not None else step, owner=player.opponent
    )
    opp_matrix = np.array([o.weights for o in opp_grid.points])  # (num_opp, dim_opp)

    sample_sets: list[np.ndarray] = []
    for s in own_grid.points:
        if player is Player.ROW:
            gen = row_generator_matrix(game, s)  # (n, K)
        else:
            gen = col_generator_matrix(game, s)  # (m, K)
        sample_sets.append(opp_matrix @ gen)  # (num_opp, K)

    inner_sense = "max" if player is Player.ROW else "min"
    filtered = []
    for samples in sample_sets:
        if mode_l == "weak":
            filtered.append(weak_pareto_points(samples, inner_sense))
        elif player is Player.ROW:
            filtered.append(pareto_max_points(samples))
        else:
            filtered.append(pareto_min_points(samples))
    union = np.vstack(filtered)
    outer = pareto_min_points(union) if player is Player.ROW else pareto_max_points(union)

    chosen = []
    for s, samples in zip(own_grid.points, sample_sets):
        hits = np.abs(samples[:, None, :] - outer[None, :, :]).max(axis=2) <= 1e-9
        if hits.any():
            chosen.append(s)
    return chosen


@dataclass(frozen=True)
class SeedResult:
    row_strategy: MixedStrategy
    col_strategy: MixedStrategy
    verified: bool


def find_strong_seed(game: VectorPayoffGame) -> SeedResult:
    """Equilibrium pair obtained from the all-ones scalarization.

    The scalar-game saddle point is driven to a minimal/maximal pair by
    the improvement iteration; such a pair always admits the strong
    property, and `verified` records that the numerical test agreed.
    """
    weight = ScalarizationWeight((1.0,) * game.dim)
    p_hat = scalarized_game_solve(game, weight, Player.ROW)
    q_hat = scalarized_game_solve(game, weight, Player.COL)
    imp_p = improve_to_minimal(game, p_hat)
    imp_q = improve_to_maximal(game, q_hat)
    verified = (
        imp_p.converged
        and imp_q.converged
        and is_strong_shapley(game, imp_p.strategy, imp_q.strategy)
    )
    return SeedResult(imp_p.strategy, imp_q.strategy, verified)
