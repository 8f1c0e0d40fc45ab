"""Command line front end.

Commands operate on a game stored as JSON and write deterministic
reports: identical configuration and input produce byte-identical
output.  All reals are printed with 17 significant digits, every grid
or vertex list keeps a fixed order, and each report embeds the version
and the semantic part of its configuration (worker count and output
destination never change results, so they are not embedded).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from dataclasses import dataclass
from fractions import Fraction

from .equilibria import (
    Classification,
    classify_pair,
    classify_pairs,
)
from .errors import InputError, NumericalError
from .game import (
    MixedStrategy,
    Player,
    VectorPayoffGame,
    componentwise_security_point,
    expected_payoff,
)
from .polyhedra import build_lower_set, build_upper_set
from .game import col_generator_matrix, row_generator_matrix
from .poss import compute_security_image, poss_strategies, verify_gap
from .solver import StrategyFront, classify_grid, maximality_lp, minimality_lp

from . import __version__ as VERSION

CLASSIFICATION_PHRASES = {
    Classification.STRONG_SET_SHAPLEY: "strong set Shapley equilibrium",
    Classification.SET_SHAPLEY: "set Shapley equilibrium",
    Classification.STRONG_SHAPLEY: "strong Shapley equilibrium",
    Classification.SHAPLEY: "Shapley equilibrium",
    Classification.SET_RELATION: "set relation equilibrium",
    Classification.NONE: "no equilibrium property",
}


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    step_row: Fraction | None = None
    step_col: Fraction | None = None
    tol: float = 1e-7
    prefilter: bool = False
    fmt: str = "json"
    workers: int | None = None
    output: str | None = None
    player: str | None = None
    strategy: str | None = None
    pair: str | None = None
    rows: int = 3
    cols: int = 3
    dim: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tol <= 0:
            raise InputError("tol must be positive")

    def embedded(self) -> dict:
        out = {"command": self.command}
        if self.input is not None:
            out["input"] = self.input
        if self.step_row is not None:
            out["step_row"] = str(self.step_row)
        if self.step_col is not None:
            out["step_col"] = str(self.step_col)
        out["tol"] = self.tol
        out["prefilter"] = self.prefilter
        out["format"] = self.fmt
        if self.command == "random":
            out.update(rows=self.rows, cols=self.cols, dim=self.dim, seed=self.seed)
        if self.player is not None:
            out["player"] = self.player
        if self.strategy is not None:
            out["strategy"] = self.strategy
        if self.pair is not None:
            out["pair"] = self.pair
        return out


def _emit(value, pieces: list[str]) -> None:
    """Minimal JSON writer with a fixed float format (17 significant digits)."""
    if value is None or (isinstance(value, float) and value != value):
        pieces.append("null")
    elif isinstance(value, bool):
        pieces.append("true" if value else "false")
    elif isinstance(value, float):
        if value in (float("inf"), float("-inf")):
            pieces.append("null")
        else:
            pieces.append(format(value, ".17g"))
    elif isinstance(value, int):
        pieces.append(str(value))
    elif isinstance(value, str):
        pieces.append(json.dumps(value))
    elif isinstance(value, dict):
        pieces.append("{")
        for idx, (key, item) in enumerate(value.items()):
            if idx:
                pieces.append(",")
            pieces.append(json.dumps(str(key)))
            pieces.append(":")
            _emit(item, pieces)
        pieces.append("}")
    elif isinstance(value, (list, tuple)):
        pieces.append("[")
        for idx, item in enumerate(value):
            if idx:
                pieces.append(",")
            _emit(item, pieces)
        pieces.append("]")
    else:
        raise InputError(f"cannot serialize {type(value).__name__}")


def render_json(value) -> str:
    pieces: list[str] = []
    _emit(value, pieces)
    return "".join(pieces) + "\n"


def _rational(x: float) -> str:
    f = Fraction(x).limit_denominator(1000)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _strategy_dict(s: MixedStrategy) -> dict:
    return {
        "player": s.owner.value,
        "weights": [float(w) for w in s.weights],
        "rational": [_rational(w) for w in s.weights],
    }


def _parse_weights(text: str, owner: Player) -> MixedStrategy:
    try:
        weights = [float(Fraction(part.strip())) for part in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse strategy {text!r}: {exc}") from exc
    return MixedStrategy(tuple(weights), owner=owner)


def _parse_step(text: str) -> Fraction:
    try:
        step = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse step {text!r}: {exc}") from exc
    if step <= 0:
        raise InputError("step must be positive")
    return step


def load_game(path: str) -> VectorPayoffGame:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc
    try:
        payoffs = data["payoffs"]
        rows, cols, dim = int(data["rows"]), int(data["cols"]), int(data["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"game file {path} needs rows, cols, dim, payoffs: {exc}") from exc
    game = VectorPayoffGame.from_rows(payoffs)
    if (game.rows, game.cols, game.dim) != (rows, cols, dim):
        raise InputError(
            f"payoff array is {game.rows}x{game.cols}x{game.dim}, "
            f"header says {rows}x{cols}x{dim}"
        )
    return game


def game_dict(game: VectorPayoffGame) -> dict:
    return {
        "rows": game.rows,
        "cols": game.cols,
        "dim": game.dim,
        "payoffs": game.entries.tolist(),
    }


def _front_dict(front: StrategyFront) -> dict:
    certificates = []
    for cert in front.certificates:
        improving = cert.improving_strategy
        certificates.append(
            {
                "weights": list(cert.tested_strategy.weights),
                "rational": [_rational(w) for w in cert.tested_strategy.weights],
                "lp_value": cert.lp_value,
                "minimal": cert.is_minimal,
                "prefiltered": cert.prefiltered,
                "improving": list(improving.weights) if improving is not None else None,
            }
        )
    return {
        "player": front.player.value,
        "step": str(front.grid.step),
        "certificates": certificates,
        "optimal": [_strategy_dict(s) for s in front.minimal_or_maximal],
        "equivalence_classes": [list(c) for c in front.equivalence_classes],
    }


def _record_dict(record) -> dict:
    return {
        "p": _strategy_dict(record.p),
        "q": _strategy_dict(record.q),
        "payoff": list(record.payoff.value),
        "p_minimal": record.p_minimal,
        "q_maximal": record.q_maximal,
        "shapley": record.shapley,
        "strong": record.strong,
        "classification": record.classification.value,
    }


def _report(config: RunConfig, body: dict) -> dict:
    return {"version": VERSION, "config": config.embedded(), **body}


def _fronts(game: VectorPayoffGame, config: RunConfig):
    step_row = config.step_row if config.step_row is not None else Fraction(1, 10)
    step_col = config.step_col if config.step_col is not None else step_row
    kwargs = {"tol": config.tol, "workers": config.workers}
    front_row = classify_grid(
        game, Player.ROW, step_row, use_prefilter=config.prefilter, **kwargs
    )
    front_col = classify_grid(
        game, Player.COL, step_col, use_prefilter=config.prefilter, **kwargs
    )
    return front_row, front_col


def _cmd_solve(config: RunConfig) -> str:
    game = load_game(config.input)
    front_row, front_col = _fronts(game, config)
    if config.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["player", "strategy", "rational", "optimal", "lp_value"])
        for front in (front_row, front_col):
            for cert in front.certificates:
                writer.writerow(
                    [
                        front.player.value,
                        " ".join(format(w, ".17g") for w in cert.tested_strategy.weights),
                        " ".join(_rational(w) for w in cert.tested_strategy.weights),
                        str(cert.is_minimal).lower(),
                        "" if cert.prefiltered else format(cert.lp_value, ".17g"),
                    ]
                )
        return buf.getvalue()
    if config.fmt == "table":
        lines = []
        for front in (front_row, front_col):
            kind = "minimal" if front.player is Player.ROW else "maximal"
            lines.append(f"player {front.player.value}: {kind} strategies (step {front.grid.step})")
            for s in front.minimal_or_maximal:
                lines.append("  (" + ", ".join(_rational(w) for w in s.weights) + ")")
        return "\n".join(lines) + "\n"
    report = _report(
        config,
        {
            "game": game_dict(game),
            "fronts": {"row": _front_dict(front_row), "col": _front_dict(front_col)},
        },
    )
    return render_json(report)


def _cmd_equilibria(config: RunConfig) -> str:
    game = load_game(config.input)
    front_row, front_col = _fronts(game, config)
    records = classify_pairs(game, front_row, front_col)
    if config.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["p", "q", "type"])
        for record in records:
            if record.classification in (
                Classification.SET_SHAPLEY,
                Classification.STRONG_SET_SHAPLEY,
            ):
                writer.writerow(
                    [
                        "(" + ", ".join(_rational(w) for w in record.p.weights) + ")",
                        "(" + ", ".join(_rational(w) for w in record.q.weights) + ")",
                        "strong" if record.strong else "not strong",
                    ]
                )
        return buf.getvalue()
    if config.fmt == "table":
        lines = [f"{'p':30} {'q':30} classification"]
        for record in records:
            lines.append(
                f"{'(' + ', '.join(_rational(w) for w in record.p.weights) + ')':30} "
                f"{'(' + ', '.join(_rational(w) for w in record.q.weights) + ')':30} "
                f"{CLASSIFICATION_PHRASES[record.classification]}"
            )
        return "\n".join(lines) + "\n"
    report = _report(
        config,
        {
            "game": game_dict(game),
            "fronts": {"row": _front_dict(front_row), "col": _front_dict(front_col)},
            "pairs": [_record_dict(r) for r in records],
        },
    )
    return render_json(report)


def _gap_dict(report) -> dict:
    return {
        "player": report.player.value,
        "eps": report.eps,
        "checked": len(report.checked),
        "violations": [
            {"strategy": _strategy_dict(s), "component": k} for s, k in report.violations
        ],
        "ok": report.ok,
    }


def _cmd_poss(config: RunConfig) -> str:
    game = load_game(config.input)
    image_row = compute_security_image(game, Player.ROW)
    image_col = compute_security_image(game, Player.COL)
    front_row, front_col = _fronts(game, config)
    step_row = config.step_row if config.step_row is not None else Fraction(1, 10)
    step_col = config.step_col if config.step_col is not None else step_row
    poss_row = poss_strategies(game, Player.ROW, step_row, image=image_row)
    poss_col = poss_strategies(game, Player.COL, step_col, image=image_col)
    gap_row = verify_gap(game, front_row, image_row)
    gap_col = verify_gap(game, front_col, image_col)
    report = _report(
        config,
        {
            "game": game_dict(game),
            "images": {"row": image_row.to_dict(), "col": image_col.to_dict()},
            "poss_strategies": {
                "row": [_strategy_dict(s) for s in poss_row],
                "col": [_strategy_dict(s) for s in poss_col],
            },
            "gap": {"row": _gap_dict(gap_row), "col": _gap_dict(gap_col)},
        },
    )
    return render_json(report)


def _cmd_check(config: RunConfig) -> str:
    game = load_game(config.input)
    if config.pair is not None:
        halves = config.pair.split(";")
        if len(halves) != 2:
            raise InputError("--pair expects 'p1,p2,...;q1,q2,...'")
        p = _parse_weights(halves[0], Player.ROW)
        q = _parse_weights(halves[1], Player.COL)
        record = classify_pair(game, p, q, tol=config.tol)
        phrase = CLASSIFICATION_PHRASES[record.classification]
        if config.fmt == "table":
            return (
                f"pair p=({', '.join(_rational(w) for w in p.weights)}) "
                f"q=({', '.join(_rational(w) for w in q.weights)}): {phrase}\n"
                f"  payoff: ({', '.join(format(v, '.17g') for v in record.payoff.value)})\n"
                f"  p minimal: {record.p_minimal}  q maximal: {record.q_maximal}\n"
                f"  Shapley: {record.shapley}  strong: {record.strong}\n"
            )
        return render_json(
            _report(config, {"pair": _record_dict(record), "phrase": phrase})
        )
    if config.strategy is None:
        raise InputError("check needs --strategy or --pair")
    owner = Player.ROW if (config.player or "row") == "row" else Player.COL
    strategy = _parse_weights(config.strategy, owner)
    if owner is Player.ROW:
        cert = minimality_lp(game, strategy, tol=config.tol)
        kind = "minimal"
    else:
        cert = maximality_lp(game, strategy, tol=config.tol)
        kind = "maximal"
    if config.fmt == "table":
        verdict = kind if cert.is_minimal else f"not {kind}"
        lines = [
            f"strategy ({', '.join(_rational(w) for w in strategy.weights)}) "
            f"for player {owner.value}: {verdict} (lp value {format(cert.lp_value, '.17g')})"
        ]
        if cert.improving_strategy is not None:
            lines.append(
                "  improving strategy: ("
                + ", ".join(_rational(w) for w in cert.improving_strategy.weights)
                + ")"
            )
        return "\n".join(lines) + "\n"
    return render_json(
        _report(
            config,
            {
                "certificate": {
                    "strategy": _strategy_dict(strategy),
                    "kind": kind,
                    "optimal": cert.is_minimal,
                    "lp_value": cert.lp_value,
                    "improving": None
                    if cert.improving_strategy is None
                    else _strategy_dict(cert.improving_strategy),
                }
            },
        )
    )


def _cmd_plot(config: RunConfig) -> str:
    game = load_game(config.input)
    if game.dim != 2:
        raise InputError("plot geometry is only available for two payoff components")
    shapes = []
    if config.strategy is not None and (config.player or "row") == "row":
        p = _parse_weights(config.strategy, Player.ROW)
        poly = build_lower_set(row_generator_matrix(game, p))
        shapes.append(("V_I(p)", poly))
    if config.pair is not None:
        halves = config.pair.split(";")
        if len(halves) != 2:
            raise InputError("--pair expects 'p1,p2,...;q1,q2,...'")
        p = _parse_weights(halves[0], Player.ROW)
        q = _parse_weights(halves[1], Player.COL)
        shapes.append(("V_I(p)", build_lower_set(row_generator_matrix(game, p))))
        shapes.append(("V_II(q)", build_upper_set(col_generator_matrix(game, q))))
    elif config.strategy is not None and config.player == "col":
        q = _parse_weights(config.strategy, Player.COL)
        shapes.append(("V_II(q)", build_upper_set(col_generator_matrix(game, q))))
    image_row = compute_security_image(game, Player.ROW)
    image_col = compute_security_image(game, Player.COL)
    geometry = [
        {
            "label": label,
            "orientation": poly.orientation,
            "vertices": [list(v) for v in poly.vertices],
        }
        for label, poly in shapes
    ]
    geometry.append(
        {
            "label": "W_I",
            "orientation": image_row.orientation,
            "vertices": [list(v) for v in image_row.vertices],
        }
    )
    geometry.append(
        {
            "label": "W_II",
            "orientation": image_col.orientation,
            "vertices": [list(v) for v in image_col.vertices],
        }
    )
    return render_json(geometry)


def _cmd_random(config: RunConfig) -> str:
    if min(config.rows, config.cols, config.dim) < 1:
        raise InputError("rows, cols and dim must be at least 1")
    rng = random.Random(config.seed)
    payoffs = [
        [[rng.randint(-10, 10) for _ in range(config.dim)] for _ in range(config.cols)]
        for _ in range(config.rows)
    ]
    return render_json(
        {
            "rows": config.rows,
            "cols": config.cols,
            "dim": config.dim,
            "seed": config.seed,
            "payoffs": payoffs,
        }
    )


COMMANDS = {
    "solve": _cmd_solve,
    "equilibria": _cmd_equilibria,
    "poss": _cmd_poss,
    "check": _cmd_check,
    "plot": _cmd_plot,
    "random": _cmd_random,
}


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    try:
        text = COMMANDS[config.command](config)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vecgame",
        description="Vector-payoff matrix game solver",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, game_input=True):
        if game_input:
            p.add_argument("--input", "-i", required=True, help="game JSON file")
        p.add_argument("--format", dest="fmt", choices=("json", "csv", "table"), default="json")
        p.add_argument("--output", "-o", default=None, help="write report here instead of stdout")
        p.add_argument("--tol", type=float, default=1e-7)

    for name in ("solve", "equilibria", "poss"):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--step-row", default="1/10", help="grid step for player I, a fraction 1/N")
        p.add_argument("--step-col", default=None, help="grid step for player II (default: step-row)")
        p.add_argument("--prefilter", action="store_true", help="skip strategies cut by the image test")
        p.add_argument("--workers", type=int, default=os.cpu_count(), help="parallel processes")

    p = sub.add_parser("check")
    common(p)
    p.add_argument("--player", choices=("row", "col"), default="row")
    p.add_argument("--strategy", default=None, help="comma-separated weights, fractions allowed")
    p.add_argument("--pair", default=None, help="'p1,p2,...;q1,q2,...'")

    p = sub.add_parser("plot")
    common(p)
    p.add_argument("--player", choices=("row", "col"), default="row")
    p.add_argument("--strategy", default=None)
    p.add_argument("--pair", default=None)

    p = sub.add_parser("random")
    common(p, game_input=False)
    p.add_argument("--rows", type=int, default=3)
    p.add_argument("--cols", type=int, default=3)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(command=args.command, fmt=args.fmt, tol=args.tol, output=args.output)
    config.input = getattr(args, "input", None)
    if hasattr(args, "step_row"):
        config.step_row = _parse_step(args.step_row)
        config.step_col = (
            _parse_step(args.step_col) if args.step_col is not None else config.step_row
        )
        config.prefilter = args.prefilter
        config.workers = args.workers
    for name in ("player", "strategy", "pair", "rows", "cols", "dim", "seed"):
        if hasattr(args, name):
            setattr(config, name, getattr(args, name))
    return config


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
