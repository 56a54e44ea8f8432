"""Finite normal-form games, mixed profiles and payoff evaluation.

Pure profiles of the opponents of player ``i`` are enumerated
lexicographically by ascending player index, each player's strategies in
index order. This is the column order of :func:`reduced_matrix` and the
nesting order of the payoff arrays in the JSON game format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Sequence

import numpy as np

from .exceptions import InvalidInputError

SUM_TOL = 1e-12
INTERIOR_EPS = 1e-10
REL_TOL = 1e-9
ABS_FLOOR = 1e-12


class Game:
    """An n-player finite game given by one payoff tensor per player.

    ``payoffs[i][j_1, ..., j_n]`` is the payoff to player ``i`` when player
    ``k`` plays pure strategy ``j_k``. Symmetric games are two-player games
    built from one matrix; dynamics on them default to a single population.
    """

    def __init__(self, payoffs: Sequence[np.ndarray], symmetric: bool = False):
        tensors = [np.array(p, dtype=float) for p in payoffs]
        if not tensors:
            raise InvalidInputError("a game needs at least one player")
        shape = tensors[0].shape
        if len(shape) != len(tensors):
            raise InvalidInputError(
                f"{len(tensors)} players but payoff tensors have {len(shape)} axes"
            )
        if any(s < 1 for s in shape):
            raise InvalidInputError("every player needs at least one strategy")
        for i, t in enumerate(tensors):
            if t.shape != shape:
                raise InvalidInputError(
                    f"payoff tensor of player {i} has shape {t.shape}, expected {shape}"
                )
            if not np.all(np.isfinite(t)):
                raise InvalidInputError(f"payoffs of player {i} are not all finite")
            t.setflags(write=False)
        if symmetric:
            if len(tensors) != 2 or shape[0] != shape[1]:
                raise InvalidInputError("symmetric games must be two-player and square")
            if not np.array_equal(tensors[1], tensors[0].T):
                raise InvalidInputError("symmetric flag set but payoffs are not A, A^T")
        self.payoffs: tuple[np.ndarray, ...] = tuple(tensors)
        self.symmetric = bool(symmetric)
        reduced = []
        for i, t in enumerate(tensors):
            r = np.moveaxis(t, i, 0).reshape(shape[i], -1).copy()
            r.setflags(write=False)
            reduced.append(r)
        self._reduced = tuple(reduced)
        self.scale = max(float(max(np.abs(t).max() for t in tensors)), ABS_FLOOR)

    @classmethod
    def from_matrix(cls, matrix) -> "Game":
        """Symmetric two-player game where the row player earns ``matrix``."""
        a = np.array(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInputError("symmetric matrix must be square")
        return cls([a, a.T.copy()], symmetric=True)

    @classmethod
    def from_bimatrix(cls, a, b) -> "Game":
        return cls([np.asarray(a, float), np.asarray(b, float)])

    @classmethod
    def from_reduced(cls, reduced: Sequence[np.ndarray], strategy_counts: Sequence[int]) -> "Game":
        """Build a game from each player's reduced matrix (rows = own strategies)."""
        counts = list(strategy_counts)
        tensors = []
        for i, r in enumerate(reduced):
            others = [s for j, s in enumerate(counts) if j != i]
            t = np.asarray(r, float).reshape([counts[i], *others])
            tensors.append(np.moveaxis(t, 0, i))
        return cls(tensors)

    @property
    def player_count(self) -> int:
        return len(self.payoffs)

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return self.payoffs[0].shape

    @property
    def profile_count(self) -> int:
        """|S|, the number of pure strategy profiles."""
        return int(np.prod(self.strategy_counts))

    def tol(self, rel: float = REL_TOL) -> float:
        return max(rel * self.scale, ABS_FLOOR)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Game):
            return NotImplemented
        return self.symmetric == other.symmetric and all(
            a.shape == b.shape and np.array_equal(a, b)
            for a, b in zip(self.payoffs, other.payoffs)
        ) and len(self.payoffs) == len(other.payoffs)

    __hash__ = None

    def __repr__(self) -> str:
        kind = "symmetric " if self.symmetric else ""
        return f"Game({kind}{self.player_count} players, strategies={self.strategy_counts})"


@dataclass(frozen=True, eq=False)
class MixedProfile:
    """One probability vector per player."""

    strategies: tuple[np.ndarray, ...]

    def __post_init__(self):
        seats = []
        for i, x in enumerate(self.strategies):
            v = np.array(x, dtype=float).ravel()
            if v.size == 0 or not np.all(np.isfinite(v)):
                raise InvalidInputError(f"strategy of player {i} is empty or non-finite")
            if v.min() < 0:
                raise InvalidInputError(f"strategy of player {i} has negative entries")
            if abs(v.sum() - 1.0) > SUM_TOL:
                raise InvalidInputError(
                    f"strategy of player {i} sums to {v.sum()!r}, not 1"
                )
            v.setflags(write=False)
            seats.append(v)
        object.__setattr__(self, "strategies", tuple(seats))

    def __getitem__(self, i: int) -> np.ndarray:
        return self.strategies[i]

    def __len__(self) -> int:
        return len(self.strategies)

    def __iter__(self):
        return iter(self.strategies)

    def flat(self) -> np.ndarray:
        return np.concatenate(self.strategies)

    def is_interior(self, eps: float = INTERIOR_EPS) -> bool:
        return all(x.min() >= eps for x in self.strategies)

    def distance(self, other: "MixedProfile") -> float:
        return float(np.linalg.norm(self.flat() - as_profile(other).flat()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MixedProfile):
            return NotImplemented
        return len(self) == len(other) and all(
            np.array_equal(a, b) for a, b in zip(self, other)
        )

    __hash__ = None

    def __repr__(self) -> str:
        inner = ", ".join(np.array2string(x, precision=6) for x in self.strategies)
        return f"MixedProfile({inner})"


def as_profile(x) -> MixedProfile:
    if isinstance(x, MixedProfile):
        return x
    return MixedProfile(tuple(x))


def check_profile(game: Game, x) -> MixedProfile:
    """Coerce ``x`` to a profile and check its dimensions against ``game``."""
    x = as_profile(x)
    if len(x) != game.player_count:
        raise InvalidInputError(
            f"profile has {len(x)} players, game has {game.player_count}"
        )
    for i, (xi, s) in enumerate(zip(x, game.strategy_counts)):
        if xi.size != s:
            raise InvalidInputError(
                f"player {i} strategy has length {xi.size}, expected {s}"
            )
    return x


def opponent_distribution(seats: Sequence[np.ndarray], i: int) -> np.ndarray:
    """Product distribution of the opponents of ``i`` in reduced-matrix column order."""
    others = [seats[j] for j in range(len(seats)) if j != i]
    if not others:
        return np.ones(1)
    if len(others) == 1:
        return others[0]
    return reduce(np.multiply.outer, others).ravel()


def pure_payoffs(game: Game, seats: Sequence[np.ndarray], i: int) -> np.ndarray:
    """Vector of u_i(e_alpha, x_{-i}) over alpha, without validation."""
    return game._reduced[i] @ opponent_distribution(seats, i)


def utility(game: Game, x, i: int) -> float:
    """Expected payoff u_i(x) of player ``i`` under the mixed profile ``x``."""
    x = check_profile(game, x)
    _check_player(game, i)
    return float(x[i] @ pure_payoffs(game, x.strategies, i))


def utility_pure_vs_rest(game: Game, i: int, alpha: int, x) -> float:
    """Payoff u_i(e_alpha, x_{-i}) of pure strategy ``alpha`` against the others' mix."""
    x = check_profile(game, x)
    _check_player(game, i)
    if not 0 <= alpha < game.strategy_counts[i]:
        raise InvalidInputError(f"strategy {alpha} out of range for player {i}")
    return float(game._reduced[i][alpha] @ opponent_distribution(x.strategies, i))


def reduced_matrix(game: Game, i: int) -> np.ndarray:
    """Player ``i``'s payoffs as an s_i x prod_{j != i} s_j matrix."""
    _check_player(game, i)
    return game._reduced[i]


def _check_player(game: Game, i: int) -> None:
    if not 0 <= i < game.player_count:
        raise InvalidInputError(f"player {i} out of range")


@dataclass(frozen=True)
class RowStats:
    row_sum: float
    above_average_excess: float


def row_stats(game: Game, i: int) -> list[RowStats]:
    """Row sums and sum_gamma (a_{alpha gamma} - mean)_+ for player ``i``."""
    r = reduced_matrix(game, i)
    mean = r.mean()
    sums = r.sum(axis=1)
    excess = np.maximum(r - mean, 0.0).sum(axis=1)
    return [RowStats(float(s), float(e)) for s, e in zip(sums, excess)]


def equal_row_sums(game: Game) -> bool:
    """True iff every player's reduced matrix has equal row sums."""
    tol = game.tol()
    for r in game._reduced:
        sums = r.sum(axis=1)
        if sums.max() - sums.min() > tol:
            return False
    return True


def rows_are_permutations(game: Game, i: int) -> bool:
    """True iff every row of player ``i``'s reduced matrix is a rearrangement of row 0."""
    r = np.sort(reduced_matrix(game, i), axis=1)
    return bool(np.all(np.abs(r - r[0]) <= game.tol()))


def make_rps(a: float, b: float) -> Game:
    """Generalized rock-paper-scissors: win ``a``, lose ``b``.

    ``b > a`` is the bad game, ``a > b`` the good one, ``a = b = 1`` standard.
    """
    if not (a > 0 and b > 0):
        raise InvalidInputError(f"RPS needs a > 0 and b > 0, got a={a}, b={b}")
    return Game.from_matrix([[0.0, -b, a], [a, 0.0, -b], [-b, a, 0.0]])


def make_uniform_profile(game: Game) -> MixedProfile:
    return MixedProfile(tuple(np.full(s, 1.0 / s) for s in game.strategy_counts))


def random_interior_profile(game: Game, seed=None, shared: bool | None = None) -> MixedProfile:
    """Dirichlet(1, ..., 1) draw per player.

    For symmetric games the same draw is used for both seats unless
    ``shared=False``, since their dynamics run on a single population.
    """
    rng = np.random.default_rng(seed)
    if shared is None:
        shared = game.symmetric
    if shared:
        x = rng.dirichlet(np.ones(game.strategy_counts[0]))
        return MixedProfile(tuple(x for _ in game.strategy_counts))
    return MixedProfile(tuple(rng.dirichlet(np.ones(s)) for s in game.strategy_counts))


def profile_from_flat(game: Game, v: np.ndarray) -> MixedProfile:
    cuts = np.cumsum(game.strategy_counts)[:-1]
    return MixedProfile(tuple(np.split(np.asarray(v, float), cuts)))


# JSON game format -----------------------------------------------------------


def game_to_dict(game: Game) -> dict:
    data = {
        "players": game.player_count,
        "strategy_counts": list(game.strategy_counts),
        "payoffs": [p.tolist() for p in game.payoffs],
    }
    if game.symmetric:
        data["symmetric_matrix"] = game.payoffs[0].tolist()
    return data


def game_from_dict(data: dict) -> Game:
    if "symmetric_matrix" in data:
        game = Game.from_matrix(data["symmetric_matrix"])
        if "payoffs" in data:
            other = Game([np.array(p, float) for p in data["payoffs"]], symmetric=True)
            if other != game:
                raise InvalidInputError("payoffs disagree with symmetric_matrix")
    else:
        try:
            game = Game([np.array(p, float) for p in data["payoffs"]])
        except KeyError as exc:
            raise InvalidInputError("game document needs 'payoffs' or 'symmetric_matrix'") from exc
    if "players" in data and data["players"] != game.player_count:
        raise InvalidInputError("'players' does not match payoffs")
    if "strategy_counts" in data and tuple(data["strategy_counts"]) != game.strategy_counts:
        raise InvalidInputError("'strategy_counts' does not match payoffs")
    return game


def dumps_game(game: Game) -> str:
    return json.dumps(game_to_dict(game), indent=2)


def loads_game(text: str) -> Game:
    return game_from_dict(json.loads(text))


def save_game(game: Game, path) -> None:
    Path(path).write_text(dumps_game(game) + "\n")


def load_game(path) -> Game:
    return loads_game(Path(path).read_text())
