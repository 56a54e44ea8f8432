"""Random game families used by the verification batteries."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .game import Game


def _columns(counts: Sequence[int], i: int) -> int:
    return int(np.prod([s for j, s in enumerate(counts) if j != i]))


def random_game(counts: Sequence[int], rng: np.random.Generator) -> Game:
    return Game([rng.normal(size=tuple(counts)) for _ in counts])


def random_equal_row_sum_game(counts: Sequence[int], rng: np.random.Generator) -> Game:
    """Every player's reduced matrix has all row sums equal."""
    reduced = []
    for i, s in enumerate(counts):
        m = _columns(counts, i)
        r = rng.normal(size=(s, m))
        target = rng.normal()
        r -= (r.sum(axis=1, keepdims=True) - target) / m
        reduced.append(r)
    return Game.from_reduced(reduced, counts)


def perturb_one_row_sum(game: Game, rng: np.random.Generator, size: tuple[float, float] = (0.1, 1.0)) -> Game:
    """Shift one row of one player's reduced matrix by a random nonzero amount."""
    counts = game.strategy_counts
    reduced = [game._reduced[i].copy() for i in range(game.player_count)]
    i = int(rng.integers(game.player_count))
    a = int(rng.integers(counts[i]))
    delta = rng.uniform(*size) * rng.choice([-1.0, 1.0])
    reduced[i][a] += delta / reduced[i].shape[1]
    return Game.from_reduced(reduced, counts)


def random_permuted_rows_game(counts: Sequence[int], rng: np.random.Generator) -> Game:
    """Each player's rows are random rearrangements of one random row."""
    reduced = []
    for i, s in enumerate(counts):
        m = _columns(counts, i)
        first = rng.normal(size=m)
        reduced.append(np.array([rng.permutation(first) for _ in range(s)]))
    return Game.from_reduced(reduced, counts)
