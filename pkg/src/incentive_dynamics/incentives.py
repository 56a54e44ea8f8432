"""Incentive functions phi mapping a mixed profile to per-player incentives.

Each kind is chosen so that ``phi - x * sum(phi)`` is the classical dynamic
of the same name on the interior of the simplex:

* ``replicator``  phi_a = x_a u_a
* ``bnn``         phi_a = (u_a - u)_+                 (Nash's excess payoff)
* ``logit:eta``   phi_a = softmax(u / eta)_a
* ``smith``       phi_a = sum_b x_b (u_a - u_b)_+
* ``projection``  phi_a = u_a - mean(u)
* ``dash``        phi_a = sum_g (A[a, g] - u)_+        (over the reduced matrix)

Here ``u_a`` is the payoff of pure strategy ``a`` against the other players'
mix and ``u`` the player's expected payoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import InvalidInputError
from .game import Game, check_profile, pure_payoffs

KINDS = ("replicator", "bnn", "logit", "smith", "projection", "dash")
NONNEGATIVE_KINDS = frozenset({"bnn", "dash", "smith", "logit"})


@dataclass(frozen=True)
class IncentiveSpec:
    kind: str
    eta: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown incentive {self.kind!r}; expected one of {KINDS}")
        if self.kind == "logit":
            if self.eta is None or not np.isfinite(self.eta) or self.eta <= 0:
                raise InvalidInputError(f"logit noise must be positive, got {self.eta!r}")
            object.__setattr__(self, "eta", float(self.eta))
        elif self.eta is not None:
            raise InvalidInputError(f"{self.kind} takes no parameter")

    @classmethod
    def parse(cls, text: str) -> "IncentiveSpec":
        """Parse ``replicator|bnn|logit:<eta>|smith|projection|dash``."""
        kind, sep, param = text.strip().partition(":")
        if kind == "logit":
            if not sep:
                raise InvalidInputError("logit needs a noise level, e.g. logit:0.2")
            try:
                eta = float(param)
            except ValueError as exc:
                raise InvalidInputError(f"bad logit noise {param!r}") from exc
            return cls("logit", eta)
        if sep:
            raise InvalidInputError(f"{kind} takes no parameter")
        return cls(kind)

    def __str__(self) -> str:
        return f"logit:{self.eta!r}" if self.kind == "logit" else self.kind


def as_spec(spec) -> IncentiveSpec:
    return spec if isinstance(spec, IncentiveSpec) else IncentiveSpec.parse(spec)


def player_incentive(spec: IncentiveSpec, game: Game, seats: Sequence[np.ndarray], i: int) -> np.ndarray:
    """phi_i for one player on raw arrays (no validation; hot path)."""
    x = seats[i]
    ua = pure_payoffs(game, seats, i)
    kind = spec.kind
    if kind == "dash":
        u = x @ ua
        return np.maximum(game._reduced[i] - u, 0.0).sum(axis=1)
    if kind == "replicator":
        return x * ua
    if kind == "bnn":
        return np.maximum(ua - x @ ua, 0.0)
    if kind == "logit":
        z = np.exp((ua - ua.max()) / spec.eta)
        return z / z.sum()
    if kind == "smith":
        return np.maximum(ua[:, None] - ua[None, :], 0.0) @ x
    # projection
    return ua - ua.mean()


def incentive_seats(spec: IncentiveSpec, game: Game, seats: Sequence[np.ndarray]) -> list[np.ndarray]:
    return [player_incentive(spec, game, seats, i) for i in range(len(seats))]


def incentive(spec, game: Game, x) -> tuple[np.ndarray, ...]:
    """Incentive vector phi_i(x) for every player."""
    spec = as_spec(spec)
    x = check_profile(game, x)
    return tuple(incentive_seats(spec, game, x.strategies))


def dash_zero_set_check(game: Game, x, player: int | None = None) -> bool:
    """True iff the dash incentive vanishes for ``player`` (or for every player).

    Vanishing is judged up to the game's payoff tolerance, per summed term.
    It happens exactly when u_i(x) is at least the largest entry of player
    i's reduced matrix.
    """
    x = check_profile(game, x)
    players = range(game.player_count) if player is None else [player]
    spec = IncentiveSpec("dash")
    for i in players:
        phi = player_incentive(spec, game, x.strategies, i)
        if phi.max() > game.tol() * game._reduced[i].shape[1]:
            return False
    return True
