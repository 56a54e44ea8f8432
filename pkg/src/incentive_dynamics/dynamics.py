"""The incentive ODE  x' = phi(x) - x * sum(phi(x))  and its integration.

States are handled internally as flat arrays (players concatenated). In
single-population mode, used by default for symmetric games, only one seat is
evolved and it is copied into every seat when the opponent's mix is needed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .exceptions import InvalidInputError, UnsupportedShapeError
from .game import INTERIOR_EPS, Game, MixedProfile, check_profile, profile_from_flat
from .incentives import IncentiveSpec, as_spec, incentive_seats, player_incentive

INTEGRATORS = ("rk4_fixed", "rk45_adaptive")


def vector_field(spec, game: Game, x) -> tuple[np.ndarray, ...]:
    """Per-player tangent vectors phi_i(x) - x_i * sum(phi_i(x))."""
    spec = as_spec(spec)
    x = check_profile(game, x)
    phis = incentive_seats(spec, game, x.strategies)
    return tuple(p - xi * p.sum() for p, xi in zip(phis, x.strategies))


def resolve_population(game: Game, population: str) -> bool:
    """Return True for single-population mode."""
    if population == "auto":
        return game.symmetric
    if population == "single":
        if not game.symmetric:
            raise InvalidInputError("single-population mode needs a symmetric game")
        return True
    if population == "multi":
        return False
    raise InvalidInputError(f"population must be auto, single or multi, not {population!r}")


class FlatField:
    """The vector field on flat state vectors, in single- or multi-population form."""

    def __init__(self, spec: IncentiveSpec, game: Game, single: bool):
        self.spec = spec
        self.game = game
        self.single = single
        counts = game.strategy_counts
        self.counts = counts[:1] if single else counts
        self.cuts = np.cumsum(self.counts)[:-1]

    def seats(self, v: np.ndarray) -> list[np.ndarray]:
        if self.single:
            return [v, v]
        return np.split(v, self.cuts)

    def __call__(self, v: np.ndarray) -> np.ndarray:
        seats = self.seats(v)
        if self.single:
            p = player_incentive(self.spec, self.game, seats, 0)
            return p - v * p.sum()
        out = []
        for i, xi in enumerate(seats):
            p = player_incentive(self.spec, self.game, seats, i)
            out.append(p - xi * p.sum())
        return np.concatenate(out)

    def project(self, v: np.ndarray) -> np.ndarray:
        """Clamp negatives to zero and renormalize each simplex."""
        v = np.maximum(v, 0.0)
        if self.single:
            return v / v.sum()
        parts = np.split(v, self.cuts)
        return np.concatenate([p / p.sum() for p in parts])

    def to_profile(self, v: np.ndarray) -> MixedProfile:
        if self.single:
            return MixedProfile((v, v))
        return profile_from_flat(self.game, v)

    def from_profile(self, x: MixedProfile) -> np.ndarray:
        if self.single:
            return np.array(x[0], float)
        return x.flat()


@dataclass(frozen=True)
class TrajectoryConfig:
    T: float = 100.0
    h: float = 0.01
    integrator: str = "rk4_fixed"
    renormalize_each_step: bool = True
    record_stride: int = 1
    field_tol: float = 1e-9
    dist_tol: float = 1e-6
    stop_on_convergence: bool = True
    rtol: float = 1e-9
    atol: float = 1e-12
    max_step: float | None = None

    def __post_init__(self):
        if not self.T > 0 or not self.h > 0:
            raise InvalidInputError("T and h must be positive")
        if self.record_stride < 1:
            raise InvalidInputError("record_stride must be at least 1")
        if self.integrator not in INTEGRATORS:
            raise InvalidInputError(f"integrator must be one of {INTEGRATORS}")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded samples of one orbit.

    ``states`` holds one flat row per sample: the single seat in
    single-population mode, all players concatenated otherwise.
    """

    times: np.ndarray
    states: np.ndarray
    speeds: np.ndarray
    status: str
    game: Game
    single_population: bool
    converged_to: MixedProfile | None = None
    tol: float | None = None
    min_raw_coordinate: float = 0.0
    spec: IncentiveSpec | None = field(default=None)

    def __len__(self) -> int:
        return len(self.times)

    def profile(self, k: int) -> MixedProfile:
        v = self.states[k]
        if self.single_population:
            return MixedProfile((v, v))
        return profile_from_flat(self.game, v)

    @property
    def samples(self) -> list[tuple[float, MixedProfile, float]]:
        return [(float(t), self.profile(k), float(s))
                for k, (t, s) in enumerate(zip(self.times, self.speeds))]

    @property
    def terminal(self) -> MixedProfile:
        return self.profile(-1)

    def flat_state(self, x: MixedProfile) -> np.ndarray:
        """Express a profile in the same flat layout as ``states``."""
        return np.array(x[0], float) if self.single_population else x.flat()

    def to_csv(self, path) -> None:
        counts = self.game.strategy_counts[:1] if self.single_population else self.game.strategy_counts
        header = ["t"]
        for i, s in enumerate(counts):
            header += [f"x{i + 1}_{a + 1}" for a in range(s)]
        header.append("speed")
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for t, v, sp in zip(self.times, self.states, self.speeds):
                w.writerow([repr(float(t)), *(repr(float(c)) for c in v), repr(float(sp))])


def _rk4_step(f: Callable, v: np.ndarray, h: float, k1: np.ndarray) -> np.ndarray:
    k2 = f(v + 0.5 * h * k1)
    k3 = f(v + 0.5 * h * k2)
    k4 = f(v + h * k3)
    return v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


# Dormand-Prince 5(4) tableau.
_DP_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_DP_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def _dp45_step(f: Callable, v: np.ndarray, h: float, k1: np.ndarray):
    ks = [k1]
    for row in _DP_A[1:]:
        ks.append(f(v + h * sum(a * k for a, k in zip(row, ks))))
    K = np.array(ks)
    y5 = v + h * (_DP_B5 @ K)
    err = h * ((_DP_B5 - _DP_B4) @ K)
    return y5, err


def integrate(spec, game: Game, x0, config: TrajectoryConfig | None = None,
              target=None, population: str = "auto") -> Trajectory:
    """Integrate the incentive dynamics from ``x0``.

    Stops at ``config.T`` or, when ``stop_on_convergence`` is set and one or
    more known equilibria are passed as ``target``, as soon as the field norm
    drops below ``field_tol`` within ``dist_tol`` of one of them. Near-zero
    field alone does not stop a run: heteroclinic orbits linger by corners.
    Non-finite states end the run with status ``blow_up``.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        return _integrate(as_spec(spec), game, x0, config or TrajectoryConfig(), target, population)


def _integrate(spec, game, x0, config, target, population) -> Trajectory:
    x0 = check_profile(game, x0)
    if not x0.is_interior(INTERIOR_EPS):
        raise InvalidInputError("initial profile must be interior")
    single = resolve_population(game, population)
    f = FlatField(spec, game, single)
    v = f.from_profile(x0)
    if target is None:
        targets = []
    elif isinstance(target, MixedProfile) or not isinstance(target[0], MixedProfile):
        targets = [check_profile(game, target)]
    else:
        targets = [check_profile(game, t) for t in target]
    tgts = [f.from_profile(t) for t in targets]
    hit = []

    times, states, speeds = [], [], []
    t = 0.0
    k1 = f(v)
    speed = float(np.linalg.norm(k1))
    times.append(t); states.append(v.copy()); speeds.append(speed)
    status = "horizon_reached"
    min_raw = float(v.min())
    h = config.h
    max_step = config.max_step if config.max_step is not None else np.inf
    step = 0
    eps_t = 1e-12 * config.T

    def converged(vec, sp):
        if sp >= config.field_tol:
            return False
        for t_, w in zip(targets, tgts):
            if np.linalg.norm(vec - w) < config.dist_tol:
                hit.append(t_)
                return True
        return False

    while t < config.T - eps_t:
        if config.stop_on_convergence and converged(v, speed):
            status = "converged"
            break
        if config.integrator == "rk4_fixed":
            dt = min(config.h, config.T - t)
            new = _rk4_step(f, v, dt, k1)
        else:
            while True:
                dt = min(h, max_step, config.T - t)
                new, err = _dp45_step(f, v, dt, k1)
                scale = config.atol + config.rtol * np.maximum(np.abs(v), np.abs(new))
                enorm = float(np.sqrt(np.mean((err / scale) ** 2))) if np.all(np.isfinite(err)) else np.inf
                if enorm <= 1.0 or dt <= 1e-14:
                    fac = 5.0 if enorm == 0 else min(5.0, max(0.2, 0.9 * enorm ** -0.2))
                    h = dt * fac
                    break
                h = dt * max(0.2, 0.9 * enorm ** -0.2) if np.isfinite(enorm) else dt * 0.2
        if not np.all(np.isfinite(new)):
            status = "blow_up"
            break
        min_raw = min(min_raw, float(new.min()))
        v = f.project(new) if config.renormalize_each_step else new
        t = t + dt
        step += 1
        k1 = f(v)
        if not np.all(np.isfinite(k1)):
            status = "blow_up"
            break
        speed = float(np.linalg.norm(k1))
        final = t >= config.T - eps_t or (config.stop_on_convergence and converged(v, speed))
        if step % config.record_stride == 0 or final:
            times.append(t); states.append(v.copy()); speeds.append(speed)

    conv_to = None
    if status == "converged":
        conv_to = hit[-1]
    return Trajectory(
        times=np.array(times),
        states=np.array(states),
        speeds=np.array(speeds),
        status=status,
        game=game,
        single_population=single,
        converged_to=conv_to,
        tol=config.dist_tol if status == "converged" else None,
        min_raw_coordinate=min_raw,
        spec=spec,
    )


@dataclass(frozen=True, eq=False)
class SpeedGrid:
    resolution: int
    indices: np.ndarray   # (N, 3) integer barycentric indices summing to resolution
    points: np.ndarray    # (N, 3) simplex coordinates
    speeds: np.ndarray    # (N,)


def simplex_grid(resolution: int) -> np.ndarray:
    idx = [(i, j, resolution - i - j)
           for i in range(resolution + 1) for j in range(resolution + 1 - i)]
    return np.array(idx, dtype=int)


def require_portrait_shape(game: Game) -> None:
    if not (game.symmetric and game.strategy_counts == (3, 3)):
        raise UnsupportedShapeError(
            "portraits need a symmetric two-player game with three strategies"
        )


def speed_grid(spec, game: Game, resolution: int) -> SpeedGrid:
    """Field speed at every node of a barycentric grid on the single-population simplex."""
    spec = as_spec(spec)
    require_portrait_shape(game)
    if resolution < 2:
        raise InvalidInputError("resolution must be at least 2")
    idx = simplex_grid(resolution)
    f = FlatField(spec, game, single=True)
    pts = idx / resolution
    speeds = np.empty(len(idx))
    for k, p in enumerate(pts):
        speeds[k] = np.linalg.norm(f(f.project(p)))
    return SpeedGrid(resolution, idx, pts, speeds)
