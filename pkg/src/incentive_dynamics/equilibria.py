"""Nash and incentive equilibria: residuals, a seeded solver, and the row-sum criteria."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .dynamics import FlatField, resolve_population
from .exceptions import PreconditionError
from .game import (
    INTERIOR_EPS,
    Game,
    MixedProfile,
    check_profile,
    equal_row_sums,
    make_uniform_profile,
    pure_payoffs,
    row_stats,
)
from .incentives import as_spec, incentive_seats, player_incentive

EQ_TOL = 1e-9
DEDUP_RADIUS = 1e-6
UNIFORM_TOL = 1e-6


def _player_nash_gaps(game: Game, x: MixedProfile) -> list[float]:
    gaps = []
    for i in range(game.player_count):
        ua = pure_payoffs(game, x.strategies, i)
        gaps.append(float(max(np.max(ua - x[i] @ ua), 0.0)))
    return gaps


def nash_residual(game: Game, x) -> float:
    """max over players and pure strategies of (u_i(e_a, x_-i) - u_i(x))_+."""
    x = check_profile(game, x)
    return max(_player_nash_gaps(game, x))


def incentive_residual(spec, game: Game, x) -> float:
    """Max-norm of the incentive vector field at ``x``."""
    spec = as_spec(spec)
    x = check_profile(game, x)
    phis = incentive_seats(spec, game, x.strategies)
    return float(max(np.max(np.abs(p - xi * p.sum())) for p, xi in zip(phis, x.strategies)))


@dataclass(frozen=True, eq=False)
class EquilibriumReport:
    point: MixedProfile
    nash_residual: float
    incentive_residual: float
    spec: str
    is_nash: bool
    is_incentive_eq: bool
    is_uniform: bool
    is_interior: bool
    provenance: str

    def to_dict(self) -> dict:
        return {
            "point": [x.tolist() for x in self.point],
            "nash_residual": self.nash_residual,
            "incentive_residual": self.incentive_residual,
            "spec": self.spec,
            "is_nash": self.is_nash,
            "is_incentive_eq": self.is_incentive_eq,
            "is_uniform": self.is_uniform,
            "is_interior": self.is_interior,
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        # json writes floats with repr, i.e. shortest round-trip decimal
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "EquilibriumReport":
        d = dict(d)
        d["point"] = MixedProfile(tuple(np.array(p) for p in d["point"]))
        return cls(**d)


def report_for(spec, game: Game, x, provenance: str = "") -> EquilibriumReport:
    spec = as_spec(spec)
    x = check_profile(game, x)
    nr = nash_residual(game, x)
    ir = incentive_residual(spec, game, x)
    return EquilibriumReport(
        point=x,
        nash_residual=nr,
        incentive_residual=ir,
        spec=str(spec),
        is_nash=nr <= game.tol(),
        is_incentive_eq=ir < EQ_TOL,
        is_uniform=x.distance(make_uniform_profile(game)) < UNIFORM_TOL,
        is_interior=x.is_interior(INTERIOR_EPS),
        provenance=provenance,
    )


def default_seeds(game: Game, single: bool, n_random: int = 8, seed: int = 0) -> list[tuple[str, np.ndarray]]:
    """Uniform, each corner pulled inward, and seeded Dirichlet points (flat layout)."""
    counts = game.strategy_counts[:1] if single else game.strategy_counts
    seeds = [("uniform", np.concatenate([np.full(s, 1.0 / s) for s in counts]))]
    for i, s in enumerate(counts):
        for a in range(s):
            parts = []
            for j, sj in enumerate(counts):
                if j == i and sj > 1:
                    p = np.full(sj, 0.1 / (sj - 1))
                    p[a] = 0.9
                else:
                    p = np.full(sj, 1.0 / sj)
                parts.append(p)
            seeds.append((f"corner-{i}-{a}", np.concatenate(parts)))
    rng = np.random.default_rng(seed)
    for k in range(n_random):
        seeds.append((f"random-{seed}-{k}", np.concatenate([rng.dirichlet(np.ones(s)) for s in counts])))
    return seeds


def _damped_iteration(f: FlatField, v: np.ndarray, damping: float, max_iter: int, tol: float):
    """x <- (1 - lam) x + lam * phi(x) / sum(phi(x)); returns (point, converged)."""
    polish = 1e-3 * tol
    for _ in range(max_iter):
        seats = f.seats(v)
        n = 1 if f.single else len(seats)
        phis = [player_incentive(f.spec, f.game, seats, i) for i in range(n)]
        totals = [p.sum() for p in phis]
        if any(not np.isfinite(s) or s <= 0 or np.any(p < 0) for p, s in zip(phis, totals)):
            return v, False
        target = np.concatenate([p / s for p, s in zip(phis, totals)])
        new = (1 - damping) * v + damping * target
        v = new
        if np.max(np.abs(f(v))) < polish:
            return v, True
    return v, bool(np.max(np.abs(f(v))) < tol)


def _minimize_residual(f: FlatField, v: np.ndarray) -> np.ndarray:
    """Least-squares on the field with x = z^2 / sum(z^2) per simplex."""
    cuts = f.cuts

    def to_state(z):
        parts = np.split(z * z, cuts)
        return np.concatenate([p / p.sum() for p in parts])

    def resid(z):
        if any(p.sum() == 0 for p in np.split(z * z, cuts)):
            return np.full(z.size, 1e3)
        return f(to_state(z))

    z0 = np.sqrt(np.maximum(v, 1e-12))
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        sol = least_squares(resid, z0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
    return to_state(sol.x)


def find_incentive_equilibria(spec, game: Game, seeds=None, *, damping: float = 0.2,
                              max_iter: int = 5000, tol: float = EQ_TOL,
                              dedup_radius: float = DEDUP_RADIUS,
                              population: str = "auto", n_random: int = 8,
                              rng_seed: int = 0) -> list[EquilibriumReport]:
    """Rest points of the incentive dynamics reached from a set of seeds.

    ``seeds`` may be a list of MixedProfiles; by default uniform, inward-pulled
    corners and ``n_random`` Dirichlet points are used. Each seed runs damped
    normalized-incentive iteration, which needs nonnegative incentives with a
    positive sum; otherwise, or when it stalls, residual minimization takes
    over. Only points with residual below ``tol`` are returned, deduplicated.
    """
    spec = as_spec(spec)
    single = resolve_population(game, population)
    f = FlatField(spec, game, single)
    if seeds is None:
        seed_list = default_seeds(game, single, n_random=n_random, seed=rng_seed)
    else:
        seed_list = [(f"given-{k}", f.from_profile(check_profile(game, s))) for k, s in enumerate(seeds)]

    found: list[EquilibriumReport] = []
    flats: list[np.ndarray] = []
    for name, v0 in seed_list:
        v, ok = _damped_iteration(f, v0, damping, max_iter, tol)
        if not ok:
            v = _minimize_residual(f, v)
            v = f.project(v)
        if not np.max(np.abs(f(v))) < tol:
            continue
        if any(np.linalg.norm(v - w) < dedup_radius for w in flats):
            continue
        flats.append(v)
        found.append(report_for(spec, game, f.to_profile(v), provenance=f"seed:{name}"))
    return found


def uniform_nash_iff_equal_row_sums(game: Game) -> tuple[bool, bool, bool]:
    """(uniform is Nash, rows have equal sums, the two agree)."""
    nash = nash_residual(game, make_uniform_profile(game)) <= game.tol()
    rows = equal_row_sums(game)
    return nash, rows, nash == rows


def proposition1_check(game: Game) -> bool:
    """Whether every player's above-average row excesses are equal.

    Requires the uniform profile to be a Nash equilibrium.
    """
    uniform = make_uniform_profile(game)
    for i, gap in enumerate(_player_nash_gaps(game, uniform)):
        if gap > game.tol():
            raise PreconditionError(f"uniform profile is not Nash for player {i} (gap {gap:g})")
    tol = game.tol()
    for i in range(game.player_count):
        ex = np.array([r.above_average_excess for r in row_stats(game, i)])
        if ex.max() - ex.min() > tol:
            return False
    return True
