"""Stability diagnostics for incentive dynamics.

The KL divergence from an equilibrium x_hat is the Lyapunov candidate tied to
the ISS margin: along the field,

    d/dt KL(x_hat || x) = -( x_hat . phi(x)/x  -  x . phi(x)/x ),

so a positive margin everywhere in the interior means KL decreases along
every interior orbit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dynamics import FlatField, Trajectory, TrajectoryConfig, integrate, resolve_population
from .equilibria import EQ_TOL, incentive_residual
from .exceptions import BoundaryError, InvalidInputError, PreconditionError
from .game import INTERIOR_EPS, Game, MixedProfile, check_profile, random_interior_profile
from .incentives import as_spec, incentive_seats

# verdict decision constants
EIG_TOL = 1e-6
KL_SLACK = 1e-6
KL_REL_TOL = 1e-4


def _require_interior(x: MixedProfile, eps: float) -> None:
    if not x.is_interior(eps):
        raise BoundaryError(f"profile has a coordinate below {eps}; 1/x is undefined")


def iss_margins(spec, game: Game, x_hat, x, eps: float = INTERIOR_EPS) -> np.ndarray:
    """Per-player  x_hat_i . (phi_i/x_i) - x_i . (phi_i/x_i)."""
    spec = as_spec(spec)
    x = check_profile(game, x)
    x_hat = check_profile(game, x_hat)
    _require_interior(x, eps)
    phis = incentive_seats(spec, game, x.strategies)
    return np.array([h @ (p / xi) - p.sum() for h, p, xi in zip(x_hat, phis, x)])


def iss_margin(spec, game: Game, x_hat, x, eps: float = INTERIOR_EPS) -> float:
    """Smallest per-player ISS margin; positive means the ISS inequality holds at ``x``."""
    return float(iss_margins(spec, game, x_hat, x, eps).min())


def permuted_rows_margins(game: Game, x, eps: float = INTERIOR_EPS) -> np.ndarray:
    """Closed-form dash margin against uniform for games with permuted rows.

    All dash components of a player coincide there, so the margin reduces to
    (phi_i1 / s_i) * (sum_a 1/x_ia - s_i^2).
    """
    x = check_profile(game, x)
    _require_interior(x, eps)
    phis = incentive_seats(as_spec("dash"), game, x.strategies)
    return np.array([p[0] / xi.size * (lyapunov_f(xi) - xi.size ** 2) for p, xi in zip(phis, x)])


def lyapunov_f(x_i, eps: float = INTERIOR_EPS) -> float:
    """sum_a 1/x_a; minimized at the uniform vector with value s^2."""
    x_i = np.asarray(x_i, float)
    if x_i.min() < eps:
        raise BoundaryError(f"coordinate below {eps}")
    return float(np.sum(1.0 / x_i))


def kl_divergence(p, q, eps: float = INTERIOR_EPS) -> float:
    """sum p ln(p/q), summed over players when given profiles."""
    if isinstance(p, MixedProfile) or isinstance(q, MixedProfile):
        ps, qs = list(p), list(q)
    else:
        ps, qs = [np.asarray(p, float)], [np.asarray(q, float)]
    if len(ps) != len(qs):
        raise InvalidInputError("p and q have different player counts")
    total = 0.0
    for a, b in zip(ps, qs):
        a = np.asarray(a, float)
        b = np.asarray(b, float)
        if a.shape != b.shape:
            raise InvalidInputError("p and q live on different simplices")
        if b.min() < eps:
            raise BoundaryError(f"q has a coordinate below {eps}")
        m = a > 0
        total += float(np.sum(a[m] * np.log(a[m] / b[m])))
    return total


def kl_time_derivative(spec, game: Game, x_hat, x, population: str = "auto") -> float:
    """d/dt KL(x_hat || x(t)) at ``x``, by a central difference along the field."""
    spec = as_spec(spec)
    x = check_profile(game, x)
    x_hat = check_profile(game, x_hat)
    single = resolve_population(game, population)
    f = FlatField(spec, game, single)
    v = f.from_profile(x)
    h = f.from_profile(x_hat)
    d = f(v)
    dn = np.max(np.abs(d))
    if dn == 0:
        return 0.0
    eps = 1e-5 * v.min() / dn

    def kl(w):
        m = h > 0
        return float(np.sum(h[m] * np.log(h[m] / w[m])))

    deriv = (kl(v + eps * d) - kl(v - eps * d)) / (2 * eps)
    if single:
        # one seat stands for both players
        deriv *= game.player_count
    return deriv


def kl_series(trajectory: Trajectory, x_hat) -> np.ndarray:
    x_hat = check_profile(trajectory.game, x_hat)
    h = trajectory.flat_state(x_hat)
    m = h > 0
    s = trajectory.states
    with np.errstate(divide="ignore"):
        vals = np.sum(h[m] * np.log(h[m] / s[:, m]), axis=1)
    if trajectory.single_population:
        vals = vals * trajectory.game.player_count
    return vals


def kl_decay_check(spec, game: Game, x_hat, trajectory: Trajectory,
                   slack: float = KL_SLACK, rel_tol: float = KL_REL_TOL) -> bool:
    """KL(x_hat || x(t)) is nonincreasing along ``trajectory`` (within ``slack``)
    and its time derivative at every interior sample equals minus the ISS margin
    (within ``rel_tol`` relative, with a small absolute floor).
    """
    spec = as_spec(spec)
    x_hat = check_profile(game, x_hat)
    kl = kl_series(trajectory, x_hat)
    if not np.all(np.isfinite(kl)) or np.any(np.diff(kl) > slack):
        return False
    population = "single" if trajectory.single_population else "multi"
    for k in range(len(trajectory)):
        x = trajectory.profile(k)
        if not x.is_interior(INTERIOR_EPS):
            continue
        margin = float(iss_margins(spec, game, x_hat, x).sum())
        deriv = kl_time_derivative(spec, game, x_hat, x, population=population)
        if abs(deriv + margin) > rel_tol * abs(margin) + 1e-10:
            return False
    return True


@dataclass(frozen=True, eq=False)
class LongRun:
    kind: str  # converged | cycling | undetermined
    target: MixedProfile | None = None
    period: float | None = None
    periods: tuple[float, ...] = ()

    def __str__(self) -> str:
        return self.kind


def _recurrence_times(times: np.ndarray, states: np.ndarray, ball: float, exit_radius: float) -> list[float]:
    """Times, walking back from the last sample, at which the orbit re-enters
    the ``ball`` around the final state after leaving ``exit_radius``."""
    r = states[-1]
    a, b = states[:-1], states[1:]
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(dd > 0, np.einsum("ij,ij->i", r - a, d) / dd, 0.0)
    s = np.clip(s, 0.0, 1.0)
    dist = np.linalg.norm(a + s[:, None] * d - r, axis=1)
    seg_t = times[:-1] + s * (times[1:] - times[:-1])
    returns = []
    outside = False
    best = None
    for k in range(len(dist) - 1, -1, -1):
        if not outside:
            outside = dist[k] > exit_radius
            continue
        if dist[k] < ball:
            if best is None or dist[k] < dist[best]:
                best = k
        elif best is not None:
            returns.append(float(seg_t[best]))
            best = None
            outside = False
    if best is not None:
        returns.append(float(seg_t[best]))
    return returns


def classify_long_run(trajectory: Trajectory, equilibria, *, conv_dist: float = 1e-6,
                      field_tol: float = 1e-9, far_fraction: float = 0.05,
                      ball: float = 1e-3, exit_factor: float = 10.0,
                      period_rtol: float = 0.05) -> LongRun:
    """Label an orbit as converged to one of ``equilibria``, cycling, or undetermined.

    Cycling means that over the last half of the run the orbit stays farther
    than ``far_fraction * diam`` from every listed equilibrium and re-enters the
    ``ball`` around its final state at least twice, with the two successive
    return times agreeing within ``period_rtol``.
    """
    if len(trajectory) < 100:
        raise InvalidInputError("classification needs at least 100 recorded samples")
    game = trajectory.game
    eqs = [check_profile(game, e) for e in equilibria]
    flats = [trajectory.flat_state(e) for e in eqs]
    end = trajectory.states[-1]
    for e, w in zip(eqs, flats):
        if np.linalg.norm(end - w) < conv_dist and trajectory.speeds[-1] < field_tol:
            return LongRun("converged", target=e)

    times = trajectory.times
    late = times >= times[-1] / 2
    states = trajectory.states[late]
    seats = 1 if trajectory.single_population else game.player_count
    diam = np.sqrt(2.0 * seats)
    for w in flats:
        if np.min(np.linalg.norm(states - w, axis=1)) <= far_fraction * diam:
            return LongRun("undetermined")
    returns = _recurrence_times(times[late], states, ball, exit_factor * ball)
    if len(returns) >= 2:
        t_end = float(times[-1])
        p1 = t_end - returns[0]
        p2 = returns[0] - returns[1]
        if abs(p1 - p2) <= period_rtol * max(p1, p2):
            return LongRun("cycling", period=0.5 * (p1 + p2), periods=(p1, p2))
        return LongRun("undetermined", periods=(p1, p2))
    return LongRun("undetermined")


def _tangent_basis(counts) -> np.ndarray:
    """Block-diagonal columns e_a - e_last for each simplex."""
    n = sum(counts)
    cols = []
    off = 0
    for s in counts:
        for a in range(s - 1):
            c = np.zeros(n)
            c[off + a] = 1.0
            c[off + s - 1] = -1.0
            cols.append(c)
        off += s
    return np.array(cols).T


def jacobian_matrix(spec, game: Game, x_hat, population: str = "auto", step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of the field on the simplex tangent space."""
    spec = as_spec(spec)
    x_hat = check_profile(game, x_hat)
    res = incentive_residual(spec, game, x_hat)
    if not res < EQ_TOL:
        raise PreconditionError(f"not an incentive equilibrium (residual {res:g})")
    single = resolve_population(game, population)
    f = FlatField(spec, game, single)
    v = f.from_profile(x_hat)
    basis = _tangent_basis(f.counts)
    eps = step * max(1.0, float(np.abs(v).max()))
    jv = np.column_stack([(f(v + eps * c) - f(v - eps * c)) / (2 * eps) for c in basis.T])
    coeffs, *_ = np.linalg.lstsq(basis, jv, rcond=None)
    return coeffs


def jacobian_eigenvalues(spec, game: Game, x_hat, population: str = "auto") -> np.ndarray:
    return np.linalg.eigvals(jacobian_matrix(spec, game, x_hat, population))


@dataclass(frozen=True, eq=False)
class StabilityReport:
    equilibrium: MixedProfile
    iss_min_margin: float
    lyapunov_monotone: bool
    eigenvalues: np.ndarray
    verdict: str
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "equilibrium": [x.tolist() for x in self.equilibrium],
            "iss_min_margin": self.iss_min_margin,
            "lyapunov_monotone": self.lyapunov_monotone,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "verdict": self.verdict,
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def verdict_from(eigenvalues: np.ndarray, iss_min_margin: float, lyapunov_monotone: bool) -> str:
    """Unstable if some eigenvalue has real part > EIG_TOL; stable if all are
    < -EIG_TOL, or if the spectrum is marginal but both the ISS margin and the
    KL monotonicity hold; otherwise inconclusive."""
    top = float(np.max(eigenvalues.real))
    if top > EIG_TOL:
        return "unstable_evidence"
    if top < -EIG_TOL or (iss_min_margin > 0 and lyapunov_monotone):
        return "asymptotically_stable_evidence"
    return "inconclusive"


def stability_report(spec, game: Game, x_hat, *, n_samples: int = 1000, n_trajectories: int = 5,
                     T: float = 50.0, h: float = 0.01, seed: int = 0,
                     exclusion: float = 1e-8) -> StabilityReport:
    """Collect ISS sampling, KL monotonicity and spectrum evidence at ``x_hat``."""
    spec = as_spec(spec)
    x_hat = check_profile(game, x_hat)
    rng = np.random.default_rng(seed)
    margins = []
    while len(margins) < n_samples:
        x = random_interior_profile(game, rng)
        if x.distance(x_hat) <= exclusion or not x.is_interior():
            continue
        margins.append(iss_margin(spec, game, x_hat, x))
    monotone = True
    cfg = TrajectoryConfig(T=T, h=h)
    for _ in range(n_trajectories):
        x0 = random_interior_profile(game, rng)
        traj = integrate(spec, game, x0, cfg, target=x_hat)
        kl = kl_series(traj, x_hat)
        if not np.all(np.isfinite(kl)) or np.any(np.diff(kl) > KL_SLACK):
            monotone = False
    eig = jacobian_eigenvalues(spec, game, x_hat)
    m = float(min(margins)) if margins else float("nan")
    return StabilityReport(
        equilibrium=x_hat,
        iss_min_margin=m,
        lyapunov_monotone=monotone,
        eigenvalues=eig,
        verdict=verdict_from(eig, m, monotone),
        config={"n_samples": n_samples, "n_trajectories": n_trajectories, "T": T, "h": h, "seed": seed},
    )
