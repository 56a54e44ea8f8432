"""Executable checks of the equilibrium and stability results.

Each check returns a :class:`CheckResult`; :func:`run_checks` runs a
selection and is what ``incentive-dynamics verify`` prints.
"""

from __future__ import annotations

import time
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .analysis import (
    classify_long_run,
    iss_margins,
    kl_decay_check,
    lyapunov_f,
    permuted_rows_margins,
)
from .dynamics import TrajectoryConfig, integrate
from .equilibria import (
    find_incentive_equilibria,
    incentive_residual,
    nash_residual,
    uniform_nash_iff_equal_row_sums,
)
from .game import Game, MixedProfile, make_rps, make_uniform_profile, random_interior_profile
from .generators import (
    perturb_one_row_sum,
    random_equal_row_sum_game,
    random_game,
    random_permuted_rows_game,
)
from .incentives import IncentiveSpec, player_incentive

COUNTEREXAMPLE_UNEQUAL_ROWS = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -3.0, 1.0]]
COUNTEREXAMPLE_UNEQUAL_EXCESS = [[1.0, 2.0], [3.0, 0.0]]
DASH = IncentiveSpec("dash")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


def permuted_rows_corpus(n: int = 200, seed: int = 2024) -> list[Game]:
    """Half 3x3, half 4x4 bimatrix games whose rows are rearrangements."""
    rng = np.random.default_rng(seed)
    return [random_permuted_rows_game((3, 3) if k % 2 == 0 else (4, 4), rng) for k in range(n)]


def iss_test_games(seed: int = 7) -> list[Game]:
    rng = np.random.default_rng(seed)
    games = [make_rps(1, 2), make_rps(1, 1), make_rps(2, 1)]
    games += [random_permuted_rows_game((3, 3), rng) for _ in range(10)]
    games += [random_permuted_rows_game((4, 4), rng) for _ in range(10)]
    return games


def check_lemma1(n: int = 1000, n_three: int = 200, seed: int = 11) -> CheckResult:
    """Uniform profile is Nash iff row sums are equal, over mixed random batteries."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    total = agree = nash_count = 0
    for counts, m in [((3, 3), n), ((2, 2), n), ((4, 4), n), ((2, 2, 2), n_three)]:
        for k in range(m):
            kind = k % 3
            if kind == 0:
                g = random_equal_row_sum_game(counts, rng)
            elif kind == 1:
                g = perturb_one_row_sum(random_equal_row_sum_game(counts, rng), rng)
            else:
                g = random_game(counts, rng)
            nash, _, ok = uniform_nash_iff_equal_row_sums(g)
            total += 1
            agree += ok
            nash_count += nash
    dt = time.perf_counter() - t0
    passed = agree == total and dt < 10.0
    return CheckResult("lemma1", passed,
                       f"agreement {agree}/{total} ({nash_count} uniform-Nash games), runtime {dt:.2f}s < 10s", dt)


def check_row_excess(corpus: list[Game] | None = None) -> CheckResult:
    """Dash residual at uniform vanishes on permuted-rows games."""
    corpus = corpus or permuted_rows_corpus()
    worst = max(incentive_residual(DASH, g, make_uniform_profile(g)) for g in corpus)
    return CheckResult("row-excess", worst < 1e-9,
                       f"max dash residual at uniform {worst:.2e} < 1e-9 over {len(corpus)} games")


def check_permuted_rows(corpus: list[Game] | None = None, n_profiles: int = 1000, seed: int = 5) -> CheckResult:
    """Dash components agree within each player; every interior dash equilibrium is uniform."""
    corpus = corpus or permuted_rows_corpus()
    rng = np.random.default_rng(seed)
    spread = 0.0
    bad_eq = 0
    n_eq = 0
    for g in corpus:
        for _ in range(n_profiles):
            seats = [rng.dirichlet(np.ones(s)) for s in g.strategy_counts]
            for i in range(g.player_count):
                p = player_incentive(DASH, g, seats, i)
                spread = max(spread, float(p.max() - p.min()))
        uniform = make_uniform_profile(g)
        for rep in find_incentive_equilibria(DASH, g, n_random=4):
            if rep.is_interior:
                n_eq += 1
                if rep.point.distance(uniform) >= 1e-6:
                    bad_eq += 1
    passed = spread <= 1e-12 and bad_eq == 0 and n_eq >= len(corpus)
    return CheckResult("permuted-rows", passed,
                       f"max component spread {spread:.1e} <= 1e-12; {n_eq - bad_eq}/{n_eq} interior equilibria uniform")


def check_convergence(n_starts: int = 100, seed: int = 3) -> CheckResult:
    """Dash dynamics reach uniform from random starts on bad, standard and good RPS."""
    cfg = TrajectoryConfig(T=200.0, h=0.01)
    worst = 0.0
    failures = []
    for a, b in [(1, 2), (1, 1), (2, 1)]:
        g = make_rps(a, b)
        u = make_uniform_profile(g)
        rng = np.random.default_rng(seed)
        for k in range(n_starts):
            x0 = random_interior_profile(g, rng)
            tr = integrate(DASH, g, x0, cfg, target=u)
            d = tr.terminal.distance(u)
            worst = max(worst, d)
            if not d < 1e-6 or not kl_decay_check(DASH, g, u, tr):
                failures.append((a, b, k))
    return CheckResult("convergence", not failures,
                       f"worst terminal distance {worst:.1e} < 1e-6, KL nonincreasing; failures {failures[:5]}")


def check_nonconvergence_one(spec: str, T: float = 500.0) -> CheckResult:
    t0 = time.perf_counter()
    g = make_rps(1, 2)
    u = make_uniform_profile(g)
    x0 = MixedProfile(([0.8, 0.1, 0.1], [0.8, 0.1, 0.1]))
    tr = integrate(spec, g, x0, TrajectoryConfig(T=T, h=0.01), target=u)
    d = tr.terminal.distance(u)
    lr = classify_long_run(tr, [u])
    passed = lr.kind == "cycling" and d > 0.05
    return CheckResult(f"nonconvergence[{spec}]", passed, f"classified {lr.kind}, terminal distance to uniform {d:.3g} > 0.05",
                       time.perf_counter() - t0)


NONCONVERGENCE_SPECS = ("bnn", "logit:0.2", "smith", "replicator", "projection")


def check_nonconvergence() -> list[CheckResult]:
    return [check_nonconvergence_one(s) for s in NONCONVERGENCE_SPECS]


def check_counterexample_unequal_rows() -> CheckResult:
    g = Game.from_matrix(COUNTEREXAMPLE_UNEQUAL_ROWS)
    nash_point = MixedProfile(([1 / 6, 1 / 6, 2 / 3], [1 / 6, 1 / 6, 2 / 3]))
    u = make_uniform_profile(g)
    r_nash = nash_residual(g, nash_point)
    r_uni = nash_residual(g, u)
    reps = find_incentive_equilibria(DASH, g)
    uni = [r for r in reps if r.is_uniform]
    dash_res = incentive_residual(DASH, g, u)
    passed = r_nash <= 1e-12 and bool(uni) and dash_res < 1e-9 and abs(r_uni - 1 / 3) <= 1e-12
    return CheckResult("counterexample1", passed,
                       f"Nash residual at (1/6,1/6,2/3) {r_nash:.1e}; dash equilibrium uniform found={bool(uni)}, "
                       f"residual {dash_res:.1e}; uniform Nash residual {r_uni!r} (expected 1/3)")


def cubic_root_bisection(lo: float = 0.0, hi: float = 1.0, iters: int = 200) -> float:
    """Root of 4p^3 - 7p^2 + 5p - 1 in (0, 1)."""
    def c(p):
        return 4 * p ** 3 - 7 * p ** 2 + 5 * p - 1

    assert c(lo) < 0 < c(hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if c(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def check_counterexample_unequal_excess() -> CheckResult:
    g = Game.from_matrix(COUNTEREXAMPLE_UNEQUAL_EXCESS)
    u = make_uniform_profile(g)
    nash_ok = nash_residual(g, u) <= g.tol()
    root = cubic_root_bisection()
    interior = [r for r in find_incentive_equilibria(DASH, g) if r.is_interior]
    ps = [float(r.point[0][0]) for r in interior]
    sym = [r for r in interior if np.allclose(r.point[0], r.point[1], atol=1e-12)]
    p = float(sym[0].point[0][0]) if sym else float("nan")
    u_at = 5 * root - 4 * root ** 2
    passed = (nash_ok and bool(sym) and abs(p - 0.3120) <= 0.001 and abs(p - root) <= 1e-6
              and abs(p - 0.31) <= 0.005 and abs((1 - p) - 0.69) <= 0.005 and 1 < u_at < 2)
    return CheckResult("counterexample2", passed,
                       f"uniform Nash={nash_ok}; dash equilibrium p={p:.6f} (bisection root {root:.6f}, "
                       f"payoff {u_at:.4f} in (1,2)); interior equilibria found {ps}")


def check_iss(n_points: int = 10000, seed: int = 13) -> CheckResult:
    """ISS margin against uniform is positive at random interior points; closed form agrees."""
    rng = np.random.default_rng(seed)
    worst = np.inf
    max_gap = 0.0
    for g in iss_test_games():
        u = make_uniform_profile(g)
        count = 0
        while count < n_points:
            x = random_interior_profile(g, rng, shared=False)
            if x.distance(u) <= 1e-8 or not x.is_interior():
                continue
            count += 1
            m = iss_margins(DASH, g, u, x)
            closed = permuted_rows_margins(g, x)
            worst = min(worst, float(m.min()))
            max_gap = max(max_gap, float(np.max(np.abs(m - closed) / np.maximum(1.0, np.abs(m)))))
    passed = worst > 0 and max_gap <= 1e-12
    return CheckResult("iss", passed,
                       f"min margin {worst:.3e} > 0; closed-form mismatch {max_gap:.1e} <= 1e-12 (relative, floor 1)")


def check_f_minimum(n_points: int = 10000, seed: int = 17) -> CheckResult:
    rng = np.random.default_rng(seed)
    ok = True
    grad_worst = 0.0
    for s in (2, 3, 4, 6):
        xs = rng.dirichlet(np.ones(s), size=n_points)
        vals = np.array([lyapunov_f(x) for x in xs])
        ok &= bool(np.all(vals > s * s))
        uniform = np.full(s, 1.0 / s)
        ok &= abs(lyapunov_f(uniform) - s * s) <= 1e-12 * s * s
        grad_worst = max(grad_worst, float(np.linalg.norm(tangent_gradient(lyapunov_f, uniform))))
    passed = ok and grad_worst < 1e-6
    return CheckResult("f-minimum", passed, f"f > s^2 off uniform, = s^2 at uniform: {ok}; tangent gradient norm {grad_worst:.1e}")


def tangent_gradient(fun: Callable[[np.ndarray], float], x: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Central differences of ``fun`` along e_a - e_last (directions within the simplex)."""
    s = x.size
    g = np.empty(s - 1)
    for a in range(s - 1):
        d = np.zeros(s)
        d[a], d[-1] = 1.0, -1.0
        g[a] = (fun(x + step * d) - fun(x - step * d)) / (2 * step)
    return g


def replicator_drift(h: float, T: float = 100.0, x0=(0.5, 0.3, 0.2)) -> float:
    g = make_rps(1, 1)
    tr = integrate("replicator", g, MixedProfile((x0, x0)), TrajectoryConfig(T=T, h=h))
    H = np.log(tr.states).sum(axis=1) / 3.0
    return float(np.max(np.abs(H - H[0])))


def check_integrator() -> CheckResult:
    d1 = replicator_drift(0.01)
    d2 = replicator_drift(0.005)
    passed = d1 <= 1e-5 and d2 <= 0.5 * d1
    return CheckResult("integrator", passed, f"drift at h=0.01 {d1:.2e} <= 1e-5; at h=0.005 {d2:.2e} (ratio {d1 / d2:.1f} >= 2)")


CHECKS: dict[str, Callable[[], CheckResult | list[CheckResult]]] = {
    "lemma1": check_lemma1,
    "row-excess": check_row_excess,
    "permuted-rows": check_permuted_rows,
    "convergence": check_convergence,
    "nonconvergence": check_nonconvergence,
    "counterexample1": check_counterexample_unequal_rows,
    "counterexample2": check_counterexample_unequal_excess,
    "iss": check_iss,
    "f-minimum": check_f_minimum,
    "integrator": check_integrator,
}
GROUPS = {"counterexamples": ("counterexample1", "counterexample2")}


def expand(names) -> list[str]:
    if not names:
        return list(CHECKS)
    out = []
    for n in names:
        for m in GROUPS.get(n, (n,)):
            if m not in CHECKS:
                raise KeyError(m)
            if m not in out:
                out.append(m)
    return out


def run_checks(names=None, echo: Callable[[str], None] | None = None) -> list[CheckResult]:
    results = []
    for name in expand(names):
        t0 = time.perf_counter()
        res = CHECKS[name]()
        dt = time.perf_counter() - t0
        for r in res if isinstance(res, list) else [res]:
            if not r.seconds:
                r.seconds = dt
            results.append(r)
            if echo:
                echo(r.line())
    return results
