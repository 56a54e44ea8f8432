import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incentive_dynamics import (
    Game,
    InvalidInputError,
    MixedProfile,
    TrajectoryConfig,
    UnsupportedShapeError,
    integrate,
    make_rps,
    make_uniform_profile,
    random_interior_profile,
    speed_grid,
    vector_field,
)
from incentive_dynamics.generators import random_game

SPECS = ["replicator", "bnn", "logit:0.2", "smith", "projection", "dash"]


def test_field_examples(bad_rps, x532):
    for v in vector_field("dash", bad_rps, make_uniform_profile(bad_rps)):
        np.testing.assert_allclose(v, 0, atol=1e-15)
    for v in vector_field("dash", bad_rps, x532):
        np.testing.assert_allclose(v, [-0.81, 0.162, 0.648], atol=1e-14)


@pytest.mark.parametrize("spec", SPECS)
def test_field_zero_at_uniform_rps(spec, bad_rps):
    for v in vector_field(spec, bad_rps, make_uniform_profile(bad_rps)):
        np.testing.assert_allclose(v, 0, atol=1e-14)


@settings(max_examples=80, deadline=None)
@given(counts=st.lists(st.integers(2, 4), min_size=2, max_size=3), seed=st.integers(0, 2**32 - 1),
       spec=st.sampled_from(SPECS))
def test_field_conserves_mass(counts, seed, spec):
    rng = np.random.default_rng(seed)
    g = random_game(counts, rng)
    x = MixedProfile(tuple(rng.dirichlet(np.ones(s)) for s in counts))
    for v in vector_field(spec, g, x):
        assert abs(v.sum()) <= 1e-12 * max(1.0, np.abs(v).max())


def test_replicator_field_shift_invariant(rng):
    g = random_game((3, 3), rng)
    shifted = Game([g.payoffs[0] + 4.2, g.payoffs[1]])
    x = MixedProfile(tuple(rng.dirichlet(np.ones(3)) for _ in range(2)))
    for a, b in zip(vector_field("replicator", g, x), vector_field("replicator", shifted, x)):
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_constant_game_projection_stays_put():
    g = Game.from_matrix(np.full((3, 3), 1.5))
    x0 = MixedProfile(([0.2, 0.3, 0.5], [0.2, 0.3, 0.5]))
    tr = integrate("projection", g, x0, TrajectoryConfig(T=5.0))
    assert tr.status == "horizon_reached"
    np.testing.assert_allclose(tr.states, np.tile(x0[0], (len(tr), 1)), atol=1e-15)
    assert np.all(tr.speeds == 0)


def test_dash_converges_from_seeded_starts(bad_rps):
    u = make_uniform_profile(bad_rps)
    rng = np.random.default_rng(99)
    for _ in range(100):
        tr = integrate("dash", bad_rps, random_interior_profile(bad_rps, rng), TrajectoryConfig(T=200.0), target=u)
        assert tr.status == "converged"
        assert tr.terminal.distance(u) < 1e-6
        assert tr.converged_to == u


def test_bnn_stays_away(bad_rps):
    u = make_uniform_profile(bad_rps)
    x0 = MixedProfile(([0.8, 0.1, 0.1], [0.8, 0.1, 0.1]))
    tr = integrate("bnn", bad_rps, x0, TrajectoryConfig(T=500.0), target=u)
    assert tr.status == "horizon_reached"
    assert tr.terminal.distance(u) > 0.05


def test_trajectory_invariants(bad_rps):
    x0 = MixedProfile(([0.6, 0.3, 0.1], [0.6, 0.3, 0.1]))
    cfg = TrajectoryConfig(T=20.0, h=0.01, record_stride=3)
    tr = integrate("projection", bad_rps, x0, cfg)
    assert np.all(np.diff(tr.times) > 0)
    assert tr.times[-1] == pytest.approx(20.0)
    for _, x, speed in tr.samples[::50]:
        assert speed >= 0
        assert abs(x[0].sum() - 1) <= 1e-12 and x[0].min() >= 0
    # payoffs bounded by 2, field Lipschitz scale of order 10
    assert tr.min_raw_coordinate >= -10 * cfg.h * 10


def test_multi_population_matches_single_for_equal_seats(bad_rps):
    x0 = MixedProfile(([0.6, 0.3, 0.1], [0.6, 0.3, 0.1]))
    cfg = TrajectoryConfig(T=5.0)
    a = integrate("smith", bad_rps, x0, cfg, population="single")
    b = integrate("smith", bad_rps, x0, cfg, population="multi")
    np.testing.assert_allclose(b.states[:, :3], a.states, atol=1e-12)
    np.testing.assert_allclose(b.states[:, 3:], a.states, atol=1e-12)


def test_step_halving_converging_runs(bad_rps):
    u = make_uniform_profile(bad_rps)
    x0 = MixedProfile(([0.7, 0.2, 0.1], [0.7, 0.2, 0.1]))
    a = integrate("dash", bad_rps, x0, TrajectoryConfig(T=10.0, h=0.01, stop_on_convergence=False), target=u)
    b = integrate("dash", bad_rps, x0, TrajectoryConfig(T=10.0, h=0.005, stop_on_convergence=False), target=u)
    assert np.linalg.norm(a.states[-1] - b.states[-1]) < 1e-6


def test_replicator_conserves_entropy_term():
    g = make_rps(1, 1)
    x0 = MixedProfile(([0.5, 0.3, 0.2], [0.5, 0.3, 0.2]))
    tr = integrate("replicator", g, x0, TrajectoryConfig(T=50.0))
    H = np.log(tr.states).sum(axis=1) / 3
    assert np.max(np.abs(H - H[0])) < 1e-8


def test_adaptive_integrator_agrees(bad_rps):
    x0 = MixedProfile(([0.6, 0.3, 0.1], [0.6, 0.3, 0.1]))
    a = integrate("bnn", bad_rps, x0, TrajectoryConfig(T=10.0, h=0.001))
    b = integrate("bnn", bad_rps, x0, TrajectoryConfig(T=10.0, h=0.01, integrator="rk45_adaptive", rtol=1e-10))
    assert b.times[-1] == pytest.approx(10.0)
    assert np.linalg.norm(a.states[-1] - b.states[-1]) < 1e-6


def test_blow_up_reported_not_raised():
    g = Game.from_matrix([[1e308, 0], [0, 0]])
    x0 = MixedProfile(([0.5, 0.5], [0.5, 0.5]))
    tr = integrate("projection", g, x0, TrajectoryConfig(T=1.0, renormalize_each_step=False))
    assert tr.status == "blow_up"


def test_integrate_rejects_bad_start(bad_rps):
    with pytest.raises(InvalidInputError):
        integrate("dash", bad_rps, MixedProfile(([1.0, 0.0, 0.0], [1.0, 0.0, 0.0])))
    with pytest.raises(InvalidInputError):
        TrajectoryConfig(T=-1)
    with pytest.raises(InvalidInputError):
        TrajectoryConfig(record_stride=0)


def test_csv_export(tmp_path, bad_rps, rng):
    path = tmp_path / "t.csv"
    tr = integrate("dash", bad_rps, MixedProfile(([0.5, 0.3, 0.2],) * 2), TrajectoryConfig(T=1.0))
    tr.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x1_1,x1_2,x1_3,speed"
    assert len(lines) == len(tr) + 1
    g = random_game((2, 3), rng)
    tr2 = integrate("bnn", g, MixedProfile(([0.5, 0.5], [0.2, 0.3, 0.5])), TrajectoryConfig(T=0.5))
    tr2.to_csv(path)
    assert path.read_text().splitlines()[0] == "t,x1_1,x1_2,x2_1,x2_2,x2_3,speed"


def test_speed_grid(bad_rps):
    grid = speed_grid("dash", bad_rps, 2)
    assert len(grid.points) == 6
    for r in (3, 9, 12):
        g = speed_grid("dash", bad_rps, r)
        assert len(g.points) == (r + 1) * (r + 2) // 2
        np.testing.assert_allclose(g.points.sum(axis=1), 1)
    center = speed_grid("dash", bad_rps, 3)
    k = np.where((center.indices == 1).all(axis=1))[0][0]
    assert center.speeds[k] == pytest.approx(0, abs=1e-14)
    rep = speed_grid("replicator", make_rps(1, 1), 4)
    corners = np.where(rep.indices.max(axis=1) == 4)[0]
    assert np.all(rep.speeds[corners] == 0)


def test_speed_grid_shape_errors(rng):
    with pytest.raises(UnsupportedShapeError):
        speed_grid("dash", Game.from_matrix([[1, 2], [3, 0]]), 5)
    with pytest.raises(UnsupportedShapeError):
        speed_grid("dash", random_game((3, 3), rng), 5)
    with pytest.raises(InvalidInputError):
        speed_grid("dash", make_rps(1, 2), 1)
