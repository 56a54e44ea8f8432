import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import pure_vs_rest_bruteforce, utility_bruteforce

from incentive_dynamics import (
    Game,
    InvalidInputError,
    MixedProfile,
    equal_row_sums,
    make_rps,
    make_uniform_profile,
    random_interior_profile,
    reduced_matrix,
    row_stats,
    rows_are_permutations,
    utility,
    utility_pure_vs_rest,
)
from incentive_dynamics.game import dumps_game, load_game, loads_game, opponent_distribution, save_game
from incentive_dynamics.generators import random_game


def test_utility_examples(bad_rps, x532):
    std = make_rps(1, 1)
    assert utility(std, make_uniform_profile(std), 0) == 0.0
    assert utility(bad_rps, make_uniform_profile(bad_rps), 0) == pytest.approx(-1 / 3, abs=1e-15)
    # oracle: brute-force sum over pure profiles gives -0.31
    assert utility_bruteforce(bad_rps.payoffs, x532.strategies, 0) == pytest.approx(-0.31, abs=1e-15)
    assert utility(bad_rps, x532, 0) == pytest.approx(-0.31, abs=1e-15)


def test_pure_vs_rest_examples(bad_rps, x532, unequal_rows_game):
    u = make_uniform_profile(bad_rps)
    for a in range(3):
        assert utility_pure_vs_rest(bad_rps, 0, a, u) == pytest.approx(-1 / 3, abs=1e-15)
    assert utility_pure_vs_rest(bad_rps, 0, 0, x532) == pytest.approx(-0.4, abs=1e-15)
    nash = MixedProfile(([1 / 6, 1 / 6, 2 / 3], [1 / 6, 1 / 6, 2 / 3]))
    for a in range(3):
        assert utility_pure_vs_rest(unequal_rows_game, 0, a, nash) == pytest.approx(1 / 6, abs=1e-15)


def test_dimension_mismatch_raises(bad_rps):
    with pytest.raises(InvalidInputError):
        utility(bad_rps, MixedProfile(([0.5, 0.5], [0.5, 0.5])), 0)
    with pytest.raises(InvalidInputError):
        utility_pure_vs_rest(bad_rps, 0, 3, make_uniform_profile(bad_rps))


def test_reduced_matrix_examples(bad_rps, rng):
    a = np.array([[3.0, 1.0], [4.0, 1.5]])
    np.testing.assert_array_equal(reduced_matrix(Game.from_matrix(a), 0), a)
    np.testing.assert_array_equal(reduced_matrix(make_rps(2.0, 5.0), 0)[0], [0.0, -5.0, 2.0])
    g3 = random_game((2, 2, 2), rng)
    assert reduced_matrix(g3, 0).shape == (2, 4)


def test_reduced_matrix_column_order(rng):
    g = random_game((2, 3, 4), rng)
    r = reduced_matrix(g, 1)
    # columns: player 0 strategy outer, player 2 strategy inner
    for b in range(3):
        for j0 in range(2):
            for j2 in range(4):
                assert r[b, j0 * 4 + j2] == g.payoffs[1][j0, b, j2]


def test_row_predicates(bad_rps, unequal_rows_game, unequal_excess_game):
    assert equal_row_sums(bad_rps)
    assert rows_are_permutations(bad_rps, 0) and rows_are_permutations(bad_rps, 1)
    assert [r.row_sum for r in row_stats(bad_rps, 0)] == [-1.0, -1.0, -1.0]

    assert not equal_row_sums(unequal_rows_game)
    assert [r.row_sum for r in row_stats(unequal_rows_game, 0)] == [1.0, 1.0, -2.0]
    assert [r.above_average_excess for r in row_stats(unequal_rows_game, 0)] == [1.0, 1.0, 1.0]

    assert equal_row_sums(unequal_excess_game)
    stats = row_stats(unequal_excess_game, 0)
    assert [r.row_sum for r in stats] == [3.0, 3.0]
    assert [r.above_average_excess for r in stats] == [0.5, 1.5]
    assert not rows_are_permutations(unequal_excess_game, 0)


def test_make_rps():
    std = make_rps(1, 1)
    np.testing.assert_array_equal(std.payoffs[0], [[0, -1, 1], [1, 0, -1], [-1, 1, 0]])
    np.testing.assert_array_equal(std.payoffs[1], np.array(std.payoffs[0]).T)
    np.testing.assert_array_equal(make_rps(1, 2).payoffs[0][1], [1, 0, -2])
    assert std.symmetric
    for bad in [(0, 1), (1, -1), (-2, 3)]:
        with pytest.raises(InvalidInputError):
            make_rps(*bad)


def test_uniform_and_random_profiles(bad_rps, rng):
    u = make_uniform_profile(bad_rps)
    for x in u:
        np.testing.assert_allclose(x, [1 / 3] * 3)
    g = random_game((2, 3, 4), rng)
    a = random_interior_profile(g, 42)
    b = random_interior_profile(g, 42)
    assert a == b
    assert [x.size for x in a] == [2, 3, 4]
    assert a.is_interior()
    shared = random_interior_profile(bad_rps, 1)
    np.testing.assert_array_equal(shared[0], shared[1])


def test_profile_validation():
    with pytest.raises(InvalidInputError):
        MixedProfile(([0.5, 0.6],))
    with pytest.raises(InvalidInputError):
        MixedProfile(([1.2, -0.2],))
    x = MixedProfile(([0.5, 0.5 - 1e-13],))
    assert not MixedProfile(([1.0, 0.0],)).is_interior()
    assert x.is_interior()


def test_game_validation():
    with pytest.raises(InvalidInputError):
        Game([np.zeros((2, 2)), np.zeros((2, 3))])
    with pytest.raises(InvalidInputError):
        Game([np.array([[np.nan, 0], [0, 0]]), np.zeros((2, 2))])
    with pytest.raises(InvalidInputError):
        Game([np.zeros((2, 2))])
    # constant games are accepted
    g = Game.from_matrix(np.full((3, 3), 2.0))
    assert equal_row_sums(g) and rows_are_permutations(g, 0)


def test_json_round_trip_bit_exact(tmp_path, rng):
    games = [make_rps(0.1, 0.7), random_game((2, 3, 2), rng), Game.from_bimatrix(rng.normal(size=(2, 3)), rng.normal(size=(2, 3)))]
    for g in games:
        again = loads_game(dumps_game(g))
        assert again == g
        for a, b in zip(g.payoffs, again.payoffs):
            assert a.tobytes() == b.tobytes()
        assert dumps_game(again) == dumps_game(g)
    path = tmp_path / "g.json"
    save_game(games[1], path)
    assert load_game(path) == games[1]


def test_json_symmetric_shortcut():
    g = loads_game('{"symmetric_matrix": [[1, 2], [3, 0]]}')
    assert g.symmetric and g == Game.from_matrix([[1, 2], [3, 0]])
    with pytest.raises(InvalidInputError):
        loads_game('{"players": 3, "symmetric_matrix": [[1, 2], [3, 0]]}')


seat_counts = st.lists(st.integers(1, 3), min_size=2, max_size=3)


@settings(max_examples=60, deadline=None)
@given(counts=seat_counts, seed=st.integers(0, 2**32 - 1), t=st.floats(0, 1))
def test_utility_multilinear(counts, seed, t):
    rng = np.random.default_rng(seed)
    g = random_game(counts, rng)
    seats = [rng.dirichlet(np.ones(s)) for s in counts]
    y = rng.dirichlet(np.ones(counts[0]))
    mix = list(seats)
    mix[0] = t * seats[0] + (1 - t) * y
    mix[0] = mix[0] / mix[0].sum()
    other = list(seats)
    other[0] = y
    for i in range(len(counts)):
        lhs = utility(g, MixedProfile(tuple(mix)), i)
        rhs = t * utility(g, MixedProfile(tuple(seats)), i) + (1 - t) * utility(g, MixedProfile(tuple(other)), i)
        assert lhs == pytest.approx(rhs, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(counts=seat_counts, seed=st.integers(0, 2**32 - 1))
def test_pure_payoffs_match_bruteforce_and_average(counts, seed):
    rng = np.random.default_rng(seed)
    g = random_game(counts, rng)
    x = MixedProfile(tuple(rng.dirichlet(np.ones(s)) for s in counts))
    for i in range(len(counts)):
        pures = [utility_pure_vs_rest(g, i, a, x) for a in range(counts[i])]
        for a, v in enumerate(pures):
            assert v == pytest.approx(pure_vs_rest_bruteforce(g.payoffs, x.strategies, i, a), abs=1e-12)
            row = reduced_matrix(g, i)[a] @ opponent_distribution(x.strategies, i)
            assert v == pytest.approx(row, abs=1e-12)
        seats = list(x.strategies)
        seats[i] = np.full(counts[i], 1.0 / counts[i])
        assert np.mean(pures) == pytest.approx(utility(g, MixedProfile(tuple(seats)), i), abs=1e-12)
