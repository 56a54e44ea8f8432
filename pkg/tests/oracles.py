"""Brute-force reference evaluations, independent of the package's reduced matrices."""

import itertools

import numpy as np


def utility_bruteforce(payoffs, seats, i):
    total = 0.0
    for prof in itertools.product(*(range(len(x)) for x in seats)):
        w = 1.0
        for j, a in enumerate(prof):
            w *= seats[j][a]
        total += w * payoffs[i][prof]
    return total


def pure_vs_rest_bruteforce(payoffs, seats, i, alpha):
    pinned = list(seats)
    e = np.zeros(len(seats[i]))
    e[alpha] = 1.0
    pinned[i] = e
    return utility_bruteforce(payoffs, pinned, i)


def dash_bruteforce(payoffs, seats, i):
    u = utility_bruteforce(payoffs, seats, i)
    out = []
    ranges = [range(len(x)) for j, x in enumerate(seats) if j != i]
    for alpha in range(len(seats[i])):
        acc = 0.0
        for rest in itertools.product(*ranges):
            prof = list(rest)
            prof.insert(i, alpha)
            acc += max(payoffs[i][tuple(prof)] - u, 0.0)
        out.append(acc)
    return np.array(out)
