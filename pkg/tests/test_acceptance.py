"""One pass/fail line per acceptance criterion, at the stated tolerances.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""

import time

import pytest

from incentive_dynamics import verify

CRITERIA = [
    ("1 uniform Nash iff equal row sums", verify.check_lemma1),
    ("2 dash residual at uniform, permuted rows", verify.check_row_excess),
    ("3 equal dash components, uniform interior equilibria", verify.check_permuted_rows),
    ("4 dash convergence on three RPS games", verify.check_convergence),
    *[(f"5 non-convergence under {s}", lambda s=s: verify.check_nonconvergence_one(s))
      for s in verify.NONCONVERGENCE_SPECS],
    ("6 unequal-rows counterexample", verify.check_counterexample_unequal_rows),
    ("7 unequal-excess counterexample", verify.check_counterexample_unequal_excess),
    ("8 ISS margin sampling and closed form", verify.check_iss),
    ("9 minimum of sum of reciprocals", verify.check_f_minimum),
    ("10 integrator conservation", verify.check_integrator),
]


@pytest.mark.parametrize("label,check", CRITERIA, ids=[c[0].split(" ", 1)[1] for c in CRITERIA])
def test_criterion(label, check):
    t0 = time.perf_counter()
    result = check()
    result.seconds = result.seconds or time.perf_counter() - t0
    print(f"\ncriterion {label}: {result.line()}")
    assert result.passed, result.line()
