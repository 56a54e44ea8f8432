"""Incentive dynamics on finite normal-form games."""

from .analysis import (
    StabilityReport,
    classify_long_run,
    iss_margin,
    jacobian_eigenvalues,
    kl_decay_check,
    kl_divergence,
    lyapunov_f,
    stability_report,
)
from .dynamics import Trajectory, TrajectoryConfig, integrate, speed_grid, vector_field
from .equilibria import (
    EquilibriumReport,
    find_incentive_equilibria,
    incentive_residual,
    nash_residual,
    proposition1_check,
    uniform_nash_iff_equal_row_sums,
)
from .exceptions import BoundaryError, InvalidInputError, PreconditionError, UnsupportedShapeError
from .game import (
    Game,
    MixedProfile,
    RowStats,
    equal_row_sums,
    load_game,
    make_rps,
    make_uniform_profile,
    random_interior_profile,
    reduced_matrix,
    row_stats,
    rows_are_permutations,
    save_game,
    utility,
    utility_pure_vs_rest,
)
from .incentives import IncentiveSpec, dash_zero_set_check, incentive

__version__ = "0.1.0"
