"""Continuous-time two-color Polya process toolkit.

Simulation of Poissonized urns, exact mixed-moment trajectories from the
bootstrapped moment ODE system, Gamma limit laws, and statistical
verification of simulation against theory.
"""

__version__ = "0.1.0"

from .limits import (
    GammaLimit,
    bagchi_pal_limit,
    gamma_cdf,
    gamma_pdf,
    play_the_winner_limit,
    randomized_limit,
)
from .moments import (
    MomentSystem,
    MomentTrajectory,
    asymptotic_K,
    asymptotic_M,
    build_An,
    build_moment_ode,
    eigenvalues_An,
    rising_factorial,
    solve_moments,
    stirling2,
    total_moment,
)
from .rules import (
    EntryDistribution,
    RandomizedRule,
    ReplacementRule,
    ValidationReport,
    deterministic_entry_moment,
    entry_mixed_moment,
    validate_deterministic,
    validate_randomized,
)
from .simulate import (
    EnsembleResult,
    ReplicaResult,
    SimConfig,
    UrnState,
    expected_event_count,
    next_event,
    run_ensemble,
    run_replica,
)
from .verify import (
    VerificationReport,
    build_report,
    empirical_moment,
    ks_statistic,
    pearson_correlation,
    proportion_white,
    scaled_samples,
)
