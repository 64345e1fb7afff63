"""Random walks with little backtracking on clique-partitioned regular graphs."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("cliquewalk")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .graph_core import (
    CliquePartition,
    CliqueRegularGraph,
    Graph,
    StructuralFlags,
    check_incidence_identity,
    incidence_matrix,
    load_graph_json,
    save_graph_json,
    structural_flags,
    validate,
)
from .spectrum import (
    SpectralSummary,
    Spectrum,
    eigenvalues_symmetric,
    spectral_summary,
    spectrum_of,
)
from .mixing_theory import (
    CaseLabel,
    ComparisonConstants,
    MixingReport,
    PartialGeometryParams,
    Regime,
    WalkParams,
    analyze_summary,
    check_case_bounds,
    classify_case,
    comparison_constants,
    flat_regime_ratio_bounds,
    delta_from_epsilon,
    latin_crossover_report,
    mixing_rate_clique_walk,
    mixing_rate_nbrw,
    mixing_rate_simple,
    pg_mixing_report,
    pg_spectrum,
    psi,
    qk_growth_rate_closed_form,
)
from .walk_engine import (
    LiftedChain,
    MatrixSequence,
    Qk_matrix,
    Rk_recurrence,
    brute_force_weighted_walks,
    build_lifted_chain,
    chebyshev_U,
    empirical_mixing_rate,
    lifted_k_step,
    monte_carlo,
    mu_ik,
    qk_empirical_growth,
    qk_scalar,
    run_verification,
    transition_matrix,
)
