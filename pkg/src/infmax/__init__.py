"""Influence maximization from samples.

Generate community-structured random networks, simulate independent-cascade
diffusion, draw (seed set, influence) samples, estimate marginal
contributions, and select seeds by overlap pruning against Greedy / top-k /
Random baselines.
"""

from .graphs import (
    CommunityLayout,
    RegimeLabel,
    WeightedGraph,
    classify_regimes,
    generate_er,
    generate_pa,
    generate_sbm,
    load_communities,
    load_edge_list,
    save_communities,
    save_edge_list,
)
from .cascade import (
    CascadeRealization,
    InfluenceEstimate,
    influence_exact,
    influence_exact_table,
    influence_mc,
    influenced_count,
    realize,
    seed_mask,
)
from .sampling import (
    MODE_FIXED,
    MODE_REDRAWN,
    ProductDistribution,
    Sample,
    SampleSet,
    draw_samples,
    empirical_nonubiquity,
    load_samples,
    save_samples,
    uniform_expected_k,
)
from .estimators import (
    FirstOrder,
    MarginalTable,
    SecondOrder,
    exact_first_order,
    exact_second_order,
    first_order,
    second_order,
)
from .solver import (
    SolverConfig,
    SolverError,
    SolverResult,
    overlap,
    run_cops,
    run_margi,
)
from .baselines import (
    OracleBudget,
    run_greedy,
    run_greedy_exact,
    run_random,
)
from .harness import (
    ExperimentConfig,
    ResultRow,
    evaluate_solution,
    make_default_q,
    run_experiment,
)

__version__ = "0.1.0"
