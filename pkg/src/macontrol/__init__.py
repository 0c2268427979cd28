"""Controllability analysis of leader-follower multi-agent networks."""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .graph_core import (
    DirectedGraph,
    DistancePartition,
    Edge,
    adjacency,
    bfs_relabel,
    distance_partition,
    format_graph,
    laplacian,
    load_graph,
    min_forest_root_count,
    parse_graph,
    reachable_set,
    spanning_tree_roots,
)
from .leader_select import (
    ControllabilityVerdict,
    LeaderSet,
    controllability_matrix,
    input_matrix,
    is_slc,
    kalman_verdict,
    min_leader_bounds,
    minimal_leader_sets,
    omega_matrix,
    pbh_verdict,
    r_leader_test,
    slc_candidates,
)
from .regular_graphs import (
    path_count_matrix,
    regular_leader_lower_bound,
    regular_never_slc,
    regular_slc_by_agent1,
    regular_structural,
    walk_sum_matrix,
)
from .spectral import Spectrum, eigen_decompose, is_cyclic, jordan_block_sizes, numerical_rank
from .structural import (
    certify_by_random_weights,
    min_structural_leaders,
    structurally_controllable,
    tree_eig_matrix,
    tree_weight_controllable,
)
from .weight_adjust import AdjustmentPlan, adjust_weights, verify_plan
