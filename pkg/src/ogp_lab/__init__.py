"""Shortest-path structures on sparse random graphs: simulation of overlaps
under graph resampling, Gibbs measures over spanning trees, and the matching
closed-form limit curves.
"""

__version__ = "0.1.0"

from .graphs import (
    CorrelatedPair,
    Graph,
    LayerDecomposition,
    Proxies,
    UNREACHABLE,
    bfs_layers,
    correlated_pair,
    gen_er,
    graph_from_adj,
    graph_from_edges,
    layer_intersection,
    proxies,
    read_edgelist,
    resample_pair,
    trajectory,
    write_edgelist,
)
from .trees import (
    ParentMap,
    ProductTreeMeasure,
    bp_dijkstra,
    local_search_p2,
    log_spt_count,
    project_path,
    shortest_path_dag,
    uniform_spt_sample,
)
from .overlaps import (
    OverlapReport,
    coupled_spt_sample,
    dag_overlap,
    overlap_report,
    path_overlap_experiment,
    tree_overlap_independent,
    tree_overlap_optimal,
)
from .theory import (
    LimitParams,
    critical_beta,
    critical_kernel_fraction,
    dag_overlap_curve,
    fpp_curve,
    free_energy_density,
    g_func,
    h_func,
    indep_tree_overlap_curve,
    internal_energy_density,
    limit_dag_overlap,
    limit_tree_overlap,
    rate_function,
    replica_overlap,
    tree_overlap_curve,
)
from .gibbs import (
    GibbsConfig,
    GraphStats,
    energy,
    exact_gibbs_law,
    exact_z_bruteforce,
    fpp_empirical,
    gibbs_config,
    glauber_run,
    graph_stats,
    ground_energy,
    gumbel_max_sample,
    kernel_of,
    kernel_valid,
    log_z_formula,
    lse_m,
    path_gibbs_sample,
    path_partition_function,
    phi_tilde_opt,
    psi_bounds,
    psi_estimate,
    sample_cond_ground,
    tau_sample,
    witness_statistic,
)
from .numerics import (
    DiscreteDist,
    legendre_sup,
    log_esp,
    w1_1d,
    w1_empirical_vs_dist,
    weighted_subset_dp,
    ztb_sample,
    ztp_sample,
)
from .landscape import (
    f_infinity,
    f_m_highdim,
    f_multilinear,
    grad_f,
    ising_fpp,
    lovasz_extension,
    lovasz_subgrad_ascent,
    projected_gradient_flow,
)
