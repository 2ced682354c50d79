"""Desk-scale laboratory for triangle-free subhypergraphs of random 4-uniform hypergraphs.

Generate binomial random k-uniform hypergraphs, detect and count generalized
triangles, solve maximum triangle-free subhypergraph and maximum 4-partite
cut exactly at small scale, and compute the exact degree statistics,
low-pair sets, and defect decompositions used to diagnose when every maximum
triangle-free subhypergraph is 4-partite.
"""

from .hypergraph import (
    EdgeSet,
    Hypergraph,
    PairGraph,
    VertexPartition,
    build_hypergraph,
    co_neighborhood,
    common_degree,
    complete_hypergraph,
    crossing_edges,
    crossing_link,
    edge_subset,
    empty_hypergraph,
    from_text,
    is_balanced,
    link,
    partition_from_classes,
    read_text,
    restrict_bracket,
    shadow_graph,
    to_text,
    turan_hypergraph,
    write_text,
)
from .motifs import (
    MotifWitness,
    count_T,
    count_gadgets,
    find_T,
    gadget_witness,
    generalized_triangle,
    t_copy_triples,
    t_through_edges,
)
from .proplab import (
    AuditConstants,
    AuditReport,
    ConcentrationReport,
    DecompositionReport,
    GapReport,
    LowPairReport,
    SizeBalanceReport,
    chernoff_c,
    concentration_report,
    covered_quadruples,
    decomposition,
    defect_audit,
    heavy_triple_count,
    low_pair_cut_gap,
    low_pairs,
    size_balance_report,
)
from .randgen import (
    TrialSeed,
    colex_rank,
    colex_unrank,
    derive_seed,
    random_partition,
    sample_gknp,
    sample_gknp_bernoulli,
)
from .solvers import (
    BipartiteHalf,
    Budget,
    SearchStats,
    SolveResult,
    best_partition_for,
    bipartite_half,
    is_4partite,
    max_cut4_exact,
    max_cut4_local,
    max_tfree_exact,
    max_tfree_repair,
)

__version__ = "0.1.0"
