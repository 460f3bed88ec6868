"""Tiled sparse graph kernels.

Transforms a sparse adjacency into dense row-window tiles once, then runs
hybrid tile/scalar SpMM (neighbor aggregation), SDDMM (edge features) and
GCN/AGNN forward passes over it. Naive oracles are exported for verification.
"""

from sgtk._core import (
    BlockStats,
    CsrGraph,
    HybridSplitPlan,
    TileGeometry,
    TransformedGraph,
    agnn_forward,
    block_stats,
    csr_from_coo,
    edge_softmax,
    gather_tile,
    gcn_forward,
    gcn_normalize_values,
    load_edge_list,
    load_sgt,
    make_blockdense_graph,
    make_random_graph,
    make_split_plan,
    make_synthetic,
    normalize_graph,
    oracle_dense_gcn,
    oracle_sddmm,
    oracle_spmm,
    reblock,
    save_sgt,
    sddmm_hybrid,
    sgt_transform,
    spmm_hybrid,
    tf32_round,
)

__version__ = "0.1.0"

__all__ = [
    "BlockStats",
    "CsrGraph",
    "HybridSplitPlan",
    "TileGeometry",
    "TransformedGraph",
    "agnn_forward",
    "block_stats",
    "csr_from_coo",
    "edge_softmax",
    "gather_tile",
    "gcn_forward",
    "gcn_normalize_values",
    "load_edge_list",
    "load_sgt",
    "make_blockdense_graph",
    "make_random_graph",
    "make_split_plan",
    "make_synthetic",
    "normalize_graph",
    "oracle_dense_gcn",
    "oracle_sddmm",
    "oracle_spmm",
    "reblock",
    "save_sgt",
    "sddmm_hybrid",
    "sgt_transform",
    "spmm_hybrid",
    "tf32_round",
]
