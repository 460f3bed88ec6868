#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sgtk/dense_matrix.hpp"
#include "sgtk/sgt_transform.hpp"

namespace sgtk {

enum class Precision {
  Fp32,  // plain single precision
  Tf32,  // multiplicand mantissas rounded to 10 bits, f32 accumulation
};

/// Per-edge scalar output aligned index-for-index with CsrGraph::edge_list.
using EdgeValList = std::vector<float>;

/// Per window, tiles with index < cut run on the dense-tile path; the rest
/// fall back to per-edge scalar processing.
struct HybridSplitPlan {
  double ratio = 1.0;
  std::vector<std::uint32_t> per_window_tile_cut;
};

/// cut[w] = floor(ratio * block_partition[w]). Throws RangeError unless
/// 0 <= ratio <= 1.
HybridSplitPlan make_split_plan(const TransformedGraph& t, double ratio = 1.0);

struct GatheredTile {
  DenseMatrix a_tile;           // blk_h x blk_w, zeros where no edge
  std::vector<NodeId> x_index;  // blk_w source rows; num_nodes = padding lane
};

/// Materializes one tile: the dense blk_h x blk_w block of adjacency values
/// plus the feature-row gather indices. Ragged lanes use the sentinel id
/// num_nodes, which gathers a zero row.
GatheredTile gather_tile(const TransformedGraph& t, std::size_t window,
                         std::size_t tile);

/// Hybrid tiled SpMM: out = A * x, rows of A taken from t. Tiles below the
/// plan's cut run as blk_h x blk_w by blk_w x cols dense products against
/// staged feature rows; the rest are accumulated edge-by-edge. Feature width
/// is padded internally to a multiple of blk_h with zero columns, which are
/// stripped on output. `edge_values`, when non-empty, overrides the graph's
/// stored values (used for attention weights).
DenseMatrix spmm_hybrid(const TransformedGraph& t, const DenseMatrix& x,
                        const HybridSplitPlan& plan,
                        Precision prec = Precision::Fp32, int threads = 0,
                        std::span<const float> edge_values = {});

/// Hybrid tiled SDDMM: values[e] = a(e) * dot(x[row(e)], y[col(e)]) for
/// every edge, in edge_list order. The tile path computes per-tile
/// blk_h x dim by dim x blk_w products and scatters only the positions that
/// are non-zeros of A. Callers typically reblock t to blk_w = 16 first.
EdgeValList sddmm_hybrid(const TransformedGraph& t, const DenseMatrix& x,
                         const DenseMatrix& y, const HybridSplitPlan& plan,
                         Precision prec = Precision::Fp32, int threads = 0,
                         std::span<const float> edge_values = {});

/// Rounds a float's mantissa to 10 explicit bits, ties to even; sign and
/// exponent are untouched. Infinities and NaNs pass through.
float tf32_round_value(float v);

/// Elementwise tf32_round_value.
DenseMatrix tf32_round(const DenseMatrix& m);

}  // namespace sgtk
