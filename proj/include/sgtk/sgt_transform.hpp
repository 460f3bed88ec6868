#pragma once

#include <cstdint>
#include <span>

#include "sgtk/csr_graph.hpp"

namespace sgtk {

/// Tile shape: row windows of blk_h consecutive rows, compressed columns
/// grouped into tiles of blk_w.
struct TileGeometry {
  std::uint32_t blk_h = 16;
  std::uint32_t blk_w = 8;
};

/// Output of the sparse-to-dense tiling transform. Each row window's
/// neighbor columns are sorted, deduplicated and packed left; every edge
/// gets a compressed (row, column) coordinate inside its window. The
/// original CSR rides along for the scalar path and the oracles.
struct TransformedGraph {
  CsrGraph csr;
  TileGeometry geometry;
  std::vector<NodeId> edge_to_row;              // CSR row of each edge
  std::vector<std::uint32_t> edge_to_column;    // window-relative packed col
  std::vector<std::uint32_t> block_partition;   // tiles per window
  std::vector<std::uint64_t> window_offsets;    // num_windows + 1
  std::vector<NodeId> window_unique_cols;       // concatenated, sorted per window
  std::uint64_t block_counter = 0;              // total tiles

  std::size_t num_windows() const { return block_partition.size(); }

  std::span<const NodeId> window_cols(std::size_t w) const {
    return {window_unique_cols.data() + window_offsets[w],
            std::size_t(window_offsets[w + 1] - window_offsets[w])};
  }
};

struct BlockStats {
  std::uint64_t block_counter = 0;
  std::uint64_t capacity = 0;  // block_counter * blk_h * blk_w
  std::uint64_t nnz = 0;
  double mean_tile_density = 0.0;  // nnz / capacity
};

/// The transform itself. Deterministic and pure: the result depends only on
/// g and geom, never on the worker count. Throws GeometryError on a zero
/// tile dimension.
TransformedGraph sgt_transform(const CsrGraph& g, TileGeometry geom = {},
                               int threads = 0);

/// Re-tiles the compressed columns at a different width without touching
/// the edge maps. Used to reuse one transform for kernels with a different
/// minimum tile granularity.
TransformedGraph reblock(const TransformedGraph& t, std::uint32_t new_blk_w);

BlockStats block_stats(const TransformedGraph& t);

}  // namespace sgtk
