#include "sgtk/sgt_transform.hpp"

#include <algorithm>

#include "sgtk/errors.hpp"
#include "sgtk/threading.hpp"

namespace sgtk {

namespace {

inline std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
  return (a + b - 1) / b;
}

}  // namespace

TransformedGraph sgt_transform(const CsrGraph& g, TileGeometry geom,
                               int threads) {
  if (geom.blk_h == 0 || geom.blk_w == 0)
    throw GeometryError("tile dimensions must be positive");
  validate_csr(g);

  TransformedGraph t;
  t.csr = g;
  t.geometry = geom;

  const std::size_t num_windows = ceil_div(g.num_nodes, geom.blk_h);
  const std::size_t num_edges = g.num_edges();
  t.edge_to_row.resize(num_edges);
  t.edge_to_column.resize(num_edges);
  t.block_partition.assign(num_windows, 0);
  t.window_offsets.assign(num_windows + 1, 0);

  // Pass 1: per-window sorted-unique neighbor columns (counts only, so the
  // concatenated layout can be sized before the parallel fill).
  std::vector<std::vector<NodeId>> uniques(num_windows);
  parallel_windows(num_windows, threads, [&](std::size_t w) {
    const std::size_t row_lo = w * geom.blk_h;
    const std::size_t row_hi = std::min(g.num_nodes, row_lo + geom.blk_h);
    const std::uint64_t e_lo = g.node_pointer[row_lo];
    const std::uint64_t e_hi = g.node_pointer[row_hi];
    std::vector<NodeId> cols(g.edge_list.begin() + e_lo,
                             g.edge_list.begin() + e_hi);
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    t.block_partition[w] = std::uint32_t(ceil_div(cols.size(), geom.blk_w));
    uniques[w] = std::move(cols);
  });

  for (std::size_t w = 0; w < num_windows; ++w)
    t.window_offsets[w + 1] = t.window_offsets[w] + uniques[w].size();
  t.window_unique_cols.resize(t.window_offsets[num_windows]);

  // Pass 2: write the concatenated unique columns and the per-edge
  // compressed coordinates. Windows own disjoint ranges of every output
  // array, so this is deterministic for any worker count.
  parallel_windows(num_windows, threads, [&](std::size_t w) {
    const std::vector<NodeId>& cols = uniques[w];
    std::copy(cols.begin(), cols.end(),
              t.window_unique_cols.begin() + t.window_offsets[w]);
    const std::size_t row_lo = w * geom.blk_h;
    const std::size_t row_hi = std::min(g.num_nodes, row_lo + geom.blk_h);
    for (std::size_t r = row_lo; r < row_hi; ++r) {
      for (auto e = g.row_begin(r); e < g.row_end(r); ++e) {
        t.edge_to_row[e] = NodeId(r);
        const auto it =
            std::lower_bound(cols.begin(), cols.end(), g.edge_list[e]);
        t.edge_to_column[e] = std::uint32_t(it - cols.begin());
      }
    }
  });

  t.block_counter = 0;
  for (std::uint32_t bp : t.block_partition) t.block_counter += bp;
  return t;
}

TransformedGraph reblock(const TransformedGraph& t, std::uint32_t new_blk_w) {
  if (new_blk_w == 0) throw GeometryError("tile width must be positive");
  TransformedGraph out = t;
  out.geometry.blk_w = new_blk_w;
  out.block_counter = 0;
  for (std::size_t w = 0; w < t.num_windows(); ++w) {
    const std::uint64_t unique =
        t.window_offsets[w + 1] - t.window_offsets[w];
    out.block_partition[w] = std::uint32_t(ceil_div(unique, new_blk_w));
    out.block_counter += out.block_partition[w];
  }
  return out;
}

BlockStats block_stats(const TransformedGraph& t) {
  BlockStats s;
  s.block_counter = t.block_counter;
  s.capacity = t.block_counter * t.geometry.blk_h * t.geometry.blk_w;
  s.nnz = t.csr.num_edges();
  s.mean_tile_density = s.capacity ? double(s.nnz) / double(s.capacity) : 0.0;
  return s;
}

}  // namespace sgtk
