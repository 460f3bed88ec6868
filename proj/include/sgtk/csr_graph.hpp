#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sgtk {

using NodeId = std::uint32_t;

/// Adjacency in compressed sparse row form. `values` is either empty
/// (unweighted; kernels treat every edge as 1.0) or has one entry per edge.
struct CsrGraph {
  std::size_t num_nodes = 0;
  std::vector<std::uint64_t> node_pointer{0};  // length num_nodes + 1
  std::vector<NodeId> edge_list;               // column ids, sorted per row
  std::vector<float> values;                   // empty or num_edges long

  std::size_t num_edges() const { return edge_list.size(); }
  bool has_values() const { return !values.empty(); }

  std::uint64_t row_begin(std::size_t r) const { return node_pointer[r]; }
  std::uint64_t row_end(std::size_t r) const { return node_pointer[r + 1]; }
  std::size_t degree(std::size_t r) const {
    return std::size_t(row_end(r) - row_begin(r));
  }
  float edge_value(std::size_t e) const {
    return values.empty() ? 1.0f : values[e];
  }
};

/// Throws Error unless g is well-formed CSR. `require_sorted_unique`
/// additionally demands strictly ascending columns per row (the normalized
/// form every kernel expects).
void validate_csr(const CsrGraph& g, bool require_sorted_unique = true);

struct Triple {
  NodeId row;
  NodeId col;
  float value;
};

/// Sorts triples by (row, col) — a stable sort, so duplicate entries keep
/// file order — and assembles CSR. No deduplication here.
CsrGraph csr_from_triples(std::size_t num_nodes, std::vector<Triple> triples,
                          bool with_values);

}  // namespace sgtk
