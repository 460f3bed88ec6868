#include "sgtk/csr_graph.hpp"

#include <algorithm>
#include <cmath>

#include "sgtk/errors.hpp"

namespace sgtk {

void validate_csr(const CsrGraph& g, bool require_sorted_unique) {
  if (g.node_pointer.size() != g.num_nodes + 1)
    throw Error("csr: node_pointer length must be num_nodes + 1");
  if (g.node_pointer.front() != 0) throw Error("csr: node_pointer[0] != 0");
  if (g.node_pointer.back() != g.num_edges())
    throw Error("csr: node_pointer end does not match edge count");
  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    if (g.node_pointer[i] > g.node_pointer[i + 1])
      throw Error("csr: node_pointer not non-decreasing");
  }
  for (NodeId c : g.edge_list) {
    if (std::size_t(c) >= g.num_nodes)
      throw Error("csr: column id out of range");
  }
  if (require_sorted_unique) {
    for (std::size_t r = 0; r < g.num_nodes; ++r) {
      for (auto e = g.row_begin(r) + 1; e < g.row_end(r); ++e) {
        if (g.edge_list[e - 1] >= g.edge_list[e])
          throw Error("csr: columns not strictly ascending within a row");
      }
    }
  }
  if (!g.values.empty()) {
    if (g.values.size() != g.num_edges())
      throw Error("csr: values length does not match edge count");
    for (float v : g.values) {
      if (!std::isfinite(v)) throw Error("csr: non-finite edge value");
    }
  }
}

CsrGraph csr_from_triples(std::size_t num_nodes, std::vector<Triple> triples,
                          bool with_values) {
  std::stable_sort(triples.begin(), triples.end(),
                   [](const Triple& a, const Triple& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });
  CsrGraph g;
  g.num_nodes = num_nodes;
  g.node_pointer.assign(num_nodes + 1, 0);
  g.edge_list.reserve(triples.size());
  if (with_values) g.values.reserve(triples.size());
  for (const Triple& t : triples) {
    g.node_pointer[t.row + 1]++;
    g.edge_list.push_back(t.col);
    if (with_values) g.values.push_back(t.value);
  }
  for (std::size_t i = 0; i < num_nodes; ++i)
    g.node_pointer[i + 1] += g.node_pointer[i];
  return g;
}

}  // namespace sgtk
