#pragma once

#include <string>

#include "sgtk/csr_graph.hpp"

namespace sgtk {

enum class EdgeListFormat {
  MatrixMarket,  // coordinate general/symmetric, pattern/real/integer, 1-based
  Tsv,           // "src dst [value]" per line, '#' comments, 0-based ids
};

/// Parses an edge-list file into CSR. Duplicate entries are kept as-is
/// (normalize_graph collapses them). TSV ids may be sparse; they are
/// remapped to dense 0..n-1 through a sorted-unique id table. MatrixMarket
/// ids come from the declared header dimensions, converted to 0-based.
CsrGraph load_edge_list(const std::string& path, EdgeListFormat format);

/// Format from file extension: ".mtx" is MatrixMarket, anything else TSV.
CsrGraph load_edge_list(const std::string& path);

struct NormalizeOpts {
  bool symmetrize = false;
  bool add_self_loops = false;
  bool dedupe = true;
};

/// Canonicalizes a graph. Steps run in the order dedupe (values summed),
/// symmetrize (missing reverse edges inserted with the forward value),
/// add_self_loops (missing (i,i) inserted, value 1.0 when weighted).
/// Inserting only missing edges makes the operation idempotent.
CsrGraph normalize_graph(const CsrGraph& g, NormalizeOpts opts);

/// Symmetric normalization for GCN aggregation:
/// values[e] = 1/sqrt(deg(row(e)) * deg(col(e))), degrees counted per CSR
/// row. Expects self-loops already present; throws DegreeError on an
/// empty row.
CsrGraph gcn_normalize_values(const CsrGraph& g);

}  // namespace sgtk
