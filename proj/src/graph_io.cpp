#include "sgtk/graph_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "sgtk/errors.hpp"

namespace sgtk {

namespace {

constexpr std::uint64_t kMaxNodeId = (std::uint64_t(1) << 32) - 1;

struct RawEdge {
  std::uint64_t src;
  std::uint64_t dst;
  float value;
};

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::uint64_t parse_id(const std::string& tok, std::size_t line_no) {
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError("bad node id '" + tok + "'", line_no);
  }
  if (pos != tok.size() || tok[0] == '-')
    throw ParseError("bad node id '" + tok + "'", line_no);
  return v;
}

float parse_value(const std::string& tok, std::size_t line_no) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError("bad edge value '" + tok + "'", line_no);
  }
  if (pos != tok.size())
    throw ParseError("bad edge value '" + tok + "'", line_no);
  return float(v);
}

CsrGraph load_tsv(std::ifstream& in) {
  std::vector<RawEdge> edges;
  bool any_value = false;
  bool any_plain = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    if (is_blank(line)) continue;
    std::istringstream ss(line);
    std::string a, b, c, extra;
    ss >> a >> b >> c >> extra;
    if (b.empty()) throw ParseError("expected 'src dst [value]'", line_no);
    if (!extra.empty()) throw ParseError("too many fields", line_no);
    RawEdge e{parse_id(a, line_no), parse_id(b, line_no), 1.0f};
    if (e.src > kMaxNodeId || e.dst > kMaxNodeId)
      throw OverflowError("node id exceeds 32-bit range at line " +
                          std::to_string(line_no));
    if (!c.empty()) {
      e.value = parse_value(c, line_no);
      if (any_plain)
        throw ParseError("mixed weighted and unweighted lines", line_no);
      any_value = true;
    } else {
      if (any_value)
        throw ParseError("mixed weighted and unweighted lines", line_no);
      any_plain = true;
    }
    edges.push_back(e);
  }

  // Remap ids through a sorted-unique table so the node space is dense.
  std::vector<std::uint64_t> ids;
  ids.reserve(edges.size() * 2);
  for (const RawEdge& e : edges) {
    ids.push_back(e.src);
    ids.push_back(e.dst);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto remap = [&](std::uint64_t id) {
    return NodeId(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  std::vector<Triple> triples;
  triples.reserve(edges.size());
  for (const RawEdge& e : edges)
    triples.push_back({remap(e.src), remap(e.dst), e.value});
  return csr_from_triples(ids.size(), std::move(triples), any_value);
}

CsrGraph load_matrix_market(std::ifstream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++line_no;

  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix")
    throw ParseError("not a MatrixMarket matrix header", line_no);
  if (format != "coordinate")
    throw ParseError("only coordinate format is supported", line_no);
  const bool pattern = field == "pattern";
  if (!pattern && field != "real" && field != "integer")
    throw ParseError("unsupported field type '" + field + "'", line_no);
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
    throw ParseError("unsupported symmetry '" + symmetry + "'", line_no);

  // Size line follows the comment block.
  std::uint64_t rows = 0, cols = 0, entries = 0;
  bool have_size = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line[0] == '%') continue;
    if (is_blank(line)) continue;
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> entries))
      throw ParseError("bad size line", line_no);
    have_size = true;
    break;
  }
  if (!have_size) throw ParseError("missing size line", line_no + 1);
  const std::uint64_t n = std::max(rows, cols);
  if (n > kMaxNodeId + 1)
    throw OverflowError("matrix dimension exceeds 32-bit node range");

  std::vector<Triple> triples;
  triples.reserve(entries);
  std::uint64_t seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line) || line[0] == '%') continue;
    std::istringstream ss(line);
    std::string a, b, c;
    ss >> a >> b >> c;
    if (b.empty()) throw ParseError("expected 'row col [value]'", line_no);
    const std::uint64_t i = parse_id(a, line_no);
    const std::uint64_t j = parse_id(b, line_no);
    if (i < 1 || j < 1 || i > rows || j > cols)
      throw ParseError("entry outside declared dimensions", line_no);
    float v = 1.0f;
    if (!pattern) {
      if (c.empty()) throw ParseError("missing value", line_no);
      v = parse_value(c, line_no);
    }
    triples.push_back({NodeId(i - 1), NodeId(j - 1), v});
    if (symmetric && i != j)
      triples.push_back({NodeId(j - 1), NodeId(i - 1), v});
    ++seen;
  }
  if (seen != entries)
    throw ParseError("entry count does not match header (" +
                         std::to_string(seen) + " of " +
                         std::to_string(entries) + ")",
                     line_no);
  return csr_from_triples(n, std::move(triples), !pattern);
}

}  // namespace

CsrGraph load_edge_list(const std::string& path, EdgeListFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return format == EdgeListFormat::MatrixMarket ? load_matrix_market(in)
                                                : load_tsv(in);
}

CsrGraph load_edge_list(const std::string& path) {
  const bool mtx =
      path.size() >= 4 && path.compare(path.size() - 4, 4, ".mtx") == 0;
  return load_edge_list(
      path, mtx ? EdgeListFormat::MatrixMarket : EdgeListFormat::Tsv);
}

CsrGraph normalize_graph(const CsrGraph& g, NormalizeOpts opts) {
  validate_csr(g, /*require_sorted_unique=*/false);
  const bool weighted = g.has_values();

  std::vector<Triple> triples;
  triples.reserve(g.num_edges());
  for (std::size_t r = 0; r < g.num_nodes; ++r) {
    for (auto e = g.row_begin(r); e < g.row_end(r); ++e)
      triples.push_back({NodeId(r), g.edge_list[e], g.edge_value(e)});
  }
  // stable: duplicate (row, col) entries keep their relative order, which
  // is what makes repeated normalization a fixed point
  std::stable_sort(triples.begin(), triples.end(),
                   [](const Triple& a, const Triple& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });

  if (opts.dedupe) {
    std::vector<Triple> unique;
    unique.reserve(triples.size());
    for (const Triple& t : triples) {
      if (!unique.empty() && unique.back().row == t.row &&
          unique.back().col == t.col) {
        unique.back().value += t.value;  // duplicate entries sum
      } else {
        unique.push_back(t);
      }
    }
    triples = std::move(unique);
  }

  auto contains = [&](NodeId r, NodeId c) {
    auto it = std::lower_bound(triples.begin(), triples.end(), std::pair(r, c),
                               [](const Triple& t, const std::pair<NodeId, NodeId>& k) {
                                 return t.row != k.first ? t.row < k.first
                                                         : t.col < k.second;
                               });
    return it != triples.end() && it->row == r && it->col == c;
  };

  // Only missing edges are inserted, so a second pass is a no-op and the
  // whole operation is idempotent.
  std::vector<Triple> added;
  if (opts.symmetrize) {
    NodeId prev_r = 0, prev_c = 0;
    bool have_prev = false;
    for (const Triple& t : triples) {
      if (have_prev && t.row == prev_r && t.col == prev_c) continue;
      prev_r = t.row;
      prev_c = t.col;
      have_prev = true;
      if (t.row != t.col && !contains(t.col, t.row))
        added.push_back({t.col, t.row, t.value});
    }
  }
  if (opts.add_self_loops) {
    // Symmetrize mirrors are never diagonal, so the base list is enough.
    for (std::size_t i = 0; i < g.num_nodes; ++i) {
      if (!contains(NodeId(i), NodeId(i)))
        added.push_back({NodeId(i), NodeId(i), 1.0f});
    }
  }
  triples.insert(triples.end(), added.begin(), added.end());
  return csr_from_triples(g.num_nodes, std::move(triples), weighted);
}

CsrGraph gcn_normalize_values(const CsrGraph& g) {
  validate_csr(g);
  std::vector<double> inv_sqrt_deg(g.num_nodes);
  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    const std::size_t deg = g.degree(i);
    if (deg == 0)
      throw DegreeError("row " + std::to_string(i) + " has no edges");
    inv_sqrt_deg[i] = 1.0 / std::sqrt(double(deg));
  }
  CsrGraph out = g;
  out.values.resize(g.num_edges());
  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    for (auto e = g.row_begin(i); e < g.row_end(i); ++e)
      out.values[e] = float(inv_sqrt_deg[i] * inv_sqrt_deg[g.edge_list[e]]);
  }
  return out;
}

}  // namespace sgtk
