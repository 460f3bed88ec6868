#include "sgtk/synthetic.hpp"

#include <algorithm>
#include <random>
#include <unordered_map>

#include "sgtk/errors.hpp"

namespace sgtk {

CsrGraph make_random_graph(std::size_t n, double p, std::uint64_t seed) {
  if (n < 1) throw RangeError("random graph needs n >= 1");
  if (!(p >= 0.0 && p <= 1.0))
    throw RangeError("edge probability must be within [0, 1]");
  CsrGraph g;
  g.num_nodes = n;
  g.node_pointer.assign(n + 1, 0);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (p >= 1.0 || (p > 0.0 && coin(rng))) g.edge_list.push_back(NodeId(j));
    }
    g.node_pointer[i + 1] = g.edge_list.size();
  }
  return g;
}

CsrGraph make_blockdense_graph(std::size_t windows,
                               std::size_t tiles_per_window,
                               std::uint64_t seed, TileGeometry geom) {
  if (windows < 1 || tiles_per_window < 1)
    throw RangeError("blockdense graph needs windows >= 1 and tiles >= 1");
  const std::size_t n = windows * geom.blk_h;
  const std::size_t cols_per_window = tiles_per_window * geom.blk_w;
  if (cols_per_window > n)
    throw RangeError("blockdense: more tile columns than nodes");

  CsrGraph g;
  g.num_nodes = n;
  g.node_pointer.assign(n + 1, 0);
  g.edge_list.reserve(n * cols_per_window);
  std::vector<NodeId> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = NodeId(i);

  for (std::size_t w = 0; w < windows; ++w) {
    // Distinct columns shared by all rows of the window: every tile comes
    // out 100% dense and nnz equals tile capacity.
    std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ull * (w + 1));
    for (std::size_t i = 0; i < cols_per_window; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    std::vector<NodeId> cols(pool.begin(), pool.begin() + cols_per_window);
    std::sort(cols.begin(), cols.end());
    for (std::size_t r = 0; r < geom.blk_h; ++r) {
      g.edge_list.insert(g.edge_list.end(), cols.begin(), cols.end());
      g.node_pointer[w * geom.blk_h + r + 1] = g.edge_list.size();
    }
  }
  return g;
}

namespace {

std::unordered_map<std::string, std::string> parse_kv(
    const std::string& body) {
  std::unordered_map<std::string, std::string> kv;
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto comma = body.find(',', pos);
    if (comma == std::string::npos) comma = body.size();
    const std::string item = body.substr(pos, comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw RangeError("bad synthetic spec item '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
    pos = comma + 1;
  }
  return kv;
}

std::uint64_t get_u64(const std::unordered_map<std::string, std::string>& kv,
                      const std::string& key, std::uint64_t fallback,
                      bool required) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    if (required) throw RangeError("synthetic spec missing '" + key + "'");
    return fallback;
  }
  return std::stoull(it->second);
}

}  // namespace

bool is_synthetic_spec(const std::string& spec) {
  return spec.rfind("random:", 0) == 0 || spec.rfind("blockdense:", 0) == 0;
}

CsrGraph make_synthetic(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw RangeError("synthetic spec must look like 'random:n=...,p=...'");
  const std::string kind = spec.substr(0, colon);
  const auto kv = parse_kv(spec.substr(colon + 1));
  if (kind == "random") {
    const auto n = get_u64(kv, "n", 0, true);
    const auto it = kv.find("p");
    if (it == kv.end()) throw RangeError("synthetic spec missing 'p'");
    const double p = std::stod(it->second);
    return make_random_graph(n, p, get_u64(kv, "seed", 1, false));
  }
  if (kind == "blockdense") {
    return make_blockdense_graph(get_u64(kv, "windows", 0, true),
                                 get_u64(kv, "tiles", 0, true),
                                 get_u64(kv, "seed", 1, false));
  }
  throw RangeError("unknown synthetic kind '" + kind + "'");
}

}  // namespace sgtk
