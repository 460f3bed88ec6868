#include "sgtk/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sgtk/errors.hpp"
#include "sgtk/gnn.hpp"
#include "sgtk/graph_io.hpp"
#include "sgtk/oracle.hpp"
#include "sgtk/synthetic.hpp"

namespace sgtk {

namespace {

constexpr std::size_t kDenseOracleNodeCap = 2048;

double time_once_ms(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

DenseMatrix dense_adjacency(const CsrGraph& g) {
  DenseMatrix a(g.num_nodes, g.num_nodes);
  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    for (auto e = g.row_begin(i); e < g.row_end(i); ++e)
      a.at(i, g.edge_list[e]) = g.edge_value(e);
  }
  return a;
}

// CLI-side AGNN reference built from the naive oracles plus local softmax
// and normalization; the tiled kernels are not involved.
DenseMatrix agnn_reference(const CsrGraph& g, const DenseMatrix& x,
                           const std::vector<AgnnLayerParams>& layers) {
  DenseMatrix h = x;
  CsrGraph attn_graph = g;
  for (const AgnnLayerParams& layer : layers) {
    DenseMatrix z(h.rows, h.cols);
    for (std::size_t i = 0; i < h.rows; ++i) {
      double sq = 0.0;
      for (std::size_t k = 0; k < h.cols; ++k)
        sq += double(h.at(i, k)) * h.at(i, k);
      if (sq == 0.0) continue;
      const float inv = float(1.0 / std::sqrt(sq));
      for (std::size_t k = 0; k < h.cols; ++k) z.at(i, k) = h.at(i, k) * inv;
    }
    CsrGraph unit = g;
    unit.values.assign(g.num_edges(), 1.0f);
    EdgeValList logits = oracle_sddmm(unit, z, z);
    for (float& v : logits) v *= layer.beta;
    attn_graph.values.assign(g.num_edges(), 0.0f);
    for (std::size_t i = 0; i < g.num_nodes; ++i) {
      const auto lo = g.row_begin(i);
      const auto hi = g.row_end(i);
      if (lo == hi) continue;
      float mx = logits[lo];
      for (auto e = lo + 1; e < hi; ++e) mx = std::max(mx, logits[e]);
      float sum = 0.0f;
      for (auto e = lo; e < hi; ++e) {
        attn_graph.values[e] = std::exp(logits[e] - mx);
        sum += attn_graph.values[e];
      }
      for (auto e = lo; e < hi; ++e) attn_graph.values[e] /= sum;
    }
    h = oracle_spmm(attn_graph, h);
  }
  return h;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string to_string(BenchKernel k) {
  switch (k) {
    case BenchKernel::Spmm: return "spmm";
    case BenchKernel::Sddmm: return "sddmm";
    case BenchKernel::Gcn: return "gcn";
    case BenchKernel::Agnn: return "agnn";
  }
  return "?";
}

BenchReport run_bench(const BenchConfig& cfg) {
  if (cfg.repeats < 1) throw RangeError("repeats must be >= 1");
  if (cfg.dims < 1) throw RangeError("dims must be >= 1");

  CsrGraph raw = is_synthetic_spec(cfg.dataset) ? make_synthetic(cfg.dataset)
                                                : load_edge_list(cfg.dataset);
  NormalizeOpts opts;
  if (cfg.kernel == BenchKernel::Gcn) {
    opts.symmetrize = true;
    opts.add_self_loops = true;
  }
  CsrGraph g = normalize_graph(raw, opts);
  if (cfg.kernel == BenchKernel::Gcn) g = gcn_normalize_values(g);

  TransformedGraph t = sgt_transform(g, cfg.geometry, cfg.threads);
  // Edge-feature runs use the 16-lane re-tiling of the same transform.
  if (cfg.kernel == BenchKernel::Sddmm) t = reblock(t, 16);
  const BlockStats stats = block_stats(t);

  const std::size_t n = g.num_nodes;
  const DenseMatrix x = DenseMatrix::random(n, cfg.dims, cfg.seed + 7);
  const DenseMatrix y = DenseMatrix::random(n, cfg.dims, cfg.seed + 8);
  std::vector<GcnLayerParams> gcn_layers;
  std::vector<AgnnLayerParams> agnn_layers;
  if (cfg.kernel == BenchKernel::Gcn)
    gcn_layers = random_gcn_layers(cfg.dims, cfg.dims, cfg.dims, 2, cfg.seed);
  if (cfg.kernel == BenchKernel::Agnn)
    agnn_layers.assign(4, AgnnLayerParams{1.0f});

  struct Path {
    const char* label;
    double ratio;
  };
  const Path paths[] = {
      {"tile", 1.0}, {"scalar", 0.0}, {"hybrid", cfg.split_ratio}};

  BenchReport report;
  for (const Path& path : paths) {
    const HybridSplitPlan plan = make_split_plan(t, path.ratio);

    DenseMatrix out_mat;
    EdgeValList out_edges;
    auto run = [&] {
      switch (cfg.kernel) {
        case BenchKernel::Spmm:
          out_mat = spmm_hybrid(t, x, plan, cfg.precision, cfg.threads);
          break;
        case BenchKernel::Sddmm:
          out_edges =
              sddmm_hybrid(t, x, y, plan, cfg.precision, cfg.threads);
          break;
        case BenchKernel::Gcn:
          out_mat = gcn_forward(t, x, gcn_layers, plan, cfg.precision,
                                cfg.threads);
          break;
        case BenchKernel::Agnn:
          out_mat = agnn_forward(t, x, agnn_layers, plan, cfg.precision,
                                 cfg.threads);
          break;
      }
    };

    const double warmup_ms = time_once_ms(run);
    if (warmup_ms > cfg.timeout_sec * 1000.0)
      throw Error("benchmark run exceeded the timeout cap");
    std::vector<double> times(cfg.repeats);
    for (double& ms : times) ms = time_once_ms(run);

    BenchRow row;
    row.dataset = cfg.dataset;
    row.kernel = to_string(cfg.kernel);
    row.path_label = path.label;
    row.median_ms = median(times);
    row.blocks = stats.block_counter;
    row.capacity = stats.capacity;
    row.nnz = stats.nnz;
    row.density = stats.mean_tile_density;

    if (cfg.check_oracle) {
      switch (cfg.kernel) {
        case BenchKernel::Spmm:
          row.max_rel_err = max_rel_err(out_mat, oracle_spmm(g, x));
          break;
        case BenchKernel::Sddmm:
          row.max_rel_err = max_rel_err(out_edges, oracle_sddmm(g, x, y));
          break;
        case BenchKernel::Gcn:
          if (n > kDenseOracleNodeCap)
            throw RangeError(
                "dense GCN oracle check is capped at 2048 nodes");
          row.max_rel_err =
              max_rel_err(out_mat, oracle_dense_gcn(dense_adjacency(g), x,
                                                    gcn_layers));
          break;
        case BenchKernel::Agnn:
          if (n > kDenseOracleNodeCap)
            throw RangeError(
                "dense AGNN oracle check is capped at 2048 nodes");
          row.max_rel_err = max_rel_err(out_mat,
                                        agnn_reference(g, x, agnn_layers));
          break;
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_csv(std::ostream& os, const BenchReport& report) {
  os << "dataset,kernel,path,median_ms,blocks,capacity,nnz,density,"
        "max_rel_err\n";
  for (const BenchRow& r : report.rows) {
    std::ostringstream line;
    line << csv_escape(r.dataset) << ',' << r.kernel << ',' << r.path_label
         << ',' << r.median_ms << ',' << r.blocks << ',' << r.capacity << ','
         << r.nnz << ',' << r.density << ',';
    if (r.max_rel_err) line << *r.max_rel_err;
    os << line.str() << "\n";
  }
}

void write_json(std::ostream& os, const BenchReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const BenchRow& r : report.rows) {
    nlohmann::json row{{"dataset", r.dataset},   {"kernel", r.kernel},
                       {"path", r.path_label},   {"median_ms", r.median_ms},
                       {"blocks", r.blocks},     {"capacity", r.capacity},
                       {"nnz", r.nnz},           {"density", r.density}};
    if (r.max_rel_err) row["max_rel_err"] = *r.max_rel_err;
    rows.push_back(std::move(row));
  }
  os << nlohmann::json{{"rows", rows}}.dump(2) << "\n";
}

}  // namespace sgtk
