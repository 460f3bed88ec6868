#include "sgtk/gnn.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "sgtk/errors.hpp"

namespace sgtk {

namespace {

// Plain ikj product for the layer update; the aggregation is the kernel's
// job, this one is dense-by-construction and small.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw ShapeError("matmul: inner dimensions differ");
  DenseMatrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    float* oi = out.row_ptr(i);
    const float* ai = a.row_ptr(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      const float v = ai[k];
      const float* bk = b.row_ptr(k);
      for (std::size_t j = 0; j < b.cols; ++j) oi[j] += v * bk[j];
    }
  }
  return out;
}

}  // namespace

DenseMatrix gcn_forward(const TransformedGraph& t, const DenseMatrix& x,
                        const std::vector<GcnLayerParams>& layers,
                        const HybridSplitPlan& plan, Precision prec,
                        int threads) {
  if (x.rows != t.csr.num_nodes)
    throw ShapeError("gcn_forward: x.rows != num_nodes");
  DenseMatrix h = x;
  for (const GcnLayerParams& layer : layers) {
    if (layer.weight.rows != h.cols)
      throw ShapeError("gcn_forward: weight shape does not chain");
    DenseMatrix aggregated = spmm_hybrid(t, h, plan, prec, threads);
    h = matmul(aggregated, layer.weight);
    if (layer.apply_relu) {
      for (float& v : h.data) v = v > 0.0f ? v : 0.0f;
    }
  }
  if (!h.all_finite())
    throw NonFiniteError("gcn_forward: output contains NaN or Inf");
  return h;
}

EdgeValList edge_softmax(const CsrGraph& g, const EdgeValList& logits) {
  if (logits.size() != g.num_edges())
    throw ShapeError("edge_softmax: logits length != num_edges");
  EdgeValList out(logits.size(), 0.0f);
  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    const auto lo = g.row_begin(i);
    const auto hi = g.row_end(i);
    if (lo == hi) continue;
    float row_max = logits[lo];
    for (auto e = lo + 1; e < hi; ++e) row_max = std::max(row_max, logits[e]);
    float sum = 0.0f;
    for (auto e = lo; e < hi; ++e) {
      out[e] = std::exp(logits[e] - row_max);
      sum += out[e];
    }
    for (auto e = lo; e < hi; ++e) out[e] /= sum;
  }
  return out;
}

DenseMatrix l2_normalize_rows(const DenseMatrix& m, std::size_t* zero_rows) {
  DenseMatrix out(m.rows, m.cols);
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    const float* src = m.row_ptr(i);
    double sq = 0.0;
    for (std::size_t k = 0; k < m.cols; ++k) sq += double(src[k]) * src[k];
    if (sq == 0.0) {
      ++zeros;  // row stays zero instead of dividing by zero
      continue;
    }
    const float inv = float(1.0 / std::sqrt(sq));
    float* dst = out.row_ptr(i);
    for (std::size_t k = 0; k < m.cols; ++k) dst[k] = src[k] * inv;
  }
  if (zero_rows) *zero_rows = zeros;
  return out;
}

DenseMatrix agnn_forward(const TransformedGraph& t, const DenseMatrix& x,
                         const std::vector<AgnnLayerParams>& layers,
                         const HybridSplitPlan& plan, Precision prec,
                         int threads, std::size_t* zero_norm_rows) {
  if (x.rows != t.csr.num_nodes)
    throw ShapeError("agnn_forward: x.rows != num_nodes");
  // Edge features want the wider 16-lane tiles; rebuild the plan against
  // the re-tiled partition at the same split ratio.
  const TransformedGraph t16 = reblock(t, 16);
  const HybridSplitPlan plan16 = make_split_plan(t16, plan.ratio);
  const EdgeValList unit(t.csr.num_edges(), 1.0f);

  std::size_t zero_total = 0;
  DenseMatrix h = x;
  for (const AgnnLayerParams& layer : layers) {
    std::size_t zeros = 0;
    const DenseMatrix z = l2_normalize_rows(h, &zeros);
    zero_total += zeros;
    EdgeValList logits =
        sddmm_hybrid(t16, z, z, plan16, prec, threads, unit);
    for (float& v : logits) v *= layer.beta;
    const EdgeValList attention = edge_softmax(t.csr, logits);
    h = spmm_hybrid(t, h, plan, prec, threads, attention);
  }
  if (zero_norm_rows) *zero_norm_rows = zero_total;
  return h;
}

std::vector<GcnLayerParams> random_gcn_layers(std::size_t in_dim,
                                              std::size_t hidden_dim,
                                              std::size_t out_dim,
                                              std::size_t num_layers,
                                              std::uint64_t seed) {
  std::vector<GcnLayerParams> layers;
  layers.reserve(num_layers);
  std::size_t d_in = in_dim;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const bool last = l + 1 == num_layers;
    const std::size_t d_out = last ? out_dim : hidden_dim;
    layers.push_back({DenseMatrix::random(d_in, d_out, seed + l, -0.1f, 0.1f),
                      /*apply_relu=*/!last});
    d_in = d_out;
  }
  return layers;
}

GcnLayerParams load_gcn_layer(const std::string& path) {
  std::ifstream sidecar(path + ".json");
  if (!sidecar) throw IoError("cannot open '" + path + ".json'");
  nlohmann::json meta;
  try {
    sidecar >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad weight sidecar: " + std::string(e.what()));
  }
  const std::size_t rows = meta.at("rows").get<std::size_t>();
  const std::size_t cols = meta.at("cols").get<std::size_t>();
  GcnLayerParams layer{DenseMatrix(rows, cols),
                       meta.value("apply_relu", true)};

  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw IoError("cannot open '" + path + "'");
  bin.read(reinterpret_cast<char*>(layer.weight.data.data()),
           std::streamsize(rows * cols * sizeof(float)));
  if (!bin || bin.get() != std::ifstream::traits_type::eof())
    throw IoError("weight file size does not match sidecar shape");
  return layer;
}

void save_gcn_layer(const GcnLayerParams& layer, const std::string& path) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw IoError("cannot write '" + path + "'");
  bin.write(reinterpret_cast<const char*>(layer.weight.data.data()),
            std::streamsize(layer.weight.data.size() * sizeof(float)));
  if (!bin) throw IoError("write failed for '" + path + "'");
  nlohmann::json meta{{"rows", layer.weight.rows},
                      {"cols", layer.weight.cols},
                      {"apply_relu", layer.apply_relu}};
  std::ofstream sidecar(path + ".json");
  sidecar << meta.dump() << "\n";
  if (!sidecar) throw IoError("write failed for '" + path + ".json'");
}

}  // namespace sgtk
