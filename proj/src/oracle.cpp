#include "sgtk/oracle.hpp"

#include "sgtk/errors.hpp"

namespace sgtk {

DenseMatrix oracle_spmm(const CsrGraph& g, const DenseMatrix& x) {
  if (x.rows != g.num_nodes)
    throw ShapeError("oracle_spmm: x.rows != num_nodes");
  DenseMatrix out(g.num_nodes, x.cols);
  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    float* oi = out.row_ptr(i);
    for (auto e = g.row_begin(i); e < g.row_end(i); ++e) {
      const float a = g.edge_value(e);
      const float* xr = x.row_ptr(g.edge_list[e]);
      for (std::size_t k = 0; k < x.cols; ++k) oi[k] += a * xr[k];
    }
  }
  return out;
}

EdgeValList oracle_sddmm(const CsrGraph& g, const DenseMatrix& x,
                         const DenseMatrix& y) {
  if (x.rows != g.num_nodes || y.rows != g.num_nodes)
    throw ShapeError("oracle_sddmm: feature rows != num_nodes");
  if (x.cols != y.cols) throw ShapeError("oracle_sddmm: x.cols != y.cols");
  EdgeValList out(g.num_edges(), 0.0f);
  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    const float* xi = x.row_ptr(i);
    for (auto e = g.row_begin(i); e < g.row_end(i); ++e) {
      const float* yj = y.row_ptr(g.edge_list[e]);
      float dot = 0.0f;
      for (std::size_t k = 0; k < x.cols; ++k) dot += xi[k] * yj[k];
      out[e] = g.edge_value(e) * dot;
    }
  }
  return out;
}

DenseMatrix oracle_dense_gcn(const DenseMatrix& adjacency,
                             const DenseMatrix& x,
                             const std::vector<GcnLayerParams>& layers) {
  if (adjacency.rows != adjacency.cols)
    throw ShapeError("oracle_dense_gcn: adjacency must be square");
  if (x.rows != adjacency.rows)
    throw ShapeError("oracle_dense_gcn: x.rows != adjacency rows");
  DenseMatrix h = x;
  for (const GcnLayerParams& layer : layers) {
    if (layer.weight.rows != h.cols)
      throw ShapeError("oracle_dense_gcn: weight shape does not chain");
    // aggregate: m = A * h
    DenseMatrix m(adjacency.rows, h.cols);
    for (std::size_t i = 0; i < adjacency.rows; ++i) {
      float* mi = m.row_ptr(i);
      const float* ai = adjacency.row_ptr(i);
      for (std::size_t j = 0; j < adjacency.cols; ++j) {
        const float a = ai[j];
        if (a == 0.0f) continue;
        const float* hj = h.row_ptr(j);
        for (std::size_t k = 0; k < h.cols; ++k) mi[k] += a * hj[k];
      }
    }
    // update: h = m * W, then ReLU
    DenseMatrix next(m.rows, layer.weight.cols);
    for (std::size_t i = 0; i < m.rows; ++i) {
      float* ni = next.row_ptr(i);
      const float* mi = m.row_ptr(i);
      for (std::size_t k = 0; k < m.cols; ++k) {
        const float v = mi[k];
        const float* wk = layer.weight.row_ptr(k);
        for (std::size_t j = 0; j < layer.weight.cols; ++j) ni[j] += v * wk[j];
      }
    }
    if (layer.apply_relu) {
      for (float& v : next.data) v = v > 0.0f ? v : 0.0f;
    }
    h = std::move(next);
  }
  return h;
}

}  // namespace sgtk
