#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgtk/dense_matrix.hpp"
#include "sgtk/tile_exec.hpp"

namespace sgtk {

struct GcnLayerParams {
  DenseMatrix weight;  // in_dim x out_dim
  bool apply_relu = true;
};

struct AgnnLayerParams {
  float beta = 1.0f;  // attention temperature
};

/// GCN forward pass over the hybrid kernels. Per layer:
/// h <- relu?(spmm_hybrid(t, h) * W). The transform is expected to carry
/// gcn-normalized edge values; layers are bias-free.
DenseMatrix gcn_forward(const TransformedGraph& t, const DenseMatrix& x,
                        const std::vector<GcnLayerParams>& layers,
                        const HybridSplitPlan& plan,
                        Precision prec = Precision::Fp32, int threads = 0);

/// Numerically-guarded softmax within each CSR row (max subtraction before
/// exp). Non-empty rows sum to 1; empty rows contribute nothing.
EdgeValList edge_softmax(const CsrGraph& g, const EdgeValList& logits);

/// Attention forward pass. Per layer: cosine logits between endpoint
/// embeddings via SDDMM on L2-normalized rows, scaled by beta, softmaxed
/// per row, then used as edge weights for SpMM aggregation. Adjacency is
/// treated as binary; stored edge values are ignored. Zero-norm feature
/// rows normalize to zero vectors and are counted in *zero_norm_rows.
DenseMatrix agnn_forward(const TransformedGraph& t, const DenseMatrix& x,
                         const std::vector<AgnnLayerParams>& layers,
                         const HybridSplitPlan& plan,
                         Precision prec = Precision::Fp32, int threads = 0,
                         std::size_t* zero_norm_rows = nullptr);

/// Row-wise L2 normalization; zero rows stay zero (counted if requested).
DenseMatrix l2_normalize_rows(const DenseMatrix& m,
                              std::size_t* zero_rows = nullptr);

/// Seeded uniform [-0.1, 0.1] layer stack: in_dim -> hidden^(n-1) -> out_dim,
/// ReLU on all but the last layer.
std::vector<GcnLayerParams> random_gcn_layers(std::size_t in_dim,
                                              std::size_t hidden_dim,
                                              std::size_t out_dim,
                                              std::size_t num_layers,
                                              std::uint64_t seed);

// Weight files: flat little-endian f32 at `path`, one-line JSON sidecar at
// `path + ".json"` with {"rows": R, "cols": C, "apply_relu": bool}.
GcnLayerParams load_gcn_layer(const std::string& path);
void save_gcn_layer(const GcnLayerParams& layer, const std::string& path);

}  // namespace sgtk
