#pragma once

#include "sgtk/csr_graph.hpp"
#include "sgtk/dense_matrix.hpp"
#include "sgtk/gnn.hpp"

namespace sgtk {

// Naive single-threaded references. These deliberately share no code with
// the tiled kernels; they are the ground truth the kernels are tested
// against.

/// out[i] = sum over edges e of row i of value(e) * x[col(e)].
DenseMatrix oracle_spmm(const CsrGraph& g, const DenseMatrix& x);

/// values[e] = value(e) * dot(x[row(e)], y[col(e)]).
EdgeValList oracle_sddmm(const CsrGraph& g, const DenseMatrix& x,
                         const DenseMatrix& y);

/// Dense-matrix GCN forward: per layer h <- relu?((A * h) * W), everything
/// materialized densely.
DenseMatrix oracle_dense_gcn(const DenseMatrix& adjacency,
                             const DenseMatrix& x,
                             const std::vector<GcnLayerParams>& layers);

}  // namespace sgtk
