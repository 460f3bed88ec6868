#include "sgtk/tile_exec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "sgtk/errors.hpp"
#include "sgtk/threading.hpp"

namespace sgtk {

namespace {

constexpr std::size_t kRegBlock = 16;   // floats kept live per accumulator strip
constexpr std::size_t kChunkTiles = 16;  // tiles gathered per GEMM chunk

// Per-thread buffers reused across windows and calls.
struct Scratch {
  std::vector<float> acc;
  std::vector<float> a_tile;
  std::vector<float> x_stage;
  std::vector<float> y_stage;
  std::vector<float> dots;
  std::vector<std::uint64_t> cursor;
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

inline float tf32(float v) { return tf32_round_value(v); }

void check_plan(const TransformedGraph& t, const HybridSplitPlan& plan) {
  if (plan.per_window_tile_cut.size() != t.num_windows())
    throw ShapeError("split plan window count does not match transform");
  for (std::size_t w = 0; w < t.num_windows(); ++w) {
    if (plan.per_window_tile_cut[w] > t.block_partition[w])
      throw ShapeError("split plan cut exceeds tiles in window");
  }
}

const float* resolve_values(const TransformedGraph& t,
                            std::span<const float> edge_values) {
  if (!edge_values.empty()) {
    if (edge_values.size() != t.csr.num_edges())
      throw ShapeError("edge value override length does not match edge count");
    return edge_values.data();
  }
  return t.csr.has_values() ? t.csr.values.data() : nullptr;
}

// acc(rows x padded) += a(rows x ucols) * xs(ucols x padded).
// Register-blocked over the embedding dimension and over four rows at a
// time: the accumulator strips stay live across the whole chunk, the four
// per-row FMA chains run independently, and each staged feature row is
// loaded once per quad instead of once per row. Zero entries contribute
// exact zero products, so skipping all-zero quads never changes the sum.
void spmm_chunk_gemm(float* __restrict acc, const float* __restrict a,
                     const float* __restrict xs, std::size_t rows,
                     std::size_t ucols, std::size_t padded) {
  for (std::size_t k0 = 0; k0 < padded; k0 += kRegBlock) {
    const std::size_t klen = std::min(kRegBlock, padded - k0);
    std::size_t r = 0;
    for (; r + 4 <= rows; r += 4) {
      const float* ar0 = a + r * ucols;
      const float* ar1 = ar0 + ucols;
      const float* ar2 = ar1 + ucols;
      const float* ar3 = ar2 + ucols;
      float* acc0 = acc + r * padded + k0;
      float* acc1 = acc0 + padded;
      float* acc2 = acc1 + padded;
      float* acc3 = acc2 + padded;
      float reg0[kRegBlock], reg1[kRegBlock], reg2[kRegBlock],
          reg3[kRegBlock];
      std::memcpy(reg0, acc0, klen * sizeof(float));
      std::memcpy(reg1, acc1, klen * sizeof(float));
      std::memcpy(reg2, acc2, klen * sizeof(float));
      std::memcpy(reg3, acc3, klen * sizeof(float));
      if (klen == kRegBlock) {
        for (std::size_t u = 0; u < ucols; ++u) {
          const float a0 = ar0[u], a1 = ar1[u], a2 = ar2[u], a3 = ar3[u];
          if (a0 == 0.0f && a1 == 0.0f && a2 == 0.0f && a3 == 0.0f) continue;
          const float* xc = xs + u * padded + k0;
          for (std::size_t kk = 0; kk < kRegBlock; ++kk) {
            const float xv = xc[kk];
            reg0[kk] += a0 * xv;
            reg1[kk] += a1 * xv;
            reg2[kk] += a2 * xv;
            reg3[kk] += a3 * xv;
          }
        }
      } else {
        for (std::size_t u = 0; u < ucols; ++u) {
          const float a0 = ar0[u], a1 = ar1[u], a2 = ar2[u], a3 = ar3[u];
          if (a0 == 0.0f && a1 == 0.0f && a2 == 0.0f && a3 == 0.0f) continue;
          const float* xc = xs + u * padded + k0;
          for (std::size_t kk = 0; kk < klen; ++kk) {
            const float xv = xc[kk];
            reg0[kk] += a0 * xv;
            reg1[kk] += a1 * xv;
            reg2[kk] += a2 * xv;
            reg3[kk] += a3 * xv;
          }
        }
      }
      std::memcpy(acc0, reg0, klen * sizeof(float));
      std::memcpy(acc1, reg1, klen * sizeof(float));
      std::memcpy(acc2, reg2, klen * sizeof(float));
      std::memcpy(acc3, reg3, klen * sizeof(float));
    }
    for (; r < rows; ++r) {
      const float* ar = a + r * ucols;
      float* accr = acc + r * padded + k0;
      float reg[kRegBlock];
      std::memcpy(reg, accr, klen * sizeof(float));
      for (std::size_t u = 0; u < ucols; ++u) {
        const float av = ar[u];
        if (av == 0.0f) continue;
        const float* xc = xs + u * padded + k0;
        for (std::size_t kk = 0; kk < klen; ++kk) reg[kk] += av * xc[kk];
      }
      std::memcpy(accr, reg, klen * sizeof(float));
    }
  }
}

}  // namespace

float tf32_round_value(float v) {
  std::uint32_t u = std::bit_cast<std::uint32_t>(v);
  if ((u & 0x7F800000u) == 0x7F800000u) return v;  // inf/nan pass through
  u += 0xFFFu + ((u >> 13) & 1u);                  // round to nearest even
  u &= ~std::uint32_t(0x1FFF);                     // keep 10 mantissa bits
  if ((u & 0x7F800000u) == 0x7F800000u) {
    // Mantissa carry past the top binade saturates at the largest finite
    // 10-bit-mantissa value; the relative error stays below 2^-11 that way.
    u = (u & 0x80000000u) | 0x7F7FE000u;
  }
  return std::bit_cast<float>(u);
}

DenseMatrix tf32_round(const DenseMatrix& m) {
  DenseMatrix out = m;
  for (float& v : out.data) v = tf32_round_value(v);
  return out;
}

HybridSplitPlan make_split_plan(const TransformedGraph& t, double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0))
    throw RangeError("split ratio must be within [0, 1]");
  HybridSplitPlan plan;
  plan.ratio = ratio;
  plan.per_window_tile_cut.resize(t.num_windows());
  for (std::size_t w = 0; w < t.num_windows(); ++w) {
    plan.per_window_tile_cut[w] =
        std::uint32_t(std::floor(ratio * double(t.block_partition[w])));
  }
  return plan;
}

GatheredTile gather_tile(const TransformedGraph& t, std::size_t window,
                         std::size_t tile) {
  if (window >= t.num_windows())
    throw IndexError("gather_tile: window out of range");
  if (tile >= t.block_partition[window])
    throw IndexError("gather_tile: tile out of range");

  const std::size_t blk_h = t.geometry.blk_h;
  const std::size_t blk_w = t.geometry.blk_w;
  const std::size_t base = tile * blk_w;
  const auto cols_w = t.window_cols(window);
  const NodeId sentinel = NodeId(t.csr.num_nodes);

  GatheredTile out{DenseMatrix(blk_h, blk_w),
                   std::vector<NodeId>(blk_w, sentinel)};
  for (std::size_t c = 0; c < blk_w && base + c < cols_w.size(); ++c)
    out.x_index[c] = cols_w[base + c];

  const std::size_t row_lo = window * blk_h;
  const std::size_t row_hi = std::min(t.csr.num_nodes, row_lo + blk_h);
  for (std::size_t r = row_lo; r < row_hi; ++r) {
    // edge_to_column ascends within a row, so the tile's edges are a
    // contiguous run found by binary search.
    const auto* e2c = t.edge_to_column.data();
    auto lo = t.csr.row_begin(r);
    auto hi = t.csr.row_end(r);
    auto first = std::lower_bound(e2c + lo, e2c + hi, std::uint32_t(base)) -
                 e2c;
    for (auto e = std::uint64_t(first);
         e < hi && t.edge_to_column[e] < base + blk_w; ++e) {
      out.a_tile.at(r - row_lo, t.edge_to_column[e] - base) =
          t.csr.edge_value(e);
    }
  }
  return out;
}

DenseMatrix spmm_hybrid(const TransformedGraph& t, const DenseMatrix& x,
                        const HybridSplitPlan& plan, Precision prec,
                        int threads, std::span<const float> edge_values) {
  const CsrGraph& g = t.csr;
  if (x.rows != g.num_nodes)
    throw ShapeError("spmm_hybrid: x.rows != num_nodes");
  check_plan(t, plan);
  const float* vals = resolve_values(t, edge_values);

  const std::size_t blk_h = t.geometry.blk_h;
  const std::size_t blk_w = t.geometry.blk_w;
  const std::size_t cols = x.cols;
  // Pad the embedding width to a multiple of blk_h; the zero columns are
  // stripped when the window accumulator is copied out.
  const std::size_t padded =
      cols == 0 ? 0 : (cols + blk_h - 1) / blk_h * blk_h;
  const bool tf = prec == Precision::Tf32;

  DenseMatrix out(g.num_nodes, cols);
  parallel_windows(t.num_windows(), threads, [&](std::size_t w) {
    const std::size_t row_lo = w * blk_h;
    const std::size_t row_hi = std::min(g.num_nodes, row_lo + blk_h);
    const std::size_t wrows = row_hi - row_lo;
    const auto cols_w = t.window_cols(w);
    const std::uint32_t cut = plan.per_window_tile_cut[w];

    Scratch& s = scratch();
    s.acc.assign(wrows * padded, 0.0f);
    s.a_tile.resize(wrows * kChunkTiles * blk_w);
    s.x_stage.resize(kChunkTiles * blk_w * padded);
    s.cursor.resize(wrows);
    for (std::size_t r = 0; r < wrows; ++r)
      s.cursor[r] = g.row_begin(row_lo + r);

    // Tiles run in ascending order in chunks of up to kChunkTiles, which
    // keeps the staged structures L1-sized while preserving the per-window
    // accumulation order of a tile-at-a-time walk.
    for (std::uint32_t tile0 = 0; tile0 < cut; tile0 += kChunkTiles) {
      const std::size_t base = std::size_t(tile0) * blk_w;
      const std::size_t chunk_tiles =
          std::min<std::size_t>(kChunkTiles, cut - tile0);
      const std::size_t ccols = chunk_tiles * blk_w;  // may pad past unique
      // Stage the chunk's feature rows; ragged lanes become zero rows.
      for (std::size_t c = 0; c < ccols; ++c) {
        float* dst = s.x_stage.data() + c * padded;
        if (base + c < cols_w.size()) {
          const float* src = x.row_ptr(cols_w[base + c]);
          if (tf) {
            for (std::size_t k = 0; k < cols; ++k) dst[k] = tf32(src[k]);
          } else {
            std::memcpy(dst, src, cols * sizeof(float));
          }
          std::fill(dst + cols, dst + padded, 0.0f);
        } else {
          std::fill(dst, dst + padded, 0.0f);
        }
      }
      // Gather the dense adjacency chunk; cursors sweep each row once per
      // window because compressed columns ascend. A row that fills the
      // whole chunk needs no scatter: its compressed columns are exactly
      // base..base+ccols-1 in edge order.
      const std::uint32_t chunk_end = std::uint32_t(base + ccols);
      for (std::size_t r = 0; r < wrows; ++r) {
        const auto e_begin = s.cursor[r];
        const auto e_end = g.row_end(row_lo + r);
        const auto* e2c = t.edge_to_column.data();
        const auto e_stop =
            std::lower_bound(e2c + e_begin, e2c + e_end, chunk_end) - e2c;
        float* arow = s.a_tile.data() + r * ccols;
        const std::size_t run = std::size_t(e_stop - e_begin);
        if (run == ccols && !tf) {
          if (vals) {
            std::memcpy(arow, vals + e_begin, ccols * sizeof(float));
          } else {
            std::fill(arow, arow + ccols, 1.0f);
          }
        } else {
          std::fill(arow, arow + ccols, 0.0f);
          for (auto e = e_begin; e < std::uint64_t(e_stop); ++e) {
            float a = vals ? vals[e] : 1.0f;
            arow[t.edge_to_column[e] - base] = tf ? tf32(a) : a;
          }
        }
        s.cursor[r] = std::uint64_t(e_stop);
      }
      spmm_chunk_gemm(s.acc.data(), s.a_tile.data(), s.x_stage.data(), wrows,
                      ccols, padded);
    }

    // Scalar path: after the tile loop each cursor sits on its row's first
    // edge past the cut, which is exactly the scalar suffix.
    for (std::size_t r = 0; r < wrows; ++r) {
      float* accr = s.acc.data() + r * padded;
      for (auto e = s.cursor[r]; e < g.row_end(row_lo + r); ++e) {
        float a = vals ? vals[e] : 1.0f;
        const float* xr = x.row_ptr(g.edge_list[e]);
        if (tf) {
          a = tf32(a);
          for (std::size_t k = 0; k < cols; ++k) accr[k] += a * tf32(xr[k]);
        } else {
          for (std::size_t k = 0; k < cols; ++k) accr[k] += a * xr[k];
        }
      }
    }

    for (std::size_t r = 0; r < wrows; ++r) {
      std::memcpy(out.row_ptr(row_lo + r), s.acc.data() + r * padded,
                  cols * sizeof(float));
    }
  });

  if (!out.all_finite())
    throw NonFiniteError("spmm_hybrid: output contains NaN or Inf");
  return out;
}

EdgeValList sddmm_hybrid(const TransformedGraph& t, const DenseMatrix& x,
                         const DenseMatrix& y, const HybridSplitPlan& plan,
                         Precision prec, int threads,
                         std::span<const float> edge_values) {
  const CsrGraph& g = t.csr;
  if (x.rows != g.num_nodes || y.rows != g.num_nodes)
    throw ShapeError("sddmm_hybrid: feature rows != num_nodes");
  if (x.cols != y.cols) throw ShapeError("sddmm_hybrid: x.cols != y.cols");
  check_plan(t, plan);
  const float* vals = resolve_values(t, edge_values);

  const std::size_t blk_h = t.geometry.blk_h;
  const std::size_t blk_w = t.geometry.blk_w;
  const std::size_t dim = x.cols;
  const bool tf = prec == Precision::Tf32;

  EdgeValList out(g.num_edges(), 0.0f);
  parallel_windows(t.num_windows(), threads, [&](std::size_t w) {
    const std::size_t row_lo = w * blk_h;
    const std::size_t row_hi = std::min(g.num_nodes, row_lo + blk_h);
    const std::size_t wrows = row_hi - row_lo;
    const auto cols_w = t.window_cols(w);
    const std::uint32_t cut = plan.per_window_tile_cut[w];

    Scratch& s = scratch();
    s.x_stage.resize(wrows * dim);
    s.y_stage.resize(blk_w * dim);
    s.dots.resize(wrows * blk_w);
    s.cursor.resize(wrows);
    for (std::size_t r = 0; r < wrows; ++r) {
      s.cursor[r] = g.row_begin(row_lo + r);
      const float* src = x.row_ptr(row_lo + r);
      float* dst = s.x_stage.data() + r * dim;
      if (tf) {
        for (std::size_t k = 0; k < dim; ++k) dst[k] = tf32(src[k]);
      } else {
        std::memcpy(dst, src, dim * sizeof(float));
      }
    }

    for (std::uint32_t tile = 0; tile < cut; ++tile) {
      const std::size_t base = std::size_t(tile) * blk_w;
      const std::size_t lanes = std::min(blk_w, cols_w.size() - base);
      for (std::size_t c = 0; c < lanes; ++c) {
        const float* src = y.row_ptr(cols_w[base + c]);
        float* dst = s.y_stage.data() + c * dim;
        if (tf) {
          for (std::size_t k = 0; k < dim; ++k) dst[k] = tf32(src[k]);
        } else {
          std::memcpy(dst, src, dim * sizeof(float));
        }
      }
      // Dense wrows x dim by dim x lanes product.
      for (std::size_t r = 0; r < wrows; ++r) {
        const float* xr = s.x_stage.data() + r * dim;
        for (std::size_t c = 0; c < lanes; ++c) {
          const float* yc = s.y_stage.data() + c * dim;
          float dot = 0.0f;
          for (std::size_t k = 0; k < dim; ++k) dot += xr[k] * yc[k];
          s.dots[r * blk_w + c] = dot;
        }
      }
      // Scatter only the positions that are non-zeros of A.
      const std::uint32_t tile_end = std::uint32_t(base + blk_w);
      for (std::size_t r = 0; r < wrows; ++r) {
        auto e = s.cursor[r];
        const auto e_end = g.row_end(row_lo + r);
        while (e < e_end && t.edge_to_column[e] < tile_end) {
          float a = vals ? vals[e] : 1.0f;
          const float dot = s.dots[r * blk_w + (t.edge_to_column[e] - base)];
          out[e] = tf ? tf32(a) * tf32(dot) : a * dot;
          ++e;
        }
        s.cursor[r] = e;
      }
    }

    // Scalar path over each row's remaining edges.
    for (std::size_t r = 0; r < wrows; ++r) {
      const float* xr = s.x_stage.data() + r * dim;
      for (auto e = s.cursor[r]; e < g.row_end(row_lo + r); ++e) {
        const float* yc = y.row_ptr(g.edge_list[e]);
        float a = vals ? vals[e] : 1.0f;
        float dot = 0.0f;
        if (tf) {
          for (std::size_t k = 0; k < dim; ++k) dot += xr[k] * tf32(yc[k]);
          out[e] = tf32(a) * tf32(dot);
        } else {
          for (std::size_t k = 0; k < dim; ++k) dot += xr[k] * yc[k];
          out[e] = a * dot;
        }
      }
    }
  });
  return out;
}

}  // namespace sgtk
