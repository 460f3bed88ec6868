#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "sgtk/errors.hpp"

namespace sgtk {

/// Row-major 2-D float matrix. Node features, embeddings and tile staging
/// buffers all use this one type.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;  // rows * cols, row-major

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, float fill = 0.0f)
      : rows(r), cols(c), data(r * c, fill) {}

  float& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  float at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  float* row_ptr(std::size_t r) { return data.data() + r * cols; }
  const float* row_ptr(std::size_t r) const { return data.data() + r * cols; }

  bool all_finite() const {
    for (float v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  bool same_shape(const DenseMatrix& o) const {
    return rows == o.rows && cols == o.cols;
  }

  /// Seeded uniform fill in [lo, hi); reproducible across platforms that
  /// share the mt19937_64 stream (all of them).
  static DenseMatrix random(std::size_t r, std::size_t c, std::uint64_t seed,
                            float lo = -1.0f, float hi = 1.0f) {
    DenseMatrix m(r, c);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(lo, hi);
    for (float& v : m.data) v = dist(rng);
    return m;
  }
};

inline float max_abs(const DenseMatrix& m) {
  float mx = 0.0f;
  for (float v : m.data) mx = std::max(mx, std::abs(v));
  return mx;
}

inline float max_abs(const std::vector<float>& v) {
  float mx = 0.0f;
  for (float x : v) mx = std::max(mx, std::abs(x));
  return mx;
}

/// max_i |a_i - b_i| scaled by the largest magnitude of the reference `b`.
/// This is the error metric used by every oracle comparison; scaling by the
/// reference's infinity norm keeps near-zero entries from blowing it up.
inline double max_rel_err(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw ShapeError("max_rel_err: shape mismatch");
  double num = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    num = std::max(num, std::abs(double(a.data[i]) - double(b.data[i])));
  double den = std::max(double(max_abs(b)), 1e-30);
  return num / den;
}

inline double max_rel_err(const std::vector<float>& a,
                          const std::vector<float>& b) {
  if (a.size() != b.size()) throw ShapeError("max_rel_err: length mismatch");
  double num = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    num = std::max(num, std::abs(double(a[i]) - double(b[i])));
  double den = std::max(double(max_abs(b)), 1e-30);
  return num / den;
}

}  // namespace sgtk
