#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sgtk/sgt_transform.hpp"
#include "sgtk/tile_exec.hpp"

namespace sgtk {

enum class BenchKernel { Spmm, Sddmm, Gcn, Agnn };

std::string to_string(BenchKernel k);

struct BenchConfig {
  std::string dataset;  // file path or synthetic spec
  BenchKernel kernel = BenchKernel::Spmm;
  TileGeometry geometry;
  double split_ratio = 1.0;
  Precision precision = Precision::Fp32;
  std::size_t dims = 16;
  int repeats = 5;
  std::uint64_t seed = 1;
  int threads = 0;
  bool check_oracle = false;
  double timeout_sec = 300.0;  // per-run cap
};

struct BenchRow {
  std::string dataset;
  std::string kernel;
  std::string path_label;  // "tile" | "scalar" | "hybrid"
  double median_ms = 0.0;
  std::uint64_t blocks = 0;
  std::uint64_t capacity = 0;
  std::uint64_t nnz = 0;
  double density = 0.0;
  std::optional<double> max_rel_err;  // present when check_oracle was set
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

/// Times the tile path (ratio 1), the scalar path (ratio 0) and the
/// configured hybrid split on the same input and thread count; medians over
/// `repeats` runs. Oracle error is attached when check_oracle is set.
BenchReport run_bench(const BenchConfig& cfg);

// CSV schema is stable:
// dataset,kernel,path,median_ms,blocks,capacity,nnz,density,max_rel_err
void write_csv(std::ostream& os, const BenchReport& report);
void write_json(std::ostream& os, const BenchReport& report);

}  // namespace sgtk
