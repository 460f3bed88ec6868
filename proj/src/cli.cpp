#include "sgtk/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "sgtk/bench.hpp"
#include "sgtk/errors.hpp"
#include "sgtk/gnn.hpp"
#include "sgtk/graph_io.hpp"
#include "sgtk/oracle.hpp"
#include "sgtk/sgt_file.hpp"
#include "sgtk/synthetic.hpp"
#include "sgtk/threading.hpp"

namespace sgtk {

namespace {

constexpr double kFp32Tol = 1e-4;

struct CommonOpts {
  std::uint32_t blk_h = 16;
  std::uint32_t blk_w = 8;
  double split = 1.0;
  std::string precision = "fp32";
  std::size_t dim = 16;
  std::uint64_t seed = 1;
  int threads = 0;
  bool check_oracle = false;
};

Precision parse_precision(const std::string& s) {
  if (s == "fp32") return Precision::Fp32;
  if (s == "tf32") return Precision::Tf32;
  throw RangeError("precision must be fp32 or tf32");
}

void add_kernel_opts(CLI::App* sub, CommonOpts& o, bool with_geometry = true) {
  if (with_geometry) {
    sub->add_option("--blk-h", o.blk_h, "Row window height")
        ->capture_default_str();
    sub->add_option("--blk-w", o.blk_w, "Tile width")->capture_default_str();
  }
  sub->add_option("--split", o.split, "Tile-path fraction of tiles [0,1]")
      ->capture_default_str();
  sub->add_option("--precision", o.precision, "fp32 or tf32")
      ->capture_default_str();
  sub->add_option("--dim", o.dim, "Feature width")->capture_default_str();
  sub->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  sub->add_option("--threads", o.threads,
                  "Worker count (0: SGTK_THREADS or hardware)");
  sub->add_flag("--check-oracle", o.check_oracle,
                "Verify the result against the naive reference");
}

CsrGraph load_dataset(const std::string& spec,
                      const std::optional<std::string>& format) {
  if (is_synthetic_spec(spec)) return make_synthetic(spec);
  if (format) {
    if (*format == "mtx" || *format == "matrix-market")
      return load_edge_list(spec, EdgeListFormat::MatrixMarket);
    if (*format == "tsv") return load_edge_list(spec, EdgeListFormat::Tsv);
    throw RangeError("format must be mtx or tsv");
  }
  return load_edge_list(spec);
}

std::size_t max_row_degree(const CsrGraph& g) {
  std::size_t mx = 0;
  for (std::size_t i = 0; i < g.num_nodes; ++i)
    mx = std::max(mx, g.degree(i));
  return mx;
}

double oracle_tolerance(Precision prec, const CsrGraph& g) {
  if (prec == Precision::Fp32) return kFp32Tol;
  return double(max_row_degree(g)) * std::pow(2.0, -10) + kFp32Tol;
}

void print_worst(const DenseMatrix& got, const DenseMatrix& want) {
  std::size_t worst = 0;
  double gap = -1.0;
  for (std::size_t i = 0; i < got.data.size(); ++i) {
    const double d = std::abs(double(got.data[i]) - double(want.data[i]));
    if (d > gap) {
      gap = d;
      worst = i;
    }
  }
  std::printf("  worst entry (%zu, %zu): got %.8g, want %.8g\n",
              worst / got.cols, worst % got.cols, double(got.data[worst]),
              double(want.data[worst]));
}

void print_worst(const EdgeValList& got, const EdgeValList& want) {
  std::size_t worst = 0;
  double gap = -1.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double d = std::abs(double(got[i]) - double(want[i]));
    if (d > gap) {
      gap = d;
      worst = i;
    }
  }
  std::printf("  worst edge %zu: got %.8g, want %.8g\n", worst,
              double(got[worst]), double(want[worst]));
}

template <class Out>
int report_check(const char* label, const Out& got, const Out& want,
                 double tol) {
  const double err = max_rel_err(got, want);
  if (err <= tol) {
    std::printf("%s: max_rel_err %.3e within %.3e\n", label, err, tol);
    return 0;
  }
  std::printf("%s: FAILED, max_rel_err %.3e exceeds %.3e\n", label, err, tol);
  print_worst(got, want);
  return 1;
}

void print_stats(const BlockStats& s) {
  std::printf("blocks %llu  capacity %llu  nnz %llu  density %.6f\n",
              (unsigned long long)s.block_counter,
              (unsigned long long)s.capacity, (unsigned long long)s.nnz,
              s.mean_tile_density);
}

struct TransformArgs {
  std::string input;
  std::optional<std::string> format;
  std::string out;
  bool stats = false;
  bool symmetrize = false;
  bool self_loops = false;
  bool no_dedupe = false;
  bool gcn_normalize = false;
  CommonOpts common;
};

int run_transform(const TransformArgs& a) {
  CsrGraph g = load_dataset(a.input, a.format);
  g = normalize_graph(
      g, {a.symmetrize, a.self_loops, /*dedupe=*/!a.no_dedupe});
  if (a.gcn_normalize) g = gcn_normalize_values(g);
  TransformedGraph t =
      sgt_transform(g, {a.common.blk_h, a.common.blk_w}, a.common.threads);
  if (!a.out.empty()) save_sgt(t, a.out);
  if (a.stats || a.out.empty()) print_stats(block_stats(t));
  return 0;
}

struct RunArgs {
  std::string graph;   // SGT1 file
  std::string input;   // raw dataset
  std::optional<std::string> format;
  std::size_t layers = 0;  // 0: model default
  double beta = 1.0f;
  std::vector<std::string> weights;
  CommonOpts common;
};

TransformedGraph prepare_transform(const RunArgs& a, NormalizeOpts norm,
                                   bool gcn_values) {
  if (!a.graph.empty()) return load_sgt(a.graph);
  CsrGraph g = load_dataset(a.input, a.format);
  g = normalize_graph(g, norm);
  if (gcn_values) g = gcn_normalize_values(g);
  return sgt_transform(g, {a.common.blk_h, a.common.blk_w}, a.common.threads);
}

int run_spmm(const RunArgs& a) {
  const TransformedGraph t = prepare_transform(a, {}, false);
  const Precision prec = parse_precision(a.common.precision);
  const DenseMatrix x =
      DenseMatrix::random(t.csr.num_nodes, a.common.dim, a.common.seed);
  const HybridSplitPlan plan = make_split_plan(t, a.common.split);
  const DenseMatrix out = spmm_hybrid(t, x, plan, prec, a.common.threads);
  print_stats(block_stats(t));
  if (a.common.check_oracle) {
    return report_check("spmm vs oracle", out, oracle_spmm(t.csr, x),
                        oracle_tolerance(prec, t.csr));
  }
  return 0;
}

int run_sddmm(const RunArgs& a) {
  TransformedGraph t = prepare_transform(a, {}, false);
  if (t.geometry.blk_w != 16) t = reblock(t, 16);
  const Precision prec = parse_precision(a.common.precision);
  const DenseMatrix x =
      DenseMatrix::random(t.csr.num_nodes, a.common.dim, a.common.seed);
  const DenseMatrix y =
      DenseMatrix::random(t.csr.num_nodes, a.common.dim, a.common.seed + 1);
  const HybridSplitPlan plan = make_split_plan(t, a.common.split);
  const EdgeValList out =
      sddmm_hybrid(t, x, y, plan, prec, a.common.threads);
  print_stats(block_stats(t));
  if (a.common.check_oracle) {
    return report_check("sddmm vs oracle", out, oracle_sddmm(t.csr, x, y),
                        oracle_tolerance(prec, t.csr));
  }
  return 0;
}

int run_gcn(const RunArgs& a) {
  const TransformedGraph t = prepare_transform(
      a, {/*symmetrize=*/true, /*add_self_loops=*/true, /*dedupe=*/true},
      /*gcn_values=*/true);
  const Precision prec = parse_precision(a.common.precision);
  const std::size_t n = t.csr.num_nodes;
  const std::size_t num_layers = a.layers ? a.layers : 2;

  std::vector<GcnLayerParams> layers;
  if (!a.weights.empty()) {
    for (const std::string& w : a.weights) layers.push_back(load_gcn_layer(w));
  } else {
    layers = random_gcn_layers(a.common.dim, a.common.dim, a.common.dim,
                               num_layers, a.common.seed);
  }
  const DenseMatrix x = DenseMatrix::random(n, layers.front().weight.rows,
                                            a.common.seed + 7);
  const HybridSplitPlan plan = make_split_plan(t, a.common.split);
  const DenseMatrix out =
      gcn_forward(t, x, layers, plan, prec, a.common.threads);
  std::printf("gcn: %zu layers, output %zu x %zu\n", layers.size(), out.rows,
              out.cols);
  if (a.common.check_oracle) {
    if (n > 2048) throw RangeError("dense GCN oracle check capped at 2048 nodes");
    DenseMatrix adj(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (auto e = t.csr.row_begin(i); e < t.csr.row_end(i); ++e)
        adj.at(i, t.csr.edge_list[e]) = t.csr.edge_value(e);
    return report_check("gcn vs dense oracle", out,
                        oracle_dense_gcn(adj, x, layers),
                        oracle_tolerance(prec, t.csr));
  }
  return 0;
}

int run_agnn(const RunArgs& a) {
  const TransformedGraph t = prepare_transform(a, {}, false);
  const Precision prec = parse_precision(a.common.precision);
  const std::size_t num_layers = a.layers ? a.layers : 4;
  const std::vector<AgnnLayerParams> layers(num_layers,
                                            AgnnLayerParams{float(a.beta)});
  const DenseMatrix x =
      DenseMatrix::random(t.csr.num_nodes, a.common.dim, a.common.seed + 7);
  const HybridSplitPlan plan = make_split_plan(t, a.common.split);
  std::size_t zero_rows = 0;
  const DenseMatrix out = agnn_forward(t, x, layers, plan, prec,
                                       a.common.threads, &zero_rows);
  std::printf("agnn: %zu layers, output %zu x %zu", layers.size(), out.rows,
              out.cols);
  if (zero_rows) std::printf(", %zu zero-norm rows", zero_rows);
  std::printf("\n");
  return 0;
}

struct VerifyArgs {
  std::string input;
  std::optional<std::string> format;
  CommonOpts common;
};

int run_verify(const VerifyArgs& a) {
  CsrGraph g = load_dataset(a.input, a.format);
  g = normalize_graph(g, {});
  const TransformedGraph t =
      sgt_transform(g, {a.common.blk_h, a.common.blk_w}, a.common.threads);
  const Precision prec = parse_precision(a.common.precision);
  int failures = 0;

  // Scatter the edge maps back and compare against the CSR non-zero set.
  bool recon_ok = t.edge_to_row.size() == g.num_edges();
  for (std::size_t e = 0; recon_ok && e < g.num_edges(); ++e) {
    const std::size_t w = t.edge_to_row[e] / t.geometry.blk_h;
    const auto cols_w = t.window_cols(w);
    recon_ok = t.edge_to_column[e] < cols_w.size() &&
               cols_w[t.edge_to_column[e]] == g.edge_list[e];
  }
  std::printf("reconstruction: %s\n", recon_ok ? "ok" : "FAILED");
  failures += recon_ok ? 0 : 1;

  const DenseMatrix x =
      DenseMatrix::random(g.num_nodes, a.common.dim, a.common.seed);
  const DenseMatrix y =
      DenseMatrix::random(g.num_nodes, a.common.dim, a.common.seed + 1);
  const double tol = oracle_tolerance(prec, g);
  const HybridSplitPlan plan = make_split_plan(t, a.common.split);
  failures += report_check("spmm vs oracle",
                           spmm_hybrid(t, x, plan, prec, a.common.threads),
                           oracle_spmm(g, x), tol);
  const TransformedGraph t16 = reblock(t, 16);
  const HybridSplitPlan plan16 = make_split_plan(t16, a.common.split);
  failures += report_check(
      "sddmm vs oracle",
      sddmm_hybrid(t16, x, y, plan16, prec, a.common.threads),
      oracle_sddmm(g, x, y), tol);
  return failures ? 1 : 0;
}

struct BenchArgs {
  std::string dataset;
  std::string suite;
  std::string kernel = "spmm";
  std::string emit = "csv";
  int repeats = 5;
  double timeout_sec = 300.0;
  CommonOpts common;
};

BenchKernel parse_kernel(const std::string& s) {
  if (s == "spmm") return BenchKernel::Spmm;
  if (s == "sddmm") return BenchKernel::Sddmm;
  if (s == "gcn") return BenchKernel::Gcn;
  if (s == "agnn") return BenchKernel::Agnn;
  throw RangeError("kernel must be one of spmm|sddmm|gcn|agnn");
}

int run_bench_cmd(const BenchArgs& a) {
  BenchConfig cfg;
  cfg.geometry = {a.common.blk_h, a.common.blk_w};
  cfg.split_ratio = a.common.split;
  cfg.precision = parse_precision(a.common.precision);
  cfg.dims = a.common.dim;
  cfg.repeats = a.repeats;
  cfg.seed = a.common.seed;
  cfg.threads = a.common.threads;
  cfg.check_oracle = a.common.check_oracle;
  cfg.timeout_sec = a.timeout_sec;

  BenchReport report;
  if (!a.suite.empty()) {
    if (a.suite != "synthetic-blockdense")
      throw RangeError("unknown suite '" + a.suite + "'");
    cfg.dataset = "blockdense:windows=512,tiles=16,seed=" +
                  std::to_string(a.common.seed);
    for (BenchKernel k : {BenchKernel::Spmm, BenchKernel::Sddmm}) {
      cfg.kernel = k;
      BenchReport part = run_bench(cfg);
      report.rows.insert(report.rows.end(), part.rows.begin(),
                         part.rows.end());
    }
  } else {
    if (a.dataset.empty())
      throw RangeError("bench needs --dataset or --suite");
    cfg.dataset = a.dataset;
    cfg.kernel = parse_kernel(a.kernel);
    report = run_bench(cfg);
  }

  if (a.emit == "csv") {
    write_csv(std::cout, report);
  } else if (a.emit == "json") {
    write_json(std::cout, report);
  } else {
    throw RangeError("emit must be csv or json");
  }
  if (cfg.check_oracle) {
    for (const BenchRow& r : report.rows) {
      if (r.max_rel_err && *r.max_rel_err > kFp32Tol &&
          cfg.precision == Precision::Fp32)
        return 1;
    }
  }
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"Tiled sparse graph kernels: transform, SpMM/SDDMM, GCN/AGNN"};
  app.require_subcommand(1);

  TransformArgs ta;
  CLI::App* transform = app.add_subcommand(
      "transform", "Build the tiled transform and persist it as SGT1");
  transform->add_option("--input", ta.input, "Graph file or synthetic spec")
      ->required();
  std::string ta_format, va_format, ra_format[4];
  transform->add_option("--format", ta_format, "mtx or tsv");
  transform->add_option("--out", ta.out, "Output .sgt path");
  transform->add_flag("--stats", ta.stats, "Print block statistics");
  transform->add_flag("--symmetrize", ta.symmetrize);
  transform->add_flag("--self-loops", ta.self_loops);
  transform->add_flag("--no-dedupe", ta.no_dedupe);
  transform->add_flag("--gcn-normalize", ta.gcn_normalize);
  add_kernel_opts(transform, ta.common);

  RunArgs kernel_args[4];
  const char* kernel_names[4] = {"spmm", "sddmm", "gcn", "agnn"};
  const char* kernel_desc[4] = {
      "Hybrid tiled neighbor aggregation", "Hybrid tiled edge features",
      "GCN forward pass", "Attention (AGNN) forward pass"};
  CLI::App* kernel_subs[4];
  for (int i = 0; i < 4; ++i) {
    RunArgs& ra = kernel_args[i];
    CLI::App* sub = app.add_subcommand(kernel_names[i], kernel_desc[i]);
    sub->add_option("--graph", ra.graph, "Pre-built SGT1 file");
    sub->add_option("--input", ra.input, "Graph file or synthetic spec");
    sub->add_option("--format", ra_format[i], "mtx or tsv");
    if (i >= 2) sub->add_option("--layers", ra.layers, "Layer count");
    if (i == 2)
      sub->add_option("--weights", ra.weights,
                      "Per-layer weight files (repeatable)");
    if (i == 3) sub->add_option("--beta", ra.beta, "Attention temperature");
    add_kernel_opts(sub, ra.common);
    kernel_subs[i] = sub;
  }
  kernel_args[3].common.dim = 32;  // AGNN default width

  VerifyArgs va;
  CLI::App* verify = app.add_subcommand(
      "verify", "Transform + kernels vs naive oracles; exit 1 on mismatch");
  verify->add_option("--input", va.input, "Graph file or synthetic spec")
      ->required();
  verify->add_option("--format", va_format, "mtx or tsv");
  add_kernel_opts(verify, va.common);

  BenchArgs ba;
  CLI::App* bench = app.add_subcommand(
      "bench", "Time tile/scalar/hybrid paths and emit a report");
  bench->add_option("--dataset", ba.dataset, "Graph file or synthetic spec");
  bench->add_option("--suite", ba.suite, "Canned suite: synthetic-blockdense");
  bench->add_option("--kernel", ba.kernel, "spmm|sddmm|gcn|agnn")
      ->capture_default_str();
  bench->add_option("--repeats", ba.repeats, "Timed runs per path")
      ->capture_default_str();
  bench->add_option("--emit", ba.emit, "csv or json")->capture_default_str();
  bench->add_option("--timeout-sec", ba.timeout_sec, "Per-run cap");
  add_kernel_opts(bench, ba.common);

  std::vector<std::string> argv_like = args;
  try {
    std::vector<const char*> argv;
    argv.push_back("sgtk");
    for (const std::string& s : argv_like) argv.push_back(s.c_str());
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  auto opt_format = [](const std::string& f) {
    return f.empty() ? std::nullopt : std::optional<std::string>(f);
  };
  try {
    if (transform->parsed()) {
      ta.format = opt_format(ta_format);
      return run_transform(ta);
    }
    for (int i = 0; i < 4; ++i) {
      if (!kernel_subs[i]->parsed()) continue;
      kernel_args[i].format = opt_format(ra_format[i]);
      if (kernel_args[i].graph.empty() && kernel_args[i].input.empty())
        throw RangeError("need --graph or --input");
      switch (i) {
        case 0: return run_spmm(kernel_args[i]);
        case 1: return run_sddmm(kernel_args[i]);
        case 2: return run_gcn(kernel_args[i]);
        case 3: return run_agnn(kernel_args[i]);
      }
    }
    if (verify->parsed()) {
      va.format = opt_format(va_format);
      return run_verify(va);
    }
    if (bench->parsed()) return run_bench_cmd(ba);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace sgtk
