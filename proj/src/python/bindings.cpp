#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>

#include "sgtk/errors.hpp"
#include "sgtk/gnn.hpp"
#include "sgtk/graph_io.hpp"
#include "sgtk/oracle.hpp"
#include "sgtk/sgt_file.hpp"
#include "sgtk/sgt_transform.hpp"
#include "sgtk/synthetic.hpp"
#include "sgtk/tile_exec.hpp"

namespace py = pybind11;
using namespace sgtk;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

DenseMatrix matrix_from_numpy(const FloatArray& arr) {
  const py::buffer_info info = arr.request();
  if (info.ndim != 2) throw ShapeError("expected a 2-D float array");
  DenseMatrix m(std::size_t(info.shape[0]), std::size_t(info.shape[1]));
  std::memcpy(m.data.data(), info.ptr, m.data.size() * sizeof(float));
  return m;
}

py::array_t<float> matrix_to_numpy(const DenseMatrix& m) {
  py::array_t<float> arr({m.rows, m.cols});
  std::memcpy(arr.mutable_data(), m.data.data(),
              m.data.size() * sizeof(float));
  return arr;
}

py::array_t<float> vector_to_numpy(const std::vector<float>& v) {
  py::array_t<float> arr(v.size());
  std::memcpy(arr.mutable_data(), v.data(), v.size() * sizeof(float));
  return arr;
}

template <class T>
py::array_t<T> ints_to_numpy(const std::vector<T>& v) {
  py::array_t<T> arr(v.size());
  std::memcpy(arr.mutable_data(), v.data(), v.size() * sizeof(T));
  return arr;
}

std::vector<float> edge_values_from(const std::optional<FloatArray>& arr) {
  if (!arr) return {};
  const py::buffer_info info = arr->request();
  if (info.ndim != 1) throw ShapeError("edge values must be 1-D");
  std::vector<float> v(std::size_t(info.shape[0]));
  std::memcpy(v.data(), info.ptr, v.size() * sizeof(float));
  return v;
}

Precision precision_from(const std::string& s) {
  if (s == "fp32") return Precision::Fp32;
  if (s == "tf32") return Precision::Tf32;
  throw RangeError("precision must be 'fp32' or 'tf32'");
}

HybridSplitPlan plan_or_default(const TransformedGraph& t,
                                const std::optional<HybridSplitPlan>& plan) {
  return plan ? *plan : make_split_plan(t, 1.0);
}

std::vector<GcnLayerParams> gcn_layers_from(
    const std::vector<std::pair<FloatArray, bool>>& layers) {
  std::vector<GcnLayerParams> out;
  out.reserve(layers.size());
  for (const auto& [w, relu] : layers)
    out.push_back({matrix_from_numpy(w), relu});
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Tiled sparse graph kernels: sparse-to-dense tile transform, hybrid "
      "SpMM/SDDMM, and GCN/AGNN forward passes.";

  py::register_exception<ParseError>(m, "GraphParseError",
                                     PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<RangeError>(m, "RangeError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<IndexError>(m, "TileIndexError", PyExc_IndexError);
  py::register_exception<IoError>(m, "GraphIoError", PyExc_OSError);
  py::register_exception<DegreeError>(m, "DegreeError", PyExc_ValueError);
  py::register_exception<NonFiniteError>(m, "NonFiniteError",
                                         PyExc_FloatingPointError);
  py::register_exception<OverflowError>(m, "NodeIdOverflowError",
                                        PyExc_OverflowError);
  py::register_exception<Error>(m, "SgtkError", PyExc_RuntimeError);

  py::class_<CsrGraph>(m, "CsrGraph")
      .def_readonly("num_nodes", &CsrGraph::num_nodes)
      .def_property_readonly("num_edges",
                             [](const CsrGraph& g) { return g.num_edges(); })
      .def_property_readonly(
          "node_pointer",
          [](const CsrGraph& g) { return ints_to_numpy(g.node_pointer); })
      .def_property_readonly(
          "edge_list",
          [](const CsrGraph& g) { return ints_to_numpy(g.edge_list); })
      .def_property_readonly("values",
                             [](const CsrGraph& g) -> py::object {
                               if (!g.has_values()) return py::none();
                               return vector_to_numpy(g.values);
                             })
      .def("__repr__", [](const CsrGraph& g) {
        return "CsrGraph(num_nodes=" + std::to_string(g.num_nodes) +
               ", num_edges=" + std::to_string(g.num_edges()) + ")";
      });

  py::class_<TileGeometry>(m, "TileGeometry")
      .def(py::init<std::uint32_t, std::uint32_t>(), py::arg("blk_h") = 16,
           py::arg("blk_w") = 8)
      .def_readwrite("blk_h", &TileGeometry::blk_h)
      .def_readwrite("blk_w", &TileGeometry::blk_w);

  py::class_<BlockStats>(m, "BlockStats")
      .def_readonly("block_counter", &BlockStats::block_counter)
      .def_readonly("capacity", &BlockStats::capacity)
      .def_readonly("nnz", &BlockStats::nnz)
      .def_readonly("mean_tile_density", &BlockStats::mean_tile_density)
      .def("__repr__", [](const BlockStats& s) {
        return "BlockStats(blocks=" + std::to_string(s.block_counter) +
               ", capacity=" + std::to_string(s.capacity) +
               ", nnz=" + std::to_string(s.nnz) + ")";
      });

  py::class_<TransformedGraph>(m, "TransformedGraph")
      .def_readonly("csr", &TransformedGraph::csr)
      .def_readonly("geometry", &TransformedGraph::geometry)
      .def_readonly("block_counter", &TransformedGraph::block_counter)
      .def_property_readonly("num_windows",
                             [](const TransformedGraph& t) {
                               return t.num_windows();
                             })
      .def_property_readonly(
          "edge_to_row",
          [](const TransformedGraph& t) { return ints_to_numpy(t.edge_to_row); })
      .def_property_readonly("edge_to_column",
                             [](const TransformedGraph& t) {
                               return ints_to_numpy(t.edge_to_column);
                             })
      .def_property_readonly("block_partition",
                             [](const TransformedGraph& t) {
                               return ints_to_numpy(t.block_partition);
                             })
      .def_property_readonly("window_offsets",
                             [](const TransformedGraph& t) {
                               return ints_to_numpy(t.window_offsets);
                             })
      .def_property_readonly("window_unique_cols",
                             [](const TransformedGraph& t) {
                               return ints_to_numpy(t.window_unique_cols);
                             });

  py::class_<HybridSplitPlan>(m, "HybridSplitPlan")
      .def_readonly("ratio", &HybridSplitPlan::ratio)
      .def_property_readonly("per_window_tile_cut",
                             [](const HybridSplitPlan& p) {
                               return ints_to_numpy(p.per_window_tile_cut);
                             });

  m.def(
      "csr_from_coo",
      [](std::size_t num_nodes, py::array_t<std::int64_t> rows,
         py::array_t<std::int64_t> cols, std::optional<FloatArray> values) {
        const auto r = rows.unchecked<1>();
        const auto c = cols.unchecked<1>();
        if (r.shape(0) != c.shape(0))
          throw ShapeError("rows and cols must have equal length");
        std::vector<float> vals = edge_values_from(values);
        if (!vals.empty() && std::int64_t(vals.size()) != r.shape(0))
          throw ShapeError("values length must match rows/cols");
        std::vector<Triple> triples(std::size_t(r.shape(0)));
        for (py::ssize_t i = 0; i < r.shape(0); ++i) {
          if (r(i) < 0 || c(i) < 0 || std::size_t(r(i)) >= num_nodes ||
              std::size_t(c(i)) >= num_nodes)
            throw RangeError("node id out of range");
          triples[std::size_t(i)] = {NodeId(r(i)), NodeId(c(i)),
                                     vals.empty() ? 1.0f : vals[std::size_t(i)]};
        }
        return csr_from_triples(num_nodes, std::move(triples), !vals.empty());
      },
      py::arg("num_nodes"), py::arg("rows"), py::arg("cols"),
      py::arg("values") = py::none(),
      "Build a CsrGraph from COO index arrays (duplicates preserved).");

  m.def(
      "load_edge_list",
      [](const std::string& path, const std::optional<std::string>& format) {
        if (!format) return load_edge_list(path);
        if (*format == "mtx") return load_edge_list(path, EdgeListFormat::MatrixMarket);
        if (*format == "tsv") return load_edge_list(path, EdgeListFormat::Tsv);
        throw RangeError("format must be 'mtx' or 'tsv'");
      },
      py::arg("path"), py::arg("format") = py::none());

  m.def(
      "normalize_graph",
      [](const CsrGraph& g, bool symmetrize, bool add_self_loops,
         bool dedupe) {
        return normalize_graph(g, {symmetrize, add_self_loops, dedupe});
      },
      py::arg("g"), py::arg("symmetrize") = false,
      py::arg("add_self_loops") = false, py::arg("dedupe") = true);

  m.def("gcn_normalize_values", &gcn_normalize_values, py::arg("g"));

  m.def(
      "sgt_transform",
      [](const CsrGraph& g, std::uint32_t blk_h, std::uint32_t blk_w,
         int threads) {
        return sgt_transform(g, {blk_h, blk_w}, threads);
      },
      py::arg("g"), py::arg("blk_h") = 16, py::arg("blk_w") = 8,
      py::arg("threads") = 0);

  m.def("reblock", &reblock, py::arg("t"), py::arg("new_blk_w"));
  m.def("block_stats", &block_stats, py::arg("t"));
  m.def("save_sgt", &save_sgt, py::arg("t"), py::arg("path"));
  m.def("load_sgt", &load_sgt, py::arg("path"));

  m.def("make_split_plan", &make_split_plan, py::arg("t"),
        py::arg("ratio") = 1.0);

  m.def(
      "gather_tile",
      [](const TransformedGraph& t, std::size_t window, std::size_t tile) {
        GatheredTile g = gather_tile(t, window, tile);
        return py::make_tuple(matrix_to_numpy(g.a_tile),
                              ints_to_numpy(g.x_index));
      },
      py::arg("t"), py::arg("window"), py::arg("tile"));

  m.def(
      "spmm_hybrid",
      [](const TransformedGraph& t, const FloatArray& x,
         const std::optional<HybridSplitPlan>& plan,
         const std::string& precision, int threads,
         const std::optional<FloatArray>& edge_values) {
        const DenseMatrix xm = matrix_from_numpy(x);
        const std::vector<float> ev = edge_values_from(edge_values);
        return matrix_to_numpy(spmm_hybrid(t, xm, plan_or_default(t, plan),
                                           precision_from(precision), threads,
                                           ev));
      },
      py::arg("t"), py::arg("x"), py::arg("plan") = py::none(),
      py::arg("precision") = "fp32", py::arg("threads") = 0,
      py::arg("edge_values") = py::none());

  m.def(
      "sddmm_hybrid",
      [](const TransformedGraph& t, const FloatArray& x, const FloatArray& y,
         const std::optional<HybridSplitPlan>& plan,
         const std::string& precision, int threads,
         const std::optional<FloatArray>& edge_values) {
        const DenseMatrix xm = matrix_from_numpy(x);
        const DenseMatrix ym = matrix_from_numpy(y);
        const std::vector<float> ev = edge_values_from(edge_values);
        return vector_to_numpy(sddmm_hybrid(t, xm, ym,
                                            plan_or_default(t, plan),
                                            precision_from(precision),
                                            threads, ev));
      },
      py::arg("t"), py::arg("x"), py::arg("y"), py::arg("plan") = py::none(),
      py::arg("precision") = "fp32", py::arg("threads") = 0,
      py::arg("edge_values") = py::none());

  m.def(
      "tf32_round",
      [](const FloatArray& x) {
        return matrix_to_numpy(tf32_round(matrix_from_numpy(x)));
      },
      py::arg("x"));

  m.def("oracle_spmm",
        [](const CsrGraph& g, const FloatArray& x) {
          return matrix_to_numpy(oracle_spmm(g, matrix_from_numpy(x)));
        },
        py::arg("g"), py::arg("x"));

  m.def("oracle_sddmm",
        [](const CsrGraph& g, const FloatArray& x, const FloatArray& y) {
          return vector_to_numpy(
              oracle_sddmm(g, matrix_from_numpy(x), matrix_from_numpy(y)));
        },
        py::arg("g"), py::arg("x"), py::arg("y"));

  m.def(
      "oracle_dense_gcn",
      [](const FloatArray& adjacency, const FloatArray& x,
         const std::vector<std::pair<FloatArray, bool>>& layers) {
        return matrix_to_numpy(oracle_dense_gcn(matrix_from_numpy(adjacency),
                                                matrix_from_numpy(x),
                                                gcn_layers_from(layers)));
      },
      py::arg("adjacency"), py::arg("x"), py::arg("layers"),
      "layers: list of (weight 2-D array, apply_relu) tuples");

  m.def(
      "gcn_forward",
      [](const TransformedGraph& t, const FloatArray& x,
         const std::vector<std::pair<FloatArray, bool>>& layers,
         const std::optional<HybridSplitPlan>& plan,
         const std::string& precision, int threads) {
        return matrix_to_numpy(
            gcn_forward(t, matrix_from_numpy(x), gcn_layers_from(layers),
                        plan_or_default(t, plan), precision_from(precision),
                        threads));
      },
      py::arg("t"), py::arg("x"), py::arg("layers"),
      py::arg("plan") = py::none(), py::arg("precision") = "fp32",
      py::arg("threads") = 0);

  m.def(
      "edge_softmax",
      [](const CsrGraph& g, const FloatArray& logits) {
        const py::buffer_info info = logits.request();
        if (info.ndim != 1) throw ShapeError("logits must be 1-D");
        EdgeValList v(std::size_t(info.shape[0]));
        std::memcpy(v.data(), info.ptr, v.size() * sizeof(float));
        return vector_to_numpy(edge_softmax(g, v));
      },
      py::arg("g"), py::arg("logits"));

  m.def(
      "agnn_forward",
      [](const TransformedGraph& t, const FloatArray& x,
         const std::vector<float>& betas,
         const std::optional<HybridSplitPlan>& plan,
         const std::string& precision, int threads) {
        std::vector<AgnnLayerParams> layers;
        for (float b : betas) layers.push_back({b});
        return matrix_to_numpy(
            agnn_forward(t, matrix_from_numpy(x), layers,
                         plan_or_default(t, plan), precision_from(precision),
                         threads));
      },
      py::arg("t"), py::arg("x"), py::arg("betas"),
      py::arg("plan") = py::none(), py::arg("precision") = "fp32",
      py::arg("threads") = 0);

  m.def("make_synthetic", &make_synthetic, py::arg("spec"));
  m.def("make_random_graph", &make_random_graph, py::arg("n"), py::arg("p"),
        py::arg("seed") = 1);
  m.def(
      "make_blockdense_graph",
      [](std::size_t windows, std::size_t tiles, std::uint64_t seed) {
        return make_blockdense_graph(windows, tiles, seed);
      },
      py::arg("windows"), py::arg("tiles"), py::arg("seed") = 1);
}
