#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "sgtk/errors.hpp"
#include "sgtk/graph_io.hpp"
#include "test_support.hpp"

using namespace sgtk;
using namespace sgtk_test;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& content, const char* ext = ".tsv") {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("sgtk_io_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++) + ext);
    std::ofstream(path) << content;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

bool has_edge(const CsrGraph& g, NodeId r, NodeId c) {
  for (auto e = g.row_begin(r); e < g.row_end(r); ++e)
    if (g.edge_list[e] == c) return true;
  return false;
}

}  // namespace

TEST_CASE("tsv loader builds CSR") {
  TempFile f("0 1\n1 0\n");
  CsrGraph g = load_edge_list(f.path.string(), EdgeListFormat::Tsv);
  CHECK(g.num_nodes == 2);
  CHECK(g.node_pointer == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(g.edge_list == std::vector<NodeId>{1, 0});
  CHECK_FALSE(g.has_values());
}

TEST_CASE("tsv loader handles comments, tabs and values") {
  TempFile f("# a comment\n0\t1\t2.5\n\n2 0 -1 # trailing\n");
  CsrGraph g = load_edge_list(f.path.string(), EdgeListFormat::Tsv);
  CHECK(g.num_nodes == 3);
  CHECK(g.num_edges() == 2);
  REQUIRE(g.has_values());
  CHECK(g.values[0] == 2.5f);
  CHECK(g.values[1] == -1.0f);
}

TEST_CASE("tsv loader remaps sparse ids densely") {
  TempFile f("5 9\n9 1000\n");
  CsrGraph g = load_edge_list(f.path.string(), EdgeListFormat::Tsv);
  CHECK(g.num_nodes == 3);  // {5, 9, 1000} -> {0, 1, 2}
  CHECK(has_edge(g, 0, 1));
  CHECK(has_edge(g, 1, 2));
}

TEST_CASE("empty tsv gives the empty graph") {
  TempFile f("");
  CsrGraph g = load_edge_list(f.path.string(), EdgeListFormat::Tsv);
  CHECK(g.num_nodes == 0);
  CHECK(g.node_pointer == std::vector<std::uint64_t>{0});
  CHECK(g.edge_list.empty());
}

TEST_CASE("tsv parse errors carry line numbers") {
  SUBCASE("missing field") {
    TempFile f("0 1\n7\n");
    try {
      load_edge_list(f.path.string(), EdgeListFormat::Tsv);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
    }
  }
  SUBCASE("too many fields") {
    TempFile f("0 1 2 3\n");
    CHECK_THROWS_AS(load_edge_list(f.path.string(), EdgeListFormat::Tsv),
                    ParseError);
  }
  SUBCASE("negative id") {
    TempFile f("-1 0\n");
    CHECK_THROWS_AS(load_edge_list(f.path.string(), EdgeListFormat::Tsv),
                    ParseError);
  }
}

TEST_CASE("node ids beyond 32 bits overflow") {
  TempFile f("0 4294967296\n");
  CHECK_THROWS_AS(load_edge_list(f.path.string(), EdgeListFormat::Tsv),
                  OverflowError);
}

TEST_CASE("missing file raises IoError") {
  CHECK_THROWS_AS(load_edge_list("/nonexistent/graph.tsv"), IoError);
}

TEST_CASE("matrix market pattern general") {
  TempFile f("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 2\n",
             ".mtx");
  CsrGraph g = load_edge_list(f.path.string());  // picked by extension
  CHECK(g.num_nodes == 2);
  CHECK(g.num_edges() == 1);
  CHECK(has_edge(g, 0, 1));  // 1-based -> 0-based
  CHECK_FALSE(g.has_values());
}

TEST_CASE("matrix market real general keeps values") {
  TempFile f(
      "%%MatrixMarket matrix coordinate real general\n% comment\n3 3 2\n"
      "1 2 0.5\n3 1 2.0\n",
      ".mtx");
  CsrGraph g = load_edge_list(f.path.string(), EdgeListFormat::MatrixMarket);
  REQUIRE(g.has_values());
  CHECK(g.num_edges() == 2);
  CHECK(g.values[0] == 0.5f);
}

TEST_CASE("matrix market symmetric expands mirrors") {
  TempFile f(
      "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 2\n2 1\n3 3\n",
      ".mtx");
  CsrGraph g = load_edge_list(f.path.string(), EdgeListFormat::MatrixMarket);
  CHECK(g.num_edges() == 3);  // (1,0), (0,1), (2,2)
  CHECK(has_edge(g, 0, 1));
  CHECK(has_edge(g, 1, 0));
  CHECK(has_edge(g, 2, 2));
}

TEST_CASE("matrix market rejects the dense array variant") {
  TempFile f("%%MatrixMarket matrix array real general\n2 2\n1.0\n", ".mtx");
  CHECK_THROWS_AS(load_edge_list(f.path.string(), EdgeListFormat::MatrixMarket),
                  ParseError);
}

TEST_CASE("matrix market rejects entries outside declared dims") {
  TempFile f("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n3 1\n",
             ".mtx");
  CHECK_THROWS_AS(load_edge_list(f.path.string(), EdgeListFormat::MatrixMarket),
                  ParseError);
}

TEST_CASE("normalize: symmetrize adds the reverse edge") {
  CsrGraph g = graph_of(2, {{0, 1, 1.0f}});
  CsrGraph out = normalize_graph(g, {.symmetrize = true});
  CHECK(out.num_edges() == 2);
  CHECK(has_edge(out, 0, 1));
  CHECK(has_edge(out, 1, 0));
}

TEST_CASE("normalize: dedupe sums duplicate values") {
  CsrGraph g = graph_of(2, {{0, 1, 2.0f}, {0, 1, 3.0f}}, true);
  CsrGraph out = normalize_graph(g, {.dedupe = true});
  REQUIRE(out.num_edges() == 1);
  CHECK(out.values[0] == 5.0f);
}

TEST_CASE("normalize: self loops on the empty graph") {
  CsrGraph g;
  g.num_nodes = 3;
  g.node_pointer.assign(4, 0);
  CsrGraph out = normalize_graph(g, {.add_self_loops = true});
  CHECK(out.num_edges() == 3);
  for (NodeId i = 0; i < 3; ++i) CHECK(has_edge(out, i, i));
}

TEST_CASE("normalize is idempotent for every option combination") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 20; ++iter) {
    const std::size_t n = 1 + rng() % 40;
    std::vector<Triple> triples;
    std::uniform_real_distribution<float> val(-2.0f, 2.0f);
    const std::size_t m = rng() % 120;
    for (std::size_t k = 0; k < m; ++k) {
      // duplicates on purpose
      triples.push_back(
          {NodeId(rng() % n), NodeId(rng() % n), val(rng)});
    }
    const bool weighted = rng() % 2;
    CsrGraph g = graph_of(n, triples, weighted);
    for (int mask = 0; mask < 8; ++mask) {
      NormalizeOpts opts{bool(mask & 1), bool(mask & 2), bool(mask & 4)};
      CsrGraph once = normalize_graph(g, opts);
      CsrGraph twice = normalize_graph(once, opts);
      CHECK(once.node_pointer == twice.node_pointer);
      CHECK(once.edge_list == twice.edge_list);
      CHECK(once.values == twice.values);
      if (opts.dedupe) validate_csr(once);
      else validate_csr(once, /*require_sorted_unique=*/false);
      if (opts.symmetrize && opts.dedupe) {
        for (std::size_t r = 0; r < n; ++r)
          for (auto e = once.row_begin(r); e < once.row_end(r); ++e)
            CHECK(has_edge(once, once.edge_list[e], NodeId(r)));
      }
    }
  }
}

TEST_CASE("gcn normalization values") {
  SUBCASE("single node with self-loop") {
    CsrGraph g = gcn_normalize_values(identity_graph(1));
    REQUIRE(g.num_edges() == 1);
    CHECK(g.values[0] == 1.0f);
  }
  SUBCASE("full graph of two nodes: all 0.5") {
    CsrGraph g = graph_of(
        2, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}});
    CsrGraph out = gcn_normalize_values(g);
    for (float v : out.values) CHECK(v == doctest::Approx(0.5f));
  }
  SUBCASE("path graph 0-1-2 against a dense normalization reference") {
    CsrGraph g = graph_of(3, {{0, 0, 1},
                              {0, 1, 1},
                              {1, 0, 1},
                              {1, 1, 1},
                              {1, 2, 1},
                              {2, 1, 1},
                              {2, 2, 1}});
    CsrGraph out = gcn_normalize_values(g);
    // D^-1/2 A D^-1/2 computed densely, degree = row non-zero count.
    DenseMatrix a = dense_adjacency(g);
    std::vector<double> inv(3);
    for (int i = 0; i < 3; ++i) {
      double deg = 0;
      for (int j = 0; j < 3; ++j) deg += a.at(i, j) != 0.0f ? 1.0 : 0.0;
      inv[i] = 1.0 / std::sqrt(deg);
    }
    for (std::size_t i = 0; i < 3; ++i) {
      for (auto e = out.row_begin(i); e < out.row_end(i); ++e) {
        const double want = inv[i] * inv[out.edge_list[e]];
        CHECK(out.values[e] == doctest::Approx(float(want)));
      }
    }
    // the frozen value for edge (0,1): 1/sqrt(2*3)
    CHECK(out.values[1] == doctest::Approx(0.40824829f));
  }
  SUBCASE("zero-degree row raises DegreeError") {
    CsrGraph g;
    g.num_nodes = 2;
    g.node_pointer = {0, 1, 1};
    g.edge_list = {0};
    CHECK_THROWS_AS(gcn_normalize_values(g), DegreeError);
  }
}

TEST_CASE("CSR stays well-formed through every operation (random inputs)") {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 15; ++iter) {
    const std::size_t n = 1 + rng() % 1024;
    const double p = 4.0 / double(n);
    CsrGraph g = random_graph(n, p, rng(), iter % 2);
    validate_csr(g);
    CsrGraph norm = normalize_graph(
        g, {.symmetrize = true, .add_self_loops = true, .dedupe = true});
    validate_csr(norm);
    validate_csr(gcn_normalize_values(norm));
  }
}
