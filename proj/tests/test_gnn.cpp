#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "sgtk/errors.hpp"
#include "sgtk/gnn.hpp"
#include "sgtk/graph_io.hpp"
#include "sgtk/oracle.hpp"
#include "test_support.hpp"

using namespace sgtk;
using namespace sgtk_test;

namespace {

TransformedGraph gcn_ready(const CsrGraph& raw) {
  CsrGraph g = normalize_graph(
      raw, {.symmetrize = true, .add_self_loops = true, .dedupe = true});
  return sgt_transform(gcn_normalize_values(g));
}

DenseMatrix eye(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0f;
  return m;
}

}  // namespace

TEST_CASE("gcn on self-loops with identity weights passes x through") {
  TransformedGraph t = sgt_transform(gcn_normalize_values(identity_graph(20)));
  DenseMatrix x = DenseMatrix::random(20, 6, 3, 0.0f, 1.0f);
  std::vector<GcnLayerParams> layers{{eye(6), true}, {eye(6), true}};
  DenseMatrix out = gcn_forward(t, x, layers, make_split_plan(t));
  CHECK(out.data == x.data);
}

TEST_CASE("gcn with zero weights is zero") {
  TransformedGraph t = gcn_ready(random_graph(33, 0.1, 4));
  DenseMatrix x = DenseMatrix::random(33, 8, 5);
  std::vector<GcnLayerParams> layers{{DenseMatrix(8, 8), true}};
  DenseMatrix out = gcn_forward(t, x, layers, make_split_plan(t));
  for (float v : out.data) CHECK(v == 0.0f);
}

TEST_CASE("gcn matches the dense oracle") {
  std::mt19937_64 rng(606);
  for (int iter = 0; iter < 4; ++iter) {
    const std::size_t n = 32 + rng() % 128;
    TransformedGraph t = gcn_ready(random_graph(n, 0.04, rng()));
    DenseMatrix x = DenseMatrix::random(n, 16, rng());
    auto layers = random_gcn_layers(16, 16, 16, 2, rng());
    for (double ratio : {1.0, 0.0}) {
      DenseMatrix got =
          gcn_forward(t, x, layers, make_split_plan(t, ratio));
      DenseMatrix want = oracle_dense_gcn(dense_adjacency(t.csr), x, layers);
      CHECK(max_rel_err(got, want) <= 1e-4);
    }
  }
}

TEST_CASE("gcn shape errors") {
  TransformedGraph t = sgt_transform(gcn_normalize_values(identity_graph(4)));
  std::vector<GcnLayerParams> layers{{DenseMatrix(5, 2), false}};
  CHECK_THROWS_AS(
      gcn_forward(t, DenseMatrix(4, 4), layers, make_split_plan(t)),
      ShapeError);
  CHECK_THROWS_AS(
      gcn_forward(t, DenseMatrix(3, 5), layers, make_split_plan(t)),
      ShapeError);
}

TEST_CASE("gcn output rows permute with the node labels") {
  const std::size_t n = 48;
  CsrGraph base = random_graph(n, 0.08, 12);
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId(0));
  std::mt19937_64 rng(13);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<Triple> relabeled;
  for (std::size_t r = 0; r < n; ++r)
    for (auto e = base.row_begin(r); e < base.row_end(r); ++e)
      relabeled.push_back({perm[r], perm[base.edge_list[e]], 1.0f});

  TransformedGraph t = gcn_ready(base);
  TransformedGraph tp = gcn_ready(graph_of(n, std::move(relabeled)));

  DenseMatrix x = DenseMatrix::random(n, 16, 14);
  DenseMatrix xp(n, 16);
  for (std::size_t i = 0; i < n; ++i)
    std::copy_n(x.row_ptr(i), 16, xp.row_ptr(perm[i]));

  auto layers = random_gcn_layers(16, 16, 16, 2, 15);
  DenseMatrix out = gcn_forward(t, x, layers, make_split_plan(t));
  DenseMatrix outp = gcn_forward(tp, xp, layers, make_split_plan(tp));

  DenseMatrix expect(n, 16);
  for (std::size_t i = 0; i < n; ++i)
    std::copy_n(out.row_ptr(i), 16, expect.row_ptr(perm[i]));
  CHECK(max_rel_err(outp, expect) <= 1e-4);
}

TEST_CASE("edge_softmax closed forms") {
  SUBCASE("single-edge row") {
    CsrGraph g = graph_of(2, {{0, 1, 1.0f}});
    EdgeValList out = edge_softmax(g, {3.25f});
    CHECK(out == EdgeValList{1.0f});
  }
  SUBCASE("two equal logits split evenly") {
    CsrGraph g = graph_of(3, {{0, 1, 1}, {0, 2, 1}});
    EdgeValList out = edge_softmax(g, {0.7f, 0.7f});
    CHECK(out[0] == doctest::Approx(0.5f));
    CHECK(out[1] == doctest::Approx(0.5f));
  }
  SUBCASE("logits 0 and ln 2 give 1/3 and 2/3") {
    CsrGraph g = graph_of(3, {{0, 1, 1}, {0, 2, 1}});
    EdgeValList out = edge_softmax(g, {0.0f, std::log(2.0f)});
    CHECK(out[0] == doctest::Approx(1.0f / 3.0f).epsilon(1e-6));
    CHECK(out[1] == doctest::Approx(2.0f / 3.0f).epsilon(1e-6));
  }
  SUBCASE("extreme logits do not overflow") {
    CsrGraph g = graph_of(3, {{0, 1, 1}, {0, 2, 1}});
    EdgeValList out = edge_softmax(g, {200.0f, -200.0f});
    CHECK(std::isfinite(out[0]));
    CHECK(out[0] == doctest::Approx(1.0f));
  }
}

TEST_CASE("edge_softmax rows sum to one on random graphs") {
  std::mt19937_64 rng(909);
  for (int iter = 0; iter < 10; ++iter) {
    const std::size_t n = 8 + rng() % 200;
    CsrGraph g = random_graph(n, 0.05, rng());
    EdgeValList logits(g.num_edges());
    std::uniform_real_distribution<float> dist(-5.0f, 5.0f);
    for (float& v : logits) v = dist(rng);
    EdgeValList out = edge_softmax(g, logits);
    for (std::size_t r = 0; r < n; ++r) {
      if (g.degree(r) == 0) continue;
      double sum = 0.0;
      for (auto e = g.row_begin(r); e < g.row_end(r); ++e) {
        CHECK(out[e] >= 0.0f);
        sum += out[e];
      }
      CHECK(std::abs(sum - 1.0) <= 1e-6);
    }
  }
}

TEST_CASE("agnn on a single self-looped node is the identity map") {
  TransformedGraph t = sgt_transform(identity_graph(1));
  DenseMatrix x(1, 3);
  x.data = {0.5f, -1.0f, 2.0f};
  std::vector<AgnnLayerParams> layers(4, AgnnLayerParams{1.0f});
  DenseMatrix out = agnn_forward(t, x, layers, make_split_plan(t));
  CHECK(out.data == x.data);
}

TEST_CASE("agnn with beta 0 averages neighbors uniformly") {
  std::mt19937_64 rng(515);
  for (int iter = 0; iter < 5; ++iter) {
    const std::size_t n = 8 + rng() % 100;
    CsrGraph g = random_graph(n, 0.07, rng());
    TransformedGraph t = sgt_transform(g);
    DenseMatrix x = DenseMatrix::random(n, 8, rng());
    std::vector<AgnnLayerParams> layers(2, AgnnLayerParams{0.0f});
    DenseMatrix got = agnn_forward(t, x, layers, make_split_plan(t));
    DenseMatrix want = dense_mean_aggregate(g, x, 2);
    if (max_abs(want) > 0.0f) CHECK(max_rel_err(got, want) <= 1e-5);
  }
}

TEST_CASE("agnn matches the dense attention reference") {
  std::mt19937_64 rng(616);
  for (int iter = 0; iter < 3; ++iter) {
    const std::size_t n = 24 + rng() % 104;
    CsrGraph g = normalize_graph(random_graph(n, 0.05, rng()),
                                 {.add_self_loops = true});
    TransformedGraph t = sgt_transform(g);
    DenseMatrix x = DenseMatrix::random(n, 32, rng());
    const std::vector<float> betas{1.0f, 0.6f, 1.4f, 0.9f};
    std::vector<AgnnLayerParams> layers;
    for (float b : betas) layers.push_back({b});
    for (double ratio : {1.0, 0.0}) {
      DenseMatrix got = agnn_forward(t, x, layers, make_split_plan(t, ratio));
      DenseMatrix want = dense_agnn(g, x, betas);
      CHECK(max_rel_err(got, want) <= 1e-4);
    }
  }
}

TEST_CASE("agnn zero-norm rows stay zero and are counted") {
  CsrGraph g = normalize_graph(identity_graph(3), {});
  TransformedGraph t = sgt_transform(g);
  DenseMatrix x(3, 4);
  x.at(0, 0) = 1.0f;  // rows 1 and 2 are all-zero
  std::vector<AgnnLayerParams> layers{{1.0f}};
  std::size_t zeros = 0;
  DenseMatrix out =
      agnn_forward(t, x, layers, make_split_plan(t), Precision::Fp32, 0,
                   &zeros);
  CHECK(zeros == 2);
  CHECK(out.all_finite());
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(out.at(1, k) == 0.0f);
    CHECK(out.at(2, k) == 0.0f);
  }
}

TEST_CASE("agnn preserves feature width and node count") {
  CsrGraph g = random_graph(70, 0.05, 88);
  TransformedGraph t = sgt_transform(g);
  DenseMatrix x = DenseMatrix::random(70, 32, 2);
  std::vector<AgnnLayerParams> layers(4, AgnnLayerParams{1.0f});
  DenseMatrix out = agnn_forward(t, x, layers, make_split_plan(t));
  CHECK(out.rows == 70);
  CHECK(out.cols == 32);
}

TEST_CASE("weight files round trip through the JSON sidecar") {
  const auto tmp = std::filesystem::temp_directory_path() /
                   ("sgtk_w_" + std::to_string(::getpid()) + ".bin");
  GcnLayerParams layer{DenseMatrix::random(12, 7, 44), false};
  save_gcn_layer(layer, tmp.string());
  GcnLayerParams back = load_gcn_layer(tmp.string());
  CHECK(back.weight.rows == 12);
  CHECK(back.weight.cols == 7);
  CHECK(back.weight.data == layer.weight.data);
  CHECK(back.apply_relu == false);
  std::filesystem::remove(tmp);
  std::filesystem::remove(tmp.string() + ".json");
}

TEST_CASE("random layer stacks chain shapes") {
  auto layers = random_gcn_layers(16, 32, 4, 3, 1);
  REQUIRE(layers.size() == 3);
  CHECK(layers[0].weight.rows == 16);
  CHECK(layers[0].weight.cols == 32);
  CHECK(layers[1].weight.cols == 32);
  CHECK(layers[2].weight.rows == 32);
  CHECK(layers[2].weight.cols == 4);
  CHECK(layers[0].apply_relu);
  CHECK_FALSE(layers[2].apply_relu);
  for (float v : layers[0].weight.data) {
    CHECK(v >= -0.1f);
    CHECK(v <= 0.1f);
  }
}
