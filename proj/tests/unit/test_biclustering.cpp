#include <cmath>
#include <variant>

#include "cbfs/biclustering.hpp"
#include "cbfs/dataset.hpp"
#include "cbfs/errors.hpp"
#include "cbfs/rng.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cbfs;
using namespace cbfs::testing;

namespace {

FeatureAssignment hand_assignment() {
  // Feature 0 -> cluster 0; features 1, 2 -> cluster 1.
  return FeatureAssignment{2, {0, 1, 1}};
}

}  // namespace

TEST_CASE("sample_centroids: singleton clusters reproduce the matrix") {
  DataMatrix m;
  m.values = Matrix::from_rows({{5, 1}, {1, 5}});
  m.feature_names = {"f0", "f1"};
  m.sample_names = {"s0", "s1"};
  const Matrix c = sample_centroids(m, singleton_clusters(2));
  CHECK(c(0, 0) == 5);
  CHECK(c(0, 1) == 1);
  CHECK(c(1, 0) == 1);
  CHECK(c(1, 1) == 5);
}

TEST_CASE("sample_centroids averages within clusters") {
  DataMatrix m;
  m.values = Matrix::from_rows({{2, 4, 6}, {0, 0, 3}});
  m.feature_names = {"f0", "f1"};
  m.sample_names = {"s0", "s1", "s2"};
  SampleClassification cls{2, {0, 0, 1}, {}};
  const Matrix c = sample_centroids(m, cls);
  CHECK(c(0, 0) == doctest::Approx(3.0));
  CHECK(c(0, 1) == doctest::Approx(6.0));
  CHECK(c(1, 0) == doctest::Approx(0.0));
  CHECK(c(1, 1) == doctest::Approx(3.0));
}

TEST_CASE("sample_centroids of a constant matrix is constant") {
  DataMatrix m;
  m.values = Matrix(3, 4, 2.5);
  m.feature_names = {"a", "b", "c"};
  m.sample_names = {"w", "x", "y", "z"};
  SampleClassification cls{2, {0, 1, 0, 1}, {}};
  const Matrix c = sample_centroids(m, cls);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t r = 0; r < 2; ++r) CHECK(c(i, r) == doctest::Approx(2.5));
}

TEST_CASE("classify_features: strict argmax and exact ties") {
  auto id = classify_features(Matrix::from_rows({{5, 1}, {1, 5}}));
  REQUIRE(std::holds_alternative<FeatureAssignment>(id));
  CHECK(std::get<FeatureAssignment>(id).cluster_of == std::vector<std::size_t>{0, 1});

  auto third = classify_features(Matrix::from_rows({{5, 1}, {1, 5}, {10, 11}}));
  REQUIRE(std::holds_alternative<FeatureAssignment>(third));
  CHECK(std::get<FeatureAssignment>(third).cluster_of ==
        std::vector<std::size_t>{0, 1, 1});

  auto tied = classify_features(Matrix::from_rows({{5, 1}, {3, 3}}));
  REQUIRE(std::holds_alternative<TieReport>(tied));
  const auto& report = std::get<TieReport>(tied);
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].index == 1);
}

TEST_CASE("classification is invariant under positive scaling") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix c(4, 3);
    for (auto& v : c.data()) v = rng.uniform(-10, 10);
    const double scale = rng.uniform(0.1, 10.0);
    Matrix scaled = c;
    for (auto& v : scaled.data()) v *= scale;
    auto a = classify_features(c);
    auto b = classify_features(scaled);
    REQUIRE(std::holds_alternative<FeatureAssignment>(a));
    REQUIRE(std::holds_alternative<FeatureAssignment>(b));
    CHECK(std::get<FeatureAssignment>(a).cluster_of ==
          std::get<FeatureAssignment>(b).cluster_of);
  }
}

TEST_CASE("feature_centroids averages selected features only") {
  const DataMatrix m = hand_matrix();
  const auto f = hand_assignment();

  const Matrix all = feature_centroids(m, f, selection({1, 1, 1}));
  CHECK(all(0, 0) == doctest::Approx(5.0));
  CHECK(all(0, 1) == doctest::Approx(5.5));
  CHECK(all(1, 0) == doctest::Approx(1.0));
  CHECK(all(1, 1) == doctest::Approx(8.0));

  const Matrix partial = feature_centroids(m, f, selection({1, 1, 0}));
  CHECK(partial(0, 1) == doctest::Approx(1.0));
  CHECK(partial(1, 1) == doctest::Approx(5.0));
}

TEST_CASE("feature_centroids reports the empty cluster by index") {
  const DataMatrix m = hand_matrix();
  try {
    feature_centroids(m, hand_assignment(), selection({1, 0, 0}));
    FAIL("expected EmptyClusterError");
  } catch (const EmptyClusterError& e) {
    CHECK(e.cluster() == 1);
  }
}

TEST_CASE("classify_samples: dominance and ties") {
  auto both = classify_samples(Matrix::from_rows({{5, 5.5}, {1, 8}}));
  REQUIRE(std::holds_alternative<SampleAssignment>(both));
  CHECK(std::get<SampleAssignment>(both).cluster_of == std::vector<std::size_t>{1, 1});

  auto diag = classify_samples(Matrix::from_rows({{5, 1}, {1, 5}}));
  REQUIRE(std::holds_alternative<SampleAssignment>(diag));
  CHECK(std::get<SampleAssignment>(diag).cluster_of == std::vector<std::size_t>{0, 1});

  auto tied = classify_samples(Matrix::from_rows({{2, 2}}));
  REQUIRE(std::holds_alternative<TieReport>(tied));
}

TEST_CASE("is_consistent on the worked example") {
  const DataMatrix m = hand_matrix();
  const auto clusters = singleton_clusters(2);

  const auto bad = is_consistent(m, clusters, selection({1, 1, 1}),
                                 ConsistencyMode::plain());
  CHECK_FALSE(bad.consistent);
  REQUIRE(bad.violations.size() == 1);
  CHECK(bad.violations[0].sample == 0);
  CHECK(bad.violations[0].own_cluster == 0);
  CHECK(bad.violations[0].other_cluster == 1);
  CHECK(bad.violations[0].margin == doctest::Approx(-0.5));

  const auto good = is_consistent(m, clusters, selection({1, 1, 0}),
                                  ConsistencyMode::plain());
  CHECK(good.consistent);
  CHECK(good.violations.empty());
}

TEST_CASE("is_consistent honors alpha and beta margins") {
  const DataMatrix m = hand_matrix();
  const auto clusters = singleton_clusters(2);
  const auto sel = selection({1, 1, 0});
  // Margins with the reduced selection: sample 0 has 5 vs 1; sample 1 has 5 vs 1.
  CHECK(is_consistent(m, clusters, sel, ConsistencyMode::alpha(3.9)).consistent);
  CHECK_FALSE(is_consistent(m, clusters, sel, ConsistencyMode::alpha(4.0)).consistent);
  CHECK(is_consistent(m, clusters, sel, ConsistencyMode::beta(4.9)).consistent);
  CHECK_FALSE(is_consistent(m, clusters, sel, ConsistencyMode::beta(5.0)).consistent);
}

TEST_CASE("g_evaluate matches the hand computation") {
  const DataMatrix m = hand_matrix();
  const auto clusters = singleton_clusters(2);
  const auto f = hand_assignment();
  const std::vector<double> y{1.0 / 3.0, 2.0 / 3.0};

  const double g = g_evaluate(m, clusters, f, selection({1, 1, 1}), y,
                              ConsistencyMode::plain());
  CHECK(g == doctest::Approx(1.5).epsilon(1e-12));

  const std::vector<double> halves{0.5, 0.5};
  const double g_fixed = g_evaluate(m, clusters, f, selection({1, 1, 0}), halves,
                                    ConsistencyMode::plain());
  CHECK(g_fixed == 0.0);
}

TEST_CASE("g_evaluate is zero for the all-zero selection in plain mode") {
  const DataMatrix m = hand_matrix();
  const auto clusters = singleton_clusters(2);
  const std::vector<double> y{0.5, 0.5};
  CHECK(g_evaluate(m, clusters, hand_assignment(), selection({0, 0, 0}), y,
                   ConsistencyMode::plain()) == 0.0);
}

TEST_CASE("g_evaluate rejects non-positive proportions") {
  const DataMatrix m = hand_matrix();
  const auto clusters = singleton_clusters(2);
  const std::vector<double> bad{0.5, 0.0};
  CHECK_THROWS_AS(g_evaluate(m, clusters, hand_assignment(), selection({1, 1, 1}),
                             bad, ConsistencyMode::plain()),
                  ValidationError);
}

TEST_CASE("substituted constraints: satisfaction is invariant under scaling y") {
  Rng rng(5);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t k = 2 + rng.uniform_index(2);
    const auto g = generate_planted({.m = 5 + rng.uniform_index(5),
                                     .n = k + 1 + rng.uniform_index(4),
                                     .k = k,
                                     .signal = 1.0,
                                     .noise_features = rng.uniform_index(3),
                                     .seed = 1000 + static_cast<std::uint64_t>(trial)});
    auto cls = classify_features(sample_centroids(g.data.matrix, g.data.labels));
    REQUIRE(std::holds_alternative<FeatureAssignment>(cls));
    const auto& f = std::get<FeatureAssignment>(cls);

    SelectionVector x;
    x.x.resize(g.data.matrix.num_features());
    for (auto& b : x.x) b = rng.uniform_index(2) ? 1 : 0;

    std::vector<double> y(k), scaled(k);
    const double delta = rng.uniform(0.1, 10.0);
    for (std::size_t r = 0; r < k; ++r) {
      y[r] = rng.uniform(0.05, 1.0);
      scaled[r] = delta * y[r];
    }
    const auto base = substituted_margins(g.data.matrix, g.data.labels, f, x, y,
                                          ConsistencyMode::plain());
    const auto after = substituted_margins(g.data.matrix, g.data.labels, f, x,
                                           scaled, ConsistencyMode::plain());
    REQUIRE(base.size() == after.size());
    const auto satisfied = [](double margin) {
      return margin >= -1e-12 * (1.0 + std::abs(margin));
    };
    for (std::size_t t = 0; t < base.size(); ++t) {
      CHECK(satisfied(base[t].margin) == satisfied(after[t].margin));
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("g vanishes at the true proportions iff consistent") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = generate_planted({.m = 8, .n = 6, .k = 2, .signal = 1.0,
                                     .noise_features = 2,
                                     .seed = 500 + static_cast<std::uint64_t>(trial)});
    auto cls = classify_features(sample_centroids(g.data.matrix, g.data.labels));
    const auto& f = std::get<FeatureAssignment>(cls);

    SelectionVector planted_only;
    planted_only.x = g.consistent_selection;
    const auto y_star = true_proportions(f, planted_only);
    CHECK(g_evaluate(g.data.matrix, g.data.labels, f, planted_only, y_star.y,
                     ConsistencyMode::plain()) == 0.0);

    const auto full = SelectionVector::ones(8);
    const auto y_full = true_proportions(f, full);
    CHECK(g_evaluate(g.data.matrix, g.data.labels, f, full, y_full.y,
                     ConsistencyMode::plain()) > 0.0);
  }
}

TEST_CASE("true_proportions counts selected features per cluster") {
  const auto f = hand_assignment();
  const auto p = true_proportions(f, selection({1, 1, 1}));
  CHECK(p.y[0] == doctest::Approx(1.0 / 3.0));
  CHECK(p.y[1] == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(true_proportions(f, selection({0, 1, 1})), EmptyClusterError);
}

TEST_CASE("ProportionVector validation") {
  CHECK_NOTHROW(ProportionVector{{0.25, 0.75}}.validate());
  CHECK_THROWS_AS(ProportionVector{{0.5, 0.4}}.validate(), ValidationError);
  CHECK_THROWS_AS(ProportionVector{{1.2, -0.2}}.validate(), ValidationError);
}

TEST_CASE("ConsistencyMode parameter checks") {
  CHECK_THROWS_AS(ConsistencyMode::alpha(0.0), ValidationError);
  CHECK_THROWS_AS(ConsistencyMode::beta(0.9), ValidationError);
  CHECK(ConsistencyMode::beta(1.0).kappa() == 1.0);
  CHECK(ConsistencyMode::alpha(2.0).rho() == 2.0);
  CHECK(ConsistencyMode::plain().kappa() == 1.0);
  CHECK(ConsistencyMode::plain().rho() == 0.0);
}
