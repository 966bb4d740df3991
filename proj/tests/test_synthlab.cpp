#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "postel/rng.hpp"
#include "postel/synthlab.hpp"

using namespace postel;

TEST_CASE("generator calibration across homophily levels") {
  SUBCASE("strongly homophilic") {
    const auto data = generate({.num_nodes = 800,
                                .num_classes = 2,
                                .class_homophily = {0.999, 0.999},
                                .avg_degree = 10.0,
                                .feature_dim = 2,
                                .seed = 1});
    const auto c = class_homophily(data.graph, data.labels);
    CHECK(c[0] >= 0.95);
    CHECK(c[1] >= 0.95);
    const Matrix cond = estimate_conditional(data.graph, data.labels, SourceSet::all());
    CHECK(cond(0, 0) >= 0.95);
    CHECK(cond(1, 1) >= 0.95);
  }
  SUBCASE("neutral") {
    const auto data = generate({.num_nodes = 800,
                                .num_classes = 2,
                                .class_homophily = {0.5, 0.5},
                                .avg_degree = 10.0,
                                .feature_dim = 2,
                                .seed = 2});
    const Matrix cond = estimate_conditional(data.graph, data.labels, SourceSet::all());
    for (double v : cond.data) CHECK(std::abs(v - 0.5) <= 0.05);
  }
  SUBCASE("near-bipartite") {
    const auto data = generate({.num_nodes = 800,
                                .num_classes = 2,
                                .class_homophily = {0.05, 0.05},
                                .avg_degree = 10.0,
                                .feature_dim = 2,
                                .seed = 3});
    const Matrix cond = estimate_conditional(data.graph, data.labels, SourceSet::all());
    CHECK(cond(0, 0) < 0.1);
    CHECK(cond(1, 1) < 0.1);
  }
}

TEST_CASE("generator hits the requested homophily within 0.05 across seeds") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = generate({.num_nodes = 600,
                                .num_classes = 2,
                                .class_homophily = {0.7, 0.3},
                                .avg_degree = 12.0,
                                .feature_dim = 2,
                                .seed = seed});
    const auto c = class_homophily(data.graph, data.labels);
    CHECK(std::abs(c[0] - 0.7) <= 0.05);
    CHECK(std::abs(c[1] - 0.3) <= 0.05);
  }
}

TEST_CASE("generator respects balance, asymmetric degrees, K > 2") {
  const auto data = generate({.num_nodes = 900,
                              .num_classes = 3,
                              .class_homophily = {0.6, 0.6, 0.6},
                              .avg_degree = 9.0,
                              .feature_dim = 4,
                              .seed = 4});
  std::vector<int> counts(3, 0);
  for (int c : data.labels.cls) ++counts[c];
  CHECK(counts[0] == 300);
  CHECK(counts[1] == 300);
  CHECK(counts[2] == 300);
  const auto c = class_homophily(data.graph, data.labels);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(c[k] - 0.6) <= 0.05);
  const double mean_degree =
      2.0 * static_cast<double>(data.graph.num_undirected_edges) / 900.0;
  CHECK(std::abs(mean_degree - 9.0) <= 1.0);
}

TEST_CASE("infeasible specs are rejected") {
  CHECK_THROWS_AS(generate({.num_nodes = 100,
                            .num_classes = 2,
                            .class_homophily = {1.0, 1.0},
                            .avg_degree = 5.0}),
                  InfeasibleSpec);
  CHECK_THROWS_AS(generate({.num_nodes = 100,
                            .num_classes = 2,
                            .class_homophily = {0.9, 0.9},
                            .avg_degree = 90.0}),
                  InfeasibleSpec);  // solved intra-block probability above 1
  CHECK_THROWS_AS(generate({.num_nodes = 100,
                            .num_classes = 2,
                            .class_homophily = {0.5},
                            .avg_degree = 5.0}),
                  InfeasibleSpec);
}

TEST_CASE("forbid_isolated attaches every lonely node") {
  const auto data = generate({.num_nodes = 400,
                              .num_classes = 2,
                              .class_homophily = {0.8, 0.8},
                              .avg_degree = 2.0,
                              .feature_dim = 2,
                              .feature_signal = 1.0,
                              .balanced = true,
                              .forbid_isolated = true,
                              .seed = 5});
  for (NodeId i = 0; i < data.graph.num_nodes; ++i) CHECK(data.graph.degree(i) >= 1);
}

TEST_CASE("brute-force posterior oracle special cases") {
  const auto data = generate({.num_nodes = 40, .seed = 6});
  ClassStats stats;
  stats.counted_sources = SourceSet::all();
  stats.prior = estimate_prior(data.labels, stats.counted_sources);
  stats.conditional = estimate_conditional(data.graph, data.labels, stats.counted_sources);

  // Isolated node: prior back verbatim.
  const Graph lonely = build_graph(3, {{1, 2}});
  const auto post = brute_force_posterior(lonely, data.labels, stats, 0);
  CHECK(post == stats.prior);

  // Uniform stats: prior back.
  ClassStats uniform = stats;
  uniform.conditional = Matrix(2, 2, 0.5);
  const auto flat = brute_force_posterior(data.graph, data.labels, uniform, 0);
  CHECK(flat[0] == doctest::Approx(stats.prior[0]).epsilon(1e-12));

  // Degree cap.
  EdgeList star;
  for (NodeId i = 1; i <= 35; ++i) star.emplace_back(0, i);
  const Graph big = build_graph(36, star);
  LabelState labels = LabelState::unlabeled(36, 2);
  for (std::size_t i = 0; i < 36; ++i) labels.set_ground_truth(i, i % 2);
  CHECK_THROWS_AS(brute_force_posterior(big, labels, stats, 0), DegreeTooLarge);
}

TEST_CASE("homophilic lemma verifier") {
  const auto equal = verify_lemma_homophilic(0.7, 0.7, 20);
  CHECK(equal.ok());
  CHECK(equal.cases_checked == 2 * 231);
  // Threshold ratio is exactly 1 here: posterior > 0.5 iff a > b.
  CHECK(closed_form_binary_posterior(0.7, 0.7, 3, 2, 0) > 0.5);
  CHECK(closed_form_binary_posterior(0.7, 0.7, 2, 3, 0) < 0.5);

  CHECK(verify_lemma_homophilic(0.8, 0.6, 20).ok());
  CHECK_THROWS_AS(verify_lemma_homophilic(0.4, 0.4, 20), ConditionNotHomophilic);
}

TEST_CASE("heterophilic lemma verifier") {
  CHECK(verify_lemma_heterophilic(0.3, 0.3, 20).ok());
  CHECK(verify_lemma_heterophilic(0.2, 0.3, 20).ok());
  CHECK_THROWS_AS(verify_lemma_heterophilic(0.6, 0.6, 20), ConditionNotHeterophilic);

  // Spot values quoted in the sweep: a=2,b=1 gives 0.3; a=0,b=3 favors k.
  CHECK(closed_form_binary_posterior(0.3, 0.3, 2, 1, 0) == doctest::Approx(0.3));
  CHECK(closed_form_binary_posterior(0.3, 0.3, 0, 3, 0) > 0.5);
}

TEST_CASE("degree lemma verifier") {
  CHECK(verify_degree_lemmas(0.3, 0.3, 20).ok());
  CHECK(verify_degree_lemmas(0.49, 0.49, 20).ok());
  CHECK(verify_degree_lemmas(0.05, 0.45, 20).ok());
  CHECK_THROWS_AS(verify_degree_lemmas(0.6, 0.3, 20), ConditionOutOfRange);

  // Monotone in a at fixed degree 6, monotone in degree at fixed a = 1.
  double prev = 1.0;
  for (int a = 0; a <= 6; ++a) {
    const double p = closed_form_binary_posterior(0.3, 0.3, a, 6 - a, 0);
    CHECK(p < prev);
    prev = p;
  }
  prev = 0.0;
  for (int d = 2; d <= 10; ++d) {
    const double p = closed_form_binary_posterior(0.3, 0.3, 1, d - 1, 0);
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("lemma verifiers hold over random admissible draws") {
  auto rng = make_rng(123, 0);
  std::uniform_real_distribution<double> homo(0.55, 0.99);
  std::uniform_real_distribution<double> hetero(0.01, 0.45);
  for (int trial = 0; trial < 50; ++trial) {
    const double h0 = homo(rng), h1 = homo(rng);
    CHECK(verify_lemma_homophilic(h0, h1, 20).ok());
    double t0 = hetero(rng), t1 = hetero(rng);
    CHECK(verify_lemma_heterophilic(t0, t1, 20).ok());
    CHECK(verify_degree_lemmas(t0, t1, 20).ok());
  }
}

TEST_CASE("independence diagnostic separates iid from correlated constructions") {
  const auto iid = generate_independent_stars(400, 4, 7);
  CHECK(iid.graph.num_nodes == 2000);
  const auto good = independence_report(iid.graph, iid.labels);
  CHECK(good.classes[0].has_pairs);
  CHECK(good.classes[0].max_abs_dev <= 0.05);

  const auto paired = generate_correlated_stars(666, 1, 7);
  CHECK(paired.graph.num_nodes == 1998);
  const auto bad = independence_report(paired.graph, paired.labels);
  CHECK(bad.classes[0].max_abs_dev > 0.1);
}

TEST_CASE("independence diagnostic on a single-class graph") {
  const Graph g = build_graph(3, {{0, 1}, {0, 2}});
  LabelState labels = LabelState::unlabeled(3, 1);
  for (std::size_t i = 0; i < 3; ++i) labels.set_ground_truth(i, 0);
  const auto report = independence_report(g, labels);
  CHECK(report.max_abs_deviation == 0.0);
}

TEST_CASE("tv distance basics and metric spot checks") {
  Matrix p(2, 2), q(2, 2);
  p(0, 0) = 1.0; p(1, 0) = 0.7; p(1, 1) = 0.3;
  q(0, 1) = 1.0; q(1, 0) = 0.5; q(1, 1) = 0.5;
  const auto tv = tv_distance(p, q);
  CHECK(tv[0] == doctest::Approx(1.0));
  CHECK(tv[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(tv_distance(p, p) == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(tv_distance(p, Matrix(3, 2)), ShapeMismatch);

  auto rng = make_rng(9, 9);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto random_rows = [&](Matrix& m) {
    for (std::size_t r = 0; r < m.rows; ++r) {
      double total = 0.0;
      for (std::size_t c = 0; c < m.cols; ++c) {
        m(r, c) = 0.01 + unif(rng);
        total += m(r, c);
      }
      for (std::size_t c = 0; c < m.cols; ++c) m(r, c) /= total;
    }
  };
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a(3, 4), b(3, 4), c(3, 4);
    random_rows(a);
    random_rows(b);
    random_rows(c);
    const auto ab = tv_distance(a, b);
    const auto ba = tv_distance(b, a);
    const auto ac = tv_distance(a, c);
    const auto cb = tv_distance(c, b);
    for (std::size_t r = 0; r < 3; ++r) {
      CHECK(ab[r] == ba[r]);
      CHECK(ab[r] <= ac[r] + cb[r] + 1e-15);
      CHECK(ab[r] >= 0.0);
    }
  }
}
