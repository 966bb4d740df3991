#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "postel/rng.hpp"
#include "postel/smoothing.hpp"
#include "postel/synthlab.hpp"

using namespace postel;

namespace {

LabelState ground_truth(std::initializer_list<int> classes, int k) {
  LabelState s = LabelState::unlabeled(classes.size(), k);
  std::size_t i = 0;
  for (int c : classes) s.set_ground_truth(i++, c);
  return s;
}

ClassStats stats_for(const Graph& g, const LabelState& labels, SourceSet sources) {
  ClassStats s;
  s.counted_sources = sources;
  s.prior = estimate_prior(labels, sources);
  s.conditional = estimate_conditional(g, labels, sources);
  return s;
}

// Random row-stochastic vector.
std::vector<double> random_simplex(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> v(k);
  double total = 0.0;
  for (double& x : v) {
    x = 0.05 + unif(rng);
    total += x;
  }
  for (double& x : v) x /= total;
  return v;
}

}  // namespace

TEST_CASE("triangle posterior matches the hand enumeration") {
  const Graph g = build_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  const auto labels = ground_truth({0, 0, 1}, 2);
  const auto stats = stats_for(g, labels, SourceSet::all());
  const auto post = posterior_one(g, labels, stats, 2);
  CHECK(post[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(post[1] == doctest::Approx(2.0 / 3).epsilon(1e-12));
}

TEST_CASE("no labeled neighbor returns the prior verbatim") {
  const Graph g = build_graph(3, {{0, 1}});
  LabelState labels = LabelState::unlabeled(3, 2);
  labels.set_ground_truth(0, 0);
  labels.set_ground_truth(1, 1);
  const auto stats = stats_for(g, labels, SourceSet::all());
  const auto post = posterior_one(g, labels, stats, 2);  // isolated node
  CHECK(post == stats.prior);  // bitwise
}

TEST_CASE("uniform conditional makes the posterior equal the prior") {
  const Graph g = build_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  const auto labels = ground_truth({0, 0, 1}, 2);
  ClassStats stats = stats_for(g, labels, SourceSet::all());
  stats.conditional = Matrix(2, 2, 0.5);
  for (NodeId i = 0; i < 3; ++i) {
    const auto post = posterior_one(g, labels, stats, i);
    CHECK(post[0] == doctest::Approx(stats.prior[0]).epsilon(1e-12));
    CHECK(post[1] == doctest::Approx(stats.prior[1]).epsilon(1e-12));
  }
}

TEST_CASE("posterior_all rows match posterior_one bitwise") {
  const auto data = generate({.num_nodes = 300,
                              .num_classes = 3,
                              .class_homophily = {0.3, 0.5, 0.7},
                              .avg_degree = 8.0,
                              .feature_dim = 2,
                              .seed = 11});
  const auto stats = stats_for(data.graph, data.labels, SourceSet::all());
  const SoftLabels all = posterior_all(data.graph, data.labels, stats);
  for (NodeId i = 0; i < data.graph.num_nodes; i += 7) {
    const auto one = posterior_one(data.graph, data.labels, stats, i);
    for (int c = 0; c < 3; ++c) CHECK(all.probs(i, c) == one[c]);
  }
}

TEST_CASE("posterior_all on isolated nodes emits prior rows") {
  const Graph g = build_graph(4, {});
  auto labels = ground_truth({0, 1, 0, 1}, 2);
  const auto stats = stats_for(g, labels, SourceSet::all());
  const SoftLabels all = posterior_all(g, labels, stats);
  for (NodeId i = 0; i < 4; ++i) {
    CHECK(all.probs(i, 0) == stats.prior[0]);
    CHECK(all.probs(i, 1) == stats.prior[1]);
    CHECK(all.provenance[i] == TargetProvenance::Posterior);
  }
}

TEST_CASE("blend arithmetic and exact endpoints") {
  const std::vector<double> post{1.0 / 3, 2.0 / 3};

  const auto zero = blend(post, 1, 0.0, 0.7);
  CHECK(zero == std::vector<double>{0.0, 1.0});  // exact one-hot

  const auto mid = blend(post, 1, 0.5, 0.5);
  CHECK(mid[0] == doctest::Approx(7.0 / 36).epsilon(1e-15));
  CHECK(mid[1] == doctest::Approx(29.0 / 36).epsilon(1e-15));

  const auto full = blend(post, 1, 1.0, 0.0);
  CHECK(full == post);  // exact posterior
}

TEST_CASE("blend is affine in alpha") {
  auto rng = make_rng(3, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 4);
    const auto post = random_simplex(k, rng);
    const int y = static_cast<int>(rng() % k);
    const double alpha = unif(rng);
    const double beta = 2.0 * unif(rng);
    const auto lo = blend(post, y, 0.0, beta);
    const auto hi = blend(post, y, 1.0, beta);
    const auto got = blend(post, y, alpha, beta);
    for (int c = 0; c < k; ++c)
      CHECK(got[c] == doctest::Approx(alpha * hi[c] + (1 - alpha) * lo[c]).epsilon(1e-12));
    CHECK(std::abs(row_sum(got) - 1.0) <= 1e-12);
  }
}

TEST_CASE("argmax preservation for alpha below one half") {
  auto rng = make_rng(4, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 5);
    const auto post = random_simplex(k, rng);
    const int y = static_cast<int>(rng() % k);
    const double alpha = 0.4999 * unif(rng);
    const double beta = 3.0 * unif(rng);
    const auto target = blend(post, y, alpha, beta);
    CHECK(argmax(target) == static_cast<std::size_t>(y));
  }
}

TEST_CASE("uniform smoothing formula") {
  CHECK(uniform_smooth(1, 0.0, 3) == std::vector<double>{0.0, 1.0, 0.0});
  const auto s = uniform_smooth(2, 0.2, 4);
  CHECK(s[0] == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(s[1] == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(s[2] == doctest::Approx(0.85).epsilon(1e-15));
  CHECK(s[3] == doctest::Approx(0.05).epsilon(1e-15));
  // eps = 1 - 1/K puts the true class exactly at the uniform level.
  const auto flat = uniform_smooth(0, 1.0 - 1.0 / 2, 2);
  CHECK(flat[0] == doctest::Approx(0.75));
  CHECK(flat[1] == doctest::Approx(0.25));
}

TEST_CASE("neighbor aggregation baseline") {
  // Node 3 has neighbors labeled 0, 0, 1 and its own label 1.
  const Graph g = build_graph(4, {{3, 0}, {3, 1}, {3, 2}});
  const auto labels = ground_truth({0, 0, 1, 1}, 2);
  const auto smoothed = neighbor_aggregate_smooth(g, labels, 3, 0.6);
  CHECK(smoothed[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(smoothed[1] == doctest::Approx(0.6).epsilon(1e-12));

  // All neighbors share the node's label: mass 1 on it.
  const auto all_same = ground_truth({1, 1, 1, 1}, 2);
  const auto uni = neighbor_aggregate_smooth(g, all_same, 3, 0.5);
  CHECK(uni[1] == doctest::Approx(1.0));

  // No labeled neighbors: histogram is uniform.
  const Graph lonely = build_graph(2, {});
  const auto solo = neighbor_aggregate_smooth(lonely, ground_truth({1, 0}, 2), 0, 0.5);
  CHECK(solo[0] == doctest::Approx(0.25));
  CHECK(solo[1] == doctest::Approx(0.75));
}

TEST_CASE("closed-form binary posterior") {
  CHECK(closed_form_binary_posterior(0.7, 0.7, 2, 1, 0) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(closed_form_binary_posterior(0.3, 0.3, 2, 1, 0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(closed_form_binary_posterior(0.6, 0.6, 4, 4, 1) == 0.5);  // symmetric, exact
  CHECK_THROWS_AS(closed_form_binary_posterior(1.0, 0.5, 1, 0, 0), DegenerateHomophily);
  CHECK_THROWS_AS(closed_form_binary_posterior(0.5, 0.0, 1, 0, 0), DegenerateHomophily);
}

TEST_CASE("closed-form class symmetry when c0 == c1") {
  auto rng = make_rng(5, 0);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int trial = 0; trial < 100; ++trial) {
    const double c = unif(rng);
    const int a = static_cast<int>(rng() % 10);
    const int b = static_cast<int>(rng() % 10);
    const double p = closed_form_binary_posterior(c, c, a, b, 0);
    const double q = closed_form_binary_posterior(c, c, b, a, 0);
    CHECK(p + q == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("posterior is invariant to scaling likelihood rows") {
  const Graph g = build_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const auto labels = ground_truth({0, 1, 0, 1}, 2);
  ClassStats stats = stats_for(g, labels, SourceSet::all());
  ClassStats scaled = stats;
  for (double& v : scaled.conditional.data) v *= 7.5;
  for (NodeId i = 0; i < 4; ++i) {
    const auto a = posterior_one(g, labels, stats, i);
    const auto b = posterior_one(g, labels, scaled, i);
    for (int c = 0; c < 2; ++c) CHECK(a[c] == doctest::Approx(b[c]).epsilon(1e-12));
  }
}

TEST_CASE("log-space path agrees with direct products up to degree 20") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto data = generate({.num_nodes = 40,
                                .num_classes = 3,
                                .class_homophily = {0.25, 0.5, 0.6},
                                .avg_degree = 5.0,
                                .feature_dim = 2,
                                .seed = seed});
    const auto stats = stats_for(data.graph, data.labels, SourceSet::all());
    for (NodeId i = 0; i < data.graph.num_nodes; ++i) {
      if (data.graph.degree(i) > 20) continue;
      const auto fast = posterior_one(data.graph, data.labels, stats, i);
      const auto exact = brute_force_posterior(data.graph, data.labels, stats, i);
      for (int c = 0; c < 3; ++c)
        CHECK(fast[c] == doctest::Approx(exact[c]).epsilon(1e-10));
    }
  }
}

TEST_CASE("posterior matches the closed form when stats come from (c0, c1)") {
  const double c0 = 0.65, c1 = 0.55;
  // Node 0 labeled 0 with neighbors labeled [0, 0, 1]; analytic stats.
  const Graph g = build_graph(4, {{0, 1}, {0, 2}, {0, 3}});
  auto labels = ground_truth({0, 0, 0, 1}, 2);
  ClassStats stats;
  stats.counted_sources = SourceSet::all();
  stats.prior = {0.5, 0.5};
  stats.conditional = Matrix(2, 2);
  stats.conditional(0, 0) = c0;
  stats.conditional(0, 1) = 1.0 - c0;
  stats.conditional(1, 1) = c1;
  stats.conditional(1, 0) = 1.0 - c1;
  const auto post = posterior_one(g, labels, stats, 0);
  const double expected = closed_form_binary_posterior(c0, c1, 2, 1, 0);
  CHECK(post[0] == doctest::Approx(expected).epsilon(1e-12));
}
