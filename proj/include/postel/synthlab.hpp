#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "postel/errors.hpp"
#include "postel/graph.hpp"
#include "postel/label_state.hpp"
#include "postel/label_stats.hpp"
#include "postel/matrix.hpp"
#include "postel/rng.hpp"
#include "postel/smoothing.hpp"

namespace postel {

// Recipe for a synthetic graph with controllable per-class homophily.
// feature_signal is the class-mean separation in units of the unit noise std.
struct SyntheticSpec {
  std::size_t num_nodes = 500;
  int num_classes = 2;
  std::vector<double> class_homophily = {0.8, 0.8};  // entries in (0,1)
  double avg_degree = 10.0;
  std::size_t feature_dim = 8;
  double feature_signal = 1.0;
  bool balanced = true;
  bool forbid_isolated = false;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  Graph graph;
  LabelState labels;  // all ground truth
  Matrix features;
};

namespace synth_detail {

// Visits each index in [0, total) independently with probability p, in
// increasing order, via geometric skips. O(expected hits).
template <typename Emit>
inline void sample_bernoulli_indices(std::uint64_t total, double p, std::mt19937_64& rng,
                                     Emit&& emit) {
  if (total == 0 || p <= 0.0) return;
  if (p >= 1.0) {
    for (std::uint64_t t = 0; t < total; ++t) emit(t);
    return;
  }
  const double log1mp = std::log1p(-p);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uint64_t idx = 0;
  while (true) {
    const double u = 1.0 - unif(rng);  // (0, 1]
    const double skip = std::floor(std::log(u) / log1mp);
    if (skip >= static_cast<double>(total)) break;
    idx += static_cast<std::uint64_t>(skip);
    if (idx >= total) break;
    emit(idx);
    ++idx;
  }
}

// Inverse of the linear index over pairs (a, b), a < b, within a block of
// size s, ordered by a then b.
inline std::pair<std::size_t, std::size_t> unrank_pair(std::uint64_t t, std::size_t s) {
  auto cum = [s](std::uint64_t a) {
    return a * static_cast<std::uint64_t>(s) - a * (a + 1) / 2;
  };
  const double sd = static_cast<double>(s);
  double guess = std::floor((2.0 * sd - 1.0 -
                             std::sqrt((2.0 * sd - 1.0) * (2.0 * sd - 1.0) -
                                       8.0 * static_cast<double>(t))) /
                            2.0);
  std::uint64_t a = static_cast<std::uint64_t>(std::max(0.0, guess));
  while (cum(a + 1) <= t) ++a;
  while (a > 0 && cum(a) > t) --a;
  const std::uint64_t b = a + 1 + (t - cum(a));
  return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
}

}  // namespace synth_detail

// Draws a graph whose expected per-class homophily matches the spec. For
// K = 2 the two-block probabilities are solved exactly from (c0, c1,
// avg_degree); for K > 2 the off-diagonal mass (1 - c_k)/(K - 1) is spread
// uniformly and cross-block probabilities are symmetrized. Labels are
// round-robin when balanced; features are class means plus unit Gaussian
// noise.
inline SyntheticData generate(const SyntheticSpec& spec) {
  const int k = spec.num_classes;
  const std::size_t n = spec.num_nodes;
  if (k < 2) throw InfeasibleSpec("need at least two classes");
  if (spec.class_homophily.size() != static_cast<std::size_t>(k))
    throw InfeasibleSpec("class_homophily must have one entry per class");
  for (double c : spec.class_homophily)
    if (!(c > 0.0 && c < 1.0)) throw InfeasibleSpec("class homophily must be in (0,1)");
  if (spec.avg_degree < 1.0) throw InfeasibleSpec("avg_degree must be at least 1");

  SyntheticData data;
  data.labels = LabelState::unlabeled(n, k);
  auto label_rng = make_rng(spec.seed, 0x1AB);
  if (spec.balanced) {
    for (std::size_t i = 0; i < n; ++i)
      data.labels.set_ground_truth(i, static_cast<int>(i % k));
  } else {
    std::uniform_int_distribution<int> pick(0, k - 1);
    for (std::size_t i = 0; i < n; ++i) data.labels.set_ground_truth(i, pick(label_rng));
  }

  std::vector<std::vector<NodeId>> by_class(k);
  for (std::size_t i = 0; i < n; ++i)
    by_class[data.labels.cls[i]].push_back(static_cast<NodeId>(i));
  for (int c = 0; c < k; ++c)
    if (by_class[c].size() < 2)
      throw InfeasibleSpec("every class needs at least two nodes");

  // Block probabilities.
  Matrix p(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  if (k == 2) {
    const double c0 = spec.class_homophily[0], c1 = spec.class_homophily[1];
    const double n0 = static_cast<double>(by_class[0].size());
    const double n1 = static_cast<double>(by_class[1].size());
    const double d1_over_d0 = ((1.0 - c0) * n0) / ((1.0 - c1) * n1);
    const double d0 = spec.avg_degree * static_cast<double>(n) / (n0 + n1 * d1_over_d0);
    const double d1 = d0 * d1_over_d0;
    p(0, 0) = c0 * d0 / (n0 - 1.0);
    p(1, 1) = c1 * d1 / (n1 - 1.0);
    p(0, 1) = p(1, 0) = (1.0 - c0) * d0 / n1;
  } else {
    Matrix q(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) {
      const double ca = spec.class_homophily[a];
      const double na = static_cast<double>(by_class[a].size());
      q(a, a) = ca * spec.avg_degree / (na - 1.0);
      for (int b = 0; b < k; ++b) {
        if (b == a) continue;
        const double nb = static_cast<double>(by_class[b].size());
        q(a, b) = (1.0 - ca) / static_cast<double>(k - 1) * spec.avg_degree / nb;
      }
    }
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        p(a, b) = (a == b) ? q(a, a) : 0.5 * (q(a, b) + q(b, a));
  }
  for (double v : p.data)
    if (!(v >= 0.0 && v <= 1.0))
      throw InfeasibleSpec("solved block probability outside [0,1]");

  auto edge_rng = make_rng(spec.seed, 0xED6E);
  EdgeList edges;
  std::vector<std::size_t> degree(n, 0);
  auto push_edge = [&](NodeId u, NodeId v) {
    edges.emplace_back(u, v);
    ++degree[u];
    ++degree[v];
  };
  for (int a = 0; a < k; ++a) {
    const auto& na = by_class[a];
    const std::uint64_t s = na.size();
    synth_detail::sample_bernoulli_indices(s * (s - 1) / 2, p(a, a), edge_rng,
                                           [&](std::uint64_t t) {
                                             auto [i, j] = synth_detail::unrank_pair(t, s);
                                             push_edge(na[i], na[j]);
                                           });
    for (int b = a + 1; b < k; ++b) {
      const auto& nb = by_class[b];
      synth_detail::sample_bernoulli_indices(
          s * static_cast<std::uint64_t>(nb.size()), p(a, b), edge_rng,
          [&](std::uint64_t t) {
            push_edge(na[t / nb.size()], nb[t % nb.size()]);
          });
    }
  }

  if (spec.forbid_isolated) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (degree[i] != 0) continue;
      const int ci = data.labels.cls[i];
      const double c = spec.class_homophily[ci];
      double r = unif(edge_rng);
      int target_class = ci;
      if (r >= c) {
        // uniform among the other classes
        const double slice = (1.0 - c) / static_cast<double>(k - 1);
        int step = static_cast<int>((r - c) / slice);
        step = std::min(step, k - 2);
        target_class = step >= ci ? step + 1 : step;
      }
      const auto& pool = by_class[target_class];
      NodeId j = i;
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      while (j == i) j = pool[pick(edge_rng)];
      push_edge(static_cast<NodeId>(i), j);
    }
  }
  data.graph = build_graph(n, edges);

  auto feat_rng = make_rng(spec.seed, 0xFEA7);
  std::normal_distribution<double> noise(0.0, 1.0);
  data.features = Matrix(n, spec.feature_dim);
  const double mean_scale = spec.feature_signal / std::sqrt(2.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = data.features.row(i);
    for (std::size_t d = 0; d < spec.feature_dim; ++d) row[d] = noise(feat_rng);
    row[data.labels.cls[i] % spec.feature_dim] += mean_scale;
  }
  return data;
}

// Direct product-form Bayes oracle in extended precision: literal products of
// conditional entries times the prior, no log space. Checks the log-space
// implementation path.
inline std::vector<double> brute_force_posterior(const Graph& g, const LabelState& labels,
                                                 const ClassStats& stats, NodeId i,
                                                 double floor = 1e-12,
                                                 std::size_t max_degree = 30) {
  if (g.degree(i) > max_degree) throw DegreeTooLarge(g.degree(i));
  const int k = labels.num_classes;
  std::vector<long double> w(k);
  for (int c = 0; c < k; ++c) w[c] = static_cast<long double>(stats.prior[c]);
  bool any = false;
  for (NodeId v : g.neighbors(i)) {
    if (!labels.counted(v, stats.counted_sources)) continue;
    any = true;
    const int m = labels.cls[v];
    for (int c = 0; c < k; ++c)
      w[c] *= std::max(static_cast<long double>(stats.conditional(c, m)),
                       static_cast<long double>(floor));
  }
  if (!any) return stats.prior;
  long double total = 0.0L;
  for (int c = 0; c < k; ++c) total += w[c];
  std::vector<double> out(k);
  for (int c = 0; c < k; ++c) out[c] = static_cast<double>(w[c] / total);
  return out;
}

struct LemmaViolation {
  int cls = 0;
  std::int64_t same = 0;   // |N_k| (or the varied quantity for degree lemmas)
  std::int64_t other = 0;  // |N_{1-k}| (or the fixed degree)
  double posterior = 0.0;
  double reference = 0.0;  // threshold or compared posterior
  std::string note;
};

struct LemmaReport {
  std::string lemma;
  double c0 = 0.0, c1 = 0.0;
  int max_degree = 0;
  std::size_t cases_checked = 0;
  std::vector<LemmaViolation> violations;

  bool ok() const { return violations.empty(); }
};

namespace synth_detail {

// (log c_{1-k} - log(1 - c_k)) / (log c_k - log(1 - c_{1-k}))
inline double neighbor_count_threshold(double ck, double co) {
  return (std::log(co) - std::log1p(-ck)) / (std::log(ck) - std::log1p(-co));
}

}  // namespace synth_detail

// Exhaustively checks, for every split a + b <= max_degree and each class k,
// that the closed-form posterior exceeds 1/2 exactly when |N_k| clears the
// count threshold. Requires the homophilic regime c_k > 1 - c_{1-k}.
inline LemmaReport verify_lemma_homophilic(double c0, double c1, int max_degree) {
  if (!(c0 > 0.0 && c0 < 1.0 && c1 > 0.0 && c1 < 1.0)) throw DegenerateHomophily();
  if (!(c0 + c1 > 1.0)) throw ConditionNotHomophilic();
  LemmaReport report{"homophilic", c0, c1, max_degree, 0, {}};
  for (int k = 0; k < 2; ++k) {
    const double ck = k == 0 ? c0 : c1;
    const double co = k == 0 ? c1 : c0;
    const double ratio = synth_detail::neighbor_count_threshold(ck, co);
    for (int d = 0; d <= max_degree; ++d) {
      for (int a = 0; a <= d; ++a) {
        const int b = d - a;
        const double post = closed_form_binary_posterior(c0, c1, a, b, k);
        const double rhs = static_cast<double>(b) * ratio;
        const bool boundary = std::abs(static_cast<double>(a) - rhs) <=
                              1e-9 * std::max(1.0, std::abs(rhs));
        const bool consistent = boundary ? std::abs(post - 0.5) <= 1e-9
                                         : ((post > 0.5) == (a > rhs));
        ++report.cases_checked;
        if (!consistent)
          report.violations.push_back(
              {k, a, b, post, rhs, "posterior>0.5 iff |N_k| > threshold failed"});
      }
    }
  }
  return report;
}

// Same exhaustive sweep with the reversed count inequality; requires the
// heterophilic regime c_k < 1 - c_{1-k}.
inline LemmaReport verify_lemma_heterophilic(double c0, double c1, int max_degree) {
  if (!(c0 > 0.0 && c0 < 1.0 && c1 > 0.0 && c1 < 1.0)) throw DegenerateHomophily();
  if (!(c0 + c1 < 1.0)) throw ConditionNotHeterophilic();
  LemmaReport report{"heterophilic", c0, c1, max_degree, 0, {}};
  for (int k = 0; k < 2; ++k) {
    const double ck = k == 0 ? c0 : c1;
    const double co = k == 0 ? c1 : c0;
    const double ratio = synth_detail::neighbor_count_threshold(ck, co);
    for (int d = 0; d <= max_degree; ++d) {
      for (int a = 0; a <= d; ++a) {
        const int b = d - a;
        const double post = closed_form_binary_posterior(c0, c1, a, b, k);
        const double rhs = static_cast<double>(b) * ratio;
        const bool boundary = std::abs(static_cast<double>(a) - rhs) <=
                              1e-9 * std::max(1.0, std::abs(rhs));
        const bool consistent = boundary ? std::abs(post - 0.5) <= 1e-9
                                         : ((post > 0.5) == (a < rhs));
        ++report.cases_checked;
        if (!consistent)
          report.violations.push_back(
              {k, a, b, post, rhs, "posterior>0.5 iff |N_k| < threshold failed"});
      }
    }
  }
  return report;
}

// Lemma "same degree": at fixed degree the posterior for k strictly decreases
// as more neighbors carry label k. Lemma "different degree": at fixed |N_k|
// the posterior strictly increases with degree. Both need 0 < c_k < 0.5.
// Orderings are compared on the log-odds scale, where they are exact linear
// margins; the probability scale saturates to 1.0 in double precision for
// extreme admissible (c0, c1).
inline LemmaReport verify_degree_lemmas(double c0, double c1, int max_degree) {
  if (!(c0 > 0.0 && c1 > 0.0)) throw DegenerateHomophily();
  if (!(c0 < 0.5 && c1 < 0.5)) throw ConditionOutOfRange();
  LemmaReport report{"degree", c0, c1, max_degree, 0, {}};
  for (int k = 0; k < 2; ++k) {
    for (int d = 1; d <= max_degree; ++d) {
      for (int a = 0; a < d; ++a) {
        const double lo_more = closed_form_binary_log_odds(c0, c1, a + 1, d - a - 1, k);
        const double lo_less = closed_form_binary_log_odds(c0, c1, a, d - a, k);
        ++report.cases_checked;
        if (!(lo_more < lo_less))
          report.violations.push_back(
              {k, a + 1, d, 1.0 / (1.0 + std::exp(-lo_more)),
               1.0 / (1.0 + std::exp(-lo_less)),
               "posterior not strictly decreasing in |N_k| at fixed degree"});
      }
    }
    for (int a = 0; a < max_degree; ++a) {
      for (int d = a; d < max_degree; ++d) {
        const double lo_big = closed_form_binary_log_odds(c0, c1, a, d + 1 - a, k);
        const double lo_small = closed_form_binary_log_odds(c0, c1, a, d - a, k);
        ++report.cases_checked;
        if (!(lo_big > lo_small))
          report.violations.push_back(
              {k, a, d + 1, 1.0 / (1.0 + std::exp(-lo_big)),
               1.0 / (1.0 + std::exp(-lo_small)),
               "posterior not strictly increasing in degree at fixed |N_k|"});
      }
    }
  }
  return report;
}

struct IndependenceClassReport {
  int cls = 0;
  bool has_pairs = false;
  double max_abs_dev = 0.0;
  double frobenius = 0.0;
  Matrix joint;
  Matrix product;
};

struct IndependenceReport {
  double max_abs_deviation = 0.0;
  std::vector<IndependenceClassReport> classes;
};

// Compares the empirical joint neighbor-pair distribution around each class
// against the outer product of that class's conditional row. Classes without
// a qualifying pair are flagged and skipped; throws only when no class has
// pairs.
inline IndependenceReport independence_report(const Graph& g, const LabelState& labels) {
  const Matrix cond = estimate_conditional(g, labels, SourceSet::all());
  IndependenceReport report;
  bool any = false;
  for (int l = 0; l < labels.num_classes; ++l) {
    IndependenceClassReport cls;
    cls.cls = l;
    try {
      cls.joint = joint_pair_distribution(g, labels, l);
    } catch (const InsufficientPairs&) {
      report.classes.push_back(std::move(cls));
      continue;
    }
    any = true;
    cls.has_pairs = true;
    cls.product = outer_product(cond.row(l), cond.row(l));
    double fro = 0.0;
    for (std::size_t idx = 0; idx < cls.joint.data.size(); ++idx) {
      const double dev = std::abs(cls.joint.data[idx] - cls.product.data[idx]);
      cls.max_abs_dev = std::max(cls.max_abs_dev, dev);
      fro += dev * dev;
    }
    cls.frobenius = std::sqrt(fro);
    report.max_abs_deviation = std::max(report.max_abs_deviation, cls.max_abs_dev);
    report.classes.push_back(std::move(cls));
  }
  if (!any) throw InsufficientPairs();
  return report;
}

// Per-row total variation 0.5 * sum |p - q| between two K x K row-stochastic
// matrices.
inline std::vector<double> tv_distance(const Matrix& p, const Matrix& q) {
  if (p.rows != q.rows || p.cols != q.cols)
    throw ShapeMismatch("tv_distance requires matching shapes");
  std::vector<double> tv(p.rows, 0.0);
  for (std::size_t r = 0; r < p.rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < p.cols; ++c) acc += std::abs(p(r, c) - q(r, c));
    tv[r] = 0.5 * acc;
  }
  return tv;
}

// Disjoint stars with class-0 centers whose leaf labels are drawn iid over
// {1, 2}: neighbor labels are exactly conditionally independent given the
// center class. Used to exercise the independence diagnostic.
inline SyntheticData generate_independent_stars(std::size_t num_centers,
                                                std::size_t leaves_per_center,
                                                std::uint64_t seed) {
  const std::size_t n = num_centers * (1 + leaves_per_center);
  SyntheticData data;
  data.labels = LabelState::unlabeled(n, 3);
  auto rng = make_rng(seed, 0x57A2);
  std::uniform_int_distribution<int> leaf_label(1, 2);
  EdgeList edges;
  std::size_t next = num_centers;
  for (std::size_t c = 0; c < num_centers; ++c) {
    data.labels.set_ground_truth(c, 0);
    for (std::size_t l = 0; l < leaves_per_center; ++l) {
      data.labels.set_ground_truth(next, leaf_label(rng));
      edges.emplace_back(static_cast<NodeId>(c), static_cast<NodeId>(next));
      ++next;
    }
  }
  data.graph = build_graph(n, edges);
  data.features = Matrix(n, 1);
  return data;
}

// Adversarial variant: leaves arrive in identically-labeled pairs, so the
// joint concentrates on the diagonal while the marginals stay uniform.
inline SyntheticData generate_correlated_stars(std::size_t num_centers,
                                               std::size_t leaf_pairs_per_center,
                                               std::uint64_t seed) {
  const std::size_t n = num_centers * (1 + 2 * leaf_pairs_per_center);
  SyntheticData data;
  data.labels = LabelState::unlabeled(n, 3);
  auto rng = make_rng(seed, 0xC0221);
  std::uniform_int_distribution<int> pair_label(1, 2);
  EdgeList edges;
  std::size_t next = num_centers;
  for (std::size_t c = 0; c < num_centers; ++c) {
    data.labels.set_ground_truth(c, 0);
    for (std::size_t l = 0; l < leaf_pairs_per_center; ++l) {
      const int lbl = pair_label(rng);
      for (int rep = 0; rep < 2; ++rep) {
        data.labels.set_ground_truth(next, lbl);
        edges.emplace_back(static_cast<NodeId>(c), static_cast<NodeId>(next));
        ++next;
      }
    }
  }
  data.graph = build_graph(n, edges);
  data.features = Matrix(n, 1);
  return data;
}

}  // namespace postel
