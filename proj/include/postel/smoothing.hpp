#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "postel/errors.hpp"
#include "postel/graph.hpp"
#include "postel/label_stats.hpp"
#include "postel/matrix.hpp"

namespace postel {

enum class TargetProvenance : std::uint8_t { Posterior, Blended, OneHot, Baseline };

inline const char* to_string(TargetProvenance p) {
  switch (p) {
    case TargetProvenance::Posterior: return "posterior";
    case TargetProvenance::Blended: return "blended";
    case TargetProvenance::OneHot: return "onehot";
    case TargetProvenance::Baseline: return "baseline";
  }
  return "unknown";
}

// Row-stochastic training targets, one distribution per node.
struct SoftLabels {
  Matrix probs;  // N x K
  std::vector<TargetProvenance> provenance;
};

// Bayesian posterior over node i's class given the labels of its counted
// neighbors, computed in log space. A node with no counted neighbor gets the
// prior back verbatim (copied, not run through the log path). Zero
// conditional entries are floored at `floor` inside the log only.
inline std::vector<double> posterior_one(const Graph& g, const LabelState& labels,
                                         const ClassStats& stats, NodeId i,
                                         double floor = 1e-12) {
  const int k = labels.num_classes;
  bool any = false;
  for (NodeId v : g.neighbors(i)) {
    if (labels.counted(v, stats.counted_sources)) {
      any = true;
      break;
    }
  }
  if (!any) return stats.prior;

  std::vector<double> lp(k);
  for (int c = 0; c < k; ++c) lp[c] = std::log(stats.prior[c]);
  for (NodeId v : g.neighbors(i)) {
    if (!labels.counted(v, stats.counted_sources)) continue;
    const int m = labels.cls[v];
    for (int c = 0; c < k; ++c) lp[c] += std::log(std::max(stats.conditional(c, m), floor));
  }

  double peak = lp[0];
  for (int c = 1; c < k; ++c) peak = std::max(peak, lp[c]);
  std::vector<double> out(k);
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    out[c] = std::exp(lp[c] - peak);
    total += out[c];
  }
  for (int c = 0; c < k; ++c) out[c] /= total;
  return out;
}

// posterior_one for every node, O((|E| + |V|) K) via precomputed log tables.
// Rows are bit-identical to per-node posterior_one calls.
inline SoftLabels posterior_all(const Graph& g, const LabelState& labels,
                                const ClassStats& stats, double floor = 1e-12) {
  const int k = labels.num_classes;
  std::vector<double> log_prior(k);
  for (int c = 0; c < k; ++c) log_prior[c] = std::log(stats.prior[c]);
  // Transposed table: row m holds log max(P(m | c), floor) over classes c, so
  // the per-neighbor accumulation reads contiguously.
  Matrix log_cond_t(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  for (int m = 0; m < k; ++m)
    for (int c = 0; c < k; ++c)
      log_cond_t(m, c) = std::log(std::max(stats.conditional(c, m), floor));

  SoftLabels soft;
  soft.probs = Matrix(g.num_nodes, static_cast<std::size_t>(k));
  soft.provenance.assign(g.num_nodes, TargetProvenance::Posterior);
  std::vector<double> lp(k);
  for (NodeId i = 0; i < g.num_nodes; ++i) {
    auto out = soft.probs.row(i);
    bool any = false;
    for (NodeId v : g.neighbors(i)) {
      if (labels.counted(v, stats.counted_sources)) {
        any = true;
        break;
      }
    }
    if (!any) {
      std::copy(stats.prior.begin(), stats.prior.end(), out.begin());
      continue;
    }
    for (int c = 0; c < k; ++c) lp[c] = log_prior[c];
    for (NodeId v : g.neighbors(i)) {
      if (!labels.counted(v, stats.counted_sources)) continue;
      const auto lrow = log_cond_t.row(labels.cls[v]);
      for (int c = 0; c < k; ++c) lp[c] += lrow[c];
    }
    double peak = lp[0];
    for (int c = 1; c < k; ++c) peak = std::max(peak, lp[c]);
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
      out[c] = std::exp(lp[c] - peak);
      total += out[c];
    }
    for (int c = 0; c < k; ++c) out[c] /= total;
  }
  return soft;
}

// Training target: noise-tempered posterior interpolated with the one-hot
// label. The uniform noise reading is e~ = (posterior + beta/K) / (1 + beta),
// a proper distribution for every beta >= 0.
inline std::vector<double> blend(std::span<const double> posterior, int true_label,
                                 double alpha, double beta) {
  const std::size_t k = posterior.size();
  const double noise = beta / static_cast<double>(k);
  const double denom = 1.0 + beta;
  std::vector<double> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    const double tempered = (posterior[c] + noise) / denom;
    const double onehot = (static_cast<int>(c) == true_label) ? 1.0 : 0.0;
    out[c] = alpha * tempered + (1.0 - alpha) * onehot;
  }
  return out;
}

// Classic uniform label smoothing baseline.
inline std::vector<double> uniform_smooth(int true_label, double eps, int k) {
  std::vector<double> out(k);
  for (int c = 0; c < k; ++c)
    out[c] = (1.0 - eps) * (c == true_label ? 1.0 : 0.0) + eps / static_cast<double>(k);
  return out;
}

// Comparison baseline: empirical labeled-neighbor histogram (uniform when
// none) interpolated with the node's own one-hot label.
inline std::vector<double> neighbor_aggregate_smooth(const Graph& g,
                                                     const LabelState& labels, NodeId i,
                                                     double alpha) {
  const int k = labels.num_classes;
  std::vector<std::size_t> counts(k, 0);
  std::size_t total = 0;
  for (NodeId v : g.neighbors(i)) {
    if (!labels.labeled(v)) continue;
    ++counts[labels.cls[v]];
    ++total;
  }
  std::vector<double> hist(k);
  for (int c = 0; c < k; ++c)
    hist[c] = total == 0 ? 1.0 / k
                         : static_cast<double>(counts[c]) / static_cast<double>(total);
  const int y = labels.cls[i];
  std::vector<double> out(k);
  for (int c = 0; c < k; ++c)
    out[c] = alpha * hist[c] + (1.0 - alpha) * (c == y ? 1.0 : 0.0);
  return out;
}

// Closed-form binary posterior under a balanced prior, parameterized by the
// per-class homophilies. `same` neighbors carry label k, `other` neighbors
// the opposite label. Log-odds form; the sigmoid of it is the posterior.
inline double closed_form_binary_log_odds(double c0, double c1, std::int64_t same,
                                          std::int64_t other, int k) {
  if (!(c0 > 0.0 && c0 < 1.0 && c1 > 0.0 && c1 < 1.0)) throw DegenerateHomophily();
  const double ck = (k == 0) ? c0 : c1;
  const double co = (k == 0) ? c1 : c0;
  const double log_num = static_cast<double>(same) * std::log(ck) +
                         static_cast<double>(other) * std::log1p(-ck);
  const double log_alt = static_cast<double>(other) * std::log(co) +
                         static_cast<double>(same) * std::log1p(-co);
  return log_num - log_alt;
}

inline double closed_form_binary_posterior(double c0, double c1, std::int64_t same,
                                           std::int64_t other, int k) {
  const double llr = closed_form_binary_log_odds(c0, c1, same, other, k);
  return 1.0 / (1.0 + std::exp(-llr));
}

}  // namespace postel
