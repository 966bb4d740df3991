#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "postel/errors.hpp"
#include "postel/graph.hpp"
#include "postel/label_state.hpp"
#include "postel/matrix.hpp"

namespace postel {

// Prior over classes plus the neighbor-conditional matrix, and which label
// kinds were counted when estimating them. conditional(n, m) estimates
// P(neighbor label = m | center label = n); every row sums to 1.
struct ClassStats {
  std::vector<double> prior;  // length K
  Matrix conditional;         // K x K, row-stochastic
  SourceSet counted_sources;
};

namespace detail {

inline void require_some_labeled(const LabelState& labels, SourceSet sources) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels.counted(i, sources)) return;
  throw NoLabeledNodes();
}

// Integer counts -> row-stochastic matrix; rows with no observations fall
// back to the uniform distribution.
inline Matrix rows_from_counts(const std::vector<std::size_t>& counts, int k) {
  Matrix m(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  for (int n = 0; n < k; ++n) {
    std::size_t total = 0;
    for (int c = 0; c < k; ++c) total += counts[static_cast<std::size_t>(n) * k + c];
    if (total == 0) {
      for (int c = 0; c < k; ++c) m(n, c) = 1.0 / k;
    } else {
      for (int c = 0; c < k; ++c)
        m(n, c) = static_cast<double>(counts[static_cast<std::size_t>(n) * k + c]) /
                  static_cast<double>(total);
    }
  }
  return m;
}

inline Matrix rows_from_weights(const std::vector<double>& weights, int k) {
  Matrix m(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  for (int n = 0; n < k; ++n) {
    double total = 0.0;
    for (int c = 0; c < k; ++c) total += weights[static_cast<std::size_t>(n) * k + c];
    if (total == 0.0) {
      for (int c = 0; c < k; ++c) m(n, c) = 1.0 / k;
    } else {
      for (int c = 0; c < k; ++c)
        m(n, c) = weights[static_cast<std::size_t>(n) * k + c] / total;
    }
  }
  return m;
}

}  // namespace detail

// Class frequencies among the counted nodes. The denominator is the number
// of counted nodes, so partial-label priors stay normalized; with every node
// labeled this is the global label-frequency prior.
inline std::vector<double> estimate_prior(const LabelState& labels, SourceSet sources) {
  std::vector<std::size_t> counts(labels.num_classes, 0);
  std::size_t total = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels.counted(i, sources)) continue;
    ++counts[labels.cls[i]];
    ++total;
  }
  if (total == 0) throw NoLabeledNodes();
  std::vector<double> prior(labels.num_classes);
  for (int c = 0; c < labels.num_classes; ++c)
    prior[c] = static_cast<double>(counts[c]) / static_cast<double>(total);
  return prior;
}

// Edgewise conditional from global adjacency statistics: row n, column m is
// the fraction of directed edges (u,v) with both endpoints counted, label(u)
// = n, label(v) = m. Edges touching an uncounted endpoint are excluded from
// numerator and denominator alike.
inline Matrix estimate_conditional(const Graph& g, const LabelState& labels,
                                   SourceSet sources) {
  detail::require_some_labeled(labels, sources);
  const int k = labels.num_classes;
  std::vector<std::size_t> counts(static_cast<std::size_t>(k) * k, 0);
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    if (!labels.counted(u, sources)) continue;
    const std::size_t base = static_cast<std::size_t>(labels.cls[u]) * k;
    for (NodeId v : g.neighbors(u))
      if (labels.counted(v, sources)) ++counts[base + labels.cls[v]];
  }
  return detail::rows_from_counts(counts, k);
}

// Degree-normalized variant: each counted edge contributes 1/|N(u)| so high
// degree centers do not dominate their class's row. On regular graphs this
// equals estimate_conditional.
inline Matrix estimate_conditional_normalized(const Graph& g, const LabelState& labels,
                                              SourceSet sources) {
  detail::require_some_labeled(labels, sources);
  const int k = labels.num_classes;
  std::vector<double> weights(static_cast<std::size_t>(k) * k, 0.0);
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    if (!labels.counted(u, sources)) continue;
    const std::size_t deg = g.degree(u);
    if (deg == 0) continue;
    const double inv = 1.0 / static_cast<double>(deg);
    const std::size_t base = static_cast<std::size_t>(labels.cls[u]) * k;
    for (NodeId v : g.neighbors(u))
      if (labels.counted(v, sources)) weights[base + labels.cls[v]] += inv;
  }
  return detail::rows_from_weights(weights, k);
}

// Same counting as estimate_conditional restricted to the H-hop ego graph of
// node i. An ego graph with no counted pairs yields all-uniform rows.
inline Matrix estimate_conditional_local(const Graph& g, const LabelState& labels,
                                         NodeId i, int hops, SourceSet sources) {
  detail::require_some_labeled(labels, sources);
  const int k = labels.num_classes;
  std::vector<std::size_t> counts(static_cast<std::size_t>(k) * k, 0);
  for (const auto& [u, v] : ego_edges(g, i, hops))
    if (labels.counted(u, sources) && labels.counted(v, sources))
      ++counts[static_cast<std::size_t>(labels.cls[u]) * k + labels.cls[v]];
  return detail::rows_from_counts(counts, k);
}

// Per-class homophily c_k: the diagonal of the conditional estimated from
// ground-truth plus pseudo labels. Classes with no counted incident edges get
// NaN (undefined rather than the uniform fallback).
inline std::vector<double> class_homophily(const Graph& g, const LabelState& labels) {
  const int k = labels.num_classes;
  const SourceSet sources = SourceSet::all();
  std::vector<std::size_t> counts(static_cast<std::size_t>(k) * k, 0);
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    if (!labels.counted(u, sources)) continue;
    const std::size_t base = static_cast<std::size_t>(labels.cls[u]) * k;
    for (NodeId v : g.neighbors(u))
      if (labels.counted(v, sources)) ++counts[base + labels.cls[v]];
  }
  std::vector<double> c(k, std::numeric_limits<double>::quiet_NaN());
  for (int n = 0; n < k; ++n) {
    std::size_t total = 0;
    for (int m = 0; m < k; ++m) total += counts[static_cast<std::size_t>(n) * k + m];
    if (total > 0)
      c[n] = static_cast<double>(counts[static_cast<std::size_t>(n) * k + n]) /
             static_cast<double>(total);
  }
  return c;
}

// Empirical joint distribution of unordered labeled-neighbor pairs around
// centers of class `center_class`, symmetrized so entry (n,m) == entry (m,n)
// with total mass 1. Compared against the product of conditional marginals by
// the independence diagnostic.
inline Matrix joint_pair_distribution(const Graph& g, const LabelState& labels,
                                      int center_class) {
  const int k = labels.num_classes;
  std::vector<std::size_t> counts(static_cast<std::size_t>(k) * k, 0);
  std::size_t pairs = 0;
  std::vector<int> neighbor_classes;
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    if (!labels.labeled(u) || labels.cls[u] != center_class) continue;
    neighbor_classes.clear();
    for (NodeId v : g.neighbors(u))
      if (labels.labeled(v)) neighbor_classes.push_back(labels.cls[v]);
    for (std::size_t a = 0; a < neighbor_classes.size(); ++a) {
      for (std::size_t b = a + 1; b < neighbor_classes.size(); ++b) {
        const int ca = neighbor_classes[a];
        const int cb = neighbor_classes[b];
        ++counts[static_cast<std::size_t>(ca) * k + cb];
        ++counts[static_cast<std::size_t>(cb) * k + ca];
        ++pairs;
      }
    }
  }
  if (pairs == 0) throw InsufficientPairs();
  Matrix m(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  const double denom = 2.0 * static_cast<double>(pairs);
  for (std::size_t idx = 0; idx < m.data.size(); ++idx)
    m.data[idx] = static_cast<double>(counts[idx]) / denom;
  return m;
}

}  // namespace postel
