#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "postel/errors.hpp"
#include "postel/graph.hpp"
#include "postel/label_stats.hpp"
#include "postel/matrix.hpp"
#include "postel/nn.hpp"
#include "postel/rng.hpp"
#include "postel/smoothing.hpp"

namespace postel {

enum class LikelihoodVariant : std::uint8_t { Global, Normalized, LocalH };

inline const char* to_string(LikelihoodVariant v) {
  switch (v) {
    case LikelihoodVariant::Global: return "global";
    case LikelihoodVariant::Normalized: return "normalized";
    case LikelihoodVariant::LocalH: return "local";
  }
  return "unknown";
}

// Ablation axes: posterior smoothing (PS), uniform noise (UN), and iterative
// pseudo-labeling (IPL). With all three off, training targets are the plain
// one-hot labels.
struct AblationToggles {
  bool posterior_smoothing = true;
  bool uniform_noise = true;
  bool iterative_pseudo = true;
};

struct ExperimentConfig {
  double alpha = 0.5;
  double beta = 0.1;
  LikelihoodVariant variant = LikelihoodVariant::Global;
  int local_hops = 2;  // H for the LocalH variant
  AblationToggles ablation;
  std::size_t max_pl_iterations = 10;
  TrainConfig trainer;
  double label_fraction = 1.0;
  double floor = 1e-12;
};

// Default hyperparameter grids for the sweep.
inline std::vector<double> default_alpha_grid() {
  return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
}
inline std::vector<double> default_beta_grid() {
  return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

struct IterationRecord {
  std::size_t iteration = 0;
  double val_loss = 0.0;       // validation loss at the best epoch
  double test_accuracy = 0.0;  // test accuracy at the best epoch
  std::size_t best_epoch = 0;
  History history;
  ClassStats stats;            // statistics the iteration's targets used
  std::size_t counted_nodes = 0;
};

struct ExperimentResult {
  std::vector<IterationRecord> iterations;  // round 0 plus refinement rounds
  std::size_t best_iteration = 0;
  double final_test_accuracy = 0.0;
  // Pseudo-labeling refinement rounds executed; 0 when only the initial
  // pseudo-label-free round ran.
  std::size_t iterations_used = 0;
  double wallclock_seconds = 0.0;
};

// argmax pseudo-labels for val/test nodes; ties break toward the lowest class
// index. Train nodes keep their ground truth; nodes outside the split are
// untouched.
inline LabelState assign_pseudo_labels(const Matrix& probs, const Split& split,
                                       const LabelState& labels) {
  LabelState out = labels;
  for (NodeId i : split.val) out.set_pseudo(i, static_cast<int>(argmax(probs.row(i))));
  for (NodeId i : split.test) out.set_pseudo(i, static_cast<int>(argmax(probs.row(i))));
  for (NodeId i : split.train)
    if (labels.kind[i] == LabelKind::GroundTruth)
      out.set_ground_truth(i, labels.cls[i]);
  return out;
}

struct SubsampleResult {
  LabelState labels;
  std::vector<int> vanished_classes;  // classes that lost every train label
};

// Keeps ceil(fraction * |train|) ground-truth train labels, chosen uniformly
// with at least one node per class when the budget allows; the rest become
// Unknown.
inline SubsampleResult subsample_train_labels(const LabelState& labels, const Split& split,
                                              double fraction, std::uint64_t seed) {
  SubsampleResult out{labels, {}};
  if (fraction >= 1.0) return out;
  auto rng = make_rng(seed, 0x5AB5);

  std::vector<std::vector<NodeId>> by_class(labels.num_classes);
  std::size_t train_labeled = 0;
  for (NodeId i : split.train) {
    if (labels.kind[i] != LabelKind::GroundTruth) continue;
    by_class[labels.cls[i]].push_back(i);
    ++train_labeled;
  }
  const std::size_t budget = std::min<std::size_t>(
      train_labeled,
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(train_labeled))));

  std::vector<int> present;
  for (int c = 0; c < labels.num_classes; ++c)
    if (!by_class[c].empty()) present.push_back(c);

  std::vector<NodeId> chosen;
  std::vector<NodeId> pool;
  if (budget >= present.size()) {
    for (int c : present) {
      auto& nodes = by_class[c];
      std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
      const std::size_t idx = pick(rng);
      chosen.push_back(nodes[idx]);
      nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(idx));
      pool.insert(pool.end(), nodes.begin(), nodes.end());
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    for (std::size_t i = 0; i < budget - present.size() && i < pool.size(); ++i)
      chosen.push_back(pool[i]);
  } else {
    std::shuffle(present.begin(), present.end(), rng);
    for (std::size_t i = 0; i < budget; ++i) {
      auto& nodes = by_class[present[i]];
      std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
      chosen.push_back(nodes[pick(rng)]);
    }
    for (std::size_t i = budget; i < present.size(); ++i)
      out.vanished_classes.push_back(present[i]);
  }

  for (NodeId i : split.train) out.labels.clear(i);
  for (NodeId i : chosen) out.labels.set_ground_truth(i, labels.cls[i]);
  return out;
}

namespace pipeline_detail {

inline ClassStats estimate_stats(const Graph& g, const LabelState& labels,
                                 SourceSet sources, LikelihoodVariant variant) {
  ClassStats stats;
  stats.counted_sources = sources;
  stats.prior = estimate_prior(labels, sources);
  // LocalH conditionals are per node; the recorded stats keep the global
  // estimate in that case.
  stats.conditional = variant == LikelihoodVariant::Normalized
                          ? estimate_conditional_normalized(g, labels, sources)
                          : estimate_conditional(g, labels, sources);
  return stats;
}

// Posterior rows per the configured likelihood variant.
inline SoftLabels posteriors_for(const Graph& g, const LabelState& labels,
                                 const ClassStats& stats, const ExperimentConfig& cfg) {
  if (cfg.variant != LikelihoodVariant::LocalH)
    return posterior_all(g, labels, stats, cfg.floor);
  SoftLabels soft;
  soft.probs = Matrix(g.num_nodes, static_cast<std::size_t>(labels.num_classes));
  soft.provenance.assign(g.num_nodes, TargetProvenance::Posterior);
  for (NodeId i = 0; i < g.num_nodes; ++i) {
    ClassStats local = stats;
    local.conditional =
        estimate_conditional_local(g, labels, i, cfg.local_hops, stats.counted_sources);
    const auto row = posterior_one(g, labels, local, i, cfg.floor);
    std::copy(row.begin(), row.end(), soft.probs.row(i).begin());
  }
  return soft;
}

// Blends training targets according to the ablation toggles. Train nodes
// without a ground-truth label (after subsampling) keep their posterior row.
inline SoftLabels build_targets(const Graph& g, const LabelState& labels,
                                const ClassStats& stats, const Split& split,
                                const ExperimentConfig& cfg) {
  const int k = labels.num_classes;
  SoftLabels targets;
  if (cfg.ablation.posterior_smoothing) {
    targets = posteriors_for(g, labels, stats, cfg);
    const double beta = cfg.ablation.uniform_noise ? cfg.beta : 0.0;
    for (NodeId i : split.train) {
      if (labels.kind[i] != LabelKind::GroundTruth) continue;
      const auto blended = blend(targets.probs.row(i), labels.cls[i], cfg.alpha, beta);
      std::copy(blended.begin(), blended.end(), targets.probs.row(i).begin());
      targets.provenance[i] = TargetProvenance::Blended;
    }
    return targets;
  }

  // PS off: per-node uniform smoothing with eps = alpha*beta/(1+beta) when UN
  // is on (the algebraic reduction of the blend with the one-hot in place of
  // the posterior), exact one-hot otherwise.
  targets.probs = Matrix(g.num_nodes, static_cast<std::size_t>(k), 1.0 / k);
  targets.provenance.assign(g.num_nodes, TargetProvenance::Baseline);
  const bool noise = cfg.ablation.uniform_noise;
  const double eps = noise ? cfg.alpha * cfg.beta / (1.0 + cfg.beta) : 0.0;
  for (NodeId i : split.train) {
    if (labels.kind[i] != LabelKind::GroundTruth) continue;
    const auto row = uniform_smooth(labels.cls[i], eps, k);
    std::copy(row.begin(), row.end(), targets.probs.row(i).begin());
    targets.provenance[i] = noise ? TargetProvenance::Baseline : TargetProvenance::OneHot;
  }
  return targets;
}

}  // namespace pipeline_detail

// Full training loop with iterative pseudo-labeling. Iteration 0 estimates
// statistics from ground truth only; each later iteration pseudo-labels the
// val/test nodes with the latest accepted model, re-estimates statistics from
// {GroundTruth, Pseudo}, rebuilds targets, and retrains from a fresh
// (seed, iteration)-derived initialization. The loop stops at the first
// iteration that fails to strictly improve the best validation loss, or after
// max_pl_iterations refinement rounds.
inline ExperimentResult iterative_pseudo_label(const Graph& g, const Matrix& features,
                                               const LabelState& labels,
                                               const std::vector<int>& eval_labels,
                                               const Split& split,
                                               const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();

  LabelState working = labels;
  if (cfg.label_fraction < 1.0)
    working = subsample_train_labels(labels, split, cfg.label_fraction, cfg.trainer.seed)
                  .labels;

  // The loss only sees train nodes that still carry ground truth.
  Split loss_split = split;
  loss_split.train.clear();
  for (NodeId i : split.train)
    if (working.kind[i] == LabelKind::GroundTruth) loss_split.train.push_back(i);

  ExperimentResult result;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0;; ++iter) {
    const SourceSet sources =
        iter == 0 ? SourceSet::ground_truth_only() : SourceSet::all();
    ClassStats stats = pipeline_detail::estimate_stats(g, working, sources, cfg.variant);
    SoftLabels targets = pipeline_detail::build_targets(g, working, stats, split, cfg);

    TrainConfig tc = cfg.trainer;
    tc.seed = mix_seed(cfg.trainer.seed, 0x17E2, iter);
    TrainResult tr = train(g, features, targets, eval_labels, loss_split, tc);

    IterationRecord rec;
    rec.iteration = iter;
    rec.best_epoch = tr.best_epoch;
    rec.val_loss = tr.history[tr.best_epoch].val_loss;
    rec.test_accuracy = tr.history[tr.best_epoch].test_acc;
    rec.history = std::move(tr.history);
    std::size_t counted = 0;
    for (std::size_t i = 0; i < working.size(); ++i)
      if (working.counted(i, sources)) ++counted;
    rec.counted_nodes = counted;
    rec.stats = std::move(stats);
    result.iterations.push_back(std::move(rec));

    const bool improved = result.iterations.back().val_loss < best_val;
    if (improved) {
      best_val = result.iterations.back().val_loss;
      result.best_iteration = iter;
    }
    if (iter >= cfg.max_pl_iterations || !improved) break;

    const Matrix probs = predict(tr.model, g, features);
    working = assign_pseudo_labels(probs, split, working);
  }

  result.iterations_used = result.iterations.size() - 1;
  result.final_test_accuracy = result.iterations[result.best_iteration].test_accuracy;
  result.wallclock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// Entry point honoring every ablation toggle: with IPL off the loop is capped
// at iteration 0, which is plain PosteL without pseudo-labeling.
inline ExperimentResult run_postel(const Graph& g, const Matrix& features,
                                   const LabelState& labels,
                                   const std::vector<int>& eval_labels, const Split& split,
                                   const ExperimentConfig& cfg) {
  ExperimentConfig effective = cfg;
  if (!cfg.ablation.iterative_pseudo) effective.max_pl_iterations = 0;
  return iterative_pseudo_label(g, features, labels, eval_labels, split, effective);
}

struct SweepCell {
  double alpha = 0.0;
  double beta = 0.0;
  double best_val_loss = 0.0;
  double test_accuracy = 0.0;
  std::size_t iterations_used = 0;
};

struct SweepResult {
  ExperimentConfig best_config;
  SweepCell best_cell;
  std::vector<SweepCell> table;
};

// Runs every (alpha, beta) cell and selects by best-iteration validation
// loss. Ties break toward lower alpha, then lower beta, so the selection is
// independent of grid order.
inline SweepResult grid_sweep(const Graph& g, const Matrix& features,
                              const LabelState& labels,
                              const std::vector<int>& eval_labels, const Split& split,
                              const ExperimentConfig& base_cfg,
                              const std::vector<double>& alpha_grid,
                              const std::vector<double>& beta_grid) {
  if (alpha_grid.empty() || beta_grid.empty())
    throw ShapeMismatch("sweep grids must be non-empty");
  SweepResult out;
  bool have_best = false;
  for (double alpha : alpha_grid) {
    for (double beta : beta_grid) {
      ExperimentConfig cfg = base_cfg;
      cfg.alpha = alpha;
      cfg.beta = beta;
      const ExperimentResult res = run_postel(g, features, labels, eval_labels, split, cfg);
      SweepCell cell{alpha, beta, res.iterations[res.best_iteration].val_loss,
                     res.final_test_accuracy, res.iterations_used};
      out.table.push_back(cell);
      const bool better =
          !have_best || cell.best_val_loss < out.best_cell.best_val_loss ||
          (cell.best_val_loss == out.best_cell.best_val_loss &&
           (cell.alpha < out.best_cell.alpha ||
            (cell.alpha == out.best_cell.alpha && cell.beta < out.best_cell.beta)));
      if (better) {
        have_best = true;
        out.best_cell = cell;
        out.best_config = cfg;
      }
    }
  }
  return out;
}

}  // namespace postel
