#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "postel/errors.hpp"
#include "postel/graph.hpp"
#include "postel/matrix.hpp"
#include "postel/rng.hpp"
#include "postel/smoothing.hpp"

namespace postel {

enum class ModelKind : std::uint8_t { GCN, MLP };

inline const char* to_string(ModelKind k) { return k == ModelKind::GCN ? "gcn" : "mlp"; }

// Defaults follow the training protocol used throughout: 1000 epochs,
// patience 200, two layers of width 64, dropout 0.5.
struct TrainConfig {
  double learning_rate = 0.01;
  double weight_decay = 0.0005;
  std::size_t max_epochs = 1000;
  std::size_t patience = 200;
  std::size_t hidden_dim = 64;
  double dropout = 0.5;
  std::uint64_t seed = 0;
  ModelKind model_kind = ModelKind::GCN;
};

// Disjoint node-id sets; train must be non-empty.
struct Split {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
};

// CSR matrix with values; holds the normalized adjacency.
struct SparseMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_offsets;
  std::vector<NodeId> cols;
  std::vector<double> vals;
};

// Ahat = Dt^{-1/2} (A + I) Dt^{-1/2} with Dt the degree matrix of A + I.
inline SparseMatrix normalize_adjacency(const Graph& g) {
  SparseMatrix s;
  s.n = g.num_nodes;
  s.row_offsets.assign(g.num_nodes + 1, 0);
  s.cols.reserve(g.col_indices.size() + g.num_nodes);
  s.vals.reserve(g.col_indices.size() + g.num_nodes);
  std::vector<double> inv_sqrt(g.num_nodes);
  for (NodeId i = 0; i < g.num_nodes; ++i)
    inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(g.degree(i) + 1));
  for (NodeId i = 0; i < g.num_nodes; ++i) {
    bool placed_diag = false;
    for (NodeId j : g.neighbors(i)) {
      if (!placed_diag && j > i) {
        s.cols.push_back(i);
        s.vals.push_back(inv_sqrt[i] * inv_sqrt[i]);
        placed_diag = true;
      }
      s.cols.push_back(j);
      s.vals.push_back(inv_sqrt[i] * inv_sqrt[j]);
    }
    if (!placed_diag) {
      s.cols.push_back(i);
      s.vals.push_back(inv_sqrt[i] * inv_sqrt[i]);
    }
    s.row_offsets[i + 1] = s.cols.size();
  }
  return s;
}

struct LinearLayer {
  Matrix weight;             // in x out
  std::vector<double> bias;  // out
};

struct Model {
  ModelKind kind = ModelKind::GCN;
  LinearLayer l0, l1;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0, val_loss = 0, test_loss = 0;
  double train_acc = 0, val_acc = 0, test_acc = 0;
};

using History = std::vector<EpochRecord>;

struct TrainResult {
  Model model;  // parameters at the epoch of minimum validation loss
  History history;
  std::size_t best_epoch = 0;
};

namespace nn_detail {

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.data.data() + i * a.cols;
    double* crow = c.data.data() + i * b.cols;
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      const double* brow = b.data.data() + k * b.cols;
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

// a^T b for a: n x p, b: n x q -> p x q
inline Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  Matrix c(a.cols, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.data.data() + i * a.cols;
    const double* brow = b.data.data() + i * b.cols;
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      double* crow = c.data.data() + k * b.cols;
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

// a b^T for a: n x p, b: q x p -> n x q
inline Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.data.data() + i * a.cols;
    for (std::size_t j = 0; j < b.rows; ++j) {
      const double* brow = b.data.data() + j * a.cols;
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
      c(i, j) = acc;
    }
  }
  return c;
}

inline Matrix spmm(const SparseMatrix& s, const Matrix& x) {
  Matrix y(s.n, x.cols);
  for (std::size_t i = 0; i < s.n; ++i) {
    double* yrow = y.data.data() + i * x.cols;
    for (std::size_t e = s.row_offsets[i]; e < s.row_offsets[i + 1]; ++e) {
      const double w = s.vals[e];
      const double* xrow = x.data.data() + static_cast<std::size_t>(s.cols[e]) * x.cols;
      for (std::size_t j = 0; j < x.cols; ++j) yrow[j] += w * xrow[j];
    }
  }
  return y;
}

inline void add_bias(Matrix& m, const std::vector<double>& b) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    double* row = m.data.data() + i * m.cols;
    for (std::size_t j = 0; j < m.cols; ++j) row[j] += b[j];
  }
}

inline void relu_inplace(Matrix& m) {
  for (double& x : m.data) x = x > 0.0 ? x : 0.0;
}

inline Matrix softmax_rows(const Matrix& z) {
  Matrix p(z.rows, z.cols);
  for (std::size_t i = 0; i < z.rows; ++i) {
    const double* zi = z.data.data() + i * z.cols;
    double* pi = p.data.data() + i * z.cols;
    double peak = zi[0];
    for (std::size_t j = 1; j < z.cols; ++j) peak = std::max(peak, zi[j]);
    double total = 0.0;
    for (std::size_t j = 0; j < z.cols; ++j) {
      pi[j] = std::exp(zi[j] - peak);
      total += pi[j];
    }
    for (std::size_t j = 0; j < z.cols; ++j) pi[j] /= total;
  }
  return p;
}

// Inverted dropout mask: entries are 0 or 1/keep. The stream is derived from
// (seed, epoch, layer) so every epoch and layer is independent yet replayable.
inline Matrix dropout_mask(std::size_t rows, std::size_t cols, double p,
                           std::uint64_t seed, std::size_t epoch, std::size_t layer) {
  Matrix m(rows, cols, 1.0);
  if (p <= 0.0) return m;
  auto rng = make_rng(seed, 0xD20u + layer, epoch);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double scale = 1.0 / (1.0 - p);
  for (double& x : m.data) x = unif(rng) < p ? 0.0 : scale;
  return m;
}

inline Matrix hadamard(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) c.data[i] = a.data[i] * b.data[i];
  return c;
}

// Mean soft cross entropy over the mask; log clamped at 1e-12.
inline double masked_soft_ce(const Matrix& pred, const Matrix& targets,
                             std::span<const NodeId> mask) {
  if (mask.empty()) throw EmptyMask();
  double total = 0.0;
  for (NodeId i : mask) {
    const double* p = pred.data.data() + static_cast<std::size_t>(i) * pred.cols;
    const double* t = targets.data.data() + static_cast<std::size_t>(i) * targets.cols;
    double row = 0.0;
    for (std::size_t c = 0; c < pred.cols; ++c)
      row -= t[c] * std::log(std::max(p[c], 1e-12));
    total += row;
  }
  return total / static_cast<double>(mask.size());
}

// Cross entropy against integer labels; accuracy over the labeled subset.
// Nodes with label < 0 are skipped; an empty effective mask yields NaN.
inline std::pair<double, double> masked_hard_metrics(const Matrix& pred,
                                                     const std::vector<int>& labels,
                                                     std::span<const NodeId> mask) {
  double loss = 0.0;
  std::size_t correct = 0, counted = 0;
  for (NodeId i : mask) {
    const int y = labels[i];
    if (y < 0) continue;
    ++counted;
    const double* p = pred.data.data() + static_cast<std::size_t>(i) * pred.cols;
    loss -= std::log(std::max(p[y], 1e-12));
    if (argmax(pred.row(i)) == static_cast<std::size_t>(y)) ++correct;
  }
  if (counted == 0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  return {loss / static_cast<double>(counted),
          static_cast<double>(correct) / static_cast<double>(counted)};
}

inline LinearLayer glorot_layer(std::size_t fan_in, std::size_t fan_out,
                                std::mt19937_64& rng) {
  LinearLayer l;
  l.weight = Matrix(fan_in, fan_out);
  l.bias.assign(fan_out, 0.0);
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> unif(-limit, limit);
  for (double& w : l.weight.data) w = unif(rng);
  return l;
}

inline Model init_model(ModelKind kind, std::size_t in_dim, std::size_t hidden,
                        std::size_t out_dim, std::uint64_t seed) {
  auto rng = make_rng(seed, 0x1417u);
  Model m;
  m.kind = kind;
  m.l0 = glorot_layer(in_dim, hidden, rng);
  m.l1 = glorot_layer(hidden, out_dim, rng);
  return m;
}

struct ForwardCache {
  Matrix x0;   // input after dropout
  Matrix s1;   // pre-activation of layer 0
  Matrix h1d;  // hidden after relu and dropout
  Matrix probs;
};

// Forward pass; masks may be empty (evaluation mode).
inline ForwardCache forward(const Model& m, const SparseMatrix& adj, const Matrix& x,
                            const Matrix* mask0, const Matrix* mask1) {
  const bool gcn = m.kind == ModelKind::GCN;
  ForwardCache f;
  f.x0 = mask0 ? hadamard(x, *mask0) : x;
  Matrix xw = matmul(f.x0, m.l0.weight);
  f.s1 = gcn ? spmm(adj, xw) : std::move(xw);
  add_bias(f.s1, m.l0.bias);
  Matrix h1 = f.s1;
  relu_inplace(h1);
  f.h1d = mask1 ? hadamard(h1, *mask1) : std::move(h1);
  Matrix hw = matmul(f.h1d, m.l1.weight);
  Matrix z = gcn ? spmm(adj, hw) : std::move(hw);
  add_bias(z, m.l1.bias);
  f.probs = softmax_rows(z);
  return f;
}

struct Gradients {
  Matrix w0, w1;
  std::vector<double> b0, b1;
};

// Backprop of masked soft cross entropy through the two layers.
inline Gradients backward(const Model& m, const SparseMatrix& adj, const ForwardCache& f,
                          const Matrix& targets, std::span<const NodeId> mask,
                          const Matrix* mask1) {
  const bool gcn = m.kind == ModelKind::GCN;
  const std::size_t k = f.probs.cols;
  Matrix dz(f.probs.rows, k);
  const double inv = 1.0 / static_cast<double>(mask.size());
  for (NodeId i : mask) {
    const double* p = f.probs.data.data() + static_cast<std::size_t>(i) * k;
    const double* t = targets.data.data() + static_cast<std::size_t>(i) * k;
    double* d = dz.data.data() + static_cast<std::size_t>(i) * k;
    for (std::size_t c = 0; c < k; ++c) d[c] = (p[c] - t[c]) * inv;
  }

  Gradients grad;
  grad.b1.assign(k, 0.0);
  for (std::size_t i = 0; i < dz.rows; ++i)
    for (std::size_t c = 0; c < k; ++c) grad.b1[c] += dz(i, c);

  Matrix dza = gcn ? spmm(adj, dz) : std::move(dz);
  grad.w1 = matmul_tn(f.h1d, dza);
  Matrix dh = matmul_nt(dza, m.l1.weight);
  if (mask1) dh = hadamard(dh, *mask1);
  // relu gate on the pre-activation
  for (std::size_t i = 0; i < dh.data.size(); ++i)
    if (f.s1.data[i] <= 0.0) dh.data[i] = 0.0;

  grad.b0.assign(m.l0.bias.size(), 0.0);
  for (std::size_t i = 0; i < dh.rows; ++i)
    for (std::size_t c = 0; c < dh.cols; ++c) grad.b0[c] += dh(i, c);

  Matrix dha = gcn ? spmm(adj, dh) : std::move(dh);
  grad.w0 = matmul_tn(f.x0, dha);
  return grad;
}

struct AdamState {
  std::vector<double> m, v;
  std::size_t t = 0;
};

inline void adam_step(std::span<double> param, std::span<const double> grad,
                      std::span<double> m, std::span<double> v, std::size_t t,
                      double lr, double weight_decay) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t));
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i] + weight_decay * param[i];
    m[i] = b1 * m[i] + (1.0 - b1) * g;
    v[i] = b2 * v[i] + (1.0 - b2) * g * g;
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    param[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace nn_detail

// Mean soft cross entropy of row-stochastic predictions against soft targets
// over a node mask.
inline double soft_cross_entropy(const Matrix& pred_probs, const SoftLabels& targets,
                                 std::span<const NodeId> mask) {
  return nn_detail::masked_soft_ce(pred_probs, targets.probs, mask);
}

// Forward pass with dropout disabled; rows softmax-normalized.
inline Matrix predict(const Model& m, const Graph& g, const Matrix& features) {
  SparseMatrix adj;
  if (m.kind == ModelKind::GCN) adj = normalize_adjacency(g);
  return nn_detail::forward(m, adj, features, nullptr, nullptr).probs;
}

// Full-batch Adam training with early stopping on validation loss.
//
// Each epoch records the metrics of the parameters *before* that epoch's
// update, so history.front() reflects the initial model and the returned
// model's metrics equal history[best_epoch]. The training loss is the soft
// cross entropy against `targets` on split.train; validation/test metrics are
// computed against `eval_labels` (full ground truth, -1 = unknown, used for
// metrics only). With no labeled validation node, best tracking falls back to
// the training loss.
inline TrainResult train(const Graph& g, const Matrix& features, const SoftLabels& targets,
                         const std::vector<int>& eval_labels, const Split& split,
                         const TrainConfig& cfg) {
  if (split.train.empty()) throw EmptyMask();
  if (features.rows != g.num_nodes)
    throw ShapeMismatch("feature rows must equal num_nodes");
  if (targets.probs.rows != g.num_nodes)
    throw ShapeMismatch("target rows must equal num_nodes");
  if (eval_labels.size() != g.num_nodes)
    throw ShapeMismatch("eval label count must equal num_nodes");
  for (double x : features.data)
    if (!std::isfinite(x)) throw ShapeMismatch("features must be finite");

  using namespace nn_detail;
  const bool gcn = cfg.model_kind == ModelKind::GCN;
  SparseMatrix adj;
  if (gcn) adj = normalize_adjacency(g);

  const std::size_t k = targets.probs.cols;
  Model model = init_model(cfg.model_kind, features.cols, cfg.hidden_dim, k, cfg.seed);

  auto zeros_like = [](const Model& m) {
    AdamState s;
    s.m.assign(m.l0.weight.data.size() + m.l0.bias.size() + m.l1.weight.data.size() +
                   m.l1.bias.size(),
               0.0);
    s.v = s.m;
    return s;
  };
  AdamState opt = zeros_like(model);

  auto param_spans = [](Model& m) {
    return std::array<std::span<double>, 4>{
        std::span<double>(m.l0.weight.data), std::span<double>(m.l0.bias),
        std::span<double>(m.l1.weight.data), std::span<double>(m.l1.bias)};
  };
  auto grad_spans = [](Gradients& gr) {
    return std::array<std::span<const double>, 4>{
        std::span<const double>(gr.w0.data), std::span<const double>(gr.b0),
        std::span<const double>(gr.w1.data), std::span<const double>(gr.b1)};
  };

  TrainResult out;
  out.model = model;
  double best_metric = std::numeric_limits<double>::infinity();
  std::size_t bad_epochs = 0;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    ForwardCache eval = forward(model, adj, features, nullptr, nullptr);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = masked_soft_ce(eval.probs, targets.probs, split.train);
    auto [vl, va] = masked_hard_metrics(eval.probs, eval_labels, split.val);
    auto [sl, sa] = masked_hard_metrics(eval.probs, eval_labels, split.test);
    auto [tl_hard, ta] = masked_hard_metrics(eval.probs, eval_labels, split.train);
    rec.val_loss = vl;
    rec.val_acc = va;
    rec.test_loss = sl;
    rec.test_acc = sa;
    rec.train_acc = ta;
    (void)tl_hard;
    if (!std::isfinite(rec.train_loss)) throw NonFiniteLoss(epoch);
    out.history.push_back(rec);

    const double metric = std::isnan(rec.val_loss) ? rec.train_loss : rec.val_loss;
    if (metric < best_metric) {
      best_metric = metric;
      out.best_epoch = epoch;
      out.model = model;
      bad_epochs = 0;
    } else if (++bad_epochs >= cfg.patience) {
      break;
    }

    Matrix mask0 = dropout_mask(features.rows, features.cols, cfg.dropout, cfg.seed, epoch, 0);
    Matrix mask1 = dropout_mask(features.rows, cfg.hidden_dim, cfg.dropout, cfg.seed, epoch, 1);
    const Matrix* m0 = cfg.dropout > 0.0 ? &mask0 : nullptr;
    const Matrix* m1 = cfg.dropout > 0.0 ? &mask1 : nullptr;
    ForwardCache f = forward(model, adj, features, m0, m1);
    Gradients grad = backward(model, adj, f, targets.probs, split.train, m1);

    ++opt.t;
    auto params = param_spans(model);
    auto grads = grad_spans(grad);
    std::size_t offset = 0;
    for (std::size_t p = 0; p < params.size(); ++p) {
      adam_step(params[p], grads[p], std::span<double>(opt.m).subspan(offset, params[p].size()),
                std::span<double>(opt.v).subspan(offset, params[p].size()), opt.t,
                cfg.learning_rate, cfg.weight_decay);
      offset += params[p].size();
    }
  }
  return out;
}

// Compares analytic gradients against central finite differences (h = 1e-5)
// on a small random instance with dropout disabled and no weight decay.
// Returns the maximum relative error, |a - n| / max(1, |a|, |n|).
inline double grad_check(ModelKind kind, std::uint64_t seed) {
  using namespace nn_detail;
  auto rng = make_rng(seed, 0x6ADC);
  const std::size_t n = 8, d = 4, hidden = 5;
  const int k = 3;

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  EdgeList edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (unif(rng) < 0.35) edges.emplace_back(u, v);
  const Graph g = build_graph(n, edges);

  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, d);
  for (double& e : x.data) e = normal(rng);

  Matrix targets(n, static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
      targets(i, c) = 0.1 + unif(rng);
      total += targets(i, c);
    }
    for (int c = 0; c < k; ++c) targets(i, c) /= total;
  }

  std::vector<NodeId> mask{0, 1, 2, 3, 4, 5};
  SparseMatrix adj;
  if (kind == ModelKind::GCN) adj = normalize_adjacency(g);
  Model model = init_model(kind, d, hidden, static_cast<std::size_t>(k), seed);

  ForwardCache f = forward(model, adj, x, nullptr, nullptr);
  Gradients grad = backward(model, adj, f, targets, mask, nullptr);

  auto loss_at = [&](const Model& m) {
    return masked_soft_ce(forward(m, adj, x, nullptr, nullptr).probs, targets, mask);
  };

  const double h = 1e-5;
  double max_rel = 0.0;
  std::array<std::pair<std::vector<double>*, const std::vector<double>*>, 4> tensors{{
      {&model.l0.weight.data, &grad.w0.data},
      {&model.l0.bias, &grad.b0},
      {&model.l1.weight.data, &grad.w1.data},
      {&model.l1.bias, &grad.b1},
  }};
  for (auto& [param, analytic] : tensors) {
    for (std::size_t i = 0; i < param->size(); ++i) {
      const double saved = (*param)[i];
      (*param)[i] = saved + h;
      const double lp = loss_at(model);
      (*param)[i] = saved - h;
      const double lm = loss_at(model);
      (*param)[i] = saved;
      const double numeric = (lp - lm) / (2.0 * h);
      const double a = (*analytic)[i];
      const double rel = std::abs(a - numeric) /
                         std::max({1.0, std::abs(a), std::abs(numeric)});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace postel
