#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace postel {

enum class LabelKind : std::uint8_t { Unknown = 0, GroundTruth = 1, Pseudo = 2 };

// Which label kinds an estimator counts. Iteration 0 of the pipeline counts
// ground truth only; later iterations count pseudo-labels as well.
struct SourceSet {
  bool ground_truth = true;
  bool pseudo = false;

  bool counts(LabelKind k) const {
    return (k == LabelKind::GroundTruth && ground_truth) ||
           (k == LabelKind::Pseudo && pseudo);
  }

  static constexpr SourceSet ground_truth_only() { return {true, false}; }
  static constexpr SourceSet all() { return {true, true}; }
};

// Per-node label status for a K-class problem.
struct LabelState {
  int num_classes = 0;
  std::vector<LabelKind> kind;
  std::vector<int> cls;  // valid where kind != Unknown, -1 otherwise

  static LabelState unlabeled(std::size_t num_nodes, int num_classes) {
    LabelState s;
    s.num_classes = num_classes;
    s.kind.assign(num_nodes, LabelKind::Unknown);
    s.cls.assign(num_nodes, -1);
    return s;
  }

  std::size_t size() const { return kind.size(); }
  bool labeled(std::size_t i) const { return kind[i] != LabelKind::Unknown; }
  bool counted(std::size_t i, SourceSet s) const { return s.counts(kind[i]); }

  void set_ground_truth(std::size_t i, int c) {
    kind[i] = LabelKind::GroundTruth;
    cls[i] = c;
  }
  void set_pseudo(std::size_t i, int c) {
    kind[i] = LabelKind::Pseudo;
    cls[i] = c;
  }
  void clear(std::size_t i) {
    kind[i] = LabelKind::Unknown;
    cls[i] = -1;
  }
};

}  // namespace postel
