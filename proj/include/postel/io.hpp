#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "postel/errors.hpp"
#include "postel/graph.hpp"
#include "postel/label_state.hpp"
#include "postel/matrix.hpp"
#include "postel/nn.hpp"
#include "postel/smoothing.hpp"

namespace postel {

inline constexpr const char* kToolVersion = "0.1.0";

namespace io_detail {

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline bool skippable(const std::string& line) {
  return line.empty() || line[0] == '#';
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline std::optional<long long> parse_int(std::string_view field) {
  long long value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

inline std::optional<double> parse_double(std::string_view field) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(0, "cannot write " + path);
  return out;
}

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Data files start at the first line that is neither blank, a `#` comment,
// nor a non-numeric header row.
inline bool looks_like_header(std::string_view line) {
  return !line.empty() && !std::isdigit(static_cast<unsigned char>(line[0])) &&
         line[0] != '-' && line[0] != '+';
}

}  // namespace io_detail

// Edge list: one edge per line, two whitespace-separated 0-based node ids;
// `#` comment lines ignored.
inline EdgeList read_edge_list(const std::string& path) {
  auto in = io_detail::open_input(path);
  EdgeList edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    io_detail::strip_cr(line);
    if (io_detail::skippable(line)) continue;
    std::istringstream fields(line);
    long long u = -1, v = -1;
    if (!(fields >> u >> v) || u < 0 || v < 0)
      throw ParseError(lineno, "expected two non-negative node ids");
    std::string rest;
    if (fields >> rest) throw ParseError(lineno, "unexpected trailing field");
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  return edges;
}

// Labels CSV `node,label`; omitted nodes are unknown (-1).
inline std::vector<int> read_labels_csv(const std::string& path, std::size_t num_nodes) {
  auto in = io_detail::open_input(path);
  std::vector<int> labels(num_nodes, -1);
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    io_detail::strip_cr(line);
    if (io_detail::skippable(line)) continue;
    if (!seen_data && io_detail::looks_like_header(line)) continue;
    seen_data = true;
    const auto fields = io_detail::split_csv(line);
    if (fields.size() != 2) throw ParseError(lineno, "expected node,label");
    const auto node = io_detail::parse_int(fields[0]);
    const auto label = io_detail::parse_int(fields[1]);
    if (!node || !label || *label < 0) throw ParseError(lineno, "expected node,label");
    if (*node < 0 || static_cast<std::size_t>(*node) >= num_nodes)
      throw ParseError(lineno, "node id out of range");
    labels[*node] = static_cast<int>(*label);
  }
  return labels;
}

// Features CSV `node,f0,...,f{d-1}`; every node must appear.
inline Matrix read_features_csv(const std::string& path, std::size_t num_nodes) {
  auto in = io_detail::open_input(path);
  Matrix features;
  std::vector<bool> seen(num_nodes, false);
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    io_detail::strip_cr(line);
    if (io_detail::skippable(line)) continue;
    if (!seen_data && io_detail::looks_like_header(line)) continue;
    const auto fields = io_detail::split_csv(line);
    if (fields.size() < 2) throw ParseError(lineno, "expected node,f0,...");
    if (!seen_data) {
      features = Matrix(num_nodes, fields.size() - 1);
      seen_data = true;
    }
    if (fields.size() - 1 != features.cols)
      throw ParseError(lineno, "inconsistent feature width");
    const auto node = io_detail::parse_int(fields[0]);
    if (!node || *node < 0 || static_cast<std::size_t>(*node) >= num_nodes)
      throw ParseError(lineno, "node id out of range");
    for (std::size_t d = 0; d + 1 < fields.size(); ++d) {
      const auto value = io_detail::parse_double(fields[d + 1]);
      if (!value) throw ParseError(lineno, "bad feature value");
      features(*node, d) = *value;
    }
    seen[*node] = true;
  }
  if (!seen_data) throw ParseError(lineno, "feature file has no data rows");
  for (std::size_t i = 0; i < num_nodes; ++i)
    if (!seen[i]) throw ParseError(lineno, "missing features for node " + std::to_string(i));
  return features;
}

// Split CSV `node,role` with role in {train, val, test}.
inline Split read_split_csv(const std::string& path, std::size_t num_nodes) {
  auto in = io_detail::open_input(path);
  Split split;
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    io_detail::strip_cr(line);
    if (io_detail::skippable(line)) continue;
    if (!seen_data && io_detail::looks_like_header(line)) continue;
    seen_data = true;
    const auto fields = io_detail::split_csv(line);
    if (fields.size() != 2) throw ParseError(lineno, "expected node,role");
    const auto node = io_detail::parse_int(fields[0]);
    if (!node || *node < 0 || static_cast<std::size_t>(*node) >= num_nodes)
      throw ParseError(lineno, "node id out of range");
    const NodeId id = static_cast<NodeId>(*node);
    if (fields[1] == "train") split.train.push_back(id);
    else if (fields[1] == "val") split.val.push_back(id);
    else if (fields[1] == "test") split.test.push_back(id);
    else throw ParseError(lineno, "role must be train, val, or test");
  }
  return split;
}

inline void write_edge_list(const std::string& path, const Graph& g,
                            const std::string& provenance) {
  auto out = io_detail::open_output(path);
  out << "# " << provenance << "\n";
  for (NodeId i = 0; i < g.num_nodes; ++i)
    for (NodeId j : g.neighbors(i))
      if (i < j) out << i << " " << j << "\n";
}

inline void write_labels_csv(const std::string& path, const std::vector<int>& labels,
                             const std::string& provenance) {
  auto out = io_detail::open_output(path);
  out << "# " << provenance << "\n";
  out << "node,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) out << i << "," << labels[i] << "\n";
}

inline void write_features_csv(const std::string& path, const Matrix& features,
                               const std::string& provenance) {
  auto out = io_detail::open_output(path);
  out << "# " << provenance << "\n";
  out << "node";
  for (std::size_t d = 0; d < features.cols; ++d) out << ",f" << d;
  out << "\n";
  for (std::size_t i = 0; i < features.rows; ++i) {
    out << i;
    for (std::size_t d = 0; d < features.cols; ++d)
      out << "," << io_detail::format_double(features(i, d));
    out << "\n";
  }
}

inline void write_split_csv(const std::string& path, const Split& split,
                            const std::string& provenance) {
  auto out = io_detail::open_output(path);
  out << "# " << provenance << "\n";
  out << "node,role\n";
  for (NodeId i : split.train) out << i << ",train\n";
  for (NodeId i : split.val) out << i << ",val\n";
  for (NodeId i : split.test) out << i << ",test\n";
}

// Soft labels: header node,p0,...,p{K-1},provenance; probabilities carry 17
// significant digits.
inline void write_soft_labels_csv(const std::string& path, const SoftLabels& soft,
                                  const std::string& provenance) {
  auto out = io_detail::open_output(path);
  out << "# " << provenance << "\n";
  out << "node";
  for (std::size_t c = 0; c < soft.probs.cols; ++c) out << ",p" << c;
  out << ",provenance\n";
  for (std::size_t i = 0; i < soft.probs.rows; ++i) {
    out << i;
    for (std::size_t c = 0; c < soft.probs.cols; ++c)
      out << "," << io_detail::format_double(soft.probs(i, c));
    out << "," << to_string(soft.provenance[i]) << "\n";
  }
}

inline void write_history_csv(const std::string& path, const History& history,
                              const std::string& provenance) {
  auto out = io_detail::open_output(path);
  out << "# " << provenance << "\n";
  out << "epoch,train_loss,val_loss,test_loss,train_acc,val_acc,test_acc\n";
  for (const auto& rec : history) {
    out << rec.epoch << "," << io_detail::format_double(rec.train_loss) << ","
        << io_detail::format_double(rec.val_loss) << ","
        << io_detail::format_double(rec.test_loss) << ","
        << io_detail::format_double(rec.train_acc) << ","
        << io_detail::format_double(rec.val_acc) << ","
        << io_detail::format_double(rec.test_acc) << "\n";
  }
}

// Reads a soft-label CSV back into memory (used by tests and downstream
// tooling; skips the provenance column).
inline Matrix read_soft_labels_csv(const std::string& path, std::size_t num_nodes) {
  auto in = io_detail::open_input(path);
  Matrix probs;
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    io_detail::strip_cr(line);
    if (io_detail::skippable(line)) continue;
    if (!seen_data && io_detail::looks_like_header(line)) continue;
    const auto fields = io_detail::split_csv(line);
    if (fields.size() < 3) throw ParseError(lineno, "expected node,p0,...,provenance");
    if (!seen_data) {
      probs = Matrix(num_nodes, fields.size() - 2);
      seen_data = true;
    }
    const auto node = io_detail::parse_int(fields[0]);
    if (!node || *node < 0 || static_cast<std::size_t>(*node) >= num_nodes)
      throw ParseError(lineno, "node id out of range");
    for (std::size_t c = 0; c + 2 < fields.size(); ++c) {
      const auto value = io_detail::parse_double(fields[c + 1]);
      if (!value) throw ParseError(lineno, "bad probability");
      probs(*node, c) = *value;
    }
  }
  if (!seen_data) throw ParseError(lineno, "soft label file has no data rows");
  return probs;
}

}  // namespace postel
