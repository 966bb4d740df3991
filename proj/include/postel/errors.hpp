#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace postel {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidNode : Error {
  std::size_t node;
  explicit InvalidNode(std::size_t n)
      : Error("node id out of range: " + std::to_string(n)), node(n) {}
};

struct NoLabeledNodes : Error {
  NoLabeledNodes() : Error("no node matches the requested label sources") {}
};

struct InsufficientPairs : Error {
  InsufficientPairs() : Error("no labeled node has two labeled neighbors") {}
};

struct DegenerateHomophily : Error {
  DegenerateHomophily() : Error("class homophily must lie strictly inside (0, 1)") {}
};

struct DegreeTooLarge : Error {
  std::size_t degree;
  explicit DegreeTooLarge(std::size_t d)
      : Error("degree too large for direct-product posterior: " + std::to_string(d)),
        degree(d) {}
};

struct EmptyMask : Error {
  EmptyMask() : Error("node mask is empty") {}
};

struct NonFiniteLoss : Error {
  std::size_t epoch;
  explicit NonFiniteLoss(std::size_t e)
      : Error("training loss became non-finite at epoch " + std::to_string(e)), epoch(e) {}
};

struct InfeasibleSpec : Error {
  using Error::Error;
};

struct ShapeMismatch : Error {
  using Error::Error;
};

struct ConditionNotHomophilic : Error {
  ConditionNotHomophilic() : Error("requires c_k > 1 - c_{1-k} for both classes") {}
};

struct ConditionNotHeterophilic : Error {
  ConditionNotHeterophilic() : Error("requires c_k < 1 - c_{1-k} for both classes") {}
};

struct ConditionOutOfRange : Error {
  ConditionOutOfRange() : Error("requires 0 < c_k < 0.5 for both classes") {}
};

struct ParseError : Error {
  std::size_t line;
  ParseError(std::size_t ln, const std::string& what)
      : Error("line " + std::to_string(ln) + ": " + what), line(ln) {}
};

}  // namespace postel
