#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace postel {

// Dense row-major matrix of doubles. A small shared container, not a general
// linear algebra type; the trainer keeps its own kernels.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool operator==(const Matrix&) const = default;
};

// Index of the largest entry; ties break toward the lowest index.
inline std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

inline double row_sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// True when entries are non-negative and sum to 1 within tol.
inline bool is_probability_vector(std::span<const double> v, double tol = 1e-10) {
  for (double x : v)
    if (!(x >= 0.0) || !std::isfinite(x)) return false;
  return std::abs(row_sum(v) - 1.0) <= tol;
}

inline Matrix outer_product(std::span<const double> a, std::span<const double> b) {
  Matrix m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
  return m;
}

}  // namespace postel
