#pragma once

#include "textrap/synthetic.hpp"
#include "textrap/tensor.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

namespace textrap::testing {

inline Tensor3 rand3(std::size_t n1, std::size_t n2, std::size_t n3, Rng& rng) {
  return random_tensor(Dims{n1, n2, n3}, rng);
}

inline Stack4 rand_stack(std::size_t count, Dims d, Rng& rng) {
  Stack4 s;
  for (std::size_t i = 0; i < count; ++i) s.push_back(random_tensor(d, rng));
  return s;
}

inline Stack5 rand_grid(std::size_t rows, std::size_t cols, Dims d, Rng& rng) {
  std::vector<Tensor3> blocks;
  for (std::size_t i = 0; i < rows * cols; ++i) blocks.push_back(random_tensor(d, rng));
  return Stack5(rows, cols, std::move(blocks));
}

/// Sum of the entries of every slice difference, squared; zero iff equal.
inline double stack_distance(const Stack4& a, const Stack4& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.count(); ++i) acc += std::pow(frobenius_norm(a[i] - b[i]), 2);
  return std::sqrt(acc);
}

inline double stack_norm(const Stack4& a) {
  double acc = 0.0;
  for (const auto& t : a) acc += std::pow(frobenius_norm(t), 2);
  return std::sqrt(acc);
}

/// Column vector of all entries in storage order.
inline Eigen::VectorXd vec(const Tensor3& t) {
  return Eigen::Map<const Eigen::VectorXd>(t.data().data(), static_cast<Eigen::Index>(t.size()));
}

}  // namespace textrap::testing
