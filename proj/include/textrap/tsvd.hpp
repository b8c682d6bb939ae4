#pragma once

#include "textrap/tensor.hpp"

#include <cstddef>
#include <vector>

namespace textrap {

/// A = u * s * v^T. In the full decomposition u is n1 x n1, s is n1 x n2 and
/// v is n2 x n2; a truncation to k keeps u n1 x k, s k x k and v n2 x k.
struct TsvdFactors {
  Tensor3 u;
  Tensor3 s;
  Tensor3 v;
  /// Number of singular tubes kept (min(n1, n2) when not truncated).
  std::size_t rank = 0;
  /// For each of the n3 faces, all min(n1, n2) singular values in descending
  /// order, independent of truncation.
  std::vector<std::vector<double>> face_singular_values;
};

struct TruncatedTsvd {
  TsvdFactors factors;
  /// v * pinv(s) * u^T, an n2 x n1 x n3 tensor.
  Tensor3 mp_inverse;
};

/// Relative threshold below which face singular values count as zero when
/// pseudo-inverting.
inline constexpr double pinv_relative_threshold = 1e-13;

[[nodiscard]] TsvdFactors tsvd(const Tensor3& a);
/// Keeps the leading k singular triplets of every face, 1 <= k <= min(n1, n2).
[[nodiscard]] TruncatedTsvd ttsvd(const Tensor3& a, std::size_t k);

[[nodiscard]] Tensor3 reconstruct(const TsvdFactors& f);

struct SingularTriplet {
  /// u(:, j, :), n1 x 1 x n3.
  Tensor3 u;
  /// s(j, j, :), a tubal scalar.
  Tensor3 d;
  /// v(:, j, :), n2 x 1 x n3.
  Tensor3 v;
};

/// The rank terms u_j * d_j * v_j^T whose sum is u * s * v^T.
[[nodiscard]] std::vector<SingularTriplet> truncated_expansion(const TsvdFactors& f);

/// Moore-Penrose inverse, n2 x n1 x n3.
[[nodiscard]] Tensor3 pseudo_inverse(const Tensor3& a);

/// Minimum-norm least-squares solution pinv(a) * b of a * x = b.
[[nodiscard]] Tensor3 tls_solve(const Tensor3& a, const Tensor3& b);

/// Number of j with max_f sigma_j(f) > tol * max_f sigma_1(f).
[[nodiscard]] std::size_t tubal_rank(const Tensor3& a, double tol = 1e-12);

/// Pseudo-inverse of a tubal scalar: each face value inverted unless it is
/// below pinv_relative_threshold times the largest face magnitude.
[[nodiscard]] Tensor3 tubal_pinv(const Tensor3& d);

}  // namespace textrap
