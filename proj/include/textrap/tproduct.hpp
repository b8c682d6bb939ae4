#pragma once

#include "textrap/tensor.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace textrap {

/// T-product x * y for x of shape n1 x n2 x n3 and y of shape n2 x m2 x n3,
/// computed face by face in the DFT domain.
[[nodiscard]] Tensor3 tprod(const Tensor3& x, const Tensor3& y);

/// Tensor transpose: every frontal slice transposed, slices 1..n3-1 reversed.
[[nodiscard]] Tensor3 ttranspose(const Tensor3& x);

/// T-product inverse of a square tensor. Throws SingularFaceError naming the
/// first face whose sigma_min, divided by the largest sigma_max over all
/// faces, falls below `threshold` (the default context threshold when
/// omitted).
[[nodiscard]] Tensor3 tinverse(const Tensor3& a, std::optional<double> threshold = std::nullopt);

struct InvertibilityReport {
  bool invertible = false;
  /// min over faces of sigma_min divided by max over faces of sigma_max.
  double rcond = 0.0;
  /// sigma_min / sigma_max of each of the n3 faces (0 for a zero face).
  std::vector<double> face_rcond;
};

[[nodiscard]] InvertibilityReport is_invertible(const Tensor3& a, std::optional<double> threshold = std::nullopt);

/// <x, y> = x^T * y for lateral slices x, y of shape n1 x 1 x n3.
[[nodiscard]] Tensor3 tscalar_product(const Tensor3& x, const Tensor3& y);

/// True when both q^T * q and q * q^T lie within `tol` (Frobenius) of I.
[[nodiscard]] bool is_orthogonal(const Tensor3& q, double tol);
/// max(||q^T * q - I||, ||q * q^T - I||).
[[nodiscard]] double orthogonality_residual(const Tensor3& q);
/// ||q^T * q - I|| only, for tensors with orthonormal lateral slices.
[[nodiscard]] double column_orthogonality_residual(const Tensor3& q);

enum class PdMode { face_test, sample_test };

struct PdReport {
  bool positive_definite = false;
  bool positive_semidefinite = false;
  /// face test: smallest eigenvalue over all Hermitian face parts.
  /// sample test: smallest sampled (X^T * A * X)(0, 0, 0) over unit-norm X.
  double min_value = 0.0;
  /// sample test only: the sample achieving min_value.
  std::optional<Tensor3> witness;
};

inline constexpr double pd_relative_tolerance = 1e-13;

/// Decides definiteness from the Hermitian parts (A_f + A_f^H)/2 of all DFT
/// faces. Strict means lambda_min > pd_relative_tolerance * max|lambda|,
/// semi-definite means lambda_min >= -pd_relative_tolerance * max|lambda|.
[[nodiscard]] PdReport positive_definite_face_test(const Tensor3& a);

/// Evaluates the first frontal entry of X^T * A * X on `samples` random
/// Gaussian X of shape m x 1 x n3, normalized to unit norm.
[[nodiscard]] PdReport positive_definite_sample_test(const Tensor3& a, std::size_t samples, std::uint64_t seed);

/// Strict definiteness decided by `mode`.
[[nodiscard]] bool is_positive_definite(const Tensor3& a, PdMode mode = PdMode::face_test,
                                        std::size_t samples = 1000, std::uint64_t seed = 0);

struct MoorePenroseReport {
  /// ||AXA - A||, ||XAX - X||, ||(AX)^T - AX||, ||(XA)^T - XA||.
  std::array<double, 4> residuals{};
  bool pass = false;
};

[[nodiscard]] MoorePenroseReport check_moore_penrose(const Tensor3& a, const Tensor3& x, double tol);

/// Tube (i, j) of a^T * b, computed as a(:, i, :)^T * b(:, j, :).
[[nodiscard]] Tensor3 slice_product_entry(const Tensor3& a, const Tensor3& b, std::size_t i, std::size_t j);

}  // namespace textrap
