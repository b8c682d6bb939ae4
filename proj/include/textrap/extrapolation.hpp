#pragma once

#include "textrap/tensor.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace textrap {

/// Terms S_0, S_1, ... of a tensor sequence, all of one shape.
using TensorSequence = Stack4;

enum class Method { tmpe, trre, tmmpe };

[[nodiscard]] std::string_view method_name(Method m);
/// Accepts "tmpe", "trre" and "tmmpe" in any case.
[[nodiscard]] std::optional<Method> parse_method(std::string_view name);

struct DifferenceStacks {
  /// Delta S_{n+j} for j = 0..k.
  Stack4 delta;
  /// Delta^2 S_{n+j} for j = 0..k-1.
  Stack4 delta2;
};

/// Needs at least n + k + 2 terms.
[[nodiscard]] DifferenceStacks difference_stacks(const TensorSequence& seq, std::size_t n, std::size_t k);

/// Test stack Y_1..Y_k. TMPE uses Delta S_{n+i-1}, TRRE Delta^2 S_{n+i-1} and
/// TMMPE the supplied custom_y, which must then have k slices of the
/// sequence shape.
[[nodiscard]] Stack4 build_y_stack(Method method, const TensorSequence& seq, std::size_t n, std::size_t k,
                                   const std::optional<Stack4>& custom_y = std::nullopt);

/// Deterministic TMMPE test stack: Y_i has a single nonzero frontal slice
/// (the first) with ones at rows ((i - 1) * n2 + c) mod n1 of columns c.
[[nodiscard]] Stack4 default_tmmpe_y(Dims dims, std::size_t k);

/// Solves (l diamond v) star beta = -(l diamond rhs) for beta_0..beta_{k-1}.
[[nodiscard]] Stack4 solve_beta_system(const Stack4& l, const Stack4& v, const Tensor3& rhs);

/// gamma_i = beta_i * (sum beta)^{-1} with beta_k = I appended, so the result
/// has one slice more than `beta`. With `regularize`, a singular sum is
/// shifted by 1e-10 times its largest face singular value (1e-10 itself for
/// a zero sum) before inversion; otherwise SingularFaceError propagates.
[[nodiscard]] Stack4 beta_to_gamma(const Stack4& beta, bool regularize = false);

/// alpha_0 = I - gamma_0, alpha_j = alpha_{j-1} - gamma_j for j < k. Throws
/// ConsistencyError when alpha_{k-1} differs from gamma_k by more than 1e-8
/// (relative to the largest gamma).
[[nodiscard]] Stack4 gamma_to_alpha(const Stack4& gamma);

struct ExtrapolationResult {
  Tensor3 t_k;
  /// gamma_0..gamma_k.
  Stack4 gamma;
  /// beta_0..beta_{k-1}.
  Stack4 beta;
  /// alpha_0..alpha_{k-1}.
  Stack4 alpha;
  /// Generalized residual R(T_k) = sum_j Delta S_{n+j} * gamma_j.
  Tensor3 residual;
  /// Width actually used; smaller than requested when Delta S_{n+j} vanished.
  std::size_t k = 0;
  bool degenerate = false;
};

struct ExtrapolationOptions {
  bool regularize_gamma = false;
};

/// T_k = S_n + sum_j Delta S_{n+j} * alpha_j, with the coefficients fixed by
/// the orthogonality of the generalized residual to the test stack.
/// If some Delta S_{n+j} with j < k is zero the sequence has converged there,
/// the width drops to j and the result is flagged degenerate. A zero member
/// of the test stack raises DegenerateSequenceError.
[[nodiscard]] ExtrapolationResult extrapolate(const TensorSequence& seq, std::size_t n, std::size_t k, Method method,
                                              const std::optional<Stack4>& custom_y = std::nullopt,
                                              ExtrapolationOptions options = {});

struct TteaResult {
  Tensor3 e_k;
  /// beta_1..beta_k.
  Stack4 beta;
};

/// Topological transformation E_k = S_n + sum_i Delta S_{n+i-1} * beta_i.
/// Needs 2k + 1 terms from index n; y has the sequence shape.
[[nodiscard]] TteaResult ttea_extrapolate(const TensorSequence& seq, std::size_t n, std::size_t k, const Tensor3& y);

}  // namespace textrap
