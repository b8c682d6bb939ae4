#pragma once

#include "textrap/tensor.hpp"
#include "textrap/tsvd.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace textrap {

/// The truncated-TSVD sequence S_k = pinv(A_k) * B = sum_{j<=k} v_j * delta_j
/// together with the quantities the closed-form TRRE coefficients need.
/// B may have any number s of lateral slices; delta_j is 1 x s x n3 and
/// Theta_j = delta_j^T * delta_j is s x s x n3.
struct TtsvdSequenceState {
  TsvdFactors factors;
  /// Indices (0-based) of the singular triplets kept after the drop rule.
  std::vector<std::size_t> members;
  /// delta_j for each kept member.
  std::vector<Tensor3> deltas;
  std::vector<Tensor3> thetas;
  /// v_j * delta_j = S_j - S_{j-1} for each kept member.
  Stack4 differences;
  /// S_0 = 0, S_1, ..., S_m.
  Stack4 partial_sums;

  [[nodiscard]] std::size_t size() const noexcept { return deltas.size(); }
};

/// Members whose delta has norm at most this fraction of the largest delta
/// norm are dropped and the sequence is reindexed.
inline constexpr double delta_drop_tolerance = 1e-14;

/// Builds the sequence from one full TSVD of `a`. With k_max unset all
/// min(n1, n2) singular triplets are considered.
[[nodiscard]] TtsvdSequenceState build_sequence(const Tensor3& a, const Tensor3& b,
                                                std::optional<std::size_t> k_max = std::nullopt);

struct BetaResult {
  Stack4 beta;
  /// Number of Theta_{i+1} that had to be shifted by epsilon * I.
  std::size_t shifted = 0;
};

/// beta_i = Theta_{i+1}^{-1} * Theta_{k+1} for 0 <= i < k, using thetas[0..k].
/// A Theta that is not invertible is replaced by Theta + shift * I when a
/// shift is given; otherwise SingularFaceError is thrown.
[[nodiscard]] BetaResult closed_form_beta(const std::vector<Tensor3>& thetas, std::size_t k,
                                          std::optional<double> shift = 1e-10);

struct TrreStep {
  std::size_t k = 0;
  Tensor3 t_k;
  Stack4 beta;
  /// gamma_0..gamma_k.
  Stack4 gamma;
  /// alpha_0..alpha_{k-1}.
  Stack4 alpha;
  std::size_t shifted = 0;
};

/// T_k = sum_j (S_{j+1} - S_j) * alpha_j with the closed-form coefficients.
/// Needs k + 1 members in `state`.
[[nodiscard]] TrreStep trre_tsvd_step(const TtsvdSequenceState& state, std::size_t k,
                                      std::optional<double> shift = 1e-10);

/// sqrt(trace of the first frontal slice of Theta_k * gamma_{k-1}).
/// Negative traces down to -1e-10 are clamped to zero; anything lower raises
/// ConsistencyError.
[[nodiscard]] double residual_norm(const std::vector<Tensor3>& thetas, const Stack4& gamma, std::size_t k);

/// ||sum_j (S_{j+1} - S_j) * gamma_j|| evaluated directly.
[[nodiscard]] double direct_residual_norm(const TtsvdSequenceState& state, const Stack4& gamma);

/// ||T_{k+1} - T_k|| / ||T_k|| from the Theta identities, where alpha_k and
/// alpha_k1 are the coefficient stacks of T_k (k slices) and T_{k+1} (k + 1
/// slices). Throws Error when T_k has zero norm.
[[nodiscard]] double eta_ratio(const TtsvdSequenceState& state, const Stack4& alpha_k, const Stack4& alpha_k1);

enum class StopReason { tolerance, k_max, sequence_exhausted };

[[nodiscard]] std::string_view stop_reason_name(StopReason r);

struct SolverIteration {
  std::size_t k = 0;
  double residual_norm = 0.0;
  /// ||T_k - T_{k-1}|| / ||T_{k-1}||; absent for k = 1.
  std::optional<double> eta;
  double solution_norm = 0.0;
  /// Theta tensors shifted while computing this step.
  std::size_t shifted = 0;
  Tensor3 t_k;
};

struct SolverReport {
  /// One entry per k, starting with the k = 1 diagnostics (T_1 = S_1).
  std::vector<SolverIteration> history;
  Tensor3 solution;
  std::size_t final_k = 0;
  StopReason stop_reason = StopReason::k_max;
  std::size_t sequence_length = 0;

  [[nodiscard]] std::size_t iterations() const noexcept { return history.size(); }
};

struct SolverOptions {
  double tol = 1e-6;
  std::optional<std::size_t> k_max;
  std::optional<double> shift = 1e-10;
};

/// TRRE applied to the truncated-TSVD sequence of a * x = b. Iterates
/// k = 2, 3, ... and continues while min(||R(T_k)||, eta_k) >= tol.
[[nodiscard]] SolverReport solve(const Tensor3& a, const Tensor3& b, const SolverOptions& options = {});

}  // namespace textrap
