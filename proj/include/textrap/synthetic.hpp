#pragma once

#include "textrap/tensor.hpp"

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace textrap {

using Rng = std::mt19937_64;

/// Entries drawn from N(0, 1).
[[nodiscard]] Tensor3 random_tensor(Dims dims, Rng& rng);

/// Orthogonal n x n x n3 tensor built from a random unitary matrix per face.
[[nodiscard]] Tensor3 random_orthogonal(std::size_t n, std::size_t n3, Rng& rng);

/// u * s * v^T with random orthogonal u, v and s carrying `sigma` on the
/// diagonal of its first frontal slice, so every DFT face has singular values
/// sigma (sorted descending; at most min(n1, n2) of them).
[[nodiscard]] Tensor3 tensor_with_singular_values(Dims dims, const std::vector<double>& sigma, Rng& rng);

enum class DecayProfile { geometric, algebraic };

/// gaussian: X_true has N(0, 1) entries. source: X_true = A^T * W for a
/// Gaussian W, so its components along the singular tubes decay with them.
enum class SolutionKind { gaussian, source };

[[nodiscard]] std::optional<DecayProfile> parse_profile(std::string_view name);
[[nodiscard]] std::string_view profile_name(DecayProfile p);

[[nodiscard]] std::optional<SolutionKind> parse_solution_kind(std::string_view name);
[[nodiscard]] std::string_view solution_kind_name(SolutionKind k);

/// geometric: 10^(-j * rate); algebraic: j^(-rate); j = 1..count.
[[nodiscard]] std::vector<double> decay_values(DecayProfile profile, double rate, std::size_t count);

struct IllPosedConfig {
  Dims dims{16, 16, 3};
  /// Lateral slices of the unknown and of the right-hand side.
  std::size_t rhs_cols = 1;
  DecayProfile profile = DecayProfile::geometric;
  double rate = 1.0;
  /// ||E|| / ||A * X_true||.
  double noise = 1e-3;
  SolutionKind solution = SolutionKind::gaussian;
};

struct IllPosedProblem {
  Tensor3 a;
  Tensor3 x_true;
  /// A * X_true.
  Tensor3 b_exact;
  /// b_exact + E.
  Tensor3 b;
};

[[nodiscard]] IllPosedProblem generate_ill_posed(const IllPosedConfig& config, Rng& rng);

/// S_{j+1} = M * S_j + C whose error S_j - X* lives in a k*n2 dimensional
/// invariant subspace of M (per face), so width-k extrapolation is exact.
struct LinearSequenceProblem {
  Tensor3 m;
  Tensor3 c;
  Tensor3 fixed_point;
  Stack4 terms;
};

/// Requires n1 > k * n2. `contraction` bounds the spectral norm of every face of M.
[[nodiscard]] LinearSequenceProblem make_linear_sequence(Dims dims, std::size_t k, std::size_t term_count, Rng& rng,
                                                         double contraction = 0.7);

/// S_{j+1} = M * S_j + C for a random M with face spectral norm `contraction`
/// (no finite-termination structure).
[[nodiscard]] LinearSequenceProblem make_generic_linear_sequence(Dims dims, std::size_t term_count, Rng& rng,
                                                                 double contraction = 0.8);

}  // namespace textrap
