#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace textrap {

struct VerifyConfig {
  std::uint64_t seed = 20240611;
  /// Plants a sign defect in the block-circulant oracle; the tprod suite
  /// must then fail.
  bool mutate_bcirc_sign = false;
};

struct SuiteResult {
  std::string name;
  std::string description;
  bool passed = false;
  std::size_t cases = 0;
  /// Worst observed value of the suite's primary metric.
  double worst = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  /// Wall-clock budget in seconds; 0 means unlimited.
  double time_limit = 0.0;
  /// First failure or a short summary of secondary metrics.
  std::string detail;
};

/// Suite names in their canonical order: tprod, tsvd, penrose, lsq,
/// truncation, classical, finite_termination, trre, illposed, stack.
[[nodiscard]] const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown name.
[[nodiscard]] SuiteResult run_suite(std::string_view name, const VerifyConfig& config = {});

}  // namespace textrap
