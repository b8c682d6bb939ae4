#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace textrap {

/// Batched real DFT of `batch` interleaved tubes of length n3. Element p of
/// tube k sits at offset p + batch * k on both the real and complex side, so
/// the complex output is already laid out as n3/2 + 1 column-major faces.
class DftPlan {
 public:
  DftPlan(std::size_t n3, std::size_t batch);
  ~DftPlan();
  DftPlan(const DftPlan&) = delete;
  DftPlan& operator=(const DftPlan&) = delete;

  [[nodiscard]] std::size_t n3() const noexcept { return n3_; }
  [[nodiscard]] std::size_t batch() const noexcept { return batch_; }

  /// `in` holds batch * n3 reals, `out` batch * (n3/2 + 1) complex values.
  void forward(const double* in, std::complex<double>* out) const;
  /// Unnormalized inverse; `in` is left untouched.
  void backward(const std::complex<double>* in, double* out) const;

 private:
  std::size_t n3_;
  std::size_t batch_;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

/// Shared configuration and DFT plan cache for T-product computations.
/// Safe to use from several threads at once.
class TProductContext {
 public:
  static constexpr std::size_t default_oracle_cap = 4096;
  static constexpr double default_invertibility_threshold = 1e-12;

  TProductContext();

  /// Largest n1*n3 (and n2*n3) for which bcirc-style oracles may be built.
  [[nodiscard]] std::size_t oracle_cap() const noexcept;
  void set_oracle_cap(std::size_t cap) noexcept;

  [[nodiscard]] double invertibility_threshold() const noexcept;
  void set_invertibility_threshold(double threshold) noexcept;

  [[nodiscard]] std::shared_ptr<const DftPlan> plan(std::size_t n3, std::size_t batch);
  [[nodiscard]] std::size_t cached_plan_count() const;
  void clear_plan_cache();

 private:
  mutable std::mutex mutex_;
  std::size_t oracle_cap_;
  double invertibility_threshold_ = default_invertibility_threshold;
  std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const DftPlan>> plans_;
};

/// Process-wide context. Its oracle cap starts from TEXTRAP_ORACLE_CAP when set.
[[nodiscard]] TProductContext& default_context();

}  // namespace textrap
