#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace textrap {

struct Dims {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t n3 = 0;

  [[nodiscard]] std::size_t size() const noexcept { return n1 * n2 * n3; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

[[nodiscard]] std::string to_string(const Dims& d);

/// Dense real third-order tensor.
///
/// Entries are stored frontal slice after frontal slice, each slice
/// column-major: entry (i, j, k) lives at i + n1 * (j + n2 * k). This is also
/// the payload order of the TNS3 file format.
class Tensor3 {
 public:
  using SliceMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstSliceMap = Eigen::Map<const Eigen::MatrixXd>;

  Tensor3() = default;
  Tensor3(std::size_t n1, std::size_t n2, std::size_t n3);
  explicit Tensor3(Dims dims);
  Tensor3(Dims dims, std::vector<double> data);

  /// n x n x n3 tensor whose first frontal slice is I and the rest zero.
  static Tensor3 identity(std::size_t n, std::size_t n3);
  /// 1 x 1 x n3 tubal scalar with the given tube.
  static Tensor3 tubal(std::span<const double> tube);
  static Tensor3 tubal(std::initializer_list<double> tube);
  /// The multiplicative identity tubal scalar e of length n3.
  static Tensor3 unit_tubal(std::size_t n3);
  /// Builds a tensor from n3 equally sized frontal slices.
  static Tensor3 from_slices(std::span<const Eigen::MatrixXd> slices);

  [[nodiscard]] Dims dims() const noexcept { return dims_; }
  [[nodiscard]] std::size_t n1() const noexcept { return dims_.n1; }
  [[nodiscard]] std::size_t n2() const noexcept { return dims_.n2; }
  [[nodiscard]] std::size_t n3() const noexcept { return dims_.n3; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[i + dims_.n1 * (j + dims_.n2 * k)];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[i + dims_.n1 * (j + dims_.n2 * k)];
  }

  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
  [[nodiscard]] std::span<double> data() noexcept { return data_; }

  [[nodiscard]] ConstSliceMap slice(std::size_t k) const;
  [[nodiscard]] SliceMap slice(std::size_t k);

  /// Lateral slice T(:, j, :) as an n1 x 1 x n3 tensor.
  [[nodiscard]] Tensor3 lateral(std::size_t j) const;
  void set_lateral(std::size_t j, const Tensor3& column);
  /// Horizontal slice T(i, :, :) as a 1 x n2 x n3 tensor.
  [[nodiscard]] Tensor3 horizontal(std::size_t i) const;
  /// Tube T(i, j, :) as a tubal scalar.
  [[nodiscard]] Tensor3 tube(std::size_t i, std::size_t j) const;
  /// First `count` lateral slices, an n1 x count x n3 tensor.
  [[nodiscard]] Tensor3 leading_laterals(std::size_t count) const;

  [[nodiscard]] bool is_zero() const noexcept;

  Tensor3& operator+=(const Tensor3& rhs);
  Tensor3& operator-=(const Tensor3& rhs);
  Tensor3& operator*=(double s) noexcept;

  friend Tensor3 operator+(Tensor3 lhs, const Tensor3& rhs) { return lhs += rhs; }
  friend Tensor3 operator-(Tensor3 lhs, const Tensor3& rhs) { return lhs -= rhs; }
  friend Tensor3 operator*(double s, Tensor3 t) { return t *= s; }
  friend Tensor3 operator*(Tensor3 t, double s) { return t *= s; }
  friend Tensor3 operator-(Tensor3 t) { return t *= -1.0; }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  Dims dims_;
  std::vector<double> data_;
};

/// Square root of the sum of squared entries.
[[nodiscard]] double frobenius_norm(const Tensor3& t);
/// Largest absolute entrywise difference; dims must agree.
[[nodiscard]] double max_abs_diff(const Tensor3& a, const Tensor3& b);
/// ||a - b|| / max(||b||, floor).
[[nodiscard]] double relative_error(const Tensor3& a, const Tensor3& b, double floor = 1e-300);

/// Ordered list of equally shaped third-order tensors (a 4-mode tensor whose
/// frontal slices are the members).
class Stack4 {
 public:
  Stack4() = default;
  explicit Stack4(std::vector<Tensor3> slices);

  /// `count` copies of the n x n x n3 identity tensor.
  static Stack4 identities(std::size_t count, std::size_t n, std::size_t n3);
  static Stack4 zeros(std::size_t count, Dims slice_dims);

  [[nodiscard]] std::size_t count() const noexcept { return slices_.size(); }
  [[nodiscard]] bool empty() const noexcept { return slices_.empty(); }
  [[nodiscard]] Dims slice_dims() const noexcept { return slice_dims_; }

  const Tensor3& operator[](std::size_t i) const { return slices_[i]; }
  [[nodiscard]] const Tensor3& at(std::size_t i) const;
  [[nodiscard]] std::span<const Tensor3> slices() const noexcept { return slices_; }

  void push_back(Tensor3 t);
  void set(std::size_t i, Tensor3 t);

  /// Index of the first slice with norm <= tol, or count() if none.
  [[nodiscard]] std::size_t first_zero_slice(double tol = 0.0) const;

  [[nodiscard]] auto begin() const noexcept { return slices_.begin(); }
  [[nodiscard]] auto end() const noexcept { return slices_.end(); }

  friend Stack4 operator+(const Stack4& a, const Stack4& b);
  friend Stack4 operator-(const Stack4& a, const Stack4& b);

 private:
  Dims slice_dims_;
  std::vector<Tensor3> slices_;
};

[[nodiscard]] double max_slice_distance(const Stack4& a, const Stack4& b);

/// rows x cols grid of equally shaped third-order tensors (a 5-mode tensor).
/// Block (j, i) is the slice with 4th-mode index j and 5th-mode index i.
class Stack5 {
 public:
  Stack5() = default;
  /// Blocks are given row-major.
  Stack5(std::size_t rows, std::size_t cols, std::vector<Tensor3> blocks);

  static Stack5 filled(std::size_t rows, std::size_t cols, const Tensor3& block);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] Dims block_dims() const noexcept { return block_dims_; }

  const Tensor3& operator()(std::size_t r, std::size_t c) const { return blocks_[r * cols_ + c]; }
  [[nodiscard]] const Tensor3& at(std::size_t r, std::size_t c) const;
  void set(std::size_t r, std::size_t c, Tensor3 block);

  friend Stack5 operator+(const Stack5& a, const Stack5& b);
  friend Stack5 operator-(const Stack5& a, const Stack5& b);
  friend bool operator==(const Stack5&, const Stack5&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Dims block_dims_;
  std::vector<Tensor3> blocks_;
};

[[nodiscard]] double max_block_distance(const Stack5& a, const Stack5& b);

}  // namespace textrap
