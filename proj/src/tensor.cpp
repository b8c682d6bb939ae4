#include "textrap/tensor.hpp"

#include "textrap/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace textrap {

std::string to_string(const Dims& d) {
  std::ostringstream os;
  os << d.n1 << "x" << d.n2 << "x" << d.n3;
  return os.str();
}

namespace {

void require_same_dims(const Dims& a, const Dims& b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": " + to_string(a) + " vs " + to_string(b));
  }
}

}  // namespace

Tensor3::Tensor3(std::size_t n1, std::size_t n2, std::size_t n3) : Tensor3(Dims{n1, n2, n3}) {}

Tensor3::Tensor3(Dims dims) : dims_(dims), data_(dims.size(), 0.0) {}

Tensor3::Tensor3(Dims dims, std::vector<double> data) : dims_(dims), data_(std::move(data)) {
  if (data_.size() != dims_.size()) {
    throw DimensionError("tensor data length does not match dims " + to_string(dims_));
  }
}

Tensor3 Tensor3::identity(std::size_t n, std::size_t n3) {
  Tensor3 t(n, n, n3);
  for (std::size_t i = 0; i < n; ++i) t(i, i, 0) = 1.0;
  return t;
}

Tensor3 Tensor3::tubal(std::span<const double> tube) {
  return Tensor3(Dims{1, 1, tube.size()}, std::vector<double>(tube.begin(), tube.end()));
}

Tensor3 Tensor3::tubal(std::initializer_list<double> tube) {
  return tubal(std::span<const double>(tube.begin(), tube.size()));
}

Tensor3 Tensor3::unit_tubal(std::size_t n3) { return identity(1, n3); }

Tensor3 Tensor3::from_slices(std::span<const Eigen::MatrixXd> slices) {
  if (slices.empty()) throw DimensionError("from_slices needs at least one slice");
  const auto rows = static_cast<std::size_t>(slices[0].rows());
  const auto cols = static_cast<std::size_t>(slices[0].cols());
  Tensor3 t(rows, cols, slices.size());
  for (std::size_t k = 0; k < slices.size(); ++k) {
    if (static_cast<std::size_t>(slices[k].rows()) != rows ||
        static_cast<std::size_t>(slices[k].cols()) != cols) {
      throw DimensionError("from_slices: slices differ in shape");
    }
    t.slice(k) = slices[k];
  }
  return t;
}

Tensor3::ConstSliceMap Tensor3::slice(std::size_t k) const {
  if (k >= dims_.n3) throw DimensionError("frontal slice index out of range");
  return ConstSliceMap(data_.data() + k * dims_.n1 * dims_.n2, static_cast<Eigen::Index>(dims_.n1),
                       static_cast<Eigen::Index>(dims_.n2));
}

Tensor3::SliceMap Tensor3::slice(std::size_t k) {
  if (k >= dims_.n3) throw DimensionError("frontal slice index out of range");
  return SliceMap(data_.data() + k * dims_.n1 * dims_.n2, static_cast<Eigen::Index>(dims_.n1),
                  static_cast<Eigen::Index>(dims_.n2));
}

Tensor3 Tensor3::lateral(std::size_t j) const {
  if (j >= dims_.n2) throw DimensionError("lateral slice index out of range");
  Tensor3 out(dims_.n1, 1, dims_.n3);
  for (std::size_t k = 0; k < dims_.n3; ++k)
    for (std::size_t i = 0; i < dims_.n1; ++i) out(i, 0, k) = (*this)(i, j, k);
  return out;
}

void Tensor3::set_lateral(std::size_t j, const Tensor3& column) {
  if (j >= dims_.n2) throw DimensionError("lateral slice index out of range");
  require_same_dims(column.dims(), Dims{dims_.n1, 1, dims_.n3}, "set_lateral");
  for (std::size_t k = 0; k < dims_.n3; ++k)
    for (std::size_t i = 0; i < dims_.n1; ++i) (*this)(i, j, k) = column(i, 0, k);
}

Tensor3 Tensor3::horizontal(std::size_t i) const {
  if (i >= dims_.n1) throw DimensionError("horizontal slice index out of range");
  Tensor3 out(1, dims_.n2, dims_.n3);
  for (std::size_t k = 0; k < dims_.n3; ++k)
    for (std::size_t j = 0; j < dims_.n2; ++j) out(0, j, k) = (*this)(i, j, k);
  return out;
}

Tensor3 Tensor3::tube(std::size_t i, std::size_t j) const {
  if (i >= dims_.n1 || j >= dims_.n2) throw DimensionError("tube index out of range");
  Tensor3 out(1, 1, dims_.n3);
  for (std::size_t k = 0; k < dims_.n3; ++k) out(0, 0, k) = (*this)(i, j, k);
  return out;
}

Tensor3 Tensor3::leading_laterals(std::size_t count) const {
  if (count > dims_.n2) throw DimensionError("leading_laterals: count exceeds n2");
  Tensor3 out(dims_.n1, count, dims_.n3);
  for (std::size_t k = 0; k < dims_.n3; ++k) out.slice(k) = slice(k).leftCols(static_cast<Eigen::Index>(count));
  return out;
}

bool Tensor3::is_zero() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

Tensor3& Tensor3::operator+=(const Tensor3& rhs) {
  require_same_dims(dims_, rhs.dims_, "tensor addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& rhs) {
  require_same_dims(dims_, rhs.dims_, "tensor subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

Tensor3& Tensor3::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

double frobenius_norm(const Tensor3& t) {
  const auto d = t.data();
  return Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size())).norm();
}

double max_abs_diff(const Tensor3& a, const Tensor3& b) {
  require_same_dims(a.dims(), b.dims(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double relative_error(const Tensor3& a, const Tensor3& b, double floor) {
  return frobenius_norm(a - b) / std::max(frobenius_norm(b), floor);
}

Stack4::Stack4(std::vector<Tensor3> slices) : slices_(std::move(slices)) {
  if (!slices_.empty()) {
    slice_dims_ = slices_.front().dims();
    for (const auto& s : slices_) require_same_dims(s.dims(), slice_dims_, "Stack4 member");
  }
}

Stack4 Stack4::identities(std::size_t count, std::size_t n, std::size_t n3) {
  return Stack4(std::vector<Tensor3>(count, Tensor3::identity(n, n3)));
}

Stack4 Stack4::zeros(std::size_t count, Dims slice_dims) {
  Stack4 s(std::vector<Tensor3>(count, Tensor3(slice_dims)));
  s.slice_dims_ = slice_dims;
  return s;
}

const Tensor3& Stack4::at(std::size_t i) const {
  if (i >= slices_.size()) throw DimensionError("Stack4 index out of range");
  return slices_[i];
}

void Stack4::push_back(Tensor3 t) {
  if (slices_.empty()) {
    slice_dims_ = t.dims();
  } else {
    require_same_dims(t.dims(), slice_dims_, "Stack4 push_back");
  }
  slices_.push_back(std::move(t));
}

void Stack4::set(std::size_t i, Tensor3 t) {
  if (i >= slices_.size()) throw DimensionError("Stack4 index out of range");
  require_same_dims(t.dims(), slice_dims_, "Stack4 set");
  slices_[i] = std::move(t);
}

std::size_t Stack4::first_zero_slice(double tol) const {
  for (std::size_t i = 0; i < slices_.size(); ++i) {
    if (frobenius_norm(slices_[i]) <= tol) return i;
  }
  return slices_.size();
}

Stack4 operator+(const Stack4& a, const Stack4& b) {
  if (a.count() != b.count()) throw DimensionError("Stack4 addition: slice counts differ");
  std::vector<Tensor3> out;
  out.reserve(a.count());
  for (std::size_t i = 0; i < a.count(); ++i) out.push_back(a[i] + b[i]);
  return Stack4(std::move(out));
}

Stack4 operator-(const Stack4& a, const Stack4& b) {
  if (a.count() != b.count()) throw DimensionError("Stack4 subtraction: slice counts differ");
  std::vector<Tensor3> out;
  out.reserve(a.count());
  for (std::size_t i = 0; i < a.count(); ++i) out.push_back(a[i] - b[i]);
  return Stack4(std::move(out));
}

double max_slice_distance(const Stack4& a, const Stack4& b) {
  if (a.count() != b.count()) throw DimensionError("max_slice_distance: slice counts differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.count(); ++i) m = std::max(m, frobenius_norm(a[i] - b[i]));
  return m;
}

Stack5::Stack5(std::size_t rows, std::size_t cols, std::vector<Tensor3> blocks)
    : rows_(rows), cols_(cols), blocks_(std::move(blocks)) {
  if (blocks_.size() != rows_ * cols_) throw DimensionError("Stack5 grid is not fully populated");
  if (!blocks_.empty()) {
    block_dims_ = blocks_.front().dims();
    for (const auto& b : blocks_) require_same_dims(b.dims(), block_dims_, "Stack5 block");
  }
}

Stack5 Stack5::filled(std::size_t rows, std::size_t cols, const Tensor3& block) {
  return Stack5(rows, cols, std::vector<Tensor3>(rows * cols, block));
}

const Tensor3& Stack5::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) throw DimensionError("Stack5 index out of range");
  return blocks_[r * cols_ + c];
}

void Stack5::set(std::size_t r, std::size_t c, Tensor3 block) {
  if (r >= rows_ || c >= cols_) throw DimensionError("Stack5 index out of range");
  require_same_dims(block.dims(), block_dims_, "Stack5 set");
  blocks_[r * cols_ + c] = std::move(block);
}

namespace {

Stack5 combine(const Stack5& a, const Stack5& b, double sign) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("Stack5 grids differ in shape");
  std::vector<Tensor3> out;
  out.reserve(a.rows() * a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out.push_back(a(r, c) + sign * b(r, c));
  return Stack5(a.rows(), a.cols(), std::move(out));
}

}  // namespace

Stack5 operator+(const Stack5& a, const Stack5& b) { return combine(a, b, 1.0); }
Stack5 operator-(const Stack5& a, const Stack5& b) { return combine(a, b, -1.0); }

double max_block_distance(const Stack5& a, const Stack5& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("max_block_distance: grids differ");
  double m = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m = std::max(m, frobenius_norm(a(r, c) - b(r, c)));
  return m;
}

}  // namespace textrap
