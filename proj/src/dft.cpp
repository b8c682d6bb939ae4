#include "textrap/dft.hpp"

#include "textrap/context.hpp"
#include "textrap/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string_view>

namespace textrap {

namespace {

// The FFTW planner is not re-entrant; plan execution on new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t cap_from_environment() {
  const char* env = std::getenv("TEXTRAP_ORACLE_CAP");
  if (env == nullptr) return TProductContext::default_oracle_cap;
  std::string_view s(env);
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value == 0) {
    return TProductContext::default_oracle_cap;
  }
  return value;
}

}  // namespace

DftPlan::DftPlan(std::size_t n3, std::size_t batch) : n3_(n3), batch_(batch) {
  const int n = static_cast<int>(n3);
  const int howmany = static_cast<int>(batch);
  const int stride = howmany;
  const std::size_t half = half_face_count(n3);
  std::vector<double> real(std::max<std::size_t>(1, batch * n3));
  std::vector<fftw_complex> cplx(std::max<std::size_t>(1, batch * half));
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_many_dft_r2c(1, &n, howmany, real.data(), nullptr, stride, 1, cplx.data(), nullptr,
                                         stride, 1, flags);
  backward_plan_ = fftw_plan_many_dft_c2r(1, &n, howmany, cplx.data(), nullptr, stride, 1, real.data(), nullptr,
                                          stride, 1, flags | FFTW_DESTROY_INPUT);
  if (forward_plan_ == nullptr || backward_plan_ == nullptr) {
    throw Error("FFTW could not create a plan for n3 = " + std::to_string(n3));
  }
}

DftPlan::~DftPlan() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void DftPlan::forward(const double* in, std::complex<double>* out) const {
  // r2c never writes to its input.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void DftPlan::backward(const std::complex<double>* in, double* out) const {
  std::vector<std::complex<double>> scratch(in, in + batch_ * half_face_count(n3_));
  fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_plan_), reinterpret_cast<fftw_complex*>(scratch.data()), out);
}

TProductContext::TProductContext() : oracle_cap_(cap_from_environment()) {}

std::size_t TProductContext::oracle_cap() const noexcept {
  std::lock_guard lock(mutex_);
  return oracle_cap_;
}

void TProductContext::set_oracle_cap(std::size_t cap) noexcept {
  std::lock_guard lock(mutex_);
  oracle_cap_ = cap;
}

double TProductContext::invertibility_threshold() const noexcept {
  std::lock_guard lock(mutex_);
  return invertibility_threshold_;
}

void TProductContext::set_invertibility_threshold(double threshold) noexcept {
  std::lock_guard lock(mutex_);
  invertibility_threshold_ = threshold;
}

std::shared_ptr<const DftPlan> TProductContext::plan(std::size_t n3, std::size_t batch) {
  std::lock_guard lock(mutex_);
  auto& slot = plans_[{n3, batch}];
  if (!slot) slot = std::make_shared<const DftPlan>(n3, batch);
  return slot;
}

std::size_t TProductContext::cached_plan_count() const {
  std::lock_guard lock(mutex_);
  return plans_.size();
}

void TProductContext::clear_plan_cache() {
  std::lock_guard lock(mutex_);
  plans_.clear();
}

TProductContext& default_context() {
  static TProductContext ctx;
  return ctx;
}

bool FaceDomainTensor::is_half() const noexcept {
  return faces.size() == half_face_count(dims.n3) && faces.size() != dims.n3;
}

FaceDomainTensor dft_half_faces(const Tensor3& t) {
  const Dims d = t.dims();
  const std::size_t half = half_face_count(d.n3);
  FaceDomainTensor out{d, {}};
  out.faces.reserve(half);
  const std::size_t batch = d.n1 * d.n2;
  if (batch == 0 || d.n3 == 0) {
    out.faces.assign(half, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d.n1), static_cast<Eigen::Index>(d.n2)));
    return out;
  }
  std::vector<std::complex<double>> buffer(batch * half);
  default_context().plan(d.n3, batch)->forward(t.data().data(), buffer.data());
  for (std::size_t f = 0; f < half; ++f) {
    out.faces.emplace_back(Eigen::Map<const Eigen::MatrixXcd>(buffer.data() + f * batch,
                                                              static_cast<Eigen::Index>(d.n1),
                                                              static_cast<Eigen::Index>(d.n2)));
  }
  return out;
}

FaceDomainTensor dft_faces(const Tensor3& t) {
  FaceDomainTensor f = dft_half_faces(t);
  mirror_faces(f);
  return f;
}

void mirror_faces(FaceDomainTensor& f) {
  const std::size_t n3 = f.dims.n3;
  if (f.faces.size() == n3) return;
  if (f.faces.size() != half_face_count(n3)) throw DimensionError("mirror_faces: unexpected face count");
  for (std::size_t k = half_face_count(n3); k < n3; ++k) f.faces.push_back(f.faces[n3 - k].conjugate());
}

double conjugate_symmetry_deviation(const FaceDomainTensor& f) {
  const std::size_t n3 = f.dims.n3;
  if (f.faces.size() != n3) throw DimensionError("conjugate_symmetry_deviation needs all faces");
  double dev = 0.0;
  for (std::size_t k = 0; k < n3; ++k) {
    const std::size_t m = (n3 - k) % n3;
    if (m < k) continue;
    const double d = (f.faces[m] - f.faces[k].conjugate()).cwiseAbs().maxCoeff();
    dev = std::max(dev, k == m ? d / 2.0 : d);
  }
  return dev;
}

Tensor3 idft_faces(const FaceDomainTensor& f) {
  const Dims d = f.dims;
  const std::size_t half = half_face_count(d.n3);
  if (f.faces.size() != d.n3 && f.faces.size() != half) {
    throw DimensionError("idft_faces: face count matches neither n3 nor n3/2 + 1");
  }
  for (const auto& face : f.faces) {
    if (static_cast<std::size_t>(face.rows()) != d.n1 || static_cast<std::size_t>(face.cols()) != d.n2) {
      throw DimensionError("idft_faces: face shape does not match dims");
    }
  }
  Tensor3 out(d);
  const std::size_t batch = d.n1 * d.n2;
  if (batch == 0 || d.n3 == 0) return out;

  double scale = 0.0;
  for (const auto& face : f.faces) scale = std::max(scale, face.cwiseAbs().maxCoeff());
  double dev = 0.0;
  if (f.faces.size() == d.n3) {
    dev = conjugate_symmetry_deviation(f);
  } else {
    dev = f.faces[0].imag().cwiseAbs().maxCoeff();
    if (d.n3 % 2 == 0) dev = std::max(dev, f.faces[d.n3 / 2].imag().cwiseAbs().maxCoeff());
  }
  if (dev > 1e-10 * std::max(scale, 1.0)) {
    throw ConsistencyError("inverse DFT input is not conjugate symmetric (deviation " + std::to_string(dev) + ")");
  }

  std::vector<std::complex<double>> buffer(batch * half);
  for (std::size_t k = 0; k < half; ++k) {
    Eigen::Map<Eigen::MatrixXcd>(buffer.data() + k * batch, static_cast<Eigen::Index>(d.n1),
                                 static_cast<Eigen::Index>(d.n2)) = f.faces[k];
  }
  default_context().plan(d.n3, batch)->backward(buffer.data(), out.data().data());
  out *= 1.0 / static_cast<double>(d.n3);
  return out;
}

}  // namespace textrap
