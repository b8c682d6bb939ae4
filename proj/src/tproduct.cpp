#include "textrap/tproduct.hpp"

#include "textrap/context.hpp"
#include "textrap/dft.hpp"
#include "textrap/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace textrap {

Tensor3 tprod(const Tensor3& x, const Tensor3& y) {
  const Dims dx = x.dims();
  const Dims dy = y.dims();
  if (dx.n2 != dy.n1 || dx.n3 != dy.n3) {
    throw DimensionError("tprod: cannot multiply " + to_string(dx) + " by " + to_string(dy));
  }
  if (dx.n3 == 1) {
    Tensor3 out(dx.n1, dy.n2, 1);
    out.slice(0).noalias() = x.slice(0) * y.slice(0);
    return out;
  }
  const FaceDomainTensor fx = dft_half_faces(x);
  const FaceDomainTensor fy = dft_half_faces(y);
  FaceDomainTensor out{Dims{dx.n1, dy.n2, dx.n3}, {}};
  out.faces.reserve(fx.faces.size());
  for (std::size_t f = 0; f < fx.faces.size(); ++f) {
    Eigen::MatrixXcd p = fx.faces[f] * fy.faces[f];
    if (is_self_conjugate_face(f, dx.n3)) p = p.real().cast<std::complex<double>>();
    out.faces.push_back(std::move(p));
  }
  return idft_faces(out);
}

Tensor3 ttranspose(const Tensor3& x) {
  const Dims d = x.dims();
  Tensor3 out(d.n2, d.n1, d.n3);
  for (std::size_t k = 0; k < d.n3; ++k) out.slice(k) = x.slice((d.n3 - k) % d.n3).transpose();
  return out;
}

namespace {

void require_square(const Tensor3& a, const char* what) {
  if (a.n1() != a.n2()) throw DimensionError(std::string(what) + " needs square frontal slices, got " + to_string(a.dims()));
}

Eigen::VectorXd face_singular_values(const Eigen::MatrixXcd& face) {
  if (face.size() == 0) return Eigen::VectorXd();
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(face).singularValues();
}

}  // namespace

Tensor3 tinverse(const Tensor3& a, std::optional<double> threshold) {
  require_square(a, "tinverse");
  const double thr = threshold.value_or(default_context().invertibility_threshold());
  FaceDomainTensor f = dft_half_faces(a);
  std::vector<double> smin(f.faces.size(), 0.0);
  double smax_all = 0.0;
  for (std::size_t k = 0; k < f.faces.size(); ++k) {
    const Eigen::VectorXd sv = face_singular_values(f.faces[k]);
    if (sv.size() == 0) continue;
    smin[k] = sv(sv.size() - 1);
    smax_all = std::max(smax_all, sv(0));
  }
  for (std::size_t k = 0; k < f.faces.size(); ++k) {
    const double rc = smax_all > 0.0 ? smin[k] / smax_all : 0.0;
    if (!(rc > thr)) throw SingularFaceError("tinverse: singular DFT face", k, rc);
    Eigen::MatrixXcd inv = f.faces[k].partialPivLu().inverse();
    if (is_self_conjugate_face(k, a.n3())) inv = inv.real().cast<std::complex<double>>();
    f.faces[k] = std::move(inv);
  }
  return idft_faces(f);
}

InvertibilityReport is_invertible(const Tensor3& a, std::optional<double> threshold) {
  require_square(a, "is_invertible");
  const double thr = threshold.value_or(default_context().invertibility_threshold());
  const FaceDomainTensor f = dft_faces(a);
  InvertibilityReport rep;
  double smin_all = std::numeric_limits<double>::infinity();
  double smax_all = 0.0;
  for (const auto& face : f.faces) {
    const Eigen::VectorXd sv = face_singular_values(face);
    const double smax = sv.size() ? sv(0) : 0.0;
    const double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
    rep.face_rcond.push_back(smax > 0.0 ? smin / smax : 0.0);
    smin_all = std::min(smin_all, smin);
    smax_all = std::max(smax_all, smax);
  }
  rep.rcond = smax_all > 0.0 ? smin_all / smax_all : 0.0;
  rep.invertible = a.n1() > 0 && rep.rcond > thr;
  return rep;
}

Tensor3 tscalar_product(const Tensor3& x, const Tensor3& y) {
  if (x.dims() != y.dims() || x.n2() != 1) {
    throw DimensionError("tscalar_product needs two lateral slices of equal shape, got " + to_string(x.dims()) +
                         " and " + to_string(y.dims()));
  }
  return tprod(ttranspose(x), y);
}

double column_orthogonality_residual(const Tensor3& q) {
  return frobenius_norm(tprod(ttranspose(q), q) - Tensor3::identity(q.n2(), q.n3()));
}

double orthogonality_residual(const Tensor3& q) {
  require_square(q, "orthogonality_residual");
  const Tensor3 eye = Tensor3::identity(q.n1(), q.n3());
  const Tensor3 qt = ttranspose(q);
  return std::max(frobenius_norm(tprod(qt, q) - eye), frobenius_norm(tprod(q, qt) - eye));
}

bool is_orthogonal(const Tensor3& q, double tol) {
  if (q.n1() != q.n2()) return false;
  return orthogonality_residual(q) <= tol;
}

PdReport positive_definite_face_test(const Tensor3& a) {
  require_square(a, "positive_definite_face_test");
  const FaceDomainTensor f = dft_half_faces(a);
  double lmin = std::numeric_limits<double>::infinity();
  double lmax_abs = 0.0;
  for (const auto& face : f.faces) {
    if (face.size() == 0) continue;
    const Eigen::MatrixXcd herm = (face + face.adjoint()) * 0.5;
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(herm, Eigen::EigenvaluesOnly).eigenvalues();
    lmin = std::min(lmin, ev.minCoeff());
    lmax_abs = std::max(lmax_abs, ev.cwiseAbs().maxCoeff());
  }
  PdReport rep;
  if (!std::isfinite(lmin)) return rep;
  rep.min_value = lmin;
  rep.positive_definite = lmin > pd_relative_tolerance * lmax_abs && lmax_abs > 0.0;
  rep.positive_semidefinite = lmin >= -pd_relative_tolerance * lmax_abs;
  return rep;
}

PdReport positive_definite_sample_test(const Tensor3& a, std::size_t samples, std::uint64_t seed) {
  require_square(a, "positive_definite_sample_test");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double scale = std::max(frobenius_norm(a), std::numeric_limits<double>::min());
  PdReport rep;
  rep.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    Tensor3 x(a.n1(), 1, a.n3());
    for (double& v : x.data()) v = normal(rng);
    const double nx = frobenius_norm(x);
    if (nx == 0.0) continue;
    x *= 1.0 / nx;
    const double q = tprod(ttranspose(x), tprod(a, x))(0, 0, 0);
    if (q < rep.min_value) {
      rep.min_value = q;
      rep.witness = x;
    }
  }
  rep.positive_definite = rep.min_value > pd_relative_tolerance * scale;
  rep.positive_semidefinite = rep.min_value >= -pd_relative_tolerance * scale;
  return rep;
}

bool is_positive_definite(const Tensor3& a, PdMode mode, std::size_t samples, std::uint64_t seed) {
  return mode == PdMode::face_test ? positive_definite_face_test(a).positive_definite
                                   : positive_definite_sample_test(a, samples, seed).positive_definite;
}

MoorePenroseReport check_moore_penrose(const Tensor3& a, const Tensor3& x, double tol) {
  if (x.n1() != a.n2() || x.n2() != a.n1() || x.n3() != a.n3()) {
    throw DimensionError("check_moore_penrose: candidate " + to_string(x.dims()) + " does not fit " +
                         to_string(a.dims()));
  }
  const Tensor3 ax = tprod(a, x);
  const Tensor3 xa = tprod(x, a);
  MoorePenroseReport rep;
  rep.residuals[0] = frobenius_norm(tprod(ax, a) - a);
  rep.residuals[1] = frobenius_norm(tprod(xa, x) - x);
  rep.residuals[2] = frobenius_norm(ttranspose(ax) - ax);
  rep.residuals[3] = frobenius_norm(ttranspose(xa) - xa);
  rep.pass = std::all_of(rep.residuals.begin(), rep.residuals.end(), [tol](double r) { return r <= tol; });
  return rep;
}

Tensor3 slice_product_entry(const Tensor3& a, const Tensor3& b, std::size_t i, std::size_t j) {
  if (a.dims() != b.dims()) throw DimensionError("slice_product_entry: operands differ in shape");
  if (i >= a.n2() || j >= a.n2()) throw DimensionError("slice_product_entry: lateral index out of range");
  return tscalar_product(a.lateral(i), b.lateral(j));
}

}  // namespace textrap
