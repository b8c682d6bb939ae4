#include "textrap/tsvd.hpp"

#include "textrap/dft.hpp"
#include "textrap/error.hpp"
#include "textrap/tproduct.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace textrap {

namespace {

using Index = Eigen::Index;

struct FaceSvd {
  Eigen::MatrixXcd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXcd v;
};

// Self-conjugate faces are decomposed in real arithmetic so that the factors
// stay real, which keeps the inverse transform of the factors real.
FaceSvd face_svd(const Eigen::MatrixXcd& face, bool real_face, std::size_t index) {
  FaceSvd out;
  if (real_face) {
    const Eigen::MatrixXd re = face.real();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(re, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.u = svd.matrixU().cast<std::complex<double>>();
    out.sigma = svd.singularValues();
    out.v = svd.matrixV().cast<std::complex<double>>();
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(face, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.u = svd.matrixU();
    out.sigma = svd.singularValues();
    out.v = svd.matrixV();
  }
  if (!out.sigma.allFinite() || !out.u.allFinite() || !out.v.allFinite()) {
    throw SingularFaceError("face SVD produced non-finite values", index, 0.0);
  }
  return out;
}

std::vector<FaceSvd> decompose(const Tensor3& a) {
  const FaceDomainTensor f = dft_half_faces(a);
  std::vector<FaceSvd> out;
  out.reserve(f.faces.size());
  for (std::size_t k = 0; k < f.faces.size(); ++k) {
    out.push_back(face_svd(f.faces[k], is_self_conjugate_face(k, a.n3()), k));
  }
  return out;
}

std::vector<std::vector<double>> all_face_values(const std::vector<FaceSvd>& svds, std::size_t n3) {
  std::vector<std::vector<double>> out(n3);
  for (std::size_t k = 0; k < n3; ++k) {
    const std::size_t h = std::min(k, n3 - k);
    const auto& s = svds[h].sigma;
    out[k].assign(s.data(), s.data() + s.size());
  }
  return out;
}

double pinv_value(double sigma, double sigma_max) {
  return sigma > pinv_relative_threshold * sigma_max && sigma > 0.0 ? 1.0 / sigma : 0.0;
}

}  // namespace

TsvdFactors tsvd(const Tensor3& a) {
  const Dims d = a.dims();
  const auto svds = decompose(a);
  const std::size_t r = std::min(d.n1, d.n2);
  FaceDomainTensor fu{Dims{d.n1, d.n1, d.n3}, {}};
  FaceDomainTensor fs{Dims{d.n1, d.n2, d.n3}, {}};
  FaceDomainTensor fv{Dims{d.n2, d.n2, d.n3}, {}};
  for (const auto& svd : svds) {
    fu.faces.push_back(svd.u);
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(static_cast<Index>(d.n1), static_cast<Index>(d.n2));
    for (Index j = 0; j < static_cast<Index>(r); ++j) s(j, j) = svd.sigma(j);
    fs.faces.push_back(std::move(s));
    fv.faces.push_back(svd.v);
  }
  TsvdFactors out;
  out.u = idft_faces(fu);
  out.s = idft_faces(fs);
  out.v = idft_faces(fv);
  out.rank = r;
  out.face_singular_values = all_face_values(svds, d.n3);
  return out;
}

TruncatedTsvd ttsvd(const Tensor3& a, std::size_t k) {
  const Dims d = a.dims();
  const std::size_t r = std::min(d.n1, d.n2);
  if (k < 1 || k > r) {
    throw DimensionError("ttsvd: k = " + std::to_string(k) + " outside [1, " + std::to_string(r) + "]");
  }
  const auto svds = decompose(a);
  const auto K = static_cast<Index>(k);
  FaceDomainTensor fu{Dims{d.n1, k, d.n3}, {}};
  FaceDomainTensor fs{Dims{k, k, d.n3}, {}};
  FaceDomainTensor fv{Dims{d.n2, k, d.n3}, {}};
  FaceDomainTensor fp{Dims{d.n2, d.n1, d.n3}, {}};
  for (const auto& svd : svds) {
    fu.faces.push_back(svd.u.leftCols(K));
    fv.faces.push_back(svd.v.leftCols(K));
    const Eigen::VectorXd sk = svd.sigma.head(K);
    fs.faces.push_back(sk.cast<std::complex<double>>().asDiagonal().toDenseMatrix());
    const double smax = svd.sigma.size() ? svd.sigma(0) : 0.0;
    Eigen::VectorXcd inv(K);
    for (Index j = 0; j < K; ++j) inv(j) = pinv_value(sk(j), smax);
    fp.faces.push_back(svd.v.leftCols(K) * inv.asDiagonal() * svd.u.leftCols(K).adjoint());
  }
  TruncatedTsvd out;
  out.factors.u = idft_faces(fu);
  out.factors.s = idft_faces(fs);
  out.factors.v = idft_faces(fv);
  out.factors.rank = k;
  out.factors.face_singular_values = all_face_values(svds, d.n3);
  out.mp_inverse = idft_faces(fp);
  return out;
}

Tensor3 reconstruct(const TsvdFactors& f) { return tprod(tprod(f.u, f.s), ttranspose(f.v)); }

std::vector<SingularTriplet> truncated_expansion(const TsvdFactors& f) {
  std::vector<SingularTriplet> out;
  const std::size_t r = std::min({f.rank, f.u.n2(), f.v.n2(), f.s.n1(), f.s.n2()});
  out.reserve(r);
  for (std::size_t j = 0; j < r; ++j) out.push_back({f.u.lateral(j), f.s.tube(j, j), f.v.lateral(j)});
  return out;
}

Tensor3 pseudo_inverse(const Tensor3& a) {
  const Dims d = a.dims();
  if (std::min(d.n1, d.n2) == 0) return Tensor3(d.n2, d.n1, d.n3);
  return ttsvd(a, std::min(d.n1, d.n2)).mp_inverse;
}

Tensor3 tls_solve(const Tensor3& a, const Tensor3& b) {
  if (a.n1() != b.n1() || a.n3() != b.n3()) {
    throw DimensionError("tls_solve: " + to_string(a.dims()) + " and right-hand side " + to_string(b.dims()) +
                         " do not conform");
  }
  return tprod(pseudo_inverse(a), b);
}

std::size_t tubal_rank(const Tensor3& a, double tol) {
  const auto svds = decompose(a);
  const std::size_t r = std::min(a.n1(), a.n2());
  double top = 0.0;
  for (const auto& s : svds)
    if (s.sigma.size()) top = std::max(top, s.sigma(0));
  if (top == 0.0) return 0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < r; ++j) {
    double m = 0.0;
    for (const auto& s : svds) m = std::max(m, s.sigma(static_cast<Index>(j)));
    if (m > tol * top) ++count;
  }
  return count;
}

Tensor3 tubal_pinv(const Tensor3& d) {
  if (d.n1() != 1 || d.n2() != 1) throw DimensionError("tubal_pinv expects a tubal scalar");
  FaceDomainTensor f = dft_half_faces(d);
  double top = 0.0;
  for (const auto& face : f.faces) top = std::max(top, std::abs(face(0, 0)));
  for (std::size_t k = 0; k < f.faces.size(); ++k) {
    const std::complex<double> z = f.faces[k](0, 0);
    std::complex<double> inv = std::abs(z) > pinv_relative_threshold * top && z != 0.0 ? 1.0 / z : 0.0;
    if (is_self_conjugate_face(k, d.n3())) inv = inv.real();
    f.faces[k](0, 0) = inv;
  }
  return idft_faces(f);
}

}  // namespace textrap
