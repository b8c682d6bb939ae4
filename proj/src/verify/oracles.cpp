#include "textrap/oracles.hpp"

#include "textrap/circulant.hpp"
#include "textrap/error.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace textrap::oracle {

using Index = Eigen::Index;

Eigen::MatrixXd bcirc_entries(const Tensor3& t, bool flip_sign) {
  const auto n1 = static_cast<Index>(t.n1());
  const auto n2 = static_cast<Index>(t.n2());
  const auto n3 = static_cast<Index>(t.n3());
  Eigen::MatrixXd m(n1 * n3, n2 * n3);
  for (Index r = 0; r < n1 * n3; ++r) {
    for (Index c = 0; c < n2 * n3; ++c) {
      const Index bi = r / n1;
      const Index bj = c / n2;
      const Index k = ((bi - bj) % n3 + n3) % n3;
      const double v = t(static_cast<std::size_t>(r % n1), static_cast<std::size_t>(c % n2), static_cast<std::size_t>(k));
      m(r, c) = (flip_sign && bi != bj) ? -v : v;
    }
  }
  return m;
}

Tensor3 tprod_bcirc(const Tensor3& x, const Tensor3& y, bool flip_sign) {
  if (x.n2() != y.n1() || x.n3() != y.n3()) throw DimensionError("tprod_bcirc: shapes do not conform");
  return fold(bcirc_entries(x, flip_sign) * matvec_unfold(y), Dims{x.n1(), y.n2(), x.n3()});
}

Tensor3 tprod_convolution(const Tensor3& x, const Tensor3& y) {
  if (x.n2() != y.n1() || x.n3() != y.n3()) throw DimensionError("tprod_convolution: shapes do not conform");
  const std::size_t n3 = x.n3();
  Tensor3 out(x.n1(), y.n2(), n3);
  for (std::size_t k = 0; k < n3; ++k)
    for (std::size_t j = 0; j < n3; ++j) out.slice(k) += x.slice(j) * y.slice((k + n3 - j) % n3);
  return out;
}

std::vector<Eigen::MatrixXcd> dft_direct(const Tensor3& t) {
  const std::size_t n3 = t.n3();
  std::vector<Eigen::MatrixXcd> faces;
  for (std::size_t f = 0; f < n3; ++f) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(static_cast<Index>(t.n1()), static_cast<Index>(t.n2()));
    for (std::size_t j = 0; j < n3; ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((f * j) % n3) / static_cast<double>(n3);
      acc += std::polar(1.0, angle) * t.slice(j).cast<std::complex<double>>();
    }
    faces.push_back(std::move(acc));
  }
  return faces;
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return Eigen::MatrixXd::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cut = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(m.rows(), m.cols())) * s(0);
  Eigen::VectorXd inv(s.size());
  for (Index i = 0; i < s.size(); ++i) inv(i) = s(i) > cut ? 1.0 / s(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Tensor3 pinv_bcirc(const Tensor3& a) {
  const Eigen::MatrixXd p = pinv(bcirc_entries(a));
  // pinv of a block-circulant matrix is block circulant; its first block column is MatVec of the tensor.
  return fold(p.leftCols(static_cast<Index>(a.n1())), Dims{a.n2(), a.n1(), a.n3()});
}

Tensor3 tls_bcirc(const Tensor3& a, const Tensor3& b) {
  if (a.n1() != b.n1() || a.n3() != b.n3()) throw DimensionError("tls_bcirc: shapes do not conform");
  return fold(pinv(bcirc_entries(a)) * matvec_unfold(b), Dims{a.n2(), b.n2(), a.n3()});
}

namespace {

Eigen::MatrixXd differences(const Eigen::MatrixXd& s, int first, int count) {
  if (first + count + 1 > s.cols()) throw InsufficientTermsError("classical oracle: not enough terms");
  Eigen::MatrixXd d(s.rows(), count);
  for (int j = 0; j < count; ++j) d.col(j) = s.col(first + j + 1) - s.col(first + j);
  return d;
}

Eigen::VectorXd combine(const Eigen::MatrixXd& s, int n, const Eigen::VectorXd& gamma) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(s.rows());
  for (Index j = 0; j < gamma.size(); ++j) out += gamma(j) * s.col(n + static_cast<int>(j));
  return out;
}

Eigen::VectorXd bordered_solve(const Eigen::MatrixXd& rows) {
  const Index m = rows.cols();
  Eigen::MatrixXd sys(m, m);
  sys.row(0).setOnes();
  sys.bottomRows(m - 1) = rows;
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(m);
  e1(0) = 1.0;
  return sys.fullPivLu().solve(e1);
}

}  // namespace

Eigen::VectorXd mpe(const Eigen::MatrixXd& s, int n, int k) {
  const Eigen::MatrixXd d = differences(s, n, k + 1);
  Eigen::VectorXd c(k + 1);
  c.head(k) = d.leftCols(k).colPivHouseholderQr().solve(-d.col(k));
  c(k) = 1.0;
  return combine(s, n, c / c.sum());
}

Eigen::VectorXd rre(const Eigen::MatrixXd& s, int n, int k) {
  const Eigen::MatrixXd d = differences(s, n, k + 1);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(d);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(k + 1).triangularView<Eigen::Upper>();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k + 1);
  const Eigen::VectorXd w = r.transpose().triangularView<Eigen::Lower>().solve(ones);
  const Eigen::VectorXd g = r.triangularView<Eigen::Upper>().solve(w);
  return combine(s, n, g / g.sum());
}

Eigen::VectorXd mmpe(const Eigen::MatrixXd& s, int n, int k, const Eigen::MatrixXd& y) {
  const Eigen::MatrixXd d = differences(s, n, k + 1);
  return combine(s, n, bordered_solve(y.leftCols(k).transpose() * d));
}

Eigen::VectorXd tea(const Eigen::MatrixXd& s, int n, int k, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd d = differences(s, n, 2 * k);
  Eigen::MatrixXd rows(k, k + 1);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= k; ++j) rows(i, j) = y.dot(d.col(i + j));
  return combine(s, n, bordered_solve(rows));
}

}  // namespace textrap::oracle
