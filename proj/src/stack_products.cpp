#include "textrap/stack_products.hpp"

#include "textrap/dft.hpp"
#include "textrap/error.hpp"
#include "textrap/tproduct.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>

namespace textrap {

namespace {

using Index = Eigen::Index;

std::vector<FaceDomainTensor> half_faces_of(const Stack5& s) {
  std::vector<FaceDomainTensor> out;
  out.reserve(s.rows() * s.cols());
  for (std::size_t r = 0; r < s.rows(); ++r)
    for (std::size_t c = 0; c < s.cols(); ++c) out.push_back(dft_half_faces(s(r, c)));
  return out;
}

std::vector<FaceDomainTensor> half_faces_of(const Stack4& s) {
  std::vector<FaceDomainTensor> out;
  out.reserve(s.count());
  for (const auto& t : s) out.push_back(dft_half_faces(t));
  return out;
}

Eigen::MatrixXcd realify(const Eigen::MatrixXcd& m) { return m.real().cast<std::complex<double>>(); }

}  // namespace

Stack5 diamond(const Stack4& a, const Stack4& b) {
  if (a.slice_dims().n1 != b.slice_dims().n1 || a.slice_dims().n3 != b.slice_dims().n3) {
    throw DimensionError("diamond: stacks of " + to_string(a.slice_dims()) + " and " + to_string(b.slice_dims()) +
                         " do not conform");
  }
  std::vector<Tensor3> at;
  at.reserve(a.count());
  for (const auto& s : a) at.push_back(ttranspose(s));
  std::vector<Tensor3> blocks;
  blocks.reserve(a.count() * b.count());
  for (std::size_t j = 0; j < b.count(); ++j)
    for (std::size_t i = 0; i < a.count(); ++i) blocks.push_back(tprod(at[i], b[j]));
  return Stack5(b.count(), a.count(), std::move(blocks));
}

Stack4 diamond(const Stack4& a, const Tensor3& b) {
  if (a.slice_dims().n1 != b.n1() || a.slice_dims().n3 != b.n3()) {
    throw DimensionError("diamond: stack of " + to_string(a.slice_dims()) + " and tensor " + to_string(b.dims()) +
                         " do not conform");
  }
  std::vector<Tensor3> out;
  out.reserve(a.count());
  for (const auto& s : a) out.push_back(tprod(ttranspose(s), b));
  return Stack4(std::move(out));
}

Stack4 star(const Stack5& a, const Stack4& b) {
  if (a.rows() != b.count()) {
    throw DimensionError("star: grid has " + std::to_string(a.rows()) + " rows but stack has " +
                         std::to_string(b.count()) + " slices");
  }
  if (a.block_dims().n2 != b.slice_dims().n1 || a.block_dims().n3 != b.slice_dims().n3) {
    throw DimensionError("star: blocks " + to_string(a.block_dims()) + " cannot multiply slices " +
                         to_string(b.slice_dims()));
  }
  std::vector<Tensor3> out;
  out.reserve(a.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    Tensor3 acc(a.block_dims().n1, b.slice_dims().n2, b.slice_dims().n3);
    for (std::size_t j = 0; j < a.rows(); ++j) acc += tprod(a(j, i), b[j]);
    out.push_back(std::move(acc));
  }
  return Stack4(std::move(out));
}

Tensor3 star(const Stack4& a, const Stack4& b) {
  if (a.count() != b.count()) throw DimensionError("star: stacks differ in length");
  if (a.count() == 0) throw DimensionError("star: empty stacks");
  if (a.slice_dims().n2 != b.slice_dims().n1 || a.slice_dims().n3 != b.slice_dims().n3) {
    throw DimensionError("star: slices " + to_string(a.slice_dims()) + " cannot multiply " +
                         to_string(b.slice_dims()));
  }
  Tensor3 acc(a.slice_dims().n1, b.slice_dims().n2, a.slice_dims().n3);
  for (std::size_t e = 0; e < a.count(); ++e) acc += tprod(a[e], b[e]);
  return acc;
}

Stack5 bar_star(const Stack5& a, const Stack5& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("bar_star: grid shapes differ");
  const Dims da = a.block_dims();
  const Dims db = b.block_dims();
  if (da.n1 != db.n2 || da.n2 != db.n1 || da.n3 != db.n3) {
    throw DimensionError("bar_star: blocks " + to_string(da) + " and " + to_string(db) + " do not conform");
  }
  const std::size_t k = a.rows();
  std::vector<Tensor3> blocks;
  blocks.reserve(k * k);
  for (std::size_t tau = 0; tau < k; ++tau) {
    for (std::size_t eta = 0; eta < k; ++eta) {
      Tensor3 acc(da.n1, da.n1, da.n3);
      for (std::size_t j = 0; j < a.cols(); ++j) acc += tprod(a(eta, j), b(tau, j));
      blocks.push_back(std::move(acc));
    }
  }
  return Stack5(k, k, std::move(blocks));
}

Stack5 adjoint_swap(const Stack5& a) {
  if (a.rows() != a.cols()) throw DimensionError("adjoint_swap needs a square grid");
  std::vector<Tensor3> blocks;
  blocks.reserve(a.rows() * a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) blocks.push_back(a(j, i));
  return Stack5(a.rows(), a.cols(), std::move(blocks));
}

double left_inverse_residual(const Stack5& binv, const Stack5& b) {
  const Stack5 p = bar_star(binv, b);
  const Dims d = p.block_dims();
  const Tensor3 eye = Tensor3::identity(d.n1, d.n3);
  const Tensor3 zero(d);
  double worst = 0.0;
  for (std::size_t t = 0; t < p.rows(); ++t)
    for (std::size_t e = 0; e < p.cols(); ++e) worst = std::max(worst, frobenius_norm(p(t, e) - (t == e ? eye : zero)));
  return worst;
}

bool verify_left_inverse(const Stack5& binv, const Stack5& b, double tol) {
  return left_inverse_residual(binv, b) <= tol;
}

Stack5 construct_left_inverse(const Stack5& b) {
  const std::size_t k = b.rows();
  const std::size_t l = b.cols();
  const Dims d = b.block_dims();
  const std::size_t n2 = d.n1;
  const std::size_t n1 = d.n2;
  const auto bf = half_faces_of(b);
  const std::size_t half = half_face_count(d.n3);
  // pinv_faces[f] is (k*n1) x (l*n2); block (eta, j) becomes face f of binv(eta, j).
  std::vector<Eigen::MatrixXcd> pinv_faces;
  pinv_faces.reserve(half);
  for (std::size_t f = 0; f < half; ++f) {
    Eigen::MatrixXcd big(static_cast<Index>(l * n2), static_cast<Index>(k * n1));
    for (std::size_t j = 0; j < l; ++j)
      for (std::size_t tau = 0; tau < k; ++tau)
        big.block(static_cast<Index>(j * n2), static_cast<Index>(tau * n1), static_cast<Index>(n2),
                  static_cast<Index>(n1)) = bf[tau * l + j].faces[f];
    Eigen::MatrixXcd p = big.completeOrthogonalDecomposition().pseudoInverse();
    if (is_self_conjugate_face(f, d.n3)) p = realify(p);
    pinv_faces.push_back(std::move(p));
  }
  std::vector<Tensor3> blocks;
  blocks.reserve(k * l);
  for (std::size_t eta = 0; eta < k; ++eta) {
    for (std::size_t j = 0; j < l; ++j) {
      FaceDomainTensor fd{Dims{n1, n2, d.n3}, {}};
      for (std::size_t f = 0; f < half; ++f) {
        fd.faces.push_back(pinv_faces[f].block(static_cast<Index>(eta * n1), static_cast<Index>(j * n2),
                                               static_cast<Index>(n1), static_cast<Index>(n2)));
      }
      blocks.push_back(idft_faces(fd));
    }
  }
  return Stack5(k, l, std::move(blocks));
}

Stack4 solve_block_system(const Stack5& m, const Stack4& rhs, double rcond_threshold) {
  const std::size_t k = m.rows();
  if (m.cols() != k) throw DimensionError("solve_block_system needs a square grid");
  if (rhs.count() != k) throw DimensionError("solve_block_system: right-hand side length differs from grid size");
  const Dims bd = m.block_dims();
  const Dims rd = rhs.slice_dims();
  if (bd.n1 != bd.n2 || rd.n1 != bd.n1 || rd.n3 != bd.n3) {
    throw DimensionError("solve_block_system: blocks " + to_string(bd) + " and right-hand side " + to_string(rd) +
                         " do not conform");
  }
  const std::size_t p = bd.n1;
  const std::size_t s = rd.n2;
  const auto mf = half_faces_of(m);
  const auto rf = half_faces_of(rhs);
  const std::size_t half = half_face_count(bd.n3);
  std::vector<FaceDomainTensor> xf(k, FaceDomainTensor{Dims{p, s, bd.n3}, {}});
  const auto P = static_cast<Index>(p);
  const auto S = static_cast<Index>(s);
  for (std::size_t f = 0; f < half; ++f) {
    Eigen::MatrixXcd big(static_cast<Index>(k * p), static_cast<Index>(k * p));
    Eigen::MatrixXcd r(static_cast<Index>(k * p), S);
    // Equation i reads sum_j m(j, i) * x_j = rhs_i.
    for (std::size_t i = 0; i < k; ++i) {
      r.middleRows(static_cast<Index>(i) * P, P) = rf[i].faces[f];
      for (std::size_t j = 0; j < k; ++j)
        big.block(static_cast<Index>(i) * P, static_cast<Index>(j) * P, P, P) = mf[j * k + i].faces[f];
    }
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(big);
    const double rc = big.size() == 0 ? 1.0 : lu.rcond();
    if (!(rc > rcond_threshold)) throw SingularFaceError("solve_block_system: singular face system", f, rc);
    Eigen::MatrixXcd x = lu.solve(r);
    if (is_self_conjugate_face(f, bd.n3)) x = realify(x);
    for (std::size_t j = 0; j < k; ++j) xf[j].faces.push_back(x.middleRows(static_cast<Index>(j) * P, P));
  }
  std::vector<Tensor3> out;
  out.reserve(k);
  for (auto& x : xf) out.push_back(idft_faces(x));
  return Stack4(std::move(out));
}

}  // namespace textrap
