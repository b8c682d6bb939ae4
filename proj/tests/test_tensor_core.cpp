#include "support.hpp"

#include "textrap/circulant.hpp"
#include "textrap/context.hpp"
#include "textrap/dft.hpp"
#include "textrap/error.hpp"
#include "textrap/oracles.hpp"
#include "textrap/tproduct.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace textrap;
using textrap::testing::rand3;

namespace {

// ---- storage ---------------------------------------------------------------

TEST(Tensor3, StorageIsSliceMajorColumnMajor) {
  Tensor3 t(2, 3, 4);
  t(1, 2, 3) = 7.0;
  EXPECT_EQ(t.data()[1 + 2 * (2 + 3 * 3)], 7.0);
  EXPECT_EQ(t.slice(3)(1, 2), 7.0);
}

TEST(Tensor3, ConstructorRejectsWrongDataLength) {
  EXPECT_THROW(Tensor3(Dims{2, 2, 2}, std::vector<double>(7)), DimensionError);
}

TEST(Tensor3, IdentityAndUnitTubal) {
  const Tensor3 eye = Tensor3::identity(3, 4);
  EXPECT_EQ(eye.slice(0), Eigen::MatrixXd::Identity(3, 3));
  for (std::size_t k = 1; k < 4; ++k) EXPECT_TRUE(eye.slice(k).isZero(0.0));
  const Tensor3 e = Tensor3::unit_tubal(5);
  EXPECT_EQ(e.dims(), (Dims{1, 1, 5}));
  EXPECT_EQ(e(0, 0, 0), 1.0);
  EXPECT_EQ(frobenius_norm(e), 1.0);
}

TEST(Tensor3, LateralHorizontalAndTube) {
  Rng rng(1);
  Tensor3 t = rand3(3, 4, 2, rng);
  const Tensor3 lat = t.lateral(2);
  EXPECT_EQ(lat.dims(), (Dims{3, 1, 2}));
  EXPECT_EQ(lat(1, 0, 1), t(1, 2, 1));
  const Tensor3 hor = t.horizontal(1);
  EXPECT_EQ(hor.dims(), (Dims{1, 4, 2}));
  EXPECT_EQ(hor(0, 3, 0), t(1, 3, 0));
  const Tensor3 tube = t.tube(2, 1);
  EXPECT_EQ(tube(0, 0, 1), t(2, 1, 1));
  Tensor3 lat2 = lat * 2.0;
  t.set_lateral(0, lat2);
  EXPECT_EQ(t(2, 0, 1), 2.0 * lat(2, 0, 1));
  EXPECT_EQ(t.leading_laterals(2).dims(), (Dims{3, 2, 2}));
}

TEST(Tensor3, ArithmeticChecksDims) {
  Tensor3 a(2, 2, 2), b(2, 3, 2);
  EXPECT_THROW(a += b, DimensionError);
  Rng rng(2);
  const Tensor3 x = rand3(2, 2, 2, rng);
  EXPECT_TRUE((x - x).is_zero());
  EXPECT_EQ(max_abs_diff(2.0 * x, x + x), 0.0);
}

TEST(Stack4, RejectsMixedDims) {
  Stack4 s;
  s.push_back(Tensor3(2, 2, 2));
  EXPECT_THROW(s.push_back(Tensor3(2, 3, 2)), DimensionError);
  EXPECT_EQ(s.count(), 1u);
}

TEST(Stack4, FirstZeroSlice) {
  Rng rng(3);
  Stack4 s;
  s.push_back(rand3(2, 2, 1, rng));
  s.push_back(Tensor3(2, 2, 1));
  EXPECT_EQ(s.first_zero_slice(), 1u);
}

TEST(Stack5, RowMajorBlocksAndShapeChecks) {
  Rng rng(4);
  std::vector<Tensor3> blocks;
  for (int i = 0; i < 6; ++i) blocks.push_back(rand3(2, 2, 2, rng));
  const Stack5 g(2, 3, blocks);
  EXPECT_EQ(g(1, 2), blocks[5]);
  EXPECT_THROW(Stack5(2, 2, blocks), DimensionError);
}

// ---- bcirc, MatVec, fold --------------------------------------------------

TEST(Bcirc, IdentityTensorGivesIdentityMatrix) {
  EXPECT_EQ(bcirc(Tensor3::identity(3, 4)), Eigen::MatrixXd::Identity(12, 12));
}

TEST(Bcirc, TubalScalarIsCirculant) {
  const double a = 1.5, b = -2.0, c = 0.25;
  Eigen::Matrix3d expected;
  expected << a, c, b, b, a, c, c, b, a;
  EXPECT_EQ(bcirc(Tensor3::tubal({a, b, c})), Eigen::MatrixXd(expected));
}

TEST(Bcirc, MatchesEntrywiseAssembly) {
  Rng rng(5);
  const Tensor3 t = rand3(2, 3, 4, rng);
  EXPECT_EQ(bcirc(t), oracle::bcirc_entries(t));
}

TEST(Bcirc, FirstBlockColumnDeterminesTensor) {
  Rng rng(6);
  const Tensor3 t = rand3(3, 2, 5, rng);
  const Eigen::MatrixXd m = bcirc(t);
  EXPECT_EQ(fold(m.leftCols(2), t.dims()), t);
}

TEST(Bcirc, OracleCapIsEnforced) {
  auto& ctx = default_context();
  const std::size_t saved = ctx.oracle_cap();
  ctx.set_oracle_cap(8);
  EXPECT_THROW((void)bcirc(Tensor3(3, 2, 3)), OracleCapError);
  EXPECT_THROW((void)bcirc(Tensor3(2, 3, 3)), OracleCapError);
  EXPECT_NO_THROW((void)bcirc(Tensor3(2, 2, 4)));
  ctx.set_oracle_cap(saved);
}

TEST(MatVec, TubalScalarIsColumn) {
  const Eigen::MatrixXd m = matvec_unfold(Tensor3::tubal({4.0, 5.0, 6.0}));
  ASSERT_EQ(m.rows(), 3);
  ASSERT_EQ(m.cols(), 1);
  EXPECT_EQ(m(0, 0), 4.0);
  EXPECT_EQ(m(1, 0), 5.0);
  EXPECT_EQ(m(2, 0), 6.0);
}

TEST(MatVec, IdentityTensorStacksIdentityOverZeros) {
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(6, 2);
  expected.topRows(2).setIdentity();
  EXPECT_EQ(matvec_unfold(Tensor3::identity(2, 3)), expected);
}

TEST(MatVec, FoldRoundTripIsExact) {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const Tensor3 t = rand3(1 + rep % 4, 1 + rep % 3, 1 + rep % 5, rng);
    EXPECT_EQ(fold(matvec_unfold(t), t.dims()), t);
  }
}

TEST(MatVec, FoldRejectsWrongShape) {
  EXPECT_THROW((void)fold(Eigen::MatrixXd::Zero(5, 2), Dims{2, 2, 3}), DimensionError);
}

// ---- DFT -------------------------------------------------------------------

TEST(Dft, SingleSliceIsUnchanged) {
  Rng rng(8);
  const Tensor3 t = rand3(3, 4, 1, rng);
  const FaceDomainTensor f = dft_faces(t);
  ASSERT_EQ(f.faces.size(), 1u);
  EXPECT_EQ(Eigen::MatrixXd(f.faces[0].real()), Eigen::MatrixXd(t.slice(0)));
  EXPECT_TRUE(f.faces[0].imag().isZero(0.0));
}

TEST(Dft, UnitTubalHasUnitFaces) {
  for (std::size_t n3 : {1u, 2u, 5u, 8u}) {
    const FaceDomainTensor f = dft_faces(Tensor3::unit_tubal(n3));
    for (const auto& face : f.faces) EXPECT_NEAR(std::abs(face(0, 0) - 1.0), 0.0, 1e-15);
  }
}

TEST(Dft, MatchesDirectSummation) {
  Rng rng(9);
  for (std::size_t n3 : {8u, 7u, 12u, 1u}) {
    const Tensor3 t = rand3(4, 4, n3, rng);
    const FaceDomainTensor f = dft_faces(t);
    const auto direct = oracle::dft_direct(t);
    for (std::size_t k = 0; k < n3; ++k) EXPECT_LT((f.faces[k] - direct[k]).norm(), 1e-12 * direct[0].norm());
  }
}

TEST(Dft, RoundTripAndConjugateSymmetry) {
  Rng rng(10);
  for (int rep = 0; rep < 30; ++rep) {
    const Tensor3 t = rand3(1 + rep % 5, 1 + rep % 4, 1 + rep % 9, rng);
    const FaceDomainTensor f = dft_faces(t);
    EXPECT_LE(conjugate_symmetry_deviation(f), 1e-12);
    EXPECT_LE(relative_error(idft_faces(f), t), 1e-12);
    EXPECT_LE(relative_error(idft_faces(dft_half_faces(t)), t), 1e-12);
  }
}

TEST(Dft, HalfFacesAreLeadingFullFaces) {
  Rng rng(11);
  const Tensor3 t = rand3(3, 2, 6, rng);
  const FaceDomainTensor half = dft_half_faces(t);
  const FaceDomainTensor full = dft_faces(t);
  ASSERT_EQ(half.faces.size(), half_face_count(6));
  EXPECT_TRUE(half.is_half());
  for (std::size_t k = 0; k < half.faces.size(); ++k) EXPECT_LT((half.faces[k] - full.faces[k]).norm(), 1e-13);
  FaceDomainTensor mirrored = half;
  mirror_faces(mirrored);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_LT((mirrored.faces[k] - full.faces[k]).norm(), 1e-13);
}

TEST(Dft, NonHermitianFaceSetIsRejected) {
  Rng rng(12);
  FaceDomainTensor f = dft_faces(rand3(2, 2, 4, rng));
  f.faces[1](0, 0) += std::complex<double>(0.0, 1.0);
  EXPECT_THROW((void)idft_faces(f), ConsistencyError);
}

TEST(Norm, ZeroIdentityAndUnfolding) {
  EXPECT_EQ(frobenius_norm(Tensor3(3, 3, 3)), 0.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(Tensor3::identity(5, 3)), std::sqrt(5.0));
  Rng rng(13);
  const Tensor3 t = rand3(3, 4, 5, rng);
  EXPECT_NEAR(frobenius_norm(t), matvec_unfold(t).norm(), 1e-14 * frobenius_norm(t));
}

TEST(Norm, ParsevalIdentity) {
  Rng rng(14);
  for (int rep = 0; rep < 25; ++rep) {
    const Tensor3 t = rand3(1 + rep % 6, 1 + rep % 5, 1 + rep % 7, rng);
    double faces = 0.0;
    for (const auto& f : dft_faces(t).faces) faces += f.squaredNorm();
    const double n2 = std::pow(frobenius_norm(t), 2);
    EXPECT_LE(std::abs(n2 - faces / static_cast<double>(t.n3())), 1e-10 * n2);
  }
}

// ---- plan cache ---------------------------------------------------------------

TEST(Context, PlanReuseChangesNothing) {
  Rng rng(15);
  const Tensor3 x = rand3(4, 3, 6, rng);
  const Tensor3 y = rand3(3, 5, 6, rng);
  default_context().clear_plan_cache();
  const Tensor3 first = tprod(x, y);
  EXPECT_GT(default_context().cached_plan_count(), 0u);
  const Tensor3 second = tprod(x, y);
  EXPECT_LE(relative_error(second, first), 1e-14);
}

TEST(Context, ConcurrentProductsAgree) {
  Rng rng(16);
  const Tensor3 x = rand3(5, 4, 7, rng);
  const Tensor3 y = rand3(4, 3, 7, rng);
  const Tensor3 expected = tprod(x, y);
  default_context().clear_plan_cache();
  std::vector<Tensor3> results(8);
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < results.size(); ++i)
    pool.emplace_back([&, i] {
      for (int r = 0; r < 20; ++r) results[i] = tprod(x, y);
    });
  for (auto& th : pool) th.join();
  for (const auto& r : results) EXPECT_LE(relative_error(r, expected), 1e-14);
}

}  // namespace
