#include "support.hpp"

#include "textrap/error.hpp"
#include "textrap/stack_products.hpp"
#include "textrap/tproduct.hpp"

#include <gtest/gtest.h>

using namespace textrap;
using namespace textrap::testing;

namespace {

double grid_distance(const Stack5& a, const Stack5& b) { return max_block_distance(a, b); }

Stack5 identity_grid(std::size_t k, std::size_t n, std::size_t n3) {
  Stack5 g = Stack5::filled(k, k, Tensor3(n, n, n3));
  for (std::size_t i = 0; i < k; ++i) g.set(i, i, Tensor3::identity(n, n3));
  return g;
}

// ---- diamond -------------------------------------------------------------------

TEST(Diamond, IdentitySlices) {
  const Stack4 eye = Stack4::identities(1, 3, 4);
  const Stack5 g = diamond(eye, eye);
  ASSERT_EQ(g.rows(), 1u);
  ASSERT_EQ(g.cols(), 1u);
  EXPECT_EQ(g(0, 0), Tensor3::identity(3, 4));
}

TEST(Diamond, BlockwiseTransposedProducts) {
  Rng rng(1);
  const Stack4 a = rand_stack(3, Dims{4, 2, 5}, rng);
  const Stack4 b = rand_stack(2, Dims{4, 2, 5}, rng);
  const Stack5 g = diamond(a, b);
  ASSERT_EQ(g.rows(), 2u);
  ASSERT_EQ(g.cols(), 3u);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(max_abs_diff(g(j, i), tprod(ttranspose(a[i]), b[j])), 1e-12);
}

TEST(Diamond, SingleTensorOverload) {
  Rng rng(2);
  const Stack4 a = rand_stack(3, Dims{4, 2, 3}, rng);
  const Tensor3 b = rand3(4, 5, 3, rng);
  const Stack4 out = diamond(a, b);
  ASSERT_EQ(out.count(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(max_abs_diff(out[i], tprod(ttranspose(a[i]), b)), 1e-12);
  EXPECT_THROW((void)diamond(a, rand3(3, 5, 3, rng)), DimensionError);
}

TEST(Diamond, Distributivity) {
  Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const Dims d{3, 2, 1 + static_cast<std::size_t>(rep % 4)};
    const Stack4 a = rand_stack(2, d, rng), b = rand_stack(2, d, rng), c = rand_stack(3, d, rng);
    EXPECT_LE(grid_distance(diamond(a + b, c), diamond(a, c) + diamond(b, c)), 1e-10);
    const Stack4 e = rand_stack(3, d, rng);
    EXPECT_LE(grid_distance(diamond(a, c + e), diamond(a, c) + diamond(a, e)), 1e-10);
  }
}

TEST(Diamond, VectorSlicesGiveInnerProducts) {
  Rng rng(4);
  const Stack4 a = rand_stack(3, Dims{5, 1, 1}, rng);
  const Stack4 b = rand_stack(2, Dims{5, 1, 1}, rng);
  const Stack5 g = diamond(a, b);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(g(j, i)(0, 0, 0), vec(a[i]).dot(vec(b[j])), 1e-12);
}

TEST(Diamond, NonConformingStacksThrow) {
  Rng rng(5);
  EXPECT_THROW((void)diamond(rand_stack(2, Dims{3, 2, 4}, rng), rand_stack(2, Dims{4, 2, 4}, rng)), DimensionError);
  EXPECT_THROW((void)diamond(rand_stack(2, Dims{3, 2, 4}, rng), rand_stack(2, Dims{3, 2, 3}, rng)), DimensionError);
}

// ---- star ----------------------------------------------------------------------

TEST(Star, IdentityGridReturnsStack) {
  Rng rng(6);
  const Stack4 b = rand_stack(3, Dims{2, 4, 3}, rng);
  const Stack4 out = star(identity_grid(3, 2, 3), b);
  EXPECT_LE(max_slice_distance(out, b), 1e-14);
}

TEST(Star, TwoByThreeGridMatchesSum) {
  Rng rng(7);
  const Stack5 a = rand_grid(2, 3, Dims{3, 2, 4}, rng);
  const Stack4 b = rand_stack(2, Dims{2, 5, 4}, rng);
  const Stack4 out = star(a, b);
  ASSERT_EQ(out.count(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_LE(max_abs_diff(out[i], tprod(a(0, i), b[0]) + tprod(a(1, i), b[1])), 1e-12);
}

TEST(Star, StackPairIsSumOfProducts) {
  Rng rng(8);
  const Stack4 a = rand_stack(3, Dims{2, 3, 4}, rng);
  const Stack4 b = rand_stack(3, Dims{3, 2, 4}, rng);
  EXPECT_LE(max_abs_diff(star(a, b), tprod(a[0], b[0]) + tprod(a[1], b[1]) + tprod(a[2], b[2])), 1e-12);
  EXPECT_THROW((void)star(a, rand_stack(2, Dims{3, 2, 4}, rng)), DimensionError);
}

TEST(Star, MixedAssociativity) {
  Rng rng(9);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n3 = 1 + static_cast<std::size_t>(rep % 5);
    const Stack4 a = rand_stack(3, Dims{4, 3, n3}, rng);
    const Stack4 b = rand_stack(3, Dims{4, 3, n3}, rng);
    const Stack4 d = rand_stack(3, Dims{3, 2, n3}, rng);
    // (a diamond b) star d and a diamond (b star d) agree.
    const Stack4 lhs = star(diamond(a, b), d);
    const Stack4 rhs = diamond(a, star(b, d));
    EXPECT_LE(stack_distance(lhs, rhs), 1e-10 * stack_norm(rhs));
  }
}

TEST(Star, ShapeChecks) {
  Rng rng(10);
  EXPECT_THROW((void)star(rand_grid(2, 3, Dims{3, 2, 4}, rng), rand_stack(3, Dims{2, 5, 4}, rng)), DimensionError);
  EXPECT_THROW((void)star(rand_grid(2, 3, Dims{3, 2, 4}, rng), rand_stack(2, Dims{3, 5, 4}, rng)), DimensionError);
}

// ---- bar_star and adjoint_swap -------------------------------------------------------

TEST(BarStar, SingleColumnIdentity) {
  const Stack5 a = Stack5::filled(1, 1, Tensor3::identity(3, 2));
  const Stack5 g = bar_star(a, a);
  EXPECT_EQ(g(0, 0), Tensor3::identity(3, 2));
}

TEST(BarStar, TwoByTwoMatchesDirectSum) {
  Rng rng(11);
  const Stack5 a = rand_grid(2, 2, Dims{3, 2, 4}, rng);
  const Stack5 b = rand_grid(2, 2, Dims{2, 3, 4}, rng);
  const Stack5 g = bar_star(a, b);
  for (std::size_t tau = 0; tau < 2; ++tau) {
    for (std::size_t eta = 0; eta < 2; ++eta) {
      const Tensor3 expected = tprod(a(eta, 0), b(tau, 0)) + tprod(a(eta, 1), b(tau, 1));
      EXPECT_LE(max_abs_diff(g(tau, eta), expected), 1e-12);
    }
  }
}

TEST(BarStar, AdjointIdentity) {
  Rng rng(12);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n3 = 1 + static_cast<std::size_t>(rep % 4);
    const Stack5 a = rand_grid(2, 2, Dims{3, 2, n3}, rng);
    const Stack5 b = rand_grid(2, 2, Dims{2, 3, n3}, rng);
    const Stack4 y = rand_stack(2, Dims{3, 2, n3}, rng);
    const Stack4 lhs = star(bar_star(a, b), y);
    const Stack4 rhs = star(adjoint_swap(a), star(b, y));
    EXPECT_LE(stack_distance(lhs, rhs), 1e-10 * stack_norm(rhs));
  }
}

TEST(BarStar, ShapeChecks) {
  Rng rng(13);
  EXPECT_THROW((void)bar_star(rand_grid(2, 2, Dims{3, 2, 4}, rng), rand_grid(2, 2, Dims{3, 2, 4}, rng)),
               DimensionError);
  EXPECT_THROW((void)bar_star(rand_grid(2, 2, Dims{3, 2, 4}, rng), rand_grid(2, 3, Dims{2, 3, 4}, rng)),
               DimensionError);
}

TEST(AdjointSwap, SymmetricGridIsFixed) {
  Rng rng(14);
  const Tensor3 p = rand3(2, 2, 3, rng), q = rand3(2, 2, 3, rng), r = rand3(2, 2, 3, rng);
  const Stack5 g(2, 2, {p, q, q, r});
  EXPECT_EQ(adjoint_swap(g), g);
}

TEST(AdjointSwap, InvolutionAndExactBlocks) {
  Rng rng(15);
  const Stack5 g = rand_grid(3, 3, Dims{2, 4, 3}, rng);
  const Stack5 t = adjoint_swap(g);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(t(i, j), g(j, i));
  EXPECT_EQ(adjoint_swap(t), g);
  EXPECT_THROW((void)adjoint_swap(rand_grid(2, 3, Dims{2, 2, 2}, rng)), DimensionError);
}

// ---- left inverse ----------------------------------------------------------------

TEST(LeftInverse, IdentityGridIsItsOwnLeftInverse) {
  const Stack5 eye = identity_grid(2, 3, 4);
  EXPECT_EQ(left_inverse_residual(eye, eye), 0.0);
  EXPECT_TRUE(verify_left_inverse(eye, eye, 0.0));
}

TEST(LeftInverse, ConstructedForFullColumnRank) {
  Rng rng(16);
  for (std::size_t n3 : {1u, 2u, 5u}) {
    // k = 2, l = 3, blocks 4 x 2: face matrices are 12 x 4.
    const Stack5 b = rand_grid(2, 3, Dims{4, 2, n3}, rng);
    const Stack5 binv = construct_left_inverse(b);
    EXPECT_EQ(binv.block_dims(), (Dims{2, 4, n3}));
    EXPECT_TRUE(verify_left_inverse(binv, b, 1e-8)) << left_inverse_residual(binv, b);
  }
}

TEST(LeftInverse, RandomCandidateIsRejected) {
  Rng rng(17);
  const Stack5 b = rand_grid(2, 3, Dims{4, 2, 3}, rng);
  const Stack5 c = rand_grid(2, 3, Dims{2, 4, 3}, rng);
  EXPECT_FALSE(verify_left_inverse(c, b, 1e-8));
}

TEST(LeftInverse, WideFacesHaveNoLeftInverse) {
  Rng rng(18);
  // Face matrices 2 x 6: rank at most 2 < 6.
  const Stack5 b = rand_grid(3, 1, Dims{2, 2, 2}, rng);
  EXPECT_FALSE(verify_left_inverse(construct_left_inverse(b), b, 1e-8));
}

// ---- block systems -------------------------------------------------------------------

TEST(BlockSystem, SolvesDiagonallyDominantSystem) {
  Rng rng(19);
  for (std::size_t n3 : {1u, 3u, 4u}) {
    Stack5 m = rand_grid(3, 3, Dims{2, 2, n3}, rng);
    for (std::size_t i = 0; i < 3; ++i) m.set(i, i, m(i, i) + 10.0 * Tensor3::identity(2, n3));
    const Stack4 rhs = rand_stack(3, Dims{2, 2, n3}, rng);
    const Stack4 x = solve_block_system(m, rhs);
    EXPECT_LE(stack_distance(star(m, x), rhs), 1e-10 * stack_norm(rhs));
  }
}

TEST(BlockSystem, SingularFaceThrows) {
  const Stack5 m = Stack5::filled(2, 2, Tensor3::identity(2, 3));
  const Stack4 rhs = Stack4::identities(2, 2, 3);
  EXPECT_THROW((void)solve_block_system(m, rhs), SingularFaceError);
}

TEST(BlockSystem, ShapeChecks) {
  Rng rng(20);
  EXPECT_THROW((void)solve_block_system(rand_grid(2, 3, Dims{2, 2, 2}, rng), rand_stack(2, Dims{2, 1, 2}, rng)),
               DimensionError);
  EXPECT_THROW((void)solve_block_system(rand_grid(2, 2, Dims{2, 2, 2}, rng), rand_stack(3, Dims{2, 1, 2}, rng)),
               DimensionError);
  EXPECT_THROW((void)solve_block_system(rand_grid(2, 2, Dims{2, 3, 2}, rng), rand_stack(2, Dims{2, 1, 2}, rng)),
               DimensionError);
}

}  // namespace
