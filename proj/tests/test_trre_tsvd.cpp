#include "support.hpp"

#include "textrap/error.hpp"
#include "textrap/extrapolation.hpp"
#include "textrap/oracles.hpp"
#include "textrap/stack_products.hpp"
#include "textrap/tproduct.hpp"
#include "textrap/trre_tsvd.hpp"

#include <gtest/gtest.h>

using namespace textrap;
using namespace textrap::testing;

namespace {

// diag(1, 2, 3) with b = (1, 2, 3): every delta_j is +-1, so all Theta_j = 1.
struct EqualThetaProblem {
  Tensor3 a{3, 3, 1};
  Tensor3 b{3, 1, 1};
  EqualThetaProblem() {
    for (std::size_t i = 0; i < 3; ++i) {
      a(i, i, 0) = static_cast<double>(i + 1);
      b(i, 0, 0) = static_cast<double>(i + 1);
    }
  }
};

// ---- sequence construction -------------------------------------------------------

TEST(Sequence, IdentityOperatorReachesRightHandSide) {
  Rng rng(1);
  const Tensor3 b = rand3(4, 1, 3, rng);
  const TtsvdSequenceState st = build_sequence(Tensor3::identity(4, 3), b);
  EXPECT_EQ(st.partial_sums.count(), st.size() + 1);
  EXPECT_TRUE(st.partial_sums[0].is_zero());
  EXPECT_LE(relative_error(st.partial_sums[st.size()], b), 1e-12);
}

TEST(Sequence, PartialSumsAreTruncatedSolutions) {
  Rng rng(2);
  const Tensor3 a = rand3(6, 4, 3, rng);
  const Tensor3 b = rand3(6, 2, 3, rng);
  const TtsvdSequenceState st = build_sequence(a, b);
  ASSERT_EQ(st.size(), 4u);
  EXPECT_EQ(st.thetas[0].dims(), (Dims{2, 2, 3}));
  for (std::size_t k = 1; k <= 4; ++k) {
    EXPECT_LE(relative_error(st.partial_sums[k], tprod(ttsvd(a, k).mp_inverse, b)), 1e-10);
    EXPECT_LE(relative_error(st.differences[k - 1], st.partial_sums[k] - st.partial_sums[k - 1]), 1e-12);
    EXPECT_LE(relative_error(st.thetas[k - 1], tprod(ttranspose(st.deltas[k - 1]), st.deltas[k - 1])), 1e-12);
  }
}

TEST(Sequence, VanishingDeltaIsDropped) {
  Rng rng(3);
  const Tensor3 a = rand3(5, 3, 4, rng);
  const TsvdFactors f = tsvd(a);
  // b has no component along u_1 (0-based), so delta_1 = 0.
  const Tensor3 b = tprod(f.u.lateral(0), rand3(1, 1, 4, rng)) + tprod(f.u.lateral(2), rand3(1, 1, 4, rng));
  const TtsvdSequenceState st = build_sequence(a, b);
  EXPECT_EQ(st.members, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(st.size(), 2u);
  EXPECT_LE(relative_error(st.partial_sums[2], tprod(ttsvd(a, 3).mp_inverse, b)), 1e-10);
}

TEST(Sequence, ArgumentChecks) {
  Rng rng(4);
  const Tensor3 a = rand3(5, 3, 2, rng);
  EXPECT_THROW((void)build_sequence(a, rand3(4, 1, 2, rng)), DimensionError);
  EXPECT_THROW((void)build_sequence(a, rand3(5, 1, 2, rng), 4), DimensionError);
  EXPECT_EQ(build_sequence(a, rand3(5, 1, 2, rng), 2).size(), 2u);
}

// ---- closed-form coefficients -------------------------------------------------------

TEST(ClosedForm, EqualThetasGiveIdentityBeta) {
  const std::vector<Tensor3> thetas(4, 2.5 * Tensor3::identity(2, 3));
  const BetaResult r = closed_form_beta(thetas, 3);
  ASSERT_EQ(r.beta.count(), 3u);
  EXPECT_EQ(r.shifted, 0u);
  for (const auto& b : r.beta) EXPECT_LE(max_abs_diff(b, Tensor3::identity(2, 3)), 1e-14);
}

TEST(ClosedForm, SolvesThetaSystem) {
  Rng rng(5);
  std::vector<Tensor3> thetas;
  for (int i = 0; i < 4; ++i) {
    const Tensor3 d = rand3(1, 2, 3, rng);
    thetas.push_back(tprod(ttranspose(d), d) + 0.1 * Tensor3::identity(2, 3));
  }
  const BetaResult r = closed_form_beta(thetas, 3);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(relative_error(tprod(thetas[i], r.beta[i]), thetas[3]), 1e-10);
  // The banded system: -Theta_{i+1} beta_i + Theta_{i+2} beta_{i+1} = 0 and -Theta_k beta_{k-1} = -Theta_{k+1}.
  for (std::size_t i = 0; i + 1 < 3; ++i)
    EXPECT_LE(frobenius_norm(tprod(thetas[i + 1], r.beta[i + 1]) - tprod(thetas[i], r.beta[i])), 1e-10);
  EXPECT_THROW((void)closed_form_beta(thetas, 4), InsufficientTermsError);
  EXPECT_THROW((void)closed_form_beta(thetas, 0), InsufficientTermsError);
}

TEST(ClosedForm, SingularThetaIsShiftedOnlyOnRequest) {
  // Theta_1 has rank one: its 2 x 2 slice is the outer product of (1, 0).
  Tensor3 t0(2, 2, 1);
  t0(0, 0, 0) = 1.0;
  const std::vector<Tensor3> thetas{t0, Tensor3::identity(2, 1)};
  const BetaResult r = closed_form_beta(thetas, 1);
  EXPECT_EQ(r.shifted, 1u);
  EXPECT_NEAR(r.beta[0](1, 1, 0), 1e10, 1.0);
  EXPECT_THROW((void)closed_form_beta(thetas, 1, std::nullopt), SingularFaceError);
}

// ---- single step ----------------------------------------------------------------

TEST(Step, EqualThetasAverageThePartialSums) {
  const EqualThetaProblem p;
  const TtsvdSequenceState st = build_sequence(p.a, p.b);
  ASSERT_EQ(st.size(), 3u);
  for (const auto& t : st.thetas) EXPECT_NEAR(t(0, 0, 0), 1.0, 1e-14);
  for (std::size_t k = 1; k <= 2; ++k) {
    const TrreStep s = trre_tsvd_step(st, k);
    Tensor3 avg(st.partial_sums[0].dims());
    for (std::size_t j = 0; j <= k; ++j) avg += st.partial_sums[j];
    avg *= 1.0 / static_cast<double>(k + 1);
    EXPECT_LE(relative_error(s.t_k, avg), 1e-12);
    for (const auto& g : s.gamma) EXPECT_NEAR(g(0, 0, 0), 1.0 / static_cast<double>(k + 1), 1e-14);
  }
}

TEST(Step, AgreesWithGenericTrre) {
  Rng rng(6);
  for (int rep = 0; rep < 5; ++rep) {
    const Tensor3 a = rand3(7, 5, 1 + static_cast<std::size_t>(rep % 3), rng);
    const Tensor3 b = rand3(7, 1, a.n3(), rng);
    const TtsvdSequenceState st = build_sequence(a, b);
    for (std::size_t k = 1; k + 1 <= st.size(); ++k) {
      const TrreStep s = trre_tsvd_step(st, k);
      const ExtrapolationResult g = extrapolate(st.partial_sums, 0, k, Method::trre);
      EXPECT_LE(relative_error(s.t_k, g.t_k), 1e-7) << "k=" << k;
      EXPECT_EQ(s.alpha.count(), k);
      EXPECT_EQ(s.gamma.count(), k + 1);
    }
  }
}

TEST(Step, MatrixCaseMatchesVectorRre) {
  Rng rng(7);
  const Tensor3 a = rand3(8, 6, 1, rng);
  const Tensor3 b = rand3(8, 1, 1, rng);
  const TtsvdSequenceState st = build_sequence(a, b);
  Eigen::MatrixXd s(6, static_cast<Eigen::Index>(st.partial_sums.count()));
  for (std::size_t j = 0; j < st.partial_sums.count(); ++j) s.col(static_cast<Eigen::Index>(j)) = vec(st.partial_sums[j]);
  for (int k = 1; k <= 4; ++k) {
    const Eigen::VectorXd expected = oracle::rre(s, 0, k);
    EXPECT_LE((vec(trre_tsvd_step(st, static_cast<std::size_t>(k)).t_k) - expected).norm(), 1e-8 * expected.norm());
  }
}

TEST(Step, NeedsEnoughMembers) {
  const EqualThetaProblem p;
  const TtsvdSequenceState st = build_sequence(p.a, p.b);
  EXPECT_THROW((void)trre_tsvd_step(st, 3), InsufficientTermsError);
  EXPECT_THROW((void)trre_tsvd_step(st, 0), InsufficientTermsError);
}

// ---- residual and eta -------------------------------------------------------------

TEST(Residual, EqualThetaAnalyticValue) {
  const EqualThetaProblem p;
  const TtsvdSequenceState st = build_sequence(p.a, p.b);
  for (std::size_t k = 1; k <= 2; ++k) {
    const TrreStep s = trre_tsvd_step(st, k);
    EXPECT_NEAR(residual_norm(st.thetas, s.gamma, k), 1.0 / std::sqrt(static_cast<double>(k + 1)), 1e-14);
  }
}

TEST(Residual, ClosedFormMatchesDirectEvaluation) {
  Rng rng(8);
  for (int rep = 0; rep < 5; ++rep) {
    const Tensor3 a = rand3(6, 5, 1 + static_cast<std::size_t>(rep), rng);
    const Tensor3 b = rand3(6, 1, a.n3(), rng);
    const TtsvdSequenceState st = build_sequence(a, b);
    for (std::size_t k = 1; k + 1 <= st.size(); ++k) {
      const TrreStep s = trre_tsvd_step(st, k);
      ASSERT_EQ(s.shifted, 0u);
      const double direct = direct_residual_norm(st, s.gamma);
      EXPECT_NEAR(residual_norm(st.thetas, s.gamma, k), direct, 1e-7 * std::max(direct, 1.0));
    }
  }
}

TEST(Residual, SeveralColumnsForceShiftAndDirectEvaluation) {
  Rng rng(15);
  const Tensor3 a = rand3(6, 5, 2, rng);
  const Tensor3 b = rand3(6, 2, 2, rng);
  const TtsvdSequenceState st = build_sequence(a, b);
  // Each Theta_j = delta_j^T * delta_j is a rank-one 2 x 2 tube.
  EXPECT_FALSE(is_invertible(st.thetas[0]).invertible);
  EXPECT_EQ(trre_tsvd_step(st, 2).shifted, 2u);
  const SolverReport r = solve(a, b, SolverOptions{0.0, std::nullopt, 1e-10});
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    const TrreStep s = trre_tsvd_step(st, r.history[i].k);
    EXPECT_GT(r.history[i].shifted, 0u);
    EXPECT_DOUBLE_EQ(r.history[i].residual_norm, direct_residual_norm(st, s.gamma));
  }
}

TEST(Residual, VanishesForConvergedSequence) {
  // Constant Theta stack of zeros in the first slice gives a zero trace.
  const std::vector<Tensor3> thetas{Tensor3::identity(1, 2), Tensor3(1, 1, 2)};
  const Stack4 gamma(std::vector<Tensor3>{Tensor3::identity(1, 2), Tensor3::identity(1, 2)});
  EXPECT_EQ(residual_norm(thetas, gamma, 2), 0.0);
  EXPECT_EQ(residual_norm(thetas, gamma, 1), 1.0);
  const std::vector<Tensor3> negative{-Tensor3::identity(1, 2)};
  EXPECT_THROW((void)residual_norm(negative, gamma, 1), ConsistencyError);
  EXPECT_THROW((void)residual_norm(thetas, gamma, 3), InsufficientTermsError);
}

TEST(Eta, MatchesDirectRatio) {
  Rng rng(9);
  const Tensor3 a = rand3(7, 6, 3, rng);
  const Tensor3 b = rand3(7, 1, 3, rng);
  const TtsvdSequenceState st = build_sequence(a, b);
  for (std::size_t k = 1; k + 2 <= st.size(); ++k) {
    const TrreStep s0 = trre_tsvd_step(st, k);
    const TrreStep s1 = trre_tsvd_step(st, k + 1);
    const double direct = frobenius_norm(s1.t_k - s0.t_k) / frobenius_norm(s0.t_k);
    EXPECT_NEAR(eta_ratio(st, s0.alpha, s1.alpha), direct, 1e-7 * std::max(direct, 1.0)) << "k=" << k;
  }
}

TEST(Eta, ZeroWhenCoefficientsAgree) {
  const EqualThetaProblem p;
  const TtsvdSequenceState st = build_sequence(p.a, p.b);
  const Tensor3 eye = Tensor3::identity(1, 1);
  const Stack4 ak(std::vector<Tensor3>{eye});
  const Stack4 ak1(std::vector<Tensor3>{eye, Tensor3(1, 1, 1)});
  EXPECT_EQ(eta_ratio(st, ak, ak1), 0.0);
  const Stack4 zero(std::vector<Tensor3>{Tensor3(1, 1, 1)});
  EXPECT_THROW((void)eta_ratio(st, zero, ak1), Error);
  EXPECT_THROW((void)eta_ratio(st, ak, ak), DimensionError);
}

// ---- solver -------------------------------------------------------------------------

TEST(Solve, ResidualHistoryIsNonIncreasing) {
  Rng rng(10);
  for (int rep = 0; rep < 5; ++rep) {
    const Tensor3 a = rand3(8, 8, 2, rng);
    const Tensor3 b = rand3(8, 1, 2, rng);
    const SolverReport r = solve(a, b, SolverOptions{0.0, std::nullopt, 1e-10});
    ASSERT_GE(r.iterations(), 2u);
    for (std::size_t i = 1; i < r.history.size(); ++i)
      EXPECT_LE(r.history[i].residual_norm, r.history[i - 1].residual_norm * (1.0 + 1e-10) + 1e-14);
    EXPECT_EQ(r.stop_reason, StopReason::sequence_exhausted);
  }
}

TEST(Solve, HistoryMatchesSteps) {
  Rng rng(11);
  const Tensor3 a = rand3(6, 5, 3, rng);
  const Tensor3 b = rand3(6, 1, 3, rng);
  const SolverReport r = solve(a, b, SolverOptions{0.0, std::nullopt, 1e-10});
  const TtsvdSequenceState st = build_sequence(a, b);
  ASSERT_EQ(r.history.size(), st.size() - 1);
  EXPECT_FALSE(r.history[0].eta.has_value());
  EXPECT_LE(relative_error(r.history[0].t_k, st.partial_sums[1]), 1e-14);
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    EXPECT_EQ(r.history[i].k, i + 1);
    EXPECT_TRUE(r.history[i].eta.has_value());
    EXPECT_LE(relative_error(r.history[i].t_k, trre_tsvd_step(st, i + 1).t_k), 1e-12);
  }
  EXPECT_EQ(r.solution, r.history.back().t_k);
}

TEST(Solve, StopsAtKMax) {
  Rng rng(12);
  const Tensor3 a = rand3(6, 6, 2, rng);
  const SolverReport r = solve(a, rand3(6, 1, 2, rng), SolverOptions{0.0, 3, 1e-10});
  EXPECT_EQ(r.final_k, 3u);
  EXPECT_EQ(r.stop_reason, StopReason::k_max);
  EXPECT_EQ(stop_reason_name(r.stop_reason), "k_max");
}

TEST(Solve, StopsByToleranceOnIllPosedProblem) {
  Rng rng(13);
  IllPosedConfig cfg;
  cfg.dims = Dims{32, 32, 3};
  cfg.noise = 1e-3;
  const IllPosedProblem p = generate_ill_posed(cfg, rng);
  const SolverReport r = solve(p.a, p.b);
  EXPECT_EQ(r.stop_reason, StopReason::tolerance);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= 32; ++k)
    best = std::min(best, relative_error(tprod(ttsvd(p.a, k).mp_inverse, p.b), p.x_true));
  EXPECT_LE(relative_error(r.solution, p.x_true), 2.0 * best);
}

TEST(Solve, ZeroRightHandSide) {
  const SolverReport r = solve(Tensor3::identity(3, 2), Tensor3(3, 1, 2));
  EXPECT_EQ(r.sequence_length, 0u);
  EXPECT_TRUE(r.solution.is_zero());
  EXPECT_EQ(r.stop_reason, StopReason::sequence_exhausted);
}

}  // namespace
