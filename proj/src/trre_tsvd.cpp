#include "textrap/trre_tsvd.hpp"

#include "textrap/dft.hpp"
#include "textrap/error.hpp"
#include "textrap/extrapolation.hpp"
#include "textrap/stack_products.hpp"
#include "textrap/tproduct.hpp"

#include <algorithm>
#include <cmath>

namespace textrap {

namespace {

// Tube j of the F-diagonal factor, pseudo-inverted face by face with the same
// rule ttsvd uses, so partial sums agree with ttsvd(a, k).mp_inverse * b.
Tensor3 singular_tube_pinv(const TsvdFactors& f, std::size_t j) {
  const std::size_t n3 = f.face_singular_values.size();
  FaceDomainTensor fd{Dims{1, 1, n3}, {}};
  for (std::size_t k = 0; k < half_face_count(n3); ++k) {
    const auto& sv = f.face_singular_values[k];
    const double top = sv.empty() ? 0.0 : sv.front();
    const double s = sv[j];
    Eigen::MatrixXcd face(1, 1);
    face(0, 0) = (s > 0.0 && s > pinv_relative_threshold * top) ? 1.0 / s : 0.0;
    fd.faces.push_back(std::move(face));
  }
  return idft_faces(fd);
}

double first_slice_trace(const Tensor3& t) { return t.slice(0).trace(); }

Stack4 leading(const Stack4& s, std::size_t count) {
  return Stack4(std::vector<Tensor3>(s.slices().begin(), s.slices().begin() + static_cast<std::ptrdiff_t>(count)));
}

}  // namespace

TtsvdSequenceState build_sequence(const Tensor3& a, const Tensor3& b, std::optional<std::size_t> k_max) {
  if (a.n1() != b.n1() || a.n3() != b.n3()) {
    throw DimensionError("build_sequence: " + to_string(a.dims()) + " and right-hand side " + to_string(b.dims()) +
                         " do not conform");
  }
  const std::size_t r = std::min(a.n1(), a.n2());
  const std::size_t limit = k_max.value_or(r);
  if (limit > r) {
    throw DimensionError("build_sequence: k_max = " + std::to_string(limit) + " exceeds min(n1, n2) = " +
                         std::to_string(r));
  }
  TtsvdSequenceState st;
  st.factors = tsvd(a);
  const auto triplets = truncated_expansion(st.factors);

  std::vector<Tensor3> all_deltas;
  double largest = 0.0;
  for (std::size_t j = 0; j < limit; ++j) {
    Tensor3 d = tprod(tprod(singular_tube_pinv(st.factors, j), ttranspose(triplets[j].u)), b);
    largest = std::max(largest, frobenius_norm(d));
    all_deltas.push_back(std::move(d));
  }

  const Dims xd{a.n2(), b.n2(), a.n3()};
  Tensor3 partial(xd);
  st.partial_sums.push_back(partial);
  for (std::size_t j = 0; j < limit; ++j) {
    const double nd = frobenius_norm(all_deltas[j]);
    if (nd == 0.0 || nd <= delta_drop_tolerance * largest) continue;
    Tensor3 diff = tprod(triplets[j].v, all_deltas[j]);
    partial += diff;
    st.members.push_back(j);
    st.thetas.push_back(tprod(ttranspose(all_deltas[j]), all_deltas[j]));
    st.deltas.push_back(std::move(all_deltas[j]));
    st.differences.push_back(std::move(diff));
    st.partial_sums.push_back(partial);
  }
  if (st.differences.empty()) st.differences = Stack4::zeros(0, xd);
  return st;
}

BetaResult closed_form_beta(const std::vector<Tensor3>& thetas, std::size_t k, std::optional<double> shift) {
  if (k == 0 || thetas.size() < k + 1) {
    throw InsufficientTermsError("closed_form_beta: need Theta_1..Theta_" + std::to_string(k + 1) + ", have " +
                                 std::to_string(thetas.size()));
  }
  BetaResult out;
  const Dims d = thetas[0].dims();
  for (std::size_t i = 0; i < k; ++i) {
    Tensor3 inv;
    if (is_invertible(thetas[i]).invertible || !shift) {
      inv = tinverse(thetas[i]);
    } else {
      inv = tinverse(thetas[i] + *shift * Tensor3::identity(d.n1, d.n3), 0.0);
      ++out.shifted;
    }
    out.beta.push_back(tprod(inv, thetas[k]));
  }
  return out;
}

TrreStep trre_tsvd_step(const TtsvdSequenceState& state, std::size_t k, std::optional<double> shift) {
  if (k == 0 || state.size() < k + 1) {
    throw InsufficientTermsError("trre_tsvd_step: k = " + std::to_string(k) + " needs " + std::to_string(k + 1) +
                                 " sequence members, have " + std::to_string(state.size()));
  }
  const Dims d = state.thetas[0].dims();
  const Tensor3 eye = Tensor3::identity(d.n1, d.n3);
  TrreStep out;
  out.k = k;
  auto beta = closed_form_beta(state.thetas, k, shift);
  out.beta = std::move(beta.beta);
  out.shifted = beta.shifted;

  Tensor3 sum = eye;
  for (const auto& b : out.beta) sum += b;
  const Tensor3 inv = tinverse(sum, 0.0);
  Tensor3 last = eye;
  for (const auto& b : out.beta) {
    Tensor3 g = tprod(b, inv);
    last -= g;
    out.gamma.push_back(std::move(g));
  }
  out.gamma.push_back(std::move(last));
  out.alpha = gamma_to_alpha(out.gamma);
  out.t_k = star(leading(state.differences, k), out.alpha);
  return out;
}

double residual_norm(const std::vector<Tensor3>& thetas, const Stack4& gamma, std::size_t k) {
  if (k == 0 || thetas.size() < k || gamma.count() < k) {
    throw InsufficientTermsError("residual_norm: need Theta_k and gamma_{k-1}");
  }
  double tr = first_slice_trace(tprod(thetas[k - 1], gamma[k - 1]));
  if (tr < -1e-10) {
    throw ConsistencyError("residual_norm: squared residual evaluates to " + std::to_string(tr));
  }
  return std::sqrt(std::max(tr, 0.0));
}

double direct_residual_norm(const TtsvdSequenceState& state, const Stack4& gamma) {
  if (gamma.count() > state.size()) throw InsufficientTermsError("direct_residual_norm: gamma longer than sequence");
  return frobenius_norm(star(leading(state.differences, gamma.count()), gamma));
}

double eta_ratio(const TtsvdSequenceState& state, const Stack4& alpha_k, const Stack4& alpha_k1) {
  const std::size_t k = alpha_k.count();
  if (alpha_k1.count() != k + 1 || state.size() < k + 1) {
    throw DimensionError("eta_ratio: expected coefficient stacks of lengths k and k + 1");
  }
  auto quad = [&](const Tensor3& x, std::size_t j) {
    return first_slice_trace(tprod(tprod(ttranspose(x), state.thetas[j]), x));
  };
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    num += quad(alpha_k1[j] - alpha_k[j], j);
    den += quad(alpha_k[j], j);
  }
  num += quad(alpha_k1[k], k);
  if (!(den > 0.0)) throw Error("eta_ratio: T_k has zero norm");
  return std::sqrt(std::max(num, 0.0) / den);
}

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::tolerance:
      return "tolerance";
    case StopReason::k_max:
      return "k_max";
    case StopReason::sequence_exhausted:
      return "sequence_exhausted";
  }
  return "unknown";
}

SolverReport solve(const Tensor3& a, const Tensor3& b, const SolverOptions& options) {
  const TtsvdSequenceState state = build_sequence(a, b);
  const std::size_t m = state.size();
  SolverReport rep;
  rep.sequence_length = m;
  rep.stop_reason = StopReason::sequence_exhausted;
  if (m == 0) {
    rep.solution = state.partial_sums[0];
    return rep;
  }

  const Dims cd = state.thetas[0].dims();
  SolverIteration first;
  first.k = 1;
  first.t_k = state.partial_sums[1];
  first.solution_norm = frobenius_norm(first.t_k);
  if (m >= 2) {
    const TrreStep s1 = trre_tsvd_step(state, 1, options.shift);
    first.shifted = s1.shifted;
    first.residual_norm = s1.shifted == 0 ? residual_norm(state.thetas, s1.gamma, 1)
                                          : direct_residual_norm(state, s1.gamma);
  }
  rep.history.push_back(first);
  rep.solution = first.t_k;
  rep.final_k = 1;

  const std::size_t limit = std::min(options.k_max.value_or(m - 1), m - 1);
  Stack4 prev_alpha(std::vector<Tensor3>{Tensor3::identity(cd.n1, cd.n3)});
  for (std::size_t k = 2; k <= limit; ++k) {
    const TrreStep step = trre_tsvd_step(state, k, options.shift);
    SolverIteration it;
    it.k = k;
    it.shifted = step.shifted;
    it.residual_norm = step.shifted == 0 ? residual_norm(state.thetas, step.gamma, k)
                                         : direct_residual_norm(state, step.gamma);
    it.eta = eta_ratio(state, prev_alpha, step.alpha);
    it.t_k = step.t_k;
    it.solution_norm = frobenius_norm(step.t_k);
    rep.history.push_back(it);
    rep.solution = step.t_k;
    rep.final_k = k;
    prev_alpha = step.alpha;
    if (std::min(it.residual_norm, *it.eta) < options.tol) {
      rep.stop_reason = StopReason::tolerance;
      return rep;
    }
  }
  if (options.k_max && *options.k_max < m - 1) rep.stop_reason = StopReason::k_max;
  return rep;
}

}  // namespace textrap
