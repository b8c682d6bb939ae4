#include "textrap/extrapolation.hpp"

#include "textrap/dft.hpp"
#include "textrap/error.hpp"
#include "textrap/stack_products.hpp"
#include "textrap/tproduct.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cctype>

namespace textrap {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::tmpe:
      return "tmpe";
    case Method::trre:
      return "trre";
    case Method::tmmpe:
      return "tmmpe";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "tmpe") return Method::tmpe;
  if (lower == "trre") return Method::trre;
  if (lower == "tmmpe") return Method::tmmpe;
  return std::nullopt;
}

namespace {

void require_terms(const TensorSequence& seq, std::size_t needed, const char* what) {
  if (seq.count() < needed) {
    throw InsufficientTermsError(std::string(what) + " needs " + std::to_string(needed) + " terms, sequence has " +
                                 std::to_string(seq.count()));
  }
}

Stack4 slice_range(const Stack4& s, std::size_t first, std::size_t count) {
  std::vector<Tensor3> out(s.slices().begin() + static_cast<std::ptrdiff_t>(first),
                           s.slices().begin() + static_cast<std::ptrdiff_t>(first + count));
  return Stack4(std::move(out));
}

}  // namespace

DifferenceStacks difference_stacks(const TensorSequence& seq, std::size_t n, std::size_t k) {
  require_terms(seq, n + k + 2, "difference_stacks");
  DifferenceStacks out;
  for (std::size_t j = 0; j <= k; ++j) out.delta.push_back(seq[n + j + 1] - seq[n + j]);
  for (std::size_t j = 0; j < k; ++j) out.delta2.push_back(out.delta[j + 1] - out.delta[j]);
  return out;
}

Stack4 build_y_stack(Method method, const TensorSequence& seq, std::size_t n, std::size_t k,
                     const std::optional<Stack4>& custom_y) {
  switch (method) {
    case Method::tmpe: {
      const auto d = difference_stacks(seq, n, k);
      return slice_range(d.delta, 0, k);
    }
    case Method::trre:
      return difference_stacks(seq, n, k).delta2;
    case Method::tmmpe:
      if (!custom_y) throw Error("TMMPE needs a test stack Y");
      if (custom_y->count() < k) {
        throw DimensionError("TMMPE test stack has " + std::to_string(custom_y->count()) + " slices, need " +
                             std::to_string(k));
      }
      if (!seq.empty() && custom_y->slice_dims() != seq.slice_dims()) {
        throw DimensionError("TMMPE test stack slices must match the sequence shape");
      }
      return slice_range(*custom_y, 0, k);
  }
  throw Error("unknown extrapolation method");
}

Stack4 default_tmmpe_y(Dims dims, std::size_t k) {
  std::vector<Tensor3> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    Tensor3 y(dims);
    for (std::size_t c = 0; c < dims.n2; ++c) y((i * dims.n2 + c) % dims.n1, c, 0) = 1.0;
    out.push_back(std::move(y));
  }
  return out.empty() ? Stack4::zeros(0, dims) : Stack4(std::move(out));
}

Stack4 solve_beta_system(const Stack4& l, const Stack4& v, const Tensor3& rhs) {
  if (l.count() != v.count() || l.empty()) {
    throw DimensionError("solve_beta_system: test and difference stacks must have the same nonzero length");
  }
  const Stack5 m = diamond(l, v);
  std::vector<Tensor3> r;
  for (const auto& t : diamond(l, rhs)) r.push_back(-t);
  return solve_block_system(m, Stack4(std::move(r)));
}

Stack4 beta_to_gamma(const Stack4& beta, bool regularize) {
  if (beta.empty()) throw DimensionError("beta_to_gamma: empty coefficient stack");
  const Dims d = beta.slice_dims();
  if (d.n1 != d.n2) throw DimensionError("beta_to_gamma: coefficients must be square");
  Tensor3 sum = Tensor3::identity(d.n1, d.n3);
  for (const auto& b : beta) sum += b;
  Tensor3 inv;
  try {
    inv = tinverse(sum);
  } catch (const SingularFaceError&) {
    if (!regularize) throw;
    const FaceDomainTensor f = dft_half_faces(sum);
    double top = 0.0;
    for (const auto& face : f.faces) top = std::max(top, Eigen::JacobiSVD<Eigen::MatrixXcd>(face).singularValues()(0));
    // An exactly zero sum has no magnitude to scale by; shift by 1e-10 absolute.
    const double shift = 1e-10 * (top > 0.0 ? top : 1.0);
    inv = tinverse(sum + shift * Tensor3::identity(d.n1, d.n3), 0.0);
  }
  std::vector<Tensor3> gamma;
  gamma.reserve(beta.count() + 1);
  for (const auto& b : beta) gamma.push_back(tprod(b, inv));
  gamma.push_back(inv);
  return Stack4(std::move(gamma));
}

Stack4 gamma_to_alpha(const Stack4& gamma) {
  if (gamma.count() < 2) throw DimensionError("gamma_to_alpha needs at least two coefficients");
  const Dims d = gamma.slice_dims();
  const std::size_t k = gamma.count() - 1;
  std::vector<Tensor3> alpha;
  alpha.reserve(k);
  alpha.push_back(Tensor3::identity(d.n1, d.n3) - gamma[0]);
  for (std::size_t j = 1; j < k; ++j) alpha.push_back(alpha[j - 1] - gamma[j]);
  double scale = 1.0;
  for (const auto& g : gamma) scale = std::max(scale, frobenius_norm(g));
  const double gap = frobenius_norm(alpha[k - 1] - gamma[k]);
  if (gap > 1e-8 * scale) {
    throw ConsistencyError("alpha_{k-1} differs from gamma_k by " + std::to_string(gap) +
                           "; the gamma coefficients do not sum to I");
  }
  return Stack4(std::move(alpha));
}

ExtrapolationResult extrapolate(const TensorSequence& seq, std::size_t n, std::size_t k, Method method,
                                const std::optional<Stack4>& custom_y, ExtrapolationOptions options) {
  if (k == 0) throw DimensionError("extrapolate: width k must be at least 1");
  require_terms(seq, n + k + 2, "extrapolate");
  const Dims d = seq.slice_dims();
  const auto diffs = difference_stacks(seq, n, k);

  ExtrapolationResult out;
  out.k = k;
  const std::size_t first_zero = diffs.delta.first_zero_slice(0.0);
  if (first_zero < k) {
    out.k = first_zero;
    out.degenerate = true;
  }
  const std::size_t w = out.k;
  if (w == 0) {
    // Delta S_n = 0: nothing to extrapolate.
    out.t_k = seq[n];
    out.gamma = Stack4(std::vector<Tensor3>{Tensor3::identity(d.n2, d.n3)});
    out.beta = Stack4::zeros(0, Dims{d.n2, d.n2, d.n3});
    out.alpha = Stack4::zeros(0, Dims{d.n2, d.n2, d.n3});
    out.residual = diffs.delta[0];
    return out;
  }

  const Stack4 y = build_y_stack(method, seq, n, w, custom_y);
  const std::size_t zero_y = y.first_zero_slice(0.0);
  if (zero_y < y.count()) {
    throw DegenerateSequenceError("test stack member Y_" + std::to_string(zero_y + 1) + " is zero");
  }
  const Stack4 v = slice_range(diffs.delta, 0, w);
  out.beta = solve_beta_system(y, v, diffs.delta[w]);
  out.gamma = beta_to_gamma(out.beta, options.regularize_gamma);
  out.alpha = gamma_to_alpha(out.gamma);
  out.t_k = seq[n] + star(v, out.alpha);
  out.residual = star(slice_range(diffs.delta, 0, w + 1), out.gamma);
  return out;
}

TteaResult ttea_extrapolate(const TensorSequence& seq, std::size_t n, std::size_t k, const Tensor3& y) {
  if (k == 0) throw DimensionError("ttea_extrapolate: width k must be at least 1");
  require_terms(seq, n + 2 * k + 1, "ttea_extrapolate");
  const Dims d = seq.slice_dims();
  if (y.dims() != d) throw DimensionError("ttea_extrapolate: Y must have the sequence shape " + to_string(d));

  std::size_t w = k;
  Stack4 delta;
  for (std::size_t j = 0; j < 2 * k; ++j) delta.push_back(seq[n + j + 1] - seq[n + j]);
  const std::size_t first_zero = delta.first_zero_slice(0.0);
  if (first_zero < k) w = first_zero;
  TteaResult out;
  if (w == 0) {
    out.e_k = seq[n];
    out.beta = Stack4::zeros(0, Dims{d.n2, d.n2, d.n3});
    return out;
  }

  const Tensor3 yt = ttranspose(y);
  std::vector<Tensor3> ytd2;
  for (std::size_t j = 0; j + 1 < 2 * w; ++j) ytd2.push_back(tprod(yt, delta[j + 1] - delta[j]));
  // Unknown beta_{i+1} (column i), equation j: sum_i (Y^T Delta^2 S_{n+i+j}) beta_{i+1} = -Y^T Delta S_{n+j}.
  std::vector<Tensor3> blocks;
  blocks.reserve(w * w);
  for (std::size_t i = 0; i < w; ++i)
    for (std::size_t j = 0; j < w; ++j) blocks.push_back(ytd2[i + j]);
  std::vector<Tensor3> rhs;
  for (std::size_t j = 0; j < w; ++j) rhs.push_back(-tprod(yt, delta[j]));
  out.beta = solve_block_system(Stack5(w, w, std::move(blocks)), Stack4(std::move(rhs)));
  out.e_k = seq[n] + star(slice_range(delta, 0, w), out.beta);
  return out;
}

}  // namespace textrap
