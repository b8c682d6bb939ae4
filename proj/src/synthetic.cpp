#include "textrap/synthetic.hpp"

#include "textrap/dft.hpp"
#include "textrap/error.hpp"
#include "textrap/tproduct.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace textrap {

namespace {

using Index = Eigen::Index;

double max_face_norm(const Tensor3& t) {
  double top = 0.0;
  for (const auto& face : dft_half_faces(t).faces) {
    if (face.size() == 0) continue;
    top = std::max(top, Eigen::JacobiSVD<Eigen::MatrixXcd>(face).singularValues()(0));
  }
  return top;
}

Tensor3 scaled_to_norm(Tensor3 t, double target) {
  const double top = max_face_norm(t);
  if (top > 0.0) t *= target / top;
  return t;
}

Tensor3 block_diagonal(const Tensor3& top, const Tensor3& bottom) {
  Tensor3 out(top.n1() + bottom.n1(), top.n2() + bottom.n2(), top.n3());
  for (std::size_t k = 0; k < top.n3(); ++k) {
    auto s = out.slice(k);
    s.topLeftCorner(static_cast<Index>(top.n1()), static_cast<Index>(top.n2())) = top.slice(k);
    s.bottomRightCorner(static_cast<Index>(bottom.n1()), static_cast<Index>(bottom.n2())) = bottom.slice(k);
  }
  return out;
}

LinearSequenceProblem iterate(Tensor3 m, Tensor3 x_star, Tensor3 s0, std::size_t term_count) {
  LinearSequenceProblem p;
  const Tensor3 eye = Tensor3::identity(m.n1(), m.n3());
  p.c = tprod(eye - m, x_star);
  p.m = std::move(m);
  p.fixed_point = std::move(x_star);
  Tensor3 s = std::move(s0);
  for (std::size_t j = 0; j < term_count; ++j) {
    p.terms.push_back(s);
    s = tprod(p.m, s) + p.c;
  }
  return p;
}

}  // namespace

Tensor3 random_tensor(Dims dims, Rng& rng) {
  std::normal_distribution<double> normal;
  Tensor3 t(dims);
  for (double& v : t.data()) v = normal(rng);
  return t;
}

Tensor3 random_orthogonal(std::size_t n, std::size_t n3, Rng& rng) {
  std::normal_distribution<double> normal;
  FaceDomainTensor f{Dims{n, n, n3}, {}};
  for (std::size_t k = 0; k < half_face_count(n3); ++k) {
    Eigen::MatrixXcd g(static_cast<Index>(n), static_cast<Index>(n));
    const bool real = is_self_conjugate_face(k, n3);
    for (Index j = 0; j < g.cols(); ++j)
      for (Index i = 0; i < g.rows(); ++i) g(i, j) = {normal(rng), real ? 0.0 : normal(rng)};
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(g.rows(), g.cols());
    if (real) q = q.real().cast<std::complex<double>>();
    f.faces.push_back(std::move(q));
  }
  return idft_faces(f);
}

Tensor3 tensor_with_singular_values(Dims dims, const std::vector<double>& sigma, Rng& rng) {
  const std::size_t r = std::min(dims.n1, dims.n2);
  if (sigma.size() > r) throw DimensionError("more singular values than min(n1, n2)");
  std::vector<double> sorted = sigma;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  Tensor3 s(dims);
  for (std::size_t j = 0; j < sorted.size(); ++j) s(j, j, 0) = sorted[j];
  const Tensor3 u = random_orthogonal(dims.n1, dims.n3, rng);
  const Tensor3 v = random_orthogonal(dims.n2, dims.n3, rng);
  return tprod(tprod(u, s), ttranspose(v));
}

std::optional<DecayProfile> parse_profile(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "geometric") return DecayProfile::geometric;
  if (lower == "algebraic") return DecayProfile::algebraic;
  return std::nullopt;
}

std::string_view profile_name(DecayProfile p) {
  return p == DecayProfile::geometric ? "geometric" : "algebraic";
}

std::optional<SolutionKind> parse_solution_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "gaussian") return SolutionKind::gaussian;
  if (lower == "source") return SolutionKind::source;
  return std::nullopt;
}

std::string_view solution_kind_name(SolutionKind k) {
  return k == SolutionKind::gaussian ? "gaussian" : "source";
}

std::vector<double> decay_values(DecayProfile profile, double rate, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t j = 1; j <= count; ++j) {
    const double x = static_cast<double>(j);
    out.push_back(profile == DecayProfile::geometric ? std::pow(10.0, -x * rate) : std::pow(x, -rate));
  }
  return out;
}

IllPosedProblem generate_ill_posed(const IllPosedConfig& config, Rng& rng) {
  const Dims d = config.dims;
  if (d.n1 == 0 || d.n2 == 0 || d.n3 == 0 || config.rhs_cols == 0) throw DimensionError("problem dims must be positive");
  if (!(config.noise >= 0.0)) throw Error("noise level must be nonnegative");
  IllPosedProblem p;
  p.a = tensor_with_singular_values(d, decay_values(config.profile, config.rate, std::min(d.n1, d.n2)), rng);
  if (config.solution == SolutionKind::source) {
    p.x_true = tprod(ttranspose(p.a), random_tensor(Dims{d.n1, config.rhs_cols, d.n3}, rng));
  } else {
    p.x_true = random_tensor(Dims{d.n2, config.rhs_cols, d.n3}, rng);
  }
  p.b_exact = tprod(p.a, p.x_true);
  p.b = p.b_exact;
  if (config.noise > 0.0) {
    Tensor3 e = random_tensor(p.b.dims(), rng);
    const double ne = frobenius_norm(e);
    if (ne > 0.0) p.b += (config.noise * frobenius_norm(p.b_exact) / ne) * e;
  }
  return p;
}

LinearSequenceProblem make_linear_sequence(Dims dims, std::size_t k, std::size_t term_count, Rng& rng,
                                           double contraction) {
  const std::size_t inner = k * dims.n2;
  if (inner >= dims.n1) throw DimensionError("make_linear_sequence needs n1 > k * n2");
  const Tensor3 m1 = scaled_to_norm(random_tensor(Dims{inner, inner, dims.n3}, rng), contraction);
  const std::size_t rest = dims.n1 - inner;
  const Tensor3 n = scaled_to_norm(random_tensor(Dims{rest, rest, dims.n3}, rng), contraction);
  const Tensor3 q = random_orthogonal(dims.n1, dims.n3, rng);
  Tensor3 m = tprod(tprod(q, block_diagonal(m1, n)), ttranspose(q));

  Tensor3 z(dims);
  const Tensor3 zr = random_tensor(Dims{inner, dims.n2, dims.n3}, rng);
  for (std::size_t kk = 0; kk < dims.n3; ++kk)
    z.slice(kk).topRows(static_cast<Index>(inner)) = zr.slice(kk);
  const Tensor3 e0 = tprod(q, z);
  Tensor3 x_star = random_tensor(dims, rng);
  Tensor3 s0 = x_star + e0;
  return iterate(std::move(m), std::move(x_star), std::move(s0), term_count);
}

LinearSequenceProblem make_generic_linear_sequence(Dims dims, std::size_t term_count, Rng& rng, double contraction) {
  Tensor3 m = scaled_to_norm(random_tensor(Dims{dims.n1, dims.n1, dims.n3}, rng), contraction);
  Tensor3 x_star = random_tensor(dims, rng);
  Tensor3 s0 = x_star + random_tensor(dims, rng);
  return iterate(std::move(m), std::move(x_star), std::move(s0), term_count);
}

}  // namespace textrap
