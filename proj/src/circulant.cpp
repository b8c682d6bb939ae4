#include "textrap/circulant.hpp"

#include "textrap/context.hpp"
#include "textrap/error.hpp"

namespace textrap {

Eigen::MatrixXd bcirc(const Tensor3& t) {
  const Dims d = t.dims();
  const std::size_t cap = default_context().oracle_cap();
  if (d.n1 * d.n3 > cap || d.n2 * d.n3 > cap) {
    throw OracleCapError("bcirc of a " + to_string(d) + " tensor exceeds the oracle cap of " + std::to_string(cap));
  }
  const auto r = static_cast<Eigen::Index>(d.n1);
  const auto c = static_cast<Eigen::Index>(d.n2);
  Eigen::MatrixXd m(r * static_cast<Eigen::Index>(d.n3), c * static_cast<Eigen::Index>(d.n3));
  for (std::size_t bi = 0; bi < d.n3; ++bi) {
    for (std::size_t bj = 0; bj < d.n3; ++bj) {
      m.block(static_cast<Eigen::Index>(bi) * r, static_cast<Eigen::Index>(bj) * c, r, c) =
          t.slice((bi + d.n3 - bj) % d.n3);
    }
  }
  return m;
}

Eigen::MatrixXd matvec_unfold(const Tensor3& t) {
  const Dims d = t.dims();
  const auto r = static_cast<Eigen::Index>(d.n1);
  Eigen::MatrixXd m(r * static_cast<Eigen::Index>(d.n3), static_cast<Eigen::Index>(d.n2));
  for (std::size_t k = 0; k < d.n3; ++k) m.middleRows(static_cast<Eigen::Index>(k) * r, r) = t.slice(k);
  return m;
}

Tensor3 fold(const Eigen::MatrixXd& m, Dims dims) {
  if (static_cast<std::size_t>(m.rows()) != dims.n1 * dims.n3 || static_cast<std::size_t>(m.cols()) != dims.n2) {
    throw DimensionError("fold: matrix shape does not match " + to_string(dims));
  }
  Tensor3 t(dims);
  const auto r = static_cast<Eigen::Index>(dims.n1);
  for (std::size_t k = 0; k < dims.n3; ++k) t.slice(k) = m.middleRows(static_cast<Eigen::Index>(k) * r, r);
  return t;
}

}  // namespace textrap
