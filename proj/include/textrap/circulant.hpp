#pragma once

#include "textrap/tensor.hpp"

#include <Eigen/Dense>

namespace textrap {

/// Block-circulant matrix of shape (n1*n3) x (n2*n3) whose block (i, j) is
/// frontal slice (i - j) mod n3. Meant for oracles and small instances only:
/// throws OracleCapError when n1*n3 or n2*n3 exceeds the context oracle cap.
[[nodiscard]] Eigen::MatrixXd bcirc(const Tensor3& t);

/// Frontal slices stacked vertically, an (n1*n3) x n2 matrix.
[[nodiscard]] Eigen::MatrixXd matvec_unfold(const Tensor3& t);

/// Inverse of matvec_unfold. `m` must be (n1*n3) x n2.
[[nodiscard]] Tensor3 fold(const Eigen::MatrixXd& m, Dims dims);

}  // namespace textrap
