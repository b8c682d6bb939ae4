#pragma once

#include "textrap/tensor.hpp"

#include <Eigen/Dense>

#include <vector>

/// Reference computations that deliberately avoid the DFT path. They are
/// slow and only meant for checking the fast implementations at small sizes.
namespace textrap::oracle {

/// Block-circulant matrix assembled entry by entry. With `flip_sign`, every
/// block off the main block diagonal is negated (a planted defect used to
/// check that the verification suites can fail).
[[nodiscard]] Eigen::MatrixXd bcirc_entries(const Tensor3& t, bool flip_sign = false);

/// fold(bcirc(x) * MatVec(y)).
[[nodiscard]] Tensor3 tprod_bcirc(const Tensor3& x, const Tensor3& y, bool flip_sign = false);

/// Circular convolution of frontal slices: slice k = sum_j x_j * y_{(k - j) mod n3}.
[[nodiscard]] Tensor3 tprod_convolution(const Tensor3& x, const Tensor3& y);

/// Faces by direct O(n3^2) summation.
[[nodiscard]] std::vector<Eigen::MatrixXcd> dft_direct(const Tensor3& t);

/// Matrix pseudoinverse via SVD with threshold eps * max(rows, cols) * sigma_max.
[[nodiscard]] Eigen::MatrixXd pinv(const Eigen::MatrixXd& m);

/// The tensor whose bcirc is pinv(bcirc(a)).
[[nodiscard]] Tensor3 pinv_bcirc(const Tensor3& a);

/// fold(pinv(bcirc(a)) * MatVec(b)).
[[nodiscard]] Tensor3 tls_bcirc(const Tensor3& a, const Tensor3& b);

/// Classical vector extrapolation on columns s_0, s_1, ... of `s`.
/// Each returns sum_j gamma_j s_{n+j}.
[[nodiscard]] Eigen::VectorXd mpe(const Eigen::MatrixXd& s, int n, int k);
[[nodiscard]] Eigen::VectorXd rre(const Eigen::MatrixXd& s, int n, int k);
/// y holds the k test vectors as columns.
[[nodiscard]] Eigen::VectorXd mmpe(const Eigen::MatrixXd& s, int n, int k, const Eigen::MatrixXd& y);
[[nodiscard]] Eigen::VectorXd tea(const Eigen::MatrixXd& s, int n, int k, const Eigen::VectorXd& y);

}  // namespace textrap::oracle
