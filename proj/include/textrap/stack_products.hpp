#pragma once

#include "textrap/tensor.hpp"

namespace textrap {

/// a has l slices, b has k slices, all n1 x n2 x n3. Returns the k x l grid
/// whose block (j, i) is a_i^T * b_j.
[[nodiscard]] Stack5 diamond(const Stack4& a, const Stack4& b);
/// The k = 1 case: slice i is a_i^T * b. b may have any number of columns.
[[nodiscard]] Stack4 diamond(const Stack4& a, const Tensor3& b);

/// a is a k x l grid, b has k slices. Slice i of the result is
/// sum_j a(j, i) * b_j.
[[nodiscard]] Stack4 star(const Stack5& a, const Stack4& b);
/// sum_eta a_eta * b_eta for two stacks of equal length.
[[nodiscard]] Tensor3 star(const Stack4& a, const Stack4& b);

/// Both grids k x l. Block (tau, eta) of the k x k result is
/// sum_j a(eta, j) * b(tau, j).
[[nodiscard]] Stack5 bar_star(const Stack5& a, const Stack5& b);

/// Grid transpose of a square grid: result(i, j) = a(j, i).
[[nodiscard]] Stack5 adjoint_swap(const Stack5& a);

/// max over blocks of the distance between (binv bar_star b) and the block
/// identity grid.
[[nodiscard]] double left_inverse_residual(const Stack5& binv, const Stack5& b);
[[nodiscard]] bool verify_left_inverse(const Stack5& binv, const Stack5& b, double tol);

/// Builds a left inverse face by face from the Moore-Penrose pseudoinverse of
/// the stacked face matrices. One exists only when the (l*n2) x (k*n1) face
/// matrices have full column rank; otherwise the result fails
/// verify_left_inverse.
[[nodiscard]] Stack5 construct_left_inverse(const Stack5& b);

/// Solves m star x = rhs for x, where m is a square k x k grid of p x p
/// blocks and rhs has k slices of shape p x s. Each DFT face gives one dense
/// (k*p) x (k*p) system, solved by partial-pivoted LU. Throws
/// SingularFaceError when a face system has reciprocal condition below
/// `rcond_threshold`.
[[nodiscard]] Stack4 solve_block_system(const Stack5& m, const Stack4& rhs, double rcond_threshold = 1e-14);

}  // namespace textrap
