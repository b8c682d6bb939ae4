#pragma once

#include "textrap/tensor.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace textrap {

/// A tensor seen through the DFT along its third mode: face f is the n1 x n2
/// complex matrix sum_k slice_k * exp(-2*pi*i*f*k/n3).
///
/// `faces` holds either all n3 faces or only the leading n3/2 + 1 of them. For
/// a real source the remaining faces are conjugates, face(n3 - f) = conj(face f).
struct FaceDomainTensor {
  Dims dims;
  std::vector<Eigen::MatrixXcd> faces;

  [[nodiscard]] bool is_half() const noexcept;
};

/// Number of faces that determine a real tensor of depth n3.
[[nodiscard]] constexpr std::size_t half_face_count(std::size_t n3) noexcept { return n3 / 2 + 1; }

/// True for the faces that equal their own conjugate (f = 0, and n3/2 for even n3).
[[nodiscard]] constexpr bool is_self_conjugate_face(std::size_t f, std::size_t n3) noexcept {
  return f == 0 || 2 * f == n3;
}

/// All n3 faces (unnormalized forward transform).
[[nodiscard]] FaceDomainTensor dft_faces(const Tensor3& t);
/// Faces 0..n3/2 only.
[[nodiscard]] FaceDomainTensor dft_half_faces(const Tensor3& t);

/// Normalized inverse transform. Accepts full or half face sets. A full set
/// is checked for conjugate symmetry and self-conjugate faces for vanishing
/// imaginary parts; deviations above 1e-10 (relative to the largest face
/// entry) raise ConsistencyError since the result would not be real.
[[nodiscard]] Tensor3 idft_faces(const FaceDomainTensor& f);

/// Extends a half face set to all n3 faces in place.
void mirror_faces(FaceDomainTensor& f);

/// Largest |face(n3-f) - conj(face f)| over all pairs, plus the imaginary
/// residue of self-conjugate faces. Requires a full face set.
[[nodiscard]] double conjugate_symmetry_deviation(const FaceDomainTensor& f);

}  // namespace textrap
