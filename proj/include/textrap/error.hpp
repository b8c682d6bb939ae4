#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace textrap {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform to the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A DFT face is singular (or numerically so) where an inverse or a solve is needed.
class SingularFaceError : public Error {
 public:
  SingularFaceError(const std::string& what, std::size_t face, double rcond);

  [[nodiscard]] std::size_t face() const noexcept { return face_; }
  /// Reciprocal condition estimate of the offending face.
  [[nodiscard]] double rcond() const noexcept { return rcond_; }

 private:
  std::size_t face_;
  double rcond_;
};

/// An internal identity that must hold up to rounding was violated.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// bcirc-style oracle invoked on a problem larger than the configured cap.
class OracleCapError : public Error {
 public:
  using Error::Error;
};

/// Not enough sequence terms for the requested extrapolation.
class InsufficientTermsError : public Error {
 public:
  using Error::Error;
};

/// A sequence whose test or difference stack is identically zero.
class DegenerateSequenceError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public IoError {
 public:
  using IoError::IoError;
};

class TruncatedPayloadError : public IoError {
 public:
  using IoError::IoError;
};

class DimensionOverflowError : public IoError {
 public:
  using IoError::IoError;
};

class UnsupportedVersionError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace textrap
