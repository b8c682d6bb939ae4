#include "textrap/error.hpp"

#include <sstream>

namespace textrap {

namespace {

std::string describe_face(const std::string& what, std::size_t face, double rcond) {
  std::ostringstream os;
  os << what << " (face " << face << ", rcond " << rcond << ")";
  return os.str();
}

}  // namespace

SingularFaceError::SingularFaceError(const std::string& what, std::size_t face, double rcond)
    : Error(describe_face(what, face, rcond)), face_(face), rcond_(rcond) {}

}  // namespace textrap
