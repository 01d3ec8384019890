#pragma once

#include <stdexcept>
#include <string>

namespace qdio {

// Base of all precondition and domain failures raised by the library.
// `code()` is the machine-readable tag used in CLI error objects.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class MalformedForm : public Error {
 public:
  explicit MalformedForm(const std::string& what) : Error("MalformedForm", what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error("DimensionMismatch", what) {}
};

class SingularForm : public Error {
 public:
  explicit SingularForm(const std::string& what) : Error("SingularForm", what) {}
};

class NotApplicable : public Error {
 public:
  explicit NotApplicable(const std::string& what) : Error("NotApplicable", what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("InvalidArgument", what) {}
};

class NotTotallyIsotropic : public Error {
 public:
  explicit NotTotallyIsotropic(const std::string& what) : Error("NotTotallyIsotropic", what) {}
};

class NotOnQuadric : public Error {
 public:
  explicit NotOnQuadric(const std::string& what) : Error("NotOnQuadric", what) {}
};

class EmptyLightCone : public Error {
 public:
  explicit EmptyLightCone(const std::string& what) : Error("EmptyLightCone", what) {}
};

}  // namespace qdio
