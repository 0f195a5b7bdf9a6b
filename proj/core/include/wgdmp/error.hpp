#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wgdmp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A triangle whose area is negligible relative to its diameter squared.
class DegenerateElement : public Error {
 public:
  DegenerateElement(int element, const std::string& what)
      : Error(what), element_(element) {}
  int element() const { return element_; }

 private:
  int element_;
};

/// Malformed mesh or field file (bad counts, non-numeric tokens, truncation).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a mesh invariant (index range,
/// duplicate triangles, non-manifold edges, Euler characteristic).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A diffusion tensor evaluation that is not symmetric positive definite.
class FieldValidityError : public Error {
 public:
  using Error::Error;
};

/// Zero or negative diagonal in the element block M00.
class SingularBlockError : public Error {
 public:
  using Error::Error;
};

/// Dense audit requested on a system larger than the configured cap.
class SizeCapError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver hit its iteration cap. Carries the relative residual
/// after every iteration.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& residual_history() const { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace wgdmp
