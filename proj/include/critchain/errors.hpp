#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace critchain {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function was evaluated outside its domain (e.g. the pair weight on the diagonal).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// (q, N, kind, U) does not describe a valid model.
class InvalidModel : public Error {
 public:
  using Error::Error;
};

class OutOfSector : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class IllegalMove : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Problem size exceeds what an operation is allowed to allocate.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, double required_bytes)
      : Error(what), required_bytes_(required_bytes) {}
  double required_bytes() const { return required_bytes_; }

 private:
  double required_bytes_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best_residuals)
      : Error(what), best_residuals_(std::move(best_residuals)) {}
  const std::vector<double>& best_residuals() const { return best_residuals_; }

 private:
  std::vector<double> best_residuals_;
};

class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace critchain
