#pragma once

#include <stdexcept>
#include <string>

namespace iqdesign {

// Invalid model parameters, malformed designs, bad user input.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// c outside the range of the information matrix.
class NotEstimable : public std::runtime_error {
 public:
  explicit NotEstimable(const std::string& what) : std::runtime_error(what) {}
};

class SingularMatrix : public std::runtime_error {
 public:
  explicit SingularMatrix(const std::string& what) : std::runtime_error(what) {}
};

class SingularSystem : public std::runtime_error {
 public:
  explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

class NoConvergence : public std::runtime_error {
 public:
  explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

class NotConverged : public std::runtime_error {
 public:
  explicit NotConverged(const std::string& what) : std::runtime_error(what) {}
};

class UnsupportedCriterion : public std::runtime_error {
 public:
  explicit UnsupportedCriterion(const std::string& what) : std::runtime_error(what) {}
};

class UnsupportedSpace : public std::runtime_error {
 public:
  explicit UnsupportedSpace(const std::string& what) : std::runtime_error(what) {}
};

class InfeasibleApportionment : public std::runtime_error {
 public:
  explicit InfeasibleApportionment(const std::string& what) : std::runtime_error(what) {}
};

class InsufficientDesign : public std::runtime_error {
 public:
  explicit InsufficientDesign(const std::string& what) : std::runtime_error(what) {}
};

class TooManyFailedFits : public std::runtime_error {
 public:
  explicit TooManyFailedFits(const std::string& what) : std::runtime_error(what) {}
};

// The minimum eigenvalue of the information matrix is not simple, so the
// rank-one E-optimality certificate does not apply.
class MultipleMinEigenvalue : public std::runtime_error {
 public:
  explicit MultipleMinEigenvalue(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace iqdesign
