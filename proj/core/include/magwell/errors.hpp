#pragma once

#include <stdexcept>
#include <string>

namespace magwell {

// Exit-code taxonomy shared by the library and the CLI:
//   0 success, 2 unusable input, 3 violated model assumption,
//   4 iteration failed to converge, 5 resolution/grid budget exhausted.
class Error : public std::runtime_error {
public:
  Error(std::string msg, int exit_code)
      : std::runtime_error(std::move(msg)), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

private:
  int exit_code_;
};

// Malformed or out-of-contract input (files, flags, degree overflow).
class ParseError : public Error {
public:
  explicit ParseError(const std::string& msg) : Error(msg, 2) {}
};

// A mathematical assumption of the model does not hold for this input.
class AssumptionViolation : public Error {
public:
  explicit AssumptionViolation(const std::string& msg) : Error(msg, 3) {}
};

class ZeroFieldViolation : public AssumptionViolation {
public:
  explicit ZeroFieldViolation(const std::string& msg) : AssumptionViolation(msg) {}
};

class NonDegenerateWellViolation : public AssumptionViolation {
public:
  explicit NonDegenerateWellViolation(const std::string& msg) : AssumptionViolation(msg) {}
};

class NonUniqueMinimum : public AssumptionViolation {
public:
  explicit NonUniqueMinimum(const std::string& msg) : AssumptionViolation(msg) {}
};

// An iterative method ran out of its iteration budget.
class ConvergenceError : public Error {
public:
  explicit ConvergenceError(const std::string& msg) : Error(msg, 4) {}
};

// Grid/resolution budget exhausted before reaching the required accuracy,
// or the requested geometry cannot be resolved (well too close to boundary).
class ResolutionError : public Error {
public:
  explicit ResolutionError(const std::string& msg) : Error(msg, 5) {}
};

// Verification box clipped by the field domain or too tight around the well.
class BoundaryError : public ResolutionError {
public:
  explicit BoundaryError(const std::string& msg) : ResolutionError(msg) {}
};

// Refinement budget exhausted before two successive measurements agreed.
class InconclusiveResolution : public ResolutionError {
public:
  explicit InconclusiveResolution(const std::string& msg) : ResolutionError(msg) {}
};

// Internal assembly invariant failed (indicates a bug, not bad input).
class ConstructionError : public Error {
public:
  explicit ConstructionError(const std::string& msg) : Error(msg, 1) {}
};

}  // namespace magwell
