#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vblap {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Bad arguments and violated constructor invariants.
class argument_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A stated precondition does not hold for the given data; carries the
// measured residual when the precondition is a residual threshold.
class precondition_error : public std::runtime_error {
 public:
  precondition_error(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

// Linear algebra failure (near-singular solve, lost accuracy).
class numerical_error : public std::runtime_error {
 public:
  numerical_error(const std::string& what, double condition_estimate)
      : std::runtime_error(what), cond_(condition_estimate) {}
  double condition_estimate() const { return cond_; }

 private:
  double cond_ = 0.0;
};

// Malformed input document; `field` addresses the offending node
// as a JSON-pointer-style path.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace vblap
