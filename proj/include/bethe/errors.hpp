#pragma once

#include <stdexcept>
#include <string>

namespace bethe {

/// Argument outside the set on which an operation is defined
/// (e.g. a point outside the analytic window, an odd/negative order).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A configured size limit (enumeration order, explicit walk count,
/// accumulator size) would be exceeded.
class CapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Evaluation at a pole of a closed-form transform.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quadrature refinement hit its node cap before meeting tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error estimate " +
                           std::to_string(achieved) + ")"),
        achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace bethe
