#pragma once

#include <stdexcept>
#include <string>

namespace kdvb {

/// Precondition or parameter-range violation.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Non-finite state during time stepping.
struct BlowUpError : std::runtime_error {
  BlowUpError(const std::string& what, double last_good)
      : std::runtime_error(what), last_good_time(last_good) {}
  double last_good_time;
};

/// Successive Picard iterates moved apart.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Quadrature that could not reach its tolerance or window.
struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, double err)
      : std::runtime_error(what), error_estimate(err) {}
  double error_estimate;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

}  // namespace kdvb
