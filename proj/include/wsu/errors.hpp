#ifndef WSU_ERRORS_HPP
#define WSU_ERRORS_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wsu {

// Precondition violated by the caller (bad lengths, negative densities, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// phi is singular at vacuum when alpha <= 1.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Diagnostics that only make sense for mu(rho) = mu rho^gamma.
class UnsupportedRegime : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A time step produced a negative density. Carries the simulation time of
// the failing step once the driver has stamped it (NaN before that).
class StepFailure : public std::runtime_error {
 public:
  explicit StepFailure(const std::string& what,
                       double time = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

// NaN or Inf appeared in the state.
class NumericalFailure : public StepFailure {
 public:
  using StepFailure::StepFailure;
};

// max_steps exhausted before t_end. The templated subclass in solver.hpp
// carries the partial trajectory.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& key, int line, const std::string& message)
      : std::runtime_error(format(key, line, message)), key_(key), line_(line) {}
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& message) {
    std::string out = "config";
    if (line > 0) out += ":" + std::to_string(line);
    if (!key.empty()) out += ": `" + key + "`";
    return out + ": " + message;
  }
  std::string key_;
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wsu

#endif  // WSU_ERRORS_HPP
