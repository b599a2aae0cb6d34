#pragma once

#include <stdexcept>
#include <string>

namespace bubblesim {

enum class AbortCause {
  validation,
  domain,
  collapse,
  collision,
  negative_density,
  cfl_violation,
  degenerate_indicator,
  solver_failure,
};

std::string to_string(AbortCause cause);

// 2 = validation, 3 = physics abort, 4 = numerical failure
int exit_code(AbortCause cause);

class SimulationError : public std::runtime_error {
public:
  SimulationError(AbortCause cause, const std::string& what, double time = 0.0)
      : std::runtime_error(what), cause_(cause), time_(time) {}

  AbortCause cause() const { return cause_; }
  double time() const { return time_; }

private:
  AbortCause cause_;
  double time_;
};

} // namespace bubblesim
