#include "bubblesim/errors.hpp"

namespace bubblesim {

std::string to_string(AbortCause cause)
{
  switch (cause) {
  case AbortCause::validation: return "validation";
  case AbortCause::domain: return "domain";
  case AbortCause::collapse: return "collapse";
  case AbortCause::collision: return "collision";
  case AbortCause::negative_density: return "negative_density";
  case AbortCause::cfl_violation: return "cfl_violation";
  case AbortCause::degenerate_indicator: return "degenerate_indicator";
  case AbortCause::solver_failure: return "solver_failure";
  }
  return "unknown";
}

int exit_code(AbortCause cause)
{
  switch (cause) {
  case AbortCause::validation:
  case AbortCause::domain:
    return 2;
  case AbortCause::collapse:
  case AbortCause::collision:
    return 3;
  case AbortCause::negative_density:
  case AbortCause::cfl_violation:
  case AbortCause::degenerate_indicator:
  case AbortCause::solver_failure:
    return 4;
  }
  return 4;
}

} // namespace bubblesim
