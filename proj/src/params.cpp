#include "bubblesim/params.hpp"

#include <algorithm>
#include <sstream>

namespace bubblesim {

bool ValidationReport::passed() const
{
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.ok; });
}

std::vector<std::string> ValidationReport::failures() const
{
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.ok) out.push_back(c.message);
  return out;
}

namespace {

void check(ValidationReport& r, const std::string& name, bool ok, const std::string& violated)
{
  r.checks.push_back({name, ok, ok ? std::string() : violated});
}

} // namespace

ValidationReport validate_params(const SimulationParams& p)
{
  ValidationReport r;
  check(r, "mu_f", p.mu_f > 0.0, "mu_f <= 0");
  check(r, "nu_f", p.nu_f >= 0.0, "nu_f < 0");
  check(r, "nu_b", p.nu_b >= 0.0, "nu_b < 0");
  check(r, "a_f", p.a_f > 0.0, "a_f <= 0");
  check(r, "a_b", p.a_b > 0.0, "a_b <= 0");
  check(r, "gamma_f", p.gamma_f > 1.5, "gamma_f <= 3/2");
  check(r, "gamma_b", p.gamma_b > 1.5, "gamma_b <= 3/2");
  check(r, "delta", p.delta >= 0.0, "delta < 0");
  if (p.delta > 0.0) {
    const double bound = std::max({8.0, 2.0 * p.gamma_f, 2.0 * p.gamma_b});
    std::ostringstream msg;
    msg << "beta < max{8, 2 gamma_f, 2 gamma_b} = " << bound;
    check(r, "beta", p.beta >= bound, msg.str());
  }
  check(r, "epsilon", p.epsilon >= 0.0, "epsilon < 0");
  check(r, "n_pen", p.n_pen >= 0.0, "n_pen < 0");
  check(r, "kappa_b", p.kappa_b >= 0.0, "kappa_b < 0");
  check(r, "g", p.g.allFinite(), "g not finite");
  check(r, "rho_b0", p.rho_b0 > 0.0, "rho_b0 <= 0");
  return r;
}

} // namespace bubblesim
