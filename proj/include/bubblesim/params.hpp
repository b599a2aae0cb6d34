#pragma once

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <vector>

#include "bubblesim/errors.hpp"

namespace bubblesim {

// Physical and scheme constants. The body force density is -rho * g.
struct SimulationParams {
  double mu_f = 0.05;
  double nu_f = 0.0;
  double nu_b = 0.05;
  double a_f = 1.0;
  double gamma_f = 1.6;
  double a_b = 1.0;
  double gamma_b = 1.6;
  double delta = 1e-3;
  double beta = 8.0;
  double epsilon = 1e-2;
  double n_pen = 1e2;
  double kappa_b = 0.0;
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  double rho_b0 = 1.0;
};

struct ValidationCheck {
  std::string name;
  bool ok = true;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool passed() const;
  std::vector<std::string> failures() const;
};

ValidationReport validate_params(const SimulationParams& p);

namespace detail {
template <typename Scalar>
void require_density(Scalar rho, Scalar chi)
{
  if (!(rho >= Scalar(0)))
    throw SimulationError(AbortCause::domain, "negative density in constitutive law");
  if (!(chi >= Scalar(0) && chi <= Scalar(1)))
    throw SimulationError(AbortCause::domain, "bubble fraction outside [0,1]");
}
} // namespace detail

// p_delta = (1-chi) a_f rho^gamma_f + chi a_b rho^gamma_b + delta rho^beta
template <typename Scalar>
Scalar pressure(Scalar rho, Scalar chi, const SimulationParams& p)
{
  using std::pow;
  detail::require_density(rho, chi);
  return (Scalar(1) - chi) * Scalar(p.a_f) * pow(rho, Scalar(p.gamma_f)) +
         chi * Scalar(p.a_b) * pow(rho, Scalar(p.gamma_b)) +
         Scalar(p.delta) * pow(rho, Scalar(p.beta));
}

// Pressure potential P with rho P'(rho) - P(rho) = p(rho) in each pure phase.
template <typename Scalar>
Scalar potential_energy_density(Scalar rho, Scalar chi, const SimulationParams& p)
{
  using std::pow;
  detail::require_density(rho, chi);
  if (p.gamma_f == 1.0 || p.gamma_b == 1.0 || p.beta == 1.0)
    throw SimulationError(AbortCause::domain, "potential undefined for exponent 1");
  return (Scalar(1) - chi) * Scalar(p.a_f) * pow(rho, Scalar(p.gamma_f)) / Scalar(p.gamma_f - 1.0) +
         chi * Scalar(p.a_b) * pow(rho, Scalar(p.gamma_b)) / Scalar(p.gamma_b - 1.0) +
         Scalar(p.delta) * pow(rho, Scalar(p.beta)) / Scalar(p.beta - 1.0);
}

// Only the delta rho^beta part of the potential.
template <typename Scalar>
Scalar artificial_potential_density(Scalar rho, const SimulationParams& p)
{
  using std::pow;
  if (p.delta == 0.0) return Scalar(0);
  return Scalar(p.delta) * pow(rho, Scalar(p.beta)) / Scalar(p.beta - 1.0);
}

} // namespace bubblesim
