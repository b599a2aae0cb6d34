#include "bubblesim/energy.hpp"

#include "bubblesim/modes.hpp"

#include <cmath>
#include <numbers>

namespace bubblesim {

double penalization_defect(const VectorField& u, const ScalarField& chi, const BubbleState& frame)
{
  if (!(frame.radius > 0.0)) return 0.0;
  const ModeVector mv = project(chi, u, frame.radius, frame.center);
  const BoxDomain& dom = chi.domain;
  double s = 0.0;
  for (Index n = 0; n < dom.size(); ++n) {
    if (chi[n] == 0.0) continue;
    s += chi[n] * (u.at(n) - eval_mode(mv, frame.center, dom.node(n))).squaredNorm();
  }
  return s * dom.cell_volume();
}

EnergyReport energy_report(const ScalarField& rho, const VectorField& u, const TensorField& grad_u,
                           const ScalarField& chi, const BubbleState& bubble, const BubbleState& frame,
                           const SimulationParams& p, double t)
{
  const BoxDomain& dom = rho.domain;
  const double w = dom.cell_volume();
  const VectorField grad_rho = gradient(rho);
  EnergyReport e;
  e.t = t;
  e.surface = 2.0 * std::numbers::pi / 3.0 * p.kappa_b * bubble.radius * bubble.radius;
  for (Index n = 0; n < dom.size(); ++n) {
    const double r = rho[n], c = chi[n];
    const Eigen::Vector3d v = u.at(n);
    const Eigen::Matrix3d G = grad_u.at(n);
    const double div = G.trace();
    const Eigen::Matrix3d dev = 0.5 * (G + G.transpose()) - div / 3.0 * Eigen::Matrix3d::Identity();
    const double mu = (1.0 - c) * p.mu_f + c * p.n_pen;
    const double nu = (1.0 - c) * p.nu_f + c * p.nu_b;
    e.kinetic += 0.5 * r * v.squaredNorm();
    e.potential += potential_energy_density(r, c, p);
    e.artificial_potential += artificial_potential_density(r, p);
    e.dissipation += 2.0 * mu * dev.squaredNorm() + nu * div * div;
    if (p.delta != 0.0 && p.epsilon != 0.0)
      e.diffusion += p.delta * p.epsilon * p.beta * std::pow(r, p.beta - 2.0) * grad_rho.at(n).squaredNorm();
    e.work_gravity -= r * p.g.dot(v);
    e.work_pressure += ((1.0 - c) * p.a_f * std::pow(r, p.gamma_f) + c * p.a_b * std::pow(r, p.gamma_b)) * div;
    e.work_artificial += p.delta * std::pow(r, p.beta) * div;
    e.work_surface += c * p.kappa_b / bubble.radius * div;
  }
  e.kinetic *= w;
  e.potential *= w;
  e.artificial_potential *= w;
  e.dissipation *= w;
  e.diffusion *= w;
  e.work_gravity *= w;
  e.work_pressure *= w;
  e.work_artificial *= w;
  e.work_surface *= w;
  e.penalization = p.n_pen * penalization_defect(u, chi, frame);
  return e;
}

EnergyReport energy_report(const ScalarField& rho, const VectorField& u, const ScalarField& chi,
                           const BubbleState& bubble, const SimulationParams& p, double t)
{
  BubbleState frame;
  if (integrate(chi) > 0.0) frame = moments_from_indicator(chi);
  return energy_report(rho, u, jacobian(u), chi, bubble, frame, p, t);
}

EnergyReport energy_report(const ScalarField& rho, const GalerkinBasis& basis, const Eigen::VectorXd& alpha,
                           const ScalarField& chi, const BubbleState& bubble, const BubbleState& frame,
                           const SimulationParams& p, double t)
{
  return energy_report(rho, basis.evaluate(alpha), basis.evaluate_gradient(alpha), chi, bubble, frame, p, t);
}

std::vector<double> energy_inequality_residual(const std::vector<EnergyReport>& series, double dt)
{
  std::vector<double> r(series.size(), 0.0);
  double acc = 0.0;
  for (std::size_t k = 1; k < series.size(); ++k) {
    acc += dt * (series[k].dissipative() - series[k].work());
    r[k] = series[k].energy() - series[0].energy() + acc;
  }
  return r;
}

std::vector<double> delta_level_residual(const std::vector<EnergyReport>& series, double dt)
{
  const auto E = [](const EnergyReport& e) { return e.kinetic + e.potential + e.surface; };
  std::vector<double> r(series.size(), 0.0);
  double acc = 0.0;
  for (std::size_t k = 1; k < series.size(); ++k) {
    acc += dt * (series[k].dissipation - series[k].work_gravity);
    r[k] = E(series[k]) - E(series[0]) + acc;
  }
  return r;
}

CompatibilityReport compatibility_checks(const ScalarField& rho, const VectorField& u, const ScalarField& chi,
                                         const BubbleState& bubble, const BubbleState& frame, double R0,
                                         double rho_b0, double sigma)
{
  const BoxDomain& dom = rho.domain;
  const double target = std::pow(R0 / bubble.radius, 3) * rho_b0;
  double dev = 0.0, ref = 0.0, u2 = 0.0;
  for (Index n = 0; n < dom.size(); ++n) {
    const double c = chi[n];
    if (c == 0.0) continue;
    dev += c * (rho[n] - target) * (rho[n] - target);
    ref += c * target * target;
    u2 += c * u.at(n).squaredNorm();
  }
  CompatibilityReport r;
  r.density_deviation = ref > 0.0 ? std::sqrt(dev / ref) : 0.0;
  const double pen = penalization_defect(u, chi, frame);
  r.velocity_deviation = u2 > 0.0 ? std::sqrt(pen / (u2 * dom.cell_volume())) : 0.0;
  r.distance_margin = dom.distance_to_boundary(bubble.center) - bubble.radius - sigma;
  return r;
}

} // namespace bubblesim
