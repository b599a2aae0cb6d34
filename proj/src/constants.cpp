#include "bubblesim/galerkin.hpp"

#include "bubblesim/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bubblesim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

// Young-inequality constant absorbing a rho^gamma div u work term into
// theta |div u|^2 and the artificial potential.
double pressure_absorption(double a, double gamma, double beta, double delta, double theta)
{
  const double e = beta - 2.0 * gamma;
  return std::pow(a, 2.0 * beta / e) * e / (4.0 * theta * beta) *
         std::pow(6.0 * gamma * (beta - 1.0) / (4.0 * theta * delta * beta), 2.0 * gamma / e);
}

} // namespace

double poincare_constant(const BoxDomain& dom)
{
  const Eigen::Vector3d L = dom.extent();
  return 1.0 / (kPi * std::sqrt((L.array().square().inverse()).sum()));
}

double collapse_horizon(double R0, double c_p, double K)
{
  return kPi * std::pow(R0, 5) / (5.0 * c_p * c_p * K);
}

double collision_horizon(double dist0, double sigma, double R0, double c_p, double K)
{
  if (dist0 <= 2.0 * sigma) return 0.0;
  const double c0 = (std::sqrt(3.0) + std::sqrt(5.0)) / (R0 * std::sqrt(4.0 * kPi * R0));
  const double m = dist0 - 2.0 * sigma;
  return m * m / (c0 * c0 * c_p * c_p * K);
}

ContinuationConstants continuation_constants(const SimulationParams& p, const ScalarField& rho0, const VectorField& u0,
                                             const GalerkinBasis& basis, double R0, double dist0, double sigma,
                                             double horizon)
{
  const BoxDomain& dom = rho0.domain;
  const double w = dom.cell_volume();
  const double vol = dom.volume();
  const double rho_lo = rho0.values.minCoeff();
  const double rho_hi = rho0.values.maxCoeff();

  ContinuationConstants c;
  const double momentum = (rho0.values.array() * u0.values.rowwise().squaredNorm().array()).sum() * w;
  c.Q = std::max(1.0, 4.0 / rho_lo * momentum);

  double sum = 0.0;
  for (int i = 0; i < basis.size(); ++i) sum += std::pow(basis.w1inf_norm(i), 2);
  c.c_N = std::max(std::sqrt(sum), std::sqrt(vol));

  const double gamma_bar = std::max({p.gamma_f, p.gamma_b, p.delta > 0.0 ? p.beta : 0.0});
  const double g_norm = p.g.norm() * std::sqrt(vol);
  const double source = p.kappa_b / R0 + p.a_f * std::pow(rho_hi, p.gamma_f) + p.a_b * std::pow(rho_hi, p.gamma_b) +
                        p.delta * std::pow(rho_hi, p.beta);
  c.T_seed = std::min({std::log(2.0) / (2.0 * c.Q),
                       g_norm > 0.0 ? rho_lo * c.Q / (16.0 * rho_hi * g_norm) : kInf,
                       std::log(2.0) / (gamma_bar * c.c_N * c.Q),
                       source > 0.0 ? rho_lo * c.Q / (32.0 * c.c_N * vol * source) : kInf});

  c.c_p = poincare_constant(dom);
  c.c_0 = (std::sqrt(3.0) + std::sqrt(5.0)) / (R0 * std::sqrt(4.0 * kPi * R0));

  const double energy0 = 0.5 * momentum + (p.delta > 0.0 ? p.delta / (p.beta - 1.0) * rho0.values.array().pow(p.beta).sum() * w : 0.0);
  const bool absorbable = p.delta > 0.0 && p.beta > 2.0 * p.gamma_f && p.beta > 2.0 * p.gamma_b;
  if (!absorbable) {
    c.K = kInf;
  } else {
    const double theta = (std::min(p.nu_f, p.nu_b) + p.mu_f / 3.0) / 6.0;
    const double T = horizon;
    const double c_beta = (p.beta - 1.0) / (2.0 * p.beta) *
                          std::pow(3.0 * (p.beta - 1.0) / (2.0 * p.delta * p.beta), 1.0 / (p.beta - 1.0));
    const double q = 2.0 * p.beta / (p.beta - 1.0);
    const double gravity = c_beta * std::pow(p.g.norm(), q) * T * vol;
    const double press = pressure_absorption(p.a_f, p.gamma_f, p.beta, p.delta, theta) +
                         pressure_absorption(p.a_b, p.gamma_b, p.beta, p.delta, theta);
    const double surface = p.kappa_b * p.kappa_b * T * vol / (theta * R0 * R0);
    c.K = std::exp(T) * (energy0 + gravity + press * T * vol + surface);
  }
  c.T1 = std::isfinite(c.K) ? collapse_horizon(R0, c.c_p, c.K) : 0.0;
  c.T2 = std::isfinite(c.K) ? collision_horizon(dist0, sigma, R0, c.c_p, c.K) : 0.0;
  c.safe_time = bubblesim::safe_time(R0, l2_norm(u0));
  return c;
}

} // namespace bubblesim
