#include "bubblesim/geometry.hpp"

#include "bubblesim/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>

namespace bubblesim {

AffineBubbleMap AffineBubbleMap::from_states(const BubbleState& reference, const BubbleState& current)
{
  return {current.center, current.radius / reference.radius, Eigen::Matrix3d::Identity()};
}

bool AffineBubbleMap::is_proper_rotation(double tol) const
{
  return (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).norm() <= tol &&
         std::abs(rotation.determinant() - 1.0) <= tol;
}

Eigen::Vector3d apply_map(const AffineBubbleMap& m, const Eigen::Vector3d& x, const Eigen::Vector3d& x0)
{
  return m.translation + m.scale * (m.rotation * (x - x0));
}

BubbleInertia bubble_inertia(const BubbleState& state, double rho_b0, double R0)
{
  if (!(state.radius > 0.0)) throw SimulationError(AbortCause::collapse, "bubble radius is not positive");
  const double R = state.radius;
  BubbleInertia b;
  b.mass = 4.0 * std::numbers::pi / 3.0 * R0 * R0 * R0 * rho_b0;
  b.density = std::pow(R0 / R, 3) * rho_b0;
  b.moment = 0.4 * b.mass * R * R;
  b.dilational = b.mass * R * R / 15.0;
  return b;
}

BubbleState moments_from_indicator(const ScalarField& chi)
{
  const double vol = integrate(chi);
  if (!(vol > 0.0)) throw SimulationError(AbortCause::degenerate_indicator, "indicator has no mass");
  const BoxDomain& dom = chi.domain;
  Eigen::Vector3d first = Eigen::Vector3d::Zero();
  for (Index n = 0; n < dom.size(); ++n)
    if (chi[n] != 0.0) first += chi[n] * dom.node(n);
  first *= dom.cell_volume();
  BubbleState s;
  s.radius = std::cbrt(3.0 / (4.0 * std::numbers::pi) * vol);
  s.center = first / vol;
  return s;
}

} // namespace bubblesim
