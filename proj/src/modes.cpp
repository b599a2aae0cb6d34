#include "bubblesim/modes.hpp"

#include "bubblesim/errors.hpp"

#include <numbers>

namespace bubblesim {

VectorField mode_field(const BoxDomain& dom, const ModeVector& mv, const Eigen::Vector3d& x_c)
{
  VectorField out(dom);
  for (Index n = 0; n < dom.size(); ++n) out.set(n, eval_mode(mv, x_c, dom.node(n)));
  return out;
}

ModeVector project(const ScalarField& chi, const VectorField& u, double R, const Eigen::Vector3d& x_c)
{
  if (!(R > 0.0)) throw SimulationError(AbortCause::domain, "projection radius must be positive");
  const BoxDomain& dom = chi.domain;
  Eigen::Vector3d m0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d m1 = Eigen::Vector3d::Zero();
  double m2 = 0.0;
  for (Index n = 0; n < dom.size(); ++n) {
    const double c = chi[n];
    if (c == 0.0) continue;
    const Eigen::Vector3d r = dom.node(n) - x_c;
    const Eigen::Vector3d v = u.at(n);
    m0 += c * v;
    m1 += c * r.cross(v);
    m2 += c * r.dot(v);
  }
  const double w = dom.cell_volume();
  const double pi = std::numbers::pi;
  const double R3 = R * R * R, R5 = R3 * R * R;
  ModeVector mv;
  mv.V = 3.0 / (4.0 * pi * R3) * w * m0;
  mv.omega = 15.0 / (8.0 * pi * R5) * w * m1;
  mv.Lambda = 3.0 * 5.0 / (4.0 * pi * R5) * w * m2;
  return mv;
}

ModeVector project_no_rotation(const ScalarField& chi, const VectorField& u, double R, const Eigen::Vector3d& x_c)
{
  ModeVector mv = project(chi, u, R, x_c);
  mv.omega.setZero();
  return mv;
}

VectorField projected_field(const ScalarField& chi, const VectorField& u, double R, const Eigen::Vector3d& x_c)
{
  return mode_field(chi.domain, project(chi, u, R, x_c), x_c);
}

} // namespace bubblesim
