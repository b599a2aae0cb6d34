#include "bubblesim/transport.hpp"

#include "bubblesim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace bubblesim {

ReferenceBall ReferenceBall::build(const Eigen::Vector3d& x0, double R0, int points_per_axis)
{
  if (!(R0 > 0.0)) throw SimulationError(AbortCause::domain, "reference radius must be positive");
  ReferenceBall b;
  b.x0 = x0;
  b.R0 = R0;
  const int n = std::max(points_per_axis, 2);
  double second = 0.0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Eigen::Vector3d y = R0 * (Eigen::Vector3d(2 * i + 1, 2 * j + 1, 2 * k + 1) / n - Eigen::Vector3d::Ones());
        if (y.squaredNorm() < R0 * R0) {
          b.offsets.push_back(y);
          second += y.squaredNorm();
        }
      }
  const double pi = std::numbers::pi;
  b.volume_weight = 4.0 * pi * std::pow(R0, 3) / 3.0 / double(b.offsets.size());
  b.moment_weight = 4.0 * pi * std::pow(R0, 5) / 5.0 / second;
  return b;
}

BubbleRate ode_rhs(double, const BubbleState& X, const VectorField& u, const ReferenceBall& ball)
{
  if (!(X.radius > 0.0)) throw SimulationError(AbortCause::collapse, "bubble radius reached zero");
  const double s = X.radius / ball.R0;
  Eigen::Vector3d m0 = Eigen::Vector3d::Zero();
  double m1 = 0.0;
  for (const auto& y : ball.offsets) {
    const Eigen::Vector3d x = X.center + s * y;
    if (!u.domain.contains(x)) continue;
    const Eigen::Vector3d v = interpolate(u, x);
    m0 += v;
    m1 += y.dot(v);
  }
  const double pi = std::numbers::pi;
  const double R0 = ball.R0;
  BubbleRate f;
  f.dx = 3.0 / (4.0 * pi * R0 * R0 * R0) * ball.volume_weight * m0;
  f.dR = 5.0 / (4.0 * pi * std::pow(R0, 4)) * ball.moment_weight * m1;
  return f;
}

double safe_time(double R0, double u_norm)
{
  if (u_norm == 0.0) return std::numeric_limits<double>::infinity();
  return R0 * std::sqrt(std::numbers::pi * R0 / 5.0) / u_norm;
}

double BubbleTrajectory::min_radius() const
{
  double r = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) r = std::min(r, s.state.radius);
  return r;
}

namespace {

BubbleState advance(const BubbleState& X, const BubbleRate& f, double h)
{
  return {X.center + h * f.dx, X.radius + h * f.dR};
}

void guard_radius(const BubbleState& X, double R0, double t)
{
  if (X.radius < 0.5 * R0) {
    std::ostringstream msg;
    msg << "bubble radius " << X.radius << " fell below R0/2 = " << 0.5 * R0 << " at t = " << t;
    throw SimulationError(AbortCause::collapse, msg.str(), t);
  }
}

TrajectorySample make_sample(double t, const BubbleState& X, const VectorField& u, const ReferenceBall& ball)
{
  const BubbleRate f = ode_rhs(t, X, u, ball);
  return {t, X, f.dx, 3.0 * f.dR / X.radius};
}

} // namespace

BubbleState rk4_step(double t, const BubbleState& X, const VectorField& u, double dt, const ReferenceBall& ball)
{
  const BubbleRate k1 = ode_rhs(t, X, u, ball);
  const BubbleRate k2 = ode_rhs(t + 0.5 * dt, advance(X, k1, 0.5 * dt), u, ball);
  const BubbleRate k3 = ode_rhs(t + 0.5 * dt, advance(X, k2, 0.5 * dt), u, ball);
  const BubbleRate k4 = ode_rhs(t + dt, advance(X, k3, dt), u, ball);
  BubbleState out;
  out.center = X.center + dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  out.radius = X.radius + dt / 6.0 * (k1.dR + 2.0 * k2.dR + 2.0 * k3.dR + k4.dR);
  if (!(out.radius > 0.0)) throw SimulationError(AbortCause::collapse, "bubble radius reached zero", t + dt);
  return out;
}

BubbleTrajectory integrate_bubble(const BubbleState& X0, const VelocityHistory& u, double t0, double t1, double dt,
                                  const ReferenceBall& ball)
{
  if (!(t1 > t0) || !(dt > 0.0)) throw SimulationError(AbortCause::domain, "invalid integration interval");
  BubbleTrajectory traj;
  BubbleState X = X0;
  double t = t0;
  traj.samples.push_back(make_sample(t, X, u(t), ball));
  const auto steps = static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9));
  for (long s = 0; s < steps; ++s) {
    const double h = std::min(dt, t1 - t);
    const BubbleRate k1 = ode_rhs(t, X, u(t), ball);
    const BubbleRate k2 = ode_rhs(t + 0.5 * h, advance(X, k1, 0.5 * h), u(t + 0.5 * h), ball);
    const BubbleRate k3 = ode_rhs(t + 0.5 * h, advance(X, k2, 0.5 * h), u(t + 0.5 * h), ball);
    const BubbleRate k4 = ode_rhs(t + h, advance(X, k3, h), u(t + h), ball);
    X.center += h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    X.radius += h / 6.0 * (k1.dR + 2.0 * k2.dR + 2.0 * k3.dR + k4.dR);
    t = t0 + (s + 1) * dt;
    if (s + 1 == steps) t = t1;
    if (!(X.radius > 0.0)) throw SimulationError(AbortCause::collapse, "bubble radius reached zero", t);
    guard_radius(X, ball.R0, t);
    traj.samples.push_back(make_sample(t, X, u(t), ball));
  }
  return traj;
}

} // namespace bubblesim
