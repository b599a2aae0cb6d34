#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

#include "bubblesim/geometry.hpp"
#include "bubblesim/grid.hpp"

namespace bubblesim {

// Equal-weight lattice over the reference ball B(x0, R0). Weights are scaled
// so that the zeroth and second radial moments of the ball are exact.
struct ReferenceBall {
  Eigen::Vector3d x0 = Eigen::Vector3d::Zero();
  double R0 = 0.0;
  std::vector<Eigen::Vector3d> offsets; // y - x0
  double volume_weight = 0.0;
  double moment_weight = 0.0;

  static ReferenceBall build(const Eigen::Vector3d& x0, double R0, int points_per_axis = 20);
};

struct BubbleRate {
  Eigen::Vector3d dx = Eigen::Vector3d::Zero();
  double dR = 0.0;
};

BubbleRate ode_rhs(double t, const BubbleState& X, const VectorField& u, const ReferenceBall& ball);

// Horizon T with T * sup_t ||u||_{L2} = R0 sqrt(pi R0 / 5).
double safe_time(double R0, double u_norm);

struct TrajectorySample {
  double t = 0.0;
  BubbleState state;
  Eigen::Vector3d V = Eigen::Vector3d::Zero();
  double Lambda = 0.0;
};

struct BubbleTrajectory {
  std::vector<TrajectorySample> samples;
  double min_radius() const;
};

using VelocityHistory = std::function<const VectorField&(double)>;

// Classical RK4; aborts with a collapse error once R < R0/2.
BubbleTrajectory integrate_bubble(const BubbleState& X0, const VelocityHistory& u, double t0, double t1, double dt,
                                  const ReferenceBall& ball);

// One RK4 step under a velocity frozen over the step.
BubbleState rk4_step(double t, const BubbleState& X, const VectorField& u, double dt, const ReferenceBall& ball);

} // namespace bubblesim
