#pragma once

#include <Eigen/Core>

#include "bubblesim/grid.hpp"

namespace bubblesim {

struct BubbleState {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

// x -> a + (R/R0) O (x - x0)
struct AffineBubbleMap {
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();

  static AffineBubbleMap identity_at(const Eigen::Vector3d& x0) { return {x0, 1.0, Eigen::Matrix3d::Identity()}; }
  static AffineBubbleMap from_states(const BubbleState& reference, const BubbleState& current);
  bool is_proper_rotation(double tol = 1e-10) const;
};

Eigen::Vector3d apply_map(const AffineBubbleMap& m, const Eigen::Vector3d& x, const Eigen::Vector3d& x0);

struct BubbleInertia {
  double mass = 0.0;
  double moment = 0.0;     // J = 2/5 m R^2
  double dilational = 0.0; // K = m R^2 / 15
  double density = 0.0;
};

BubbleInertia bubble_inertia(const BubbleState& state, double rho_b0, double R0);

// Radius and centre of the ball with the same volume and first moment as chi.
BubbleState moments_from_indicator(const ScalarField& chi);

} // namespace bubblesim
