#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>

#include "bubblesim/grid.hpp"

namespace bubblesim {

// Element of span{translation, rotation, dilation}; Lambda is the dilation
// rate, so the field is V + omega x r + (Lambda/3) r with r = x - x_c.
template <typename Scalar>
struct BasicModeVector {
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
  Vec3 V = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  Scalar Lambda = Scalar(0);

  bool allFinite() const { return V.allFinite() && omega.allFinite() && std::isfinite(double(Lambda)); }
};

using ModeVector = BasicModeVector<double>;

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> eval_mode(const BasicModeVector<Scalar>& mv, const Eigen::Matrix<Scalar, 3, 1>& x_c,
                                      const Eigen::Matrix<Scalar, 3, 1>& x)
{
  const Eigen::Matrix<Scalar, 3, 1> r = x - x_c;
  return mv.V + mv.omega.cross(r) + (mv.Lambda / Scalar(3)) * r;
}

VectorField mode_field(const BoxDomain& dom, const ModeVector& mv, const Eigen::Vector3d& x_c);

ModeVector project(const ScalarField& chi, const VectorField& u, double R, const Eigen::Vector3d& x_c);
ModeVector project_no_rotation(const ScalarField& chi, const VectorField& u, double R, const Eigen::Vector3d& x_c);

// Pi u evaluated on the grid.
VectorField projected_field(const ScalarField& chi, const VectorField& u, double R, const Eigen::Vector3d& x_c);

} // namespace bubblesim
