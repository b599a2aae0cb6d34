#pragma once

#include <Eigen/Core>

#include <array>
#include <functional>

namespace bubblesim {

using Index = Eigen::Index;

// Axis-aligned box with a cell-centred grid: node (i,j,k) sits at
// lower + (i + 1/2, j + 1/2, k + 1/2) * h. Storage is x-fastest.
struct BoxDomain {
  Eigen::Vector3d lower = Eigen::Vector3d::Zero();
  Eigen::Vector3d upper = Eigen::Vector3d::Ones();
  std::array<int, 3> resolution{32, 32, 32};

  static BoxDomain unit_cube(int n) { return {Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), {n, n, n}}; }

  void validate() const;
  Index size() const { return Index(resolution[0]) * resolution[1] * resolution[2]; }
  Eigen::Vector3d extent() const { return upper - lower; }
  Eigen::Vector3d spacing() const;
  double cell_volume() const;
  double volume() const { return extent().prod(); }
  Index flat(int i, int j, int k) const { return i + Index(resolution[0]) * (j + Index(resolution[1]) * k); }
  std::array<int, 3> unflat(Index n) const;
  Eigen::Vector3d node(int i, int j, int k) const;
  Eigen::Vector3d node(Index n) const;
  bool contains(const Eigen::Vector3d& x) const;
  // Distance from x to the nearest face (negative outside).
  double distance_to_boundary(const Eigen::Vector3d& x) const;

  bool operator==(const BoxDomain& o) const
  {
    return lower == o.lower && upper == o.upper && resolution == o.resolution;
  }
};

template <typename Scalar>
struct BasicScalarField {
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  BoxDomain domain;
  Values values;

  BasicScalarField() = default;
  explicit BasicScalarField(const BoxDomain& d, Scalar fill = Scalar(0)) : domain(d), values(Values::Constant(d.size(), fill)) {}
  BasicScalarField(const BoxDomain& d, Values v) : domain(d), values(std::move(v)) {}

  Scalar& operator[](Index n) { return values[n]; }
  Scalar operator[](Index n) const { return values[n]; }
};

// One column per component.
template <typename Scalar>
struct BasicVectorField {
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>;
  BoxDomain domain;
  Values values;

  BasicVectorField() = default;
  explicit BasicVectorField(const BoxDomain& d) : domain(d), values(Values::Zero(d.size(), 3)) {}
  BasicVectorField(const BoxDomain& d, Values v) : domain(d), values(std::move(v)) {}

  Eigen::Matrix<Scalar, 3, 1> at(Index n) const { return values.row(n).transpose(); }
  void set(Index n, const Eigen::Matrix<Scalar, 3, 1>& v) { values.row(n) = v.transpose(); }
};

// Column 3*d + k holds d u_d / d x_k.
template <typename Scalar>
struct BasicTensorField {
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, 9>;
  BoxDomain domain;
  Values values;

  BasicTensorField() = default;
  explicit BasicTensorField(const BoxDomain& d) : domain(d), values(Values::Zero(d.size(), 9)) {}

  Eigen::Matrix<Scalar, 3, 3> at(Index n) const
  {
    Eigen::Matrix<Scalar, 3, 3> m;
    for (int d = 0; d < 3; ++d)
      for (int k = 0; k < 3; ++k) m(d, k) = values(n, 3 * d + k);
    return m;
  }
  void set(Index n, const Eigen::Matrix<Scalar, 3, 3>& m)
  {
    for (int d = 0; d < 3; ++d)
      for (int k = 0; k < 3; ++k) values(n, 3 * d + k) = m(d, k);
  }
};

using ScalarField = BasicScalarField<double>;
using VectorField = BasicVectorField<double>;
using TensorField = BasicTensorField<double>;

template <typename Scalar>
Scalar integrate(const BasicScalarField<Scalar>& f)
{
  return f.values.sum() * Scalar(f.domain.cell_volume());
}

ScalarField sample(const BoxDomain& dom, const std::function<double(const Eigen::Vector3d&)>& f);
VectorField sample(const BoxDomain& dom, const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& f);

// Cell value = fraction of samples^3 sub-cell midpoints inside the ball.
ScalarField ball_indicator(const BoxDomain& dom, const Eigen::Vector3d& center, double radius, int samples = 4);

// Second-order central differences, second-order one-sided at the boundary.
Eigen::VectorXd partial(const BoxDomain& dom, const Eigen::Ref<const Eigen::VectorXd>& f, int axis);
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& u);
TensorField jacobian(const VectorField& u);
TensorField sym_gradient(const VectorField& u);

// Trilinear interpolation between node values; points beyond the outermost
// nodes take the clamped value.
Eigen::Vector3d interpolate(const VectorField& u, const Eigen::Vector3d& x);
double interpolate(const ScalarField& f, const Eigen::Vector3d& x);

double l2_norm(const VectorField& u);
double sup_norm(const VectorField& u);

} // namespace bubblesim
