#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

#include "bubblesim/geometry.hpp"
#include "bubblesim/grid.hpp"
#include "bubblesim/params.hpp"

namespace bubblesim {

// Row-stacked matrix of blocks with M rows each; only the columns in
// support[b] are stored for block b.
struct BlockColumns {
  Index block_rows = 0;
  int cols = 0;
  std::vector<std::vector<int>> support;
  std::vector<Eigen::MatrixXd> blocks;

  static BlockColumns compress(const Eigen::MatrixXd& X, Index block_rows);
};

// X^T diag(w) Y for block-stacked X, Y with matching block counts; w has
// one entry per row or one per block row shared by all blocks.
Eigen::MatrixXd weighted_gram(const BlockColumns& X, const Eigen::VectorXd& w, const BlockColumns& Y);

struct SineMode {
  std::array<int, 3> k{1, 1, 1};
  int component = 0;
};

// Velocity basis sampled on the grid. Row layout: values row d*M + n,
// gradients row (3d + k)*M + n holding d psi_d / d x_k, strain rows
// (deviatoric part, off-diagonals scaled by sqrt 2) s*M + n.
class GalerkinBasis {
public:
  static GalerkinBasis sine(const BoxDomain& dom, int N, int max_wavenumber = 0);
  static GalerkinBasis from_samples(const BoxDomain& dom, Eigen::MatrixXd values, Eigen::MatrixXd gradients);

  int size() const { return int(values_.cols()); }
  const BoxDomain& domain() const { return dom_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const Eigen::MatrixXd& gradients() const { return gradients_; }
  const Eigen::MatrixXd& strain() const { return strain_; }
  const Eigen::MatrixXd& divergences() const { return div_; }
  const std::vector<SineMode>& modes() const { return modes_; }
  const BlockColumns& value_blocks() const { return value_blocks_; }
  const BlockColumns& gradient_blocks() const { return gradient_blocks_; }
  bool is_sine() const { return !modes_.empty(); }

  VectorField evaluate(const Eigen::VectorXd& alpha) const;
  TensorField evaluate_gradient(const Eigen::VectorXd& alpha) const;
  ScalarField evaluate_divergence(const Eigen::VectorXd& alpha) const;
  VectorField function(int i) const;

  // Closed-form value of a sine mode anywhere in the box.
  Eigen::Vector3d value_at(int i, const Eigen::Vector3d& x) const;
  // sup |psi_i| + sup |grad psi_i|
  double w1inf_norm(int i) const;

  // alpha_i = int u . psi_i
  Eigen::VectorXd project(const VectorField& u) const;
  Eigen::MatrixXd gram() const;

private:
  void finish();

  BoxDomain dom_;
  Eigen::MatrixXd values_;
  Eigen::MatrixXd gradients_;
  Eigen::MatrixXd strain_;
  Eigen::MatrixXd div_;
  BlockColumns value_blocks_;
  BlockColumns gradient_blocks_;
  std::vector<SineMode> modes_;
  double norm_ = 0.0;
};

struct GalerkinState {
  Eigen::VectorXd alpha;
  double t = 0.0;
};

Eigen::MatrixXd assemble_mass(const ScalarField& rho, const GalerkinBasis& basis);

struct DensityRates {
  ScalarField advective;
  ScalarField diffusive;
};

// Pointwise rates of the continuity equation without time discretization.
DensityRates continuous_density_rates(const ScalarField& rho, const VectorField& u, double eps);

struct StiffnessBlocks {
  Eigen::MatrixXd convection;
  Eigen::MatrixXd viscous;
  Eigen::MatrixXd regularization;
  Eigen::MatrixXd penalization;

  Eigen::MatrixXd total() const { return convection + viscous + regularization + penalization; }
};

// Convection and regularization are assembled as skew part plus the mass
// rate (1/2) int rate psi_i psi_j, so that together with A(rho^m) the kinetic
// energy balance of the step is exact. frame carries the ball moments of chi
// used by the projector.
StiffnessBlocks assemble_stiffness(const ScalarField& rho, const VectorField& u, const ScalarField& chi,
                                   const VectorField& grad_rho, const BubbleState& frame, const SimulationParams& p,
                                   const GalerkinBasis& basis, const DensityRates* rates = nullptr);

Eigen::MatrixXd assemble_viscous(const ScalarField& chi, const SimulationParams& p, const GalerkinBasis& basis);
Eigen::MatrixXd assemble_penalization(const ScalarField& chi, const BubbleState& frame, double n_pen,
                                      const GalerkinBasis& basis);

// ||sym(C)||_F / ||C||_F for the literal convection matrix
// C_ij = int rho ((u . grad) psi_j) . psi_i; sym(C) approximates
// -(1/2) int div(rho u) psi_i . psi_j.
double convection_skew_defect(const ScalarField& rho, const VectorField& u, const GalerkinBasis& basis);

Eigen::VectorXd assemble_forcing(const ScalarField& rho, const ScalarField& chi, double R_b, const SimulationParams& p,
                                 const GalerkinBasis& basis);

struct MomentumStepReport {
  double residual = 0.0; // ||M alpha' - rhs|| / ||rhs||
};

// (A + dt B) alpha' = A alpha + dt F
GalerkinState momentum_step(const GalerkinState& state, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                            const Eigen::VectorXd& F, double dt, MomentumStepReport* report = nullptr);

struct ContinuationConstants {
  double Q = 1.0;
  double T_seed = 0.0;
  double T1 = 0.0;
  double T2 = 0.0;
  double K = 0.0;
  double c_p = 0.0;
  double c_0 = 0.0;
  double c_N = 0.0;
  double safe_time = 0.0;
};

double poincare_constant(const BoxDomain& dom);
double collapse_horizon(double R0, double c_p, double K);
double collision_horizon(double dist0, double sigma, double R0, double c_p, double K);

// horizon is the interval length entering the Gronwall constant K.
ContinuationConstants continuation_constants(const SimulationParams& p, const ScalarField& rho0, const VectorField& u0,
                                             const GalerkinBasis& basis, double R0, double dist0, double sigma,
                                             double horizon);

} // namespace bubblesim
