#pragma once

#include <Eigen/Core>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <vector>

#include "bubblesim/grid.hpp"

namespace bubblesim {

struct ContinuityStepReport {
  double mass_before = 0.0;
  double mass_after = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double advective_number = 0.0;  // dt * max|u_face| / h
  double positivity_number = 0.0; // dt * max cell outflow rate
  double divergence_norm = 0.0;   // max |div_h u| of the face velocities
  double solver_residual = 0.0;
  int solver_iterations = 0;
  bool negative_density = false;

  double relative_mass_defect() const;
};

struct ContinuityStepResult {
  ScalarField rho;
  ScalarField advective_rate; // (rho_adv - rho) / dt
  ScalarField diffusive_rate; // (rho' - rho_adv) / dt
  ContinuityStepReport report;
};

// Upwind finite-volume transport with zero normal flux (two-stage SSP
// Runge-Kutta) followed by an implicit Neumann diffusion solve.
class ContinuityStepper {
public:
  ContinuityStepper(const BoxDomain& dom, double eps, double dt, double tolerance = 1e-13);

  ContinuityStepResult step(const ScalarField& rho, const VectorField& u) const;

  double eps() const { return eps_; }
  double dt() const { return dt_; }

private:
  BoxDomain dom_;
  double eps_;
  double dt_;
  double tol_;
  Eigen::SparseMatrix<double> system_;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> solver_;
};

ContinuityStepResult continuity_step(const ScalarField& rho, const VectorField& u, double eps, double dt);

// div_h(rho u) with upwind face values; u on the boundary faces is zero.
ScalarField flux_divergence(const ScalarField& rho, const VectorField& u);
// div_h u of the averaged face velocities.
ScalarField face_divergence(const VectorField& u);
ScalarField neumann_laplacian(const ScalarField& rho);
Eigen::SparseMatrix<double> neumann_laplacian_matrix(const BoxDomain& dom);

struct DensityBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Trapezoidal accumulation of ||div u||_inf over (times, divu_norms).
DensityBounds max_principle_bounds(double rho0_min, double rho0_max, const std::vector<double>& times,
                                   const std::vector<double>& divu_norms);

// r_k = S(rho_k) - S(rho_0) + sum_{j<k} dt_j (int rho_j div_j + int rho_{j+1} div_j) / 2,
// with S(rho) = int rho log rho and div_j the divergence acting on [t_j, t_{j+1}].
std::vector<double> log_entropy_balance(const std::vector<double>& times, const std::vector<ScalarField>& rho_series,
                                        const std::vector<ScalarField>& divu_series);
std::vector<double> log_entropy_balance(const std::vector<double>& times, const std::vector<ScalarField>& rho_series,
                                        const std::vector<VectorField>& u_series);

double entropy(const ScalarField& rho);

} // namespace bubblesim
