#pragma once

#include <vector>

#include "bubblesim/galerkin.hpp"
#include "bubblesim/geometry.hpp"
#include "bubblesim/grid.hpp"
#include "bubblesim/params.hpp"

namespace bubblesim {

struct EnergyReport {
  double t = 0.0;
  double kinetic = 0.0;              // int rho |u|^2 / 2
  double potential = 0.0;            // int P_delta(rho, chi)
  double artificial_potential = 0.0; // int delta rho^beta / (beta - 1)
  double surface = 0.0;              // (2 pi / 3) kappa_b R_b^2
  double dissipation = 0.0;          // int 2 mu |D u - div u I / 3|^2 + nu |div u|^2
  double penalization = 0.0;         // n int chi |u - Pi u|^2
  double diffusion = 0.0;            // delta eps beta int rho^(beta-2) |grad rho|^2
  double work_gravity = 0.0;         // -int rho g . u
  double work_pressure = 0.0;        // int ((1-chi) a_f rho^gamma_f + chi a_b rho^gamma_b) div u
  double work_artificial = 0.0;      // int delta rho^beta div u
  double work_surface = 0.0;         // int chi kappa_b / R_b div u

  // Energy bounded by the a priori estimate: kinetic plus artificial potential.
  double energy() const { return kinetic + artificial_potential; }
  double dissipative() const { return dissipation + penalization + diffusion; }
  double work() const { return work_gravity + work_pressure + work_surface; }
};

// grad_u must hold the derivatives the assembly uses; frame is the ball
// fitted to chi.
EnergyReport energy_report(const ScalarField& rho, const VectorField& u, const TensorField& grad_u,
                           const ScalarField& chi, const BubbleState& bubble, const BubbleState& frame,
                           const SimulationParams& p, double t = 0.0);

// Finite-difference velocity gradient and moment-fitted frame.
EnergyReport energy_report(const ScalarField& rho, const VectorField& u, const ScalarField& chi,
                           const BubbleState& bubble, const SimulationParams& p, double t = 0.0);

// Exact derivatives of a Galerkin velocity.
EnergyReport energy_report(const ScalarField& rho, const GalerkinBasis& basis, const Eigen::VectorXd& alpha,
                           const ScalarField& chi, const BubbleState& bubble, const BubbleState& frame,
                           const SimulationParams& p, double t = 0.0);

// r_k = E_k - E_0 + dt sum_{j=1..k} (dissipative_j - work_j); rates at the end
// of each step. r <= 0 means the inequality holds.
std::vector<double> energy_inequality_residual(const std::vector<EnergyReport>& series, double dt);

// Same bookkeeping with the pressure potentials and surface energy moved to
// the left: E = kinetic + potential + surface, only gravity work on the right.
std::vector<double> delta_level_residual(const std::vector<EnergyReport>& series, double dt);

struct CompatibilityReport {
  double density_deviation = 0.0;  // relative L2(chi) distance to (R0/R_b)^3 rho_b0
  double velocity_deviation = 0.0; // relative L2(chi) distance of u to Pi u
  double distance_margin = 0.0;    // dist(B, boundary) - sigma
};

CompatibilityReport compatibility_checks(const ScalarField& rho, const VectorField& u, const ScalarField& chi,
                                         const BubbleState& bubble, const BubbleState& frame, double R0,
                                         double rho_b0, double sigma);

// int chi |u - Pi u|^2
double penalization_defect(const VectorField& u, const ScalarField& chi, const BubbleState& frame);

} // namespace bubblesim
