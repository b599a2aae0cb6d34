#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bubblesim/energy.hpp"
#include "bubblesim/errors.hpp"
#include "bubblesim/galerkin.hpp"
#include "bubblesim/grid.hpp"
#include "bubblesim/params.hpp"

namespace bubblesim {

inline constexpr int kConfigSchemaVersion = 1;

enum class DensityProfile { uniform, pressure_balanced };
enum class VelocityInit { zero, modes, coefficients };

struct InitialData {
  Eigen::Vector3d x0{0.5, 0.5, 0.5};
  double R0 = 0.15;
  double rho_f = 1.0;
  DensityProfile density = DensityProfile::uniform;
  VelocityInit velocity = VelocityInit::modes;
  Eigen::Vector3d V0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d omega0 = Eigen::Vector3d::Zero();
  double Lambda0 = 0.0;
  double cutoff_width = 0.1; // taper of the mode field outside B0
  std::vector<double> coefficients;
};

struct RunConfig {
  SimulationParams params;
  BoxDomain domain = BoxDomain::unit_cube(32);
  int N = 24;
  int max_wavenumber = 0;
  InitialData initial;
  double dt = 1e-3;
  double T = 0.2;
  int picard_iterations = 0;
  double picard_tolerance = 1e-10;
  double sigma = 0.05;
  bool override_horizon = false;
  int cadence = 1;
  int field_cadence = 0;
  unsigned seed = 0;

  long steps() const;
};

RunConfig config_from_json_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string config_to_json_text(const RunConfig& c);

struct InitialState {
  ScalarField rho;
  ScalarField chi;
  Eigen::VectorXd alpha;
};

InitialState initial_state(const RunConfig& c, const GalerkinBasis& basis);

struct RunSummary {
  bool ok = true;
  std::optional<AbortCause> cause;
  std::string message;
  long steps_completed = 0;
  double t_end = 0.0;

  ContinuationConstants constants;
  std::vector<double> times;
  std::vector<EnergyReport> energy;
  std::vector<double> residual;       // N-level energy residual
  std::vector<double> delta_residual; // delta-level form
  std::vector<double> kinetic;
  std::vector<BubbleState> trajectory;
  std::vector<double> density_deviation;
  std::vector<double> velocity_deviation;
  std::vector<double> distance_margin;
  std::vector<double> entropy_residual;
  std::vector<double> rho_min, rho_max, bound_lower, bound_upper;
  double max_mass_defect = 0.0;
  double max_advective_number = 0.0;
  double max_skew_defect = 0.0;
  double penalization_integral = 0.0; // int_0^T int chi |u - Pi u|^2
  std::vector<double> penalization_defect; // int chi |u - Pi u|^2 after each step
  double initial_bubble_velocity = 0.0;    // ||u_0||_{L2(chi_0)}
  long max_principle_violations = 0;

  double initial_energy() const { return energy.empty() ? 0.0 : energy.front().energy(); }
  double max_positive_residual() const;
  double max_abs_residual() const;
  // time RMS of ||u - Pi u||_{L2(chi)} over ||u_0||_{L2(chi_0)}
  double velocity_deviation_rms() const;
  double max_density_deviation() const;
  double max_abs_entropy_residual() const;
  double drift() const;
  int exit_code() const { return ok ? 0 : bubblesim::exit_code(*cause); }
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  bool quiet = true;
};

// Never throws for simulation aborts; they are reported in the summary (and
// error.json when an output directory is given).
RunSummary run(const RunConfig& config, const RunOptions& options = {});

enum class SweepAxis { n_pen, epsilon, delta, N, dt, h };

struct SweepSpec {
  SweepAxis axis = SweepAxis::n_pen;
  std::vector<double> values;
  std::vector<std::string> metrics;
};

struct SweepRow {
  double value = 0.0;
  RunSummary summary;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRow> rows;

  // Least-squares slope of log(metric) against log(axis value).
  double slope(const std::string& metric) const;
  // sup_t |KE_i(t) - KE_{i+1}(t)| between consecutive members sharing a time grid.
  std::vector<double> kinetic_cauchy_differences() const;
};

RunConfig apply_axis(const RunConfig& base, SweepAxis axis, double value);
SweepAxis parse_axis(const std::string& name);
std::string axis_name(SweepAxis axis);
double metric_value(const RunSummary& s, const std::string& metric);
const std::vector<std::string>& known_metrics();

void validate_sweep(const SweepSpec& spec);
SweepResult sweep(const SweepSpec& spec, const RunConfig& base, const std::optional<std::filesystem::path>& out_dir = {},
                  int jobs = 1);

struct CheckLine {
  std::string name;
  bool ok = true;
  std::string detail;
};

// Re-validates a run directory from its CSV output.
std::vector<CheckLine> check_run_dir(const std::filesystem::path& dir);

} // namespace bubblesim
