#include "bubblesim/driver.hpp"

#include "bubblesim/continuity.hpp"
#include "bubblesim/geometry.hpp"
#include "bubblesim/io.hpp"
#include "bubblesim/modes.hpp"
#include "bubblesim/transport.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

namespace bubblesim {

namespace fs = std::filesystem;

double RunSummary::max_positive_residual() const
{
  double m = 0.0;
  for (double r : residual) m = std::max(m, r);
  return m;
}

double RunSummary::max_abs_residual() const
{
  double m = 0.0;
  for (double r : residual) m = std::max(m, std::abs(r));
  return m;
}

double RunSummary::velocity_deviation_rms() const
{
  if (penalization_defect.empty() || !(initial_bubble_velocity > 0.0)) return 0.0;
  double s = 0.0;
  for (double v : penalization_defect) s += v;
  return std::sqrt(s / double(penalization_defect.size())) / initial_bubble_velocity;
}

double RunSummary::max_density_deviation() const
{
  double m = 0.0;
  for (double v : density_deviation) m = std::max(m, v);
  return m;
}

double RunSummary::max_abs_entropy_residual() const
{
  double m = 0.0;
  for (double v : entropy_residual) m = std::max(m, std::abs(v));
  return m;
}

double RunSummary::drift() const
{
  if (trajectory.empty()) return 0.0;
  return (trajectory.back().center - trajectory.front().center).norm();
}

namespace {

double taper(double d, double R0, double width)
{
  if (d <= R0) return 1.0;
  if (width <= 0.0 || d >= R0 + width) return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * (d - R0) / width);
  return c * c;
}

// Density solving p(rho, chi) + chi kappa / R0 = target, by bisection.
double balanced_density(double chi, double target, const SimulationParams& p, double R0)
{
  const auto f = [&](double r) { return pressure(r, chi, p) + chi * p.kappa_b / R0 - target; };
  double lo = 0.0, hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

InitialState initial_state(const RunConfig& c, const GalerkinBasis& basis)
{
  const BoxDomain& dom = c.domain;
  const InitialData& in = c.initial;
  const SimulationParams& p = c.params;
  InitialState s;
  s.chi = ball_indicator(dom, in.x0, in.R0);
  s.rho = ScalarField(dom);
  if (in.density == DensityProfile::uniform) {
    for (Index n = 0; n < dom.size(); ++n) s.rho[n] = s.chi[n] > 0.0 ? p.rho_b0 : in.rho_f;
  } else {
    const double target = pressure(p.rho_b0, 1.0, p) + p.kappa_b / in.R0;
    const double fluid = balanced_density(0.0, target, p, in.R0);
    for (Index n = 0; n < dom.size(); ++n) {
      const double chi = s.chi[n];
      s.rho[n] = chi == 1.0 ? p.rho_b0 : (chi == 0.0 ? fluid : balanced_density(chi, target, p, in.R0));
    }
  }

  switch (in.velocity) {
  case VelocityInit::zero:
    s.alpha = Eigen::VectorXd::Zero(basis.size());
    break;
  case VelocityInit::modes: {
    ModeVector mv;
    mv.V = in.V0;
    mv.omega = in.omega0;
    mv.Lambda = in.Lambda0;
    const VectorField u0 = sample(dom, [&](const Eigen::Vector3d& x) -> Eigen::Vector3d {
      return taper((x - in.x0).norm(), in.R0, in.cutoff_width) * eval_mode(mv, in.x0, x);
    });
    s.alpha = basis.project(u0);
    break;
  }
  case VelocityInit::coefficients:
    if (int(in.coefficients.size()) != basis.size())
      throw SimulationError(AbortCause::validation, "initial coefficient count does not match N");
    s.alpha = Eigen::Map<const Eigen::VectorXd>(in.coefficients.data(), basis.size());
    break;
  }
  return s;
}

namespace {

void validate_config(const RunConfig& c)
{
  const ValidationReport v = validate_params(c.params);
  if (!v.passed()) {
    std::string msg = "invalid parameters:";
    for (const auto& f : v.failures()) msg += " " + f + ";";
    throw SimulationError(AbortCause::validation, msg);
  }
  c.domain.validate();
  if (!(c.dt > 0.0) || !(c.T > 0.0)) throw SimulationError(AbortCause::validation, "dt and T must be positive");
  if (!(c.initial.R0 > 0.0)) throw SimulationError(AbortCause::validation, "R0 must be positive");
  if (!(c.sigma >= 0.0)) throw SimulationError(AbortCause::validation, "sigma must be nonnegative");
  if (c.domain.distance_to_boundary(c.initial.x0) - c.initial.R0 <= 0.0)
    throw SimulationError(AbortCause::validation, "initial bubble is not inside the domain");
  if (c.cadence < 1) throw SimulationError(AbortCause::validation, "output cadence must be at least 1");
}

struct Outputs {
  std::optional<fs::path> dir;
  CsvWriter energy, trajectory, compat, continuity, coefficients;

  void open(const fs::path& d, int N)
  {
    dir = d;
    fs::create_directories(d);
    energy = CsvWriter(d / "energy.csv",
                       {"t", "kinetic", "potential", "artificial_potential", "surface", "dissipation", "penalization",
                        "diffusion", "work_gravity", "work_pressure", "work_artificial", "work_surface", "energy", "r",
                        "r_delta"});
    trajectory = CsvWriter(d / "trajectory.csv", {"t", "x", "y", "z", "R_b", "rho_b", "m_b", "J", "K"});
    compat = CsvWriter(d / "compatibility.csv",
                       {"t", "density_deviation", "velocity_deviation", "distance_margin", "penalization_defect",
                        "entropy_residual", "rho_min", "rho_max", "bound_lower", "bound_upper", "skew_defect"});
    continuity = CsvWriter(d / "continuity.csv",
                           {"t", "mass_before", "mass_after", "relative_mass_defect", "advective_number",
                            "positivity_number", "divergence_norm", "solver_residual", "solver_iterations",
                            "momentum_residual"});
    std::vector<std::string> head{"t"};
    for (int i = 1; i <= N; ++i) head.push_back("alpha_" + std::to_string(i));
    coefficients = CsvWriter(d / "coefficients.csv", head);
  }
};

nlohmann::json constants_json(const ContinuationConstants& c)
{
  const auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"Q", num(c.Q)}, {"T_seed", num(c.T_seed)}, {"T1", num(c.T1)}, {"T2", num(c.T2)}, {"K", num(c.K)},
          {"c_p", num(c.c_p)}, {"c_0", num(c.c_0)}, {"c_N", num(c.c_N)}, {"safe_time", num(c.safe_time)}};
}

void write_summary(const fs::path& dir, const RunConfig& c, const RunSummary& s)
{
  nlohmann::json j;
  j["status"] = s.ok ? "ok" : "aborted";
  j["exit_code"] = s.exit_code();
  j["steps_completed"] = s.steps_completed;
  j["t_end"] = s.t_end;
  j["R0"] = c.initial.R0;
  j["rho_b0"] = c.params.rho_b0;
  j["sigma"] = c.sigma;
  j["dt"] = c.dt;
  j["constants"] = constants_json(s.constants);
  j["metrics"] = {{"initial_energy", s.initial_energy()},
                  {"max_positive_residual", s.max_positive_residual()},
                  {"max_abs_residual", s.max_abs_residual()},
                  {"penalization_integral", s.penalization_integral},
                  {"velocity_deviation_rms", s.velocity_deviation_rms()},
                  {"max_density_deviation", s.max_density_deviation()},
                  {"max_abs_entropy_residual", s.max_abs_entropy_residual()},
                  {"drift", s.drift()},
                  {"max_mass_defect", s.max_mass_defect},
                  {"max_advective_number", s.max_advective_number},
                  {"max_skew_defect", s.max_skew_defect},
                  {"max_principle_violations", s.max_principle_violations}};
  std::ofstream(dir / "summary.json") << j.dump(2) << "\n";
}

void write_error(const fs::path& dir, const RunSummary& s, const SimulationError& e)
{
  nlohmann::json j;
  j["cause"] = to_string(e.cause());
  j["exit_code"] = exit_code(e.cause());
  j["message"] = e.what();
  j["time"] = e.time();
  j["step"] = s.steps_completed;
  std::ofstream(dir / "error.json") << j.dump(2) << "\n";
}

} // namespace

RunSummary run(const RunConfig& config, const RunOptions& options)
{
  RunSummary S;
  Outputs out;
  try {
    validate_config(config);
    const SimulationParams& p = config.params;
    const BoxDomain& dom = config.domain;
    const double dt = config.dt;
    const double R0 = config.initial.R0;
    const double rho_b0 = p.rho_b0;
    const long steps = config.steps();

    const GalerkinBasis basis = GalerkinBasis::sine(dom, config.N, config.max_wavenumber);
    InitialState init = initial_state(config, basis);

    const double dist0 = dom.distance_to_boundary(config.initial.x0) - R0;
    S.constants = continuation_constants(p, init.rho, basis.evaluate(init.alpha), basis, R0, dist0, config.sigma,
                                         config.T);
    const double horizon = std::min(S.constants.T1, S.constants.T2);
    if (config.T > horizon && !config.override_horizon) {
      std::ostringstream msg;
      msg << "horizon T = " << config.T << " exceeds min{T1, T2} = " << horizon
          << "; set guards.override_horizon to run anyway";
      throw SimulationError(AbortCause::validation, msg.str());
    }

    if (options.out_dir) {
      out.open(*options.out_dir, basis.size());
      std::ofstream(*options.out_dir / "config.json") << config_to_json_text(config) << "\n";
    }

    const ReferenceBall ball = ReferenceBall::build(config.initial.x0, R0);
    const ContinuityStepper stepper(dom, p.epsilon, dt);
    const double h_min = dom.spacing().minCoeff();

    BubbleState X{config.initial.x0, R0};
    ScalarField rho = init.rho;
    ScalarField chi = init.chi;
    BubbleState frame = moments_from_indicator(chi);
    GalerkinState state{init.alpha, 0.0};

    const double rho0_min = rho.values.minCoeff();
    const double rho0_max = rho.values.maxCoeff();
    if (!(rho0_min > 0.0)) throw SimulationError(AbortCause::validation, "initial density must be positive");
    std::vector<double> div_times{0.0}, div_norms{0.0};
    const double entropy0 = entropy(rho);
    double entropy_work = 0.0;
    double residual_acc = 0.0, delta_acc = 0.0;

    const auto record = [&](double t, const VectorField& u, const ContinuityStepReport* crep, double skew,
                            double momentum_residual, long step) {
      const EnergyReport e = energy_report(rho, basis, state.alpha, chi, X, frame, p, t);
      const CompatibilityReport c = compatibility_checks(rho, u, chi, X, frame, R0, rho_b0, config.sigma);
      const double pen_defect = p.n_pen > 0.0 ? e.penalization / p.n_pen : penalization_defect(u, chi, frame);
      if (S.energy.empty()) {
        double u2 = 0.0;
        for (Index n = 0; n < dom.size(); ++n) u2 += chi[n] * u.at(n).squaredNorm();
        S.initial_bubble_velocity = std::sqrt(u2 * dom.cell_volume());
      } else {
        S.penalization_defect.push_back(pen_defect);
        residual_acc += dt * (e.dissipative() - e.work());
        delta_acc += dt * (e.dissipation - e.work_gravity);
        S.penalization_integral += dt * pen_defect;
      }
      const double E0 = S.energy.empty() ? e.energy() : S.energy.front().energy();
      const double Ed0 = S.energy.empty() ? e.kinetic + e.potential + e.surface
                                          : S.energy.front().kinetic + S.energy.front().potential + S.energy.front().surface;
      const double r = e.energy() - E0 + residual_acc;
      const double rd = e.kinetic + e.potential + e.surface - Ed0 + delta_acc;
      const DensityBounds bounds = max_principle_bounds(rho0_min, rho0_max, div_times, div_norms);
      const double rmin = rho.values.minCoeff(), rmax = rho.values.maxCoeff();
      const double tol = 1e-6 * (bounds.upper - bounds.lower);
      if (rmin < bounds.lower - tol || rmax > bounds.upper + tol) ++S.max_principle_violations;
      const double ent = entropy(rho) - entropy0 + entropy_work;

      S.times.push_back(t);
      S.energy.push_back(e);
      S.residual.push_back(r);
      S.delta_residual.push_back(rd);
      S.kinetic.push_back(e.kinetic);
      S.trajectory.push_back(X);
      S.density_deviation.push_back(c.density_deviation);
      S.velocity_deviation.push_back(c.velocity_deviation);
      S.distance_margin.push_back(c.distance_margin);
      S.entropy_residual.push_back(ent);
      S.rho_min.push_back(rmin);
      S.rho_max.push_back(rmax);
      S.bound_lower.push_back(bounds.lower);
      S.bound_upper.push_back(bounds.upper);

      if (!out.dir) return;
      out.energy.row({t, e.kinetic, e.potential, e.artificial_potential, e.surface, e.dissipation, e.penalization,
                      e.diffusion, e.work_gravity, e.work_pressure, e.work_artificial, e.work_surface, e.energy(), r,
                      rd});
      if (crep)
        out.continuity.row({t, crep->mass_before, crep->mass_after, crep->relative_mass_defect(),
                            crep->advective_number, crep->positivity_number, crep->divergence_norm,
                            crep->solver_residual, double(crep->solver_iterations), momentum_residual});
      if (step % config.cadence == 0) {
        const BubbleInertia in = bubble_inertia(X, rho_b0, R0);
        out.trajectory.row({t, X.center[0], X.center[1], X.center[2], X.radius, in.density, in.mass, in.moment,
                            in.dilational});
        out.compat.row({t, c.density_deviation, c.velocity_deviation, c.distance_margin, pen_defect, ent, rmin, rmax,
                        bounds.lower, bounds.upper, skew});
        std::vector<double> row{t};
        row.insert(row.end(), state.alpha.data(), state.alpha.data() + state.alpha.size());
        out.coefficients.row(row);
      }
      if (config.field_cadence > 0 && step % config.field_cadence == 0) {
        fs::create_directories(*out.dir / "fields");
        std::ostringstream stem;
        stem << "rho_" << std::setw(6) << std::setfill('0') << step;
        write_field(*out.dir / "fields" / stem.str(), rho, "rho", t);
      }
    };

    record(0.0, basis.evaluate(state.alpha), nullptr, 0.0, 0.0, 0);

    for (long m = 0; m < steps; ++m) {
      const double t = m * dt;
      const VectorField u_m = basis.evaluate(state.alpha);
      const double cfl = dt * sup_norm(u_m) / h_min;
      if (cfl > 0.5) {
        std::ostringstream msg;
        msg << "advective number " << cfl << " exceeds 0.5";
        throw SimulationError(AbortCause::cfl_violation, msg.str(), t);
      }

      GalerkinState next = state;
      BubbleState X_next = X;
      ContinuityStepResult cont;
      ScalarField chi_next;
      BubbleState frame_next;
      MomentumStepReport mrep;
      const VectorField grad_rho = gradient(rho);
      const Eigen::MatrixXd A = assemble_mass(rho, basis);
      VectorField u_drive = u_m;
      for (int k = 0; k <= config.picard_iterations; ++k) {
        X_next = rk4_step(t, X, u_drive, dt, ball);
        if (X_next.radius < 0.5 * R0) {
          std::ostringstream msg;
          msg << "bubble radius " << X_next.radius << " fell below R0/2 = " << 0.5 * R0;
          throw SimulationError(AbortCause::collapse, msg.str(), t + dt);
        }
        const double margin = dom.distance_to_boundary(X_next.center) - X_next.radius;
        if (margin < config.sigma) {
          std::ostringstream msg;
          msg << "distance to the boundary " << margin << " fell below sigma = " << config.sigma;
          throw SimulationError(AbortCause::collision, msg.str(), t + dt);
        }
        chi_next = ball_indicator(dom, X_next.center, X_next.radius);
        frame_next = moments_from_indicator(chi_next);

        cont = stepper.step(rho, u_drive);
        if (cont.report.negative_density) {
          std::ostringstream msg;
          msg << "density became negative (min " << cont.report.rho_min << ")";
          throw SimulationError(AbortCause::negative_density, msg.str(), t + dt);
        }

        const DensityRates rates{cont.advective_rate, cont.diffusive_rate};
        const StiffnessBlocks B =
            assemble_stiffness(rho, u_drive, chi_next, grad_rho, frame_next, p, basis, &rates);
        const Eigen::VectorXd F = assemble_forcing(cont.rho, chi_next, X_next.radius, p, basis);
        const GalerkinState candidate = momentum_step(state, A, B.total(), F, dt, &mrep);
        const double change = (candidate.alpha - next.alpha).norm();
        next = candidate;
        if (config.picard_iterations == 0) break;
        if (k > 0 && change <= config.picard_tolerance * std::max(1.0, next.alpha.norm())) break;
        u_drive = basis.evaluate(next.alpha);
      }
      const double skew = out.dir ? convection_skew_defect(rho, u_drive, basis) : 0.0;

      const ScalarField div = face_divergence(u_drive);
      entropy_work += 0.5 * dt * dom.cell_volume() * (rho.values.dot(div.values) + cont.rho.values.dot(div.values));
      div_times.push_back(t);
      div_norms.push_back(cont.report.divergence_norm);
      div_times.push_back(t + dt);
      div_norms.push_back(cont.report.divergence_norm);
      S.max_mass_defect = std::max(S.max_mass_defect, cont.report.relative_mass_defect());
      S.max_advective_number = std::max(S.max_advective_number, cont.report.advective_number);
      S.max_skew_defect = std::max(S.max_skew_defect, skew);

      X = X_next;
      rho = std::move(cont.rho);
      chi = std::move(chi_next);
      frame = frame_next;
      state = next;
      state.t = (m + 1) * dt;
      S.steps_completed = m + 1;
      S.t_end = state.t;
      record(state.t, basis.evaluate(state.alpha), &cont.report, skew, mrep.residual, m + 1);

      if (!options.quiet && (steps < 10 || (m + 1) % (steps / 10) == 0))
        std::cerr << "step " << m + 1 << "/" << steps << "  t = " << state.t << "  r = " << S.residual.back()
                  << "  R_b = " << X.radius << "\n";
    }
  } catch (const SimulationError& e) {
    S.ok = false;
    S.cause = e.cause();
    S.message = e.what();
    if (options.out_dir) {
      fs::create_directories(*options.out_dir);
      write_error(*options.out_dir, S, e);
    }
  }
  if (options.out_dir) {
    fs::create_directories(*options.out_dir);
    write_summary(*options.out_dir, config, S);
  }
  return S;
}

} // namespace bubblesim
