#include "bubblesim/continuity.hpp"
#include "bubblesim/driver.hpp"
#include "bubblesim/galerkin.hpp"
#include "bubblesim/modes.hpp"
#include "bubblesim/transport.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace bubblesim;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool ok = true;
  std::string detail;
  double seconds = 0.0;
};

// every coupled run made here, for the max principle check
std::vector<RunSummary> g_runs;

RunSummary tracked(const RunConfig& c)
{
  g_runs.push_back(run(c));
  return g_runs.back();
}

std::string fmt(double v, int digits = 4)
{
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

RunConfig standard_config()
{
  RunConfig c;
  SimulationParams& p = c.params;
  p.mu_f = 0.05;
  p.nu_f = 0.0;
  p.nu_b = 0.05;
  p.delta = 1e-3;
  p.beta = 8.0;
  p.epsilon = 1e-2;
  p.n_pen = 100.0;
  p.kappa_b = 0.01;
  p.g = {0.0, 0.0, 1.0};
  p.rho_b0 = 0.8;
  c.domain = BoxDomain::unit_cube(32);
  c.N = 24;
  c.initial.x0 = {0.5, 0.5, 0.5};
  c.initial.R0 = 0.15;
  c.initial.V0 = {0.2, 0.0, 0.0};
  c.initial.Lambda0 = 1.0;
  c.initial.cutoff_width = 0.1;
  c.dt = 1e-3;
  c.T = 0.2;
  c.sigma = 0.05;
  c.override_horizon = true;
  return c;
}

// no gravity, surface tension or density jump: the initial velocity
// incompatibility is the only thing the penalty has to relax
RunConfig forcing_free_config()
{
  RunConfig c = standard_config();
  c.params.g = Eigen::Vector3d::Zero();
  c.params.kappa_b = 0.0;
  c.params.rho_b0 = 1.0;
  return c;
}

// ||mode field||_{L2(B)} on the exact ball
double mode_norm(const ModeVector& m, double R)
{
  const double vol = 4.0 * kPi * std::pow(R, 3) / 3.0;
  const double second = 4.0 * kPi * std::pow(R, 5) / 5.0;
  return std::sqrt(vol * m.V.squaredNorm() + second * (2.0 / 3.0 * m.omega.squaredNorm() + m.Lambda * m.Lambda / 9.0));
}

ModeVector minus(const ModeVector& a, const ModeVector& b)
{
  ModeVector d;
  d.V = a.V - b.V;
  d.omega = a.omega - b.omega;
  d.Lambda = a.Lambda - b.Lambda;
  return d;
}

Outcome projector_exactness()
{
  std::mt19937 gen(101);
  std::uniform_real_distribution<double> U(-1.0, 1.0), Rd(0.1, 0.25), unit(0.0, 1.0);
  struct Case {
    ModeVector mv;
    Eigen::Vector3d xc;
    double R;
  };
  std::vector<Case> cases;
  for (int i = 0; i < 50; ++i) {
    Case k;
    k.R = Rd(gen);
    const double lo = k.R + 0.05, hi = 1.0 - k.R - 0.05;
    k.xc = Eigen::Vector3d(lo + (hi - lo) * unit(gen), lo + (hi - lo) * unit(gen), lo + (hi - lo) * unit(gen));
    k.mv.V = Eigen::Vector3d(U(gen), U(gen), U(gen));
    k.mv.omega = Eigen::Vector3d(U(gen), U(gen), U(gen)) / k.R;
    k.mv.Lambda = 3.0 * U(gen) / k.R;
    cases.push_back(k);
  }
  std::vector<double> mean, worst;
  for (int n : {16, 32, 64}) {
    const BoxDomain dom = BoxDomain::unit_cube(n);
    double s = 0.0, w = 0.0;
    for (const Case& k : cases) {
      const ScalarField chi = ball_indicator(dom, k.xc, k.R, 4);
      const ModeVector p = project(chi, mode_field(dom, k.mv, k.xc), k.R, k.xc);
      const double e = mode_norm(minus(p, k.mv), k.R) / mode_norm(k.mv, k.R);
      s += e;
      w = std::max(w, e);
    }
    mean.push_back(s / double(cases.size()));
    worst.push_back(w);
  }
  Outcome o;
  o.ok = worst[2] <= 2e-2 && mean[1] < mean[0] && mean[2] < mean[1];
  o.detail = "max rel error at 64^3 " + fmt(worst[2]) + " (<= 2e-2); mean 16/32/64: " + fmt(mean[0]) + ", " +
             fmt(mean[1]) + ", " + fmt(mean[2]);
  return o;
}

Outcome transport_safeguards()
{
  const BoxDomain dom = BoxDomain::unit_cube(24);
  std::mt19937 gen(202);
  std::uniform_real_distribution<double> U(-1.0, 1.0), Rd(0.1, 0.25);
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20; ++trial) {
    const double R0 = Rd(gen);
    const Eigen::Vector3d x0(0.5, 0.5, 0.5);
    Eigen::Matrix3d A;
    for (int i = 0; i < 9; ++i) A(i) = 3.0 * U(gen);
    const Eigen::Vector3d k(4 * U(gen), 4 * U(gen), 4 * U(gen)), c(U(gen), U(gen), U(gen));
    const VectorField u = sample(dom, [&](const Eigen::Vector3d& x) -> Eigen::Vector3d {
      return c + A * (x - x0) * std::cos(k.dot(x)) - 2.0 * (x - x0);
    });
    const double T = safe_time(R0, l2_norm(u));
    const BubbleTrajectory tr = integrate_bubble({x0, R0}, [&](double) -> const VectorField& { return u; }, 0.0, T,
                                                 T / 100, ReferenceBall::build(x0, R0));
    worst_ratio = std::min(worst_ratio, tr.min_radius() / R0);
  }

  const BoxDomain fine = BoxDomain::unit_cube(16);
  const Eigen::Vector3d x0(0.5, 0.5, 0.5);
  const double R0 = 0.05;
  const auto dilation = [&](double L0) {
    return sample(fine, [&](const Eigen::Vector3d& x) -> Eigen::Vector3d { return L0 / 3.0 * (x - x0); });
  };
  const VectorField d1 = dilation(1.0);
  const BubbleTrajectory tr = integrate_bubble({x0, R0}, [&](double) -> const VectorField& { return d1; }, 0.0, 1.0,
                                               1e-3, ReferenceBall::build(x0, R0));
  double dil_err = 0.0;
  for (const auto& s : tr.samples) dil_err = std::max(dil_err, std::abs(s.state.radius / (R0 * std::exp(s.t / 3)) - 1));

  const VectorField d3 = dilation(3.0);
  std::vector<double> err;
  for (double dt : {0.2, 0.1, 0.05}) {
    const BubbleTrajectory t = integrate_bubble({x0, R0}, [&](double) -> const VectorField& { return d3; }, 0.0, 1.0,
                                                dt, ReferenceBall::build(x0, R0));
    err.push_back(std::abs(t.samples.back().state.radius - R0 * std::exp(1.0)));
  }
  const double slope = std::log2(err.front() / err.back()) / 2.0;

  Outcome o;
  o.ok = worst_ratio >= 0.5 && dil_err <= 1e-3 && std::abs(slope - 4.0) <= 0.5;
  o.detail = "min R/R0 over 20 fields " + fmt(worst_ratio) + " (>= 0.5); dilation rel error " + fmt(dil_err) +
             " (<= 1e-3); RK4 slope " + fmt(slope) + " (4 +- 0.5)";
  return o;
}

double heat_amplitude()
{
  const BoxDomain dom{{0, 0, 0}, {1, 1, 1}, {64, 2, 2}};
  const ContinuityStepper st(dom, 0.01, 1e-3);
  ScalarField rho = sample(dom, [](const Eigen::Vector3d& x) { return 1.0 + 0.1 * std::cos(kPi * x[0]); });
  const VectorField zero(dom);
  for (int k = 0; k < 1000; ++k) rho = st.step(rho, zero).rho;
  double num = 0.0, den = 0.0;
  for (Index n = 0; n < dom.size(); ++n) {
    const double c = std::cos(kPi * dom.node(n)[0]);
    num += (rho[n] - 1.0) * c;
    den += c * c;
  }
  return num / den;
}

Outcome continuity_solver()
{
  const BoxDomain dom{{0, 0, 0}, {1, 1, 1}, {20, 18, 16}};
  std::mt19937 gen(303);
  std::uniform_real_distribution<double> U(0.5, 2.0), V(-1.0, 1.0);
  ScalarField rho(dom);
  for (Index n = 0; n < dom.size(); ++n) rho[n] = U(gen);
  VectorField u(dom);
  for (Index n = 0; n < dom.size(); ++n) u.set(n, Eigen::Vector3d(V(gen), V(gen), V(gen)));
  const ContinuityStepper st(dom, 0.02, 2e-3);
  double mass = 0.0;
  for (int k = 0; k < 50; ++k) {
    const ContinuityStepResult r = st.step(rho, u);
    mass = std::max(mass, r.report.relative_mass_defect());
    rho = r.rho;
  }

  const double amp = heat_amplitude();
  const double expected = 0.1 * std::exp(-0.01 * kPi * kPi);

  long violations = 0, accepted = 0;
  for (const RunSummary& s : g_runs) {
    if (!s.ok) continue;
    ++accepted;
    violations += s.max_principle_violations;
    mass = std::max(mass, s.max_mass_defect);
  }

  Outcome o;
  o.ok = mass <= 1e-10 && std::abs(amp - expected) <= 2e-3 && violations == 0 && accepted > 0;
  o.detail = "max rel mass defect " + fmt(mass) + " (<= 1e-10); heat amplitude " + fmt(amp) + " vs " + fmt(expected) +
             " (tol 2e-3); sandwich violations " + std::to_string(violations) + " over " + std::to_string(accepted) +
             " accepted runs";
  return o;
}

double min_eig(const Eigen::MatrixXd& S)
{
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues().minCoeff();
}

double asym(const Eigen::MatrixXd& S) { return (S - S.transpose()).cwiseAbs().maxCoeff(); }

Outcome galerkin_structure()
{
  const BoxDomain dom = BoxDomain::unit_cube(32);
  const GalerkinBasis b = GalerkinBasis::sine(dom, 24);
  const double id = (assemble_mass(ScalarField(dom, 1.0), b) - Eigen::MatrixXd::Identity(24, 24)).cwiseAbs().maxCoeff();

  std::mt19937 gen(404);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double mass_gap = std::numeric_limits<double>::infinity();
  double visc_min = std::numeric_limits<double>::infinity(), pen_min = visc_min, sym = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    ScalarField rho(dom);
    const double lo = 0.1 + U(gen);
    for (Index n = 0; n < dom.size(); ++n) rho[n] = lo + 2.0 * U(gen);
    const Eigen::MatrixXd A = assemble_mass(rho, b);
    mass_gap = std::min(mass_gap, min_eig(A) - rho.values.minCoeff());
    sym = std::max(sym, asym(A));

    const double R = 0.1 + 0.15 * U(gen);
    const Eigen::Vector3d xc(0.3 + 0.4 * U(gen), 0.3 + 0.4 * U(gen), 0.3 + 0.4 * U(gen));
    const ScalarField chi = ball_indicator(dom, xc, R);
    SimulationParams p;
    p.mu_f = 0.01 + U(gen);
    p.nu_f = U(gen);
    p.nu_b = U(gen);
    p.n_pen = std::pow(10.0, 4.0 * U(gen));
    const Eigen::MatrixXd Bv = assemble_viscous(chi, p, b);
    const Eigen::MatrixXd Bp = assemble_penalization(chi, moments_from_indicator(chi), p.n_pen, b);
    sym = std::max({sym, asym(Bv), asym(Bp)});
    visc_min = std::min(visc_min, min_eig(Bv));
    pen_min = std::min(pen_min, min_eig(Bp));
  }
  Outcome o;
  o.ok = id <= 1e-8 && mass_gap >= -1e-10 && sym <= 1e-10 && visc_min >= -1e-10 && pen_min >= -1e-10;
  o.detail = "|A - I| " + fmt(id) + " (<= 1e-8); min eig(A) - rho_min " + fmt(mass_gap) + "; asymmetry " + fmt(sym) +
             "; min eig B_visc " + fmt(visc_min) + ", B_pen " + fmt(pen_min) + " (>= -1e-10)";
  return o;
}

Outcome energy_inequality()
{
  RunConfig c = standard_config();
  const RunSummary a = tracked(c);
  c.dt = 0.5e-3;
  const RunSummary b = tracked(c);
  Outcome o;
  if (!a.ok || !b.ok) {
    o.ok = false;
    o.detail = "run aborted: " + (a.ok ? b.message : a.message);
    return o;
  }
  const double E0 = a.initial_energy();
  const double pos = std::max(a.max_positive_residual(), b.max_positive_residual());
  const double ratio = a.max_abs_residual() / b.max_abs_residual();
  o.ok = pos <= 1e-3 * E0 && std::abs(ratio - 2.0) <= 0.6;
  o.detail = "max positive r " + fmt(pos) + " (<= 1e-3 E(0) = " + fmt(1e-3 * E0) + "); max|r| dt/dt2 = " +
             fmt(a.max_abs_residual()) + "/" + fmt(b.max_abs_residual()) + " = " + fmt(ratio) + " (2 +- 30%)";
  return o;
}

SweepResult tracked_sweep(const SweepSpec& spec, const RunConfig& base)
{
  const SweepResult r = sweep(spec, base);
  for (const SweepRow& row : r.rows) g_runs.push_back(row.summary);
  return r;
}

bool all_ok(const SweepResult& r)
{
  for (const SweepRow& row : r.rows)
    if (!row.summary.ok) return false;
  return true;
}

Outcome penalization_limit()
{
  const SweepSpec spec{SweepAxis::n_pen, {1e2, 1e3, 1e4}, {"penalization_integral", "velocity_deviation_rms"}};
  const SweepResult r = tracked_sweep(spec, forcing_free_config());
  const double s1 = r.slope("penalization_integral"), s2 = r.slope("velocity_deviation_rms");
  Outcome o;
  o.ok = all_ok(r) && std::abs(s1 + 1.0) <= 0.3 && std::abs(s2 + 0.5) <= 0.2;
  o.detail = "slope of int int chi|u - Pi u|^2 " + fmt(s1) + " (-1 +- 0.3); in-bubble velocity deviation " + fmt(s2) +
             " (-0.5 +- 0.2)";
  return o;
}

Outcome compatibility_limits()
{
  const SweepSpec spec{SweepAxis::epsilon, {1e-1, 1e-2, 1e-3}, {"max_density_deviation", "max_abs_entropy_residual"}};
  const SweepResult r = tracked_sweep(spec, standard_config());
  std::vector<double> dens, ent;
  for (const SweepRow& row : r.rows) {
    dens.push_back(metric_value(row.summary, "max_density_deviation"));
    ent.push_back(metric_value(row.summary, "max_abs_entropy_residual"));
  }
  Outcome o;
  o.ok = all_ok(r) && dens[1] < dens[0] && dens[2] < dens[1] && ent[1] < ent[0] && ent[2] < ent[1];
  o.detail = "density deviation " + fmt(dens[0]) + " > " + fmt(dens[1]) + " > " + fmt(dens[2]) +
             "; max |entropy residual| " + fmt(ent[0]) + " > " + fmt(ent[1]) + " > " + fmt(ent[2]);
  return o;
}

RunConfig ballistic_config()
{
  RunConfig c;
  c.params.mu_f = 1e-4;
  c.params.nu_b = 1e-4;
  c.params.a_f = 1e-4;
  c.params.a_b = 1e-4;
  c.params.delta = 1e-8;
  c.params.epsilon = 0.0;
  c.params.n_pen = 0.0;
  c.domain = BoxDomain::unit_cube(16);
  c.N = 60;
  c.initial.cutoff_width = 0.2;
  c.dt = 1e-3;
  c.T = 0.1;
  c.override_horizon = true;
  return c;
}

Outcome symmetry_and_guards()
{
  RunConfig sym = standard_config();
  sym.params.g = Eigen::Vector3d::Zero();
  sym.initial.V0 = Eigen::Vector3d::Zero();
  sym.T = 0.1;
  const RunSummary s = tracked(sym);

  RunConfig collapse = ballistic_config();
  collapse.initial.R0 = 0.2;
  collapse.initial.Lambda0 = -40.0;
  const RunSummary c = run(collapse);

  RunConfig wall = ballistic_config();
  wall.initial.x0 = {0.35, 0.5, 0.5};
  wall.initial.R0 = 0.15;
  wall.initial.V0 = {-2.0, 0.0, 0.0};
  wall.sigma = 0.1;
  const RunSummary w = run(wall);

  RunConfig horizon = standard_config();
  horizon.override_horizon = false;
  const RunSummary h = run(horizon);

  const double drift = s.drift();
  Outcome o;
  o.ok = s.ok && drift <= 1e-3 * sym.initial.R0 && c.cause == AbortCause::collapse && c.exit_code() == 3 &&
         w.cause == AbortCause::collision && w.exit_code() == 3 && h.exit_code() == 2;
  o.detail = "drift " + fmt(drift) + " (<= 1e-3 R0 = " + fmt(1e-3 * sym.initial.R0) + "); collapse exit " +
             std::to_string(c.exit_code()) + " at t = " + fmt(c.t_end) + "; collision exit " +
             std::to_string(w.exit_code()) + " at t = " + fmt(w.t_end) + "; horizon guard exit " +
             std::to_string(h.exit_code());
  return o;
}

Outcome timed(Outcome (*f)())
{
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = f();
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

} // namespace

int main()
{
  struct Entry {
    int id;
    const char* name;
    Outcome (*f)();
    Outcome result;
  };
  // continuity last so its sandwich check sees every coupled run
  std::vector<Entry> entries{{1, "projector exactness", projector_exactness, {}},
                             {2, "transport safeguards", transport_safeguards, {}},
                             {4, "Galerkin structure", galerkin_structure, {}},
                             {5, "energy inequality", energy_inequality, {}},
                             {6, "penalization limit", penalization_limit, {}},
                             {7, "compatibility limits", compatibility_limits, {}},
                             {8, "symmetry and guards", symmetry_and_guards, {}},
                             {3, "continuity solver", continuity_solver, {}}};
  for (Entry& e : entries) {
    e.result = timed(e.f);
    std::fprintf(stderr, "criterion %d done in %.1f s\n", e.id, e.result.seconds);
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.id < b.id; });
  int failed = 0;
  for (const Entry& e : entries) {
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", e.result.ok ? "PASS" : "FAIL", e.id, e.name,
                e.result.detail.c_str(), e.result.seconds);
    failed += e.result.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
