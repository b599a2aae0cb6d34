#include <doctest.h>

#include "bubblesim/driver.hpp"
#include "bubblesim/energy.hpp"
#include "bubblesim/modes.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace bubblesim;

namespace {

struct Scene {
  BoxDomain dom;
  BubbleState bubble;
  ScalarField chi;
  BubbleState frame;
  ScalarField rho;
};

Scene scene(int n = 20)
{
  const BoxDomain dom = BoxDomain::unit_cube(n);
  const BubbleState b{{0.5, 0.48, 0.52}, 0.2};
  const ScalarField chi = ball_indicator(dom, b.center, b.radius);
  const ScalarField rho = sample(dom, [](const Eigen::Vector3d& x) { return 1.0 + 0.2 * std::sin(3 * x[0] + x[2]); });
  return {dom, b, chi, moments_from_indicator(chi), rho};
}

VectorField swirl(const BoxDomain& dom)
{
  return sample(dom, [](const Eigen::Vector3d& x) -> Eigen::Vector3d {
    return {std::sin(2 * x[1]) * x[2], x[0] * x[0] - x[2], std::cos(x[0] + x[1])};
  });
}

EnergyReport synthetic(double kinetic, double dissipation, double work_gravity)
{
  EnergyReport e;
  e.kinetic = kinetic;
  e.dissipation = dissipation;
  e.work_gravity = work_gravity;
  return e;
}

RunConfig small_run()
{
  RunConfig c;
  c.domain = BoxDomain::unit_cube(12);
  c.N = 9;
  c.dt = 2e-3;
  c.T = 0.04;
  c.initial.R0 = 0.2;
  c.initial.V0 = {0.2, 0.0, 0.1};
  c.initial.Lambda0 = 0.5;
  c.override_horizon = true;
  return c;
}

} // namespace

TEST_CASE("fluid at rest has only potential and surface energy")
{
  const Scene s = scene();
  SimulationParams p;
  p.kappa_b = 0.3;
  p.g = {0, 0, 1};
  const EnergyReport e = energy_report(s.rho, VectorField(s.dom), TensorField(s.dom), s.chi, s.bubble, s.frame, p);
  CHECK(e.kinetic == 0.0);
  CHECK(e.dissipation == 0.0);
  CHECK(e.penalization == 0.0);
  CHECK(e.work() == 0.0);
  CHECK(e.potential > 0.0);
  CHECK(e.surface == doctest::Approx(2.0 * std::numbers::pi / 3.0 * 0.3 * 0.04).epsilon(1e-12));
  CHECK(e.energy() == doctest::Approx(e.artificial_potential).epsilon(1e-15));
}

TEST_CASE("kinetic, dissipative and penalization terms are quadratic in u")
{
  const Scene s = scene();
  SimulationParams p;
  p.n_pen = 7.0;
  const VectorField u = swirl(s.dom);
  const VectorField u2(s.dom, 2.0 * u.values);
  const EnergyReport a = energy_report(s.rho, u, s.chi, s.bubble, p);
  const EnergyReport b = energy_report(s.rho, u2, s.chi, s.bubble, p);
  CHECK(b.kinetic == doctest::Approx(4.0 * a.kinetic).epsilon(1e-10));
  CHECK(b.dissipation == doctest::Approx(4.0 * a.dissipation).epsilon(1e-10));
  CHECK(b.penalization == doctest::Approx(4.0 * a.penalization).epsilon(1e-10));
  CHECK(b.work_pressure == doctest::Approx(2.0 * a.work_pressure).epsilon(1e-10));
  CHECK(a.dissipation > 0.0);
  CHECK(a.penalization > 0.0);
}

TEST_CASE("kinetic energy of a uniform flow")
{
  const BoxDomain dom{{0, 0, 0}, {2, 1, 1}, {8, 4, 4}};
  const VectorField u = sample(dom, [](const Eigen::Vector3d&) { return Eigen::Vector3d(1, 2, 2); });
  const ScalarField chi = ball_indicator(dom, {1, 0.5, 0.5}, 0.3);
  const EnergyReport e = energy_report(ScalarField(dom, 0.5), u, chi, {{1, 0.5, 0.5}, 0.3}, SimulationParams{});
  // 1/2 * 0.5 * 9 * |Omega|
  CHECK(e.kinetic == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(e.dissipation == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e.penalization <= 1e-20);
}

TEST_CASE("mode fields carry no penalization")
{
  const Scene s = scene(32);
  ModeVector mv;
  mv.V = {0.3, -0.2, 0.5};
  mv.omega = {1.0, 0.4, -0.7};
  mv.Lambda = 0.9;
  const VectorField u = mode_field(s.dom, mv, s.frame.center);
  double u2 = 0.0;
  for (Index n = 0; n < s.dom.size(); ++n) u2 += s.chi[n] * u.at(n).squaredNorm();
  u2 *= s.dom.cell_volume();
  // the grid projector reproduces mode fields up to the quadrature of the ball
  CHECK(penalization_defect(u, s.chi, s.frame) <= 1e-4 * u2);
  const VectorField w = swirl(s.dom);
  double w2 = 0.0;
  for (Index n = 0; n < s.dom.size(); ++n) w2 += s.chi[n] * w.at(n).squaredNorm();
  w2 *= s.dom.cell_volume();
  CHECK(penalization_defect(w, s.chi, s.frame) >= 1e-3 * w2);
}

TEST_CASE("dissipation and penalization are nonnegative")
{
  const Scene s = scene(12);
  std::mt19937 gen(41);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  SimulationParams p;
  p.n_pen = 50.0;
  p.nu_f = 0.2;
  for (int trial = 0; trial < 10; ++trial) {
    VectorField u(s.dom);
    for (Index n = 0; n < s.dom.size(); ++n) u.set(n, Eigen::Vector3d(U(gen), U(gen), U(gen)));
    const EnergyReport e = energy_report(s.rho, u, s.chi, s.bubble, p);
    CHECK(e.dissipation >= 0.0);
    CHECK(e.penalization >= 0.0);
    CHECK(e.diffusion >= 0.0);
  }
}

TEST_CASE("dissipation of a pure dilation is the bulk term")
{
  const BoxDomain dom = BoxDomain::unit_cube(10);
  SimulationParams p;
  p.nu_f = 0.4;
  const VectorField u = sample(dom, [](const Eigen::Vector3d& x) -> Eigen::Vector3d { return x / 3.0; });
  const EnergyReport e = energy_report(ScalarField(dom, 1.0), u, ScalarField(dom, 0.0), {{0.5, 0.5, 0.5}, 0.2}, p);
  CHECK(e.dissipation == doctest::Approx(0.4).epsilon(1e-10));
}

TEST_CASE("residuals of synthetic series")
{
  const double dt = 0.5;
  SUBCASE("balanced decay")
  {
    // kinetic drops by exactly dt * dissipation each step
    std::vector<EnergyReport> s{synthetic(10, 0, 0), synthetic(9, 2, 0), synthetic(8, 2, 0), synthetic(6, 4, 0)};
    for (double r : energy_inequality_residual(s, dt)) CHECK(r == doctest::Approx(0.0));
  }
  SUBCASE("gravity work and extra dissipation")
  {
    std::vector<EnergyReport> s{synthetic(1, 0, 0), synthetic(2, 1, 4), synthetic(2, 0, 0)};
    const std::vector<double> r = energy_inequality_residual(s, dt);
    CHECK(r[0] == 0.0);
    CHECK(r[1] == doctest::Approx(1.0 + 0.5 * (1 - 4)));
    CHECK(r[2] == doctest::Approx(1.0 + 0.5 * (1 - 4)));
  }
  SUBCASE("delta level moves pressure and surface to the left")
  {
    EnergyReport a, b;
    a.potential = 3.0;
    a.surface = 1.0;
    b.potential = 2.0;
    b.surface = 1.5;
    b.work_pressure = 100.0;
    b.penalization = 100.0;
    b.dissipation = 1.0;
    const std::vector<double> r = delta_level_residual({a, b}, dt);
    CHECK(r[1] == doctest::Approx(-0.5 + 0.5));
  }
  CHECK(energy_inequality_residual({}, dt).empty());
}

TEST_CASE("compatibility at the initial state")
{
  const Scene s = scene(24);
  ScalarField rho(s.dom, 1.0);
  for (Index n = 0; n < s.dom.size(); ++n)
    if (s.chi[n] > 0.0) rho[n] = 0.8;
  const VectorField u = sample(s.dom, [](const Eigen::Vector3d&) { return Eigen::Vector3d(0.1, 0, 0); });
  const CompatibilityReport c = compatibility_checks(rho, u, s.chi, s.bubble, s.frame, s.bubble.radius, 0.8, 0.05);
  CHECK(c.density_deviation <= 1e-14);
  CHECK(c.velocity_deviation <= 1e-10);
  CHECK(c.distance_margin == doctest::Approx(0.48 - 0.2 - 0.05).epsilon(1e-14));

  const BubbleState grown{s.bubble.center, 2.0 * s.bubble.radius};
  const CompatibilityReport g = compatibility_checks(rho, u, s.chi, grown, s.frame, s.bubble.radius, 0.8, 0.05);
  // target density drops to rho_b0 / 8
  CHECK(g.density_deviation == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("monitors leave their inputs untouched")
{
  const Scene s = scene(12);
  const VectorField u = swirl(s.dom);
  const ScalarField rho0 = s.rho, chi0 = s.chi;
  const VectorField u0 = u;
  SimulationParams p;
  energy_report(s.rho, u, s.chi, s.bubble, p);
  compatibility_checks(s.rho, u, s.chi, s.bubble, s.frame, 0.2, 1.0, 0.05);
  CHECK(s.rho.values == rho0.values);
  CHECK(s.chi.values == chi0.values);
  CHECK(u.values == u0.values);
}

TEST_CASE("a run without artificial pressure has a nonincreasing residual")
{
  // the scheme's kinetic identity loses (1/2)|delta alpha|_A^2 per step
  RunConfig c = small_run();
  c.params.delta = 0.0;
  c.params.g = {0.0, 0.0, 1.0};
  c.params.kappa_b = 0.05;
  c.params.rho_b0 = 0.8;
  const RunSummary s = run(c);
  REQUIRE(s.ok);
  const double scale = s.energy.front().kinetic + 1.0;
  for (std::size_t k = 1; k < s.residual.size(); ++k) CHECK(s.residual[k] <= s.residual[k - 1] + 1e-12 * scale);
  CHECK(s.residual.back() < 0.0);
}

TEST_CASE("a run at rest keeps every energy term fixed")
{
  RunConfig c = small_run();
  c.initial.velocity = VelocityInit::zero;
  c.params.g = Eigen::Vector3d::Zero();
  const RunSummary s = run(c);
  REQUIRE(s.ok);
  for (std::size_t k = 0; k < s.energy.size(); ++k) {
    // forcing is a constant pressure against divergence-free-on-average modes
    CHECK(std::abs(s.residual[k]) <= 1e-14);
    CHECK(s.energy[k].kinetic <= 1e-28);
    CHECK(s.energy[k].energy() == doctest::Approx(s.energy.front().energy()).epsilon(1e-14));
  }
}
