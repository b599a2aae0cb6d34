#include <doctest.h>

#include "bubblesim/errors.hpp"
#include "bubblesim/modes.hpp"
#include "bubblesim/transport.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace bubblesim;

namespace {

VectorField dilation_field(const BoxDomain& dom, const Eigen::Vector3d& xc, double Lambda)
{
  return sample(dom, [&](const Eigen::Vector3d& x) -> Eigen::Vector3d { return Lambda / 3.0 * (x - xc); });
}

} // namespace

TEST_CASE("reference lattice weights are exact for volume and second moment")
{
  const ReferenceBall b = ReferenceBall::build({0.5, 0.5, 0.5}, 0.2);
  const double pi = std::numbers::pi;
  CHECK(b.volume_weight * double(b.offsets.size()) == doctest::Approx(4 * pi * std::pow(0.2, 3) / 3).epsilon(1e-14));
  double m = 0.0;
  for (const auto& y : b.offsets) m += y.squaredNorm();
  CHECK(b.moment_weight * m == doctest::Approx(4 * pi * std::pow(0.2, 5) / 5).epsilon(1e-14));
  for (const auto& y : b.offsets) CHECK(y.norm() < 0.2);
}

TEST_CASE("bubble velocity for zero, constant and dilation fields")
{
  const BoxDomain dom = BoxDomain::unit_cube(16);
  const Eigen::Vector3d x0(0.5, 0.5, 0.5);
  const ReferenceBall ball = ReferenceBall::build(x0, 0.15);

  const BubbleRate z = ode_rhs(0.0, {x0, 0.15}, VectorField(dom), ball);
  CHECK(z.dx.norm() == 0.0);
  CHECK(z.dR == 0.0);

  const Eigen::Vector3d c(0.3, -0.7, 1.1);
  const VectorField uc = sample(dom, [&](const Eigen::Vector3d&) { return c; });
  const BubbleRate fc = ode_rhs(0.0, {{0.45, 0.52, 0.5}, 0.12}, uc, ball);
  CHECK((fc.dx - c).cwiseAbs().maxCoeff() <= 1e-3);
  CHECK(std::abs(fc.dR) <= 1e-3);

  const Eigen::Vector3d xb(0.47, 0.5, 0.53);
  const double L0 = 1.2, R = 0.18;
  const BubbleRate fd = ode_rhs(0.0, {xb, R}, dilation_field(dom, xb, L0), ball);
  CHECK(fd.dR == doctest::Approx(L0 * R / 3).epsilon(1e-2));
}

TEST_CASE("bubble velocity agrees with the rotation-free projection")
{
  const BoxDomain dom = BoxDomain::unit_cube(64);
  const Eigen::Vector3d xb(0.48, 0.52, 0.5);
  const double R = 0.2;
  const VectorField u = sample(dom, [](const Eigen::Vector3d& x) -> Eigen::Vector3d {
    return {std::sin(2 * x[1]) + 0.5 * x[0], x[2] * x[0], std::cos(x[0] + x[1]) + x[2]};
  });
  const BubbleRate f = ode_rhs(0.0, {xb, R}, u, ReferenceBall::build(xb, R));
  const ModeVector p = project_no_rotation(ball_indicator(dom, xb, R), u, R, xb);
  CHECK((f.dx - p.V).norm() <= 1e-2 * p.V.norm());
  CHECK(3.0 * f.dR / R == doctest::Approx(p.Lambda).epsilon(1e-2));
}

TEST_CASE("safe time")
{
  CHECK(safe_time(1.0, 1.0) == doctest::Approx(0.79267).epsilon(1e-5));
  CHECK(safe_time(4.0, 1.0) == doctest::Approx(6.3413).epsilon(1e-5));
  CHECK(std::isinf(safe_time(0.3, 0.0)));
}

TEST_CASE("trajectories for zero and constant fields")
{
  const BoxDomain dom = BoxDomain::unit_cube(12);
  const Eigen::Vector3d x0(0.3, 0.4, 0.5);
  const ReferenceBall ball = ReferenceBall::build(x0, 0.1);

  const VectorField zero(dom);
  const BubbleTrajectory t0 = integrate_bubble({x0, 0.1}, [&](double) -> const VectorField& { return zero; }, 0, 1, 0.1, ball);
  for (const auto& s : t0.samples) {
    CHECK((s.state.center - x0).norm() == 0.0);
    CHECK(s.state.radius == 0.1);
  }

  const Eigen::Vector3d c(0.2, 0.3, -0.1);
  const VectorField uc = sample(dom, [&](const Eigen::Vector3d&) { return c; });
  const BubbleTrajectory tc = integrate_bubble({x0, 0.1}, [&](double) -> const VectorField& { return uc; }, 0, 1, 0.01, ball);
  CHECK(tc.samples.back().t == 1.0);
  CHECK((tc.samples.back().state.center - (x0 + c)).norm() <= 1e-6 + 1e-12);
  CHECK(tc.samples.back().state.radius == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("co-moving dilation grows exponentially with fourth-order error")
{
  const BoxDomain dom = BoxDomain::unit_cube(16);
  const Eigen::Vector3d x0(0.5, 0.5, 0.5);
  const double R0 = 0.05;

  SUBCASE("dt = 1e-3")
  {
    const double L0 = 1.0;
    const VectorField u = dilation_field(dom, x0, L0);
    const BubbleTrajectory tr = integrate_bubble({x0, R0}, [&](double) -> const VectorField& { return u; }, 0, 1, 1e-3,
                                                 ReferenceBall::build(x0, R0));
    for (const auto& s : tr.samples) CHECK(s.state.radius == doctest::Approx(R0 * std::exp(L0 * s.t / 3)).epsilon(1e-3));
    CHECK(tr.samples.back().Lambda == doctest::Approx(L0).epsilon(1e-10));
  }

  SUBCASE("order")
  {
    const double L0 = 3.0;
    const VectorField u = dilation_field(dom, x0, L0);
    std::vector<double> err;
    for (double dt : {0.2, 0.1, 0.05}) {
      const BubbleTrajectory tr = integrate_bubble({x0, R0}, [&](double) -> const VectorField& { return u; }, 0, 1, dt,
                                                   ReferenceBall::build(x0, R0));
      err.push_back(std::abs(tr.samples.back().state.radius - R0 * std::exp(1.0)));
    }
    for (std::size_t i = 1; i < err.size(); ++i) CHECK(std::log2(err[i - 1] / err[i]) == doctest::Approx(4.0).epsilon(0.125));
  }
}

TEST_CASE("radius stays above R0/2 within the safe time")
{
  const BoxDomain dom = BoxDomain::unit_cube(16);
  const Eigen::Vector3d x0(0.5, 0.5, 0.5);
  const double R0 = 0.2;
  const ReferenceBall ball = ReferenceBall::build(x0, R0);
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::Matrix3d A;
    for (int i = 0; i < 9; ++i) A(i) = U(gen);
    const Eigen::Vector3d k(U(gen) * 4, U(gen) * 4, U(gen) * 4);
    const VectorField u = sample(dom, [&](const Eigen::Vector3d& x) -> Eigen::Vector3d {
      return A * (x - x0) * std::cos(k.dot(x)) - 0.3 * (x - x0);
    });
    const double T = safe_time(R0, l2_norm(u));
    const BubbleTrajectory tr = integrate_bubble({x0, R0}, [&](double) -> const VectorField& { return u; }, 0, T, T / 50, ball);
    CHECK(tr.min_radius() >= R0 / 2);
  }
}

TEST_CASE("collapse below half the initial radius aborts")
{
  const BoxDomain dom = BoxDomain::unit_cube(16);
  const Eigen::Vector3d x0(0.5, 0.5, 0.5);
  const VectorField u = dilation_field(dom, x0, -9.0);
  try {
    integrate_bubble({x0, 0.2}, [&](double) -> const VectorField& { return u; }, 0, 1, 0.01, ReferenceBall::build(x0, 0.2));
    FAIL("expected a collapse");
  } catch (const SimulationError& e) {
    CHECK(e.cause() == AbortCause::collapse);
    CHECK(e.time() == doctest::Approx(0.24).epsilon(0.05));
  }
}

TEST_CASE("bubble velocity is Lipschitz away from zero radius")
{
  const BoxDomain dom = BoxDomain::unit_cube(24);
  const VectorField u = sample(dom, [](const Eigen::Vector3d& x) -> Eigen::Vector3d {
    return {std::sin(3 * x[1]), x[0] * x[2], std::cos(2 * x[0]) * x[1]};
  });
  const ReferenceBall ball = ReferenceBall::build({0.5, 0.5, 0.5}, 0.15);
  const double bound = 1.0 * (6.0 + 1.0 / std::pow(0.1, 3));
  std::mt19937 gen(23);
  std::uniform_real_distribution<double> C(0.35, 0.65), Rr(0.1, 0.2);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const BubbleState a{{C(gen), C(gen), C(gen)}, Rr(gen)}, b{{C(gen), C(gen), C(gen)}, Rr(gen)};
    const BubbleRate fa = ode_rhs(0, a, u, ball), fb = ode_rhs(0, b, u, ball);
    const double df = std::sqrt((fa.dx - fb.dx).squaredNorm() + (fa.dR - fb.dR) * (fa.dR - fb.dR));
    const double dX = std::sqrt((a.center - b.center).squaredNorm() + (a.radius - b.radius) * (a.radius - b.radius));
    worst = std::max(worst, df / dX);
  }
  CHECK(worst <= bound);
}
