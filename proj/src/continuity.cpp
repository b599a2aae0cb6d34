#include "bubblesim/continuity.hpp"

#include "bubblesim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace bubblesim {

double ContinuityStepReport::relative_mass_defect() const
{
  return mass_before == 0.0 ? std::abs(mass_after) : std::abs(mass_after - mass_before) / std::abs(mass_before);
}

namespace {

Index stride_of(const BoxDomain& dom, int axis)
{
  return axis == 0 ? 1 : (axis == 1 ? dom.resolution[0] : Index(dom.resolution[0]) * dom.resolution[1]);
}

// Calls f(L, R, face_velocity, axis) for every interior face.
template <typename F>
void for_each_face(const VectorField& u, F&& f)
{
  const BoxDomain& dom = u.domain;
  for (int a = 0; a < 3; ++a) {
    const Index s = stride_of(dom, a);
    for (Index L = 0; L < dom.size(); ++L) {
      if (dom.unflat(L)[a] == dom.resolution[a] - 1) continue;
      const Index R = L + s;
      f(L, R, 0.5 * (u.values(L, a) + u.values(R, a)), a);
    }
  }
}

struct FaceData {
  Eigen::VectorXd outflow; // per cell, sum of outward face speeds / h
  double max_speed_over_h = 0.0;
};

FaceData face_data(const VectorField& u)
{
  const Eigen::Vector3d h = u.domain.spacing();
  FaceData fd;
  fd.outflow = Eigen::VectorXd::Zero(u.domain.size());
  for_each_face(u, [&](Index L, Index R, double uf, int a) {
    if (uf > 0.0) fd.outflow[L] += uf / h[a];
    else fd.outflow[R] -= uf / h[a];
    fd.max_speed_over_h = std::max(fd.max_speed_over_h, std::abs(uf) / h[a]);
  });
  return fd;
}

} // namespace

ScalarField flux_divergence(const ScalarField& rho, const VectorField& u)
{
  const Eigen::Vector3d h = u.domain.spacing();
  ScalarField div(rho.domain);
  for_each_face(u, [&](Index L, Index R, double uf, int a) {
    const double flux = uf * (uf >= 0.0 ? rho[L] : rho[R]) / h[a];
    div[L] += flux;
    div[R] -= flux;
  });
  return div;
}

ScalarField face_divergence(const VectorField& u)
{
  const Eigen::Vector3d h = u.domain.spacing();
  ScalarField div(u.domain);
  for_each_face(u, [&](Index L, Index R, double uf, int a) {
    div[L] += uf / h[a];
    div[R] -= uf / h[a];
  });
  return div;
}

Eigen::SparseMatrix<double> neumann_laplacian_matrix(const BoxDomain& dom)
{
  const Eigen::Vector3d h = dom.spacing();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(7 * dom.size());
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(dom.size());
  for (int a = 0; a < 3; ++a) {
    const Index s = stride_of(dom, a);
    const double c = 1.0 / (h[a] * h[a]);
    for (Index L = 0; L < dom.size(); ++L) {
      if (dom.unflat(L)[a] == dom.resolution[a] - 1) continue;
      const Index R = L + s;
      trips.emplace_back(L, R, c);
      trips.emplace_back(R, L, c);
      diag[L] -= c;
      diag[R] -= c;
    }
  }
  for (Index n = 0; n < dom.size(); ++n) trips.emplace_back(n, n, diag[n]);
  Eigen::SparseMatrix<double> lap(dom.size(), dom.size());
  lap.setFromTriplets(trips.begin(), trips.end());
  return lap;
}

ScalarField neumann_laplacian(const ScalarField& rho)
{
  return ScalarField(rho.domain, neumann_laplacian_matrix(rho.domain) * rho.values);
}

ContinuityStepper::ContinuityStepper(const BoxDomain& dom, double eps, double dt, double tolerance)
    : dom_(dom), eps_(eps), dt_(dt), tol_(tolerance)
{
  if (!(dt > 0.0) || !(eps >= 0.0)) throw SimulationError(AbortCause::domain, "continuity step needs dt > 0, eps >= 0");
  if (eps_ > 0.0) {
    Eigen::SparseMatrix<double> id(dom.size(), dom.size());
    id.setIdentity();
    system_ = id - dt_ * eps_ * neumann_laplacian_matrix(dom);
    system_.makeCompressed();
    solver_.setTolerance(tol_);
    solver_.setMaxIterations(2000);
    solver_.compute(system_);
  }
}

ContinuityStepResult ContinuityStepper::step(const ScalarField& rho, const VectorField& u) const
{
  if (!(rho.domain == dom_) || !(u.domain == dom_))
    throw SimulationError(AbortCause::domain, "continuity step: field domain mismatch");
  ContinuityStepResult out;
  ContinuityStepReport& rep = out.report;
  rep.mass_before = integrate(rho);

  const FaceData fd = face_data(u);
  rep.advective_number = dt_ * fd.max_speed_over_h;
  rep.positivity_number = dt_ * fd.outflow.maxCoeff();
  rep.divergence_norm = face_divergence(u).values.cwiseAbs().maxCoeff();

  ScalarField stage(dom_, rho.values - dt_ * flux_divergence(rho, u).values);
  ScalarField adv(dom_, 0.5 * rho.values + 0.5 * (stage.values - dt_ * flux_divergence(stage, u).values));

  out.rho = ScalarField(dom_);
  if (eps_ > 0.0) {
    out.rho.values = solver_.solveWithGuess(adv.values, adv.values);
    rep.solver_iterations = int(solver_.iterations());
    const double scale = std::max(adv.values.norm(), 1e-300);
    rep.solver_residual = (system_ * out.rho.values - adv.values).norm() / scale;
    if (solver_.info() != Eigen::Success && rep.solver_residual > 1e3 * tol_)
      throw SimulationError(AbortCause::solver_failure, "density diffusion solve did not converge");
  } else {
    out.rho.values = adv.values;
  }

  out.advective_rate = ScalarField(dom_, (adv.values - rho.values) / dt_);
  out.diffusive_rate = ScalarField(dom_, (out.rho.values - adv.values) / dt_);
  rep.mass_after = integrate(out.rho);
  rep.rho_min = out.rho.values.minCoeff();
  rep.rho_max = out.rho.values.maxCoeff();
  rep.negative_density = rep.rho_min < 0.0;
  return out;
}

ContinuityStepResult continuity_step(const ScalarField& rho, const VectorField& u, double eps, double dt)
{
  return ContinuityStepper(rho.domain, eps, dt).step(rho, u);
}

DensityBounds max_principle_bounds(double rho0_min, double rho0_max, const std::vector<double>& times,
                                   const std::vector<double>& divu_norms)
{
  if (!(rho0_min > 0.0)) throw SimulationError(AbortCause::domain, "max principle needs a positive lower density");
  if (times.size() != divu_norms.size()) throw SimulationError(AbortCause::domain, "history length mismatch");
  double integral = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k)
    integral += 0.5 * (times[k] - times[k - 1]) * (divu_norms[k] + divu_norms[k - 1]);
  return {rho0_min * std::exp(-integral), rho0_max * std::exp(integral)};
}

double entropy(const ScalarField& rho)
{
  double s = 0.0;
  for (Index n = 0; n < rho.values.size(); ++n) {
    const double r = rho[n];
    if (!(r > 0.0)) throw SimulationError(AbortCause::domain, "log entropy needs positive density");
    s += r * std::log(r);
  }
  return s * rho.domain.cell_volume();
}

std::vector<double> log_entropy_balance(const std::vector<double>& times, const std::vector<ScalarField>& rho_series,
                                        const std::vector<ScalarField>& divu_series)
{
  if (rho_series.size() != times.size() || divu_series.size() + 1 < times.size())
    throw SimulationError(AbortCause::domain, "log entropy balance: series length mismatch");
  std::vector<double> r(times.size(), 0.0);
  if (times.empty()) return r;
  const double s0 = entropy(rho_series[0]);
  double work = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double dt = times[k] - times[k - 1];
    const Eigen::VectorXd& div = divu_series[k - 1].values;
    const double w = rho_series[k].domain.cell_volume();
    work += 0.5 * dt * w * (rho_series[k - 1].values.dot(div) + rho_series[k].values.dot(div));
    r[k] = entropy(rho_series[k]) - s0 + work;
  }
  return r;
}

std::vector<double> log_entropy_balance(const std::vector<double>& times, const std::vector<ScalarField>& rho_series,
                                        const std::vector<VectorField>& u_series)
{
  std::vector<ScalarField> divs;
  divs.reserve(u_series.size());
  for (const auto& u : u_series) divs.push_back(face_divergence(u));
  return log_entropy_balance(times, rho_series, divs);
}

} // namespace bubblesim
