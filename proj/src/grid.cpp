#include "bubblesim/grid.hpp"

#include "bubblesim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace bubblesim {

void BoxDomain::validate() const
{
  for (int a = 0; a < 3; ++a) {
    if (!(upper[a] > lower[a]))
      throw SimulationError(AbortCause::validation, "domain upper corner must exceed lower corner");
    if (resolution[a] < 4)
      throw SimulationError(AbortCause::validation, "grid resolution must be at least 4 per axis");
  }
}

Eigen::Vector3d BoxDomain::spacing() const
{
  return extent().cwiseQuotient(Eigen::Vector3d(resolution[0], resolution[1], resolution[2]));
}

double BoxDomain::cell_volume() const { return spacing().prod(); }

std::array<int, 3> BoxDomain::unflat(Index n) const
{
  const int i = int(n % resolution[0]);
  const Index rest = n / resolution[0];
  return {i, int(rest % resolution[1]), int(rest / resolution[1])};
}

Eigen::Vector3d BoxDomain::node(int i, int j, int k) const
{
  const Eigen::Vector3d h = spacing();
  return lower + Eigen::Vector3d((i + 0.5) * h[0], (j + 0.5) * h[1], (k + 0.5) * h[2]);
}

Eigen::Vector3d BoxDomain::node(Index n) const
{
  const auto [i, j, k] = unflat(n);
  return node(i, j, k);
}

bool BoxDomain::contains(const Eigen::Vector3d& x) const
{
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

double BoxDomain::distance_to_boundary(const Eigen::Vector3d& x) const
{
  return std::min((x - lower).minCoeff(), (upper - x).minCoeff());
}

ScalarField sample(const BoxDomain& dom, const std::function<double(const Eigen::Vector3d&)>& f)
{
  ScalarField out(dom);
  for (Index n = 0; n < dom.size(); ++n) out[n] = f(dom.node(n));
  return out;
}

VectorField sample(const BoxDomain& dom, const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& f)
{
  VectorField out(dom);
  for (Index n = 0; n < dom.size(); ++n) out.set(n, f(dom.node(n)));
  return out;
}

ScalarField ball_indicator(const BoxDomain& dom, const Eigen::Vector3d& center, double radius, int samples)
{
  if (!(radius > 0.0)) throw SimulationError(AbortCause::domain, "ball radius must be positive");
  samples = std::max(samples, 1);
  ScalarField chi(dom);
  const Eigen::Vector3d h = dom.spacing();
  const double r2 = radius * radius;

  std::array<int, 3> lo{}, hi{};
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max(0, int(std::floor((center[a] - radius - dom.lower[a]) / h[a])) - 1);
    hi[a] = std::min(dom.resolution[a] - 1, int(std::ceil((center[a] + radius - dom.lower[a]) / h[a])) + 1);
  }
  const double inv = 1.0 / samples;
  const double weight = 1.0 / (double(samples) * samples * samples);

  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        const Eigen::Vector3d c = dom.node(i, j, k);
        const Eigen::Vector3d d = (c - center).cwiseAbs();
        const Eigen::Vector3d near = (d - 0.5 * h).cwiseMax(0.0);
        const Eigen::Vector3d far = d + 0.5 * h;
        if (far.squaredNorm() <= r2) {
          chi[dom.flat(i, j, k)] = 1.0;
          continue;
        }
        if (near.squaredNorm() > r2) continue;
        int inside = 0;
        for (int c3 = 0; c3 < samples; ++c3)
          for (int c2 = 0; c2 < samples; ++c2)
            for (int c1 = 0; c1 < samples; ++c1) {
              const Eigen::Vector3d s = c + h.cwiseProduct(Eigen::Vector3d((c1 + 0.5) * inv - 0.5,
                                                                          (c2 + 0.5) * inv - 0.5,
                                                                          (c3 + 0.5) * inv - 0.5));
              if ((s - center).squaredNorm() <= r2) ++inside;
            }
        chi[dom.flat(i, j, k)] = inside * weight;
      }
  return chi;
}

Eigen::VectorXd partial(const BoxDomain& dom, const Eigen::Ref<const Eigen::VectorXd>& f, int axis)
{
  const auto& res = dom.resolution;
  const int n = res[axis];
  const double h = dom.spacing()[axis];
  const Index stride = axis == 0 ? 1 : (axis == 1 ? res[0] : Index(res[0]) * res[1]);
  Eigen::VectorXd out(f.size());
  for (Index m = 0; m < dom.size(); ++m) {
    const int i = dom.unflat(m)[axis];
    if (i == 0)
      out[m] = (-3.0 * f[m] + 4.0 * f[m + stride] - f[m + 2 * stride]) / (2.0 * h);
    else if (i == n - 1)
      out[m] = (3.0 * f[m] - 4.0 * f[m - stride] + f[m - 2 * stride]) / (2.0 * h);
    else
      out[m] = (f[m + stride] - f[m - stride]) / (2.0 * h);
  }
  return out;
}

VectorField gradient(const ScalarField& f)
{
  VectorField g(f.domain);
  for (int a = 0; a < 3; ++a) g.values.col(a) = partial(f.domain, f.values, a);
  return g;
}

ScalarField divergence(const VectorField& u)
{
  ScalarField d(u.domain);
  for (int a = 0; a < 3; ++a) d.values += partial(u.domain, u.values.col(a), a);
  return d;
}

TensorField jacobian(const VectorField& u)
{
  TensorField t(u.domain);
  for (int d = 0; d < 3; ++d)
    for (int k = 0; k < 3; ++k) t.values.col(3 * d + k) = partial(u.domain, u.values.col(d), k);
  return t;
}

TensorField sym_gradient(const VectorField& u)
{
  TensorField j = jacobian(u);
  TensorField s(u.domain);
  for (int d = 0; d < 3; ++d)
    for (int k = 0; k < 3; ++k)
      s.values.col(3 * d + k) = 0.5 * (j.values.col(3 * d + k) + j.values.col(3 * k + d));
  return s;
}

namespace {

struct Stencil {
  std::array<Index, 8> nodes;
  std::array<double, 8> weights;
};

Stencil trilinear(const BoxDomain& dom, const Eigen::Vector3d& x)
{
  const Eigen::Vector3d h = dom.spacing();
  std::array<int, 3> i0{};
  std::array<double, 3> t{};
  for (int a = 0; a < 3; ++a) {
    const int n = dom.resolution[a];
    const double s = std::clamp((x[a] - dom.lower[a]) / h[a] - 0.5, 0.0, double(n - 1));
    i0[a] = std::min(int(std::floor(s)), n - 2);
    t[a] = s - i0[a];
  }
  Stencil st;
  int c = 0;
  for (int dk = 0; dk < 2; ++dk)
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di, ++c) {
        st.nodes[c] = dom.flat(i0[0] + di, i0[1] + dj, i0[2] + dk);
        st.weights[c] = (di ? t[0] : 1.0 - t[0]) * (dj ? t[1] : 1.0 - t[1]) * (dk ? t[2] : 1.0 - t[2]);
      }
  return st;
}

} // namespace

Eigen::Vector3d interpolate(const VectorField& u, const Eigen::Vector3d& x)
{
  const Stencil st = trilinear(u.domain, x);
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  for (int c = 0; c < 8; ++c) v += st.weights[c] * u.at(st.nodes[c]);
  return v;
}

double interpolate(const ScalarField& f, const Eigen::Vector3d& x)
{
  const Stencil st = trilinear(f.domain, x);
  double v = 0.0;
  for (int c = 0; c < 8; ++c) v += st.weights[c] * f[st.nodes[c]];
  return v;
}

double l2_norm(const VectorField& u) { return std::sqrt(u.values.squaredNorm() * u.domain.cell_volume()); }

double sup_norm(const VectorField& u) { return u.values.rowwise().norm().maxCoeff(); }

} // namespace bubblesim
