#include "bubblesim/galerkin.hpp"

#include "bubblesim/continuity.hpp"
#include "bubblesim/errors.hpp"
#include "bubblesim/modes.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <sstream>

namespace bubblesim {

namespace {

constexpr double kPi = std::numbers::pi;

double wave_eigenvalue(const std::array<int, 3>& k, const Eigen::Vector3d& L)
{
  double s = 0.0;
  for (int a = 0; a < 3; ++a) s += (k[a] / L[a]) * (k[a] / L[a]);
  return s;
}

constexpr Index kChunk = 4096;

// g += X^T diag(w) Y over rows, chunked to keep the scaled copy in cache
void accumulate_gram(Eigen::MatrixXd& g, const Eigen::MatrixXd& X, const double* w, const Eigen::MatrixXd& Y)
{
  Eigen::MatrixXd tmp;
  for (Index r0 = 0; r0 < X.rows(); r0 += kChunk) {
    const Index len = std::min(kChunk, X.rows() - r0);
    tmp.noalias() = Eigen::Map<const Eigen::VectorXd>(w + r0, len).asDiagonal() * Y.middleRows(r0, len);
    g.noalias() += X.middleRows(r0, len).transpose() * tmp;
  }
}

void scatter_add(Eigen::MatrixXd& out, const Eigen::MatrixXd& g, const std::vector<int>& rows,
                 const std::vector<int>& cols)
{
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(rows[i], cols[j]) += g(Index(i), Index(j));
}

// out += blocks bx of X against by of Y weighted by w
void add_block_gram(Eigen::MatrixXd& out, const BlockColumns& X, std::size_t bx, const double* w, const BlockColumns& Y,
                    std::size_t by)
{
  if (X.support[bx].empty() || Y.support[by].empty()) return;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(Index(X.support[bx].size()), Index(Y.support[by].size()));
  accumulate_gram(g, X.blocks[bx], w, Y.blocks[by]);
  scatter_add(out, g, X.support[bx], Y.support[by]);
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& X, const Eigen::VectorXd& w, const Eigen::MatrixXd& Y)
{
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(X.cols(), Y.cols());
  accumulate_gram(g, X, w.data(), Y);
  return g;
}

Eigen::MatrixXd skew(const Eigen::MatrixXd& C) { return 0.5 * (C - C.transpose()); }

std::vector<int> merge_support(const std::vector<int>& a, const std::vector<int>& b)
{
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// block d: sum_k a_k .* G_(3d+k)
BlockColumns directional(const GalerkinBasis& basis, const Eigen::Matrix<double, Eigen::Dynamic, 3>& a)
{
  const BlockColumns& G = basis.gradient_blocks();
  BlockColumns out;
  out.block_rows = G.block_rows;
  out.cols = G.cols;
  for (int d = 0; d < 3; ++d) {
    std::vector<int> sup;
    for (int k = 0; k < 3; ++k) sup = merge_support(sup, G.support[3 * d + k]);
    Eigen::MatrixXd blk = Eigen::MatrixXd::Zero(G.block_rows, Index(sup.size()));
    const bool aligned = G.support[3 * d] == sup && G.support[3 * d + 1] == sup && G.support[3 * d + 2] == sup;
    for (int k = 0; aligned && k < 3; ++k) blk.noalias() += a.col(k).asDiagonal() * G.blocks[3 * d + k];
    for (int k = 0; !aligned && k < 3; ++k) {
      const std::vector<int>& s = G.support[3 * d + k];
      for (std::size_t c = 0; c < s.size(); ++c) {
        const Index pos = std::lower_bound(sup.begin(), sup.end(), s[c]) - sup.begin();
        blk.col(pos).array() += a.col(k).array() * G.blocks[3 * d + k].col(Index(c)).array();
      }
    }
    out.support.push_back(std::move(sup));
    out.blocks.push_back(std::move(blk));
  }
  return out;
}

} // namespace

BlockColumns BlockColumns::compress(const Eigen::MatrixXd& X, Index block_rows)
{
  BlockColumns out;
  out.block_rows = block_rows;
  out.cols = int(X.cols());
  const Index nb = X.rows() / block_rows;
  for (Index b = 0; b < nb; ++b) {
    std::vector<int> sup;
    for (int j = 0; j < X.cols(); ++j)
      if (!X.col(j).segment(b * block_rows, block_rows).isZero(0.0)) sup.push_back(j);
    Eigen::MatrixXd blk(block_rows, Index(sup.size()));
    for (std::size_t c = 0; c < sup.size(); ++c) blk.col(Index(c)) = X.col(sup[c]).segment(b * block_rows, block_rows);
    out.support.push_back(std::move(sup));
    out.blocks.push_back(std::move(blk));
  }
  return out;
}

Eigen::MatrixXd weighted_gram(const BlockColumns& X, const Eigen::VectorXd& w, const BlockColumns& Y)
{
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(X.cols, Y.cols);
  const Index M = X.block_rows;
  const bool shared = w.size() == M;
  for (std::size_t b = 0; b < X.blocks.size(); ++b) add_block_gram(out, X, b, w.data() + (shared ? 0 : Index(b) * M), Y, b);
  return out;
}

GalerkinBasis GalerkinBasis::sine(const BoxDomain& dom, int N, int max_wavenumber)
{
  dom.validate();
  if (N < 1) throw SimulationError(AbortCause::validation, "basis size must be at least 1");
  std::array<int, 3> kmax{};
  for (int a = 0; a < 3; ++a)
    kmax[a] = max_wavenumber > 0 ? std::min(max_wavenumber, dom.resolution[a] - 1) : dom.resolution[a] - 1;
  const long available = 3L * kmax[0] * kmax[1] * kmax[2];
  if (N > available) {
    std::ostringstream msg;
    msg << "basis size " << N << " exceeds the " << available << " sine modes below the cutoff";
    throw SimulationError(AbortCause::validation, msg.str());
  }
  const Eigen::Vector3d L = dom.extent();

  std::vector<std::array<int, 3>> ks;
  for (int k3 = 1; k3 <= kmax[2]; ++k3)
    for (int k2 = 1; k2 <= kmax[1]; ++k2)
      for (int k1 = 1; k1 <= kmax[0]; ++k1) ks.push_back({k1, k2, k3});
  std::stable_sort(ks.begin(), ks.end(), [&](const auto& a, const auto& b) {
    const double la = wave_eigenvalue(a, L), lb = wave_eigenvalue(b, L);
    if (std::abs(la - lb) > 1e-12 * std::max(la, lb)) return la < lb;
    return a < b;
  });

  GalerkinBasis b;
  b.dom_ = dom;
  b.norm_ = std::sqrt(8.0 / dom.volume());
  for (const auto& k : ks) {
    for (int d = 0; d < 3 && int(b.modes_.size()) < N; ++d) b.modes_.push_back({k, d});
    if (int(b.modes_.size()) >= N) break;
  }

  const Index M = dom.size();
  b.values_ = Eigen::MatrixXd::Zero(3 * M, N);
  b.gradients_ = Eigen::MatrixXd::Zero(9 * M, N);
  for (int j = 0; j < N; ++j) {
    const SineMode& m = b.modes_[j];
    std::array<Eigen::VectorXd, 3> s, c;
    for (int a = 0; a < 3; ++a) {
      const int n = dom.resolution[a];
      const double w = m.k[a] * kPi / L[a];
      s[a].resize(n);
      c[a].resize(n);
      for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) * L[a] / n;
        s[a][i] = std::sin(w * x);
        c[a][i] = w * std::cos(w * x);
      }
    }
    const int d = m.component;
    for (Index n = 0; n < M; ++n) {
      const auto [i, jj, l] = dom.unflat(n);
      b.values_(d * M + n, j) = b.norm_ * s[0][i] * s[1][jj] * s[2][l];
      b.gradients_((3 * d + 0) * M + n, j) = b.norm_ * c[0][i] * s[1][jj] * s[2][l];
      b.gradients_((3 * d + 1) * M + n, j) = b.norm_ * s[0][i] * c[1][jj] * s[2][l];
      b.gradients_((3 * d + 2) * M + n, j) = b.norm_ * s[0][i] * s[1][jj] * c[2][l];
    }
  }
  b.finish();
  return b;
}

GalerkinBasis GalerkinBasis::from_samples(const BoxDomain& dom, Eigen::MatrixXd values, Eigen::MatrixXd gradients)
{
  const Index M = dom.size();
  if (values.rows() != 3 * M || gradients.rows() != 9 * M || values.cols() != gradients.cols())
    throw SimulationError(AbortCause::domain, "basis samples have inconsistent shapes");
  GalerkinBasis b;
  b.dom_ = dom;
  b.values_ = std::move(values);
  b.gradients_ = std::move(gradients);
  b.finish();
  return b;
}

void GalerkinBasis::finish()
{
  const Index M = dom_.size();
  const int N = size();
  const auto G = [&](int d, int k) { return gradients_.middleRows((3 * d + k) * M, M); };
  div_ = G(0, 0) + G(1, 1) + G(2, 2);
  strain_.resize(6 * M, N);
  for (int d = 0; d < 3; ++d) strain_.middleRows(d * M, M) = G(d, d) - div_ / 3.0;
  const double r = std::sqrt(2.0) / 2.0;
  strain_.middleRows(3 * M, M) = r * (G(0, 1) + G(1, 0));
  strain_.middleRows(4 * M, M) = r * (G(0, 2) + G(2, 0));
  strain_.middleRows(5 * M, M) = r * (G(1, 2) + G(2, 1));
  value_blocks_ = BlockColumns::compress(values_, M);
  gradient_blocks_ = BlockColumns::compress(gradients_, M);
}

VectorField GalerkinBasis::evaluate(const Eigen::VectorXd& alpha) const
{
  const Eigen::VectorXd v = values_ * alpha;
  return VectorField(dom_, Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 3>>(v.data(), dom_.size(), 3));
}

TensorField GalerkinBasis::evaluate_gradient(const Eigen::VectorXd& alpha) const
{
  const Eigen::VectorXd v = gradients_ * alpha;
  TensorField t(dom_);
  t.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 9>>(v.data(), dom_.size(), 9);
  return t;
}

ScalarField GalerkinBasis::evaluate_divergence(const Eigen::VectorXd& alpha) const
{
  return ScalarField(dom_, div_ * alpha);
}

VectorField GalerkinBasis::function(int i) const
{
  return VectorField(dom_, Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 3>>(values_.col(i).data(), dom_.size(), 3));
}

Eigen::Vector3d GalerkinBasis::value_at(int i, const Eigen::Vector3d& x) const
{
  if (!is_sine()) throw SimulationError(AbortCause::domain, "closed-form evaluation needs a sine basis");
  const SineMode& m = modes_[i];
  const Eigen::Vector3d L = dom_.extent();
  double v = norm_;
  for (int a = 0; a < 3; ++a) v *= std::sin(m.k[a] * kPi * (x[a] - dom_.lower[a]) / L[a]);
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  out[m.component] = v;
  return out;
}

double GalerkinBasis::w1inf_norm(int i) const
{
  if (is_sine()) return norm_ * (1.0 + kPi * std::sqrt(wave_eigenvalue(modes_[i].k, dom_.extent())));
  const Index M = dom_.size();
  double vmax = 0.0, gmax = 0.0;
  for (Index n = 0; n < M; ++n) {
    double v2 = 0.0, g2 = 0.0;
    for (int d = 0; d < 3; ++d) v2 += values_(d * M + n, i) * values_(d * M + n, i);
    for (int c = 0; c < 9; ++c) g2 += gradients_(c * M + n, i) * gradients_(c * M + n, i);
    vmax = std::max(vmax, v2);
    gmax = std::max(gmax, g2);
  }
  return std::sqrt(vmax) + std::sqrt(gmax);
}

Eigen::VectorXd GalerkinBasis::project(const VectorField& u) const
{
  const Eigen::Map<const Eigen::VectorXd> flat(u.values.data(), 3 * dom_.size());
  return values_.transpose() * flat * dom_.cell_volume();
}

Eigen::MatrixXd GalerkinBasis::gram() const { return values_.transpose() * values_ * dom_.cell_volume(); }

Eigen::MatrixXd assemble_mass(const ScalarField& rho, const GalerkinBasis& basis)
{
  const Eigen::VectorXd w = rho.values * basis.domain().cell_volume();
  return weighted_gram(basis.value_blocks(), w, basis.value_blocks());
}

DensityRates continuous_density_rates(const ScalarField& rho, const VectorField& u, double eps)
{
  DensityRates r;
  r.advective = ScalarField(rho.domain, -flux_divergence(rho, u).values);
  r.diffusive = ScalarField(rho.domain, eps * neumann_laplacian(rho).values);
  return r;
}

Eigen::MatrixXd assemble_viscous(const ScalarField& chi, const SimulationParams& p, const GalerkinBasis& basis)
{
  const double w = basis.domain().cell_volume();
  const Eigen::ArrayXd c = chi.values.array();
  const Eigen::VectorXd mu = (w * ((1.0 - c) * p.mu_f + c * p.n_pen)).matrix();
  const Eigen::VectorXd nu = (w * ((1.0 - c) * p.nu_f + c * p.nu_b)).matrix();
  // 2 mu |D_dev|^2 = mu (G_dk G_dk + G_dk G_kd) - (2/3) mu (div)^2
  const BlockColumns& G = basis.gradient_blocks();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  for (int d = 0; d < 3; ++d)
    for (int k = 0; k < 3; ++k) {
      add_block_gram(out, G, std::size_t(3 * d + k), mu.data(), G, std::size_t(3 * d + k));
      add_block_gram(out, G, std::size_t(3 * d + k), mu.data(), G, std::size_t(3 * k + d));
    }
  const Eigen::VectorXd bulk = nu - (2.0 / 3.0) * mu;
  return out + weighted_gram(basis.divergences(), bulk, basis.divergences());
}

Eigen::MatrixXd assemble_penalization(const ScalarField& chi, const BubbleState& frame, double n_pen,
                                      const GalerkinBasis& basis)
{
  const int N = basis.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(N, N);
  if (n_pen == 0.0) return out;
  const BoxDomain& dom = basis.domain();
  const Index M = dom.size();
  std::vector<Index> nodes;
  for (Index n = 0; n < M; ++n)
    if (chi[n] != 0.0) nodes.push_back(n);
  if (nodes.empty()) return out;
  if (!(frame.radius > 0.0)) throw SimulationError(AbortCause::degenerate_indicator, "penalization frame has no radius");

  const Index K = Index(nodes.size());
  const double w = dom.cell_volume();
  const double R = frame.radius, R3 = R * R * R, R5 = R3 * R * R;
  const double cV = 3.0 / (4.0 * kPi * R3) * w;
  const double cW = 15.0 / (8.0 * kPi * R5) * w;
  const double cL = 15.0 / (4.0 * kPi * R5) * w;

  // Psi restricted to the bubble nodes, functionals P (7 x 3K) and mode
  // fields E (3K x 7) so that Pi Psi = E P Psi.
  Eigen::MatrixXd psi(3 * K, N);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(7, 3 * K);
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(3 * K, 7);
  Eigen::VectorXd wchi(3 * K);
  for (Index q = 0; q < K; ++q) {
    const Index n = nodes[q];
    const double c = chi[n];
    const Eigen::Vector3d r = dom.node(n) - frame.center;
    for (int d = 0; d < 3; ++d) {
      psi.row(d * K + q) = basis.values().row(d * M + n);
      wchi[d * K + q] = n_pen * w * c;
      P(d, d * K + q) = cV * c;
      P(6, d * K + q) = cL * c * r[d];
      E(d * K + q, d) = 1.0;
      E(d * K + q, 6) = r[d] / 3.0;
    }
    // (r x v)_e rows 3..5, (omega_e e_e) x r columns 3..5
    P(3, 2 * K + q) = cW * c * r[1];
    P(3, 1 * K + q) = -cW * c * r[2];
    P(4, 0 * K + q) = cW * c * r[2];
    P(4, 2 * K + q) = -cW * c * r[0];
    P(5, 1 * K + q) = cW * c * r[0];
    P(5, 0 * K + q) = -cW * c * r[1];
    E(1 * K + q, 3) = -r[2];
    E(2 * K + q, 3) = r[1];
    E(0 * K + q, 4) = r[2];
    E(2 * K + q, 4) = -r[0];
    E(0 * K + q, 5) = -r[1];
    E(1 * K + q, 5) = r[0];
  }
  const Eigen::MatrixXd D = psi - E * (P * psi);
  return weighted_gram(D, wchi, D);
}

StiffnessBlocks assemble_stiffness(const ScalarField& rho, const VectorField& u, const ScalarField& chi,
                                   const VectorField& grad_rho, const BubbleState& frame, const SimulationParams& p,
                                   const GalerkinBasis& basis, const DensityRates* rates)
{
  const double w = basis.domain().cell_volume();
  DensityRates own;
  if (!rates) {
    own = continuous_density_rates(rho, u, p.epsilon);
    rates = &own;
  }

  StiffnessBlocks b;
  const BlockColumns& Phi = basis.value_blocks();
  const BlockColumns U = directional(basis, u.values);
  const Eigen::MatrixXd C = weighted_gram(Phi, rho.values * w, U);
  b.convection = skew(C) + 0.5 * weighted_gram(Phi, rates->advective.values * w, Phi);

  b.regularization = 0.5 * weighted_gram(Phi, rates->diffusive.values * w, Phi);
  if (p.epsilon != 0.0) {
    const BlockColumns Gr = directional(basis, grad_rho.values);
    const Eigen::MatrixXd Eps = -p.epsilon * weighted_gram(Gr, Eigen::VectorXd::Constant(rho.domain.size(), w), Phi);
    b.regularization += skew(Eps);
  }

  b.viscous = assemble_viscous(chi, p, basis);
  b.penalization = assemble_penalization(chi, frame, p.n_pen, basis);
  return b;
}

double convection_skew_defect(const ScalarField& rho, const VectorField& u, const GalerkinBasis& basis)
{
  const double w = basis.domain().cell_volume();
  const Eigen::MatrixXd C =
      weighted_gram(basis.value_blocks(), rho.values * w, directional(basis, u.values));
  const double cn = C.norm();
  return cn == 0.0 ? 0.0 : 0.5 * (C + C.transpose()).norm() / cn;
}

Eigen::VectorXd assemble_forcing(const ScalarField& rho, const ScalarField& chi, double R_b, const SimulationParams& p,
                                 const GalerkinBasis& basis)
{
  if (!(R_b > 0.0)) throw SimulationError(AbortCause::collapse, "forcing needs a positive bubble radius");
  const BoxDomain& dom = basis.domain();
  const Index M = dom.size();
  const double w = dom.cell_volume();
  Eigen::VectorXd body(3 * M);
  Eigen::VectorXd press(M);
  for (Index n = 0; n < M; ++n) {
    for (int d = 0; d < 3; ++d) body[d * M + n] = w * rho[n] * p.g[d];
    press[n] = w * (chi[n] * p.kappa_b / R_b + pressure(rho[n], chi[n], p));
  }
  return -basis.values().transpose() * body + basis.divergences().transpose() * press;
}

GalerkinState momentum_step(const GalerkinState& state, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                            const Eigen::VectorXd& F, double dt, MomentumStepReport* report)
{
  const Eigen::MatrixXd M = A + dt * B;
  const Eigen::VectorXd rhs = A * state.alpha + dt * F;
  GalerkinState next{Eigen::VectorXd::Zero(rhs.size()), state.t + dt};
  double residual = 0.0;
  if (rhs.norm() > 0.0) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    next.alpha = lu.solve(rhs);
    residual = (M * next.alpha - rhs).norm() / rhs.norm();
    if (!next.alpha.allFinite() || !(residual <= 1e-10)) {
      std::ostringstream msg;
      msg << "momentum system is singular or ill-conditioned (relative residual " << residual << ")";
      throw SimulationError(AbortCause::solver_failure, msg.str(), state.t);
    }
  }
  if (report) report->residual = residual;
  return next;
}

} // namespace bubblesim
