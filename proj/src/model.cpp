#include "lgqs/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "lgqs/errors.hpp"

namespace lgqs {

namespace {

Mat stack_rows(const Mat& top, const Mat& bottom) {
  Mat out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

Observer make_observer(const CMat& M, const Mat& Cbar, double hbar) {
  Observer obs;
  obs.unraveling = M;
  obs.efficiencies = validate_unraveling(M);
  std::tie(obs.C, obs.Gamma) = build_measurement(M, Cbar, hbar);
  return obs;
}

}  // namespace

LgSystem LgqModel::observed_system() const { return {A, D, observed.C, observed.Gamma}; }

LgSystem LgqModel::unobserved_system() const { return {A, D, unobserved.C, unobserved.Gamma}; }

LgSystem LgqModel::joint_system() const {
  return {A, D, stack_rows(observed.C, unobserved.C), stack_rows(observed.Gamma, unobserved.Gamma)};
}

LgSystem LgqModel::unconditioned_system() const { return {A, D, Mat::Zero(0, dim()), Mat::Zero(0, dim())}; }

std::pair<Mat, Mat> build_drift_diffusion(const Mat& G, const Mat& Cbar, double hbar) {
  const auto dim = G.rows();
  if (G.cols() != dim || dim % 2 != 0) throw ShapeError("G must be 2N x 2N");
  if (Cbar.cols() != dim || Cbar.rows() % 2 != 0) throw ShapeError("Cbar must be 2M x 2N");
  if ((G - G.transpose()).norm() > 1e-12 * std::max(1.0, G.norm())) throw DomainError("G must be symmetric");
  const Mat sigma = symplectic_form(static_cast<int>(dim / 2));
  const Mat s = channel_symplectic(static_cast<int>(Cbar.rows() / 2));
  Mat a = sigma * (G + Cbar.transpose() * s * Cbar);
  Mat d = symmetrize(hbar * sigma * Cbar.transpose() * Cbar * sigma.transpose());
  return {a, d};
}

std::vector<double> validate_unraveling(const CMat& M) {
  if (M.rows() != M.cols()) throw UnravelingError("unraveling matrix must be square");
  const CMat mmd = M * M.adjoint();
  std::vector<double> eta(static_cast<std::size_t>(M.rows()));
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) {
      if (i != j && std::abs(mmd(i, j)) > 1e-12)
        throw UnravelingError("M M^dagger has off-diagonal entry (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
    }
    const double e = mmd(i, i).real();
    if (std::abs(mmd(i, i).imag()) > 1e-12 || e < -1e-12 || e > 1.0 + 1e-12)
      throw UnravelingError("channel " + std::to_string(i) + " efficiency outside [0,1]");
    eta[static_cast<std::size_t>(i)] = std::clamp(e, 0.0, 1.0);
  }
  return eta;
}

std::pair<Mat, Mat> build_measurement(const CMat& M, const Mat& Cbar, double hbar) {
  validate_unraveling(M);
  const auto m = M.rows();
  if (Cbar.rows() != 2 * m) throw ShapeError("unraveling size does not match Cbar channel count");
  const auto dim = Cbar.cols();
  Mat tt(m, 2 * m);
  tt << M.transpose().real(), M.transpose().imag();
  const Mat sigma = symplectic_form(static_cast<int>(dim / 2));
  const Mat s = channel_symplectic(static_cast<int>(m));
  Mat c = (2.0 / std::sqrt(hbar)) * tt * Cbar;
  Mat gamma = -std::sqrt(hbar) * tt * s * Cbar * sigma.transpose();
  return {c, gamma};
}

LgqModel make_model(const Mat& G, const Mat& Cbar, double hbar, const CMat& M_o, const CMat& M_u) {
  if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
  LgqModel model;
  model.n_modes = static_cast<int>(G.rows() / 2);
  model.hbar = hbar;
  model.G = G;
  model.Cbar = Cbar;
  std::tie(model.A, model.D) = build_drift_diffusion(G, Cbar, hbar);
  model.observed = make_observer(M_o, Cbar, hbar);
  model.unobserved = make_observer(M_u, Cbar, hbar);
  for (std::size_t k = 0; k < model.observed.efficiencies.size(); ++k) {
    if (model.observed.efficiencies[k] + model.unobserved.efficiencies[k] > 1.0 + 1e-12)
      throw UnravelingError("combined efficiency on channel " + std::to_string(k) + " exceeds 1");
  }
  return model;
}

std::complex<double> homodyne_phase(double theta) {
  double c = std::cos(theta);
  double s = std::sin(theta);
  if (std::abs(c) < 1e-15) c = 0.0;
  if (std::abs(s) < 1e-15) s = 0.0;
  return {c, s};
}

LgqModel opo_model(double eta_o, double theta_o, double eta_u, double theta_u, double hbar) {
  if (eta_o < 0.0 || eta_u < 0.0 || eta_o + eta_u > 1.0 + 1e-12)
    throw UnravelingError("opo_model: efficiencies must be non-negative with eta_o + eta_u <= 1");
  Mat G(2, 2);
  G << 0.0, 1.0, 1.0, 0.0;
  const Mat cbar = Mat::Identity(2, 2);
  CMat mo(1, 1), mu(1, 1);
  mo(0, 0) = std::sqrt(eta_o) * homodyne_phase(theta_o);
  mu(0, 0) = std::sqrt(eta_u) * homodyne_phase(theta_u);
  return make_model(G, cbar, hbar, mo, mu);
}

LgqModel attenuator_model(double gamma_down, double gamma_up, double theta_o, double theta_u, double hbar) {
  if (!(gamma_up >= 0.0) || !(gamma_down > gamma_up))
    throw DomainError("attenuator_model: requires gamma_down > gamma_up >= 0 (amplifier regime rejected)");
  const double a = std::sqrt(gamma_down);
  const double b = std::sqrt(gamma_up);
  Mat cbar(4, 2);
  cbar << a, 0.0,
          b, 0.0,
          0.0, a,
          0.0, -b;
  CMat mo = CMat::Zero(2, 2);
  CMat mu = CMat::Zero(2, 2);
  mo(0, 0) = homodyne_phase(theta_o);  // eta_down,o = 1
  mu(1, 1) = homodyne_phase(theta_u);  // eta_up,u = 1
  return make_model(Mat::Zero(2, 2), cbar, hbar, mo, mu);
}

LgqModel swap_observers(const LgqModel& model) {
  LgqModel out = model;
  std::swap(out.observed, out.unobserved);
  return out;
}

}  // namespace lgqs
