#include "geoaccel/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "geoaccel/io.hpp"

namespace geoaccel {

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> eigen_of(const Matrix& H) {
  if (H.rows() == 0 || H.rows() != H.cols()) {
    throw std::invalid_argument("H must be a non-empty square matrix");
  }
  if (!H.allFinite()) throw std::invalid_argument("H has non-finite entries");
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("H must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition of H failed");
  if (!(es.eigenvalues().minCoeff() > 0.0)) throw std::invalid_argument("H must be positive definite");
  return es;
}

Vector star(const Vector& x_star, int n) {
  Vector u = Vector::Zero(2 * n);
  if (x_star.size() != 0) {
    if (x_star.size() != n) throw std::invalid_argument("x_star size mismatch");
    u.head(n) = x_star;
  }
  return u;
}

Matrix assemble(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
  const Eigen::Index n = a.rows();
  Matrix A(2 * n, 2 * n);
  A << a, b, c, d;
  return A;
}

}  // namespace

LinearSystem build_prox_ode_matrix(const Matrix& H, double eta, const Vector& x_star) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  const auto es = eigen_of(H);
  const int n = static_cast<int>(H.rows());
  const Matrix I = Matrix::Identity(n, n);
  const Matrix H_inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                       es.eigenvectors().transpose();
  HyperParams p;
  p.eta = eta;
  p.tau = 1.0 / eta;
  p.alpha = 1.0;
  return {OdeKind::ProxPoint, assemble(-I, -I / eta + H_inv, eta * I, -eta * H_inv), star(x_star, n),
          H, p};
}

LinearSystem build_agm_ode_matrix(const Matrix& H, double eta, double tau, double alpha,
                                  const Vector& x_star) {
  if (!(eta > 0.0) || !(tau > 0.0)) throw std::invalid_argument("eta and tau must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  eigen_of(H);
  const int n = static_cast<int>(H.rows());
  const Matrix I = Matrix::Identity(n, n);
  const double c = alpha / (eta * tau);
  HyperParams p;
  p.eta = eta;
  p.tau = tau;
  p.alpha = alpha;
  return {OdeKind::Agm, assemble(-c * H, (-1.0 / eta + c) * I, H / tau, -I / tau), star(x_star, n),
          H, p};
}

LinearSystem build_heavy_ball_matrix(const Matrix& H, double beta, double gamma,
                                     const Vector& x_star) {
  eigen_of(H);
  const int n = static_cast<int>(H.rows());
  const Matrix I = Matrix::Identity(n, n);
  HyperParams p;
  p.beta = beta;
  p.gamma = gamma;
  return {OdeKind::HeavyBall, assemble(Matrix::Zero(n, n), I, -gamma * H, -(1.0 - beta) * I),
          star(x_star, n), H, p};
}

LinearSystem build_linear_system(OdeKind kind, const Matrix& H, const HyperParams& p,
                                 const Vector& x_star) {
  switch (kind) {
    case OdeKind::ProxPoint:
      return build_prox_ode_matrix(H, p.eta, x_star);
    case OdeKind::Agm:
      return build_agm_ode_matrix(H, p.eta, p.tau, p.alpha, x_star);
    case OdeKind::HeavyBall:
      return build_heavy_ball_matrix(H, p.beta, p.gamma, x_star);
  }
  throw std::logic_error("unknown ODE kind");
}

Matrix block_diagonal_form(const LinearSystem& sys) {
  const auto es = eigen_of(sys.H);
  const Eigen::Index n = sys.H.rows();
  const Matrix& U = es.eigenvectors();
  Matrix W = Matrix::Zero(2 * n, 2 * n);
  W.topLeftCorner(n, n) = U;
  W.bottomRightCorner(n, n) = U;
  Matrix P = Matrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    P(2 * i, i) = 1.0;
    P(2 * i + 1, n + i) = 1.0;
  }
  return P * (W.transpose() * sys.A * W) * P.transpose();
}

std::vector<BlockPair> block_diagonalize(const LinearSystem& sys) {
  const auto es = eigen_of(sys.H);
  const Matrix D = block_diagonal_form(sys);
  const Eigen::Index n = sys.H.rows();
  std::vector<BlockPair> blocks;
  blocks.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Matrix2d T = D.block<2, 2>(2 * i, 2 * i);
    const auto [plus, minus] = block_eigenvalues(T);
    blocks.push_back({es.eigenvalues()[i], T, plus, minus});
  }
  return blocks;
}

double block_discriminant(const Eigen::Matrix2d& T) {
  const double tr = T(0, 0) + T(1, 1);
  const double det = T(0, 0) * T(1, 1) - T(0, 1) * T(1, 0);
  return tr * tr - 4.0 * det;
}

std::pair<std::complex<double>, std::complex<double>> block_eigenvalues(const Eigen::Matrix2d& T) {
  const double tr = T(0, 0) + T(1, 1);
  const std::complex<double> root = std::sqrt(std::complex<double>(block_discriminant(T), 0.0));
  return {(tr + root) / 2.0, (tr - root) / 2.0};
}

std::vector<std::complex<double>> dense_spectrum(const Matrix& A) {
  Eigen::EigenSolver<Matrix> es(A, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()[i]);
  return out;
}

double spectral_abscissa(const Matrix& A) {
  double a = -std::numeric_limits<double>::infinity();
  for (const auto& v : dense_spectrum(A)) a = std::max(a, v.real());
  return a;
}

double spectral_abscissa(const LinearSystem& sys) {
  if (sys.H.size() == 0) return spectral_abscissa(sys.A);
  double a = -std::numeric_limits<double>::infinity();
  for (const auto& b : block_diagonalize(sys)) {
    a = std::max({a, b.nu_plus.real(), b.nu_minus.real()});
  }
  return a;
}

double decay_envelope(const LinearSystem& sys, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("decay_envelope: t must be non-negative");
  return std::exp(t * spectral_abscissa(sys));
}

double decay_rate_bound(OdeKind kind, double mu, double L) {
  const double sm = std::sqrt(mu), sl = std::sqrt(L);
  switch (kind) {
    case OdeKind::ProxPoint:
    case OdeKind::HeavyBall:
      return sm / (sm + sl);
    case OdeKind::Agm:
      return 0.5 * std::sqrt(mu / L);
  }
  throw std::logic_error("unknown ODE kind");
}

HyperParams certification_params(OdeKind kind, double mu, double L) {
  switch (kind) {
    case OdeKind::ProxPoint:
      return default_params(Form::ProxPoint, mu, L);
    case OdeKind::Agm:
      return default_params(Form::BregmanAgm, mu, L);
    case OdeKind::HeavyBall:
      return default_params(Form::HeavyBall, mu, L);
  }
  throw std::logic_error("unknown ODE kind");
}

Certificate verify_decay_bound(OdeKind kind, const Matrix& H, const HyperParams& params) {
  const auto es = eigen_of(H);
  const double mu = es.eigenvalues().minCoeff();
  const double L = es.eigenvalues().maxCoeff();
  const LinearSystem sys = build_linear_system(kind, H, params);

  Certificate cert{kind, mu, L, decay_rate_bound(kind, mu, L), -std::numeric_limits<double>::infinity(),
                   false, 0.0, params, H};
  cert.params.mu = mu;
  cert.params.L = L;
  for (const auto& b : block_diagonalize(sys)) {
    const double re = std::max(b.nu_plus.real(), b.nu_minus.real());
    if (re > cert.abscissa) {
      cert.abscissa = re;
      cert.worst_block_lambda = b.lambda;
    }
  }
  cert.pass = cert.abscissa <= -cert.rho_bound + 1e-9;
  return cert;
}

nlohmann::json to_json(const Certificate& cert) {
  return {{"kind", std::string(ode_kind_name(cert.kind))},
          {"mu", cert.mu},
          {"L", cert.L},
          {"rho_bound", cert.rho_bound},
          {"abscissa", cert.abscissa},
          {"pass", cert.pass},
          {"worst_block_lambda", cert.worst_block_lambda},
          {"params", to_json(cert.params)},
          {"H", to_json(cert.H)}};
}

}  // namespace geoaccel
