#include "geoaccel/random.hpp"

#include <cmath>
#include <stdexcept>

namespace geoaccel {

double log_uniform(Rng& rng, double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("log_uniform: need 0 < lo <= hi");
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

Matrix random_orthogonal(Rng& rng, int n) {
  if (n < 1) throw std::invalid_argument("random_orthogonal: n must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix G(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) G(i, j) = normal(rng);
  }
  const Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  }
  return Q;
}

Matrix random_spd(Rng& rng, int n, double mu, double L) {
  if (!(mu > 0.0) || !(L >= mu)) throw std::invalid_argument("random_spd: need 0 < mu <= L");
  Vector lambda(n);
  lambda[0] = mu;
  if (n > 1) lambda[n - 1] = L;
  for (int i = 1; i < n - 1; ++i) lambda[i] = log_uniform(rng, mu, L);
  const Matrix Q = random_orthogonal(rng, n);
  Matrix H = Q * lambda.asDiagonal() * Q.transpose();
  return 0.5 * (H + H.transpose());
}

}  // namespace geoaccel
